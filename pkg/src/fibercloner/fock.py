"""Exact amplitude-level simulation of one and two photons in a few optical modes.

States are sparse maps from photon configurations to complex amplitudes.  A
configuration is a canonically sorted tuple of (mode, label) slots, one slot
per photon.  The label is an internal degree of freedom (e.g. spectral or
polarization mode): photons with different labels evolve through the same
mode transformations but never interfere with each other.

Amplitudes refer to *normalized* occupation states, so a doubly occupied
slot |2> carries no hidden sqrt(2).  The conversion factors to and from the
creation-operator picture are handled inside the transformation routine,
which is what makes two-photon interference (Hong-Ou-Mandel bunching) come
out right.

All operations are pure functions returning new states; a FockState is never
mutated after construction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np

Slot = tuple[int, int]          # (mode index, internal label)
Config = tuple[Slot, ...]       # sorted, one slot per photon

#: Reflected amplitude on the second input picks up the minus sign:
#: mode i -> r*i + t*j,  mode j -> t*i - r*j.
MINUS = "minus"
#: Minus sign sits on the first input instead: i -> -r*i + t*j, j -> t*i + r*j.
PLUS = "plus"

_NORM_INPUT_TOL = 1e-9
_UNITARY_TOL = 1e-12


@dataclass(frozen=True)
class CouplerSpec:
    """A lossless two-mode coupler with intensity reflectance R.

    T is always 1 - R; amplitude coefficients r = sqrt(R) and t = sqrt(T) are
    real and nonnegative, with the sign placement fixed by ``sign_convention``
    (both choices give a real symmetric, self-inverse mode matrix).
    """

    reflectance: float
    sign_convention: str = MINUS

    def __post_init__(self):
        if not 0.0 <= self.reflectance <= 1.0:
            raise ValueError(f"reflectance must be in [0, 1], got {self.reflectance}")
        if self.sign_convention not in (MINUS, PLUS):
            raise ValueError(f"unknown sign convention {self.sign_convention!r}")

    @property
    def transmittance(self) -> float:
        return 1.0 - self.reflectance

    @property
    def r(self) -> float:
        return math.sqrt(self.reflectance)

    @property
    def t(self) -> float:
        return math.sqrt(self.transmittance)


@dataclass(frozen=True)
class FockState:
    """Superposition over photon configurations of a fixed mode register.

    ``norm_tracking`` accumulates the survival probability through lossy
    operations: it starts at 1 and is multiplied by the kept fraction each
    time amplitude is discarded, so ``1 - norm_tracking`` is the probability
    that a photon was lost somewhere upstream.
    """

    num_modes: int
    terms: Mapping[Config, complex] = field(default_factory=dict)
    norm_tracking: float = 1.0

    def photon_number(self) -> int:
        """Photon count shared by every term (0 for the empty state)."""
        for config in self.terms:
            return len(config)
        return 0

    def norm_squared(self) -> float:
        return sum(abs(a) ** 2 for a in self.terms.values())

    def lost_probability(self) -> float:
        return 1.0 - self.norm_tracking

    def amplitude(self, config: Iterable[tuple[int, int]]) -> complex:
        """Amplitude of one configuration, in canonical photon order."""
        return complex(self.terms.get(tuple(sorted(config)), 0.0))

    def probabilities(self) -> dict[Config, float]:
        return {c: abs(a) ** 2 for c, a in self.terms.items()}


def _check_mode(num_modes: int, m: int) -> None:
    if not 0 <= m < num_modes:
        raise ValueError(f"mode index {m} out of range for {num_modes} modes")


def _canonical(slots: Iterable[Slot]) -> Config:
    return tuple(sorted(slots))


def make_single_photon(
    num_modes: int,
    amplitudes: Sequence[tuple[int, complex]],
    label: int = 0,
) -> FockState:
    """One photon spread over the given modes with the given amplitudes.

    The amplitudes must already be normalized (sum of |amp|^2 equal to 1
    within 1e-9); the photon carries ``label`` in every term.
    """
    if not amplitudes:
        raise ValueError("amplitudes must be nonempty")
    slot_amps = [((m, label), a) for m, a in amplitudes]
    return make_labeled_photon(num_modes, slot_amps)


def make_labeled_photon(
    num_modes: int,
    amplitudes: Sequence[tuple[Slot, complex]],
) -> FockState:
    """One photon over explicit (mode, label) slots; used e.g. for a photon
    prepared in a superposition of internal labels."""
    if not amplitudes:
        raise ValueError("amplitudes must be nonempty")
    terms: dict[Config, complex] = {}
    norm_sq = 0.0
    for (m, lab), a in amplitudes:
        _check_mode(num_modes, m)
        a = complex(a)
        norm_sq += abs(a) ** 2
        key = ((m, lab),)
        terms[key] = terms.get(key, 0.0) + a
    if abs(norm_sq - 1.0) > _NORM_INPUT_TOL:
        raise ValueError(f"input amplitudes not normalized: sum |amp|^2 = {norm_sq!r}")
    return FockState(num_modes, terms)


def tensor(a: FockState, b: FockState) -> FockState:
    """Combine two states over the same mode register into one multi-photon
    state with canonical bosonic ordering.

    Configurations are merged as multisets with product amplitudes, so the
    norm is preserved even if the factors occupy overlapping modes.
    """
    if a.num_modes != b.num_modes:
        raise ValueError("states must share one mode register")
    total = a.photon_number() + b.photon_number()
    if total > 2:
        raise ValueError(f"engine supports at most 2 photons, got {total}")
    terms: dict[Config, complex] = {}
    for ca, aa in a.terms.items():
        for cb, ab in b.terms.items():
            key = _canonical(ca + cb)
            terms[key] = terms.get(key, 0.0) + aa * ab
    return FockState(a.num_modes, terms, a.norm_tracking * b.norm_tracking)


def _apply_slot_map(
    state: FockState,
    mapping: Callable[[Slot], Sequence[tuple[Slot, complex]] | None],
) -> FockState:
    """Transform each photon slot by a linear map; slots for which ``mapping``
    returns None pass through unchanged.

    Works in the creation-operator picture: a term on a doubly occupied slot
    is scaled by 1/sqrt(2) before expansion and bunched outputs are scaled by
    sqrt(2) afterwards, which reproduces bosonic interference exactly.
    """
    out: dict[Config, complex] = {}

    def columns(slot: Slot) -> Sequence[tuple[Slot, complex]]:
        col = mapping(slot)
        return [(slot, 1.0)] if col is None else col

    for config, amp in state.terms.items():
        if len(config) == 1:
            for tgt, c in columns(config[0]):
                key = (tgt,)
                out[key] = out.get(key, 0.0) + amp * c
        elif len(config) == 2:
            s1, s2 = config
            op_coeff = amp / math.sqrt(2.0) if s1 == s2 else amp
            for t1, c1 in columns(s1):
                for t2, c2 in columns(s2):
                    contrib = op_coeff * c1 * c2
                    if t1 == t2:
                        contrib *= math.sqrt(2.0)
                    key = _canonical((t1, t2))
                    out[key] = out.get(key, 0.0) + contrib
        else:
            raise ValueError(f"unsupported photon number {len(config)}")

    out = {k: v for k, v in out.items() if v != 0.0}
    return FockState(state.num_modes, out, state.norm_tracking)


def apply_coupler(s: FockState, i: int, j: int, c: CouplerSpec) -> FockState:
    """Mix modes i and j on a two-mode coupler (label-preserving).

    With the default ``minus`` convention the creation amplitudes map as
    i -> r*i + t*j and j -> t*i - r*j.  Photons carrying different labels
    transform identically but their cross terms stay distinguishable, which
    is what limits Hong-Ou-Mandel visibility for partially overlapping
    photons.
    """
    if i == j:
        raise ValueError("coupler needs two distinct modes")
    _check_mode(s.num_modes, i)
    _check_mode(s.num_modes, j)
    r, t = c.r, c.t
    if c.sign_convention == MINUS:
        col_i, col_j = ((i, r), (j, t)), ((i, t), (j, -r))
    else:
        col_i, col_j = ((i, -r), (j, t)), ((i, t), (j, r))

    def mapping(slot: Slot):
        m, lab = slot
        if m == i:
            return [((mi, lab), co) for mi, co in col_i]
        if m == j:
            return [((mi, lab), co) for mi, co in col_j]
        return None

    return _apply_slot_map(s, mapping)


def apply_phase(s: FockState, m: int, phi: float) -> FockState:
    """Phase shift on mode m: a term with k photons there gains exp(i*k*phi)."""
    _check_mode(s.num_modes, m)
    factor = complex(math.cos(phi), math.sin(phi))

    def mapping(slot: Slot):
        if slot[0] == m:
            return [(slot, factor)]
        return None

    return _apply_slot_map(s, mapping)


def apply_attenuation(s: FockState, m: int, eta: float) -> FockState:
    """Attenuate mode m to intensity transmittance eta, keeping the no-loss
    branch: each term is scaled by eta^(k/2) for k photons in the mode, and
    the discarded probability is folded into norm_tracking."""
    _check_mode(s.num_modes, m)
    if not 0.0 <= eta <= 1.0:
        raise ValueError(f"transmittance must be in [0, 1], got {eta}")
    factor = math.sqrt(eta)

    def mapping(slot: Slot):
        if slot[0] == m:
            return [(slot, factor)]
        return None

    before = s.norm_squared()
    out = _apply_slot_map(s, mapping)
    after = out.norm_squared()
    survival = after / before if before > 0.0 else 1.0
    return FockState(out.num_modes, dict(out.terms), s.norm_tracking * survival)


def apply_label_mixing(s: FockState, m: int, overlap: float, fresh_label: int) -> FockState:
    """Rotate part of each photon in mode m into a fresh internal label.

    Models imperfect mode matching of one interferometer arm: the amplitude
    fraction ``overlap`` stays in the photon's current label and
    sqrt(1 - overlap^2) moves to ``fresh_label``, suppressing downstream
    single-photon interference by exactly ``overlap``.  ``fresh_label`` must
    not already be present in that mode.
    """
    _check_mode(s.num_modes, m)
    if not 0.0 <= overlap <= 1.0:
        raise ValueError(f"overlap must be in [0, 1], got {overlap}")
    ortho = math.sqrt(max(0.0, 1.0 - overlap * overlap))

    def mapping(slot: Slot):
        mode, lab = slot
        if mode != m:
            return None
        if lab == fresh_label:
            raise ValueError(
                f"label {fresh_label} already present in mode {m}; pick a fresh one"
            )
        return [((mode, lab), overlap), ((mode, fresh_label), ortho)]

    return _apply_slot_map(s, mapping)


def _coincidence_slots(config: Config, group_a: Sequence[int], group_b: Sequence[int]):
    """The (slot in A, slot in B) pair if the config has exactly one photon
    in each group, else None."""
    in_a = [slot for slot in config if slot[0] in group_a]
    in_b = [slot for slot in config if slot[0] in group_b]
    if len(in_a) != 1 or len(in_b) != 1:
        return None
    return in_a[0], in_b[0]


def _check_groups(s: FockState, group_a: Sequence[int], group_b: Sequence[int]) -> None:
    group_a, group_b = tuple(group_a), tuple(group_b)
    if len(group_a) != 2 or len(group_b) != 2:
        raise ValueError("each detection group must contain exactly 2 modes")
    if set(group_a) & set(group_b):
        raise ValueError("detection groups must be disjoint")
    for m in (*group_a, *group_b):
        _check_mode(s.num_modes, m)
    if s.photon_number() != 2:
        raise ValueError("coincidence post-selection needs a two-photon state")


def postselect_coincidence(s, group_a, group_b):
    """Keep only terms with one photon in each group and return the 2x2
    complex amplitude array indexed by (rail in A, rail in B), plus the total
    retained probability.

    The amplitude description exists only while the retained part carries a
    single internal-label pattern; for states with mixed labels use
    :func:`postselect_probabilities` or :func:`postselect_density`.

    Group order matters: the first mode of each group is that clone's rail 0.
    """
    group_a, group_b = tuple(group_a), tuple(group_b)
    _check_groups(s, group_a, group_b)
    amps = np.zeros((2, 2), dtype=complex)
    label_patterns = set()
    success = 0.0
    for config, amp in s.terms.items():
        slots = _coincidence_slots(config, group_a, group_b)
        if slots is None:
            continue
        (ma, la), (mb, lb) = slots
        label_patterns.add((la, lb))
        if len(label_patterns) > 1:
            raise ValueError(
                "retained terms carry mixed internal labels; the pure amplitude "
                "description does not exist (use postselect_probabilities)"
            )
        amps[group_a.index(ma), group_b.index(mb)] = amp
        success += abs(amp) ** 2
    return amps, success


def postselect_probabilities(s, group_a, group_b):
    """Rail-pattern probabilities of the coincidence post-selection as a 2x2
    real array (summed over internal labels), plus the retained probability."""
    group_a, group_b = tuple(group_a), tuple(group_b)
    _check_groups(s, group_a, group_b)
    probs = np.zeros((2, 2))
    for config, amp in s.terms.items():
        slots = _coincidence_slots(config, group_a, group_b)
        if slots is not None:
            (ma, _), (mb, _) = slots
            probs[group_a.index(ma), group_b.index(mb)] += abs(amp) ** 2
    return probs, float(probs.sum())


def postselect_density(s, group_a, group_b):
    """Unnormalized 4x4 density matrix of the post-selected two-qubit state,
    reduced over internal labels.  Basis order: (A0,B0), (A0,B1), (A1,B0),
    (A1,B1).  The trace equals the retained probability.

    Coherence survives only between terms whose A photons share a label and
    whose B photons share a label; everything else adds incoherently.
    """
    group_a, group_b = tuple(group_a), tuple(group_b)
    _check_groups(s, group_a, group_b)
    by_labels: dict[tuple[int, int], np.ndarray] = {}
    for config, amp in s.terms.items():
        slots = _coincidence_slots(config, group_a, group_b)
        if slots is None:
            continue
        (ma, la), (mb, lb) = slots
        vec = by_labels.setdefault((la, lb), np.zeros(4, dtype=complex))
        vec[2 * group_a.index(ma) + group_b.index(mb)] += amp
    rho = np.zeros((4, 4), dtype=complex)
    for vec in by_labels.values():
        rho += np.outer(vec, vec.conj())
    return rho, float(rho.trace().real)
