"""The cloner network: preparation, couplers, compensation and measurement.

Mode register (4 modes, couplers act in place):

    0  signal rail 0   -> clone A rail 0 after the first coupler
    1  signal rail 1   -> clone A rail 1 after the second coupler
    2  ancilla rail 0  -> clone B rail 0 (the ancilla photon starts here)
    3  ancilla rail 1  -> clone B rail 1 (vacuum input of the second coupler)

The first variable-ratio coupler (reflectance R0) mixes modes 0 and 2, the
second (R1) mixes modes 1 and 3.  With R0 > 1/2 the larger share of the
ancilla is reflected into clone B, which is the configuration whose fidelity
is the more fragile one under imperfect two-photon overlap.

A fixed pi compensation phase on clone B rail 0 turns the raw conditional
map into the canonical form |00> + e^{i phi}(sqrt(q)|10> + sqrt(1-q)|01>)
with nonnegative real coefficients, mirroring the phase calibration done
with the hardware phase modulators.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .design import CloneDesign
from .fock import (
    MINUS,
    CouplerSpec,
    FockState,
    apply_coupler,
    apply_phase,
    make_labeled_photon,
    make_single_photon,
    postselect_coincidence,
    postselect_density,
    postselect_probabilities,
    tensor,
)

NUM_MODES = 4
MODE_A0, MODE_A1, MODE_B0, MODE_B1 = 0, 1, 2, 3
CLONE_A_RAILS = (MODE_A0, MODE_A1)
CLONE_B_RAILS = (MODE_B0, MODE_B1)

#: Labels 0/1 are reserved for the signal/ancilla overlap split; the analyzer
#: arms use 2 and 3 for their own mismatch components.
ANCILLA_MISMATCH_LABEL = 1
ANALYZER_A_LABEL = 2
ANALYZER_B_LABEL = 3

_COMPENSATION_MODE = MODE_B0


@dataclass(frozen=True)
class InputSpec:
    """Equatorial signal qubit: phase phi, optional splitting imbalance.

    ``imbalance`` shifts probability weight between the signal rails:
    |amp0|^2 = 1/2 + imbalance, |amp1|^2 = 1/2 - imbalance.  Zero gives the
    even split of the equator; +1/2 forces the whole photon onto rail 0.
    """

    phi: float
    imbalance: float = 0.0

    def __post_init__(self):
        if abs(self.imbalance) > 0.5:
            raise ValueError("imbalance must be within [-1/2, 1/2]")

    def rail_amplitudes(self) -> tuple[complex, complex]:
        a0 = math.sqrt(0.5 + self.imbalance)
        a1 = math.sqrt(0.5 - self.imbalance) * complex(
            math.cos(self.phi), math.sin(self.phi)
        )
        return a0, a1


@dataclass(frozen=True)
class CoincidenceCounts:
    """The four coincidence tallies, indexed by the projection outcome of
    clone A (first sign) and clone B (second sign)."""

    c_pp: float
    c_mm: float
    c_pm: float
    c_mp: float

    def __post_init__(self):
        if min(self.c_pp, self.c_mm, self.c_pm, self.c_mp) < 0:
            raise ValueError("coincidence counts must be nonnegative")

    @property
    def total(self) -> float:
        return self.c_pp + self.c_mm + self.c_pm + self.c_mp

    def as_array(self) -> np.ndarray:
        """2x2 array indexed [a, b] with 0 = '+' and 1 = '-'."""
        return np.array([[self.c_pp, self.c_pm], [self.c_mp, self.c_mm]])

    @classmethod
    def from_array(cls, arr) -> "CoincidenceCounts":
        arr = np.asarray(arr)
        return cls(c_pp=arr[0, 0], c_mm=arr[1, 1], c_pm=arr[0, 1], c_mp=arr[1, 0])

    def __add__(self, other: "CoincidenceCounts") -> "CoincidenceCounts":
        return CoincidenceCounts(
            self.c_pp + other.c_pp,
            self.c_mm + other.c_mm,
            self.c_pm + other.c_pm,
            self.c_mp + other.c_mp,
        )


def prepare_input(spec: InputSpec, overlap_mu: float = 1.0) -> FockState:
    """Two-photon input: the signal split over its rails with phase phi, the
    ancilla on its rail 0 with the internal-label split set by the mode
    overlap mu (the coherent fraction of the two-photon interference)."""
    if not 0.0 <= overlap_mu <= 1.0:
        raise ValueError("overlap must be in [0, 1]")
    a0, a1 = spec.rail_amplitudes()
    signal = make_single_photon(NUM_MODES, [(MODE_A0, a0), (MODE_A1, a1)])
    matched = math.sqrt(overlap_mu)
    mismatched = math.sqrt(1.0 - overlap_mu)
    ancilla_amps = [((MODE_B0, 0), matched)]
    if mismatched > 0.0:
        ancilla_amps.append(((MODE_B0, ANCILLA_MISMATCH_LABEL), mismatched))
    ancilla = make_labeled_photon(NUM_MODES, ancilla_amps)
    return tensor(signal, ancilla)


def couplers_for(design: CloneDesign) -> tuple[CouplerSpec, CouplerSpec]:
    return (
        CouplerSpec(design.R0, MINUS),
        CouplerSpec(design.R1, MINUS),
    )


def apply_cloner(state: FockState, design: CloneDesign) -> FockState:
    """Both variable-ratio couplers followed by the compensation phase."""
    vrc0, vrc1 = couplers_for(design)
    state = apply_coupler(state, MODE_A0, MODE_B0, vrc0)
    state = apply_coupler(state, MODE_A1, MODE_B1, vrc1)
    return apply_phase(state, _COMPENSATION_MODE, math.pi)


def apply_detection_blocks(state: FockState, phi: float) -> FockState:
    """Each clone's measurement block: a -phi shift on its rail 1 and a 50:50
    coupler across its rails.  Detecting the photon on rail 0 afterwards is
    the projection onto the input state ('+'), rail 1 onto its orthogonal
    complement ('-')."""
    half = CouplerSpec(0.5, MINUS)
    state = apply_phase(state, MODE_A1, -phi)
    state = apply_phase(state, MODE_B1, -phi)
    state = apply_coupler(state, MODE_A0, MODE_A1, half)
    state = apply_coupler(state, MODE_B0, MODE_B1, half)
    return state


def run_ideal(
    design: CloneDesign, phi: float, imbalance: float = 0.0
) -> tuple[np.ndarray, float]:
    """Run the noiseless network on the equatorial input with phase phi.

    Returns the normalized post-selected two-qubit amplitudes (2x2, indexed
    by clone A rail then clone B rail) and the post-selection success
    probability, which is (2 R0 - 1)^2 independently of phi for the even
    split (imbalance 0).
    """
    state = prepare_input(InputSpec(phi, imbalance))
    state = apply_cloner(state, design)
    amps, success = postselect_coincidence(state, CLONE_A_RAILS, CLONE_B_RAILS)
    if success <= 1e-15:
        raise ValueError("degenerate post-selection: success probability is zero")
    return amps / math.sqrt(success), success


def _analysis_vectors(phi: float) -> np.ndarray:
    """Rows: the '+' and '-' analysis states (input state and its orthogonal
    complement) as dual-rail amplitude vectors."""
    e = complex(math.cos(phi), math.sin(phi))
    return np.array([[1.0, e], [1.0, -e]]) / math.sqrt(2.0)


def joint_outcome_probs(design: CloneDesign, phi: float) -> np.ndarray:
    """Probabilities of the four (+/-, +/-) joint projection outcomes of the
    normalized post-selected state; entry [a, b] with 0 = '+' and 1 = '-'."""
    amps, _ = run_ideal(design, phi)
    basis = _analysis_vectors(phi)
    # overlap[a, b] = <psi_a psi_b | chi>
    overlap = basis.conj() @ amps @ basis.conj().T
    probs = np.abs(overlap) ** 2
    return probs


def clone_fidelities_ideal(design: CloneDesign, phi: float) -> tuple[float, float]:
    """Fidelity of each clone with the input state, from the analytic
    projection of the post-selected output."""
    probs = joint_outcome_probs(design, phi)
    f_a = float(probs[0, 0] + probs[0, 1])
    f_b = float(probs[0, 0] + probs[1, 0])
    return f_a, f_b


def outcome_probs_by_detection(design: CloneDesign, phi: float) -> np.ndarray:
    """Same four outcome probabilities obtained by physically propagating
    through the measurement blocks and post-selecting on the detector rails.
    Agrees with :func:`joint_outcome_probs` to machine precision."""
    state = prepare_input(InputSpec(phi))
    state = apply_cloner(state, design)
    state = apply_detection_blocks(state, phi)
    probs, success = postselect_probabilities(state, CLONE_A_RAILS, CLONE_B_RAILS)
    if success <= 1e-15:
        raise ValueError("degenerate post-selection: success probability is zero")
    return probs / success


def postselected_density(state: FockState) -> tuple[np.ndarray, float]:
    """Reduced two-qubit density matrix of an already-propagated network
    state, post-selected on one photon per clone."""
    return postselect_density(state, CLONE_A_RAILS, CLONE_B_RAILS)


def fidelities_from_counts(counts: CoincidenceCounts) -> tuple[float, float]:
    """Clone fidelities from the four coincidence tallies:
    F_A = (C++ + C+-)/total, F_B = (C++ + C-+)/total."""
    total = counts.total
    if total <= 0:
        raise ValueError("cannot extract fidelities from empty count data")
    return (
        (counts.c_pp + counts.c_pm) / total,
        (counts.c_pp + counts.c_mp) / total,
    )
