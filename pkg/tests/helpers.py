"""Independent oracles used across the test modules.

Everything here is deliberately written against the *mode transfer matrix*
formulation (matrix elements and permanent-style two-photon expansion), not
the engine's term-rewriting, so engine results are checked by a genuinely
separate computation path.
"""

import math

import numpy as np

from fibercloner.design import CloneDesign
from fibercloner.network import CLONE_A_RAILS, CLONE_B_RAILS, NUM_MODES


def network_transfer_matrix(design: CloneDesign) -> np.ndarray:
    """4x4 single-photon transfer matrix of the cloner: both couplers (minus
    convention: i -> r i + t j, j -> t i - r j) followed by the pi
    compensation phase on clone B rail 0.  Column m is input mode m."""
    r0, t0 = math.sqrt(design.R0), math.sqrt(1.0 - design.R0)
    r1, t1 = math.sqrt(design.R1), math.sqrt(1.0 - design.R1)
    u = np.zeros((NUM_MODES, NUM_MODES))
    u[0, 0], u[2, 0] = r0, t0
    u[0, 2], u[2, 2] = t0, -r0
    u[1, 1], u[3, 1] = r1, t1
    u[1, 3], u[3, 3] = t1, -r1
    comp = np.diag([1.0, 1.0, -1.0, 1.0])
    return comp @ u


def two_photon_output(
    u: np.ndarray, input_pairs: list[tuple[tuple[int, int], complex]]
) -> dict[tuple[int, int], complex]:
    """Brute-force enumeration of all two-photon output configurations.

    ``input_pairs`` maps ordered input mode pairs (i, j), i != j, to
    amplitudes.  Output keys are sorted mode pairs (m, n) with m <= n; the
    amplitude on a doubly occupied mode includes the bosonic sqrt(2).
    """
    n = u.shape[0]
    out: dict[tuple[int, int], complex] = {}
    for (i, j), c in input_pairs:
        assert i != j
        for m in range(n):
            for k in range(m, n):
                if m == k:
                    amp = math.sqrt(2.0) * u[m, i] * u[m, j]
                else:
                    amp = u[m, i] * u[k, j] + u[k, i] * u[m, j]
                if amp != 0.0:
                    out[(m, k)] = out.get((m, k), 0.0) + c * amp
    return out


def brute_force_postselected(design: CloneDesign, phi: float):
    """Post-selected 2x2 amplitudes and success probability of the ideal
    network, from the transfer-matrix enumeration."""
    u = network_transfer_matrix(design)
    e = complex(math.cos(phi), math.sin(phi))
    inputs = [((0, 2), 1.0 / math.sqrt(2.0)), ((1, 2), e / math.sqrt(2.0))]
    output = two_photon_output(u, inputs)
    amps = np.zeros((2, 2), dtype=complex)
    success = 0.0
    for (m, k), amp in output.items():
        modes = (m, k)
        in_a = [x for x in modes if x in CLONE_A_RAILS]
        in_b = [x for x in modes if x in CLONE_B_RAILS]
        if len(in_a) == 1 and len(in_b) == 1:
            amps[CLONE_A_RAILS.index(in_a[0]), CLONE_B_RAILS.index(in_b[0])] = amp
            success += abs(amp) ** 2
    return amps, success


def closed_form_outcome_probs(q: float, phi: float) -> np.ndarray:
    """Hand-derived joint projection probabilities of the ideal post-selected
    state: p(a, b) = (1/8) (1 + a sqrt(q) + b sqrt(1-q))^2, independent of
    phi.  Indexed [a, b] with 0 = '+' and 1 = '-'."""
    del phi
    sq, s1q = math.sqrt(q), math.sqrt(1.0 - q)
    probs = np.zeros((2, 2))
    for ai, a in enumerate((1.0, -1.0)):
        for bi, b in enumerate((1.0, -1.0)):
            probs[ai, bi] = (1.0 + a * sq + b * s1q) ** 2 / 8.0
    return probs


def attenuation_survival_by_aux_mode(state, mode: int, eta: float) -> float:
    """Loss oracle: embed the state in a register with one extra vacuum mode,
    route the lossy mode through a coupler with transmittance eta into the
    auxiliary mode, and sum the probability of the no-photon-lost branch."""
    from fibercloner.fock import CouplerSpec, FockState, apply_coupler

    aux = state.num_modes
    widened = FockState(state.num_modes + 1, dict(state.terms), state.norm_tracking)
    # reflectance eta keeps sqrt(eta) in place; the 1 - eta fraction leaks out
    mixed = apply_coupler(widened, mode, aux, CouplerSpec(eta))
    survival = 0.0
    for config, amp in mixed.terms.items():
        if all(m != aux for m, _ in config):
            survival += abs(amp) ** 2
    return survival
