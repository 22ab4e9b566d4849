"""Imperfection models and Monte-Carlo coincidence counting.

The noise model owns one knob per physical imperfection: the two-photon mode
overlap at the first coupler (limits the two-photon interference dip), the
single-photon mode overlap of each analyzing interferometer, a Wiener phase
drift with periodic active stabilization, arm transmittances, detector
efficiencies and the setting accuracy of the coupler reflectances.

Counting windows are statistically independent: every repetition draws from
its own seeded substream, so results are bit-identical regardless of the
order (or parallelism) in which windows are evaluated.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .design import CloneDesign
from .fock import apply_attenuation, apply_label_mixing, apply_phase
from .network import (
    ANALYZER_A_LABEL,
    ANALYZER_B_LABEL,
    CLONE_A_RAILS,
    CLONE_B_RAILS,
    MODE_A0,
    MODE_A1,
    MODE_B0,
    MODE_B1,
    CoincidenceCounts,
    InputSpec,
    apply_cloner,
    apply_detection_blocks,
    postselect_probabilities,
    prepare_input,
)

ARM_NAMES = ("A0", "A1", "B0", "B1")
_ARM_MODES = {"A0": MODE_A0, "A1": MODE_A1, "B0": MODE_B0, "B1": MODE_B1}

#: Window discretization for the drifting phase: one slice per second of
#: counting, evaluated at the slice midpoint.
_SLICE_SECONDS = 1.0


def _default_arms() -> dict[str, float]:
    return {name: 1.0 for name in ARM_NAMES}


@dataclass(frozen=True)
class NoiseModel:
    """Imperfection parameters.

    ``detector_efficiencies`` is ordered (D0A, D1A, D0B, D1B), i.e. the '+'
    and '-' detectors of clone A then of clone B.  Field defaults describe a
    typical well-aligned run; use :meth:`ideal` for the noiseless model and
    :meth:`paper_like` for the documented experiment-like preset.
    """

    overlap_mu: float = 0.98
    mz_overlap: float = 0.97
    drift_rate_sigma: float = math.pi / 1000.0
    stabilization_period_s: float = 3.0
    stabilization_residual_sigma: float = 0.02
    arm_transmittances: dict[str, float] = field(default_factory=_default_arms)
    detector_efficiencies: tuple[float, float, float, float] = (0.5, 0.5, 0.5, 0.5)
    coupler_setting_error: float = 0.0

    def __post_init__(self):
        for name, val in (("overlap_mu", self.overlap_mu), ("mz_overlap", self.mz_overlap)):
            if not 0.0 <= val <= 1.0:
                raise ValueError(f"{name} must be in [0, 1], got {val}")
        if self.drift_rate_sigma < 0 or self.stabilization_residual_sigma < 0:
            raise ValueError("drift and residual sigmas must be nonnegative")
        if self.stabilization_period_s <= 0:
            raise ValueError("stabilization period must be positive")
        if set(self.arm_transmittances) != set(ARM_NAMES):
            raise ValueError(f"arm transmittances must be keyed by {ARM_NAMES}")
        for name, val in self.arm_transmittances.items():
            if not 0.0 <= val <= 1.0:
                raise ValueError(f"arm {name} transmittance must be in [0, 1]")
        if len(self.detector_efficiencies) != 4:
            raise ValueError("need four detector efficiencies")
        for val in self.detector_efficiencies:
            if not 0.0 < val <= 1.0:
                raise ValueError("detector efficiencies must be in (0, 1]")
        if self.coupler_setting_error < 0:
            raise ValueError("coupler setting error must be nonnegative")

    @classmethod
    def ideal(cls) -> "NoiseModel":
        """No imperfections at all."""
        return cls(
            overlap_mu=1.0,
            mz_overlap=1.0,
            drift_rate_sigma=0.0,
            stabilization_residual_sigma=0.0,
            detector_efficiencies=(1.0, 1.0, 1.0, 1.0),
            coupler_setting_error=0.0,
        )

    @classmethod
    def paper_like(cls) -> "NoiseModel":
        """Preset calibrated to land simulated fidelities 1-2% below theory:
        98% two-photon overlap, 97% analyzer overlap, pi/1000 rad/sqrt(s)
        drift stabilized every 3 s to a 0.02 rad residual, 50% detector
        efficiency and a 0.005 setting error on the coupler reflectances."""
        return cls(coupler_setting_error=0.005)

    def efficiency_for(self, a: int, b: int) -> float:
        """Product of the two detector efficiencies involved in outcome
        (a, b), each index 0 for '+' and 1 for '-'."""
        eff = self.detector_efficiencies
        return eff[a] * eff[2 + b]


@dataclass(frozen=True)
class RunConfig:
    """One Monte-Carlo counting campaign: ``repetitions`` windows of
    ``duration_s`` seconds at ``pair_rate_hz`` generated photon pairs."""

    duration_s: float = 3.0
    pair_rate_hz: float = 1000.0
    seed: int = 12345
    repetitions: int = 40

    def __post_init__(self):
        if self.duration_s <= 0:
            raise ValueError("duration must be positive")
        if self.pair_rate_hz < 0:
            raise ValueError("pair rate must be nonnegative")
        if self.repetitions < 1:
            raise ValueError("need at least one repetition")


def hom_coincidence_probability(R: float, mu: float) -> float:
    """Coincidence probability for one photon in each input of an R:T coupler
    with mode overlap mu: mu*(T-R)^2 + (1-mu)*(T^2+R^2).

    At R = 1/2 the dip visibility (P_dist - P)/P_dist is exactly mu.
    """
    if not 0.0 <= R <= 1.0:
        raise ValueError(f"R must be in [0, 1], got {R}")
    if not 0.0 <= mu <= 1.0:
        raise ValueError(f"mu must be in [0, 1], got {mu}")
    T = 1.0 - R
    return mu * (T - R) ** 2 + (1.0 - mu) * (T * T + R * R)


def sample_phase_drift(
    sigma_rate: float, duration_s: float, rng: np.random.Generator
) -> float:
    """One Wiener-process increment: normal with standard deviation
    sigma_rate * sqrt(duration)."""
    if duration_s < 0:
        raise ValueError("duration must be nonnegative")
    return float(rng.normal(0.0, sigma_rate * math.sqrt(duration_s)))


def stabilization_cycle(
    current_phase_error: float, model: NoiseModel, rng: np.random.Generator
) -> float:
    """Residual phase error after one active correction.  The accumulated
    drift is cancelled completely up to the estimation noise of the
    stabilization, so the result does not depend on the incoming error."""
    del current_phase_error
    if model.stabilization_residual_sigma == 0.0:
        return 0.0
    return float(rng.normal(0.0, model.stabilization_residual_sigma))


def rescale_counts(
    counts: CoincidenceCounts, efficiencies: Sequence[float]
) -> CoincidenceCounts:
    """Compensate unequal detector efficiencies by dividing each tally by the
    product of its two detectors' efficiencies (order D0A, D1A, D0B, D1B)."""
    e0a, e1a, e0b, e1b = efficiencies
    for val in (e0a, e1a, e0b, e1b):
        if val <= 0:
            raise ValueError("detector efficiencies must be positive for rescaling")
    return CoincidenceCounts(
        c_pp=counts.c_pp / (e0a * e0b),
        c_mm=counts.c_mm / (e1a * e1b),
        c_pm=counts.c_pm / (e0a * e1b),
        c_mp=counts.c_mp / (e1a * e0b),
    )


def _perturbed_design(
    design: CloneDesign, noise: NoiseModel, rng: np.random.Generator
) -> CloneDesign:
    """Coupler reflectances offset by the setting error (one systematic draw
    per campaign, as when dialing the couplers once per configuration)."""
    if noise.coupler_setting_error == 0.0:
        return design
    d0, d1 = rng.normal(0.0, noise.coupler_setting_error, 2)
    return dataclasses.replace(
        design,
        R0=float(np.clip(design.R0 + d0, 0.0, 1.0)),
        R1=float(np.clip(design.R1 + d1, 0.0, 1.0)),
    )


def _outcome_weights(
    design: CloneDesign,
    phi: float,
    noise: NoiseModel,
    delta_a: float,
    delta_b: float,
    coherence_a: float = 1.0,
    coherence_b: float = 1.0,
) -> np.ndarray:
    """Unnormalized probabilities of the four detector patterns for one
    instant of the drifting phases (detector efficiencies not included).

    ``coherence_a``/``coherence_b`` scale the analyzer overlap; the analytic
    expectation path uses them to fold in the drift average, the sampling
    path leaves them at 1 and passes the drawn phases instead.
    """
    state = prepare_input(InputSpec(phi), overlap_mu=noise.overlap_mu)
    state = apply_cloner(state, design)
    for name in ARM_NAMES:
        eta = noise.arm_transmittances[name]
        if eta != 1.0:
            state = apply_attenuation(state, _ARM_MODES[name], eta)
    if delta_a != 0.0:
        state = apply_phase(state, MODE_A1, delta_a)
    if delta_b != 0.0:
        state = apply_phase(state, MODE_B1, delta_b)
    overlap_a = noise.mz_overlap * coherence_a
    overlap_b = noise.mz_overlap * coherence_b
    if overlap_a < 1.0:
        state = apply_label_mixing(state, MODE_A1, overlap_a, ANALYZER_A_LABEL)
    if overlap_b < 1.0:
        state = apply_label_mixing(state, MODE_B1, overlap_b, ANALYZER_B_LABEL)
    state = apply_detection_blocks(state, phi)
    probs, _ = postselect_probabilities(state, CLONE_A_RAILS, CLONE_B_RAILS)
    return probs


def _window_slices(duration_s: float) -> tuple[int, float]:
    n = max(1, math.ceil(duration_s / _SLICE_SECONDS))
    return n, duration_s / n


def _slice_schedule(duration_s: float, period_s: float) -> list[tuple[float, float]]:
    """Midpoint times of the counting slices together with the drift time
    elapsed since the most recent stabilization (the window start or the last
    in-window period boundary)."""
    n, dt = _window_slices(duration_s)
    schedule = []
    for k in range(n):
        t_mid = (k + 0.5) * dt
        anchor = math.floor(t_mid / period_s) * period_s
        schedule.append((t_mid, t_mid - anchor))
    return schedule


def expected_outcome_probs(
    design: CloneDesign,
    phi: float,
    noise: NoiseModel,
    duration_s: float = 3.0,
    perturbed: CloneDesign | None = None,
) -> np.ndarray:
    """Expected (Poisson-mean) detector-pattern probabilities for one
    counting window, averaged exactly over the stabilization residual and the
    in-window drift at the same slice midpoints the sampler uses.  Detector
    efficiencies are not included."""
    base = perturbed if perturbed is not None else design
    residual_var = noise.stabilization_residual_sigma ** 2
    schedule = _slice_schedule(duration_s, noise.stabilization_period_s)
    total = np.zeros((2, 2))
    for _, drift_time in schedule:
        var = residual_var + noise.drift_rate_sigma ** 2 * drift_time
        coh = math.exp(-0.5 * var)
        total += _outcome_weights(base, phi, noise, 0.0, 0.0, coh, coh)
    return total / len(schedule)


def simulate_run(
    design: CloneDesign,
    phi: float,
    noise: NoiseModel,
    cfg: RunConfig,
) -> list[CoincidenceCounts]:
    """Simulate ``cfg.repetitions`` stabilized counting windows and return the
    Poisson-drawn coincidence counts of each.

    Every window starts from a fresh stabilization residual, accumulates
    Wiener phase drift across the window (one slice per second, midpoint
    phases), and draws the four channel counts as independent Poissons with
    mean pair_rate * dt * pattern_probability * detector_efficiencies.
    """
    setup_rng = np.random.default_rng(np.random.SeedSequence(cfg.seed, spawn_key=(0,)))
    actual = _perturbed_design(design, noise, setup_rng)
    eff = np.array(
        [[noise.efficiency_for(0, 0), noise.efficiency_for(0, 1)],
         [noise.efficiency_for(1, 0), noise.efficiency_for(1, 1)]]
    )
    schedule = _slice_schedule(cfg.duration_s, noise.stabilization_period_s)
    dt = cfg.duration_s / len(schedule)
    results = []
    for rep in range(cfg.repetitions):
        rng = np.random.default_rng(np.random.SeedSequence(cfg.seed, spawn_key=(1, rep)))
        delta_a = stabilization_cycle(0.0, noise, rng)
        delta_b = stabilization_cycle(0.0, noise, rng)
        means = np.zeros((2, 2))
        prev_mid, prev_drift_time = None, None
        for t_mid, drift_time in schedule:
            if prev_mid is not None and drift_time < t_mid - prev_mid + prev_drift_time:
                # a stabilization boundary was crossed: fresh residual, then
                # drift only since that boundary
                delta_a = stabilization_cycle(delta_a, noise, rng)
                delta_b = stabilization_cycle(delta_b, noise, rng)
                step = drift_time
            else:
                step = t_mid - prev_mid if prev_mid is not None else drift_time
            delta_a += sample_phase_drift(noise.drift_rate_sigma, step, rng)
            delta_b += sample_phase_drift(noise.drift_rate_sigma, step, rng)
            prev_mid, prev_drift_time = t_mid, drift_time
            probs = _outcome_weights(actual, phi, noise, delta_a, delta_b)
            means += cfg.pair_rate_hz * dt * probs * eff
        counts = rng.poisson(means)
        results.append(CoincidenceCounts.from_array(counts.astype(float)))
    return results


@dataclass(frozen=True)
class FidelityEstimate:
    """Pooled fidelities with their standard errors and the raw event total."""

    f_a: float
    f_b: float
    err_a: float
    err_b: float
    raw_total: float


def estimate_fidelities(
    runs: Sequence[CoincidenceCounts],
    efficiencies: Sequence[float] = (1.0, 1.0, 1.0, 1.0),
) -> FidelityEstimate:
    """Efficiency-rescale each window, pool, and attach standard errors.

    Errors are the standard error of the per-window fidelity estimates; with
    fewer than two usable windows they fall back to binomial error
    propagation on the pooled counts.
    """
    rescaled = [rescale_counts(c, efficiencies) for c in runs]
    pooled = rescaled[0]
    for c in rescaled[1:]:
        pooled = pooled + c
    f_a, f_b = _fidelities_or_raise(pooled)
    raw_total = sum(c.total for c in runs)

    per_window = [
        _fidelities_or_raise(c) for c in rescaled if c.total > 0
    ]
    if len(per_window) >= 2:
        fas = np.array([f[0] for f in per_window])
        fbs = np.array([f[1] for f in per_window])
        err_a = float(fas.std(ddof=1) / math.sqrt(len(per_window)))
        err_b = float(fbs.std(ddof=1) / math.sqrt(len(per_window)))
    else:
        err_a = math.sqrt(max(f_a * (1.0 - f_a), 0.0) / raw_total) if raw_total else 0.0
        err_b = math.sqrt(max(f_b * (1.0 - f_b), 0.0) / raw_total) if raw_total else 0.0
    return FidelityEstimate(f_a, f_b, err_a, err_b, raw_total)


def _fidelities_or_raise(counts: CoincidenceCounts) -> tuple[float, float]:
    from .network import fidelities_from_counts

    return fidelities_from_counts(counts)
