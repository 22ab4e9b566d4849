"""Numerical twin of a fiber-optic asymmetric phase-covariant 1->2 qubit cloner.

The package designs the optical network for any asymmetry parameter, runs an
exact two-photon interference simulation with coincidence post-selection, and
reproduces the theoretical and experiment-like fidelity tables and curves
under configurable imperfections.
"""

from .design import (
    PHASE_COVARIANT,
    UNIVERSAL,
    CloneDesign,
    TradeoffPoint,
    cubic_residual,
    pc_tradeoff_curve,
    reflectance_ratio,
    solve_reflectances,
    theoretical_fidelities,
    universal_fb_at,
    universal_tradeoff,
)
from .fock import (
    MINUS,
    PLUS,
    CouplerSpec,
    FockState,
    apply_attenuation,
    apply_coupler,
    apply_label_mixing,
    apply_phase,
    make_labeled_photon,
    make_single_photon,
    postselect_coincidence,
    postselect_density,
    postselect_probabilities,
    tensor,
)
from .network import (
    CLONE_A_RAILS,
    CLONE_B_RAILS,
    CoincidenceCounts,
    InputSpec,
    apply_cloner,
    apply_detection_blocks,
    clone_fidelities_ideal,
    fidelities_from_counts,
    joint_outcome_probs,
    outcome_probs_by_detection,
    prepare_input,
    run_ideal,
)
from .noise import (
    FidelityEstimate,
    NoiseModel,
    RunConfig,
    estimate_fidelities,
    expected_outcome_probs,
    hom_coincidence_probability,
    rescale_counts,
    sample_phase_drift,
    simulate_run,
    stabilization_cycle,
)

__version__ = "0.1.0"

__all__ = [
    "CloneDesign",
    "CoincidenceCounts",
    "CouplerSpec",
    "FidelityEstimate",
    "FockState",
    "InputSpec",
    "MINUS",
    "NoiseModel",
    "PHASE_COVARIANT",
    "PLUS",
    "RunConfig",
    "TradeoffPoint",
    "UNIVERSAL",
    "apply_attenuation",
    "apply_cloner",
    "apply_coupler",
    "apply_detection_blocks",
    "apply_label_mixing",
    "apply_phase",
    "clone_fidelities_ideal",
    "cubic_residual",
    "estimate_fidelities",
    "expected_outcome_probs",
    "fidelities_from_counts",
    "hom_coincidence_probability",
    "joint_outcome_probs",
    "make_labeled_photon",
    "make_single_photon",
    "outcome_probs_by_detection",
    "pc_tradeoff_curve",
    "postselect_coincidence",
    "postselect_density",
    "postselect_probabilities",
    "prepare_input",
    "reflectance_ratio",
    "rescale_counts",
    "run_ideal",
    "sample_phase_drift",
    "simulate_run",
    "solve_reflectances",
    "stabilization_cycle",
    "tensor",
    "theoretical_fidelities",
    "universal_fb_at",
    "universal_tradeoff",
    "CLONE_A_RAILS",
    "CLONE_B_RAILS",
]
