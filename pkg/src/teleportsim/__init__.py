"""Qubit teleportation as a generalized measurement.

Simulates remote ensemble preparation (steering), the four-outcome
teleportation POVM and its projective dilation, unambiguous state
discrimination, perfect conclusive teleportation over partially entangled
pure states, and quasi-conclusive teleportation over a filtered mixed
resource, together with the closed-form success probabilities and
fidelities of each protocol.
"""

from .linalg import ATOL, hermitian_eigh, is_psd, kron, partial_trace, sqrt_psd
from .povm import (
    KrausSet,
    MeasurementOutcome,
    Povm,
    completeness_residual,
    discrimination_povm,
    filter_pair,
    induced_povm,
    kraus_from_povm,
    measure,
    min_eigenvalue,
    projective,
    teleportation_povm,
)
from .protocols import (
    ConclusiveMonteCarlo,
    FilterParams,
    ProtocolRecord,
    QuasiConclusiveResult,
    TwoStepResult,
    bell_projectors,
    bilocal_filter,
    conclusive_monte_carlo,
    conclusive_success_probability,
    conclusive_teleport,
    correction_table,
    filter_success_probability,
    max_teleport_fidelity,
    naive_partial_teleport,
    naive_phi_plus_fidelity,
    naive_phi_plus_probability,
    p_prime_after_filter,
    parity_projectors,
    quasi_conclusive_teleport,
    required_filter_index,
    standard_teleport,
    teleport_average_fidelity,
    teleport_entanglement_fidelity,
    trial_rng,
    two_step_bell,
)
from .states import (
    BELL_LABELS,
    DensityMatrix,
    PureState,
    SchmidtPair,
    bell_state,
    fidelity,
    haar_random_qubit,
    haar_random_state,
    haar_random_unitary,
    mixed_resource,
    partially_entangled,
    qubit,
    schmidt_coeffs,
)
from .steering import (
    Ensemble,
    SteeringBranch,
    SteeringResult,
    b92_generation,
    canonical_ensemble,
    ensemble_density,
    steer,
)

__version__ = "0.1.0"

__all__ = [
    "ATOL",
    "BELL_LABELS",
    "ConclusiveMonteCarlo",
    "DensityMatrix",
    "Ensemble",
    "FilterParams",
    "KrausSet",
    "MeasurementOutcome",
    "Povm",
    "ProtocolRecord",
    "PureState",
    "QuasiConclusiveResult",
    "SchmidtPair",
    "SteeringBranch",
    "SteeringResult",
    "TwoStepResult",
    "b92_generation",
    "bell_projectors",
    "bell_state",
    "bilocal_filter",
    "canonical_ensemble",
    "completeness_residual",
    "conclusive_monte_carlo",
    "conclusive_success_probability",
    "conclusive_teleport",
    "correction_table",
    "discrimination_povm",
    "ensemble_density",
    "fidelity",
    "filter_pair",
    "filter_success_probability",
    "haar_random_qubit",
    "haar_random_state",
    "haar_random_unitary",
    "hermitian_eigh",
    "induced_povm",
    "is_psd",
    "kraus_from_povm",
    "kron",
    "max_teleport_fidelity",
    "measure",
    "min_eigenvalue",
    "mixed_resource",
    "naive_partial_teleport",
    "naive_phi_plus_fidelity",
    "naive_phi_plus_probability",
    "p_prime_after_filter",
    "parity_projectors",
    "partial_trace",
    "partially_entangled",
    "projective",
    "qubit",
    "quasi_conclusive_teleport",
    "required_filter_index",
    "schmidt_coeffs",
    "sqrt_psd",
    "standard_teleport",
    "steer",
    "teleport_average_fidelity",
    "teleport_entanglement_fidelity",
    "teleportation_povm",
    "trial_rng",
    "two_step_bell",
]
