"""Qudit statevector simulation and phase-information compression experiments.

The package has four layers: `states` provides dense statevector mechanics
for registers of d-level qudits; `protocols` builds the concrete qubit
circuits (equatorial-pair compression with its phase-loss scan, and the
extract/teleport/reconstruct pipeline for partially known two-qubit states);
`nogo` verifies numerically that exact compression of n equatorial qudits
into m < n qudits is impossible; `search` quantifies the best approximate
retrieval fidelity by derivative-free optimization. `cli` and `reporting`
wrap everything in a seeded, reproducible command line.
"""

__version__ = "0.1.0"

from .nogo import (
    CompressionScenario,
    ConstraintMatrixCheck,
    ConstraintSystem,
    InfeasibilityCertificate,
    PhaseVector,
    build_constraint_system,
    constraint_residual,
    narrow_support_candidate,
    orthogonality_witness,
    phase_assignment_grid,
    support_structure_check,
    verify_constraint_matrix,
)
from .protocols import (
    EquatorialSpec,
    PartiallyKnownPair,
    cnot_gate,
    compress_two_equatorial,
    equatorial_qubit,
    equatorial_state,
    extract_partially_known,
    hadamard_gate,
    phase_loss_scan,
    phase_to_amplitude_gate,
    predicted_retrieved_state,
    reconstruct_two_qubit,
    teleport_qubit,
)
from .search import (
    OptimizationReport,
    PipelineSpec,
    UnitaryParams,
    channel_fidelities,
    decode_unitary,
    finite_difference_consistency,
    optimize_retrieval,
    retrieval_fidelity,
    sample_phase_vectors,
)
from .states import (
    DensityMatrix,
    MeasurementRecord,
    StateVector,
    UnitaryMatrix,
    apply_gate,
    determinant,
    fidelity,
    is_unitary,
    measure_site,
    partial_trace,
    tensor,
)

__all__ = [
    "__version__",
    "CompressionScenario",
    "ConstraintMatrixCheck",
    "ConstraintSystem",
    "DensityMatrix",
    "EquatorialSpec",
    "InfeasibilityCertificate",
    "MeasurementRecord",
    "OptimizationReport",
    "PartiallyKnownPair",
    "PhaseVector",
    "PipelineSpec",
    "StateVector",
    "UnitaryMatrix",
    "UnitaryParams",
    "apply_gate",
    "build_constraint_system",
    "channel_fidelities",
    "cnot_gate",
    "compress_two_equatorial",
    "constraint_residual",
    "decode_unitary",
    "determinant",
    "equatorial_qubit",
    "equatorial_state",
    "extract_partially_known",
    "fidelity",
    "finite_difference_consistency",
    "hadamard_gate",
    "is_unitary",
    "measure_site",
    "narrow_support_candidate",
    "optimize_retrieval",
    "orthogonality_witness",
    "partial_trace",
    "phase_assignment_grid",
    "phase_loss_scan",
    "phase_to_amplitude_gate",
    "predicted_retrieved_state",
    "reconstruct_two_qubit",
    "retrieval_fidelity",
    "sample_phase_vectors",
    "support_structure_check",
    "teleport_qubit",
    "tensor",
    "verify_constraint_matrix",
]
