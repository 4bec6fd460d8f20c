"""decoq: desk-scale simulation of decoherence under active error correction."""

from .tensor import (
    DensityMatrix,
    StateVector,
    expm_hermitian,
    kron,
    operator_norm,
    partial_trace,
    partial_trace_array,
    trace_distance,
)
from .pauli import (
    ErrorRankSpectrum,
    PAULIS,
    decompose,
    embed,
    error_rank,
    pauli_string,
    rank_spectrum,
    reconstruct,
)
from .dynamics import (
    ContactTerm,
    EnvironmentModel,
    FreeHamiltonian,
    InteractionSpec,
    build_noncontact,
    decoherence_chain,
    dyson_truncated,
    evolve,
    free_hamiltonian,
    gibbs_weights,
    interaction_matrix,
    interaction_picture_v,
    pair_flip_evolution,
    pair_flip_hamiltonian,
    random_environment,
    single_flip_evolution,
    single_flip_hamiltonian,
    trivial_environment,
)
from .codes import (
    BoundsRow,
    CodeSpec,
    KrausChannel,
    asymptotic_bound_gap,
    asymptotic_x0,
    build_code,
    build_five_qubit_code,
    build_identity_code,
    build_repetition_code,
    covered_errors,
    encode_logical,
    hamming_gv_check,
    min_code_length,
    recovery_channel,
    recovery_unitary,
)
from .metrics import (
    BoundReport,
    CodeErrorResult,
    DecayResult,
    FidelityCurve,
    PowerLawFit,
    bound_report,
    code_error,
    error_bound,
    error_functional,
    fidelity,
    fit_power_law,
    leading_coefficient,
    periodic_correction_decay,
    stabilization_bound,
    threshold_time,
)
from .errors import (
    ConfigError,
    FitError,
    ShapeError,
    SizingError,
    UnsupportedInteractionError,
    ValidationError,
)

__version__ = "0.1.0"
