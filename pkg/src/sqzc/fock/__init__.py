"""Full master-equation tier on the truncated cavity1 x cavity2 x qubit space."""
from .analysis import (
    FockOptimum,
    FockResult,
    TruncationReport,
    fock_optimum_detuning,
    solve_fock,
    truncation_report,
)
from .liouvillian import Liouvillian, build_liouvillian
from .operators import (
    VARIANTS,
    FockOperator,
    HilbertConfig,
    OperatorSet,
    build_collapse,
    build_hamiltonian,
    build_operators,
    destroy,
    excitation_parity,
)
from .states import (
    ConfigMismatchError,
    DensityMatrix,
    expect,
    fourth_moments,
    ideal_squeezed_distribution,
    min_variance_fock,
    moment_error,
    number_distribution,
    partial_trace,
    quadrature_variance_fock,
    single_mode_moments,
    squeeze_for_photon_number,
    squeezed_vacuum,
)
from .steady import METHODS, steady_state
from .storage import StorageError, load_state, save_state
from .wigner import WignerGrid, wigner, wigner_at
