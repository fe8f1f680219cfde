"""jostspec: half-line Jacobi operators with periodic background and
square-summable-variation perturbations -- spectra, Jost solutions, boundary
Green's functions, absolutely-continuous densities, entropy integrals and
numerical certificates."""

__version__ = "0.1.0"

from ._kernels import NUMBA_ENABLED, backend
from .bands import (
    AdmissibleInterval,
    BandSet,
    admissible_intervals,
    band_edges,
    interval_constants,
)
from .certify import (
    CertReport,
    check_diagonal_products,
    check_floquet_bound,
    check_harmonic_hypotheses,
    check_w_summability,
)
from .coefficients import (
    CoefficientModel,
    PeriodicBlock,
    PerturbationSpec,
    check_l2_cauchy,
    make_model,
    periodic_block,
    q_variation_norm,
    truncate,
)
from .errors import (
    BandEdgeError,
    CoefficientError,
    DegenerateBranchError,
    DensityDomainError,
    DiagonalizationError,
    EigenvectorDegeneracyError,
    JostspecError,
    NoAdmissibleIntervalError,
    OracleConvergenceError,
    RootCountWarning,
    SingularCoefficientError,
    ValidationError,
    ZeroJostError,
)
from .jost import (
    JostSolution,
    ProductForm,
    ac_density,
    green_11,
    jost_solution,
    product_representation,
    reconstruct_boundary_pair,
    recursion_residuals,
    wronskian_defect,
)
from .measures import (
    DensityCurve,
    density_curve,
    entropy_integral,
    moment,
    oracle_green_11,
    tail_m_function,
)
from .transfer import (
    FloquetData,
    Matrix2C,
    RenormChain,
    discriminant,
    discriminant_derivative,
    floquet_eigenvalue,
    floquet_eigenvector,
    one_step,
    period_block_matrix,
    renormalized_block,
    w_matrix,
)
