"""Global fractional polynomial optimization.

The package maximizes ratios f/g of multivariate polynomials over
semialgebraic sets.  The outer loop reduces the ratio to a sequence of
parametric subproblems max f - lambda*g; each subproblem is solved
globally through a moment relaxation backed by a small dense
semidefinite solver, and solutions are certified with sum-of-squares
decompositions.
"""

from .polynomials import (
    MultiIndex,
    MonomialBasis,
    Polynomial,
    basis_size,
    enumerate_basis,
    evaluate,
    poly_add,
    poly_scale,
    poly_mul,
    to_coeff_vector,
    parse_polynomial,
    serialize_polynomial,
)
from .moments import (
    MomentIndexMap,
    MatrixSpec,
    moment_matrix_spec,
    localizing_matrix_spec,
    moments_from_point,
    assemble,
)
from .sdp import (
    SdpProblem,
    SdpSolution,
    SdpOptions,
    SolveStatus,
    solve as solve_sdp,
    psd_check,
    residuals,
)
from .sos import (
    SosCertificate,
    PutinarCertificate,
    SosProgramResult,
    NotSos,
    sos_decompose,
    reconstruct,
    solve_sos_program,
    putinar_certificate,
    verify_putinar,
    strong_duality_check,
)
from .relaxation import (
    PolyProblem,
    RelaxationResult,
    Sense,
    build_relaxation,
    solve_relaxation,
    extract_minimizer,
    certify,
    estimate_cost,
    complexity_report,
)
from .fractional import (
    FractionalProblem,
    FractionalResult,
    DinkelbachRecord,
    DenominatorNonPositive,
    solve_fractional,
    transform_positive_denominator,
    relative_error,
)
from .energy import (
    EEParams,
    EEProblem,
    EEResult,
    constraint_coeffs,
    load_objective,
    load_config,
    exhaustive_search,
    solve_ee,
)

__version__ = "0.1.0"
