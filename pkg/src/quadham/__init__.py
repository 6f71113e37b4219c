"""Hamiltonian analysis of degenerate quadratic Lagrangians.

Exact rational polynomial algebra for the Legendre splitting, Hamiltonian
forms, constraint classification and the Koszul-Tate / BRST complex, with
floating-point RK4 integration of the resulting Hamilton equations.
"""

from .constraints import (
    ConstraintIdeal,
    ConstraintSet,
    InvalidConstraintError,
    classify_constraints,
    constraint_algorithm,
)
from .dynamics import (
    DivergenceError,
    NotApplicableError,
    Trajectory,
    constrained_equation_check,
    constraint_drift,
    energy_drift,
    integrate_hamilton,
    lagrange_residual,
    split_residuals,
)
from .graded import Generator, GradedElement, antighost, ghost, graded_mul, left_derivative
from .hamiltonian import (
    HamiltonianForm,
    InvalidFrameError,
    ProjectableField,
    build_hamiltonian,
    check_association,
    current,
    evolution,
    extended_bracket,
    hamiltonian_from_poly,
    hamiltonian_vector_field,
    poisson_v,
    vertical_lie_bracket,
)
from .kernels import BACKEND
from .koszul_tate import (
    KTComplex,
    TruncationError,
    brst_charge,
    check_nilpotency,
    homology,
    kt_delta,
    quotient_dimension_oracle,
    super_bracket,
    verify_charge,
)
from .linalg import AsymmetricMatrixError, exact_pinv, exact_rank, sym_pinv
from .model import (
    ConstantRankError,
    ModelError,
    QuadraticModel,
    ReferenceFrame,
    ZeroSectionError,
    degenerate_diag_model,
    degenerate_full_model,
    lagrangian_eval,
    legendre_map,
    load_model,
    oscillator_model,
    validate_model,
)
from .poly import CoeffPoly, PolyMatrix, SignatureError, differentiate, evaluate, phase_space, poly_arith, substitute
from .split import (
    InvalidOffsetError,
    InvalidSigmaError,
    SigmaSplit,
    build_sigma,
    c_prime,
    constraint_polys,
    constraint_values,
    momentum_split,
    solve_connection,
    velocity_split,
)

__version__ = "0.1.0"
