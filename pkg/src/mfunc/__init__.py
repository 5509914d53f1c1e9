"""Explicit M-functions of zeta, Dirichlet and automorphic L-functions.

The package constructs value-distribution densities (M-functions) through
their Fourier transforms (characteristic functions) as convergent Euler
products of single-prime curve integrals, and cross-verifies every
construction against independent empirical oracles: vertical-line
sampling, torus equidistribution, and character averages.
"""

__version__ = "0.1.0"

from .errors import (
    ConfigError,
    CoverageError,
    DataCoverageError,
    DomainError,
    InversionQualityError,
    MethodError,
    MfuncError,
    PoleError,
    PreconditionError,
    PrecisionError,
    RamanujanViolationError,
    RangeError,
)
from .primes import PrimeList, first_n_primes, is_prime, primes_up_to
from .grids import (
    CharFunctionGrid,
    GridDensity,
    GridSpec,
    RectangleRegion,
    integrate_rectangle,
    rectangle_panel,
)
from .eulerlog import (
    euler_log_partial,
    euler_log_tail_bound,
    local_log_curve,
    local_log_term,
)
from .zeta import LineResult, log_zeta_line, zeta_eval
from .mdensity import (
    CurveMeasure,
    convolve,
    default_grid,
    m_sigma_P,
    prime_curve_measure,
    support_radius,
    torus_histogram,
)
from .mfourier import (
    CurveSpec,
    DecayReport,
    LambdaTable,
    MtildeValue,
    char_function_P,
    char_function_grid,
    generalized_mtilde,
    invert_char_function,
    jw_decay_report,
    lambda_coefficients,
    mtilde_dirichlet,
    one_prime_char_factor,
    pairing,
)
from .characters import (
    DirichletCharacterTable,
    build_character_table,
    primitive_root,
)
from .averages import (
    ConvergenceRow,
    EmpiricalDistribution,
    TestFunction,
    char_average_convergence,
    chi_tau_average,
    chi_tau_average_many,
    empirical_W,
    ihara_outer_average,
    log_L_P_char,
    log_L_P_line,
    modulus_average,
    torus_integral,
    write_convergence_csv,
)
from .forms import (
    PrimitiveFormData,
    load_eigenvalue_file,
    pf_epsilon_member,
    ramanujan_delta,
    ramanujan_tau_table,
    satake_pair,
)
from .automorphic import (
    CensusReport,
    DerivativePartition,
    automorphic_curve_eval,
    automorphic_density,
    automorphic_log_line,
    derivative_partition,
    empirical_W_automorphic,
    jw_bound_terms,
    jw_type_integral,
    pf_epsilon_census,
    sato_tate_mass,
    sym_diff_identity_check,
    sym_power_log_partial,
)

__all__ = [
    "__version__",
    # errors
    "MfuncError",
    "ConfigError",
    "PreconditionError",
    "DomainError",
    "MethodError",
    "RamanujanViolationError",
    "PoleError",
    "PrecisionError",
    "CoverageError",
    "InversionQualityError",
    "DataCoverageError",
    "RangeError",
    # primes, grids
    "PrimeList",
    "primes_up_to",
    "first_n_primes",
    "is_prime",
    "GridSpec",
    "GridDensity",
    "CharFunctionGrid",
    "RectangleRegion",
    "integrate_rectangle",
    "rectangle_panel",
    # euler logs, zeta line
    "local_log_term",
    "local_log_curve",
    "euler_log_partial",
    "euler_log_tail_bound",
    "zeta_eval",
    "log_zeta_line",
    "LineResult",
    # M-density, Fourier side
    "support_radius",
    "default_grid",
    "CurveMeasure",
    "prime_curve_measure",
    "torus_histogram",
    "convolve",
    "m_sigma_P",
    "pairing",
    "CurveSpec",
    "one_prime_char_factor",
    "char_function_P",
    "char_function_grid",
    "invert_char_function",
    "jw_decay_report",
    "DecayReport",
    "lambda_coefficients",
    "LambdaTable",
    "mtilde_dirichlet",
    "generalized_mtilde",
    "MtildeValue",
    # characters, averages
    "DirichletCharacterTable",
    "build_character_table",
    "primitive_root",
    "TestFunction",
    "EmpiricalDistribution",
    "empirical_W",
    "log_L_P_line",
    "log_L_P_char",
    "chi_tau_average",
    "chi_tau_average_many",
    "modulus_average",
    "ihara_outer_average",
    "torus_integral",
    "char_average_convergence",
    "ConvergenceRow",
    "write_convergence_csv",
    # forms, automorphic
    "ramanujan_tau_table",
    "satake_pair",
    "PrimitiveFormData",
    "ramanujan_delta",
    "load_eigenvalue_file",
    "pf_epsilon_member",
    "automorphic_curve_eval",
    "jw_type_integral",
    "jw_bound_terms",
    "DerivativePartition",
    "derivative_partition",
    "CensusReport",
    "pf_epsilon_census",
    "sato_tate_mass",
    "sym_power_log_partial",
    "sym_diff_identity_check",
    "automorphic_density",
    "automorphic_log_line",
    "empirical_W_automorphic",
]
