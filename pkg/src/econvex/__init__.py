"""Discrete toolkit for error-budgeted convex analysis.

Computes anchored (budgeted) conjugates and biconjugates, budgeted
subdifferentials, Dini derivative estimates, and infimal convolutions of
sampled real functions, and machine-checks the calculus rules and
optimality conditions that relate them on concrete grid instances.
"""

from .extreal import (
    INF,
    NEG_INF,
    add_ext,
    neg_ext,
    sub_ext,
    max_ext,
    min_ext,
    as_extreal,
    format_ext,
    parse_ext,
)
from .funcmodel import (
    Grid,
    SampledFunction,
    ClosedFormFunction,
    FIXTURES,
    make_uniform_grid,
    sample,
    evaluate,
    validate_proper,
)
from .errorfn import (
    ErrorFunction,
    ErrorValidationReport,
    zero_error,
    quadratic_error,
    lipschitz_error,
    exp_error,
    product_error,
    sampled_matrix_error,
    scale_error,
    add_errors,
    eval_error,
    validate_error,
)
from .transform import (
    ConjugateTable,
    default_dual_grid,
    e_conjugate_brute,
    e_conjugate_fast,
    e_conjugate_at,
    e_biconjugate,
    inf_convolution,
    affine_minorant,
)
from .subdiff import (
    SubdiffInterval,
    DiniEstimate,
    OperatorSample,
    e_subdiff_interval,
    e_subdiff_membership,
    dini_upper,
    check_e_monotone,
)
from .reporting import ViolationReport, PropertyRecord, SuiteReport
from .verify import (
    check_e_convex_def,
    check_char_slopes,
    econvex_violation_at,
    fenchel_young_gap,
    check_three_way_equivalence,
    check_conjugate_properties,
    check_conjugate_stability,
    certify_global_min,
    certify_local_min,
    check_subdiff_inclusion,
    check_sum_conjugate_infconv,
    sigma_lower_bound,
)
from .suite import run_suite, PROPERTY_IDS

__all__ = [name for name in dir() if not name.startswith("_")]
