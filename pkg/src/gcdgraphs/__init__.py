"""Exact-arithmetic toolkit for dilate-interval overlap measures, primitive
sets, and GCD-graph quality iteration."""

from .errors import (
    AmbiguousComparison,
    ComplianceError,
    ContractViolation,
    DomainError,
    ValidationError,
)
from .gcdgraph import (
    Constants,
    GcdGraph,
    compute_constants,
    edge_density,
    exactness,
    quality,
    signed_unaccounted,
    special,
    split_unaccounted,
    structure_witness,
    subgraph_relation,
    theta_weight,
    toy_constants,
    unaccounted_primes,
    validate,
)
from .intervals import (
    IntervalUnion,
    multiple_intervals,
    normalized_measure,
    rough_multiple_intervals,
    second_moment_lower_bound,
)
from .overlap import (
    OverlapReport,
    check_no_diagonal,
    overlap_direct,
    overlap_report,
    overlap_shifted,
    overlap_sum_formula,
    predictor,
    union_experiment,
)
from .pipeline import (
    PipelineTrace,
    clear_small_primes,
    enforce_structure,
    iterate_signed,
    iterate_unbalanced,
    jump_or_concentration,
    qualifying_pair_weight,
    run_pipeline,
    structured_prime_step,
    tail_band_dichotomy,
)
from .powcmp import PowProduct
from .primitive import (
    PrimitiveSet,
    RationalFamily,
    aks_window_sum,
    behrend_log_sum,
    behrend_weighted_sum,
    check_level_trace,
    construct_level_sets,
    coprime_window_sum,
    erdos_sum,
    is_primitive,
    is_primitive_numerators,
    sperner_max_antichain,
)
from .rationals import (
    MultSpec,
    bracket,
    bracket_gcd_formula,
    fejer_a,
    fejer_b,
    fejer_c,
    height,
    is_rough,
    mertens_product,
    mult_harmonic_sum,
    mult_sum,
    omega_below,
    prime_tail_sum,
    primes_of,
    reduce,
    rough_density,
    rough_list,
    val_p,
)
from .search import (
    check_connectivity,
    common_neighbor,
    maximal_subgraph,
    small_set_edges,
    weight_monotonicity,
)

__version__ = "0.1.0"
