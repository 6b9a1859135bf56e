"""Finite lattices, free-lattice terms, tensor products, and transferability."""

from .core import (
    Congruence,
    EffectiveLattice,
    FiniteLattice,
    congruence_generated,
    direct_product,
    induced_lattice,
    is_distributive,
    is_sd_join,
    is_simple,
    quotient,
    sublattice_generated,
)
from .freelat import (
    BOTTOM,
    FreeLatticeWithBottom,
    Term,
    canonical_form,
    dual,
    evaluate,
    free_with_bottom,
    generate_sn,
    parse_term,
    term_to_str,
    var,
    whitman_leq,
)
from .tensor import (
    AntitoneIdealMap,
    BiIdeal,
    FreeBiIdeal,
    bi_ideal_closure,
    bi_join,
    bi_meet,
    capped_join_witness,
    distributivity_check,
    enumerate_antitone_maps,
    from_map,
    is_union_bi_ideal,
    pure_tensor,
    tensor_enumerate,
    to_map,
)
from .transfer import (
    AmenabilityVerdict,
    DGraph,
    MinimalPair,
    TjVerdict,
    d_relation,
    is_amenable_finite,
    minimal_pairs,
    tj_witness,
)
from .adjust import (
    AdjustmentTrace,
    StepFunction,
    adjustment_sequence,
    one_step_adjustment,
    step_from_pairs,
    support_of,
)
from .bounded import (
    TOP,
    LowerLimitTable,
    beta_xi_duality_check,
    beta_zero,
    beta_step,
    lower_limit_table,
)

__version__ = "0.1.0"
