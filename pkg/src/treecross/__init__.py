"""Crossing statistics of uniform random labelled trees in convex position.

The package reproduces and stress-tests a quantitative central limit
theorem for the number of chord crossings of a uniform labelled tree
whose vertices sit on a circle: exact rational formulas for the mean and
variance, the explicit bounded size-bias coupling behind the result, and
Monte Carlo experiments measuring the Kolmogorov distance of the
standardized count to the Gaussian, including its n^(-1/2) decay.
"""

__version__ = "0.1.0"

from .coupling import (
    CouplingBatch,
    CouplingOutcome,
    IncrementVariance,
    SizeBiasLaw,
    construct_biased_tree,
    coupling_bound,
    coupling_marginal_exact,
    coupling_max_abs_diff_exact,
    increment_conditional_variance,
    rejection_marginal_exact,
    rejection_size_bias_sample,
    rewire_pair,
    sample_coupling,
    sample_couplings_batch,
    size_bias_law_oracle,
    tv_distance,
)
from .crossings import (
    CrossingIndex,
    count_crossings_fast,
    count_crossings_naive,
    has_crossing_at,
    list_crossings,
)
from .errors import GuardError, InvalidTreeError, RetryLimitError, TreecrossError
from .exact import (
    ExactMoments,
    Rational,
    edge_probability,
    enumeration_law,
    enumeration_moments,
    exact_mean,
    exact_variance,
    forest_containment_count,
    forest_containment_probability,
    forest_probability,
    neighborhood_size,
    tree_count,
)
from .normal import (
    BoundReport,
    EmpiricalSummary,
    adjacency_event_probability,
    adjacency_event_probability_exact,
    empirical_kolmogorov,
    normal_cdf,
    normal_cdf_array,
    rate_fit,
    simulate_standardized,
    theoretical_bound,
)
from .rng import make_rng, worker_rng
from .trees import (
    LabeledTree,
    PruferSequence,
    contains_forest,
    enumerate_trees,
    format_tree_text,
    parse_tree_text,
    path_tree,
    prufer_to_tree,
    sample_uniform_tree,
    star_tree,
    tree_to_prufer,
)

__all__ = [name for name in dir() if not name.startswith("_")]
