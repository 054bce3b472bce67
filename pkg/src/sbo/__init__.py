"""Stochastic budget optimization toolkit for search-advertising keyword bids.

Evaluate and optimize fractional bid vectors under fixed, proportional,
independent, and scenario click models, with exact algorithms where they
exist, approximation schemes where they do not, and worst-case instance
generators for the hard cases.
"""

from sbo.core import (
    EvalReport,
    Instance,
    Keyword,
    aggregate,
    apply_click_weights,
    canonical_order,
    canonicalize,
    value,
    weighted_value,
)
from sbo.dist import (
    DiscretePMF,
    Fixed,
    Independent,
    Proportional,
    Scenario,
    partial_expectation,
    pmf_bucket,
    pmf_validate,
    sample,
    support_size,
    tail_prob,
)
from sbo.errors import (
    DimensionError,
    InvalidWeightError,
    ModelMismatchError,
    OracleTooLargeError,
    ParameterError,
    SboError,
    SizeError,
    ValidationError,
)
from sbo.evaluate import (
    eval_auto,
    eval_fixed,
    eval_independent_exact,
    eval_independent_ptas,
    eval_monte_carlo,
    eval_proportional,
    eval_scenario,
)
from sbo.generate import (
    GenConfig,
    Graph,
    gen_clique_reduction,
    gen_gap_example,
    gen_nonprefix_example,
    gen_random,
)
from sbo.optimize import (
    OptReport,
    PrefixSolution,
    opt_auto,
    opt_fixed_fractional,
    opt_fixed_integer,
    opt_independent_prefix,
    opt_prefix_search,
    opt_proportional_exact,
    opt_proportional_ptas,
    opt_scenario_bruteforce,
)

__version__ = "0.1.0"

__all__ = [
    "DiscretePMF",
    "DimensionError",
    "EvalReport",
    "Fixed",
    "GenConfig",
    "Graph",
    "Independent",
    "Instance",
    "InvalidWeightError",
    "Keyword",
    "ModelMismatchError",
    "OptReport",
    "OracleTooLargeError",
    "ParameterError",
    "PrefixSolution",
    "Proportional",
    "SboError",
    "Scenario",
    "SizeError",
    "ValidationError",
    "aggregate",
    "apply_click_weights",
    "canonical_order",
    "canonicalize",
    "eval_auto",
    "eval_fixed",
    "eval_independent_exact",
    "eval_independent_ptas",
    "eval_monte_carlo",
    "eval_proportional",
    "eval_scenario",
    "gen_clique_reduction",
    "gen_gap_example",
    "gen_nonprefix_example",
    "gen_random",
    "opt_auto",
    "opt_fixed_fractional",
    "opt_fixed_integer",
    "opt_independent_prefix",
    "opt_prefix_search",
    "opt_proportional_exact",
    "opt_proportional_ptas",
    "opt_scenario_bruteforce",
    "partial_expectation",
    "pmf_bucket",
    "pmf_validate",
    "sample",
    "support_size",
    "tail_prob",
    "value",
    "weighted_value",
]
