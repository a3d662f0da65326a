"""Predictor quality and probability-raising causality for Markov decision processes."""

from .model import (
    Mdp,
    ModelError,
    MrPolicy,
    Query,
    builtin_model,
    load_model,
    make_policy,
    md_policy,
    parse_model,
    parse_policy,
    serialize_model,
    uniform_policy,
    validate_query,
)
from .prcheck import GprConfig, check_gpr, check_spr, check_spr_singleton, optimize_measure, verify_witness
from .quality import (
    ConfusionMatrix,
    average_measure,
    causal_volume,
    confusion,
    gpr_predicate,
    measure,
    polytope,
    sample_policy,
    spr_predicate,
)
from .solve import frequencies_of, optimal_reach, policy_from_frequencies, reach_under_policy
from .transform import canonical, star, two_copy

__version__ = "0.1.0"
