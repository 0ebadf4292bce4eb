"""Simulation library for learning dynamics in repeated two-player games.

Build a `StageGame`, pick policies via `PolicySpec` helpers (`fp_spec`,
`rgfp_spec`, ...), run matches with `run_match`, and measure deviation
payoffs with `rationality_ratio` / `worst_case_ratio`. The `repgame` CLI
wraps the same machinery; `scenarios` holds the named experiment designs.
"""

from .arena import (
    DEFAULT_HORIZON,
    DEFAULT_NUM_SEEDS,
    MatchConfig,
    MatchTrace,
    PolicySpec,
    RatioResult,
    ValueEstimate,
    WorstCaseReport,
    agent_rng,
    br_exploiter_spec,
    build_policy,
    constant_spec,
    deviation_window_spec,
    estimate_value,
    fp_spec,
    gfp_spec,
    make_imperfect_pair,
    make_thm1_game,
    make_thm2_game,
    mixed_spec,
    random_game,
    rationality_ratio,
    rgfp_spec,
    rm_spec,
    rrm_spec,
    run_match,
    seed_list,
    summary_line,
    worst_case_ratio,
    write_trace_csv,
)
from .dynamics import (
    RegretState,
    empirical_frequencies,
    format_window,
    gfp_best_response,
    parse_window,
    rm_bulk_update,
    rm_distribution,
)
from .game import (
    AGENT1,
    AGENT2,
    PAYOFF_TOL,
    VALUE_TOL,
    PartialPayoffMatrix,
    StageGame,
    best_response_pure,
    check_lemma1_condition,
    expected_payoff,
    load_game,
    parse_game,
    pure_minimax_value,
    save_game,
)
from .minimax import mixed_minimax
from .policies import FictitiousPlayPolicy, Policy, RegretMatchingPolicy
from .punish import MinimaxPunisher
from .rational_fp import IMPERFECT, PERFECT, RationalFictitiousPlay, exploration_cell, exploration_steps
from .rational_rm import RationalRegretMatching, RRmConfig, epoch_epsilon, epoch_length
from .scenarios import SCENARIOS, ScenarioOptions, run_scenario

__version__ = "0.1.0"

__all__ = [
    "AGENT1",
    "AGENT2",
    "DEFAULT_HORIZON",
    "DEFAULT_NUM_SEEDS",
    "FictitiousPlayPolicy",
    "IMPERFECT",
    "MatchConfig",
    "MatchTrace",
    "MinimaxPunisher",
    "PAYOFF_TOL",
    "PERFECT",
    "PartialPayoffMatrix",
    "Policy",
    "PolicySpec",
    "RatioResult",
    "RationalFictitiousPlay",
    "RationalRegretMatching",
    "RegretMatchingPolicy",
    "RegretState",
    "RRmConfig",
    "SCENARIOS",
    "ScenarioOptions",
    "StageGame",
    "VALUE_TOL",
    "ValueEstimate",
    "WorstCaseReport",
    "agent_rng",
    "best_response_pure",
    "br_exploiter_spec",
    "build_policy",
    "check_lemma1_condition",
    "constant_spec",
    "deviation_window_spec",
    "empirical_frequencies",
    "epoch_epsilon",
    "epoch_length",
    "estimate_value",
    "expected_payoff",
    "exploration_cell",
    "exploration_steps",
    "format_window",
    "fp_spec",
    "gfp_best_response",
    "gfp_spec",
    "load_game",
    "make_imperfect_pair",
    "make_thm1_game",
    "make_thm2_game",
    "mixed_minimax",
    "mixed_spec",
    "parse_game",
    "parse_window",
    "pure_minimax_value",
    "random_game",
    "rationality_ratio",
    "rgfp_spec",
    "rm_bulk_update",
    "rm_distribution",
    "rm_spec",
    "rrm_spec",
    "run_match",
    "run_scenario",
    "save_game",
    "seed_list",
    "summary_line",
    "worst_case_ratio",
    "write_trace_csv",
]
