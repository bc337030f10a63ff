"""Deterministic mempool-based topology measurement simulator."""

from ._core import (
    account_cost,
    builtin_profiles,
    compare_baselines,
    gen_ba,
    gen_cm,
    gen_er,
    graph_metrics,
    louvain,
    profile_policy,
    run_scenario_file,
    run_scenario_text,
    schedule_iterations,
    verify_blocks,
)

__all__ = [
    "account_cost",
    "builtin_profiles",
    "compare_baselines",
    "gen_ba",
    "gen_cm",
    "gen_er",
    "graph_metrics",
    "louvain",
    "profile_policy",
    "run_scenario_file",
    "run_scenario_text",
    "schedule_iterations",
    "verify_blocks",
]

__version__ = "0.1.0"
