"""Exact state-vector FALQON for Max-Cut and donor -> recipient schedule transfer."""

__version__ = "0.1.0"

from .falqon import FalqonConfig, FalqonTrace, replay_schedule, run_falqon  # noqa: E402
from .graph import (  # noqa: E402
    Family,
    Graph,
    cut_value,
    gen_erdos_renyi,
    gen_three_regular,
    max_cut_brute_force,
)
from .transfer import GraphSpec, TransferSpec, aggregate_by_donor_size, run_transfer  # noqa: E402

__all__ = [
    "Family",
    "FalqonConfig",
    "FalqonTrace",
    "Graph",
    "GraphSpec",
    "TransferSpec",
    "aggregate_by_donor_size",
    "cut_value",
    "gen_erdos_renyi",
    "gen_three_regular",
    "max_cut_brute_force",
    "replay_schedule",
    "run_falqon",
    "run_transfer",
]
