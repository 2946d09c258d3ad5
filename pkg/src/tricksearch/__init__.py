"""Search algorithms for trick-taking card games: double-dummy solving with
partition search, single-dummy solving over antichains and achievable sets,
and Monte Carlo card and bid selection."""
from .cards import Card, Contract, Deal, DealError, PlayState, Seat, Side, Suit, format_deal, parse_deal
from .dd import SolveResult, bench_scaling, solve_dd, solve_position
from .game import MAX, MIN, ScalarAlgebra, alphabeta, minimax, zero_window_solve
from .lattice import Antichain, AntichainAlgebra, SituationSet, law_suite
from .partition import PartitionSystem, partition_search
from .sd import (
    AchievableSet, BridgeSingleDummy, ImperfectGame, build_achievable, is_achievable, perfect_info_value,
    solve_imperfect, swo_select,
)
from .mc import DealConstraint, WeightedSample, reweigh, sample_deals, select_bid, select_move

__version__ = "0.1.0"
