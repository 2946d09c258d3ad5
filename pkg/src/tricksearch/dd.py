"""Double-dummy solving: all four hands visible.

The declaring side is the maximizer; the defenders minimize.  Exact trick
counts come from a binary search over win/lose games "does declarer take
more than ``e`` tricks", each solved by plain alpha-beta with a transposition
table or by partition search.
"""
from __future__ import annotations

import math
import random
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Optional, Sequence

from .bridgesets import BridgePartitionSystem
from .cards import Deal, PlayState, indices_desc, random_deal, top_ranks
from .game import MAX, MIN, Game, ScalarAlgebra, SearchStats, TranspositionTable, alphabeta, zero_window_solve
from .partition import partition_search

MODES = ("plain", "partition", "both")


class BridgeTrickGame(Game):
    """Value = total tricks taken by ``side`` at the end of play."""

    def __init__(self, start: PlayState, side: int) -> None:
        self.start = start
        self.side = int(side)
        self.trump = start.trump
        won = start.tricks(self.side)
        self.algebra = ScalarAlgebra(won, won + start.tricks_left)

    def initial(self) -> PlayState:
        return self.start

    def evaluate(self, q: PlayState) -> Any:
        if q.is_over():
            return q.tricks(self.side)
        return MAX if (q.to_move & 1) == self.side else MIN

    def successors(self, q: PlayState) -> list[PlayState]:
        return [q.play(c) for c in indices_desc(q.legal_mask())]

    def key(self, q: PlayState) -> tuple:
        return q.key()

    def status(self, q: PlayState) -> int:
        return q.tricks(self.side)


class BridgeThresholdGame(Game):
    """1 iff ``side`` finishes with more than ``e`` tricks, else 0.

    Play stops as soon as the outcome is decided: once the side has its
    ``e + 1`` tricks, or once too few tricks remain.
    """

    def __init__(self, start: PlayState, side: int, e: int) -> None:
        self.start = start
        self.side = int(side)
        self.trump = start.trump
        self.target = e + 1

    def initial(self) -> PlayState:
        return self.start

    def need(self, q: PlayState) -> int:
        return self.target - (q.ew_tricks if self.side else q.ns_tricks)

    def evaluate(self, q: PlayState) -> Any:
        n = self.target - (q.ew_tricks if self.side else q.ns_tricks)
        if n <= 0:
            return 1
        if n > q.tricks_left:
            return 0
        return MAX if (q.to_move & 1) == self.side else MIN

    def successors(self, q: PlayState) -> list[PlayState]:
        return [q.play(c) for c in indices_desc(q.legal_mask())]

    def key(self, q: PlayState) -> tuple:
        return (q.hands, q.leader, q.trick, self.target - (q.ew_tricks if self.side else q.ns_tricks))

    status = need


@dataclass
class SolveResult:
    tricks: int
    nodes_partition: Optional[int] = None
    nodes_plain: Optional[int] = None
    elapsed: float = 0.0
    probe_trace: list[tuple[int, int]] = field(default_factory=list)


class ThresholdSolver:
    """Solves win/lose bridge games from one start position, sharing a table."""

    def __init__(self, start: PlayState, side: int, partition: bool) -> None:
        self.start = start
        self.side = int(side)
        self.partition = partition
        self.stats = SearchStats()
        if partition:
            self.system = BridgePartitionSystem(start.trump, self._need)
            self.table = self.system.new_table()
        else:
            self.tt = TranspositionTable()
        self._target = None

    def _need(self, q: PlayState) -> int:
        return self._target - q.tricks(self.side)

    def game(self, e: int) -> BridgeThresholdGame:
        return BridgeThresholdGame(self.start, self.side, e)

    def probe(self, g: BridgeThresholdGame, q: PlayState) -> int:
        self._target = g.target
        if self.partition:
            v, _ = partition_search(g, self.system, q, (0, 1), self.table, stats=self.stats, check=False)
            return v
        return alphabeta(g, q, (0, 1), self.tt, stats=self.stats)

    def solve(self) -> tuple[int, list[tuple[int, int]]]:
        lo = self.start.tricks(self.side)
        hi = lo + self.start.tricks_left
        res = zero_window_solve(self.start, lo, hi, self.game, self.probe)
        return res.value, res.trace


def solve_position(start: PlayState, declarer_side: int, mode: str = "partition") -> SolveResult:
    """Exact final trick count of ``declarer_side`` from ``start``."""
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}, got {mode!r}")
    start.validate()
    t0 = time.perf_counter()
    out = SolveResult(tricks=-1)
    if mode in ("partition", "both"):
        s = ThresholdSolver(start, declarer_side, True)
        out.tricks, out.probe_trace = s.solve()
        out.nodes_partition = s.stats.nodes
    if mode in ("plain", "both"):
        s = ThresholdSolver(start, declarer_side, False)
        tricks, trace = s.solve()
        if mode == "both" and tricks != out.tricks:
            raise AssertionError(f"plain search found {tricks} tricks, partition search {out.tricks}")
        out.tricks, out.probe_trace = tricks, trace
        out.nodes_plain = s.stats.nodes
    out.elapsed = time.perf_counter() - t0
    return out


def solve_dd(
    deal: Deal, trump: Optional[int], leader: int, declarer_side: int, mode: str = "partition"
) -> SolveResult:
    """Double-dummy trick count for ``declarer_side`` with ``leader`` on lead."""
    if deal.hand_size == 0:
        raise ValueError("the deal has no cards")
    return solve_position(PlayState.from_deal(deal, trump, leader), declarer_side, mode)


# --------------------------------------------------------------------------
# scaling benchmark


@dataclass
class BenchRow:
    deal_id: int
    size: int
    nodes_plain: int
    nodes_partition: int
    tricks: int
    deal: str = ""


@dataclass
class BenchResult:
    rows: list[BenchRow]
    exponent: Optional[float]
    coefficient: Optional[float]

    @property
    def fraction_partition_le_plain(self) -> Optional[float]:
        if not self.rows:
            return None
        return sum(r.nodes_partition <= r.nodes_plain for r in self.rows) / len(self.rows)

    def csv(self) -> str:
        lines = ["deal_id,size,nodes_plain,nodes_partition"]
        lines += [f"{r.deal_id},{r.size},{r.nodes_plain},{r.nodes_partition}" for r in self.rows]
        return "\n".join(lines) + "\n"


def bench_problem(seed: int, size: int, index: int) -> tuple[Deal, Optional[int], int, int]:
    """The deterministic random problem number ``index`` of a given size."""
    if size % 4 or not 4 <= size <= 52:
        raise ValueError(f"deal size must be a multiple of 4 in [4, 52], got {size}")
    rng = random.Random(f"bench:{seed}:{size}:{index}")
    deal = random_deal(rng, top_ranks(size // 4))
    trump = rng.choice([None, 0, 1, 2, 3])
    leader = rng.randrange(4)
    declarer_side = (leader & 1) ^ 1
    return deal, trump, leader, declarer_side


def _bench_one(args: tuple[int, int, int, int]) -> BenchRow:
    deal_id, seed, size, index = args
    deal, trump, leader, side = bench_problem(seed, size, index)
    r = solve_dd(deal, trump, leader, side, mode="both")
    return BenchRow(deal_id, size, r.nodes_plain, r.nodes_partition, r.tricks, str(deal))


def fit_power_law(xs: Sequence[float], ys: Sequence[float]) -> tuple[Optional[float], Optional[float]]:
    """Least-squares fit of ``y = a * x**b`` in log-log space; ``(b, a)``."""
    import numpy as np

    if len(xs) < 2 or len(set(xs)) < 2:
        return None, None
    b, loga = np.polyfit(np.log(np.asarray(xs, float)), np.log(np.asarray(ys, float)), 1)
    return float(b), float(math.exp(loga))


def bench_scaling(n_deals: int, sizes: Sequence[int], seed: int, threads: int = 1) -> BenchResult:
    """Node counts of plain and partition search on random deals.

    Rows come in (size, index) order whatever ``threads`` is.
    """
    jobs = []
    for size in sizes:
        for i in range(n_deals):
            jobs.append((len(jobs), seed, size, i))
    if threads > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=threads) as ex:
            rows = list(ex.map(_bench_one, jobs, chunksize=4))
    else:
        rows = [_bench_one(j) for j in jobs]
    exp, coef = fit_power_law([r.nodes_plain for r in rows], [r.nodes_partition for r in rows])
    return BenchResult(rows, exp, coef)
