"""Generic two-player games over a value algebra, with minimax and alpha-beta.

A game supplies ``evaluate(p)`` (a :class:`Turn` for interior positions, a value
for terminal ones), ``successors(p)`` and an ``algebra`` providing ``join``,
``meet``, ``leq``, ``bottom`` and ``top``.  Scalar games use
:class:`ScalarAlgebra` (max/min over an interval); imperfect-information
games use the antichain lattice from :mod:`tricksearch.lattice`.  The same
search code handles both.
"""
from __future__ import annotations

import math
import operator
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Callable, Hashable, Iterable, Optional, Sequence


class Turn(Enum):
    MAX = "MAX"
    MIN = "MIN"


MAX = Turn.MAX
MIN = Turn.MIN


class ScalarAlgebra:
    """Values in ``[lo, hi]`` combined by max and min."""

    join = staticmethod(max)
    meet = staticmethod(min)
    leq = staticmethod(operator.le)

    def __init__(self, lo: float = 0, hi: float = 1) -> None:
        if lo > hi:
            raise ValueError("empty value interval")
        self.bottom = lo
        self.top = hi

    def __repr__(self) -> str:
        return f"ScalarAlgebra({self.bottom}, {self.top})"


UNIT = ScalarAlgebra(0, 1)


class Game:
    """Base class for games.  Subclasses override the four hooks."""

    algebra: Any = UNIT

    def initial(self) -> Any:
        raise NotImplementedError

    def evaluate(self, p: Any) -> Any:
        """``Turn.MAX``/``Turn.MIN`` for interior positions, else the value."""
        raise NotImplementedError

    def successors(self, p: Any) -> Sequence[Any]:
        raise NotImplementedError

    def key(self, p: Any) -> Hashable:
        """Hashable identity used by memo and transposition tables."""
        return p


class GameError(RuntimeError):
    pass


def _check_structure(turn: Any, children: Sequence[Any], p: Any) -> None:
    if not children:
        raise GameError(f"interior position without successors: {p!r}")


def minimax(game: Game, p: Any = None, memo: Optional[dict] = None) -> Any:
    """Exact game value by full recursion with memoization.

    Raises :class:`GameError` when a position is revisited on its own path.
    """
    if p is None:
        p = game.initial()
    if memo is None:
        memo = {}
    alg = game.algebra
    join, meet = alg.join, alg.meet
    on_path: set = set()

    def rec(q: Any) -> Any:
        k = game.key(q)
        if k in memo:
            return memo[k]
        t = game.evaluate(q)
        if t is not MAX and t is not MIN:
            memo[k] = t
            return t
        if k in on_path:
            raise GameError(f"cycle through position {q!r}")
        on_path.add(k)
        children = game.successors(q)
        _check_structure(t, children, q)
        vals = [rec(c) for c in children]
        on_path.discard(k)
        v = vals[0]
        f = join if t is MAX else meet
        for w in vals[1:]:
            v = f(v, w)
        memo[k] = v
        return v

    return rec(p)


@dataclass
class SearchStats:
    """Counters filled in by the searches.

    ``nodes`` counts invocations that were not answered from the table.
    """

    nodes: int = 0
    tt_hits: int = 0
    cutoffs: int = 0

    def merge(self, other: "SearchStats") -> None:
        self.nodes += other.nodes
        self.tt_hits += other.tt_hits
        self.cutoffs += other.cutoffs


class TranspositionTable:
    """Maps ``(position key, x, y)`` to a value.

    With ``capacity=None`` the table grows without bound.  Otherwise it holds
    ``capacity`` slots addressed by hash and a colliding store replaces the
    previous occupant.
    """

    def __init__(self, capacity: Optional[int] = None) -> None:
        if capacity is not None and capacity <= 0:
            raise ValueError("capacity must be positive")
        self.capacity = capacity
        self._d: dict = {}

    def get(self, k: Hashable, x: Any, y: Any) -> Any:
        full = (k, x, y)
        if self.capacity is None:
            return self._d.get(full)
        slot = self._d.get(hash(full) % self.capacity)
        if slot is not None and slot[0] == full:
            return slot[1]
        return None

    def put(self, k: Hashable, x: Any, y: Any, v: Any) -> None:
        full = (k, x, y)
        if self.capacity is None:
            self._d[full] = v
        else:
            self._d[hash(full) % self.capacity] = (full, v)

    def entries(self) -> Iterable[tuple[Hashable, Any, Any, Any]]:
        if self.capacity is None:
            for (k, x, y), v in self._d.items():
                yield k, x, y, v
        else:
            for (k, x, y), v in self._d.values():
                yield k, x, y, v

    def __len__(self) -> int:
        return len(self._d)


def alphabeta(
    game: Game,
    p: Any = None,
    window: Optional[tuple[Any, Any]] = None,
    tt: Optional[TranspositionTable] = None,
    *,
    deep: bool = True,
    order: Optional[Callable[[Any, list], list]] = None,
    stats: Optional[SearchStats] = None,
) -> Any:
    """Alpha-beta search with a transposition table.

    If the true value lies in ``window`` the true value is returned; otherwise
    the result lies on the same side of the violated bound.  With
    ``deep=False`` a child only inherits the bound set by its parent (shallow
    pruning), which is sound over any lattice.  ``order`` may reorder the
    successor list.
    """
    if p is None:
        p = game.initial()
    alg = game.algebra
    if window is None:
        window = (alg.bottom, alg.top)
    x0, y0 = window
    if not alg.leq(x0, y0):
        raise ValueError(f"window lower bound {x0!r} exceeds upper bound {y0!r}")
    if tt is None:
        tt = TranspositionTable()
    if stats is None:
        stats = SearchStats()
    join, meet, leq = alg.join, alg.meet, alg.leq
    bottom, top = alg.bottom, alg.top
    evaluate, successors, key = game.evaluate, game.successors, game.key
    tt_get, tt_put = tt.get, tt.put

    def ab(q: Any, x: Any, y: Any) -> Any:
        k = key(q)
        z = tt_get(k, x, y)
        if z is not None:
            stats.tt_hits += 1
            return z
        stats.nodes += 1
        t = evaluate(q)
        if t is MAX:
            children = successors(q)
            _check_structure(t, children, q)
            if order is not None:
                children = order(q, list(children))
            v = bottom
            for c in children:
                if deep:
                    vn = ab(c, join(v, x), y)
                else:
                    vn = ab(c, v, top)
                if leq(y, vn):
                    stats.cutoffs += 1
                    tt_put(k, x, y, vn)
                    return vn
                v = join(v, vn)
        elif t is MIN:
            children = successors(q)
            _check_structure(t, children, q)
            if order is not None:
                children = order(q, list(children))
            v = top
            for c in children:
                if deep:
                    vn = ab(c, x, meet(v, y))
                else:
                    vn = ab(c, bottom, v)
                if leq(vn, x):
                    stats.cutoffs += 1
                    tt_put(k, x, y, vn)
                    return vn
                v = meet(v, vn)
        else:
            v = t
        tt_put(k, x, y, v)
        return v

    return ab(p, x0, y0)


# --------------------------------------------------------------------------
# zero-window driver


@dataclass
class ZeroWindowResult:
    value: int
    trace: list[tuple[int, int]] = field(default_factory=list)

    @property
    def probes(self) -> int:
        return len(self.trace)


def max_probes(lo: int, hi: int) -> int:
    return math.ceil(math.log2(hi - lo + 1)) if hi > lo else 0


def zero_window_solve(
    p: Any,
    lo: int,
    hi: int,
    threshold: Callable[[int], Game],
    probe: Optional[Callable[[Game, Any], Any]] = None,
    *,
    tt: Optional[TranspositionTable] = None,
    stats: Optional[SearchStats] = None,
    verify: bool = False,
) -> ZeroWindowResult:
    """Find an integer game value in ``[lo, hi]`` by binary search.

    ``threshold(e)`` is a {0,1}-valued game that is a win for the maximizer
    iff the underlying value exceeds ``e``.  ``probe(game, p)`` evaluates one
    such game (default: :func:`alphabeta` over ``[0, 1]``).  A ``tt`` passed in
    is shared by every probe, which is only sound when the threshold games'
    keys tell thresholds apart; without one each threshold gets its own table.
    With ``verify=True`` every threshold in range is probed afterwards and a
    non-monotone answer raises :class:`GameError`.
    """
    if lo > hi:
        raise ValueError(f"empty range [{lo}, {hi}]")
    if stats is None:
        stats = SearchStats()
    tables: dict[int, TranspositionTable] = {}
    current = [lo]
    if probe is None:
        def probe(g: Game, q: Any) -> Any:
            table = tt if tt is not None else tables.setdefault(current[0], TranspositionTable())
            return alphabeta(g, q, (0, 1), table, stats=stats)

    def run(e: int) -> int:
        current[0] = e
        v = probe(threshold(e), p)
        if v not in (0, 1):
            raise GameError(f"threshold game for e={e} returned non-boolean value {v!r}")
        return int(v)

    trace = []
    a, b = lo, hi
    while a < b:
        e = (a + b) // 2
        r = run(e)
        trace.append((e, r))
        if r:
            a = e + 1
        else:
            b = e
    if verify:
        answers = [run(e) for e in range(lo, hi)]
        if any(answers[i] < answers[i + 1] for i in range(len(answers) - 1)):
            raise GameError(f"threshold games are not monotone in e: {answers}")
        expect = sum(answers) + lo
        if expect != a:
            raise GameError(f"binary search gave {a}, exhaustive probing gives {expect}")
    return ZeroWindowResult(a, trace)
