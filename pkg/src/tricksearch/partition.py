"""Partition search: alpha-beta whose transposition table stores sets of positions.

A partition system supplies three set constructors:

* ``generalize(p)``: a set of positions evaluating exactly like terminal ``p``;
* ``reach(p, S, child)``: positions like ``p`` that can move into ``S``
  (``child`` is the successor of ``p`` found in ``S``);
* ``constrain(p, explored)``: positions like ``p`` whose every move lands in
  one of the sets of ``explored`` (a list of ``(child, S)`` pairs covering all
  successors of ``p``);

plus ``intersect(p, A, B)`` (a subset of ``A & B`` containing ``p``),
``contains(S, p)`` and ``new_table()`` creating a set-keyed table with
``lookup(p, x, y) -> (value, S) | None`` and ``store(S, x, y, value)``.
"""
from __future__ import annotations

from typing import Any, Hashable, Optional

from .game import MAX, MIN, Game, GameError, SearchStats, _check_structure


class PartitionError(GameError):
    """A partition system returned a set that does not contain its position."""


class PartitionSystem:
    def generalize(self, p: Any) -> Any:
        raise NotImplementedError

    def reach(self, p: Any, S: Any, child: Any) -> Any:
        raise NotImplementedError

    def constrain(self, p: Any, explored: list) -> Any:
        raise NotImplementedError

    def intersect(self, p: Any, A: Any, B: Any) -> Any:
        raise NotImplementedError

    def contains(self, S: Any, p: Any) -> bool:
        raise NotImplementedError

    def bucket(self, p: Any) -> Hashable:
        """Coarse hash shared by every member of any set containing ``p``."""
        return None

    def set_bucket(self, S: Any) -> Hashable:
        return None

    def new_table(self) -> "SetTable":
        return SetTable(self)


class SetTable:
    """Generic set-keyed table: bucketed lists scanned with ``contains``."""

    def __init__(self, system: PartitionSystem) -> None:
        self.system = system
        self._buckets: dict = {}
        self.size = 0

    def lookup(self, p: Any, x: Any, y: Any) -> Optional[tuple[Any, Any]]:
        entries = self._buckets.get(self.system.bucket(p))
        if not entries:
            return None
        contains = self.system.contains
        for S, a, b, v in reversed(entries):
            if a == x and b == y and contains(S, p):
                return v, S
        return None

    def store(self, S: Any, x: Any, y: Any, v: Any) -> None:
        self._buckets.setdefault(self.system.set_bucket(S), []).append((S, x, y, v))
        self.size += 1

    def entries(self):
        for lst in self._buckets.values():
            yield from lst

    def __len__(self) -> int:
        return self.size


def partition_search(
    game: Game,
    system: PartitionSystem,
    p: Any = None,
    window: Optional[tuple[Any, Any]] = None,
    table: Any = None,
    *,
    stats: Optional[SearchStats] = None,
    check: bool = True,
) -> tuple[Any, Any]:
    """Return ``(value, S)`` where every member of ``S`` shares the windowed value.

    The value contract is that of :func:`tricksearch.game.alphabeta`.  Values
    must be totally ordered (scalar games).  With ``check`` every returned set
    is tested for membership of its own position.
    """
    if p is None:
        p = game.initial()
    alg = game.algebra
    if window is None:
        window = (alg.bottom, alg.top)
    x0, y0 = window
    if not alg.leq(x0, y0):
        raise ValueError(f"window lower bound {x0!r} exceeds upper bound {y0!r}")
    if table is None:
        table = system.new_table()
    if stats is None:
        stats = SearchStats()
    bottom, top = alg.bottom, alg.top
    evaluate, successors = game.evaluate, game.successors
    reach, constrain, intersect = system.reach, system.constrain, system.intersect
    lookup, store, contains = table.lookup, table.store, system.contains

    def verified(S: Any, q: Any, what: str) -> Any:
        if check and not contains(S, q):
            raise PartitionError(f"{what} returned a set excluding its position {q!r}")
        return S

    def ps(q: Any, x: Any, y: Any) -> tuple[Any, Any]:
        hit = lookup(q, x, y)
        if hit is not None:
            stats.tt_hits += 1
            return hit
        stats.nodes += 1
        t = evaluate(q)
        if t is MAX or t is MIN:
            children = successors(q)
            _check_structure(t, children, q)
            is_max = t is MAX
            v = bottom if is_max else top
            best = None
            explored = []
            for c in children:
                if is_max:
                    vn, Sn = ps(c, v if v > x else x, y)
                    cut = vn >= y
                    better = vn > v
                else:
                    vn, Sn = ps(c, x, v if v < y else y)
                    cut = vn <= x
                    better = vn < v
                if cut:
                    stats.cutoffs += 1
                    S = verified(reach(q, Sn, c), q, "reach")
                    store(S, x, y, vn)
                    return vn, S
                if better:
                    v, best = vn, (c, Sn)
                explored.append((c, Sn))
            S = verified(constrain(q, explored), q, "constrain")
            if best is not None:
                R = verified(reach(q, best[1], best[0]), q, "reach")
                S = verified(intersect(q, R, S), q, "intersect")
        else:
            v = t
            S = verified(system.generalize(q), q, "generalize")
        store(S, x, y, v)
        return v, S

    return ps(p, x0, y0)
