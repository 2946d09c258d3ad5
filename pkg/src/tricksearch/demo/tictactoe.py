"""Tic-tac-toe and a partition system over board patterns.

Positions are nine cells (``X``, ``O`` or ``.``, row by row) plus the side
to move.  X maximizes: an X win is worth 1, a draw 0.5, an O win 0.

A pattern has the same shape with ``?`` allowed in any cell ("X or O or
blank, it does not matter").  Its members are the legal positions with the
same side to move that agree with it on every other cell.  Candidate sets
built by the operations below are checked by enumerating their members, and
replaced by the single position when the check fails, so every set handed to
partition search is sound.
"""
from __future__ import annotations

import itertools
from typing import Any, Iterator, NamedTuple, Optional

from ..game import MAX, MIN, Game, ScalarAlgebra
from ..partition import PartitionSystem, SetTable

LINES = (
    (0, 1, 2), (3, 4, 5), (6, 7, 8),
    (0, 3, 6), (1, 4, 7), (2, 5, 8),
    (0, 4, 8), (2, 4, 6),
)


class TTTPosition(NamedTuple):
    cells: str
    to_move: str

    @classmethod
    def parse(cls, board: str, to_move: Optional[str] = None) -> "TTTPosition":
        """``"XX./O../O.X"`` (slashes and spaces optional); side to move
        defaults to the one implied by the counts."""
        cells = "".join(ch for ch in board if ch not in "/ \n")
        if len(cells) != 9 or set(cells) - set("XO."):
            raise ValueError(f"bad board {board!r}")
        if to_move is None:
            to_move = "X" if cells.count("X") == cells.count("O") else "O"
        p = cls(cells, to_move)
        if not is_legal(p):
            raise ValueError(f"unreachable position {board!r} with {to_move} to move")
        return p

    def __str__(self) -> str:
        c = self.cells
        return f"{c[0:3]}/{c[3:6]}/{c[6:9]} {self.to_move}"


def winner(cells: str) -> Optional[str]:
    for a, b, c in LINES:
        if cells[a] != "." and cells[a] == cells[b] == cells[c]:
            return cells[a]
    return None


def is_legal(p: TTTPosition) -> bool:
    """Reachable from the empty board with alternating moves, X first."""
    cells, to_move = p
    x, o = cells.count("X"), cells.count("O")
    if to_move == "X" and x != o or to_move == "O" and x != o + 1 or to_move not in "XO":
        return False
    lines = {s: [l for l in LINES if all(cells[i] == s for i in l)] for s in "XO"}
    if lines["X"] and lines["O"]:
        return False
    for s, need in (("X", "O"), ("O", "X")):
        if lines[s]:
            # the winner moved last, and that move completed every line
            if to_move != need or not set.intersection(*(set(l) for l in lines[s])):
                return False
    return True


def ttt_value(cells: str) -> Optional[float]:
    w = winner(cells)
    if w == "X":
        return 1
    if w == "O":
        return 0
    if "." not in cells:
        return 0.5
    return None


class TicTacToe(Game):
    algebra = ScalarAlgebra(0, 1)

    def __init__(self, start: Optional[TTTPosition] = None) -> None:
        self.start = start or TTTPosition("." * 9, "X")

    def initial(self) -> TTTPosition:
        return self.start

    def evaluate(self, p: TTTPosition) -> Any:
        v = ttt_value(p.cells)
        if v is not None:
            return v
        return MAX if p.to_move == "X" else MIN

    def successors(self, p: TTTPosition) -> list[TTTPosition]:
        nxt = "O" if p.to_move == "X" else "X"
        return [TTTPosition(p.cells[:i] + p.to_move + p.cells[i + 1:], nxt) for i in range(9) if p.cells[i] == "."]


def all_positions() -> list[TTTPosition]:
    """Every position reachable from the empty board (play stops at a win)."""
    g = TicTacToe()
    seen = {g.start}
    stack = [g.start]
    while stack:
        p = stack.pop()
        if g.evaluate(p) in (MAX, MIN):
            for c in g.successors(p):
                if c not in seen:
                    seen.add(c)
                    stack.append(c)
    return sorted(seen)


# --------------------------------------------------------------------------
# patterns


class Pattern(NamedTuple):
    cells: str  # X, O, . or ?
    to_move: str
    open: bool = False  # members must not contain a completed line

    def __str__(self) -> str:
        c = self.cells
        return f"{c[0:3]}/{c[3:6]}/{c[6:9]} {self.to_move}" + (" open" if self.open else "")

    def matches(self, p: TTTPosition) -> bool:
        if p.to_move != self.to_move or not all(a == "?" or a == b for a, b in zip(self.cells, p.cells)):
            return False
        return not self.open or winner(p.cells) is None

    def members(self) -> Iterator[TTTPosition]:
        free = [i for i, ch in enumerate(self.cells) if ch == "?"]
        cells = list(self.cells)
        for fill in itertools.product("XO.", repeat=len(free)):
            for i, ch in zip(free, fill):
                cells[i] = ch
            p = TTTPosition("".join(cells), self.to_move)
            if is_legal(p) and (not self.open or winner(p.cells) is None):
                yield p


def _meet_cells(a: str, b: str) -> Optional[str]:
    """Cell-wise intersection of two patterns; None if they conflict."""
    out = []
    for x, y in zip(a, b):
        if x == "?":
            out.append(y)
        elif y == "?" or x == y:
            out.append(x)
        else:
            return None
    return "".join(out)


def _move(q: TTTPosition, cell: int) -> TTTPosition:
    nxt = "O" if q.to_move == "X" else "X"
    return TTTPosition(q.cells[:cell] + q.to_move + q.cells[cell + 1:], nxt)


class TTTPartitionSystem(PartitionSystem):
    """Sets of positions are :class:`Pattern` objects.

    * ``generalize`` keeps a completed line and turns everything else into
      ``?``;
    * ``reach`` takes the child's pattern, blanks the cell just played and
      hands the move back (an *open* pattern: nobody has won yet);
    * ``constrain`` intersects those back-translations over all moves and
      then frees cells one at a time, in board order, while every member
      still has all its moves inside the explored children's sets.
    """

    def __init__(self) -> None:
        self._ok: dict = {}
        self.checks = 0

    def sound(self, S: Pattern, test: tuple) -> bool:
        """Whether every member of ``S`` passes ``test`` (memoized)."""
        k = (S, test)
        hit = self._ok.get(k)
        if hit is None:
            self.checks += 1
            hit = all(self._test(test, q) for q in S.members())
            self._ok[k] = hit
        return hit

    @staticmethod
    def _test(test: tuple, q: TTTPosition) -> bool:
        kind = test[0]
        if kind == "value":
            return ttt_value(q.cells) == test[1]
        if ttt_value(q.cells) is not None:
            return False
        if kind == "reach":
            _, cell, child = test
            return q.cells[cell] == "." and child.matches(_move(q, cell))
        kids = test[1]
        return all(any(S.matches(_move(q, i)) for S in kids) for i in range(9) if q.cells[i] == ".")

    @staticmethod
    def exact(p: TTTPosition) -> Pattern:
        return Pattern(p.cells, p.to_move)

    def generalize(self, p: TTTPosition) -> Pattern:
        w = winner(p.cells)
        if w is None:
            return self.exact(p)
        for line in LINES:
            if all(p.cells[i] == w for i in line):
                S = Pattern("".join(w if i in line else "?" for i in range(9)), p.to_move)
                if self.sound(S, ("value", ttt_value(p.cells))):
                    return S
        return self.exact(p)

    @staticmethod
    def _move_cell(p: TTTPosition, child: TTTPosition) -> int:
        return next(i for i in range(9) if p.cells[i] != child.cells[i])

    @staticmethod
    def _back(S: Pattern, cell: int) -> Pattern:
        nxt = "O" if S.to_move == "X" else "X"
        return Pattern(S.cells[:cell] + "." + S.cells[cell + 1:], nxt, True)

    def reach(self, p: TTTPosition, S: Pattern, child: TTTPosition) -> Pattern:
        cell = self._move_cell(p, child)
        B = self._back(S, cell)
        if self.sound(B, ("reach", cell, S)):
            return B
        return self.exact(p)

    def constrain(self, p: TTTPosition, explored: list) -> Pattern:
        cells = "?" * 9
        for child, S in explored:
            cells = _meet_cells(cells, self._back(S, self._move_cell(p, child)).cells)
        test = ("constrain", tuple(sorted(set(S for _, S in explored))))
        if cells is None or not self.sound(Pattern(cells, p.to_move, True), test):
            return self.exact(p)
        for i in range(9):
            if cells[i] != "?":
                wider = cells[:i] + "?" + cells[i + 1:]
                if self.sound(Pattern(wider, p.to_move, True), test):
                    cells = wider
        return Pattern(cells, p.to_move, True)

    def intersect(self, p: TTTPosition, A: Pattern, B: Pattern) -> Pattern:
        cells = _meet_cells(A.cells, B.cells)
        if cells is None or A.to_move != B.to_move:
            return self.exact(p)
        return Pattern(cells, A.to_move, A.open or B.open)

    def contains(self, S: Pattern, p: TTTPosition) -> bool:
        return S.matches(p) and is_legal(p)

    def bucket(self, p: TTTPosition) -> str:
        return p.to_move

    def set_bucket(self, S: Pattern) -> str:
        return S.to_move

    def new_table(self) -> SetTable:
        return SetTable(self)


def ttt_partition_system() -> TTTPartitionSystem:
    return TTTPartitionSystem()


# the positions used in the tic-tac-toe walk-through
POSITION_1 = TTTPosition.parse("XXX/OO./O.X", "O")
ROOT_4 = TTTPosition.parse("XX./O../O.X", "O")
PATTERN_2 = Pattern("XXX??????", "O")
PATTERN_3 = Pattern("XX.??????", "X", True)
PATTERN_DIAGONAL = Pattern("X???.???X", "X", True)
PATTERN_4 = Pattern("XX.?..??X", "O", True)
