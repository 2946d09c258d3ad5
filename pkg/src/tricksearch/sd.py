"""Single-dummy solving: the maximizer does not see the hidden cards.

An :class:`ImperfectGame` describes the game from the maximizer's point of
view.  Its positions ``p`` carry no knowledge of the hidden layout; the
search pairs each with the set ``Z`` of situations still consistent with
play (a bit mask over situation ids ``0..n-1``):

* maximizer moves keep ``Z``;
* each minimizer move is available in some situations and restricts ``Z``
  to them;
* a terminal ``(p, Z)`` is won in the situations ``wins(p, Z)`` and lost in
  the rest of ``Z``.

Three searches are offered over the same description:

* :func:`solve_imperfect` - antichain value (which sets of situations one
  strategy can win together);
* :func:`perfect_info_value` - situations won when the maximizer also sees
  everything;
* :func:`is_achievable` - can one strategy win all of a given set, a plain
  win/lose search.

On top of achievability sit greedy construction of achievable sets
(:func:`build_achievable`) and squeaky-wheel reordering (:func:`swo_select`).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Callable, Hashable, Iterable, Optional, Sequence

from .cards import SUIT_MASKS, FULL_SUIT, _winner_offset, indices_desc
from .game import MAX, MIN, UNIT, Game, GameError, SearchStats, TranspositionTable, alphabeta, minimax
from .lattice import Antichain, AntichainAlgebra, SetAlgebra, SituationSet

DEFAULT_MAX_CARDS = 20


class ImperfectGame:
    """Interface for imperfect-information games (see module docstring)."""

    n: int = 0
    labels: Optional[Sequence[str]] = None

    def root(self) -> Any:
        raise NotImplementedError

    def turn(self, p: Any) -> Any:
        """``MAX``, ``MIN`` or None for terminal positions."""
        raise NotImplementedError

    def max_moves(self, p: Any) -> list:
        raise NotImplementedError

    def min_moves(self, p: Any) -> list[tuple[Any, int]]:
        """``(child, situations where the move is available)`` pairs."""
        raise NotImplementedError

    def wins(self, p: Any, Z: int) -> int:
        """Situations of ``Z`` in which terminal ``p`` is a win."""
        raise NotImplementedError

    def key(self, p: Any) -> Hashable:
        return p

    def move_label(self, p: Any, child: Any) -> str:
        return str(child)

    @property
    def universe(self) -> int:
        return (1 << self.n) - 1

    def size(self) -> Optional[int]:
        """Cards left in play, for the exact solver's size guard (None: unknown)."""
        return None

    def label(self, i: int) -> str:
        return self.labels[i] if self.labels else str(i)

    def names(self, bits: int) -> list[str]:
        return [self.label(i) for i in SituationSet(bits, self.n)]


class _View(Game):
    """An :class:`ImperfectGame` as an ordinary game over ``(p, Z)`` pairs."""

    def __init__(self, g: ImperfectGame, root: Any = None, Z: Optional[int] = None) -> None:
        self.g = g
        self.start = (g.root() if root is None else root, g.universe if Z is None else Z)

    def initial(self) -> tuple:
        return self.start

    def successors(self, node: tuple) -> list:
        p, Z = node
        if self.g.turn(p) is MAX:
            return [(c, Z) for c in self.g.max_moves(p)]
        out = []
        for c, cond in self.g.min_moves(p):
            z = Z & cond
            if z:
                out.append((c, z))
        return out

    def key(self, node: tuple) -> Hashable:
        return (self.g.key(node[0]), node[1])


class AntichainGame(_View):
    def __init__(self, g: ImperfectGame, root: Any = None, Z: Optional[int] = None) -> None:
        super().__init__(g, root, Z)
        self.algebra = AntichainAlgebra(g.n)

    def evaluate(self, node: tuple) -> Any:
        p, Z = node
        t = self.g.turn(p)
        if t is None:
            lost = Z & ~self.g.wins(p, Z)
            return Antichain((self.g.universe & ~lost,), self.g.n, reduced=True)
        return t


class PerfectInfoGame(_View):
    def __init__(self, g: ImperfectGame, root: Any = None, Z: Optional[int] = None) -> None:
        super().__init__(g, root, Z)
        self.algebra = SetAlgebra(g.n)

    def evaluate(self, node: tuple) -> Any:
        p, Z = node
        t = self.g.turn(p)
        if t is None:
            return self.g.universe & ~(Z & ~self.g.wins(p, Z))
        return t


class AchievabilityGame(_View):
    """1 at a node iff the maximizer can still win every member of ``A``
    that remains possible there; a node where no member of ``A`` remains is
    an immediate win."""

    def __init__(self, g: ImperfectGame, A: int, root: Any = None, Z: Optional[int] = None) -> None:
        super().__init__(g, root, Z)
        self.algebra = UNIT
        self.A = A

    def evaluate(self, node: tuple) -> Any:
        p, Z = node
        live = Z & self.A
        if not live:
            return 1
        t = self.g.turn(p)
        if t is None:
            return int(live & ~self.g.wins(p, Z) == 0)
        return t


class TooLarge(GameError):
    pass


def _guard(g: ImperfectGame, max_cards: Optional[int]) -> None:
    size = g.size()
    if max_cards is not None and size is not None and size > max_cards:
        raise TooLarge(
            f"{size} cards exceed the exact solver's limit of {max_cards}; "
            "use achievable-set planning (build_achievable / swo_select) or raise max_cards"
        )


def solve_imperfect(
    g: ImperfectGame, *, max_cards: Optional[int] = DEFAULT_MAX_CARDS, pruning: bool = True,
    stats: Optional[SearchStats] = None,
) -> Antichain:
    """The antichain of maximal sets of situations one strategy can win together."""
    _guard(g, max_cards)
    game = AntichainGame(g)
    if pruning:
        return alphabeta(game, stats=stats)
    return minimax(game)


def perfect_info_value(g: ImperfectGame, *, root: Any = None, Z: Optional[int] = None,
                       max_cards: Optional[int] = DEFAULT_MAX_CARDS) -> SituationSet:
    """Situations the maximizer wins when he too can see every card."""
    _guard(g, max_cards)
    return SituationSet(minimax(PerfectInfoGame(g, root, Z)), g.n)


# --------------------------------------------------------------------------
# achievability


@dataclass
class AchievableSet:
    members: SituationSet
    strategy: dict = field(default_factory=dict)
    root_move: Any = None

    def __contains__(self, i: int) -> bool:
        return i in self.members


def _as_bits(A: Any, n: int) -> int:
    if isinstance(A, SituationSet):
        return A.bits
    if isinstance(A, int):
        return A
    return SituationSet.of(A, n).bits


class Achiever:
    """Achievability queries on one game, memoized by the queried set."""

    def __init__(self, g: ImperfectGame) -> None:
        self.g = g
        self._memo: dict[int, bool] = {}
        self.stats = SearchStats()
        self.queries = 0

    def __call__(self, A: Any) -> bool:
        a = _as_bits(A, self.g.n)
        hit = self._memo.get(a)
        if hit is None:
            self.queries += 1
            hit = alphabeta(AchievabilityGame(self.g, a), window=(0, 1), stats=self.stats) == 1
            self._memo[a] = hit
        return hit

    def witness(self, A: Any) -> AchievableSet:
        """A strategy winning every member of ``A`` (which must be achievable)."""
        a = _as_bits(A, self.g.n)
        game = AchievabilityGame(self.g, a)
        tt = TranspositionTable()
        if alphabeta(game, window=(0, 1), tt=tt) != 1:
            raise ValueError("set is not achievable")
        strategy: dict = {}
        seen = set()

        def walk(node: tuple) -> None:
            k = game.key(node)
            if k in seen:
                return
            seen.add(k)
            t = game.evaluate(node)
            if t is not MAX and t is not MIN:
                return
            kids = game.successors(node)
            if t is MAX:
                for c in kids:
                    if alphabeta(game, c, (0, 1), tt) == 1:
                        strategy[k] = c[0]
                        walk(c)
                        return
                raise GameError("no winning move at a won maximizer node")
            for c in kids:
                walk(c)

        root = game.initial()
        walk(root)
        return AchievableSet(SituationSet(a, self.g.n), strategy, strategy.get(game.key(root)))


def is_achievable(g: ImperfectGame, A: Any) -> tuple[bool, Optional[AchievableSet]]:
    """Whether one strategy wins every situation in ``A``, with a witness if so."""
    ach = Achiever(g)
    if not ach(A):
        return False, None
    return True, ach.witness(A)


def verify_strategy(g: ImperfectGame, strategy: dict, A: Any) -> bool:
    """Replay ``strategy`` in each situation of ``A`` against every defence."""
    a = _as_bits(A, g.n)

    def wins(p: Any, Z: int, s: int) -> bool:
        t = g.turn(p)
        if t is None:
            return bool(g.wins(p, Z) >> s & 1)
        if t is MAX:
            k = (g.key(p), Z)
            if k not in strategy:
                return False
            return wins(strategy[k], Z, s)
        for c, cond in g.min_moves(p):
            z = Z & cond
            if z >> s & 1 and not wins(c, z, s):
                return False
        return True

    return all(wins(g.root(), g.universe, s) for s in SituationSet(a, g.n))


Generalizer = Callable[[int, int], int]


def build_achievable(
    g: ImperfectGame,
    seq: Sequence[int],
    generalizer: Optional[Generalizer] = None,
    achiever: Optional[Achiever] = None,
) -> tuple[AchievableSet, list[int]]:
    """Greedy maximal achievable set along ``seq``; also returns rejected ids.

    With ``generalizer(A_bits, s) -> bits`` the widened set is tried before the
    plain union.
    """
    ach = achiever or Achiever(g)
    A = 0
    failed = []
    for s in seq:
        one = 1 << s
        if A & one:
            continue
        if generalizer is not None:
            wide = generalizer(A, s) | A | one
            if wide != A | one and ach(wide):
                A = wide
                continue
        if ach(A | one):
            A |= one
        else:
            failed.append(s)
    return ach.witness(A), failed


def weight_payoff(weights: Sequence[float]) -> Callable[[int], float]:
    """Payoff of a set = total weight of its members."""
    def f(bits: int) -> float:
        return sum(w for i, w in enumerate(weights) if bits >> i & 1)
    return f


@dataclass
class SWOResult:
    best: AchievableSet
    payoff: float
    history: list[tuple[list[int], int, float]]


def swo_select(
    g: ImperfectGame,
    weights: Sequence[float],
    iterations: int = 10,
    order: Optional[Sequence[int]] = None,
    payoff: Optional[Callable[[int], float]] = None,
    generalizer: Optional[Generalizer] = None,
) -> SWOResult:
    """Squeaky-wheel search for a high-payoff achievable set.

    Each round builds the greedy achievable set along the current order.  A
    rejected element ``f`` squeaks with priority ``w_f`` plus the weights of
    the other rejected elements it could have been achieved together with.
    Squeaking elements move to the front (priority, then weight descending,
    then original position); the others keep their relative order.  Stops
    after ``iterations`` rounds or when an order repeats.
    """
    if iterations < 1:
        raise ValueError("iterations must be at least 1")
    if hasattr(weights, "weights"):
        weights = weights.weights
    weights = list(weights)
    if len(weights) != g.n:
        raise ValueError(f"{len(weights)} weights for {g.n} situations")
    order = list(range(g.n)) if order is None else list(order)
    origin = {s: i for i, s in enumerate(order)}
    payoff = payoff or weight_payoff(weights)
    ach = Achiever(g)
    best, best_pay = None, None
    history = []
    seen = set()
    for _ in range(iterations):
        A, failed = build_achievable(g, order, generalizer, ach)
        pay = payoff(A.members.bits)
        history.append((list(order), A.members.bits, pay))
        if best is None or pay > best_pay:
            best, best_pay = A, pay
        seen.add(tuple(order))
        if not failed:
            break
        prio = {}
        for f in failed:
            prio[f] = weights[f] + sum(weights[h] for h in failed if h != f and ach((1 << f) | (1 << h)))
        front = sorted(failed, key=lambda f: (-prio[f], -weights[f], origin[f]))
        fs = set(failed)
        order = front + [s for s in order if s not in fs]
        if tuple(order) in seen:
            break
    return SWOResult(best, best_pay, history)


class RootMove(ImperfectGame):
    """``g`` with the maximizer committed to one first move."""

    def __init__(self, g: ImperfectGame, move: Any) -> None:
        if g.turn(g.root()) is not MAX:
            raise ValueError("the maximizer is not on play at the root")
        self.g, self.move = g, move
        self.n, self.labels = g.n, g.labels

    def root(self) -> Any:
        return self.move

    def __getattr__(self, name: str) -> Any:
        return getattr(self.g, name)

    def turn(self, p):
        return self.g.turn(p)

    def max_moves(self, p):
        return self.g.max_moves(p)

    def min_moves(self, p):
        return self.g.min_moves(p)

    def wins(self, p, Z):
        return self.g.wins(p, Z)

    def key(self, p):
        return self.g.key(p)

    def size(self):
        return self.g.size()


def plan_scores(
    g: ImperfectGame, weights: Sequence[float], iterations: int = 10, order: Optional[Sequence[int]] = None,
    generalizer: Optional[Generalizer] = None,
) -> list[tuple[Any, float, SWOResult]]:
    """SWO payoff of each first move of the maximizer."""
    out = []
    for m in g.max_moves(g.root()):
        r = swo_select(RootMove(g, m), weights, iterations, order, generalizer=generalizer)
        out.append((m, r.payoff, r))
    return out


def select_move_swo(g: ImperfectGame, weights: Sequence[float], iterations: int = 10, **kw) -> tuple[Any, list]:
    """First maximizer move with the best SWO payoff (ties: move order)."""
    scores = plan_scores(g, weights, iterations, **kw)
    best = max(range(len(scores)), key=lambda i: (scores[i][1], -i))
    return scores[best][0], scores


def dd_score(g: ImperfectGame, p: Any, s: int) -> int:
    """1 if the maximizer wins from ``p`` seeing every card in situation ``s``."""
    return int(perfect_info_value(g, root=p, Z=1 << s, max_cards=None).bits >> s & 1)


# --------------------------------------------------------------------------
# bridge single dummy


class BridgeSingleDummy(ImperfectGame):
    """Declarer's side sees its two hands; the defenders' cards are one of
    ``situations`` (pairs of hidden-hand masks, in seat order of the two
    defenders).  Declarer wins by taking ``target`` tricks in all.

    Positions are ``(visible hands, cards played by each defender, trick,
    leader, declarer tricks, defender tricks)``.  Play stops once the
    contract is made or cannot be made.
    """

    def __init__(
        self,
        visible: tuple[int, int],
        situations: Sequence[tuple[int, int]],
        trump: Optional[int],
        leader: int,
        target: int,
        declarer_side: int = 0,
        labels: Optional[Sequence[str]] = None,
    ) -> None:
        if not situations:
            raise ValueError("at least one situation is needed")
        self.side = declarer_side
        self.vis_seats = (declarer_side, declarer_side + 2)
        self.hid_seats = (declarer_side ^ 1, (declarer_side ^ 1) + 2)
        self.visible = tuple(visible)
        self.situations = [tuple(s) for s in situations]
        hidden_all = self.situations[0][0] | self.situations[0][1]
        size = visible[0].bit_count()
        for a, b in self.situations:
            if a & b or a | b != hidden_all or a.bit_count() != size or b.bit_count() != size:
                raise ValueError("situations must split the same hidden cards evenly")
            if (a | b) & (visible[0] | visible[1]):
                raise ValueError("hidden and visible cards overlap")
        self.trump = trump
        self.leader = leader
        self.target = target
        self.n = len(self.situations)
        self.labels = labels
        self.hand_size = size

    def root(self) -> tuple:
        return (self.visible, (0, 0), (), self.leader, 0, 0)

    def size(self) -> int:
        return 4 * self.hand_size

    def _tricks_left(self, p: tuple) -> int:
        vis, played, trick, _, _, _ = p
        cards = vis[0].bit_count() + vis[1].bit_count() + 2 * self.hand_size - played[0].bit_count() - played[1].bit_count()
        return (cards + len(trick)) // 4

    def turn(self, p: tuple) -> Any:
        _, _, trick, leader, dt, ft = p
        if dt >= self.target or dt + self._tricks_left(p) < self.target:
            return None
        seat = (leader + len(trick)) & 3
        return MAX if (seat & 1) == self.side else MIN

    def wins(self, p: tuple, Z: int) -> int:
        return Z if p[4] >= self.target else 0

    def _after(self, p: tuple, seat: int, c: int) -> tuple:
        vis, played, trick, leader, dt, ft = p
        if seat in self.vis_seats:
            k = self.vis_seats.index(seat)
            vis = tuple(m & ~(1 << c) if i == k else m for i, m in enumerate(vis))
        else:
            k = self.hid_seats.index(seat)
            played = tuple(m | (1 << c) if i == k else m for i, m in enumerate(played))
        trick = trick + (c,)
        if len(trick) == 4:
            winner = (leader + _winner_offset(trick, self.trump)) & 3
            if (winner & 1) == self.side:
                dt += 1
            else:
                ft += 1
            return (vis, played, (), winner, dt, ft)
        return (vis, played, trick, leader, dt, ft)

    def max_moves(self, p: tuple) -> list:
        vis, _, trick, leader, _, _ = p
        seat = (leader + len(trick)) & 3
        hand = vis[self.vis_seats.index(seat)]
        if trick:
            follow = hand & SUIT_MASKS[trick[0] // 13]
            if follow:
                hand = follow
        return [self._after(p, seat, c) for c in indices_desc(hand)]

    def min_moves(self, p: tuple) -> list[tuple[Any, int]]:
        _, played, trick, leader, _, _ = p
        seat = (leader + len(trick)) & 3
        k = self.hid_seats.index(seat)
        cond: dict[int, int] = {}
        for i, sit in enumerate(self.situations):
            hand = sit[k] & ~played[k]
            if played[k] & ~sit[k]:
                continue
            if trick:
                follow = hand & SUIT_MASKS[trick[0] // 13]
                if follow:
                    hand = follow
            for c in indices_desc(hand):
                cond[c] = cond.get(c, 0) | (1 << i)
        return [(self._after(p, seat, c), cond[c]) for c in sorted(cond, reverse=True)]

    def move_label(self, p: tuple, child: tuple) -> str:
        from .cards import Card

        before = p[0][0] | p[0][1] | p[1][0] | p[1][1]
        after = child[0][0] | child[0][1] | child[1][0] | child[1][1]
        diff = (before ^ after)
        return str(Card.from_index(diff.bit_length() - 1)) if diff else "?"

    def deal_of(self, i: int):
        """The full deal of situation ``i``."""
        from .cards import Deal

        masks = [0, 0, 0, 0]
        masks[self.vis_seats[0]], masks[self.vis_seats[1]] = self.visible
        masks[self.hid_seats[0]], masks[self.hid_seats[1]] = self.situations[i]
        return Deal(tuple(masks))


def length_generalizer(g: BridgeSingleDummy, seat_index: int = 0) -> Generalizer:
    """Widen per-suit length ranges of one hidden hand to absorb a new situation.

    ``A (+) {s}`` is every situation whose hidden hand's suit lengths lie,
    suit by suit, within the range spanned by ``A`` and ``s``.
    """
    lengths = [
        tuple(((sit[seat_index] >> (13 * k)) & FULL_SUIT).bit_count() for k in range(4))
        for sit in g.situations
    ]

    def widen(A: int, s: int) -> int:
        members = [i for i in range(g.n) if A >> i & 1] + [s]
        lo = [min(lengths[i][k] for i in members) for k in range(4)]
        hi = [max(lengths[i][k] for i in members) for k in range(4)]
        out = 0
        for i, ls in enumerate(lengths):
            if all(lo[k] <= ls[k] <= hi[k] for k in range(4)):
                out |= 1 << i
        return out

    return widen


def enumerate_situations(hidden: int, size: int, fixed: tuple[int, int] = (0, 0)) -> list[tuple[int, int]]:
    """All splits of ``hidden`` into two hands of ``size`` cards respecting known placements."""
    from itertools import combinations

    cards = [c for c in indices_desc(hidden) if not (fixed[0] | fixed[1]) >> c & 1]
    need = size - fixed[0].bit_count()
    out = []
    for combo in combinations(cards, need):
        a = fixed[0]
        for c in combo:
            a |= 1 << c
        out.append((a, hidden & ~a))
    return out
