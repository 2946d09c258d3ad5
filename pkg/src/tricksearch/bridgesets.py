"""Sets of bridge positions with wildcard low cards, for partition search.

A position is summarized per suit by its *owner sequence*: the holders of
the suit's cards still in play (in hands or on the table), highest rank
first.  Hand cards are tagged with the seat (0-3), cards on the table with
``4 + seat``.  Absolute ranks never matter, only this relative order.

A :class:`BridgeSet` fixes

* a *bucket*: leader, the game's status (tricks still needed, say) and, per
  suit, how many cards each tag holds;
* per suit a depth ``d`` and the first ``d`` entries of the owner sequence.

The remaining cards of each suit are x's: any arrangement of them among
their holders is a member.  Depth 0 everywhere means only the bucket
matters.

Backing a set up over a move (``reach``):

* a move that does not complete a trick keeps the depths (the card simply
  changes tag from hand to table, the order is unchanged);
* a trick-completing move keeps, per suit, a prefix covering the same
  number of surviving cards, and additionally pins the trick's winning card
  when another card of the trick shares its suit, so that every member gives
  the trick to the same seat.

``constrain`` takes the elementwise maximum of the backed-up depths of all
explored moves, and ``intersect`` the maximum of two depth vectors.  Since
all sets built around a position are prefixes of that position's own owner
sequences, these are exact set operations.
"""
from __future__ import annotations

import random
from typing import Any, Callable, Hashable, NamedTuple, Optional, Sequence

from .cards import FULL_SUIT, Card, PlayState, _winner_offset
from .partition import PartitionSystem

_ZERO = (0, 0, 0, 0)


class BridgeSet(NamedTuple):
    bucket: tuple
    depths: tuple[int, int, int, int]
    prefixes: tuple[tuple[int, ...], ...]

    @property
    def leader(self) -> int:
        return self.bucket[0]

    @property
    def status(self) -> Hashable:
        return self.bucket[1]

    def describe(self) -> str:
        """Human-readable pattern, e.g. ``S: N E x x | H: ...``."""
        names = "NESWnesw"
        parts = []
        for s, (pre, counts) in enumerate(zip(self.prefixes, self.bucket[2])):
            rest = list(counts)
            for t in pre:
                rest.remove(t)
            xs = "".join(names[t] for t in sorted(rest))
            parts.append("SHDC"[s] + ":" + "".join(names[t] for t in pre) + ("|" + xs if xs else ""))
        return " ".join(parts)


def position_info(q: PlayState) -> tuple:
    """``(cards per suit, owner sequences, sorted tags per suit)``, cached on ``q``."""
    aux = q.aux
    if aux is not None:
        return aux
    h0, h1, h2, h3 = q.hands
    table = {}
    for k, c in enumerate(q.trick):
        table[c] = 4 + ((q.leader + k) & 3)
    tmask = 0
    for c in table:
        tmask |= 1 << c
    cards = []
    seqs = []
    shape = []
    for s in range(4):
        shift = 13 * s
        m = ((h0 | h1 | h2 | h3 | tmask) >> shift) & FULL_SUIT
        cs = []
        seq = []
        while m:
            r = m.bit_length() - 1
            m ^= 1 << r
            c = shift + r
            b = 1 << c
            if h0 & b:
                t = 0
            elif h1 & b:
                t = 1
            elif h2 & b:
                t = 2
            elif h3 & b:
                t = 3
            else:
                t = table[c]
            cs.append(c)
            seq.append(t)
        cards.append(cs)
        seqs.append(tuple(seq))
        shape.append(tuple(sorted(seq)))
    aux = (cards, tuple(seqs), tuple(shape))
    q.aux = aux
    return aux


class BridgePartitionSystem(PartitionSystem):
    """Partition system for a bridge game over :class:`PlayState` positions.

    ``status(q)`` must return whatever besides leader and holdings the
    evaluation depends on (tricks still needed in a win/lose game, tricks
    already won in a trick-counting game).
    """

    def __init__(self, trump: Optional[int], status: Callable[[PlayState], Hashable]) -> None:
        self.trump = trump
        self.status = status

    # -- helpers -----------------------------------------------------------

    def bucket(self, q: PlayState) -> tuple:
        return (q.leader, self.status(q), position_info(q)[2])

    def set_bucket(self, S: BridgeSet) -> tuple:
        return S.bucket

    def make_set(self, q: PlayState, depths: Sequence[int]) -> BridgeSet:
        seqs = position_info(q)[1]
        depths = tuple(depths)
        return BridgeSet(self.bucket(q), depths, tuple(seq[:d] for seq, d in zip(seqs, depths)))

    def backed_up_depths(self, q: PlayState, child: PlayState, child_depths: Sequence[int]) -> tuple:
        """Depth vector at ``q`` for the set reaching ``child``'s set."""
        if len(q.trick) < 3:
            return tuple(child_depths)
        seat = q.to_move
        diff = q.hands[seat] & ~child.hands[seat]
        c = diff.bit_length() - 1
        trick = q.trick + (c,)
        cards = position_info(q)[0]
        depths = []
        for s in range(4):
            want = child_depths[s]
            d = 0
            if want:
                seen = 0
                for i, card in enumerate(cards[s]):
                    if card not in trick:
                        seen += 1
                        if seen == want:
                            d = i + 1
                            break
            depths.append(d)
        w = trick[_winner_offset(trick, self.trump)]
        ws = w // 13
        if sum(1 for t in trick if t // 13 == ws) > 1:
            pos = cards[ws].index(w) + 1
            if pos > depths[ws]:
                depths[ws] = pos
        return tuple(depths)

    # -- partition system ------------------------------------------------

    def generalize(self, q: PlayState) -> BridgeSet:
        return self.make_set(q, _ZERO)

    def reach(self, q: PlayState, S: BridgeSet, child: PlayState) -> BridgeSet:
        return self.make_set(q, self.backed_up_depths(q, child, S.depths))

    def constrain(self, q: PlayState, explored: list) -> BridgeSet:
        depths = list(_ZERO)
        for child, S in explored:
            for s, d in enumerate(self.backed_up_depths(q, child, S.depths)):
                if d > depths[s]:
                    depths[s] = d
        return self.make_set(q, depths)

    def intersect(self, q: PlayState, A: BridgeSet, B: BridgeSet) -> BridgeSet:
        return self.make_set(q, [max(a, b) for a, b in zip(A.depths, B.depths)])

    def contains(self, S: BridgeSet, q: PlayState) -> bool:
        if self.bucket(q) != S.bucket:
            return False
        seqs = position_info(q)[1]
        return all(seq[:d] == pre for seq, d, pre in zip(seqs, S.depths, S.prefixes))

    def new_table(self) -> "BridgeSetTable":
        return BridgeSetTable(self)


class BridgeSetTable:
    """Set-keyed table indexed by bucket, then depth vector, then prefix."""

    def __init__(self, system: BridgePartitionSystem) -> None:
        self.system = system
        self._d: dict = {}
        self.size = 0

    def lookup(self, q: PlayState, x: Any, y: Any) -> Optional[tuple[Any, BridgeSet]]:
        bucket = self.system.bucket(q)
        by_depth = self._d.get(bucket)
        if not by_depth:
            return None
        seqs = position_info(q)[1]
        for depths, entries in by_depth.items():
            pre = (seqs[0][:depths[0]], seqs[1][:depths[1]], seqs[2][:depths[2]], seqs[3][:depths[3]])
            v = entries.get((pre, x, y))
            if v is not None:
                return v, BridgeSet(bucket, depths, pre)
        return None

    def store(self, S: BridgeSet, x: Any, y: Any, v: Any) -> None:
        entries = self._d.setdefault(S.bucket, {}).setdefault(S.depths, {})
        if (S.prefixes, x, y) not in entries:
            self.size += 1
        entries[(S.prefixes, x, y)] = v

    def sets(self):
        """Yield ``(S, x, y, v)`` for every stored entry."""
        for bucket, by_depth in self._d.items():
            for depths, entries in by_depth.items():
                for (pre, x, y), v in entries.items():
                    yield BridgeSet(bucket, depths, pre), x, y, v

    def __len__(self) -> int:
        return self.size


# --------------------------------------------------------------------------
# standalone helpers


def generalize_terminal_bridge(state: PlayState, status: Hashable = None) -> BridgeSet:
    """The wildcard set of a terminal position: only leader, status and shape kept."""
    return BridgePartitionSystem(state.trump, lambda q: status).generalize(state)


def back_up_pattern(
    child_set: BridgeSet, move: Card, state: PlayState, status: Callable[[PlayState], Hashable]
) -> BridgeSet:
    """Predecessor set of ``child_set`` over ``move`` played from ``state``."""
    c = move.index
    if not state.legal_mask() >> c & 1:
        raise ValueError(f"{move} is not a legal play in {state!r}")
    child = state.play(c)
    system = BridgePartitionSystem(state.trump, status)
    if child_set.bucket != system.bucket(child) or not system.contains(child_set, child):
        raise ValueError("child set does not contain the position after the move")
    return system.reach(state, child_set, child)


def realize(S: BridgeSet, template: PlayState, seqs: Sequence[Sequence[int]], ranks: Sequence[Sequence[int]]) -> PlayState:
    """Concrete position with owner sequences ``seqs`` and card ranks ``ranks``.

    ``ranks[s]`` lists rank offsets 0..12, descending, one per entry of
    ``seqs[s]``.  Leader, tricks and target are copied from ``template``.
    """
    hands = [0, 0, 0, 0]
    table = {}
    for s in range(4):
        if len(ranks[s]) != len(seqs[s]):
            raise ValueError("rank list and owner sequence differ in length")
        for tag, r in zip(seqs[s], ranks[s]):
            c = 13 * s + r
            if tag < 4:
                hands[tag] |= 1 << c
            else:
                table[tag - 4] = c
    leader = S.leader
    trick = [table[(leader + k) & 3] for k in range(len(table))]
    if set(table) != {(leader + k) & 3 for k in range(len(table))}:
        raise ValueError("table cards do not follow the leader")
    return PlayState(hands, template.trump, leader, trick, template.ns_tricks, template.ew_tricks, template.target)


def sample_members(S: BridgeSet, template: PlayState, rng: random.Random, k: int) -> list[PlayState]:
    """``k`` random members of ``S``: shuffled x-cards and random concrete ranks."""
    out = []
    for _ in range(k):
        seqs, ranks = [], []
        for s in range(4):
            pre = list(S.prefixes[s])
            rest = list(S.bucket[2][s])
            for t in pre:
                rest.remove(t)
            rng.shuffle(rest)
            seq = pre + rest
            seqs.append(seq)
            ranks.append(sorted(rng.sample(range(13), len(seq)), reverse=True))
        out.append(realize(S, template, seqs, ranks))
    return out
