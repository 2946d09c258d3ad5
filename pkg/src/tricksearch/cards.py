"""Cards, deals and the trick-play rules of bridge.

Cards are stored internally as integers ``suit * 13 + (rank - 2)`` so that a
hand is a 52-bit mask; within a suit a higher rank is a higher bit.  The public
types (:class:`Card`, :class:`Deal`, :class:`PlayState`) wrap those masks.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import IntEnum
from typing import Iterable, NamedTuple, Optional, Sequence


class Suit(IntEnum):
    SPADES = 0
    HEARTS = 1
    DIAMONDS = 2
    CLUBS = 3

    @property
    def letter(self) -> str:
        return "SHDC"[self]

    @classmethod
    def parse(cls, text: str) -> Optional["Suit"]:
        """Parse ``S/H/D/C`` (or ``NT``/``N`` for no trump, returning None)."""
        t = text.strip().upper()
        if t in ("NT", "N", "NONE", ""):
            return None
        try:
            return cls("SHDC".index(t[0]))
        except ValueError:
            raise ValueError(f"unknown suit {text!r}") from None


class Seat(IntEnum):
    N = 0
    E = 1
    S = 2
    W = 3

    def next(self) -> "Seat":
        return Seat((self + 1) & 3)

    @property
    def side(self) -> "Side":
        return Side(self & 1)

    @classmethod
    def parse(cls, text: str) -> "Seat":
        try:
            return cls("NESW".index(text.strip().upper()[0]))
        except (ValueError, IndexError):
            raise ValueError(f"unknown seat {text!r}") from None


class Side(IntEnum):
    NS = 0
    EW = 1

    @classmethod
    def parse(cls, text: str) -> "Side":
        t = text.strip().upper()
        if t in ("NS", "N", "S"):
            return cls.NS
        if t in ("EW", "E", "W"):
            return cls.EW
        raise ValueError(f"unknown side {text!r}")


RANK_CHARS = "23456789TJQKA"
FULL_SUIT = (1 << 13) - 1
ALL_CARDS = (1 << 52) - 1
SUIT_MASKS = tuple(FULL_SUIT << (13 * s) for s in range(4))


class Card(NamedTuple):
    suit: Suit
    rank: int

    @property
    def index(self) -> int:
        return self.suit * 13 + self.rank - 2

    @classmethod
    def from_index(cls, i: int) -> "Card":
        return cls(Suit(i // 13), i % 13 + 2)

    @classmethod
    def parse(cls, text: str) -> "Card":
        """Parse ``"SA"``, ``"H10"``, ``"dT"``..."""
        t = text.strip().upper()
        if len(t) < 2:
            raise ValueError(f"bad card {text!r}")
        suit = Suit.parse(t[0])
        if suit is None:
            raise ValueError(f"bad card {text!r}")
        return cls(suit, parse_rank(t[1:]))

    def __str__(self) -> str:
        return self.suit.letter + RANK_CHARS[self.rank - 2]

    def __repr__(self) -> str:
        return f"Card({self})"


def parse_rank(token: str) -> int:
    t = token.upper()
    if t == "10":
        return 10
    if len(t) != 1 or t not in RANK_CHARS:
        raise ValueError(f"unknown rank symbol {token!r}")
    return RANK_CHARS.index(t) + 2


def mask_of(cards: Iterable[Card]) -> int:
    m = 0
    for c in cards:
        m |= 1 << c.index
    return m


def cards_of(mask: int) -> list[Card]:
    """Cards of a mask, spades first, high cards first within a suit."""
    out = []
    for s in range(4):
        chunk = (mask >> (13 * s)) & FULL_SUIT
        for r in range(12, -1, -1):
            if chunk >> r & 1:
                out.append(Card(Suit(s), r + 2))
    return out


def indices_desc(mask: int) -> list[int]:
    """Card indices of ``mask`` in the engine's default move order."""
    out = []
    for s in range(4):
        chunk = (mask >> (13 * s)) & FULL_SUIT
        base = 13 * s
        while chunk:
            r = chunk.bit_length() - 1
            out.append(base + r)
            chunk ^= 1 << r
    return out


def suit_of(i: int) -> int:
    return i // 13


class DealError(ValueError):
    pass


@dataclass(frozen=True)
class Deal:
    """Four disjoint, equal-sized hands.

    ``masks[seat]`` is the card mask of that seat.  The deal may use any subset
    of the deck (reduced decks, endings).
    """

    masks: tuple[int, int, int, int]

    def __post_init__(self) -> None:
        if len(self.masks) != 4:
            raise DealError("a deal has four hands")
        seen = 0
        for m in self.masks:
            if seen & m:
                dup = cards_of(seen & m)[0]
                raise DealError(f"card {dup} appears in two hands")
            seen |= m
        sizes = {m.bit_count() for m in self.masks}
        if len(sizes) > 1:
            raise DealError(f"hands have different sizes {[m.bit_count() for m in self.masks]}")

    @classmethod
    def from_hands(cls, hands: dict) -> "Deal":
        masks = [0, 0, 0, 0]
        for seat, cards in hands.items():
            masks[Seat(seat)] = mask_of(cards)
        return cls(tuple(masks))

    @property
    def hands(self) -> dict[Seat, frozenset[Card]]:
        return {Seat(i): frozenset(cards_of(m)) for i, m in enumerate(self.masks)}

    @property
    def all_cards(self) -> int:
        return self.masks[0] | self.masks[1] | self.masks[2] | self.masks[3]

    @property
    def size(self) -> int:
        return self.all_cards.bit_count()

    @property
    def hand_size(self) -> int:
        return self.masks[0].bit_count()

    @property
    def deck_ranks(self) -> Optional[frozenset[int]]:
        """The rank set if the deal is a full (possibly reduced) deck, else None."""
        allc = self.all_cards
        ranks = set()
        for s in range(4):
            chunk = (allc >> (13 * s)) & FULL_SUIT
            ranks |= {r + 2 for r in range(13) if chunk >> r & 1}
        if mask_of(Card(Suit(s), r) for s in range(4) for r in ranks) != allc:
            return None
        return frozenset(ranks)

    def __str__(self) -> str:
        return format_deal(self)


def _format_hand(mask: int) -> str:
    parts = []
    for s in range(4):
        chunk = (mask >> (13 * s)) & FULL_SUIT
        txt = "".join(RANK_CHARS[r] for r in range(12, -1, -1) if chunk >> r & 1)
        parts.append(txt or "-")
    return ".".join(parts)


def format_deal(deal: Deal) -> str:
    return " ".join(f"{'NESW'[i]}:{_format_hand(m)}" for i, m in enumerate(deal.masks))


def parse_hand(text: str) -> int:
    """Parse ``spades.hearts.diamonds.clubs`` into a mask."""
    suits = text.split(".")
    if len(suits) != 4:
        raise DealError(f"hand {text!r} must have four dot-separated suits")
    mask = 0
    for s, txt in enumerate(suits):
        if txt in ("-", ""):
            continue
        txt = txt.upper().replace("10", "T")
        for ch in txt:
            try:
                r = parse_rank(ch)
            except ValueError:
                raise DealError(f"unknown rank symbol {ch!r} in {text!r}") from None
            bit = 1 << (13 * s + r - 2)
            if mask & bit:
                raise DealError(f"duplicate card {Card(Suit(s), r)} in {text!r}")
            mask |= bit
    return mask


def parse_deal(text: str) -> Deal:
    """Parse ``N:<hand> E:<hand> S:<hand> W:<hand>``.

    An empty string gives the empty deal.
    """
    tokens = text.split()
    if not tokens:
        return Deal((0, 0, 0, 0))
    if len(tokens) != 4:
        raise DealError(f"expected four hands, got {len(tokens)} tokens")
    masks: list[Optional[int]] = [None] * 4
    for tok in tokens:
        if ":" not in tok:
            raise DealError(f"hand token {tok!r} lacks a seat prefix")
        seat_txt, hand_txt = tok.split(":", 1)
        try:
            seat = Seat.parse(seat_txt)
        except ValueError:
            raise DealError(f"unknown seat in token {tok!r}") from None
        if masks[seat] is not None:
            raise DealError(f"seat {seat.name} given twice")
        masks[seat] = parse_hand(hand_txt)
    return Deal(tuple(masks))  # type: ignore[arg-type]


def hcp(mask: int) -> int:
    """Milton Work high-card points of a hand mask."""
    pts = 0
    for s in range(4):
        chunk = (mask >> (13 * s)) & FULL_SUIT
        pts += 4 * (chunk >> 12 & 1) + 3 * (chunk >> 11 & 1) + 2 * (chunk >> 10 & 1) + (chunk >> 9 & 1)
    return pts


def suit_length(mask: int, suit: int) -> int:
    return ((mask >> (13 * suit)) & FULL_SUIT).bit_count()


# --------------------------------------------------------------------------
# trick play


def trick_winner(trick: Sequence[tuple[Seat, Card]], trump: Optional[Suit]) -> Seat:
    """Seat winning a completed four-card trick."""
    if len(trick) != 4 or len({seat for seat, _ in trick}) != 4:
        raise ValueError("a trick is four cards from four distinct seats")
    best_seat, best = trick[0]
    for seat, card in trick[1:]:
        if card.suit == best.suit:
            if card.rank > best.rank:
                best_seat, best = seat, card
        elif trump is not None and card.suit == trump:
            best_seat, best = seat, card
    return best_seat


def _winner_offset(trick: Sequence[int], trump: Optional[int]) -> int:
    """Offset (0..3) from the leader of the card winning ``trick``."""
    best = trick[0]
    bsuit = best // 13
    win = 0
    for k in (1, 2, 3):
        c = trick[k]
        cs = c // 13
        if cs == bsuit:
            if c > best:
                best, win = c, k
        elif cs == trump:
            best, bsuit, win = c, cs, k
    return win


class PlayState:
    """Trick-play state: remaining hands, the trick on the table, tricks won.

    ``target`` is the number of tricks the declaring side still needs; it is
    only meaningful for win/lose searches and may be None.
    """

    __slots__ = ("hands", "trump", "leader", "trick", "ns_tricks", "ew_tricks", "target", "_key", "aux")

    def __init__(
        self,
        hands: Sequence[int],
        trump: Optional[int] = None,
        leader: int = 0,
        trick: Sequence[int] = (),
        ns_tricks: int = 0,
        ew_tricks: int = 0,
        target: Optional[int] = None,
    ) -> None:
        self.hands = tuple(hands)
        self.trump = None if trump is None else int(trump)
        self.leader = int(leader)
        self.trick = tuple(trick)
        self.ns_tricks = ns_tricks
        self.ew_tricks = ew_tricks
        self.target = target
        self._key = None
        self.aux = None  # per-position cache for search layers

    @classmethod
    def from_deal(cls, deal: Deal, trump: Optional[int], leader: int, **kw) -> "PlayState":
        return cls(deal.masks, trump, leader, **kw)

    def validate(self) -> None:
        """Check the follow-suit and card-count invariants; raise ValueError."""
        seen = 0
        for m in self.hands:
            if seen & m:
                raise ValueError("hands overlap")
            seen |= m
        for c in self.trick:
            if seen >> c & 1:
                raise ValueError("a card on the table is still in a hand")
            seen |= 1 << c
        if len(self.trick) > 3:
            raise ValueError("at most three cards may be on the table")
        sizes = [m.bit_count() for m in self.hands]
        played = len(self.trick)
        base = sizes[(self.leader + played) & 3]
        for k in range(4):
            seat = (self.leader + k) & 3
            want = base - 1 if k < played else base
            if sizes[seat] != want:
                raise ValueError("hand sizes inconsistent with the trick in progress")

    # -- basic queries -------------------------------------------------

    @property
    def to_move(self) -> int:
        return (self.leader + len(self.trick)) & 3

    @property
    def cards_left(self) -> int:
        h = self.hands
        return (h[0] | h[1] | h[2] | h[3]).bit_count()

    @property
    def tricks_left(self) -> int:
        """Tricks not yet completed (including the one in progress)."""
        return (self.cards_left + len(self.trick)) // 4

    def is_over(self) -> bool:
        return not self.trick and not (self.hands[0] | self.hands[1] | self.hands[2] | self.hands[3])

    def tricks(self, side: int) -> int:
        return self.ew_tricks if side else self.ns_tricks

    def legal_mask(self) -> int:
        hand = self.hands[(self.leader + len(self.trick)) & 3]
        if self.trick:
            follow = hand & SUIT_MASKS[self.trick[0] // 13]
            if follow:
                return follow
        return hand

    def play(self, c: int) -> "PlayState":
        seat = (self.leader + len(self.trick)) & 3
        hands = list(self.hands)
        hands[seat] &= ~(1 << c)
        trick = self.trick + (c,)
        if len(trick) < 4:
            return PlayState(hands, self.trump, self.leader, trick, self.ns_tricks, self.ew_tricks, self.target)
        winner = (self.leader + _winner_offset(trick, self.trump)) & 3
        ns, ew, target = self.ns_tricks, self.ew_tricks, self.target
        if winner & 1:
            ew += 1
        else:
            ns += 1
        return PlayState(hands, self.trump, winner, (), ns, ew, target)

    # -- public views ----------------------------------------------------

    @property
    def remaining(self) -> dict[Seat, frozenset[Card]]:
        return {Seat(i): frozenset(cards_of(m)) for i, m in enumerate(self.hands)}

    @property
    def trick_so_far(self) -> list[tuple[Seat, Card]]:
        return [(Seat((self.leader + k) & 3), Card.from_index(c)) for k, c in enumerate(self.trick)]

    @property
    def tricks_won(self) -> dict[Side, int]:
        return {Side.NS: self.ns_tricks, Side.EW: self.ew_tricks}

    def key(self) -> tuple:
        if self._key is None:
            self._key = (self.hands, self.leader, self.trick, self.ns_tricks, self.ew_tricks)
        return self._key

    def __eq__(self, other: object) -> bool:
        return isinstance(other, PlayState) and self.key() == other.key() and self.trump == other.trump

    def __hash__(self) -> int:
        return hash(self.key())

    def __repr__(self) -> str:
        hands = " ".join(f"{'NESW'[i]}:{_format_hand(m)}" for i, m in enumerate(self.hands))
        tr = ",".join(str(Card.from_index(c)) for c in self.trick)
        return f"PlayState({hands} leader={'NESW'[self.leader]} trick=[{tr}] ns={self.ns_tricks} ew={self.ew_tricks})"


def legal_moves(state: PlayState, seat: int) -> list[Card]:
    """Cards ``seat`` may legally play in ``state``."""
    if seat != state.to_move:
        raise ValueError(f"{Seat(seat).name} is not on play ({Seat(state.to_move).name} is)")
    return cards_of(state.legal_mask())


@dataclass(frozen=True)
class Contract:
    declarer: Seat
    trump: Optional[Suit]
    tricks_committed: int

    def __post_init__(self) -> None:
        if not 7 <= self.tricks_committed <= 13:
            raise ValueError(f"tricks_committed must lie in [7, 13], got {self.tricks_committed}")

    @property
    def level(self) -> int:
        return self.tricks_committed - 6

    @property
    def leader(self) -> Seat:
        return self.declarer.next()

    def __str__(self) -> str:
        strain = "NT" if self.trump is None else self.trump.letter
        return f"{self.level}{strain} by {self.declarer.name}"


def random_deal(rng, ranks: Iterable[int] = range(2, 15)) -> Deal:
    """A uniformly random deal of the deck ``ranks`` x four suits."""
    deck = [Card(Suit(s), r).index for s in range(4) for r in sorted(ranks)]
    rng.shuffle(deck)
    n = len(deck) // 4
    masks = []
    for k in range(4):
        m = 0
        for c in deck[k * n:(k + 1) * n]:
            m |= 1 << c
        masks.append(m)
    return Deal(tuple(masks))


def top_ranks(n: int) -> list[int]:
    """The ``n`` highest ranks, e.g. ``top_ranks(3) == [12, 13, 14]``."""
    if not 0 <= n <= 13:
        raise ValueError("between 0 and 13 ranks")
    return list(range(15 - n, 15))
