"""Monte Carlo card and bid selection.

* :class:`DealConstraint` and :func:`sample_deals`: uniform random deals
  subject to per-seat suit-length ranges, known cards and rejection hooks;
* :class:`WeightedSample` and :func:`reweigh`: sample weights updated by a
  likelihood;
* :func:`select_move`: the move maximizing the weighted sum of per-deal
  scores (double-dummy trick counts by default);
* :func:`select_bid`: candidate bids scored by projecting the auction with a
  bid database and scoring the final contract double dummy.
"""
from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass, field
from typing import Any, Callable, Iterable, Optional, Sequence

from .cards import FULL_SUIT, Deal, PlayState, Seat, Suit, format_deal, hcp, parse_deal, parse_hand, suit_length

DEFAULT_SAMPLES = 50


class SamplingError(ValueError):
    pass


Hook = tuple[str, Callable[[Deal], bool]]


@dataclass
class DealConstraint:
    """What is known about the deal.

    ``lengths[seat][suit] = (lo, hi)`` bounds suit lengths (missing entries
    are unconstrained); ``known[seat]`` is a mask of cards known to be in that
    hand; ``hooks`` are named predicates on whole deals applied by rejection.
    ``deck`` is the mask of cards in play (default: all 52).
    """

    lengths: dict = field(default_factory=dict)
    known: dict = field(default_factory=dict)
    hooks: list = field(default_factory=list)
    deck: int = (1 << 52) - 1
    max_rejection: float = 0.999

    def bounds(self, seat: int, suit: int) -> tuple[int, int]:
        lo, hi = self.lengths.get(seat, {}).get(suit, (0, 13))
        return lo, hi

    @property
    def hand_size(self) -> int:
        return self.deck.bit_count() // 4

    def suit_cards(self, suit: int) -> int:
        return ((self.deck >> (13 * suit)) & FULL_SUIT).bit_count()

    def check(self) -> None:
        """Raise :class:`SamplingError` unless some deal satisfies the ranges."""
        if self.deck.bit_count() % 4:
            raise SamplingError("the deck does not divide into four hands")
        seen = 0
        for seat, m in self.known.items():
            if m & ~self.deck:
                raise SamplingError(f"{Seat(seat).name} holds cards outside the deck")
            if m & seen:
                raise SamplingError("a known card is placed in two hands")
            seen |= m
            if m.bit_count() > self.hand_size:
                raise SamplingError(f"{Seat(seat).name} has more known cards than a hand holds")
        n = self.hand_size
        for seat in range(4):
            los = his = 0
            for suit in range(4):
                lo, hi = self.bounds(seat, suit)
                if lo > hi:
                    raise SamplingError(f"{Seat(seat).name} {Suit(suit).name}: empty range [{lo}, {hi}]")
                have = suit_length(self.known.get(seat, 0), suit)
                if have > hi:
                    raise SamplingError(f"{Seat(seat).name} already holds {have} {Suit(suit).name}, above {hi}")
                los += max(lo, have)
                his += min(hi, self.suit_cards(suit))
            if not los <= n <= his:
                raise SamplingError(f"{Seat(seat).name}: suit ranges cannot add up to {n} cards")
        for suit in range(4):
            los = sum(self.bounds(seat, suit)[0] for seat in range(4))
            his = sum(self.bounds(seat, suit)[1] for seat in range(4))
            if not los <= self.suit_cards(suit) <= his:
                raise SamplingError(f"{Suit(suit).name}: ranges cannot hold {self.suit_cards(suit)} cards")
        if not _feasible(self._plan()):
            raise SamplingError("no deal satisfies the length ranges and known cards")

    def _plan(self) -> tuple:
        """Per suit: unknown cards and each seat's (lo, hi) for extra cards;
        per seat: extra cards needed."""
        known_all = 0
        for m in self.known.values():
            known_all |= m
        suits = []
        for suit in range(4):
            free = self.suit_cards(suit) - suit_length(known_all & self.deck, suit)
            rng = []
            for seat in range(4):
                have = suit_length(self.known.get(seat, 0), suit)
                lo, hi = self.bounds(seat, suit)
                rng.append((max(lo - have, 0), max(hi - have, -1)))
            suits.append((free, tuple(rng)))
        needs = tuple(self.hand_size - self.known.get(seat, 0).bit_count() for seat in range(4))
        return tuple(suits), needs

    def satisfied(self, deal: Deal) -> Optional[str]:
        """None if ``deal`` meets every constraint, else a description of the first failure."""
        for seat, m in self.known.items():
            if m & ~deal.masks[seat]:
                return f"{Seat(seat).name} lacks a known card"
        for seat, per in self.lengths.items():
            for suit, (lo, hi) in per.items():
                k = suit_length(deal.masks[seat], suit)
                if not lo <= k <= hi:
                    return f"{Seat(seat).name} has {k} {Suit(suit).name}, outside [{lo}, {hi}]"
        for name, fn in self.hooks:
            if not fn(deal):
                return f"hook {name!r} rejects the deal"
        return None

    @classmethod
    def from_json(cls, text: str) -> "DealConstraint":
        """``{"lengths": {"W": {"C": [7, 7]}}, "known": {"N": "AK.-.-.-"},
        "hcp": {"S": [12, 14]}}``."""
        data = json.loads(text) if text.strip() else {}
        unknown = set(data) - {"lengths", "known", "hcp"}
        if unknown:
            raise SamplingError(f"unknown constraint keys {sorted(unknown)}")
        c = cls()
        for seat_txt, per in data.get("lengths", {}).items():
            seat = Seat.parse(seat_txt)
            for suit_txt, (lo, hi) in per.items():
                suit = Suit.parse(suit_txt)
                if suit is None:
                    raise SamplingError("suit-length ranges need a suit, not NT")
                c.lengths.setdefault(int(seat), {})[int(suit)] = (int(lo), int(hi))
        for seat_txt, hand in data.get("known", {}).items():
            c.known[int(Seat.parse(seat_txt))] = parse_hand(hand)
        for seat_txt, (lo, hi) in data.get("hcp", {}).items():
            c.hooks.append(hcp_hook(Seat.parse(seat_txt), lo, hi))
        return c


def hcp_hook(seat: int, lo: int, hi: int) -> Hook:
    seat = int(seat)
    return (f"{Seat(seat).name} hcp {lo}-{hi}", lambda d: lo <= hcp(d.masks[seat]) <= hi)


def _feasible(plan: tuple) -> bool:
    """Whether some integer suit-length table meets the ranges.

    The table of extra cards per (seat, suit) is a transportation problem
    with bounds, whose polytope has integral vertices, so LP feasibility is
    enough.
    """
    import numpy as np
    from scipy.optimize import linprog

    suits, needs = plan
    a_eq, b_eq = [], []
    for seat in range(4):
        row = np.zeros(16)
        row[[seat * 4 + s for s in range(4)]] = 1
        a_eq.append(row)
        b_eq.append(needs[seat])
    for s in range(4):
        row = np.zeros(16)
        row[[seat * 4 + s for seat in range(4)]] = 1
        a_eq.append(row)
        b_eq.append(suits[s][0])
    bounds = []
    for seat in range(4):
        for s in range(4):
            lo, hi = suits[s][1][seat]
            if hi < lo:
                return False
            bounds.append((lo, hi))
    res = linprog(np.zeros(16), A_eq=np.array(a_eq), b_eq=b_eq, bounds=bounds, method="highs")
    return res.status == 0


def sample_deals(constraint: DealConstraint, n: int, seed: int, rng: Optional[random.Random] = None) -> list[Deal]:
    """``n`` deals drawn uniformly from those meeting every constraint.

    Unknown cards are dealt uniformly around the known ones and deals that
    break a length range or a hook are rejected, which keeps the result
    uniform over the constrained set.  Deterministic for a given seed.
    """
    constraint.check()
    rng = rng or random.Random(seed)
    known = [constraint.known.get(seat, 0) for seat in range(4)]
    known_all = known[0] | known[1] | known[2] | known[3]
    free = [c for c in range(52) if (constraint.deck & ~known_all) >> c & 1]
    needs = [constraint.hand_size - m.bit_count() for m in known]
    ranges = [(seat, suit, lo, hi) for seat, per in constraint.lengths.items() for suit, (lo, hi) in per.items()]
    out: list[Deal] = []
    tries = 0
    rejects: dict[str, int] = {}
    budget = max(1000, int(n / max(1e-9, 1 - constraint.max_rejection)))
    while len(out) < n:
        tries += 1
        if tries > budget:
            worst = max(rejects, key=rejects.get) if rejects else "?"
            raise SamplingError(f"rejection rate too high ({tries - 1} tries for {len(out)} deals), mostly {worst}")
        rng.shuffle(free)
        masks = list(known)
        i = 0
        for seat in range(4):
            for c in free[i:i + needs[seat]]:
                masks[seat] |= 1 << c
            i += needs[seat]
        why = None
        for seat, suit, lo, hi in ranges:
            if not lo <= suit_length(masks[seat], suit) <= hi:
                why = f"{Seat(seat).name} {Suit(suit).name} length {lo}-{hi}"
                break
        deal = Deal(tuple(masks))
        if why is None:
            for name, fn in constraint.hooks:
                if not fn(deal):
                    why = f"hook {name!r}"
                    break
        if why:
            rejects[why] = rejects.get(why, 0) + 1
            continue
        out.append(deal)
    return out


# --------------------------------------------------------------------------
# weighted samples


@dataclass
class WeightedSample:
    deals: list
    weights: list[float]

    def __post_init__(self) -> None:
        if len(self.deals) != len(self.weights):
            raise ValueError(f"{len(self.deals)} deals but {len(self.weights)} weights")
        for w in self.weights:
            if not w >= 0:
                raise ValueError(f"negative or missing weight {w!r}")

    @classmethod
    def uniform(cls, deals: Iterable) -> "WeightedSample":
        deals = list(deals)
        return cls(deals, [1.0] * len(deals))

    def __len__(self) -> int:
        return len(self.deals)

    def to_text(self) -> str:
        return "".join(f"{format_deal(d)} {w!r}\n" for d, w in zip(self.deals, self.weights))

    @classmethod
    def from_text(cls, text: str) -> "WeightedSample":
        deals, weights = [], []
        for n, line in enumerate(text.splitlines(), 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) == 4:
                w = 1.0
            elif len(parts) == 5:
                try:
                    w = float(parts[4])
                except ValueError:
                    raise ValueError(f"line {n}: bad weight {parts[4]!r}") from None
            else:
                raise ValueError(f"line {n}: expected four hands and an optional weight")
            deals.append(parse_deal(" ".join(parts[:4])))
            weights.append(w)
        return cls(deals, weights)


def reweigh(sample: WeightedSample, likelihood: Callable[[Any], float]) -> WeightedSample:
    """Bayes update: each weight times the likelihood of its deal."""
    ws = []
    for d, w in zip(sample.deals, sample.weights):
        lk = likelihood(d)
        if lk < 0:
            raise ValueError(f"negative likelihood {lk!r}")
        ws.append(w * lk)
    if not any(ws):
        raise ValueError("every weight is zero after the update: the sample is exhausted")
    return WeightedSample(list(sample.deals), ws)


# --------------------------------------------------------------------------
# card selection


def replay_state(state: PlayState, deal: Deal) -> PlayState:
    """``state`` with the hands of ``deal``, which holds the cards as they
    were when the current trick began."""
    q = PlayState(list(deal.masks), state.trump, state.leader, [], state.ns_tricks, state.ew_tricks, state.target)
    for c in state.trick:
        q = q.play(c)
    return q


def dd_scorer(state: PlayState) -> Callable[[int, Deal], float]:
    """Score of a card = double-dummy tricks for the mover's side after playing it."""
    from .dd import solve_position

    side = state.to_move & 1

    def score(move: int, deal: Deal) -> float:
        q = replay_state(state, deal)
        if not q.legal_mask() >> move & 1:
            raise ValueError("move is not legal in a sampled deal")
        q = q.play(move)
        if q.is_over():
            return q.tricks(side)
        return solve_position(q, side).tricks

    return score


def select_move(
    state: Any,
    sample: WeightedSample,
    moves: Sequence[Any],
    scorer: Optional[Callable[[Any, Any], float]] = None,
) -> tuple[Any, list[tuple[Any, float]]]:
    """The move maximizing the weighted score sum, and the full score table.

    Ties go to the earliest move in ``moves``.
    """
    if not moves:
        raise ValueError("no moves to choose from")
    if not len(sample):
        raise ValueError("empty sample")
    scorer = scorer or dd_scorer(state)
    table = []
    for m in moves:
        table.append((m, math.fsum(w * scorer(m, d) for d, w in zip(sample.deals, sample.weights) if w)))
    best = 0
    for i, (_, v) in enumerate(table):
        if v > table[best][1]:
            best = i
    return table[best][0], table


# --------------------------------------------------------------------------
# bidding

STRAINS = "CDHSN"
PASS = "P"


class BidError(ValueError):
    pass


def parse_call(text: str) -> str:
    """Normalize a call: ``P``, ``X``, ``XX`` or level + strain, e.g. ``3N``."""
    t = text.strip().upper().replace("NT", "N").replace("PASS", "P")
    if t in ("P", "X", "XX"):
        return t
    if len(t) == 2 and t[0] in "1234567" and t[1] in STRAINS:
        return t
    raise BidError(f"bad call {text!r}")


def parse_auction(text: str) -> list[str]:
    return [parse_call(t) for t in text.replace(",", " ").split()]


def _rank(call: str) -> int:
    return (int(call[0]) - 1) * 5 + STRAINS.index(call[1])


def check_auction(auction: Sequence[str]) -> None:
    last = -1
    for c in auction:
        if c in ("P", "X", "XX"):
            continue
        if _rank(c) <= last:
            raise BidError(f"insufficient bid {c}")
        last = _rank(c)


def auction_over(auction: Sequence[str]) -> bool:
    if len(auction) >= 4 and all(c == PASS for c in auction[:4]) and len(auction) == 4:
        return True
    has_bid = any(c not in ("P", "X", "XX") for c in auction)
    return has_bid and len(auction) >= 4 and all(c == PASS for c in auction[-3:])


@dataclass(frozen=True)
class FinalContract:
    level: int
    strain: str  # C D H S N
    declarer: int
    doubled: int = 0  # 0, 1 (X) or 2 (XX)

    @property
    def trump(self) -> Optional[int]:
        return None if self.strain == "N" else "SHDC".index(self.strain)

    def __str__(self) -> str:
        return f"{self.level}{self.strain}{'X' * self.doubled} by {'NESW'[self.declarer]}"


def final_contract(auction: Sequence[str], dealer: int = 0) -> Optional[FinalContract]:
    """The contract reached, or None for a pass-out."""
    last = None
    for i, c in enumerate(auction):
        if c not in ("P", "X", "XX"):
            last = i
    if last is None:
        return None
    call = auction[last]
    side = (dealer + last) & 1
    declarer = next(
        (dealer + i) & 3 for i, c in enumerate(auction)
        if c not in ("P", "X", "XX") and c[1] == call[1] and (dealer + i) & 1 == side
    )
    doubled = 0
    for c in auction[last + 1:]:
        if c == "X":
            doubled = 1
        elif c == "XX":
            doubled = 2
    return FinalContract(int(call[0]), call[1], declarer, doubled)


class BidDatabase:
    """Toy rule table: the first rule whose auction and hand conditions match
    gives the suggested call; anything else passes.

    JSON: ``{"rules": [{"auction": "1N P", "bid": "3N", "min_hcp": 10}, ...]}``
    where ``auction`` is the whole auction so far (empty for the opening).
    """

    def __init__(self, rules: Sequence[dict] = ()) -> None:
        self.rules = []
        for r in rules:
            unknown = set(r) - {"auction", "bid", "min_hcp", "max_hcp", "min_len"}
            if unknown:
                raise BidError(f"unknown rule keys {sorted(unknown)}")
            self.rules.append({**r, "auction": tuple(parse_auction(r.get("auction", ""))), "bid": parse_call(r["bid"])})

    @classmethod
    def from_json(cls, text: str) -> "BidDatabase":
        data = json.loads(text)
        return cls(data.get("rules", []))

    def suggest(self, auction: Sequence[str], hand: int) -> str:
        a = tuple(auction)
        for r in self.rules:
            if r["auction"] != a:
                continue
            if "min_hcp" in r and hcp(hand) < r["min_hcp"]:
                continue
            if "max_hcp" in r and hcp(hand) > r["max_hcp"]:
                continue
            if "min_len" in r:
                suit_txt, k = r["min_len"]
                if suit_length(hand, int(Suit.parse(suit_txt))) < k:
                    continue
            return r["bid"]
        return PASS


def project_auction(auction: Sequence[str], deal: Deal, db: BidDatabase, dealer: int = 0, max_len: int = 40) -> list[str]:
    """Continue ``auction`` with ``db`` for every seat until it ends."""
    a = list(auction)
    while not auction_over(a):
        if len(a) >= max_len:
            raise BidError(f"auction exceeded {max_len} calls: {' '.join(a)}")
        seat = (dealer + len(a)) & 3
        call = db.suggest(a, deal.masks[seat])
        try:
            check_auction(a + [call])
        except BidError:
            call = PASS
        a.append(call)
    return a


def contract_score(contract: Optional[FinalContract], tricks: int, hand_size: int = 13) -> int:
    """Duplicate score for the declaring side, non-vulnerable.

    With fewer than 13 cards per hand the book shrinks to ``hand_size // 2``.
    """
    if contract is None:
        return 0
    book = hand_size // 2
    need = book + contract.level
    mult = 2 ** contract.doubled
    if tricks < need:
        down = need - tricks
        if not contract.doubled:
            return -50 * down
        per = [100, 200, 200] + [300] * 10
        return -sum(per[:down]) * (mult // 2)
    per_trick = 20 if contract.strain in "CD" else 30
    points = (per_trick * contract.level + (10 if contract.strain == "N" else 0)) * mult
    score = points + (300 if points >= 100 else 50)
    if contract.level == 6:
        score += 500
    elif contract.level == 7:
        score += 1000
    over = tricks - need
    if contract.doubled:
        score += 50 * contract.doubled + over * 100 * contract.doubled
    else:
        score += over * per_trick
    return score


def dd_contract_scorer(bidder_side: int) -> Callable[[Optional[FinalContract], Deal], float]:
    """Score for the bidder's side with the contract played double dummy."""
    from .dd import solve_dd

    def score(contract: Optional[FinalContract], deal: Deal) -> float:
        if contract is None:
            return 0.0
        side = contract.declarer & 1
        tricks = solve_dd(deal, contract.trump, (contract.declarer + 1) & 3, side).tricks
        s = contract_score(contract, tricks, deal.hand_size)
        return float(s if side == bidder_side else -s)

    return score


def select_bid(
    auction: Sequence[str],
    hand: int,
    db: BidDatabase,
    sample: WeightedSample,
    scorer: Optional[Callable[[Optional[FinalContract], Deal], float]] = None,
    alternatives: Sequence[str] = (),
    dealer: int = 0,
    max_len: int = 40,
) -> tuple[str, list[tuple[str, float]]]:
    """Borel simulation: for each candidate call, project the auction on each
    sampled deal, score the contract, and pick the best weighted total.

    Candidates are the database's suggestion followed by ``alternatives``
    (duplicates and insufficient bids dropped); ties go to the earlier one.
    """
    if not len(sample):
        raise ValueError("empty sample")
    auction = [parse_call(c) for c in auction]
    check_auction(auction)
    if auction_over(auction):
        raise BidError("the auction is already over")
    bidder = (dealer + len(auction)) & 3
    scorer = scorer or dd_contract_scorer(bidder & 1)
    candidates = []
    for c in [db.suggest(auction, hand)] + [parse_call(a) for a in alternatives]:
        if c in candidates:
            continue
        try:
            check_auction(auction + [c])
        except BidError:
            continue
        candidates.append(c)
    table = []
    for c in candidates:
        total = []
        for d, w in zip(sample.deals, sample.weights):
            if d.masks[bidder] != hand:
                raise ValueError("a sampled deal gives the bidder a different hand")
            full = project_auction(auction + [c], d, db, dealer, max_len)
            total.append(w * scorer(final_contract(full, dealer), d))
        table.append((c, math.fsum(total)))
    best = 0
    for i, (_, v) in enumerate(table):
        if v > table[best][1]:
            best = i
    return table[best][0], table
