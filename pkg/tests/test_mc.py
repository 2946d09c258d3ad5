import random

import pytest
from scipy.stats import chisquare

from tricksearch.cards import Card, Deal, PlayState, Seat, Suit, hcp, parse_deal, parse_hand, suit_length, top_ranks
from tricksearch.dd import solve_dd
from tricksearch.mc import (
    BidDatabase, BidError, DealConstraint, FinalContract, SamplingError, WeightedSample, auction_over,
    contract_score, final_contract, hcp_hook, parse_auction, parse_call, project_auction, reweigh,
    sample_deals, select_bid, select_move,
)

FULL_DEAL = "N:96.QJ85.AQ3.KJT8 E:43.A72.JT62.AQ73 S:AT2.KT6.K9854.95 W:KQJ875.943.7.642"


def deck_of(ranks) -> int:
    m = 0
    for s in range(4):
        for r in ranks:
            m |= 1 << Card(Suit(s), r).index
    return m


# -- sampling -------------------------------------------------------------------


def test_unconstrained_sampling_is_uniform_per_card():
    n = 10_000
    deals = sample_deals(DealConstraint(), n, seed=11)
    for c in (0, 17, 38, 51):
        counts = [sum(d.masks[s] >> c & 1 for d in deals) for s in range(4)]
        assert sum(counts) == n
        assert chisquare(counts).pvalue > 1e-3


def test_sampling_is_deterministic():
    a = sample_deals(DealConstraint(), 5, seed=3)
    assert a == sample_deals(DealConstraint(), 5, seed=3) and a != sample_deals(DealConstraint(), 5, seed=4)


def test_fully_pinned_deal_comes_back_every_time():
    d = parse_deal(FULL_DEAL)
    c = DealConstraint(known={s: d.masks[s] for s in range(4)})
    assert sample_deals(c, 7, seed=1) == [d] * 7


def test_length_range_is_respected():
    c = DealConstraint.from_json('{"lengths": {"W": {"C": [7, 7]}}, "known": {"N": "AK.-.-.-"}}')
    for d in sample_deals(c, 200, seed=2):
        assert suit_length(d.masks[Seat.W], Suit.CLUBS) == 7
        assert d.masks[Seat.N] & parse_hand("AK.-.-.-") == parse_hand("AK.-.-.-")


def test_hcp_hook():
    c = DealConstraint(hooks=[hcp_hook(Seat.S, 15, 17)])
    assert all(15 <= hcp(d.masks[Seat.S]) <= 17 for d in sample_deals(c, 50, seed=5))


@pytest.mark.parametrize("text, msg", [
    ('{"lengths": {"W": {"C": [9, 7]}}}', "empty range"),
    ('{"lengths": {"W": {"C": [14, 14]}}}', "add up|cannot hold"),
    ('{"lengths": {"W": {"C": [7, 7]}, "E": {"C": [7, 7]}}}', "cannot hold"),
    # North and South between them must hold every minor card, yet West wants a club
    ('{"lengths": {"N": {"S": [0, 0], "H": [0, 0]}, "S": {"S": [0, 0], "H": [0, 0]}, "W": {"C": [1, 13]}}}',
     "no deal satisfies"),
    ('{"known": {"N": "A.-.-.-", "S": "A.-.-.-"}}', "two hands"),
    ('{"colour": 1}', "unknown"),
])
def test_infeasible_constraints_are_reported(text, msg):
    with pytest.raises(SamplingError, match=msg):
        sample_deals(DealConstraint.from_json(text), 1, seed=0)


def test_rejection_budget():
    c = DealConstraint(hooks=[("never", lambda d: False)])
    with pytest.raises(SamplingError, match="rejection"):
        sample_deals(c, 1, seed=0)


def test_reduced_deck():
    c = DealConstraint(deck=deck_of(top_ranks(3)))
    for d in sample_deals(c, 20, seed=8):
        assert d.hand_size == 3 and d.all_cards == c.deck


# -- weights ----------------------------------------------------------------------


def test_reweigh_multiplies_by_the_likelihood():
    deals = sample_deals(DealConstraint(), 4, seed=1)
    s = WeightedSample.uniform(deals)
    marked = deals[0]
    r = reweigh(s, lambda d: 1.0 if d == marked else 0.2)
    assert r.weights == [1.0, 0.2, 0.2, 0.2]
    r2 = reweigh(r, lambda d: 0.5)
    assert r2.weights == pytest.approx([0.5, 0.1, 0.1, 0.1])
    with pytest.raises(ValueError, match="exhausted"):
        reweigh(s, lambda d: 0.0)
    with pytest.raises(ValueError):
        reweigh(s, lambda d: -1.0)


def test_weighted_sample_text_round_trip():
    s = WeightedSample(sample_deals(DealConstraint(), 3, seed=9), [1.0, 0.25, 3.0])
    assert WeightedSample.from_text(s.to_text()) == s
    assert WeightedSample.from_text(FULL_DEAL + "\n# comment\n").weights == [1.0]
    with pytest.raises(ValueError):
        WeightedSample.from_text(FULL_DEAL + " heavy\n")
    with pytest.raises(ValueError):
        WeightedSample([1], [])
    with pytest.raises(ValueError):
        WeightedSample([1], [-1.0])


# -- card choice ------------------------------------------------------------------


def test_select_move_is_scale_invariant_and_prefers_earlier_ties():
    scores = {("a", 0): 1, ("a", 1): 0, ("b", 0): 0, ("b", 1): 2, ("c", 0): 0, ("c", 1): 0}
    scorer = lambda m, d: scores[(m, d)]  # noqa: E731
    s = WeightedSample([0, 1], [3.0, 1.0])
    best, table = select_move(None, s, ["a", "b", "c"], scorer)
    assert best == "a" and dict(table) == {"a": 3.0, "b": 2.0, "c": 0.0}
    scaled = WeightedSample([0, 1], [30.0, 10.0])
    assert select_move(None, scaled, ["a", "b", "c"], scorer)[0] == "a"
    tied = WeightedSample([0, 1], [2.0, 1.0])
    assert select_move(None, tied, ["b", "a"], scorer)[0] == "b"
    with pytest.raises(ValueError):
        select_move(None, s, [], scorer)
    with pytest.raises(ValueError):
        select_move(None, WeightedSample([], []), ["a"], scorer)


def test_select_move_on_a_single_known_deal_plays_double_dummy():
    deal = parse_deal("N:AK.-.-.- E:-.-.-.AK S:-.AK.-.- W:-.-.AK.-")
    state = PlayState.from_deal(deal, 3, 1)  # clubs trumps, East leads
    moves = [Card.parse("CA").index, Card.parse("CK").index]
    best, table = select_move(state, WeightedSample.uniform([deal]), moves)
    assert dict(table) == {moves[0]: 2.0, moves[1]: 2.0} and best == moves[0]


# -- bidding -----------------------------------------------------------------------


def test_calls_and_auctions():
    assert parse_auction("1nt pass 3N, P P p") == ["1N", "P", "3N", "P", "P", "P"]
    with pytest.raises(BidError):
        parse_call("8S")
    assert auction_over(["P"] * 4) and not auction_over(["1N", "P", "P"])
    assert final_contract(["P"] * 4) is None
    c = final_contract(parse_auction("1S P 2S P 4S X P P P"), dealer=0)
    assert c == FinalContract(4, "S", 0, 1) and str(c) == "4SX by N"


def test_scores():
    assert contract_score(FinalContract(4, "S", 0), 10) == 420
    assert contract_score(FinalContract(3, "N", 0), 9) == 400
    assert contract_score(FinalContract(2, "H", 0), 9) == 140
    assert contract_score(FinalContract(4, "S", 0), 8) == -100
    assert contract_score(FinalContract(4, "S", 0, 1), 7) == -500
    assert contract_score(None, 0) == 0
    # with three cards a hand the book is one trick
    assert contract_score(FinalContract(1, "N", 0), 2, hand_size=3) == 90


def test_always_pass_database_scores_zero():
    deals = sample_deals(DealConstraint(deck=deck_of(top_ranks(3))), 4, seed=3)
    hand = deals[0].masks[0]
    sample = WeightedSample.uniform([d for d in deals if d.masks[0] == hand])
    call, table = select_bid([], hand, BidDatabase(), sample)
    assert call == "P" and table == [("P", 0.0)]


def test_bid_choice_follows_double_dummy_tricks():
    # three-card hands: North-South hold every spade honour, so spades make two
    deal = parse_deal("N:AK.2.-.- E:-.AK.2.- S:Q.-.-.AK W:-.-.AK.2")
    assert solve_dd(deal, 0, 1, 0).tricks >= 2
    assert solve_dd(deal, None, 1, 0).tricks < 2
    sample = WeightedSample.uniform([deal])
    call, table = select_bid([], deal.masks[0], BidDatabase(), sample, alternatives=["1S", "1N"])
    scores = dict(table)
    assert scores["P"] == 0.0 and scores["1S"] > 0 > scores["1N"] and call == "1S"


def test_projection_limit_and_bad_rules():
    db = BidDatabase([{"auction": "", "bid": "1C"}])
    deal = parse_deal("N:A.-.-.- E:-.A.-.- S:-.-.A.- W:-.-.-.A")
    assert project_auction([], deal, db) == ["1C", "P", "P", "P"]
    with pytest.raises(BidError, match="exceeded"):
        project_auction(["1C"], deal, db, max_len=2)
    with pytest.raises(BidError):
        BidDatabase([{"bid": "1C", "colour": "red"}])
    with pytest.raises(BidError):
        select_bid(["P"] * 4, deal.masks[0], db, WeightedSample.uniform([deal]))


def test_sample_hand_mismatch():
    deal = parse_deal("N:A.-.-.- E:-.A.-.- S:-.-.A.- W:-.-.-.A")
    with pytest.raises(ValueError):
        select_bid([], deal.masks[1], BidDatabase(), WeightedSample.uniform([deal]))
    with pytest.raises(ValueError):
        select_bid([], deal.masks[0], BidDatabase(), WeightedSample([], []))


def test_database_rules():
    db = BidDatabase.from_json('{"rules": [{"auction": "", "bid": "1N", "min_hcp": 15, "max_hcp": 17},'
                               ' {"auction": "", "bid": "1S", "min_len": ["S", 5]}]}')
    assert db.suggest([], parse_hand("AKQ.K32.A32.5432")) == "1N"
    assert db.suggest([], parse_hand("AK432.2.5432.32")) == "1S"
    assert db.suggest(["P"], parse_hand("AK432.2.5432.32")) == "P"
    assert isinstance(Deal((0, 0, 0, 0)), Deal)
