import random

import pytest
from hypothesis import given, settings, strategies as st

from tricksearch.cards import (
    Card, Contract, Deal, DealError, PlayState, Seat, Side, Suit, cards_of, format_deal, hcp, legal_moves,
    mask_of, parse_deal, parse_hand, random_deal, suit_length, top_ranks, trick_winner,
)

C = Card.parse

FULL_DEAL = "N:96.QJ85.AQ3.KJT8 E:43.A72.JT62.AQ73 S:AT2.KT6.K9854.95 W:KQJ875.943.7.642"


def state_with(hands: dict, leader: Seat, trick=(), trump=None) -> PlayState:
    masks = [0, 0, 0, 0]
    for seat, cards in hands.items():
        masks[seat] = mask_of(C(c) for c in cards)
    return PlayState(masks, trump, leader, [C(c).index for c in trick])


# -- legal moves ----------------------------------------------------------------


def test_leader_may_play_anything():
    q = state_with({Seat.N: ["SA", "H2"], Seat.E: ["S3", "HK"], Seat.S: ["S4", "H5"], Seat.W: ["S6", "H7"]}, Seat.N)
    assert set(legal_moves(q, Seat.N)) == {C("SA"), C("H2")}


def test_must_follow_suit():
    q = state_with({Seat.N: ["H2"], Seat.E: ["S3", "HK"], Seat.S: ["S4", "H5"], Seat.W: ["S6", "H7"]},
                   Seat.N, trick=["SA"])
    assert legal_moves(q, Seat.E) == [C("S3")]


def test_void_may_discard():
    q = state_with({Seat.N: ["H2"], Seat.E: ["HK", "D2"], Seat.S: ["S4", "H5"], Seat.W: ["S6", "H7"]},
                   Seat.N, trick=["SA"])
    assert set(legal_moves(q, Seat.E)) == {C("HK"), C("D2")}


def test_seat_not_on_play_is_an_error():
    q = state_with({Seat.N: ["SA"], Seat.E: ["S3"], Seat.S: ["S4"], Seat.W: ["S6"]}, Seat.N)
    with pytest.raises(ValueError, match="not on play"):
        legal_moves(q, Seat.S)


# -- trick winner ---------------------------------------------------------------


def test_highest_card_of_suit_led_wins():
    trick = [(Seat.N, C("S5")), (Seat.E, C("SK")), (Seat.S, C("S2")), (Seat.W, C("HA"))]
    assert trick_winner(trick, None) == Seat.E


def test_trump_beats_plain_suit():
    trick = [(Seat.W, C("SA")), (Seat.N, C("SK")), (Seat.E, C("H2")), (Seat.S, C("S3"))]
    assert trick_winner(trick, Suit.HEARTS) == Seat.E


def test_highest_trump_wins():
    trick = [(Seat.N, C("D5")), (Seat.E, C("C2")), (Seat.S, C("C9")), (Seat.W, C("DA"))]
    assert trick_winner(trick, Suit.CLUBS) == Seat.S


@pytest.mark.parametrize("trick", [
    [(Seat.N, Card(Suit.SPADES, 5))] * 4,
    [(Seat.N, Card(Suit.SPADES, 5)), (Seat.E, Card(Suit.SPADES, 6))],
])
def test_malformed_trick(trick):
    with pytest.raises(ValueError):
        trick_winner(trick, None)


def test_play_resolves_trick_and_passes_lead_to_winner():
    q = state_with({Seat.N: ["S5", "H2"], Seat.E: ["SK", "H3"], Seat.S: ["S2", "H4"], Seat.W: ["HA", "H5"]}, Seat.N)
    for c in ["S5", "SK", "S2", "HA"]:
        q = q.play(C(c).index)
    assert q.leader == Seat.E and q.trick == () and q.tricks_won == {Side.NS: 0, Side.EW: 1}


# -- parsing --------------------------------------------------------------------


def test_parse_a_full_deal():
    d = parse_deal(FULL_DEAL)
    assert d.hands[Seat.N] >= {C("S9"), C("S6"), C("HQ")}
    assert d.size == 52 and d.hand_size == 13 and d.deck_ranks == frozenset(range(2, 15))
    assert format_deal(d) == FULL_DEAL


def test_fourteen_card_hand_is_rejected():
    # North with four diamonds would hold fourteen cards
    with pytest.raises(DealError, match="different sizes"):
        parse_deal(FULL_DEAL.replace("AQ3", "AQ32").replace("JT62", "JT6"))


def test_empty_deal():
    d = parse_deal("")
    assert d.size == 0 and d.masks == (0, 0, 0, 0)
    assert parse_deal("N:-.-.-.- E:-.-.-.- S:-.-.-.- W:-.-.-.-") == d


@pytest.mark.parametrize("text, token", [
    ("N:A.-.-.- E:A.-.-.- S:K.-.-.- W:Q.-.-.-", "SA"),
    ("N:A.-.-.- E:K.-.-.- S:Z.-.-.- W:Q.-.-.-", "'Z'"),
    ("N:AA.-.-.- E:K.-.-.- S:J.-.-.- W:Q.-.-.-", "SA"),
])
def test_parse_errors_name_the_token(text, token):
    with pytest.raises(DealError, match=token):
        parse_deal(text)


@pytest.mark.parametrize("text", [
    "N:A.-.-.- E:K.-.-.- S:Q.-.-.-",
    "N:A.-.-.- N:K.-.-.- S:Q.-.-.- W:J.-.-.-",
    "N:A.-.- E:K.-.-.- S:Q.-.-.- W:J.-.-.-",
    "A.-.-.- E:K.-.-.- S:Q.-.-.- W:J.-.-.-",
    "X:A.-.-.- E:K.-.-.- S:Q.-.-.- W:J.-.-.-",
])
def test_malformed_deal_strings(text):
    with pytest.raises(DealError):
        parse_deal(text)


def test_hands_in_any_order_and_ten_spelled_out():
    d = parse_deal("S:Q.-.-.- W:J.-.-.- N:10.-.-.- E:K.-.-.-")
    assert d.hands[Seat.N] == {C("ST")}


def test_card_and_seat_parsing():
    assert C("h10") == Card(Suit.HEARTS, 10) and str(C("dq")) == "DQ"
    assert Seat.parse("west") == Seat.W and Seat.N.next() == Seat.E and Seat.W.side == Side.EW
    assert Suit.parse("NT") is None and Suit.parse("c") == Suit.CLUBS
    with pytest.raises(ValueError):
        Seat.parse("")


def test_contract():
    c = Contract(Seat.S, None, 9)
    assert c.level == 3 and c.leader == Seat.W and str(c) == "3NT by S"
    with pytest.raises(ValueError):
        Contract(Seat.S, None, 6)


def test_hcp_and_lengths():
    m = parse_hand("AKQJ.-.-.A2")
    assert hcp(m) == 14 and suit_length(m, Suit.SPADES) == 4 and suit_length(m, Suit.CLUBS) == 2


# -- properties -----------------------------------------------------------------

deals = st.builds(lambda seed, n: random_deal(random.Random(seed), top_ranks(n)),
                  st.integers(0, 10**9), st.integers(0, 13))


@given(deals)
def test_format_parse_round_trip(d):
    assert parse_deal(format_deal(d)) == d
    assert mask_of(cards_of(d.all_cards)) == d.all_cards


@settings(max_examples=60)
@given(deals, st.integers(0, 10**9), st.sampled_from([None, 0, 1, 2, 3]))
def test_random_playouts_keep_invariants(d, seed, trump):
    rng = random.Random(seed)
    q = PlayState.from_deal(d, trump, rng.randrange(4))
    total = d.hand_size
    while not q.is_over():
        q.validate()
        legal = legal_moves(q, q.to_move)
        assert legal, "a seat holding cards always has a legal move"
        before = q
        q = q.play(rng.choice(legal).index)
        if not q.trick:
            # the trick just closed: its winner leads next
            trick = before.trick_so_far + [(Seat(before.to_move), Card.from_index((before.hands[before.to_move] ^ q.hands[before.to_move]).bit_length() - 1))]
            assert q.leader == trick_winner(trick, None if trump is None else Suit(trump))
    assert q.ns_tricks + q.ew_tricks == total
