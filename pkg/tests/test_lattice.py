import itertools
import random

import pytest
from hypothesis import given, settings, strategies as st

from oracles import all_families, maximal_sets

from tricksearch.game import ScalarAlgebra
from tricksearch.lattice import (
    DISTRIBUTIVE_LAWS, LATTICE_LAWS, Antichain, AntichainAlgebra, ClosureLattice, SetAlgebra, SituationSet,
    UniverseMismatch, all_antichains, antichain_join, antichain_leq, antichain_meet, card_suit_lattice,
    four_atom_lattice, law_suite, random_antichain, reduce,
)

S, T = SituationSet.of([0], 2), SituationSet.of([1], 2)


def fam(A: Antichain) -> set:
    return {frozenset(m) for m in A.members}


# -- reduce -----------------------------------------------------------------------


def test_reduce_drops_subsumed_sets():
    s, st_ = SituationSet.of([0], 2), SituationSet.of([0, 1], 2)
    assert fam(reduce([s, st_])) == {frozenset({0, 1})}


def test_reduce_of_nothing():
    assert reduce([]).sets == () and len(reduce([], 3)) == 0


def test_reduce_of_the_redundant_root_family():
    assert fam(reduce([S, T, S | T])) == {frozenset({0, 1})}


def test_reduce_rejects_mixed_universes():
    with pytest.raises(UniverseMismatch):
        reduce([SituationSet.of([0], 2), SituationSet.of([0], 3)])
    with pytest.raises(ValueError):
        reduce([3])


def test_situation_set_bounds():
    with pytest.raises(ValueError):
        SituationSet.of([2], 2)
    with pytest.raises(ValueError):
        SituationSet(8, 3)
    with pytest.raises(UniverseMismatch):
        SituationSet.of([0], 2) | SituationSet.of([0], 3)
    assert list(SituationSet.of([3, 0], 5)) == [0, 3] and repr(SituationSet.of([1], 2)) == "{1}"


# -- join and meet ----------------------------------------------------------------


def test_join_of_incomparable_singletons():
    assert fam(antichain_join(reduce([S]), reduce([T]))) == {frozenset({0}), frozenset({1})}


def test_meet_of_singletons_is_their_intersection():
    a = reduce([SituationSet.of([0, 1], 3)])
    b = reduce([SituationSet.of([1, 2], 3)])
    assert fam(antichain_meet(a, b)) == {frozenset({1})}


def test_identities():
    F = Antichain.of([{0}, {1, 2}], 3)
    alg = AntichainAlgebra(3)
    assert antichain_join(F, F) == F and antichain_meet(F, F) == F
    assert antichain_join(F, alg.bottom) == F and antichain_meet(F, alg.top) == F
    assert antichain_meet(F, alg.bottom) == alg.bottom and antichain_join(F, alg.top) == alg.top


def test_universe_mismatch():
    with pytest.raises(UniverseMismatch):
        antichain_join(Antichain((), 2), Antichain((), 3))
    with pytest.raises(UniverseMismatch):
        antichain_meet(Antichain((), 2), Antichain((), 3))


def test_members_must_fit_the_universe():
    with pytest.raises(ValueError):
        Antichain([8], 3)


def test_canonical_member_order():
    F = Antichain([0b110, 0b001], 3)
    assert F.sets == (0b001, 0b110) and F == Antichain([0b001, 0b110, 0b100], 3)
    assert hash(F) == hash(Antichain([0b110, 0b001], 3))


def _subsets(n):
    return [frozenset(c) for r in range(n + 1) for c in itertools.combinations(range(n), r)]


def test_meet_of_two_by_one_against_brute_force():
    # {S, T} and {U} for every choice of S, T, U over four situations
    subs = _subsets(4)
    for s, t, u in itertools.product(subs, repeat=3):
        got = antichain_meet(Antichain.of([s, t], 4), Antichain.of([u], 4))
        assert fam(got) == set(maximal_sets({s & u, t & u}))


def test_join_meet_against_brute_force_over_three_situations():
    fams = [f for f in all_families(3) if len(f) <= 3]
    rng = random.Random(0)
    for _ in range(3000):
        a, b = rng.choice(fams), rng.choice(fams)
        A, B = Antichain.of(a, 3), Antichain.of(b, 3)
        assert fam(antichain_join(A, B)) == set(maximal_sets(maximal_sets(a) | maximal_sets(b)))
        assert fam(antichain_meet(A, B)) == set(maximal_sets(frozenset(x & y for x in a for y in b)))


def test_all_antichains_counts():
    # Dedekind numbers count the antichains of subsets of an n-set
    assert [len(all_antichains(n)) for n in range(4)] == [2, 3, 6, 20]
    with pytest.raises(ValueError):
        all_antichains(5)


# -- law suite -----------------------------------------------------------------


def test_antichain_laws_hold_exhaustively_over_three_situations():
    rep = law_suite(AntichainAlgebra(3), all_antichains(3))
    assert rep.is_distributive and not rep.violations and rep.checked == 8000


def test_scalar_and_set_algebras_are_distributive():
    assert law_suite(ScalarAlgebra(0, 1), [0, 0.25, 0.5, 1]).is_distributive
    assert law_suite(SetAlgebra(3), list(range(8))).is_distributive


def test_one_card_lattice_is_a_lattice_but_not_distributive():
    L = card_suit_lattice()
    rep = law_suite(L, list(L))
    assert rep.is_lattice and all(rep.holds(l) for l in LATTICE_LAWS)
    assert not rep.is_distributive and any(not rep.holds(l) for l in DISTRIBUTIVE_LAWS)
    assert L.join("H", "C") == "1" and L.join("C", "D") == "CD"
    for a, b in itertools.permutations("CDHS", 2):
        assert L.meet(a, b) == "0"
    # the value pushed past the maximizer's node is lost
    assert L.join("H", L.meet("C", "0")) == "H"
    assert L.join(L.meet("H", "C"), L.meet("H", "0")) == "0"
    assert any("FAILS" in line for line in rep.lines())


def test_four_atom_lattice_is_not_distributive():
    rep = law_suite(four_atom_lattice(), list(four_atom_lattice()))
    assert rep.is_lattice and not rep.is_distributive


def test_closure_lattice_validation():
    with pytest.raises(ValueError):
        ClosureLattice({"a": "x", "b": "x"})
    with pytest.raises(ValueError):
        ClosureLattice({"0": "", "a": "a", "b": "b"})  # no top
    with pytest.raises(ValueError):
        law_suite(SetAlgebra(2), [])


def test_law_suite_reports_a_broken_operation():
    class Broken:
        join = staticmethod(max)
        meet = staticmethod(lambda a, b: a)  # not commutative

    rep = law_suite(Broken, [0, 1])
    assert not rep.holds("meet commutative") and not rep.is_lattice


# -- properties ----------------------------------------------------------------

masks = st.lists(st.integers(0, 2**6 - 1), max_size=6)


@given(masks, st.randoms())
def test_reduce_is_idempotent_and_order_insensitive(bits, rnd):
    F = Antichain(bits, 6)
    shuffled = list(bits)
    rnd.shuffle(shuffled)
    assert Antichain(shuffled, 6) == F
    assert Antichain(F.sets, 6) == F
    assert {frozenset(m) for m in F.members} == set(maximal_sets(frozenset(SituationSet(b, 6)) for b in bits))
    for a, b in itertools.combinations(F.sets, 2):
        assert a & ~b and b & ~a


@given(masks, masks)
def test_order_agrees_with_join_and_meet(a, b):
    F, G = Antichain(a, 6), Antichain(b, 6)
    assert antichain_leq(F, G) == (antichain_join(F, G) == G) == (antichain_meet(F, G) == F)


@settings(max_examples=50)
@given(st.integers(0, 10**9))
def test_random_triples_over_ten_situations(seed):
    rng = random.Random(seed)
    triples = [tuple(random_antichain(rng, 10, 5) for _ in range(3)) for _ in range(40)]
    assert law_suite(AntichainAlgebra(10), triples=triples).is_distributive
