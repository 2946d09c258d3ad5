"""Value algebras for game search.

* :class:`SituationSet` - a subset of an enumerated universe of hidden-card
  layouts, stored as a bit vector.
* :class:`Antichain` - a reduced family of situation sets (no member contains
  another), the value of an imperfect-information position.  With
  :func:`antichain_join` (reduced union) and :func:`antichain_meet` (reduced
  pairwise intersections) these form a distributive lattice.
* :class:`SetAlgebra` - plain subsets under union and intersection, the
  value of a perfect-information view.
* :class:`ClosureLattice` - small explicit lattices given by a family of
  closed sets, used for non-distributive examples.
* :func:`law_suite` - checks the lattice and distributivity laws.
"""
from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from typing import Any, Callable, Iterable, Iterator, Optional, Sequence


class UniverseMismatch(ValueError):
    pass


@dataclass(frozen=True)
class SituationSet:
    """A subset of situations ``0..n-1``."""

    bits: int
    n: int

    def __post_init__(self) -> None:
        if self.bits < 0 or self.bits >> self.n:
            raise ValueError(f"bits {self.bits:#x} outside a universe of {self.n}")

    @classmethod
    def of(cls, ids: Iterable[int], n: int) -> "SituationSet":
        b = 0
        for i in ids:
            if not 0 <= i < n:
                raise ValueError(f"situation {i} outside a universe of {n}")
            b |= 1 << i
        return cls(b, n)

    @classmethod
    def full(cls, n: int) -> "SituationSet":
        return cls((1 << n) - 1, n)

    @classmethod
    def empty(cls, n: int) -> "SituationSet":
        return cls(0, n)

    def _other(self, o: "SituationSet") -> int:
        if o.n != self.n:
            raise UniverseMismatch(f"universes of size {self.n} and {o.n}")
        return o.bits

    def __or__(self, o: "SituationSet") -> "SituationSet":
        return SituationSet(self.bits | self._other(o), self.n)

    def __and__(self, o: "SituationSet") -> "SituationSet":
        return SituationSet(self.bits & self._other(o), self.n)

    def __sub__(self, o: "SituationSet") -> "SituationSet":
        return SituationSet(self.bits & ~self._other(o), self.n)

    def __le__(self, o: "SituationSet") -> bool:
        return self.bits & ~self._other(o) == 0

    def __lt__(self, o: "SituationSet") -> bool:
        return self <= o and self.bits != o.bits

    def __contains__(self, i: int) -> bool:
        return bool(self.bits >> i & 1)

    def __iter__(self) -> Iterator[int]:
        b = self.bits
        while b:
            low = b & -b
            yield low.bit_length() - 1
            b ^= low

    def __len__(self) -> int:
        return self.bits.bit_count()

    def __repr__(self) -> str:
        return "{" + ",".join(map(str, self)) + "}"


def _reduce_bits(family: Iterable[int]) -> tuple[int, ...]:
    kept: list[int] = []
    for a in sorted(set(family), key=lambda b: -b.bit_count()):
        if not any(a & ~k == 0 for k in kept):
            kept.append(a)
    kept.sort(key=lambda b: (b.bit_count(), b))
    return tuple(kept)


class Antichain:
    """A reduced family of subsets of ``0..n-1`` (members stored as bit masks).

    Members are kept sorted by (size, bits) so equal antichains compare and
    hash equal.
    """

    __slots__ = ("n", "sets", "_hash")

    def __init__(self, sets: Iterable[int], n: int, *, reduced: bool = False) -> None:
        self.n = n
        full = (1 << n) - 1
        sets = list(sets)
        for b in sets:
            if b & ~full or b < 0:
                raise ValueError(f"set {b:#x} outside a universe of {n}")
        self.sets = tuple(sets) if reduced else _reduce_bits(sets)
        self._hash = hash((n, self.sets))

    @classmethod
    def of(cls, families: Iterable[Iterable[int]], n: int) -> "Antichain":
        """Build from situation-id collections, e.g. ``Antichain.of([{0}, {1, 2}], 3)``."""
        return cls([SituationSet.of(f, n).bits for f in families], n)

    @property
    def members(self) -> list[SituationSet]:
        return [SituationSet(b, self.n) for b in self.sets]

    def as_frozensets(self) -> frozenset:
        return frozenset(frozenset(SituationSet(b, self.n)) for b in self.sets)

    def covers(self, bits: int) -> bool:
        """True when ``bits`` is a subset of some member."""
        return any(bits & ~m == 0 for m in self.sets)

    def __eq__(self, o: object) -> bool:
        return isinstance(o, Antichain) and self.n == o.n and self.sets == o.sets

    def __hash__(self) -> int:
        return self._hash

    def __len__(self) -> int:
        return len(self.sets)

    def __repr__(self) -> str:
        return "{" + ", ".join(repr(SituationSet(b, self.n)) for b in self.sets) + "}"


def reduce(family: Iterable, n: Optional[int] = None) -> Antichain:
    """The unique antichain of subset-maximal members of ``family``.

    Members may be :class:`SituationSet` objects or bit masks (then ``n`` is
    required).
    """
    bits = []
    for f in family:
        if isinstance(f, SituationSet):
            if n is None:
                n = f.n
            elif f.n != n:
                raise UniverseMismatch(f"universes of size {n} and {f.n}")
            bits.append(f.bits)
        else:
            bits.append(int(f))
    if n is None:
        if bits:
            raise ValueError("universe size needed for bit-mask members")
        n = 0
    return Antichain(bits, n)


def _same_universe(F: Antichain, G: Antichain) -> None:
    if F.n != G.n:
        raise UniverseMismatch(f"antichains over universes of size {F.n} and {G.n}")


def antichain_join(F: Antichain, G: Antichain) -> Antichain:
    """Reduced union: the maximizer may play for anything either side offers."""
    _same_universe(F, G)
    if not F.sets:
        return G
    if not G.sets:
        return F
    return Antichain(F.sets + G.sets, F.n)


def antichain_meet(F: Antichain, G: Antichain) -> Antichain:
    """Reduced pairwise intersections."""
    _same_universe(F, G)
    return Antichain([a & b for a in F.sets for b in G.sets], F.n)


def antichain_leq(F: Antichain, G: Antichain) -> bool:
    """``F <= G``: every member of ``F`` lies inside a member of ``G``."""
    _same_universe(F, G)
    return all(G.covers(a) for a in F.sets)


class AntichainAlgebra:
    """The antichain lattice over a universe of ``n`` situations."""

    def __init__(self, n: int) -> None:
        self.n = n
        self.bottom = Antichain((), n)
        self.top = Antichain(((1 << n) - 1,), n)

    join = staticmethod(antichain_join)
    meet = staticmethod(antichain_meet)
    leq = staticmethod(antichain_leq)

    def singleton(self, ids: Iterable[int]) -> Antichain:
        return Antichain.of([ids], self.n)


class SetAlgebra:
    """Subsets of ``0..n-1`` as bit masks under union and intersection."""

    def __init__(self, n: int) -> None:
        self.n = n
        self.bottom = 0
        self.top = (1 << n) - 1

    @staticmethod
    def join(a: int, b: int) -> int:
        return a | b

    @staticmethod
    def meet(a: int, b: int) -> int:
        return a & b

    @staticmethod
    def leq(a: int, b: int) -> bool:
        return a & ~b == 0


class ClosureLattice:
    """Lattice of named closed sets: join is the smallest closed superset of the
    union, meet the largest closed subset of the intersection."""

    def __init__(self, elements: dict[str, Iterable[Any]]) -> None:
        self.elements = {k: frozenset(v) for k, v in elements.items()}
        self._by_set = {v: k for k, v in self.elements.items()}
        if len(self._by_set) != len(self.elements):
            raise ValueError("two names for the same closed set")
        sizes = sorted(self.elements, key=lambda k: len(self.elements[k]))
        self.bottom = sizes[0]
        self.top = sizes[-1]
        for k, v in self.elements.items():
            if not self.elements[self.bottom] <= v <= self.elements[self.top]:
                raise ValueError("no least or greatest element")
        for a, b in itertools.combinations(self.elements, 2):
            # both operations must be well defined
            self.join(a, b)
            self.meet(a, b)

    def join(self, a: str, b: str) -> str:
        u = self.elements[a] | self.elements[b]
        ups = [k for k, v in self.elements.items() if u <= v]
        least = [k for k in ups if all(self.elements[k] <= self.elements[j] for j in ups)]
        if len(least) != 1:
            raise ValueError(f"no least upper bound for {a}, {b}")
        return least[0]

    def meet(self, a: str, b: str) -> str:
        i = self.elements[a] & self.elements[b]
        downs = [k for k, v in self.elements.items() if v <= i]
        greatest = [k for k in downs if all(self.elements[j] <= self.elements[k] for j in downs)]
        if len(greatest) != 1:
            raise ValueError(f"no greatest lower bound for {a}, {b}")
        return greatest[0]

    def leq(self, a: str, b: str) -> bool:
        return self.join(a, b) == b

    def __iter__(self) -> Iterator[str]:
        return iter(self.elements)


def card_suit_lattice() -> ClosureLattice:
    """Values of the one-card game where hearts and clubs join to everything.

    An element is the set of suits for which the maximizer wins.  Besides the
    single suits, only "club or diamond" and "anything" are closed.
    """
    return ClosureLattice({
        "0": "", "C": "c", "D": "d", "H": "h", "S": "s", "CD": "cd", "1": "cdhs",
    })


def four_atom_lattice() -> ClosureLattice:
    """Bottom, four incomparable suits, top; any two distinct suits join to top."""
    return ClosureLattice({"0": "", "C": "c", "D": "d", "H": "h", "S": "s", "1": "cdhs"})


# --------------------------------------------------------------------------
# law checking

LAWS = (
    "join idempotent",
    "meet idempotent",
    "join commutative",
    "meet commutative",
    "join associative",
    "meet associative",
    "absorption x|(x&y)=x",
    "absorption x&(x|y)=x",
    "distributive x|(y&z)=(x|y)&(x|z)",
    "distributive x&(y|z)=(x&y)|(x&z)",
)

LATTICE_LAWS = LAWS[:8]
DISTRIBUTIVE_LAWS = LAWS[8:]


@dataclass
class LawReport:
    checked: int = 0
    violations: dict[str, tuple] = field(default_factory=dict)

    def holds(self, law: str) -> bool:
        return law not in self.violations

    @property
    def is_lattice(self) -> bool:
        return all(self.holds(l) for l in LATTICE_LAWS)

    @property
    def is_distributive(self) -> bool:
        return self.is_lattice and all(self.holds(l) for l in DISTRIBUTIVE_LAWS)

    def lines(self) -> list[str]:
        out = []
        for law in LAWS:
            w = self.violations.get(law)
            out.append(f"{law}: " + ("ok" if w is None else f"FAILS at {w}"))
        return out


def law_suite(ops: Any, sample: Optional[Sequence[Any]] = None, triples: Optional[Iterable[tuple]] = None) -> LawReport:
    """Check the lattice laws on every triple drawn from ``sample`` (or on the
    given ``triples``).  The first violation of each law is kept as witness."""
    if triples is None:
        if not sample:
            raise ValueError("sample must be nonempty")
        triples = itertools.product(sample, repeat=3)
    j, m = ops.join, ops.meet
    rep = LawReport()
    bad = rep.violations

    def check(law: str, ok: bool, witness: tuple) -> None:
        if not ok and law not in bad:
            bad[law] = witness

    for x, y, z in triples:
        rep.checked += 1
        check(LAWS[0], j(x, x) == x, (x,))
        check(LAWS[1], m(x, x) == x, (x,))
        check(LAWS[2], j(x, y) == j(y, x), (x, y))
        check(LAWS[3], m(x, y) == m(y, x), (x, y))
        check(LAWS[4], j(j(x, y), z) == j(x, j(y, z)), (x, y, z))
        check(LAWS[5], m(m(x, y), z) == m(x, m(y, z)), (x, y, z))
        check(LAWS[6], j(x, m(x, y)) == x, (x, y))
        check(LAWS[7], m(x, j(x, y)) == x, (x, y))
        check(LAWS[8], j(x, m(y, z)) == m(j(x, y), j(x, z)), (x, y, z))
        check(LAWS[9], m(x, j(y, z)) == j(m(x, y), m(x, z)), (x, y, z))
    return rep


def all_antichains(n: int) -> list[Antichain]:
    """Every antichain over a universe of ``n`` (feasible for n <= 4)."""
    if n > 4:
        raise ValueError("too many antichains to enumerate")
    subsets = list(range(1 << n))
    out = set()
    for k in range(len(subsets) + 1):
        for fam in itertools.combinations(subsets, k):
            if all(a & ~b and b & ~a for a, b in itertools.combinations(fam, 2)):
                out.add(Antichain(fam, n, reduced=False))
        if k > 6:
            break
    return sorted(out, key=lambda F: (len(F), F.sets))


def random_antichain(rng: random.Random, n: int, max_members: int = 4) -> Antichain:
    k = rng.randint(0, max_members)
    return Antichain([rng.getrandbits(n) for _ in range(k)], n)
