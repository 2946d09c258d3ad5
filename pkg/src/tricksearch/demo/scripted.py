"""Games written down as data.

Perfect-information format, one node per line (``#`` starts a comment)::

    id  MAX|MIN|value  child-ids...

The first node is the root.  Values are parsed by the algebra's ``parse``
function when it has one, else as numbers or lattice element names.

Imperfect-information format: a ``situations`` header naming the
situations, an optional ``weights`` line, then nodes.  Minimizer edges may
carry ``child@s1,s2`` to say in which situations the move exists (no ``@``:
all of them).  Leaves are ``WIN``, ``LOSE`` or ``{s1,s2}`` (won exactly in
those situations)::

    situations s t
    root  MAX  a b
    a     MIN  win@s lose@t
    ...
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from importlib import resources
from typing import Any, Callable, Optional, Sequence

from ..game import MAX, MIN, Game, GameError, ScalarAlgebra
from ..lattice import ClosureLattice, card_suit_lattice
from ..sd import ImperfectGame


class ScriptError(ValueError):
    pass


def fixture_text(name: str) -> str:
    """Contents of a packaged fixture file."""
    return resources.files("tricksearch.demo").joinpath("fixtures", name).read_text()


def _lines(text: str):
    for n, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield n, line.split()


def _check_acyclic(root: str, children: dict[str, list[str]]) -> None:
    state: dict[str, int] = {}

    def visit(u: str) -> None:
        state[u] = 1
        for v in children.get(u, ()):
            s = state.get(v)
            if s == 1:
                raise ScriptError(f"cycle through node {v!r}")
            if s is None:
                visit(v)
        state[u] = 2

    visit(root)


@dataclass
class Node:
    kind: str  # "MAX", "MIN" or "VAL"
    children: list
    value: Any = None


def _default_parser(algebra: Any) -> Callable[[str], Any]:
    if hasattr(algebra, "parse"):
        return algebra.parse
    if isinstance(algebra, ClosureLattice):
        def name(tok: str) -> str:
            if tok not in algebra.elements:
                raise ScriptError(f"unknown lattice element {tok!r}")
            return tok
        return name

    def number(tok: str) -> Any:
        v = float(tok)
        return int(v) if v.is_integer() else v
    return number


class ScriptedGame(Game):
    """A perfect-information game tree given as an explicit node table."""

    def __init__(self, nodes: dict[str, Node], root: str, algebra: Any) -> None:
        self.nodes = nodes
        self.root = root
        self.algebra = algebra
        for nid, nd in nodes.items():
            for c in nd.children:
                if c not in nodes:
                    raise ScriptError(f"node {nid!r} has undefined child {c!r}")
            if nd.kind != "VAL" and not nd.children:
                raise ScriptError(f"inner node {nid!r} has no children")
        _check_acyclic(root, {k: v.children for k, v in nodes.items()})

    @classmethod
    def parse(cls, text: str, algebra: Any = None, value: Optional[Callable[[str], Any]] = None) -> "ScriptedGame":
        algebra = algebra if algebra is not None else ScalarAlgebra()
        value = value or _default_parser(algebra)
        nodes: dict[str, Node] = {}
        root = None
        for n, toks in _lines(text):
            if len(toks) < 2:
                raise ScriptError(f"line {n}: expected 'id MAX|MIN|value children...'")
            nid, kind, rest = toks[0], toks[1], toks[2:]
            if nid in nodes:
                raise ScriptError(f"line {n}: node {nid!r} defined twice")
            if kind in ("MAX", "MIN"):
                nodes[nid] = Node(kind, rest)
            else:
                if rest:
                    raise ScriptError(f"line {n}: valued node {nid!r} cannot have children")
                try:
                    nodes[nid] = Node("VAL", [], value(kind))
                except (ValueError, KeyError) as e:
                    raise ScriptError(f"line {n}: bad value {kind!r}: {e}") from None
            root = root or nid
        if root is None:
            raise ScriptError("no nodes")
        return cls(nodes, root, algebra)

    def format(self, value: Callable[[Any], str] = str) -> str:
        out = []
        for nid, nd in self.nodes.items():
            head = nd.kind if nd.kind != "VAL" else value(nd.value)
            out.append(" ".join([nid, head] + list(nd.children)))
        return "\n".join(out) + "\n"

    def initial(self) -> str:
        return self.root

    def evaluate(self, p: str) -> Any:
        nd = self.nodes[p]
        if nd.kind == "MAX":
            return MAX
        if nd.kind == "MIN":
            return MIN
        return nd.value

    def successors(self, p: str) -> list[str]:
        return list(self.nodes[p].children)


def random_scripted(
    rng: random.Random, algebra: Any, leaf_value: Callable[[random.Random], Any],
    depth: int = 4, branching: tuple[int, int] = (1, 3), share: float = 0.0,
) -> ScriptedGame:
    """A random tree (optionally a DAG: ``share`` is the chance a child edge
    reuses an existing deeper node) with values from ``leaf_value``."""
    nodes: dict[str, Node] = {}
    by_level: dict[int, list[str]] = {}

    def build(level: int) -> str:
        pool = by_level.get(level, [])
        if pool and rng.random() < share:
            return rng.choice(pool)
        nid = f"n{len(nodes)}"
        nodes[nid] = Node("VAL", [])
        if level == depth or (level > 0 and rng.random() < 0.15):
            nodes[nid].value = leaf_value(rng)
        else:
            nodes[nid] = Node(rng.choice(("MAX", "MIN")), [build(level + 1) for _ in range(rng.randint(*branching))])
        by_level.setdefault(level, []).append(nid)
        return nid

    root = build(0)
    return ScriptedGame(nodes, root, algebra)


def fig10_game() -> ScriptedGame:
    """Four-ply game over the one-card lattice where deep pruning goes wrong."""
    return ScriptedGame.parse(fixture_text("fig10.txt"), card_suit_lattice())


# --------------------------------------------------------------------------
# imperfect information


@dataclass
class INode:
    kind: str  # "MAX", "MIN" or "LEAF"
    children: list  # (child, situation bits) pairs; bits is the full mask for MAX edges
    wins: int = 0
    win_all: bool = False


class ScriptedImperfect(ImperfectGame):
    """An :class:`ImperfectGame` from an explicit tree."""

    def __init__(self, labels: Sequence[str], nodes: dict[str, INode], root: str,
                 weights: Optional[Sequence[float]] = None) -> None:
        self.labels = list(labels)
        self.n = len(self.labels)
        self.nodes = nodes
        self._root = root
        self.weights = list(weights) if weights is not None else None
        for nid, nd in nodes.items():
            for c, _ in nd.children:
                if c not in nodes:
                    raise ScriptError(f"node {nid!r} has undefined child {c!r}")
            if nd.kind != "LEAF" and not nd.children:
                raise ScriptError(f"inner node {nid!r} has no children")
        _check_acyclic(root, {k: [c for c, _ in v.children] for k, v in nodes.items()})

    @classmethod
    def parse(cls, text: str) -> "ScriptedImperfect":
        labels = None
        weights = None
        nodes: dict[str, INode] = {}
        root = None

        def bits(names: str, n: int) -> int:
            out = 0
            for name in names.split(","):
                name = name.strip()
                if not name:
                    continue
                if name not in labels:
                    raise ScriptError(f"line {n}: unknown situation {name!r}")
                out |= 1 << labels.index(name)
            return out

        for n, toks in _lines(text):
            if toks[0] == "situations":
                labels = toks[1:]
                if not labels or len(set(labels)) != len(labels):
                    raise ScriptError(f"line {n}: need distinct situation names")
                continue
            if toks[0] == "weights":
                weights = [float(w) for w in toks[1:]]
                continue
            if labels is None:
                raise ScriptError(f"line {n}: 'situations' header must come first")
            if len(toks) < 2:
                raise ScriptError(f"line {n}: expected 'id MAX|MIN|WIN|LOSE|{{..}} children...'")
            nid, kind, rest = toks[0], toks[1], toks[2:]
            if nid in nodes:
                raise ScriptError(f"line {n}: node {nid!r} defined twice")
            full = (1 << len(labels)) - 1
            if kind == "MAX":
                nodes[nid] = INode("MAX", [(c, full) for c in rest])
            elif kind == "MIN":
                edges = []
                for tok in rest:
                    c, _, cond = tok.partition("@")
                    edges.append((c, bits(cond, n) if cond else full))
                nodes[nid] = INode("MIN", edges)
            elif kind == "WIN":
                nodes[nid] = INode("LEAF", [], full, True)
            elif kind == "LOSE":
                nodes[nid] = INode("LEAF", [], 0)
            elif kind.startswith("{") and kind.endswith("}"):
                nodes[nid] = INode("LEAF", [], bits(kind[1:-1], n))
            else:
                raise ScriptError(f"line {n}: unknown node kind {kind!r}")
            if kind not in ("MAX", "MIN") and rest:
                raise ScriptError(f"line {n}: leaf {nid!r} cannot have children")
            root = root or nid
        if labels is None or root is None:
            raise ScriptError("missing 'situations' header or nodes")
        if weights is not None and len(weights) != len(labels):
            raise ScriptError(f"{len(weights)} weights for {len(labels)} situations")
        return cls(labels, nodes, root, weights)

    def format(self) -> str:
        def names(b: int) -> str:
            return ",".join(self.labels[i] for i in range(self.n) if b >> i & 1)

        full = self.universe
        out = ["situations " + " ".join(self.labels)]
        if self.weights is not None:
            out.append("weights " + " ".join(repr(w) for w in self.weights))
        for nid, nd in self.nodes.items():
            if nd.kind == "MAX":
                out.append(" ".join([nid, "MAX"] + [c for c, _ in nd.children]))
            elif nd.kind == "MIN":
                out.append(" ".join([nid, "MIN"] + [c if b == full else f"{c}@{names(b)}" for c, b in nd.children]))
            elif nd.win_all:
                out.append(f"{nid} WIN")
            elif nd.wins == 0:
                out.append(f"{nid} LOSE")
            else:
                out.append(f"{nid} {{{names(nd.wins)}}}")
        return "\n".join(out) + "\n"

    def root(self) -> str:
        return self._root

    def turn(self, p: str) -> Any:
        k = self.nodes[p].kind
        return MAX if k == "MAX" else MIN if k == "MIN" else None

    def max_moves(self, p: str) -> list[str]:
        return [c for c, _ in self.nodes[p].children]

    def min_moves(self, p: str) -> list[tuple[str, int]]:
        return list(self.nodes[p].children)

    def wins(self, p: str, Z: int) -> int:
        return Z & self.nodes[p].wins


def random_imperfect(rng: random.Random, n: int, depth: int = 4, branching: tuple[int, int] = (1, 3)) -> ScriptedImperfect:
    """A random imperfect-information tree over ``n`` situations.

    Each minimizer node's edges cover every situation at least once.
    """
    labels = [f"s{i}" for i in range(n)]
    full = (1 << n) - 1
    nodes: dict[str, INode] = {}

    def build(level: int) -> str:
        nid = f"n{len(nodes)}"
        nodes[nid] = INode("LEAF", [])
        if level == depth or (level > 0 and rng.random() < 0.2):
            nodes[nid] = INode("LEAF", [], rng.getrandbits(n))
            return nid
        k = rng.randint(*branching)
        if rng.random() < 0.5:
            nodes[nid] = INode("MAX", [(build(level + 1), full) for _ in range(k)])
        else:
            conds = [rng.getrandbits(n) | (1 << rng.randrange(n)) for _ in range(k)]
            missing = full & ~_or(conds)
            conds[0] |= missing
            nodes[nid] = INode("MIN", [(build(level + 1), c) for c in conds])
        return nid

    root = build(0)
    return ScriptedImperfect(labels, nodes, root)


def _or(xs: Sequence[int]) -> int:
    out = 0
    for x in xs:
        out |= x
    return out


def four_option_game(clever: bool = True) -> ScriptedImperfect:
    """Play for S, play for T, defer the guess, or (optionally) cater to both."""
    return ScriptedImperfect.parse(fixture_text("four_option.txt" if clever else "four_option_no_clever.txt"))


def swo_sample_game() -> ScriptedImperfect:
    """One S situation and five T situations, no line covering both."""
    return ScriptedImperfect.parse(fixture_text("swo_sample.txt"))


def abcd_game() -> ScriptedImperfect:
    """Finesse either way (A, B), defer the guess (C) or a sure line (D)."""
    return ScriptedImperfect.parse(fixture_text("abcd.txt"))
