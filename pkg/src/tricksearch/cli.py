"""Command-line interface: ``tricksearch dd|sd|mc ...``.

Exit codes: 0 success, 1 usage error, 2 engine error.  Results go to
standard output (or ``--out``); diagnostics and timings go to standard error
only, so reruns with the same seed print identical output.
"""
from __future__ import annotations

import argparse
import json
import logging
import os
import random
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Optional, Sequence

from .cards import Card, Deal, DealError, PlayState, Seat, Suit, cards_of, format_deal, indices_desc, parse_deal, parse_hand, top_ranks
from .game import GameError

log = logging.getLogger("tricksearch")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # type: ignore[override]
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


@dataclass
class RunConfig:
    command: str
    flags: dict = field(default_factory=dict)
    seed: int = 0
    out: Optional[str] = None
    verbosity: int = 0
    threads: int = 1
    json: bool = False


# --------------------------------------------------------------------------
# argument helpers


def _env_int(name: str, default: int) -> int:
    v = os.environ.get(name)
    if v is None or v == "":
        return default
    try:
        return int(v)
    except ValueError:
        raise UsageError(f"environment variable {name}: expected an integer, got {v!r}") from None


def _read_arg(flag: str, value: str) -> str:
    """A flag value that is either a file path or the literal text."""
    p = Path(value)
    if p.is_file():
        return p.read_text()
    if "/" in value or value.endswith((".txt", ".pbn", ".json")):
        raise UsageError(f"{flag}: no such file {value!r}")
    return value


def _deal_arg(flag: str, value: str) -> Deal:
    text = _read_arg(flag, value)
    lines = [l.split("#", 1)[0].strip() for l in text.splitlines()]
    lines = [l for l in lines if l]
    if not lines:
        raise UsageError(f"{flag}: no deal found")
    line = lines[0]
    if line.startswith("[Deal"):
        line = line.split('"')[1]
    toks = line.split()
    if len(toks) == 4 and ":" in toks[0] and not any(":" in t for t in toks[1:]):
        line = _pbn_to_ours(line)
    try:
        return parse_deal(line)
    except DealError as e:
        raise UsageError(f"{flag}: {e}") from None


def _pbn_to_ours(line: str) -> str:
    """``N:h1 h2 h3 h4`` (hands clockwise from the first seat) to seat-tagged form."""
    first = Seat.parse(line[0])
    hands = line[2:].split()
    return " ".join(f"{'NESW'[(first + i) & 3]}:{h}" for i, h in enumerate(hands))


def _seat_arg(flag: str, value: str) -> int:
    try:
        return int(Seat.parse(value))
    except ValueError:
        raise UsageError(f"{flag}: unknown seat {value!r}") from None


def _trump_arg(flag: str, value: str) -> Optional[int]:
    try:
        s = Suit.parse(value)
    except ValueError:
        raise UsageError(f"{flag}: unknown strain {value!r}") from None
    return None if s is None else int(s)


def _declarer_arg(flag: str, value: str) -> tuple[int, int]:
    """``(side, declaring seat)`` from a seat or a side name."""
    v = value.strip().upper()
    if v in ("NS", "EW"):
        return (0, 2) if v == "NS" else (1, 3)
    seat = _seat_arg(flag, v)
    return seat & 1, seat


def _sizes_arg(flag: str, value: str) -> list[int]:
    try:
        sizes = [int(x) for x in value.split(",") if x.strip()]
    except ValueError:
        raise UsageError(f"{flag}: expected comma-separated integers, got {value!r}") from None
    for s in sizes:
        if s % 4 or not 4 <= s <= 52:
            raise UsageError(f"{flag}: deal size {s} is not a multiple of 4 in [4, 52]")
    if not sizes:
        raise UsageError(f"{flag}: no sizes given")
    return sizes


def _seats_arg(flag: str, value: str) -> tuple[int, int]:
    seats = [_seat_arg(flag, x) for x in value.split(",") if x.strip()]
    if len(seats) != 2 or (seats[0] - seats[1]) % 2:
        raise UsageError(f"{flag}: name two partners, e.g. N,S")
    return seats[0], seats[1]


def _positive(flag: str, value: int) -> int:
    if value < 1:
        raise UsageError(f"{flag}: must be at least 1, got {value}")
    return value


# --------------------------------------------------------------------------
# output


class Output:
    def __init__(self, cfg: RunConfig) -> None:
        self.cfg = cfg
        self.lines: list[str] = []
        self.records: list[dict] = []

    def line(self, text: str = "") -> None:
        self.lines.append(text)

    def record(self, **kw: Any) -> None:
        self.records.append(kw)

    def text(self) -> str:
        if self.cfg.json:
            return "".join(json.dumps(r, sort_keys=True) + "\n" for r in self.records)
        return "".join(l + "\n" for l in self.lines)

    def emit(self) -> None:
        text = self.text()
        if self.cfg.out:
            Path(self.cfg.out).write_text(text)
        else:
            sys.stdout.write(text)


def _card(i: int) -> str:
    return str(Card.from_index(i))


# --------------------------------------------------------------------------
# commands


def cmd_dd_solve(a: argparse.Namespace, cfg: RunConfig, out: Output) -> None:
    from .dd import solve_dd

    deal = _deal_arg("--deal", a.deal)
    trump = _trump_arg("--trump", a.trump)
    side, decl = _declarer_arg("--declarer", a.declarer)
    leader = _seat_arg("--leader", a.leader) if a.leader else (decl + 1) & 3
    t0 = time.perf_counter()
    r = solve_dd(deal, trump, leader, side, a.mode)
    log.info("solved in %.3fs", time.perf_counter() - t0)
    strain = "NT" if trump is None else Suit(trump).letter
    who = "NS" if side == 0 else "EW"
    out.line(f"deal {format_deal(deal)}")
    out.line(f"strain {strain} leader {'NESW'[leader]} declarer {who}")
    out.line(f"tricks {r.tricks}")
    if r.nodes_plain is not None:
        out.line(f"nodes_plain {r.nodes_plain}")
    if r.nodes_partition is not None:
        out.line(f"nodes_partition {r.nodes_partition}")
    out.line("probes " + " ".join(f"{e}:{v}" for e, v in r.probe_trace))
    out.record(deal=format_deal(deal), strain=strain, leader="NESW"[leader], declarer=who, tricks=r.tricks,
               nodes_plain=r.nodes_plain, nodes_partition=r.nodes_partition,
               probes=[[e, v] for e, v in r.probe_trace])


def cmd_dd_bench(a: argparse.Namespace, cfg: RunConfig, out: Output) -> None:
    from .dd import bench_scaling

    sizes = _sizes_arg("--sizes", a.sizes)
    n = _positive("--deals", a.deals)
    t0 = time.perf_counter()
    res = bench_scaling(n, sizes, cfg.seed, cfg.threads)
    log.info("bench finished in %.1fs", time.perf_counter() - t0)
    for l in res.csv().splitlines():
        out.line(l)
    frac = res.fraction_partition_le_plain
    if res.exponent is None:
        fit = "no fit (plain node counts do not vary)"
    else:
        fit = f"fit nodes_partition = {res.coefficient:.4f} * nodes_plain^{res.exponent:.4f}"
    out.line(f"# {fit}; partition<=plain on {frac:.4f} of deals")
    for r in res.rows:
        out.record(deal_id=r.deal_id, size=r.size, nodes_plain=r.nodes_plain, nodes_partition=r.nodes_partition)
    out.record(exponent=res.exponent, coefficient=res.coefficient, fraction_partition_le_plain=frac)


def _single_dummy(a: argparse.Namespace, deal: Deal, situations: list[tuple[int, int]], labels=None):
    from .sd import BridgeSingleDummy

    vis = _seats_arg("--visible", a.visible)
    side = vis[0] & 1
    trump = _trump_arg("--trump", a.trump)
    leader = _seat_arg("--leader", a.leader) if a.leader else (side ^ 1)
    target = a.target
    if not 0 <= target <= deal.hand_size:
        raise UsageError(f"--target: must lie in [0, {deal.hand_size}]")
    visible = (deal.masks[side], deal.masks[side + 2])
    return BridgeSingleDummy(visible, situations, trump, leader, target, side, labels)


def _hidden_label(hid: tuple[int, int], seat: int) -> str:
    from .cards import _format_hand

    return f"{'NESW'[seat]}:{_format_hand(hid)}"


def cmd_sd_solve(a: argparse.Namespace, cfg: RunConfig, out: Output) -> None:
    from .sd import enumerate_situations, perfect_info_value, solve_imperfect

    deal = _deal_arg("--deal", a.deal)
    vis = _seats_arg("--visible", a.visible)
    side = vis[0] & 1
    h0, h1 = side ^ 1, (side ^ 1) + 2
    hidden = deal.masks[h0] | deal.masks[h1]
    if deal.size > a.max_cards:
        raise GameError(f"{deal.size} cards exceed the exact solver's limit of {a.max_cards}; "
                        "use 'sd plan' (achievable sets) or raise --max-cards")
    sits = enumerate_situations(hidden, deal.hand_size)
    labels = [_hidden_label(s[0], h0) for s in sits]
    g = _single_dummy(a, deal, sits, labels)
    t0 = time.perf_counter()
    value = solve_imperfect(g, max_cards=a.max_cards)
    perfect = perfect_info_value(g, max_cards=a.max_cards)
    log.info("solved in %.3fs", time.perf_counter() - t0)
    actual = sits.index((deal.masks[h0], deal.masks[h1]))
    best = max(value.sets, key=lambda b: (b.bit_count(), -b), default=0)
    out.line(f"situations {g.n}")
    out.line(f"perfect_information_wins {len(perfect)}")
    out.line(f"antichain_members {len(value)}")
    out.line(f"largest_member {best.bit_count()}")
    out.line(f"actual_layout_covered {int(value.covers(1 << actual))}")
    for b in value.sets:
        out.line(f"member {b.bit_count()} " + " ".join(g.names(b)))
    out.record(situations=g.n, perfect_information_wins=len(perfect),
               antichain=[g.names(b) for b in value.sets], actual_layout_covered=value.covers(1 << actual))


def cmd_sd_plan(a: argparse.Namespace, cfg: RunConfig, out: Output) -> None:
    from .mc import DealConstraint, WeightedSample, sample_deals
    from .game import MAX
    from .sd import length_generalizer, plan_scores, swo_select

    deal = _deal_arg("--deal", a.deal)
    vis = _seats_arg("--visible", a.visible)
    side = vis[0] & 1
    h0, h1 = side ^ 1, (side ^ 1) + 2
    iters = _positive("--iterations", a.iterations)
    if a.samples:
        sample = WeightedSample.from_text(_read_arg("--samples", a.samples))
    else:
        n = _positive("--generate", a.generate)
        c = DealConstraint.from_json(_read_arg("--constraints", a.constraints)) if a.constraints else DealConstraint()
        c.deck = deal.all_cards
        c.known = {**c.known, side: deal.masks[side], side + 2: deal.masks[side + 2]}
        sample = WeightedSample.uniform(sample_deals(c, n, cfg.seed))
    sits, weights, seen = [], [], {}
    for d, w in zip(sample.deals, sample.weights):
        if d.masks[side] != deal.masks[side] or d.masks[side + 2] != deal.masks[side + 2]:
            raise UsageError("--samples: a sampled deal disagrees with the visible hands")
        key = (d.masks[h0], d.masks[h1])
        if key in seen:
            weights[seen[key]] += w
            continue
        seen[key] = len(sits)
        sits.append(key)
        weights.append(w)
    labels = [_hidden_label(s[0], h0) for s in sits]
    g = _single_dummy(a, deal, sits, labels)
    gen = length_generalizer(g) if a.generalize else None
    total = sum(weights)
    t0 = time.perf_counter()
    out.line(f"situations {g.n} total_weight {total:.6g}")
    if g.turn(g.root()) is MAX:
        scores = plan_scores(g, weights, iters, generalizer=gen)
        best_i = max(range(len(scores)), key=lambda i: (scores[i][1], -i))
        for i, (m, pay, r) in enumerate(scores):
            card = g.move_label(g.root(), m)
            out.line(f"move {card} payoff {pay:.6g} achieved {len(r.best.members)}")
            out.record(move=card, payoff=pay, achieved=g.names(r.best.members.bits))
        m, pay, r = scores[best_i]
        out.line(f"play {g.move_label(g.root(), m)} payoff {pay:.6g} probability {pay / total:.4f}")
        out.record(play=g.move_label(g.root(), m), payoff=pay, probability=pay / total)
        witness = r.best
    else:
        r = swo_select(g, weights, iters, generalizer=gen)
        witness = r.best
        out.line(f"payoff {r.payoff:.6g} probability {r.payoff / total:.4f}")
        out.record(payoff=r.payoff, probability=r.payoff / total)
    for line in _witness_lines(g, witness):
        out.line("witness " + line)
    out.record(witness=_witness_lines(g, witness), members=g.names(witness.members.bits))
    log.info("planned in %.3fs", time.perf_counter() - t0)


def _witness_lines(g, A) -> list[str]:
    """The strategy's declarer decisions along the first defender choice at each turn."""
    from .game import MAX

    lines = []
    p, Z = g.root(), g.universe
    while g.turn(p) is not None:
        if g.turn(p) is MAX:
            c = A.strategy.get((g.key(p), Z))
            if c is None:
                break
            lines.append(f"declarer {g.move_label(p, c)}")
            p = c
        else:
            for c, cond in g.min_moves(p):
                if Z & cond & A.members.bits:
                    lines.append(f"defender {g.move_label(p, c)}")
                    p, Z = c, Z & cond
                    break
            else:
                break
    return lines


def cmd_mc_play(a: argparse.Namespace, cfg: RunConfig, out: Output) -> None:
    from .mc import DealConstraint, WeightedSample, dd_scorer, sample_deals, select_move

    deal = _deal_arg("--deal", a.deal)
    seat = _seat_arg("--seat", a.seat)
    trump = _trump_arg("--trump", a.trump)
    n = _positive("--samples", a.samples)
    c = DealConstraint.from_json(_read_arg("--constraints", a.constraints)) if a.constraints else DealConstraint()
    c.deck = deal.all_cards
    known = {seat: deal.masks[seat]}
    if a.dummy:
        d = _seat_arg("--dummy", a.dummy)
        known[d] = deal.masks[d]
    for s, m in known.items():
        if s in c.known and c.known[s] & ~m:
            raise UsageError("--constraints: known cards disagree with the deal")
        c.known[s] = m
    sample = WeightedSample.uniform(sample_deals(c, n, cfg.seed))
    state = PlayState.from_deal(deal, trump, seat)
    moves = indices_desc(state.legal_mask())
    t0 = time.perf_counter()
    best, table = select_move(state, sample, moves, dd_scorer(state))
    log.info("scored in %.3fs", time.perf_counter() - t0)
    for m, v in table:
        out.line(f"card {_card(m)} score {v / n:.4f}")
        out.record(card=_card(m), score=v / n)
    out.line(f"play {_card(best)}")
    out.record(play=_card(best))


def cmd_mc_bid(a: argparse.Namespace, cfg: RunConfig, out: Output) -> None:
    from .mc import BidDatabase, BidError, DealConstraint, WeightedSample, parse_auction, parse_call, sample_deals, select_bid

    try:
        auction = parse_auction(a.auction)
    except BidError as e:
        raise UsageError(f"--auction: {e}") from None
    try:
        hand = parse_hand(a.hand)
    except DealError as e:
        raise UsageError(f"--hand: {e}") from None
    try:
        db = BidDatabase.from_json(_read_arg("--db", a.db)) if a.db else BidDatabase()
    except (ValueError, KeyError) as e:
        raise UsageError(f"--db: {e}") from None
    dealer = _seat_arg("--dealer", a.dealer)
    ranks = top_ranks(a.deck)
    deck = 0
    for s in range(4):
        for r in ranks:
            deck |= 1 << (13 * s + r - 2)
    if hand & ~deck or hand.bit_count() != a.deck:
        raise UsageError(f"--hand: must hold {a.deck} cards of the top {a.deck} ranks")
    alts = []
    for x in a.alternatives.split(",") if a.alternatives else []:
        try:
            alts.append(parse_call(x))
        except BidError as e:
            raise UsageError(f"--alternatives: {e}") from None
    bidder = (dealer + len(auction)) & 3
    c = DealConstraint(known={bidder: hand}, deck=deck)
    sample = WeightedSample.uniform(sample_deals(c, _positive("--samples", a.samples), cfg.seed))
    t0 = time.perf_counter()
    best, table = select_bid(auction, hand, db, sample, alternatives=alts, dealer=dealer)
    log.info("simulated in %.3fs", time.perf_counter() - t0)
    for call, v in table:
        out.line(f"call {call} score {v / len(sample):.4f}")
        out.record(call=call, score=v / len(sample))
    out.line(f"bid {best}")
    out.record(bid=best)


# --------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None, help="random seed (default: $TRICKSEARCH_SEED or 0)")
    common.add_argument("--threads", type=int, default=None, help="worker processes (default: $TRICKSEARCH_THREADS or 1)")
    common.add_argument("--json", action="store_true", help="emit JSON records, one per line")
    common.add_argument("--out", default=None, help="write the output to this file instead of standard output")
    common.add_argument("-v", "--verbose", action="count", default=0, help="log progress and timings to standard error")

    p = _Parser(prog="tricksearch", description="Bridge card-play search: double dummy, single dummy and Monte Carlo.")
    sub = p.add_subparsers(dest="group", parser_class=_Parser)

    dd = sub.add_parser("dd", help="double-dummy solving").add_subparsers(dest="cmd", parser_class=_Parser)
    s = dd.add_parser("solve", parents=[common], help="exact trick count with all hands visible")
    s.add_argument("--deal", required=True, help="deal file or 'N:... E:... S:... W:...' string")
    s.add_argument("--trump", default="N", help="trump suit S/H/D/C or N for notrump (default N)")
    s.add_argument("--declarer", default="NS", help="declaring seat or side: N/E/S/W, NS or EW (default NS)")
    s.add_argument("--leader", default=None, help="seat on lead (default: left of declarer; S/W for sides)")
    s.add_argument("--mode", choices=("plain", "partition", "both"), default="partition", help="search method (default partition)")
    s.set_defaults(func=cmd_dd_solve)
    b = dd.add_parser("bench", parents=[common], help="node counts of plain vs partition search on random deals")
    b.add_argument("--deals", type=int, default=200, help="deals per size (default 200)")
    b.add_argument("--sizes", default="12,16,20,24", help="comma-separated deal sizes in cards (default 12,16,20,24)")
    b.set_defaults(func=cmd_dd_bench)

    sd = sub.add_parser("sd", help="single-dummy solving").add_subparsers(dest="cmd", parser_class=_Parser)
    for name, fn, hlp in (("solve", cmd_sd_solve, "exact antichain of achievable layout sets (small deals)"),
                          ("plan", cmd_sd_plan, "achievable-set plan by squeaky-wheel optimization")):
        s = sd.add_parser(name, parents=[common], help=hlp)
        s.add_argument("--deal", required=True, help="deal file or string; the hidden hands give the pool of unseen cards")
        s.add_argument("--visible", default="N,S", help="the two visible partner seats (default N,S)")
        s.add_argument("--target", type=int, required=True, help="tricks the visible side must take")
        s.add_argument("--trump", default="N", help="trump suit S/H/D/C or N (default N)")
        s.add_argument("--leader", default=None, help="seat on lead (default: the defender left of the first visible seat)")
        if name == "solve":
            s.add_argument("--max-cards", type=int, default=20, help="refuse deals larger than this (default 20)")
        else:
            src = s.add_mutually_exclusive_group(required=True)
            src.add_argument("--samples", help="sample file: one 'deal weight' per line")
            src.add_argument("--generate", type=int, help="draw this many layouts uniformly (uses --seed)")
            s.add_argument("--constraints", default=None, help="JSON constraints for --generate")
            s.add_argument("--iterations", type=int, default=10, help="squeaky-wheel rounds (default 10)")
            s.add_argument("--generalize", action="store_true", help="widen achievable sets by suit-length ranges")
        s.set_defaults(func=fn)

    mc = sub.add_parser("mc", help="Monte Carlo card and bid selection").add_subparsers(dest="cmd", parser_class=_Parser)
    s = mc.add_parser("play", parents=[common], help="choose a lead by double-dummy sampling")
    s.add_argument("--deal", required=True, help="deal file or string (the unseen hands are resampled)")
    s.add_argument("--seat", required=True, help="seat on lead")
    s.add_argument("--dummy", default=None, help="a second seat whose cards are visible")
    s.add_argument("--trump", default="N", help="trump suit S/H/D/C or N (default N)")
    s.add_argument("--constraints", default=None, help="JSON constraints on the unseen hands")
    s.add_argument("--samples", type=int, default=50, help="sample size (default 50)")
    s.set_defaults(func=cmd_mc_play)
    s = mc.add_parser("bid", parents=[common], help="choose a call by auction projection")
    s.add_argument("--auction", default="", help="calls so far, e.g. '1N P' (P pass, X double)")
    s.add_argument("--hand", required=True, help="bidder's hand as spades.hearts.diamonds.clubs")
    s.add_argument("--db", default=None, help="JSON bid database (default: everyone passes)")
    s.add_argument("--dealer", default="N", help="dealer seat (default N)")
    s.add_argument("--alternatives", default="", help="extra candidate calls, comma-separated")
    s.add_argument("--deck", type=int, default=13, help="ranks per suit in the deck, highest first (default 13)")
    s.add_argument("--samples", type=int, default=50, help="sample size (default 50)")
    s.set_defaults(func=cmd_mc_bid)
    return p


def dispatch(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    argv = list(sys.argv[1:] if argv is None else argv)
    if not argv:
        parser.print_usage(sys.stderr)
        return 1
    try:
        a = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    if not getattr(a, "func", None):
        parser.print_usage(sys.stderr)
        print(f"tricksearch: error: missing command after {a.group!r}" if a.group else "tricksearch: error: missing command",
              file=sys.stderr)
        return 1
    try:
        seed = a.seed if a.seed is not None else _env_int("TRICKSEARCH_SEED", 0)
        threads = a.threads if a.threads is not None else _env_int("TRICKSEARCH_THREADS", 1)
        _positive("--threads", threads)
        flags = {k: v for k, v in vars(a).items() if k not in ("func", "group", "cmd")}
        cfg = RunConfig(f"{a.group} {a.cmd}", flags, seed, a.out, a.verbose, threads, a.json)
        logging.basicConfig(level=logging.INFO if cfg.verbosity else logging.WARNING, stream=sys.stderr,
                            format="%(name)s: %(message)s")
        out = Output(cfg)
        a.func(a, cfg, out)
        out.emit()
        return 0
    except UsageError as e:
        print(f"tricksearch: error: {e}", file=sys.stderr)
        return 1
    except (GameError, DealError, ValueError, ArithmeticError) as e:
        print(f"tricksearch: {type(e).__name__}: {e}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(dispatch())
