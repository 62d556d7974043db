"""Command-line entry point.

JSON goes to stdout and a short human summary to stderr. Exit codes: 0 ok,
1 usage error, 2 validation failure (bad input, unsupported game class or an
output that fails re-verification), 3 refused by an oracle budget.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
import time
from dataclasses import dataclass
from pathlib import Path

from .budget import BudgetExceeded
from .fptas import fptas_behavioral, fptas_pure, replay_value
from .game import Follower, Game, GameError, PureStrategy, classify, evaluate_profile, validate
from .geometry import Hull2D, min_x
from .instances import (GenParams, KnapsackInstance, UnitItemsInstance, example_fig1,
                        gen_knapsack_reduction, gen_random)
from .io import ParseError, parse, serialize
from .lp import dump_lp
from .lp_sefce import solve_sefce_concurrent
from .minmax import compute_minmax
from .numeric import Fraction, format_fraction, to_fraction
from .oracle import (brute_force_pure_stackelberg, brute_force_sefce,
                     grid_behavioral_stackelberg, reduction_exact_behavioral)
from .pure_dag import compute_capacities, solve_pure_dag
from .sefce import expand_compact, solve_sefce_tree, upward_pass, verify_no_deviation

SCHEMA = 1
ALGORITHMS = ("pure-dag", "sefce-tree", "sefce-lp", "fptas-behavioral", "fptas-pure", "minmax")


class UsageError(Exception):
    pass


class ValidationFailure(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


# --------------------------------------------------------------------------
# run records


@dataclass(frozen=True)
class RunRecord:
    command: tuple[str, ...]
    input_digest: str
    algorithm: str
    parameters: dict
    value: str | None
    wall_time: float
    output_digest: str

    def to_json(self) -> dict:
        """Everything but wall time, so identical runs print identical bytes."""
        return {"command": list(self.command), "input_digest": self.input_digest,
                "algorithm": self.algorithm, "parameters": self.parameters,
                "value": self.value, "output_digest": self.output_digest}


def digest(text: str) -> str:
    return "sha256:" + hashlib.sha256(text.encode("utf-8")).hexdigest()


def _dumps(doc) -> str:
    return json.dumps(doc, indent=2, sort_keys=True, ensure_ascii=False)


# --------------------------------------------------------------------------
# formatting


def _q(x) -> str:
    return format_fraction(x)


def _decimal(x, digits: int) -> str:
    scaled = round(to_fraction(x) * 10 ** digits)
    sign = "-" if scaled < 0 else ""
    whole, frac = divmod(abs(scaled), 10 ** digits)
    return f"{sign}{whole}." + str(frac).zfill(digits) if digits else f"{sign}{whole}"


def _strategy_doc(strategy) -> dict:
    if isinstance(strategy, PureStrategy):
        return {str(s): a for s, a in sorted(strategy.choice.items())}
    return {str(s): {a: _q(p) for a, p in sorted(mix.items())}
            for s, mix in sorted(strategy.mix.items())}


def _load_game(path: str) -> tuple[Game, str]:
    try:
        text = sys.stdin.read() if path == "-" else Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    try:
        game = parse(text)
    except (ParseError, ValueError, GameError) as exc:
        raise ValidationFailure(f"{path}: {exc}") from None
    report = validate(game)
    if not report.ok:
        raise ValidationFailure(f"{path}: " + "; ".join(v.message for v in report.violations))
    return game, digest(serialize(game))


# --------------------------------------------------------------------------
# hull output


def _restriction_lines(game: Game, hulls: dict[int, Hull2D]) -> dict[int, list[Fraction]]:
    """Per node, the follower-utility thresholds that cut it (as vertical lines)."""
    lines: dict[int, list[Fraction]] = {}
    for s, node in enumerate(game.nodes):
        if not isinstance(node, Follower) or s not in hulls:
            continue
        kids = [c for _, c in node.actions]
        lows = [min_x(hulls[c]) for c in kids]
        for k, c in enumerate(kids):
            others = lows[:k] + lows[k + 1:]
            if others:
                cut = max(others)
                lines.setdefault(c, []).append(cut)
                lines.setdefault(s, []).append(cut)
    return {s: sorted(set(v)) for s, v in lines.items()}


def hull_csv(h: Hull2D) -> str:
    return "".join(f"{_q(x)},{_q(y)}\n" for x, y in h.vertices)


def hull_svg(h: Hull2D, cuts=(), size: int = 320, pad: int = 40) -> str:
    pts = list(h.vertices)
    xs = [x for x, _ in pts] + list(cuts)
    ys = [y for _, y in pts]
    x0, x1 = min(xs), max(xs)
    y0, y1 = min(ys), max(ys)
    if x1 == x0:
        x0, x1 = x0 - 1, x1 + 1
    if y1 == y0:
        y0, y1 = y0 - 1, y1 + 1
    span = size - 2 * pad

    def sx(x):
        return float(pad + (Fraction(x) - x0) / (x1 - x0) * span)

    def sy(y):
        return float(size - pad - (Fraction(y) - y0) / (y1 - y0) * span)

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" '
           f'viewBox="0 0 {size} {size}">',
           f'<line x1="{pad}" y1="{size - pad}" x2="{size - pad}" y2="{size - pad}" stroke="black"/>',
           f'<line x1="{pad}" y1="{pad}" x2="{pad}" y2="{size - pad}" stroke="black"/>',
           f'<text x="{size - pad}" y="{size - pad / 3:.0f}" text-anchor="end">u2</text>',
           f'<text x="{pad / 4:.0f}" y="{pad}">u1</text>']
    if len(pts) == 1:
        out.append(f'<circle cx="{sx(pts[0][0]):.2f}" cy="{sy(pts[0][1]):.2f}" r="3" fill="steelblue"/>')
    else:
        coords = " ".join(f"{sx(x):.2f},{sy(y):.2f}" for x, y in pts)
        out.append(f'<polygon points="{coords}" fill="lightsteelblue" stroke="steelblue"/>')
    for c in cuts:
        out.append(f'<line x1="{sx(c):.2f}" y1="{pad}" x2="{sx(c):.2f}" y2="{size - pad}" '
                   f'stroke="red" stroke-dasharray="4 3"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def emit_hulls(game: Game, directory, fmt: str = "csv", nodes=None) -> list[Path]:
    """Write one hull file per node (``node<id>.csv`` or ``.svg``); returns the paths."""
    if fmt not in ("csv", "svg"):
        raise ValueError(f"hull format must be csv or svg, got {fmt!r}")
    hulls = upward_pass(game)
    cuts = _restriction_lines(game, hulls)
    out_dir = Path(directory)
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise OSError(f"cannot create {out_dir}: {exc.strerror}") from None
    paths = []
    for s in sorted(hulls if nodes is None else nodes):
        h = hulls[s]
        path = out_dir / f"node{s}.{fmt}"
        body = hull_csv(h) if fmt == "csv" else hull_svg(h, cuts.get(s, ()))
        try:
            path.write_text(body, encoding="utf-8")
        except OSError as exc:
            raise OSError(f"cannot write {path}: {exc.strerror}") from None
        paths.append(path)
    return paths


# --------------------------------------------------------------------------
# subcommands


def _solve(args, game: Game) -> dict:
    algo = args.algorithm
    doc: dict = {}
    if algo == "minmax":
        mm = compute_minmax(game)
        doc["mu"] = {str(s): _q(v) for s, v in sorted(mm.mu.items())}
        doc["punish_leader"] = _strategy_doc(mm.punish_leader)
        doc["punish_follower"] = _strategy_doc(mm.punish_follower)
        doc["value"] = _q(mm.mu[game.root])
        return doc
    if algo == "pure-dag":
        sol = solve_pure_dag(game)
        u1, u2, dist = evaluate_profile(game, sol.leader_strategy.to_behavioral(),
                                        sol.follower_response.to_behavioral())
        if (u1, u2) != (sol.leader_value, sol.follower_value) or dist.get(sol.chosen_leaf) != 1:
            raise ValidationFailure("pure-dag output failed replay")
        doc.update(value=_q(sol.leader_value), follower_value=_q(sol.follower_value),
                   chosen_leaf=sol.chosen_leaf,
                   leader_strategy=_strategy_doc(sol.leader_strategy),
                   follower_strategy=_strategy_doc(sol.follower_response))
        if args.dump_capacities:
            gamma = compute_capacities(game).gamma
            doc["capacities"] = {str(s): _q(v) for s, v in sorted(gamma.items())}
        return doc
    if algo in ("sefce-tree", "sefce-lp"):
        if algo == "sefce-tree":
            compact = solve_sefce_tree(game)
        else:
            flow = solve_sefce_concurrent(game)
            compact = flow.compact
            if args.dump_lp:
                _write(args.dump_lp, dump_lp(flow.lp))
        report = verify_no_deviation(game, compact)
        if not report.ok:
            raise ValidationFailure(f"{algo} output failed incentive check: {report.violations[0]}")
        doc.update(value=_q(compact.leader_value), follower_value=_q(compact.follower_value),
                   leader_strategy=_strategy_doc(compact.leader),
                   follower_strategy=_strategy_doc(compact.follower),
                   on_path=sorted(compact.on_path),
                   joint={str(s): {f"{r}|{c}": _q(p) for (r, c), p in sorted(cells.items())}
                          for s, cells in sorted(compact.joint.items())})
        if args.expand:
            dist = expand_compact(game, compact)
            doc["profiles"] = [{"leader": _strategy_doc(p1), "follower": _strategy_doc(p2),
                                "probability": _q(w)} for (p1, p2), w in dist.support]
        if args.dump_hulls:
            if algo != "sefce-tree":
                raise UsageError("--dump-hulls applies to sefce-tree")
            emit_hulls(game, args.dump_hulls, args.hull_format)
        return doc
    # FPTAS
    if args.epsilon is None:
        raise UsageError(f"{algo} needs --epsilon")
    try:
        eps = to_fraction(args.epsilon)
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"--epsilon must be an exact rational like 1/10, got {args.epsilon!r}") from None
    if eps <= 0:
        raise UsageError("--epsilon must be positive")
    sol = (fptas_behavioral if algo == "fptas-behavioral" else fptas_pure)(game, eps)
    u1, u2 = replay_value(game, sol)
    if u1 < sol.guaranteed_value:
        raise ValidationFailure(f"{algo} output replays to {u1} below its guarantee")
    doc.update(value=_q(sol.guaranteed_value), replay_value=_q(u1), replay_follower_value=_q(u2),
               leader_strategy=_strategy_doc(sol.strategy),
               table_size=sol.params.n, step=_q(sol.params.D))
    if args.dump_tables:
        out_dir = Path(args.dump_tables)
        out_dir.mkdir(parents=True, exist_ok=True)
        for s in sorted(sol.tables):
            rows = "".join(f"{k},{_q(v)}\n" for k, v in enumerate(sol.tables[s].entries))
            _write(out_dir / f"node{s}.csv", rows)
    return doc


def _write(path, text: str) -> None:
    try:
        Path(path).write_text(text, encoding="utf-8")
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror}") from None


def _oracle(args, game: Game) -> dict:
    if args.method == "pure":
        sol = brute_force_pure_stackelberg(game)
        return {"value": _q(sol.leader_value), "follower_value": _q(sol.follower_value),
                "chosen_leaf": sol.chosen_leaf,
                "leader_strategy": _strategy_doc(sol.leader_strategy)}
    if args.method == "sefce":
        value, dist = brute_force_sefce(game)
        leaves = dist.leaf_distribution(game)
        return {"value": _q(value),
                "leaf_distribution": {str(z): _q(p) for z, p in sorted(leaves.items()) if p}}
    if args.method == "grid":
        if args.grid < 1:
            raise UsageError("--grid must be >= 1")
        return {"value": _q(grid_behavioral_stackelberg(game, args.grid)), "grid": args.grid}
    return {"value": _q(reduction_exact_behavioral(game))}


def _parse_items(text: str) -> tuple[tuple[int, ...], tuple[int, ...]]:
    weights, values = [], []
    for part in text.split(","):
        try:
            w, v = part.split(":")
            weights.append(int(w))
            values.append(int(v))
        except ValueError:
            raise UsageError(f"--items entries look like w:v, got {part!r}") from None
    return tuple(weights), tuple(values)


def _gen(args) -> Game:
    if args.family == "example-fig1":
        return example_fig1()
    if args.family == "knapsack":
        weights, values = _parse_items(args.items)
        try:
            inst = KnapsackInstance(weights, values, args.budget)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        try:
            # already in unit-items form: skip the value-scaling conversion
            inst = UnitItemsInstance(weights, values, args.budget)
        except ValueError:
            pass
        return gen_knapsack_reduction(inst)
    try:
        params = GenParams(seed=args.seed, node_count=args.nodes, branching=args.branching,
                           chance_fraction=to_fraction(args.chance_fraction),
                           concurrent_fraction=to_fraction(args.concurrent_fraction),
                           utility_range=args.utility_range, graph=args.graph, info=args.info)
        return gen_random(params)
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(str(exc)) from None


def _class_doc(game: Game) -> dict:
    c = classify(game)
    return {"graph": c.graph, "info": c.info, "chance": c.chance,
            "nodes": len(game.nodes), "decision_nodes": len(game.decision_nodes()),
            "leaves": len(game.leaves())}


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="stackel", description="Stackelberg and correlated commitment solvers.")
    sub = p.add_subparsers(dest="cmd", required=True, parser_class=_Parser)

    v = sub.add_parser("validate", help="check a game file")
    v.add_argument("game")
    c = sub.add_parser("classify", help="report graph shape, information and chance")
    c.add_argument("game")

    s = sub.add_parser("solve", help="run a solver")
    s.add_argument("game")
    s.add_argument("--algorithm", required=True, choices=ALGORITHMS)
    s.add_argument("--epsilon", help="approximation parameter as p/q (FPTAS only)")
    s.add_argument("--dump-lp", metavar="FILE")
    s.add_argument("--dump-hulls", metavar="DIR")
    s.add_argument("--hull-format", choices=("csv", "svg"), default="csv")
    s.add_argument("--expand", action="store_true",
                   help="also print the explicit distribution over pure profiles")
    s.add_argument("--dump-capacities", action="store_true")
    s.add_argument("--dump-tables", metavar="DIR")
    s.add_argument("--decimal", type=int, metavar="DIGITS")

    o = sub.add_parser("oracle", help="run a brute-force oracle")
    o.add_argument("game")
    o.add_argument("--method", required=True, choices=("pure", "sefce", "grid", "reduction"))
    o.add_argument("--grid", type=int, default=8)
    o.add_argument("--decimal", type=int, metavar="DIGITS")

    g = sub.add_parser("gen", help="generate a game")
    g.add_argument("family", choices=("knapsack", "random", "example-fig1"))
    g.add_argument("--items", default="", help='knapsack items as "w:v,w:v,..."')
    g.add_argument("--budget", type=int, default=0)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--nodes", type=int, default=6, help="internal node count")
    g.add_argument("--branching", type=int, default=2)
    g.add_argument("--chance-fraction", default="0")
    g.add_argument("--concurrent-fraction", default="0")
    g.add_argument("--utility-range", type=int, default=5)
    g.add_argument("--graph", choices=("tree", "dag"), default="tree")
    g.add_argument("--info", choices=("turn-based", "concurrent"), default="turn-based")
    g.add_argument("--out", metavar="FILE")

    h = sub.add_parser("hull", help="write per-node achievable-utility hulls")
    h.add_argument("game")
    h.add_argument("--out", required=True, metavar="DIR")
    h.add_argument("--format", choices=("csv", "svg"), default="csv")
    h.add_argument("--node", type=int, action="append")

    t = sub.add_parser("selftest", help="run the acceptance suite")
    t.add_argument("--criteria", help="comma-separated criterion numbers (default: all)")
    return p


def _run(args, argv) -> int:
    started = time.perf_counter()
    if args.cmd == "gen":
        if args.family == "knapsack" and not args.items:
            raise UsageError("gen knapsack needs --items")
        text = serialize(_gen(args))
        if args.out:
            _write(args.out, text)
        else:
            sys.stdout.write(text)
        return 0
    if args.cmd == "selftest":
        return _selftest(args)

    game, in_digest = _load_game(args.game)
    if args.cmd == "validate":
        doc = {"valid": True, **_class_doc(game)}
        algorithm, params = "validate", {}
    elif args.cmd == "classify":
        doc = _class_doc(game)
        algorithm, params = "classify", {}
    elif args.cmd == "hull":
        if classify(game).graph != "tree":
            raise ValidationFailure("hull output needs a tree")
        paths = emit_hulls(game, args.out, args.format, args.node)
        doc = {"files": [str(p) for p in paths]}
        algorithm, params = "hull", {"format": args.format}
    elif args.cmd == "solve":
        doc = _solve(args, game)
        algorithm = args.algorithm
        params = {"epsilon": args.epsilon} if args.epsilon else {}
    else:
        doc = _oracle(args, game)
        algorithm = f"oracle-{args.method}"
        params = {"grid": args.grid} if args.method == "grid" else {}

    digits = getattr(args, "decimal", None)
    if digits is not None and "value" in doc:
        doc["value_decimal"] = _decimal(to_fraction(doc["value"]), digits)
    result = {"schema": SCHEMA, "command": args.cmd, "algorithm": algorithm, "result": doc}
    record = RunRecord(tuple(argv), in_digest, algorithm, params, doc.get("value"),
                       time.perf_counter() - started, digest(_dumps(result)))
    result["run"] = record.to_json()
    sys.stdout.write(_dumps(result) + "\n")
    value = f" value {record.value}" if record.value is not None else ""
    print(f"{args.cmd} {algorithm}:{value} ({record.wall_time:.3f} s)", file=sys.stderr)
    return 0


def _selftest(args) -> int:
    from .acceptance import CHECKS, run_all

    selected = None
    if args.criteria:
        try:
            selected = [int(x) for x in args.criteria.split(",")]
        except ValueError:
            raise UsageError("--criteria takes numbers like 1,2,5") from None
        unknown = [x for x in selected if x not in CHECKS]
        if unknown:
            raise UsageError(f"unknown criteria: {unknown}")
    results = run_all(selected, report=lambda r: print(r.line(), file=sys.stderr, flush=True))
    doc = {"schema": SCHEMA, "command": "selftest",
           "results": [{"criterion": r.number, "title": r.title, "passed": r.passed,
                        "detail": r.detail} for r in results]}
    sys.stdout.write(_dumps(doc) + "\n")
    return 0 if all(r.passed for r in results) else 2


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = build_parser().parse_args(argv)
        return _run(args, argv)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except ValidationFailure as exc:
        print(f"validation failure: {exc}", file=sys.stderr)
        return 2
    except GameError as exc:
        print(f"unsupported game: {exc}", file=sys.stderr)
        return 2
    except BudgetExceeded as exc:
        print(f"budget refusal: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
