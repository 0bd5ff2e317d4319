"""Command-line entry point (``counterdeception``)."""

from __future__ import annotations

import argparse
import math
import os
import sys
import time
from pathlib import Path
from typing import Sequence

from . import fileio
from .bench import iteration_sweep, random_sampler, time_matched_compare, write_records, write_sweep
from .errors import BudgetInfeasible, GuardError, InstanceError, InvariantViolation, TreeError
from .generate import build_airfield, gen_instance, parse_budget_factor
from .graph import ObstacleRegion
from .metrics import cd_tree
from .oracle import brute_force_subgraph_optimum, brute_force_tree_optimum
from .reattachment import reattachment_solve
from .render import render_dot, render_svg
from .seeding import SeedKind
from .validate import check_instance, check_tree

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_BUDGET = 3
EXIT_ARGS = 4


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # argparse would exit with 2
        self.print_usage(sys.stderr)
        self.exit(EXIT_ARGS, f"{self.prog}: error: {message}\n")


def _color(text: str, code: str) -> str:
    if os.environ.get("CD_NO_COLOR") or not sys.stdout.isatty():
        return text
    return f"\033[{code}m{text}\033[0m"


def _budget(value: str | None) -> float | None:
    if value is None:
        return None
    v = value.strip().lower()
    if v in ("inf", "infinity", "none", "unbounded"):
        return math.inf
    try:
        b = float(v)
    except ValueError:
        raise UsageError(f"budget must be a number or 'inf', got {value!r}") from None
    if math.isnan(b) or b < 0:
        raise UsageError(f"budget must be non-negative, got {value!r}")
    return b


def _csv_list(value: str, kind=float) -> list:
    try:
        return [kind(x) for x in value.split(",") if x.strip()]
    except ValueError:
        raise UsageError(f"cannot parse list {value!r}") from None


def _need_seed(args: argparse.Namespace) -> int:
    if args.rng_seed is None:
        raise UsageError(f"'{args.command}' is stochastic; pass --rng-seed explicitly")
    return args.rng_seed


def _out(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")


# -- subcommands ---------------------------------------------------------------


def cmd_gen(args: argparse.Namespace) -> int:
    if args.airfield:
        inst = build_airfield()
    else:
        if args.rows is None or args.cols is None or args.targets is None:
            raise UsageError("gen needs --rows, --cols and --targets (or --airfield)")
        if args.targets < 2:
            raise UsageError("--targets must be at least 2")
        seed = _need_seed(args)
        obstacles: tuple = ()
        if args.obstacles:
            polys = fileio.read_json(args.obstacles)
            obstacles = tuple(ObstacleRegion(tuple(tuple(p) for p in poly)) for poly in polys)
        try:
            factor = parse_budget_factor(args.budget_factor)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        inst = gen_instance(args.kind, args.rows, args.cols, args.targets, seed, factor,
                            obstacles, args.spacing)
    _out(args.out, fileio.dumps(fileio.instance_to_json(inst)))
    return EXIT_OK


def cmd_solve(args: argparse.Namespace) -> int:
    inst = fileio.load_instance(args.instance)
    budget = _budget(args.budget)
    if budget is not None:
        inst = inst.with_budget(budget)
    if args.seed_kind == "random":
        seed = SeedKind.random(_need_seed(args))
    else:
        seed = SeedKind.mst()
    deadline = None if args.time_limit is None else time.perf_counter() + args.time_limit
    tree, stats = reattachment_solve(inst.graph, inst.targets, inst.start, inst.budget, seed,
                                     max_tries=args.max_tries, deadline=deadline)
    report = cd_tree(tree, inst.targets)
    _out(args.out, fileio.dumps(fileio.tree_to_json(tree, report=report)))
    if args.stats:
        fileio.write_json(args.stats, fileio.stats_to_json(stats, seed.kind, seed.rng_seed))
    print(f"cd {report.cd:g}  weight {report.weight:g}  iterations {stats.iterations}  "
          f"accepted {stats.reattachments_accepted}", file=sys.stderr)
    return EXIT_OK


def cmd_brute(args: argparse.Namespace) -> int:
    inst = fileio.load_instance(args.instance)
    g = inst.graph
    if args.mode == "tree":
        tree, cd = brute_force_tree_optimum(g, inst.targets, inst.start, inst.budget)
        data = {"mode": "tree", "cd": cd, "tree": fileio.tree_to_json(tree, inst.targets)}
    else:
        cd = brute_force_subgraph_optimum(g, inst.targets, inst.start, inst.budget)
        data = {"mode": "subgraph", "cd": cd}
    _out(args.out, fileio.dumps(data))
    return EXIT_OK


def cmd_sample(args: argparse.Namespace) -> int:
    inst = fileio.load_instance(args.instance)
    seed = _need_seed(args)
    deadline = time.perf_counter() + args.time_limit
    tree, count = random_sampler(inst.graph, inst.targets, inst.start, inst.budget, deadline,
                                 seed, max_draws=args.max_draws)
    if tree is None:
        print(f"no tree within budget after {count} draws", file=sys.stderr)
        return EXIT_BUDGET
    report = cd_tree(tree, inst.targets)
    _out(args.out, fileio.dumps(fileio.tree_to_json(tree, report=report)))
    print(f"cd {report.cd:g}  weight {report.weight:g}  draws {count}", file=sys.stderr)
    return EXIT_OK


def cmd_bench(args: argparse.Namespace) -> int:
    seed = _need_seed(args)
    if args.bench_command == "compare":
        files = sorted(Path(args.instances).glob("*.json"))
        if not files:
            raise UsageError(f"no *.json instances in {args.instances}")
        instances = {f.stem: fileio.load_instance(f) for f in files}
        res = time_matched_compare(instances, _csv_list(args.spans), seed)
        write_records(args.out, res.records)
        for span, (a, b) in res.wins.items():
            print(f"span {span:g}s  {res.methods[0]} {a}  {res.methods[1]} {b}")
    else:
        rows = iteration_sweep(_csv_list(args.widths, int), _csv_list(args.targets, int),
                               args.repeats, seed)
        write_sweep(args.out, rows)
        for r in rows:
            print(f"width {r.width:3d}  targets {r.n_targets:3d}  "
                  f"mean iterations {r.mean_iterations:.2f} +- {r.se_iterations:.2f}")
    return EXIT_OK


def cmd_render(args: argparse.Namespace) -> int:
    inst = fileio.load_instance(args.instance)
    tree, report = fileio.load_tree(args.tree, inst.graph)
    if args.format == "dot":
        text = render_dot(tree, inst)
    else:
        text = render_svg(tree, inst, show_grid=not args.no_grid)
    _out(args.out, text)
    return EXIT_OK


def cmd_validate(args: argparse.Namespace) -> int:
    data = fileio.read_json(args.instance)
    try:
        inst = fileio.instance_from_json(data)
    except (InstanceError, ValueError) as exc:
        print(f"{_color('FAIL', '31')} instance-parse: {exc}")
        return EXIT_INVALID
    checks = check_instance(inst)
    if args.tree:
        try:
            tree, _ = fileio.load_tree(args.tree, inst.graph)
            checks += check_tree(tree, inst)
        except TreeError as exc:
            print(f"{_color('FAIL', '31')} tree-parse: {exc}")
            return EXIT_INVALID
    for c in checks:
        tag = _color("PASS", "32") if c.ok else _color("FAIL", "31")
        print(f"{tag} {c.name}" + (f": {c.detail}" if c.detail else ""))
    return EXIT_OK if all(c.ok for c in checks) else EXIT_INVALID


# -- parser --------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    fmt = argparse.RawDescriptionHelpFormatter
    p = _Parser(
        prog="counterdeception",
        description="Design road networks (Steiner trees) that maximize counterdeceptiveness.",
        epilog="File formats (JSON):\n" + (fileio.__doc__ or "").split("\n", 2)[2]
        + "\nExit codes: 0 ok, 2 validation failure, 3 budget infeasible, 4 bad arguments.\n"
        "Set CD_NO_COLOR to disable coloured output.",
        formatter_class=fmt,
    )
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    g = sub.add_parser("gen", help="generate a random grid instance", formatter_class=fmt)
    g.add_argument("--kind", choices=("rect", "tri"), default="tri")
    g.add_argument("--rows", type=int)
    g.add_argument("--cols", type=int)
    g.add_argument("--targets", type=int, help="number of targets (at least 2)")
    g.add_argument("--spacing", type=float, default=1.0)
    g.add_argument("--budget-factor", default="inf",
                   help="budget as a multiple of the trimmed MST weight, or 'inf'")
    g.add_argument("--obstacles", help="JSON file with a list of polygons [[[x, y], ...], ...]")
    g.add_argument("--airfield", action="store_true", help="emit the bundled airfield instance")
    g.add_argument("--rng-seed", type=int)
    g.add_argument("--out")
    g.set_defaults(func=cmd_gen)

    s = sub.add_parser("solve", help="run reattachment from a seed tree")
    s.add_argument("--instance", required=True)
    s.add_argument("--seed-kind", choices=("mst", "random"), default="mst")
    s.add_argument("--rng-seed", type=int)
    s.add_argument("--budget", help="override the instance budget (number or 'inf')")
    s.add_argument("--max-tries", type=int, default=100, help="random seed redraws")
    s.add_argument("--time-limit", type=float, help="seconds before stopping early")
    s.add_argument("--out")
    s.add_argument("--stats")
    s.set_defaults(func=cmd_solve)

    b = sub.add_parser("brute", help="exhaustive optimum of a tiny instance")
    b.add_argument("--instance", required=True)
    b.add_argument("--mode", choices=("tree", "subgraph"), default="tree")
    b.add_argument("--out")
    b.set_defaults(func=cmd_brute)

    sa = sub.add_parser("sample", help="best of random Steiner trees within a time limit")
    sa.add_argument("--instance", required=True)
    sa.add_argument("--rng-seed", type=int)
    sa.add_argument("--time-limit", type=float, default=5.0)
    sa.add_argument("--max-draws", type=int)
    sa.add_argument("--out")
    sa.set_defaults(func=cmd_sample)

    be = sub.add_parser("bench", help="benchmark harness")
    bsub = be.add_subparsers(dest="bench_command", required=True, parser_class=_Parser)
    bc = bsub.add_parser("compare", help="time-matched reattachment vs random sampling")
    bc.add_argument("--instances", required=True, help="directory of instance JSON files")
    bc.add_argument("--spans", default="5", help="comma-separated seconds per method")
    bc.add_argument("--rng-seed", type=int)
    bc.add_argument("--out", required=True)
    bi = bsub.add_parser("iters", help="mean sweeps per solve on random tri-grids")
    bi.add_argument("--widths", default="8,11,13")
    bi.add_argument("--targets", default="2,4,7,10")
    bi.add_argument("--repeats", type=int, default=20)
    bi.add_argument("--rng-seed", type=int)
    bi.add_argument("--out", required=True)
    be.set_defaults(func=cmd_bench)

    r = sub.add_parser("render", help="draw a tree as DOT or SVG")
    r.add_argument("--instance", required=True)
    r.add_argument("--tree", required=True)
    r.add_argument("--format", choices=("dot", "svg"), default="svg")
    r.add_argument("--no-grid", action="store_true", help="omit base-graph nodes (SVG)")
    r.add_argument("--out")
    r.set_defaults(func=cmd_render)

    v = sub.add_parser("validate", help="check instance (and tree) invariants")
    v.add_argument("--instance", required=True)
    v.add_argument("--tree")
    v.set_defaults(func=cmd_validate)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ARGS
    except BudgetInfeasible as exc:
        print(f"budget infeasible: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (InstanceError, TreeError, InvariantViolation) as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except GuardError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ARGS
    except (FileNotFoundError, IsADirectoryError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ARGS
    except ValueError as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
