"""Experiment harness: time-matched comparisons, seed studies, iteration sweeps.

Every stochastic routine takes an explicit ``rng_seed``; per-run streams are
derived from it with ``numpy.random.SeedSequence`` keyed on the run's
coordinates, so one run's draws never depend on how long another took.
"""

from __future__ import annotations

import csv
import math
import time
from dataclasses import asdict, dataclass, fields
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import BudgetInfeasible, InvariantViolation
from .generate import gen_instance
from .graph import Instance, WeightedDigraph
from .metrics import CdReport, cd_tree
from .reattachment import MsspTables, mssp_precompute, reattachment_solve
from .seeding import SeedKind, random_seed, random_spanning_tree, trim
from .tree import RootedTree

METHODS = ("reattachment", "sampler")


def _stream(*key: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([int(k) for k in key])))


def _draw_seed(rng: np.random.Generator) -> int:
    return int(rng.integers(0, 2**63 - 1))


@dataclass(frozen=True)
class BenchRecord:
    """One method's result on one instance for one time span.

    ``best_cd`` and ``best_weight`` are ``None`` when the method produced no
    tree within its span.
    """

    instance_id: str
    method: str
    span: float
    best_cd: float | None
    best_weight: float | None
    trees_evaluated: int
    wall_time: float
    rng_seed: int

    def to_row(self) -> dict[str, str]:
        row = {}
        for k, v in asdict(self).items():
            row[k] = "" if v is None else repr(v) if isinstance(v, float) else str(v)
        return row

    @classmethod
    def from_row(cls, row: Mapping[str, str]) -> "BenchRecord":
        def opt(s: str) -> float | None:
            return None if s == "" else float(s)

        return cls(row["instance_id"], row["method"], float(row["span"]), opt(row["best_cd"]),
                   opt(row["best_weight"]), int(row["trees_evaluated"]), float(row["wall_time"]),
                   int(row["rng_seed"]))


BENCH_COLUMNS = tuple(f.name for f in fields(BenchRecord))


def write_records(path: str | Path, records: Iterable[BenchRecord]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.DictWriter(fh, fieldnames=BENCH_COLUMNS)
        w.writeheader()
        for r in records:
            w.writerow(r.to_row())


def read_records(path: str | Path) -> list[BenchRecord]:
    with open(path, newline="", encoding="utf-8") as fh:
        return [BenchRecord.from_row(row) for row in csv.DictReader(fh)]


def _better(a: CdReport, b: CdReport | None) -> bool:
    """Higher CD wins, then lower weight."""
    if b is None:
        return True
    ea, eb = a.exact, b.exact
    return (ea[0], -ea[3]) > (eb[0], -eb[3])


def _check_result(tree: RootedTree, inst_targets: Sequence[int], budget: float) -> None:
    problems = tree.problems(inst_targets)
    if not math.isinf(budget) and tree.weight_exact > tree.graph.from_float(budget):
        problems.append(f"weight {tree.weight} over budget {budget}")
    if problems:
        raise InvariantViolation("; ".join(problems))


# -- the two searchers ---------------------------------------------------------


def random_sampler(
    g: WeightedDigraph,
    targets: Sequence[int],
    start: int,
    budget: float,
    deadline: float,
    rng: int | np.random.Generator,
    *,
    max_draws: int | None = None,
    nbrs: list[list[int]] | None = None,
) -> tuple[RootedTree | None, int]:
    """Draw trimmed uniform spanning trees until ``deadline``; keep the best.

    ``deadline`` is a ``time.perf_counter`` value. Best means highest CD,
    then lowest weight; draws over ``budget`` are counted but never kept.
    Returns ``(None, 0)`` when the deadline has already passed.
    """
    gen = rng if isinstance(rng, np.random.Generator) else _stream(rng)
    targets = list(targets)
    if nbrs is None:
        nbrs = g.neighbors_undirected()
    limit = None if math.isinf(budget) else g.from_float(budget)
    best, best_rep = None, None
    count = 0
    while time.perf_counter() < deadline and (max_draws is None or count < max_draws):
        tree = trim(random_spanning_tree(g, start, gen, nbrs), targets)
        count += 1
        if limit is not None and tree.weight_exact > limit:
            continue
        rep = cd_tree(tree, targets)
        if _better(rep, best_rep):
            best, best_rep = tree, rep
    return best, count


def multistart_reattachment(
    g: WeightedDigraph,
    targets: Sequence[int],
    start: int,
    budget: float,
    deadline: float,
    rng: int | np.random.Generator,
    *,
    max_starts: int | None = None,
    tables: MsspTables | None = None,
    nbrs: list[list[int]] | None = None,
) -> tuple[RootedTree | None, int]:
    """Reattachment from fresh random seeds until ``deadline``; keep the best.

    A seed draw over budget counts as a start that produced nothing. The run
    in progress at the deadline stops cooperatively and still contributes
    its best tree. Returns ``(best tree or None, starts)``.
    """
    gen = rng if isinstance(rng, np.random.Generator) else _stream(rng)
    targets = list(targets)
    if nbrs is None:
        nbrs = g.neighbors_undirected()
    if tables is None:
        tables = mssp_precompute(g, targets)
    best, best_rep = None, None
    starts = 0
    while time.perf_counter() < deadline and (max_starts is None or starts < max_starts):
        starts += 1
        try:
            seed = random_seed(g, targets, start, gen, budget, max_tries=1, nbrs=nbrs)
        except BudgetInfeasible:
            continue
        tree, _ = reattachment_solve(g, targets, start, budget, seed, tables=tables,
                                     deadline=deadline, nbrs=nbrs)
        rep = cd_tree(tree, targets)
        if _better(rep, best_rep):
            best, best_rep = tree, rep
    return best, starts


def _run_method(method: str, inst: Instance, span: float, rng: np.random.Generator,
                max_evals: int | None, cache: dict) -> tuple[RootedTree | None, int, float]:
    g = inst.graph
    t0 = time.perf_counter()
    deadline = t0 + span
    if method == "sampler":
        tree, count = random_sampler(g, inst.targets, inst.start, inst.budget, deadline, rng,
                                     max_draws=max_evals, nbrs=cache["nbrs"])
    elif method == "reattachment":
        tree, count = multistart_reattachment(g, inst.targets, inst.start, inst.budget, deadline,
                                              rng, max_starts=max_evals, tables=cache["tables"],
                                              nbrs=cache["nbrs"])
    else:
        raise ValueError(f"unknown method {method!r}")
    return tree, count, time.perf_counter() - t0


# -- time-matched comparison ---------------------------------------------------


@dataclass
class CompareResult:
    """Win tallies per span plus the raw records behind them."""

    methods: tuple[str, str]
    wins: dict[float, tuple[int, int]]
    records: list[BenchRecord]

    def win_rate(self, span: float, side: int = 0) -> float:
        n = len({r.instance_id for r in self.records if r.span == span})
        return self.wins[span][side] / n if n else 0.0


def _as_items(instances: Sequence[Instance] | Mapping[str, Instance]) -> list[tuple[str, Instance]]:
    if isinstance(instances, Mapping):
        return [(str(k), v) for k, v in instances.items()]
    return [(str(i), inst) for i, inst in enumerate(instances)]


def time_matched_compare(
    instances: Sequence[Instance] | Mapping[str, Instance],
    time_spans: Sequence[float],
    rng_seed: int,
    *,
    methods: tuple[str, str] = METHODS,
    max_evals: int | None = None,
) -> CompareResult:
    """Give each method the same wall-clock span on every instance and count wins.

    A side wins an instance when its best CD is strictly larger. Both methods
    see the same instance and budget and run one after the other. Both are
    driven by the same derived stream, so a method compared with itself under
    ``max_evals`` ties everywhere.
    """
    items = _as_items(instances)
    wins: dict[float, tuple[int, int]] = {}
    records: list[BenchRecord] = []
    for j, span in enumerate(time_spans):
        span = float(span)
        a_wins = b_wins = 0
        for i, (iid, inst) in enumerate(items):
            cache = {"nbrs": inst.graph.neighbors_undirected(),
                     "tables": mssp_precompute(inst.graph, inst.targets)}
            cds = []
            for method in methods:
                tree, count, wall = _run_method(method, inst, span, _stream(rng_seed, i, j),
                                                max_evals, cache)
                if tree is None:
                    cd = w = None
                else:
                    _check_result(tree, inst.targets, inst.budget)
                    rep = cd_tree(tree, inst.targets)
                    cd, w = rep.cd, rep.weight
                records.append(BenchRecord(iid, method, span, cd, w, count, wall, int(rng_seed)))
                cds.append(-math.inf if cd is None else cd)
            a_wins += cds[0] > cds[1]
            b_wins += cds[1] > cds[0]
        wins[span] = (a_wins, b_wins)
    return CompareResult(tuple(methods), wins, records)


# -- seed comparison -----------------------------------------------------------


@dataclass
class SeedComparison:
    kinds: tuple[str, str]
    wins: tuple[int, int]
    ties: int
    per_instance: list[tuple[str, int, int, int]]


def seed_comparison(
    instances: Sequence[Instance] | Mapping[str, Instance],
    runs_per_instance: int,
    rng_seed: int,
    *,
    kinds: tuple[str, str] = ("mst", "random"),
) -> SeedComparison:
    """Final CD of reattachment from two seed kinds, tallied per run.

    Run ``r`` on instance ``i`` gives both sides the same derived RNG seed, so
    identical kinds always tie. A random seed that cannot meet the budget
    loses that run (or ties if both sides fail).
    """
    items = _as_items(instances)
    total_a = total_b = total_t = 0
    per = []
    for i, (iid, inst) in enumerate(items):
        g = inst.graph
        tables = mssp_precompute(g, inst.targets)
        nbrs = g.neighbors_undirected()
        memo: dict = {}

        def final_cd(kind: str, seed_int: int) -> float:
            key = (kind, None if kind == "mst" else seed_int)
            if key not in memo:
                sk = SeedKind.mst() if kind == "mst" else SeedKind.random(seed_int)
                try:
                    tree, _ = reattachment_solve(g, inst.targets, inst.start, inst.budget, sk,
                                                 tables=tables, nbrs=nbrs)
                    memo[key] = cd_tree(tree, inst.targets).exact[0]
                except BudgetInfeasible:
                    memo[key] = -1
            return memo[key]

        a = b = t = 0
        for r in range(runs_per_instance):
            seed_int = _draw_seed(_stream(rng_seed, i, r))
            ca, cb = final_cd(kinds[0], seed_int), final_cd(kinds[1], seed_int)
            a += ca > cb
            b += cb > ca
            t += ca == cb
        per.append((iid, a, b, t))
        total_a, total_b, total_t = total_a + a, total_b + b, total_t + t
    return SeedComparison(tuple(kinds), (total_a, total_b), total_t, per)


# -- iteration sweep -----------------------------------------------------------


@dataclass(frozen=True)
class SweepRow:
    width: int
    n_targets: int
    repeats: int
    mean_iterations: float
    se_iterations: float
    mean_accepted: float
    mean_wall: float

    def to_row(self) -> dict[str, str]:
        return {k: repr(v) if isinstance(v, float) else str(v) for k, v in asdict(self).items()}


SWEEP_COLUMNS = tuple(f.name for f in fields(SweepRow))


def iteration_sweep(
    grid_widths: Sequence[int],
    target_counts: Sequence[int],
    repeats: int,
    rng_seed: int,
) -> list[SweepRow]:
    """Mean number of sweeps per solve over random tri-grid instances.

    Every (width, targets) pair gets ``repeats`` fresh width x width
    triangulated grids with random start and targets, unbounded budget and a
    random seed tree.
    """
    rows = []
    for w in grid_widths:
        for k in target_counts:
            its, acc, wall = [], [], []
            for r in range(repeats):
                rng = _stream(rng_seed, w, k, r)
                inst = gen_instance("tri", w, w, k, rng)
                tree, stats = reattachment_solve(inst.graph, inst.targets, inst.start, math.inf,
                                                 SeedKind.random(_draw_seed(rng)))
                its.append(stats.iterations)
                acc.append(stats.reattachments_accepted)
                wall.append(stats.wall_time)
            arr = np.asarray(its, dtype=float)
            se = float(arr.std(ddof=1) / math.sqrt(len(arr))) if len(arr) > 1 else 0.0
            rows.append(SweepRow(int(w), int(k), int(repeats), float(arr.mean()), se,
                                 float(np.mean(acc)), float(np.mean(wall))))
    return rows


def write_sweep(path: str | Path, rows: Iterable[SweepRow]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.DictWriter(fh, fieldnames=SWEEP_COLUMNS)
        w.writeheader()
        for r in rows:
            w.writerow(r.to_row())
