"""End-to-end acceptance criteria, each at its stated tolerance.

Every test records one PASS/FAIL line, printed again in the terminal summary.
Instance streams are fixed (seed i for instance i) and were not tuned.
"""

import math
import time

import numpy as np

from conftest import acceptance_lines, random_geometric_graph
from counterdeception import (
    SeedKind,
    brute_force_subgraph_optimum,
    brute_force_tree_optimum,
    build_rect_grid,
    cd_tree,
    enumerate_spanning_trees,
    improve_once,
    mssp_precompute,
    mst_seed,
    reattachment,
    reattachment_solve,
)
from counterdeception.bench import iteration_sweep, time_matched_compare
from counterdeception.errors import BudgetInfeasible
from counterdeception.generate import gen_instance, load_airfield
from deletion_cases import cycle_case, parallel_path_case
from test_properties import check_deletion
from test_reattachment import trunk_tree


def verdict(number: int, ok: bool, detail: str) -> None:
    line = f"{'PASS' if ok else 'FAIL'} criterion {number}: {detail}"
    acceptance_lines.append(line)
    print(line)
    assert ok, line


def test_1_spanning_tree_counts():
    counts = {}
    t0 = time.perf_counter()
    for n in (2, 3, 4):
        counts[n] = sum(1 for _ in enumerate_spanning_trees(build_rect_grid(n, n)))
    wall = time.perf_counter() - t0
    ok = counts == {2: 4, 3: 192, 4: 100_352} and wall < 600
    verdict(1, ok, f"counts {counts[2]}, {counts[3]}, {counts[4]} in {wall:.1f} s")


def test_2_subgraph_and_tree_optima_agree():
    rng = np.random.default_rng(2)
    t0 = time.perf_counter()
    mismatches = []
    graphs = 60
    for i in range(graphs):
        n = int(rng.integers(4, 8))
        g = random_geometric_graph(rng, n, int(rng.integers(n - 1, 9)))
        picks = [int(x) for x in rng.choice(n, size=int(rng.integers(3, min(4, n) + 1)),
                                            replace=False)]
        start, targets = picks[0], picks[1:]
        sub = brute_force_subgraph_optimum(g, targets, start)
        _, tree = brute_force_tree_optimum(g, targets, start)
        if sub != tree:
            mismatches.append((i, sub, tree))
    wall = time.perf_counter() - t0
    verdict(2, not mismatches and wall < 300,
            f"{graphs} graphs, {len(mismatches)} mismatches, {wall:.1f} s")


def test_3_edge_deletions_keep_cd():
    rng = np.random.default_rng(3)
    cases = [c for f in (cycle_case, parallel_path_case) for _ in range(150)
             if (c := f(rng)) is not None]
    bad = [p for c in cases if (p := check_deletion(c))]
    verdict(3, len(cases) >= 200 and not bad, f"{len(cases)} cases, {len(bad)} violations")


def test_4_approximation_ratio():
    t0 = time.perf_counter()
    ratios = []
    for i in range(10):
        inst = gen_instance("rect", 4, 4, 2, i)
        _, opt = brute_force_tree_optimum(inst.graph, inst.targets, inst.start)
        tree, _ = reattachment_solve(inst.graph, inst.targets, inst.start)
        ratios.append(cd_tree(tree, inst.targets).cd / opt)
    mean = float(np.mean(ratios))
    wall = time.perf_counter() - t0
    verdict(4, mean >= 0.50 and wall < 900,
            f"mean CD/CD_opt {mean:.3f} over 10 instances (need >= 0.50), {wall:.1f} s")


def test_5_monotone_and_feasible():
    before = reattachment.invariant_checks
    violations = []
    runs = 0

    def watcher(targets, limit):
        def cb(tree, report):
            if tree.problems(targets) or tree.weight > limit * (1 + 1e-12):
                violations.append(report)
        return cb

    for i in range(40):
        kind = ("rect", "tri")[i % 2]
        inst = gen_instance(kind, 6 + i % 4, 6 + i % 3, 2 + i % 5, 500 + i,
                            budget_factor=(math.inf, 1.0, 1.5, 2.0)[i % 4])
        seed = SeedKind("mst") if i % 3 == 0 else SeedKind.random(i)
        try:
            _, stats = reattachment_solve(inst.graph, inst.targets, inst.start, inst.budget,
                                          seed, callback=watcher(inst.targets, inst.budget))
        except BudgetInfeasible:
            continue
        runs += 1
        hist = stats.cd_history
        if any(b < a for a, b in zip(hist, hist[1:])):
            violations.append(hist)
    checked = reattachment.invariant_checks - before
    verdict(5, not violations and runs >= 30 and checked > 0,
            f"{runs} runs, {checked} accepted trees checked, {len(violations)} violations")


def test_6_time_matched_benchmark():
    insts = [gen_instance("tri", 8, 8, 5, i, budget_factor=2.0) for i in range(10)]
    res = time_matched_compare(insts, [5.0], rng_seed=6)
    rate = res.win_rate(5.0)
    verdict(6, rate >= 0.70, f"reattachment wins {res.wins[5.0][0]}/10, sampler "
                             f"{res.wins[5.0][1]}/10 (need >= 70%)")


def count_inversions(rows):
    out = []
    for a, b in zip(rows, rows[1:]):
        if b.mean_iterations < a.mean_iterations:
            out.append((a.mean_iterations - b.mean_iterations,
                        max(a.se_iterations, b.se_iterations)))
    return out


def test_7_iteration_scaling():
    t0 = time.perf_counter()
    by_targets = iteration_sweep([13], [2, 4, 7, 10], 20, rng_seed=7)
    by_width = iteration_sweep([8, 11, 13], [10], 20, rng_seed=7)
    wall = time.perf_counter() - t0
    inv = count_inversions(by_targets) + count_inversions(by_width)
    ok = len(inv) <= 1 and all(drop <= se for drop, se in inv) and wall < 600
    fmt = lambda rows: ", ".join(f"{r.mean_iterations:.2f}" for r in rows)  # noqa: E731
    verdict(7, ok, f"by |targets| [{fmt(by_targets)}], by width [{fmt(by_width)}], "
                   f"{len(inv)} inversion(s), {wall:.1f} s")


def test_8_metric_examples(three_branch):
    g, tree, targets = three_branch
    rep = cd_tree(tree, targets)
    u = {r.node: r.unique_distance for r in rep.targets}
    us = tuple(u[t] for t in targets)
    g4, t4, tg4 = trunk_tree()
    before = cd_tree(t4, tg4).cd
    after = cd_tree(improve_once(g4, t4, tg4, 3, math.inf, mssp_precompute(g4, tg4)), tg4).cd
    ok = us == (2.0, 1.0, 3.0) and rep.cd == 1.0 and (before, after) == (2.0, 4.0)
    verdict(8, ok, f"U {us}, CD {rep.cd}; one reattachment {before} -> {after}")


def test_9_airfield_smoke():
    inst = load_airfield()
    seed_cd = cd_tree(mst_seed(inst.graph, inst.targets, inst.start), inst.targets).cd
    t0 = time.perf_counter()
    tree, stats = reattachment_solve(inst.graph, inst.targets, inst.start, inst.budget)
    wall = time.perf_counter() - t0
    problems = tree.problems(inst.targets)
    final = cd_tree(tree, inst.targets).cd
    ok = (len(inst.graph) >= 40_000 and final > seed_cd and not problems
          and tree.weight <= inst.budget and wall < 1800)
    verdict(9, ok, f"{len(inst.graph)} nodes, CD {seed_cd:.3f} -> {final:.3f} in "
                   f"{stats.reattachments_accepted} moves, {wall:.0f} s")
