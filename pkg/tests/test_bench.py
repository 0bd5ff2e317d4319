import math
import time

import pytest

from counterdeception import build_rect_grid, brute_force_tree_optimum, cd_tree
from counterdeception.bench import (
    BenchRecord,
    iteration_sweep,
    multistart_reattachment,
    random_sampler,
    read_records,
    seed_comparison,
    time_matched_compare,
    write_records,
    write_sweep,
)
from counterdeception.generate import gen_instance


def test_sampler_with_expired_deadline():
    g = build_rect_grid(3, 3)
    assert random_sampler(g, [2, 6], 0, math.inf, 0.0, 1) == (None, 0)


def test_sampler_finds_optimum_on_3x3():
    g = build_rect_grid(3, 3)
    targets, start = [2, 6], 4
    _, cd_opt = brute_force_tree_optimum(g, targets, start)
    tree, count = random_sampler(g, targets, start, math.inf, time.perf_counter() + 60, 9,
                                 max_draws=3000)
    assert count == 3000
    assert cd_tree(tree, targets).cd == cd_opt


def test_sampler_respects_budget():
    inst = gen_instance("tri", 6, 6, 4, 5, budget_factor=1.3)
    tree, count = random_sampler(inst.graph, inst.targets, inst.start, inst.budget,
                                 time.perf_counter() + 60, 2, max_draws=300)
    assert count == 300
    if tree is not None:
        assert tree.weight <= inst.budget
        tree.validate(inst.targets)


def test_multistart_keeps_best_within_budget():
    inst = gen_instance("tri", 7, 7, 4, 8, budget_factor=2.0)
    tree, starts = multistart_reattachment(inst.graph, inst.targets, inst.start, inst.budget,
                                           time.perf_counter() + 60, 4, max_starts=5)
    assert starts == 5
    tree.validate(inst.targets)
    assert tree.weight <= inst.budget


def test_same_method_on_both_sides_ties():
    insts = [gen_instance("tri", 6, 6, 3, s, budget_factor=2.0) for s in range(3)]
    for method in ("sampler", "reattachment"):
        res = time_matched_compare(insts, [30.0], 1, methods=(method, method), max_evals=4)
        assert res.wins == {30.0: (0, 0)}
        a = [r for r in res.records if r.method == method]
        assert [r.best_cd for r in a[0::2]] == [r.best_cd for r in a[1::2]]


def test_compare_records_and_csv_round_trip(tmp_path):
    insts = {"a": gen_instance("tri", 6, 6, 3, 1, budget_factor=2.0),
             "b": gen_instance("tri", 6, 6, 3, 2, budget_factor=2.0)}
    res = time_matched_compare(insts, [0.2, 0.3], 5)
    assert len(res.records) == 8
    for r in res.records:
        assert r.best_weight is None or r.best_weight <= insts[r.instance_id].budget
    path = tmp_path / "bench.csv"
    write_records(path, res.records)
    assert read_records(path) == res.records
    assert sum(res.wins[0.2]) <= 2


def test_bench_record_empty_result_round_trip():
    r = BenchRecord("x", "sampler", 5.0, None, None, 0, 0.0, 3)
    assert BenchRecord.from_row(r.to_row()) == r
    assert r.to_row()["best_cd"] == ""


def test_iteration_sweep_small(tmp_path):
    rows = iteration_sweep([5], [2, 3], 3, 11)
    assert [(r.width, r.n_targets, r.repeats) for r in rows] == [(5, 2, 3), (5, 3, 3)]
    assert all(r.mean_iterations >= 1 for r in rows)
    again = iteration_sweep([5], [2, 3], 3, 11)
    assert [(r.mean_iterations, r.se_iterations) for r in again] == [
        (r.mean_iterations, r.se_iterations) for r in rows]
    write_sweep(tmp_path / "s.csv", rows)
    assert (tmp_path / "s.csv").read_text().splitlines()[0].startswith("width,n_targets")


def test_seed_comparison_identical_kinds_tie():
    insts = [gen_instance("tri", 6, 6, 3, s) for s in range(4)]
    res = seed_comparison(insts, 3, 9, kinds=("random", "random"))
    assert res.wins == (0, 0) and res.ties == 12
    res = seed_comparison(insts, 1, 9, kinds=("mst", "mst"))
    assert res.wins == (0, 0)


def test_seed_comparison_both_kinds_win_somewhere():
    insts = [gen_instance("tri", 6, 6, 4, 100 + s, budget_factor=2.0) for s in range(100)]
    res = seed_comparison(insts, 1, 4)
    assert res.wins[0] > 0 and res.wins[1] > 0
    assert sum(res.wins) + res.ties == 100
