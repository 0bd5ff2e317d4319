import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from conftest import random_geometric_graph
from counterdeception import (
    BudgetInfeasible,
    GuardError,
    WeightedDigraph,
    brute_force_subgraph_optimum,
    brute_force_tree_optimum,
    build_rect_grid,
    cd_tree,
    enumerate_spanning_trees,
    reattachment_solve,
)


def matrix_tree_count(g: WeightedDigraph) -> int:
    """Kirchhoff: any cofactor of the Laplacian of the undirected shadow."""
    ids = list(g.nodes())
    index = {u: i for i, u in enumerate(ids)}
    lap = np.zeros((len(ids), len(ids)))
    for u, v, _ in g.undirected_edges():
        i, j = index[u], index[v]
        lap[i, i] += 1
        lap[j, j] += 1
        lap[i, j] -= 1
        lap[j, i] -= 1
    return int(round(np.linalg.det(lap[1:, 1:])))


def triangle():
    pos = {0: (0, 0), 1: (1, 0), 2: (0, 1)}
    return WeightedDigraph(pos, [(0, 1), (1, 0), (1, 2), (2, 1), (0, 2), (2, 0)])


def test_triangle_has_three_trees():
    trees = list(enumerate_spanning_trees(triangle()))
    assert len(trees) == 3
    assert len({frozenset(t) for t in trees}) == 3


def test_grid_counts():
    assert sum(1 for _ in enumerate_spanning_trees(build_rect_grid(2, 2))) == 4
    assert sum(1 for _ in enumerate_spanning_trees(build_rect_grid(3, 3))) == 192
    assert matrix_tree_count(build_rect_grid(3, 3)) == 192


@given(st.integers(0, 100_000), st.integers(3, 7))
def test_enumeration_matches_matrix_tree_theorem(seed, n):
    g = random_geometric_graph(np.random.default_rng(seed), n, n + 3)
    trees = [frozenset(t) for t in enumerate_spanning_trees(g)]
    assert len(trees) == len(set(trees)) == matrix_tree_count(g)
    for t in trees:
        assert len(t) == n - 1


def test_enumeration_guard():
    with pytest.raises(GuardError):
        next(enumerate_spanning_trees(build_rect_grid(6, 5)))


def test_tree_oracle_on_unit_square():
    g = build_rect_grid(2, 2)
    tree, cd = brute_force_tree_optimum(g, [1, 2], 0)
    assert cd == 1.0
    assert cd_tree(tree, [1, 2]).cd == 1.0
    with pytest.raises(BudgetInfeasible):
        brute_force_tree_optimum(g, [1, 2], 0, budget=0.0)


def test_tree_oracle_prefers_lighter_tree_on_ties():
    g = build_rect_grid(2, 3)
    tree, cd = brute_force_tree_optimum(g, [2, 5], 0)
    # split at the start: 0-1-2 and 0-3-4-5; routing 5 around through 4 and 1 is heavier
    assert cd == 2.0
    assert tree.weight == 5.0
    assert sorted(tree.edges()) == [(0, 1), (0, 3), (1, 2), (3, 4), (4, 5)]


def test_subgraph_oracle_single_path_per_target():
    # a plain tree as base graph: one s->t route per target
    pos = {0: (0, 0), 1: (1, 0), 2: (2, 0), 3: (1, 1), 4: (1, 2)}
    edges = [(0, 1), (1, 2), (1, 3), (3, 4)]
    g = WeightedDigraph(pos, edges)
    assert brute_force_subgraph_optimum(g, [2, 4], 0) == 1.0
    tree, cd = brute_force_tree_optimum(g, [2, 4], 0)
    assert cd == 1.0 and cd_tree(tree, [2, 4]).cd == 1.0


def test_subgraph_oracle_guard_and_budget():
    with pytest.raises(GuardError):
        brute_force_subgraph_optimum(build_rect_grid(3, 4), [1, 2], 0)
    g = build_rect_grid(2, 3)
    with pytest.raises(BudgetInfeasible):
        brute_force_subgraph_optimum(g, [2, 5], 0, budget=1.0)


@given(st.integers(0, 100_000))
def test_budget_below_minimum_tree_is_infeasible_for_both(seed):
    rng = np.random.default_rng(seed)
    g = random_geometric_graph(rng, 5, 6)
    targets = [1, 2]
    lightest = min(
        brute_force_tree_optimum(g, targets, 0)[0].weight,
        *(t.weight for t in _all_trimmed(g, targets, 0)),
    )
    budget = lightest * 0.999
    with pytest.raises(BudgetInfeasible):
        brute_force_tree_optimum(g, targets, 0, budget)
    with pytest.raises(BudgetInfeasible):
        brute_force_subgraph_optimum(g, targets, 0, budget)


def _all_trimmed(g, targets, start):
    from counterdeception import RootedTree, trim

    for edges in enumerate_spanning_trees(g):
        yield trim(RootedTree.from_edges(g, start, edges), targets)


@given(st.integers(0, 100_000))
def test_tree_oracle_dominates_heuristic(seed):
    rng = np.random.default_rng(seed)
    g = build_rect_grid(3, 3)
    picks = [int(x) for x in rng.choice(9, 3, replace=False)]
    _, cd_opt = brute_force_tree_optimum(g, picks[1:], picks[0])
    tree, _ = reattachment_solve(g, picks[1:], picks[0])
    assert cd_tree(tree, picks[1:]).cd <= cd_opt


@given(st.integers(0, 100_000))
def test_tree_oracle_matches_plain_evaluation(seed):
    rng = np.random.default_rng(seed)
    g = random_geometric_graph(rng, 6, 8)
    targets = [1, 2, 3]
    budget = math.inf if seed % 2 else 1e9
    _, cd = brute_force_tree_optimum(g, targets, 0, budget)
    ref = max(cd_tree(t, targets).cd for t in _all_trimmed(g, targets, 0))
    assert cd == ref
