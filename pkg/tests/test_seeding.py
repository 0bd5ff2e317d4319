import math
from collections import Counter

import networkx as nx
import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import stats

from counterdeception import (
    BudgetInfeasible,
    InstanceError,
    ObstacleRegion,
    RootedTree,
    SeedKind,
    WeightedDigraph,
    apply_obstacles,
    build_rect_grid,
    build_tri_grid,
    enumerate_spanning_trees,
    mst_seed,
    random_seed,
    random_spanning_tree,
    trim,
)
from counterdeception.seeding import minimum_spanning_edges


def trim_one_leaf_at_a_time(tree: RootedTree, targets, rng) -> set:
    """Reference trimming: delete one random non-target leaf per step."""
    parent = dict(tree.parent)
    tset = set(targets)
    while True:
        has_child = set(parent.values())
        leaves = [v for v in parent if v not in has_child and v not in tset]
        if not leaves:
            return set(parent.items())
        del parent[leaves[int(rng.integers(len(leaves)))]]


def test_seed_kind_requires_rng_seed_for_random():
    with pytest.raises(ValueError):
        SeedKind("random")
    with pytest.raises(ValueError):
        SeedKind("greedy")
    assert SeedKind.random(5).rng_seed == 5


def test_trim_fixed_point_and_monotone():
    g = build_rect_grid(4, 4)
    full = RootedTree.from_edges(g, 0, minimum_spanning_edges(g))
    t = trim(full, [3, 15])
    assert t.weight <= full.weight
    assert set(t.leaves()) <= {3, 15}
    assert trim(t, [3, 15]) == t


@given(st.integers(0, 100_000))
def test_trim_matches_single_leaf_deletions(seed):
    rng = np.random.default_rng(seed)
    g = build_rect_grid(8, 8)
    tree = random_spanning_tree(g, 0, rng)
    targets = [int(x) for x in rng.choice(np.arange(1, 64), 5, replace=False)]
    assert set(trim(tree, targets).parent.items()) == trim_one_leaf_at_a_time(tree, targets, rng)


def test_trim_keeps_root_and_rejects_missing_target():
    g = build_rect_grid(1, 4)
    t = RootedTree(g, 0, {1: 0, 2: 1, 3: 2})
    assert trim(t, [1, 2]).parent == {1: 0, 2: 1}
    with pytest.raises(InstanceError):
        trim(RootedTree(g, 0, {1: 0}), [1, 3])


def test_mst_seed_unit_square():
    g = build_rect_grid(2, 2)
    seed = mst_seed(g, [1, 2], 0)
    assert seed.weight == 2.0
    assert seed.root == 0
    assert sorted(seed.leaves()) == [1, 2]
    # the third corner as start forces a chain through the MST
    assert mst_seed(g, [1, 3], 2).weight == 3.0


def test_mst_untrimmed_weight_on_uniform_grid():
    g = build_rect_grid(5, 6, 2.0)
    edges = minimum_spanning_edges(g)
    assert len(edges) == 29
    assert sum(g.weight(u, v) for u, v in edges) == 29 * 2.0


def test_mst_agrees_with_prim_on_perturbed_graph():
    rng = np.random.default_rng(11)
    base = build_rect_grid(7, 7)
    pos = {u: tuple(np.add(base.position(u), rng.uniform(-0.3, 0.3, 2))) for u in base.nodes()}
    g = WeightedDigraph(pos, [(u, v) for u, v, _ in base.edges()])
    h = nx.Graph()
    for u, v, w in g.undirected_edges():
        h.add_edge(u, v, weight=w)
    ref = nx.minimum_spanning_tree(h, algorithm="prim")
    assert {tuple(sorted(e)) for e in minimum_spanning_edges(g)} == {
        tuple(sorted(e)) for e in ref.edges()}


def test_mst_on_disconnected_graph():
    g = apply_obstacles(build_rect_grid(3, 5), [ObstacleRegion.rectangle(1.5, -1, 2.5, 3)])
    with pytest.raises(InstanceError):
        minimum_spanning_edges(g)
    seed = mst_seed(g, [5, 10], 0)  # spans the start's side only
    assert set(seed.nodes()) <= {0, 1, 5, 6, 10, 11}


def test_mst_seed_is_deterministic():
    g = build_tri_grid(6, 6)
    assert mst_seed(g, [10, 30, 44], 0) == mst_seed(g, [10, 30, 44], 0)


def test_random_seed_is_deterministic_and_valid():
    g = build_tri_grid(6, 6)
    a = random_seed(g, [10, 30, 44], 0, 123)
    b = random_seed(g, [10, 30, 44], 0, 123)
    assert a == b
    a.validate([10, 30, 44])
    assert random_seed(g, [10, 30, 44], 0, 124) != a


def test_random_seed_budget():
    g = build_rect_grid(4, 4)
    with pytest.raises(BudgetInfeasible):
        random_seed(g, [3, 12], 0, 1, budget=2.0, max_tries=20)
    t = random_seed(g, [3, 12], 0, 1, budget=math.inf, max_tries=1)
    assert t.weight >= 6.0


def test_random_spanning_tree_skips_unreachable_component():
    g = apply_obstacles(build_rect_grid(3, 5), [ObstacleRegion.rectangle(1.5, -1, 2.5, 3)])
    t = random_spanning_tree(g, 0, 7)
    assert set(t.nodes()) == {0, 1, 5, 6, 10, 11}


def test_wilson_is_uniform_on_3x3_grid():
    g = build_rect_grid(3, 3)
    index = {frozenset(e): i for i, e in enumerate(enumerate_spanning_trees(g))}
    assert len(index) == 192
    rng = np.random.default_rng(2024)
    nbrs = g.neighbors_undirected()
    n = 100_000
    hits = Counter()
    for _ in range(n):
        t = random_spanning_tree(g, 4, rng, nbrs)
        hits[index[frozenset((min(p, v), max(p, v)) for p, v in t.edges())]] += 1
    observed = np.array([hits[i] for i in range(192)])
    _, p = stats.chisquare(observed)
    assert p > 1e-3
