import os

os.environ["CD_CHECK_INVARIANTS"] = "1"

import math  # noqa: E402

import networkx as nx  # noqa: E402
import numpy as np  # noqa: E402
import pytest  # noqa: E402
from hypothesis import HealthCheck, settings  # noqa: E402

from counterdeception import reattachment  # noqa: E402
from counterdeception.graph import WeightedDigraph  # noqa: E402
from counterdeception.tree import RootedTree  # noqa: E402

# the flag is read at import time; make sure it is on even if something
# imported the package before this file ran
reattachment.CHECK_INVARIANTS = True

settings.register_profile(
    "repo", deadline=None, suppress_health_check=[HealthCheck.too_slow], derandomize=True
)
settings.load_profile("repo")


def to_networkx(g: WeightedDigraph, edges=None) -> nx.DiGraph:
    h = nx.DiGraph()
    h.add_nodes_from(g.nodes())
    for u, v, w in g.edges():
        if edges is None or (u, v) in edges:
            h.add_edge(u, v, weight=w)
    return h


def random_geometric_graph(rng: np.random.Generator, n: int, m: int, *, symmetric=True):
    """Connected random graph on ``n`` jittered points with ``m`` segments."""
    pts = {i: (float(x), float(y)) for i, (x, y) in enumerate(rng.uniform(0, 10, size=(n, 2)))}
    order = rng.permutation(n)
    segs = set()
    for k in range(1, n):
        u, v = int(order[k]), int(order[rng.integers(0, k)])
        segs.add((min(u, v), max(u, v)))
    pairs = [(u, v) for u in range(n) for v in range(u + 1, n) if (u, v) not in segs]
    rng.shuffle(pairs)
    for u, v in pairs[: max(0, m - len(segs))]:
        segs.add((u, v))
    edges = []
    for u, v in sorted(segs):
        if symmetric:
            edges += [(u, v), (v, u)]
        else:
            edges.append((u, v) if rng.random() < 0.5 else (v, u))
    return WeightedDigraph(pts, edges)


def random_tree_on(g: WeightedDigraph, root: int, rng: np.random.Generator) -> RootedTree:
    """Random BFS-ish spanning tree of ``g`` grown from ``root``."""
    parent = {}
    seen = {root}
    frontier = [root]
    while frontier:
        u = frontier.pop(int(rng.integers(0, len(frontier))))
        for v in g.successors(u):
            if v not in seen:
                seen.add(v)
                parent[v] = u
                frontier.append(v)
    return RootedTree(g, root, parent)


@pytest.fixture
def three_branch():
    """Junction j one unit past s; branches of length 2, 1, 3 to targets 0, 1, 2."""
    pos = {
        0: (0.0, 0.0),  # s
        1: (1.0, 0.0),  # j
        2: (1.0, 1.0), 3: (1.0, 2.0),  # t0 = 3
        4: (2.0, 0.0),  # t1 = 4
        5: (1.0, -1.0), 6: (1.0, -2.0), 7: (1.0, -3.0),  # t2 = 7
    }
    edges = [(0, 1), (1, 2), (2, 3), (1, 4), (1, 5), (5, 6), (6, 7)]
    g = WeightedDigraph(pos, edges + [(v, u) for u, v in edges])
    tree = RootedTree(g, 0, {v: u for u, v in edges})
    return g, tree, [3, 4, 7]


def approx_equal(a: float, b: float) -> bool:
    return math.isclose(a, b, rel_tol=1e-12, abs_tol=1e-12)


# one line per acceptance criterion, repeated at the end of the run
acceptance_lines: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if acceptance_lines:
        terminalreporter.section("acceptance criteria")
        for line in acceptance_lines:
            terminalreporter.write_line(line)
