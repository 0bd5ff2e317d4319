"""Initial Steiner trees: trimmed minimum and trimmed uniform spanning trees."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .errors import BudgetInfeasible, InstanceError
from .graph import WeightedDigraph
from .metrics import compute_successors
from .tree import RootedTree

RNG_ALGORITHM = "PCG64"
DEFAULT_MAX_TRIES = 100


@dataclass(frozen=True)
class SeedKind:
    """Which seed tree to start from; ``random`` carries its RNG seed."""

    kind: str
    rng_seed: int | None = None

    def __post_init__(self) -> None:
        if self.kind not in ("mst", "random"):
            raise ValueError(f"unknown seed kind {self.kind!r}")
        if self.kind == "random" and self.rng_seed is None:
            raise ValueError("a random seed tree needs an explicit rng_seed")

    @classmethod
    def mst(cls) -> "SeedKind":
        return cls("mst")

    @classmethod
    def random(cls, rng_seed: int) -> "SeedKind":
        return cls("random", int(rng_seed))


def make_rng(seed: int | np.random.Generator) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.Generator(np.random.PCG64(int(seed)))


def trim(tree: RootedTree, targets: Iterable[int]) -> RootedTree:
    """Drop every subtree that holds no target; the root always stays."""
    tset = set(targets)
    missing = tset - set(tree.nodes())
    if missing:
        raise InstanceError(f"targets {sorted(missing)} are not in the tree")
    counts = compute_successors(tree, tset)
    parent = {v: p for v, p in tree.parent.items() if counts[v] > 0}
    return RootedTree(tree.graph, tree.root, parent)


def _orient(g: WeightedDigraph, start: int, edges: list[tuple[int, int]]) -> RootedTree:
    tree = RootedTree.from_edges(g, start, edges)
    for v, p in tree.parent.items():
        if not g.has_edge(p, v):
            raise InstanceError(f"spanning tree edge {p}->{v} has no matching directed edge")
    return tree


def minimum_spanning_edges(g: WeightedDigraph, *, forest: bool = False) -> list[tuple[int, int]]:
    """Kruskal on the undirected shadow; equal weights keep ``(u, v)`` order.

    A disconnected graph raises ``InstanceError`` unless ``forest`` is set, in
    which case the minimum spanning forest is returned.
    """
    parent = list(range(g.capacity))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    chosen = []
    # sort is stable, and undirected_edges() is already in (u, v) order
    for u, v, _ in sorted(g.undirected_edges(), key=lambda e: e[2]):
        ru, rv = find(u), find(v)
        if ru != rv:
            parent[ru] = rv
            chosen.append((u, v))
    if not forest and len(chosen) != len(g) - 1:
        raise InstanceError("graph is disconnected; no spanning tree exists")
    return chosen


def mst_seed(g: WeightedDigraph, targets: Iterable[int], start: int) -> RootedTree:
    """Minimum spanning tree of the start's component, rooted there and trimmed."""
    return trim(_orient(g, start, minimum_spanning_edges(g, forest=True)), targets)


def random_spanning_tree(
    g: WeightedDigraph,
    root: int,
    rng: int | np.random.Generator,
    nbrs: list[list[int]] | None = None,
) -> RootedTree:
    """Uniformly random spanning tree of the undirected shadow (Wilson's algorithm).

    Each node not yet in the tree starts a random walk that stops on hitting
    the tree; the walk's loop erasure is then added. Only the component of
    ``root`` is spanned. ``nbrs`` may pass in a cached
    ``g.neighbors_undirected()``.
    """
    gen = make_rng(rng)
    if nbrs is None:
        nbrs = g.neighbors_undirected()
    cap = g.capacity
    in_tree = [False] * cap
    nxt = [-1] * cap
    in_tree[root] = True
    comp = [root]
    seen = {root}
    for u in comp:
        for v in nbrs[u]:
            if v not in seen:
                seen.add(v)
                comp.append(v)
    comp.sort()
    buf = gen.random(4096).tolist()
    pos = 0
    for i in comp:
        u = i
        while not in_tree[u]:
            if pos == len(buf):
                buf = gen.random(4096).tolist()
                pos = 0
            nb = nbrs[u]
            v = nb[int(buf[pos] * len(nb))]
            pos += 1
            nxt[u] = v
            u = v
        u = i
        while not in_tree[u]:
            in_tree[u] = True
            u = nxt[u]
    parent = {u: nxt[u] for u in comp if u != root}
    tree = RootedTree(g, root, parent)
    for v, p in parent.items():
        if not g.has_edge(p, v):
            raise InstanceError(f"spanning tree edge {p}->{v} has no matching directed edge")
    return tree


def random_seed(
    g: WeightedDigraph,
    targets: Iterable[int],
    start: int,
    rng_seed: int | np.random.Generator,
    budget: float = math.inf,
    max_tries: int = DEFAULT_MAX_TRIES,
    nbrs: list[list[int]] | None = None,
) -> RootedTree:
    """Trimmed uniform spanning tree, redrawn until it fits ``budget``.

    Raises ``BudgetInfeasible`` after ``max_tries`` draws over budget.
    """
    targets = list(targets)
    rng = make_rng(rng_seed)
    if nbrs is None:
        nbrs = g.neighbors_undirected()
    limit = None if math.isinf(budget) else g.from_float(budget)
    for _ in range(max(1, int(max_tries))):
        tree = trim(random_spanning_tree(g, start, rng, nbrs), targets)
        if limit is None or tree.weight_exact <= limit:
            return tree
    raise BudgetInfeasible(f"no random seed tree within budget {budget} after {max_tries} tries")
