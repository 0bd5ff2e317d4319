"""Exhaustive ground truth for tiny instances."""

from __future__ import annotations

import itertools
import math
from typing import Iterator, Sequence

from .errors import BudgetInfeasible, GuardError, InstanceError
from .graph import WeightedDigraph
from .metrics import cd_general_exact, cd_tree
from .seeding import trim
from .tree import RootedTree

SPANNING_NODE_GUARD = 25
SUBGRAPH_EDGE_GUARD = 12


def enumerate_spanning_trees(g: WeightedDigraph) -> Iterator[list[tuple[int, int]]]:
    """Yield every spanning tree of the undirected shadow exactly once.

    Trees are grown from the smallest node id. At each step a frontier edge
    is either added or excluded for good; exclusion is only explored while
    the remaining edges still connect the graph, i.e. when the edge is not a
    bridge, so no branch dead-ends. Each tree is a list of ``(u, v)`` pairs
    with ``u < v``.
    """
    nodes = g.nodes()
    n = len(nodes)
    if n > SPANNING_NODE_GUARD:
        raise GuardError(f"{n} nodes exceed the enumeration guard of {SPANNING_NODE_GUARD}")
    if n == 0:
        return
    if not g.is_connected_undirected():
        raise InstanceError("graph is disconnected; it has no spanning tree")
    edges = [(u, v) for u, v, _ in g.undirected_edges()]
    incident: dict[int, list[int]] = {u: [] for u in nodes}
    for i, (u, v) in enumerate(edges):
        incident[u].append(i)
        incident[v].append(i)
    alive = [True] * len(edges)
    inside = {nodes[0]}
    chosen: list[int] = []

    def outer(i: int) -> int:
        u, v = edges[i]
        return v if u in inside else u

    def still_connected() -> bool:
        seen = {nodes[0]}
        stack = [nodes[0]]
        while stack:
            u = stack.pop()
            for i in incident[u]:
                if alive[i]:
                    a, b = edges[i]
                    w = b if a == u else a
                    if w not in seen:
                        seen.add(w)
                        stack.append(w)
        return len(seen) == n

    def grow(frontier: list[int]) -> Iterator[list[tuple[int, int]]]:
        if len(chosen) == n - 1:
            yield [edges[i] for i in chosen]
            return
        e = frontier[-1]
        rest = frontier[:-1]
        v = outer(e)
        # trees containing e
        inside.add(v)
        chosen.append(e)
        nxt = [i for i in rest if not (edges[i][0] in inside and edges[i][1] in inside)]
        for i in incident[v]:
            a, b = edges[i]
            if alive[i] and (b if a == v else a) not in inside:
                nxt.append(i)
        yield from grow(nxt)
        chosen.pop()
        inside.discard(v)
        # trees avoiding e
        alive[e] = False
        if still_connected():
            yield from grow(rest)
        alive[e] = True

    if n == 1:
        yield []
        return
    yield from grow(list(incident[nodes[0]]))


def _oriented(g: WeightedDigraph, start: int, edges: list[tuple[int, int]]) -> RootedTree | None:
    tree = RootedTree.from_edges(g, start, edges)
    for v, p in tree.parent.items():
        if not g.has_edge(p, v):
            return None
    return tree


def _score_spanning_tree(g, start, tset, nbrs, edges):
    """``(cd, trimmed weight)`` in exact units, or ``None`` if not orientable.

    A flat version of orient + trim + ``cd_tree`` for the enumeration loop;
    only the winner is materialised as a ``RootedTree``.
    """
    for u, v in edges:
        nbrs[u].append(v)
        nbrs[v].append(u)
    parent = {start: -1}
    order = [start]
    for u in order:
        for v in nbrs[u]:
            if v not in parent:
                parent[v] = u
                order.append(v)
    for u, v in edges:
        nbrs[u].clear()
        nbrs[v].clear()
    count = dict.fromkeys(order, 0)
    for t in tset:
        count[t] = 1
    weight = 0
    for v in reversed(order):
        p = parent[v]
        if p < 0 or count[v] == 0:
            continue
        if not g.has_edge(p, v):
            return None
        weight += g.exact_weight(p, v)
        count[p] += count[v]
    cd = None
    for t in tset:
        u = t
        length = 0
        while count[u] < 2:
            p = parent[u]
            length += g.exact_weight(p, u)
            u = p
        cd = length if cd is None else min(cd, length)
    return cd, weight


def brute_force_tree_optimum(
    g: WeightedDigraph,
    targets: Sequence[int],
    start: int,
    budget: float = math.inf,
) -> tuple[RootedTree, float]:
    """Best trimmed spanning tree by CD, then lower weight, then enumeration order.

    Every spanning tree is oriented from ``start`` and trimmed; trees whose
    trimmed weight exceeds ``budget`` are skipped. Distinct spanning trees
    that trim to the same Steiner tree are all visited.
    """
    targets = list(targets)
    if len(targets) < 2:
        raise InstanceError("counterdeceptiveness needs at least two targets")
    tset = set(targets)
    limit = None if math.isinf(budget) else g.from_float(budget)
    nbrs: dict[int, list[int]] = {u: [] for u in g.nodes()}
    best_edges = None
    best_rank = None
    for edges in enumerate_spanning_trees(g):
        scored = _score_spanning_tree(g, start, tset, nbrs, edges)
        if scored is None:
            continue
        cd, w = scored
        if limit is not None and w > limit:
            continue
        rank = (cd, -w)
        if best_rank is None or rank > best_rank:
            best_edges, best_rank = edges, rank
    if best_edges is None:
        raise BudgetInfeasible(f"no trimmed spanning tree fits budget {budget}")
    best = trim(_oriented(g, start, best_edges), targets)
    return best, g.to_float(best_rank[0])


def brute_force_subgraph_optimum(
    g: WeightedDigraph,
    targets: Sequence[int],
    start: int,
    budget: float = math.inf,
) -> float:
    """Best CD over all directed subgraphs that keep every target reachable.

    Every road segment of the undirected shadow is either left out or built
    one-way in either direction or two-way (where ``g`` has those directed
    edges); a segment costs its length once however it is used. Limited to
    ``SUBGRAPH_EDGE_GUARD`` segments.
    """
    targets = list(targets)
    segs = g.undirected_edges()
    if len(segs) > SUBGRAPH_EDGE_GUARD:
        raise GuardError(f"{len(segs)} edges exceed the subgraph guard of {SUBGRAPH_EDGE_GUARD}")
    limit = None if math.isinf(budget) else g.from_float(budget)
    options = []
    for u, v, _ in segs:
        fwd, bwd = g.has_edge(u, v), g.has_edge(v, u)
        w = g.exact_weight(u, v) if fwd else g.exact_weight(v, u)
        opts = [((), 0)]
        if fwd:
            opts.append((((u, v),), w))
        if bwd:
            opts.append((((v, u),), w))
        if fwd and bwd:
            opts.append((((u, v), (v, u)), w))
        options.append(opts)

    best = None
    for combo in itertools.product(*options):
        w = sum(c[1] for c in combo)
        if limit is not None and w > limit:
            continue
        chosen = [e for c in combo for e in c[0]]
        adj: dict[int, list[int]] = {}
        for a, b in chosen:
            adj.setdefault(a, []).append(b)
        seen = {start}
        stack = [start]
        while stack:
            a = stack.pop()
            for b in adj.get(a, ()):
                if b not in seen:
                    seen.add(b)
                    stack.append(b)
        if any(t not in seen for t in targets):
            continue
        cd = cd_general_exact(g, targets, start, chosen)
        if best is None or cd > best:
            best = cd
    if best is None:
        raise BudgetInfeasible(f"no connected subgraph fits budget {budget}")
    return g.to_float(best)
