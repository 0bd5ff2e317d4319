"""Reattachment local search over Steiner trees.

One sweep detaches each non-forced target's private branch in priority
order, reroutes the target to every non-target node of the remaining tree,
and keeps the best resulting tree under :func:`compare_trees`. Sweeps repeat
until none improves the tree.

Routing is two-stage: the precomputed shortest path to the target is used
when it does not touch the remaining tree, otherwise a search around the tree
is run. ``improve_once`` evaluates all candidates of one detached target from
a single backward search plus O(|targets|) bookkeeping per candidate; the
``reference=True`` path materialises and scores every candidate tree with an
A* search instead and is kept for cross-checking.
"""

from __future__ import annotations

import math
import os
import time
from dataclasses import dataclass, field
from typing import Callable, Sequence

from .errors import BudgetInfeasible, InvariantViolation, TreeError
from .graph import WeightedDigraph
from .metrics import CdReport, cd_tree, compute_successors
from .paths import astar, dijkstra
from .seeding import DEFAULT_MAX_TRIES, SeedKind, mst_seed, random_seed
from .tree import RootedTree

# Validate every accepted tree when set (the test suite turns this on).
CHECK_INVARIANTS = os.environ.get("CD_CHECK_INVARIANTS", "") not in ("", "0")
invariant_checks = 0


@dataclass
class MsspTables:
    """Shortest paths from every node to each target over the full base graph."""

    dist: dict[int, dict[int, int]]
    nxt: dict[int, dict[int, int]]
    graph: WeightedDigraph

    def path(self, c: int, t: int) -> list[int] | None:
        """Nodes of the precomputed shortest ``c -> t`` path, or ``None``."""
        nxt = self.nxt[t]
        if c != t and c not in nxt:
            return None
        path = [c]
        while path[-1] != t:
            path.append(nxt[path[-1]])
        return path

    def distance(self, c: int, t: int) -> float:
        d = self.dist[t].get(c)
        return math.inf if d is None else self.graph.to_float(d)


def mssp_precompute(g: WeightedDigraph, targets: Sequence[int]) -> MsspTables:
    """One backward Dijkstra per target, run once per solve."""
    dist, nxt = {}, {}
    for t in targets:
        dist[t], nxt[t] = dijkstra(g, t, reverse=True)
    return MsspTables(dist, nxt, g)


@dataclass
class DetachResult:
    remaining: RootedTree
    detached_target: int
    anchor: int
    removed_nodes: list[int]


def detach_target(
    tree: RootedTree,
    targets: Sequence[int],
    t: int,
    counts: dict[int, int] | None = None,
) -> DetachResult:
    """Cut ``t`` loose together with its private branch.

    Walks up from ``t`` to the first ancestor (the anchor) whose subtree holds
    at least two targets and deletes every node strictly in between. ``t``
    must not be forced; detaching a forced target would strand the targets
    below it.
    """
    if counts is None:
        counts = compute_successors(tree, targets)
    if t not in tree or t == tree.root:
        raise TreeError(f"node {t} is not a detachable tree node")
    if counts[t] >= 2:
        raise TreeError(f"target {t} is forced; detaching it would disconnect the tree")
    removed = []
    x = tree.parent[t]
    while counts[x] < 2:
        removed.append(x)
        x = tree.parent[x]
    drop = set(removed)
    drop.add(t)
    parent = {v: p for v, p in tree.parent.items() if v not in drop}
    return DetachResult(RootedTree(tree.graph, tree.root, parent), t, x, removed)


@dataclass
class Route:
    path: list[int]
    length: int
    stage: int


def find_route(
    g: WeightedDigraph,
    remaining: RootedTree,
    t: int,
    c: int,
    tables: MsspTables,
) -> Route | None:
    """Path ``c -> t`` whose interior avoids every node of ``remaining``.

    Stage 1 reuses the precomputed shortest path when it is clear; stage 2
    runs A* around the tree. Returns ``None`` when ``t`` cannot be reached.
    """
    if c not in remaining:
        raise TreeError(f"candidate {c} is not in the remaining tree")
    path = tables.path(c, t)
    if path is not None and not any(v in remaining for v in path[1:-1]):
        return Route(path, tables.dist[t][c], 1)
    blocked = set(remaining.nodes())
    blocked.discard(c)
    found = astar(g, c, t, forbidden=blocked)
    if found is None:
        return None
    return Route(found[0], found[1], 2)


def graft(remaining: RootedTree, path: Sequence[int]) -> RootedTree:
    parent = dict(remaining.parent)
    for a, b in zip(path, path[1:]):
        parent[b] = a
    return RootedTree(remaining.graph, remaining.root, parent)


def reattach_target(
    g: WeightedDigraph,
    remaining: RootedTree,
    t: int,
    c: int,
    tables: MsspTables,
) -> RootedTree | None:
    """Hang ``t`` back onto candidate ``c`` (a non-target node of ``remaining``)."""
    route = find_route(g, remaining, t, c, tables)
    if route is None:
        return None
    return graft(remaining, route.path)


# -- one sweep -----------------------------------------------------------------


def _budget_limit(g: WeightedDigraph, budget: float) -> int | None:
    if budget is None or math.isinf(budget):
        return None
    return g.from_float(budget)


def _deadline_passed(deadline: float | None) -> bool:
    return deadline is not None and time.perf_counter() >= deadline


def improve_once(
    g: WeightedDigraph,
    tree: RootedTree,
    targets: Sequence[int],
    start: int,
    budget: float,
    tables: MsspTables,
    *,
    reference: bool = False,
    deadline: float | None = None,
) -> RootedTree | None:
    """Best single reattachment of ``tree``, or ``None`` if nothing beats it.

    Targets are tried in ascending priority, candidates in ascending id;
    among equally good results the first one found wins. Candidates over
    ``budget`` are rejected. If ``deadline`` (a ``time.perf_counter`` value)
    passes mid-sweep, the best improvement found so far is returned.
    """
    if tree.root != start:
        raise TreeError("tree is not rooted at the start node")
    tset = set(targets)
    bad = [v for v in tree.leaves() if v not in tset]
    if bad:
        raise TreeError(f"tree has non-target leaves {bad[:5]}; trim it first")
    if reference:
        return _improve_reference(g, tree, targets, budget, tables, deadline)
    return _improve_fast(g, tree, targets, budget, tables, deadline)


def _improve_reference(g, tree, targets, budget, tables, deadline):
    report = cd_tree(tree, targets)
    best_rank = report.key().rank
    best = None
    limit = _budget_limit(g, budget)
    tset = set(targets)
    for t, _ in report.priority_list():
        det = detach_target(tree, targets, t)
        for c in sorted(v for v in det.remaining.nodes() if v not in tset):
            cand = reattach_target(g, det.remaining, t, c, tables)
            if cand is None or (limit is not None and cand.weight_exact > limit):
                continue
            rank = cd_tree(cand, targets).key().rank
            if rank > best_rank:
                best_rank, best = rank, cand
            if _deadline_passed(deadline):
                return best
    return best


def _improve_fast(g, tree, targets, budget, tables, deadline):
    report = cd_tree(tree, targets)
    best_rank = report.key().rank
    best_move = None
    limit = _budget_limit(g, budget)
    tset = set(targets)
    counts = compute_successors(tree, tset)
    depth = tree.depth_exact()
    w_tree = tree.weight_exact

    below_target = {tree.root: False}
    for u in tree.preorder():
        flag = below_target[u] or u in tset
        for v in tree.children[u]:
            below_target[v] = flag

    for t, _ in report.priority_list():
        det = detach_target(tree, targets, t, counts)
        rem = det.remaining
        others = [x for x in targets if x != t]
        c_rem = compute_successors(rem, others)

        # state of the remaining tree over the other targets
        owner: dict[int, int] = {}
        u_rem: dict[int, int | None] = {}
        prio_rem: dict[int, int] = {}
        forced_rem = 0
        for o in others:
            if c_rem[o] >= 2:
                forced_rem += 1
                u_rem[o] = 0
                prio_rem[o] = 0
                continue
            u = o
            while c_rem[u] == 1:
                owner[u] = o
                if u == rem.root:
                    break
                u = rem.parent[u]
            if c_rem[u] >= 2:
                uo = depth[o] - depth[u]
                u_rem[o] = uo
                prio_rem[o] = -uo if below_target[o] else uo
            else:
                u_rem[o] = None
                prio_rem[o] = 0
        psum_rem = sum(prio_rem.values())
        ranked = sorted((d, o) for o, d in u_rem.items() if d is not None)
        w_rem = w_tree - (depth[t] - depth[det.anchor])

        candidates = sorted(v for v in rem.nodes() if v not in tset)
        lengths = _candidate_lengths(g, rem, t, candidates, tables)

        for c in candidates:
            entry = lengths.get(c)
            if entry is None:
                continue
            length = entry[0]
            w_new = w_rem + length
            if limit is not None and w_new > limit:
                continue
            p_t = -length if below_target[c] else length
            if c_rem[c] == 1:
                o = owner[c]
                u_o = depth[o] - depth[c]
                p_o = -u_o if below_target[o] else u_o
                psum = psum_rem - prio_rem[o] + p_o + p_t
                rest = math.inf
                for d, x in ranked:
                    if x != o:
                        rest = d
                        break
                cd_new = min(length, u_o, rest)
            else:
                psum = psum_rem + p_t
                cd_new = min(length, ranked[0][0]) if ranked else length
            rank = (cd_new, -forced_rem, psum, -w_new)
            if rank > best_rank:
                best_rank = rank
                best_move = (rem, t, c, entry)
        if _deadline_passed(deadline):
            break

    if best_move is None:
        return None
    rem, t, c, (_, path) = best_move
    new_tree = graft(rem, path)
    assert cd_tree(new_tree, targets).key().rank == best_rank
    return new_tree


def _candidate_lengths(
    g: WeightedDigraph,
    rem: RootedTree,
    t: int,
    candidates: list[int],
    tables: MsspTables,
) -> dict[int, tuple[int, list[int]]]:
    """Route length (and lazily-built path) from each candidate to ``t``.

    Stage 1 holds for a candidate whose precomputed path never re-enters the
    tree; the others share one backward search from ``t`` in which tree nodes
    may end a path but are never passed through.
    """
    nxt = tables.nxt[t]
    dist = tables.dist[t]
    # clear[v]: the precomputed path from v to t avoids the remaining tree
    clear: dict[int, bool] = {t: True}

    def is_clear(v: int) -> bool:
        chain = []
        while v not in clear:
            if v in rem or v not in nxt:
                clear[v] = False
                break
            chain.append(v)
            v = nxt[v]
        ok = clear[v]
        for x in chain:
            clear[x] = ok
        return ok

    out: dict[int, tuple[int, list[int]]] = {}
    need_search = []
    for c in candidates:
        first = nxt.get(c)
        if first is not None and is_clear(first):
            out[c] = (dist[c], _LazyPath(nxt, c, t))
        else:
            need_search.append(c)
    if need_search:
        d2, link = dijkstra(g, t, reverse=True, terminal=rem.children, stop_when=set(need_search))
        for c in need_search:
            if c in d2:
                out[c] = (d2[c], _LazyPath(link, c, t))
    return out


class _LazyPath:
    """Sequence view of a ``c -> t`` path stored as next-hop links."""

    __slots__ = ("_links", "_c", "_t", "_nodes")

    def __init__(self, links: dict[int, int], c: int, t: int) -> None:
        self._links, self._c, self._t = links, c, t
        self._nodes: list[int] | None = None

    def _build(self) -> list[int]:
        if self._nodes is None:
            nodes = [self._c]
            while nodes[-1] != self._t:
                nodes.append(self._links[nodes[-1]])
            self._nodes = nodes
        return self._nodes

    def __iter__(self):
        return iter(self._build())

    def __len__(self) -> int:
        return len(self._build())

    def __getitem__(self, i):
        return self._build()[i]


# -- full solve ----------------------------------------------------------------


@dataclass
class RunStats:
    iterations: int = 0
    reattachments_accepted: int = 0
    wall_time: float = 0.0
    cd_history: list[float] = field(default_factory=list)
    timed_out: bool = False

    def to_json(self) -> dict:
        return {
            "iterations": self.iterations,
            "accepted": self.reattachments_accepted,
            "wall_ms": int(round(self.wall_time * 1000)),
            "cd_history": list(self.cd_history),
        }

    @classmethod
    def from_json(cls, data: dict) -> "RunStats":
        return cls(int(data["iterations"]), int(data["accepted"]), data["wall_ms"] / 1000.0,
                   [float(x) for x in data["cd_history"]])


def _check_accepted(tree, report, prev_report, targets, limit):
    global invariant_checks
    invariant_checks += 1
    problems = tree.problems(targets)
    if limit is not None and tree.weight_exact > limit:
        problems.append(f"weight {tree.weight} exceeds the budget")
    if report.cd < prev_report.cd:
        problems.append(f"CD dropped from {prev_report.cd} to {report.cd}")
    if report.key().rank <= prev_report.key().rank:
        problems.append("accepted tree is not strictly better")
    if problems:
        raise InvariantViolation("; ".join(problems))


def reattachment_solve(
    g: WeightedDigraph,
    targets: Sequence[int],
    start: int,
    budget: float = math.inf,
    seed: SeedKind | RootedTree = SeedKind("mst"),
    *,
    max_tries: int = DEFAULT_MAX_TRIES,
    tables: MsspTables | None = None,
    deadline: float | None = None,
    callback: Callable[[RootedTree, CdReport], None] | None = None,
    nbrs: list[list[int]] | None = None,
    reference: bool = False,
) -> tuple[RootedTree, RunStats]:
    """Run reattachment sweeps from a seed tree until none improves it.

    ``seed`` is either a :class:`SeedKind` or a ready tree. ``callback`` sees
    every accepted tree with its report. Raises ``BudgetInfeasible`` when the
    seed does not fit the budget.
    """
    t0 = time.perf_counter()
    targets = list(targets)
    limit = _budget_limit(g, budget)
    if isinstance(seed, RootedTree):
        tree = seed
    elif seed.kind == "mst":
        tree = mst_seed(g, targets, start)
        if limit is not None and tree.weight_exact > limit:
            raise BudgetInfeasible(f"trimmed MST weight {tree.weight} exceeds budget {budget}")
    else:
        tree = random_seed(g, targets, start, seed.rng_seed, budget, max_tries, nbrs=nbrs)
    if limit is not None and tree.weight_exact > limit:
        raise BudgetInfeasible(f"seed tree weight {tree.weight} exceeds budget {budget}")
    tree.validate(targets)
    if tables is None:
        tables = mssp_precompute(g, targets)

    report = cd_tree(tree, targets)
    stats = RunStats(cd_history=[report.cd])
    while True:
        if _deadline_passed(deadline):
            stats.timed_out = True
            break
        stats.iterations += 1
        new = improve_once(g, tree, targets, start, budget, tables, reference=reference,
                           deadline=deadline)
        if new is None:
            break
        new_report = cd_tree(new, targets)
        if CHECK_INVARIANTS:
            _check_accepted(new, new_report, report, targets, limit)
        tree, report = new, new_report
        stats.reattachments_accepted += 1
        stats.cd_history.append(report.cd)
        if callback is not None:
            callback(tree, report)
    stats.wall_time = time.perf_counter() - t0
    return tree, stats
