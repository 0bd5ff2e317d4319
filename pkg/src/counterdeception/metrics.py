"""Counterdeceptiveness of designs: unique distances, priorities, comparison.

All lengths are accumulated on the graph's exact integer weights; the float
fields of a report are rounded from those once.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .errors import GuardError, InstanceError
from .graph import WeightedDigraph
from .tree import RootedTree

GENERAL_EDGE_GUARD = 30


@dataclass(frozen=True)
class TargetRecord:
    node: int
    ldp: int
    unique_distance: float
    forced: bool
    priority: float


@dataclass(frozen=True)
class ComparisonKey:
    """The four comparison keys of a design, best-first comparable via ``rank``."""

    cd: float
    forced_count: int
    avg_priority: float
    weight: float
    exact: tuple[int, int, int, int] | None = field(default=None, compare=False, repr=False)

    @property
    def rank(self) -> tuple:
        """Tuple that sorts larger for better designs.

        Uses exact integer criteria when available, floats otherwise.
        """
        if self.exact is not None:
            cd, forced, psum, w = self.exact
            return (cd, -forced, psum, -w)
        return (self.cd, -self.forced_count, self.avg_priority, -self.weight)


@dataclass(frozen=True)
class CdReport:
    """Per-target unique distances plus the aggregate criteria of one tree."""

    targets: tuple[TargetRecord, ...]
    cd: float
    forced_count: int
    avg_priority: float
    weight: float
    exact: tuple[int, int, int, int] | None = field(default=None, compare=False, repr=False)

    def key(self) -> ComparisonKey:
        return ComparisonKey(self.cd, self.forced_count, self.avg_priority, self.weight, self.exact)

    def record(self, t: int) -> TargetRecord:
        for rec in self.targets:
            if rec.node == t:
                return rec
        raise KeyError(t)

    def priority_list(self) -> list[tuple[int, float]]:
        """Non-forced targets as ``(target, priority)``, ascending, ties by id."""
        pairs = [(r.node, r.priority) for r in self.targets if not r.forced]
        return sorted(pairs, key=lambda p: (p[1], p[0]))

    def to_json(self) -> dict:
        return {
            "cd": self.cd,
            "forced": self.forced_count,
            "avg_priority": self.avg_priority,
            "weight": self.weight,
            "targets": [
                {"node": r.node, "ldp": r.ldp, "u": r.unique_distance, "forced": r.forced,
                 "priority": r.priority}
                for r in self.targets
            ],
        }

    @classmethod
    def from_json(cls, data: dict) -> "CdReport":
        recs = tuple(
            TargetRecord(int(r["node"]), int(r["ldp"]), float(r["u"]), bool(r["forced"]),
                         float(r["priority"]))
            for r in data["targets"]
        )
        return cls(recs, float(data["cd"]), int(data["forced"]), float(data["avg_priority"]),
                   float(data["weight"]))


def compute_successors(tree: RootedTree, targets: Iterable[int]) -> dict[int, int]:
    """Number of targets in the subtree of every node (a node counts itself)."""
    tset = set(targets)
    counts = {}
    for u in reversed(tree.preorder()):
        c = 1 if u in tset else 0
        for v in tree.children[u]:
            c += counts[v]
        counts[u] = c
    return counts


def last_deceptive_point(tree: RootedTree, counts: dict[int, int], t: int) -> int:
    """Deepest node on the root-to-``t`` path whose subtree holds two or more targets."""
    u = t
    while counts[u] < 2:
        if u == tree.root:
            raise InstanceError("fewer than two targets in the tree")
        u = tree.parent[u]
    return u


def unique_distance(tree: RootedTree, counts: dict[int, int], t: int) -> float:
    """Length of the tree path from the last deceptive point of ``t`` to ``t``."""
    depth = tree.depth_exact()
    ldp = last_deceptive_point(tree, counts, t)
    return tree.graph.to_float(depth[t] - depth[ldp])


def cd_tree(tree: RootedTree, targets: Sequence[int]) -> CdReport:
    """Full counterdeceptiveness report of a rooted tree.

    A target is forced when another target sits below it; its unique distance
    is then 0 and its priority 0. A non-forced target that hangs below some
    forced target gets priority ``-U``, every other target ``+U``.
    """
    targets = list(targets)
    if len(targets) < 2:
        raise InstanceError("counterdeceptiveness needs at least two targets")
    tset = set(targets)
    g = tree.graph
    counts = compute_successors(tree, tset)
    depth = tree.depth_exact()

    below_target: dict[int, bool] = {tree.root: False}
    for u in tree.preorder():
        flag = below_target[u] or u in tset
        for v in tree.children[u]:
            below_target[v] = flag

    records = []
    u_min = None
    forced_count = 0
    psum = 0
    for t in targets:
        if t not in counts:
            raise InstanceError(f"target {t} is not in the tree")
        ldp = last_deceptive_point(tree, counts, t)
        u_exact = depth[t] - depth[ldp]
        forced = ldp == t
        if forced:
            forced_count += 1
            p_exact = 0
        else:
            p_exact = -u_exact if below_target[t] else u_exact
        psum += p_exact
        u_min = u_exact if u_min is None else min(u_min, u_exact)
        records.append(TargetRecord(t, ldp, g.to_float(u_exact), forced, g.to_float(p_exact)))

    w_exact = tree.weight_exact
    n = len(targets)
    return CdReport(
        targets=tuple(records),
        cd=g.to_float(u_min),
        forced_count=forced_count,
        avg_priority=psum / (n << g.scale_bits),
        weight=g.to_float(w_exact),
        exact=(u_min, forced_count, psum, w_exact),
    )


def priorities(tree: RootedTree, targets: Sequence[int]) -> list[tuple[int, float]]:
    """Reattachment order: non-forced targets sorted by ascending priority."""
    return cd_tree(tree, targets).priority_list()


def compare_trees(a: CdReport | ComparisonKey, b: CdReport | ComparisonKey) -> int:
    """``1`` if ``a`` is the better design, ``-1`` if ``b`` is, ``0`` on a full tie.

    Criteria in order: larger CD, fewer forced targets, larger average
    priority, smaller weight.
    """
    ka = a.key() if isinstance(a, CdReport) else a
    kb = b.key() if isinstance(b, CdReport) else b
    if ka.exact is None or kb.exact is None:
        ra = (ka.cd, -ka.forced_count, ka.avg_priority, -ka.weight)
        rb = (kb.cd, -kb.forced_count, kb.avg_priority, -kb.weight)
    else:
        ra, rb = ka.rank, kb.rank
    return (ra > rb) - (ra < rb)


# -- general subgraphs ---------------------------------------------------------


def cd_general_exact(
    g: WeightedDigraph,
    targets: Sequence[int],
    start: int,
    edges: Iterable[tuple[int, int]] | None = None,
) -> int:
    """Exact-integer version of :func:`cd_general`."""
    targets = list(targets)
    if len(targets) < 2:
        raise InstanceError("counterdeceptiveness needs at least two targets")
    if edges is None:
        edge_list = [(u, v) for u, v, _ in g.edges()]
    else:
        edge_list = sorted(set(edges))
    if len(edge_list) > GENERAL_EDGE_GUARD:
        raise GuardError(f"{len(edge_list)} edges exceed the path-enumeration guard of {GENERAL_EDGE_GUARD}")

    adj: dict[int, list[tuple[int, int]]] = {}
    for u, v in edge_list:
        adj.setdefault(u, []).append((v, g.exact_weight(u, v)))
    bit = {t: 1 << i for i, t in enumerate(targets)}

    nodes = set(adj) | {v for u, v in edge_list} | {start} | set(targets)
    reach: dict[int, int] = {}
    for x in nodes:
        mask = 0
        seen = {x}
        stack = [x]
        while stack:
            u = stack.pop()
            mask |= bit.get(u, 0)
            for v, _ in adj.get(u, ()):
                if v not in seen:
                    seen.add(v)
                    stack.append(v)
        reach[x] = mask
    for t in targets:
        if not reach[start] & bit[t]:
            raise InstanceError(f"target {t} is not reachable from the start")

    best_all = None
    for t in targets:
        others = reach[start] & ~bit[t]
        best = None
        # (node, length so far, length at last node still reaching another target)
        on_path = {start}
        stack: list = [(start, 0, 0, iter(adj.get(start, ())))]
        while stack:
            u, d, last, it = stack[-1]
            nxt = next(it, None)
            if nxt is None:
                stack.pop()
                on_path.discard(u)
                continue
            v, w = nxt
            if v in on_path or not reach[v] & bit[t]:
                continue
            dv = d + w
            lv = dv if reach[v] & others else last
            if v == t:
                cand = dv - lv
                if best is None or cand < best:
                    best = cand
                continue
            on_path.add(v)
            stack.append((v, dv, lv, iter(adj.get(v, ()))))
        best_all = best if best_all is None else min(best_all, best)
        if best_all == 0:
            break
    return best_all


def cd_general(
    g: WeightedDigraph,
    targets: Sequence[int],
    start: int,
    edges: Iterable[tuple[int, int]] | None = None,
) -> float:
    """Counterdeceptiveness of an arbitrary subgraph by simple-path enumeration.

    ``edges`` restricts ``g`` to a set of directed edges (all of ``g`` if
    omitted). For every target all simple start-to-target paths are walked;
    the last deceptive point on a path is its last node from which some other
    target is still reachable in the subgraph. Intended for small graphs: more
    than ``GENERAL_EDGE_GUARD`` edges raises ``GuardError``.
    """
    return g.to_float(cd_general_exact(g, targets, start, edges))
