"""Invariant checks for instance and tree files."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .graph import Instance
from .tree import RootedTree


@dataclass(frozen=True)
class Check:
    name: str
    ok: bool
    detail: str = ""


def check_instance(inst: Instance) -> list[Check]:
    """Graph and instance invariants.

    Construction already rejects most broken instances, so these mostly
    confirm what the loader accepted; symmetry is only required of grids.
    """
    g = inst.graph
    checks = []
    neg = [(u, v) for u, v, w in g.edges() if w < 0]
    checks.append(Check("weights-nonnegative", not neg, f"negative: {neg[:5]}" if neg else ""))
    bad = []
    for u, v, w in g.edges():
        (ax, ay), (bx, by) = g.position(u), g.position(v)
        if not math.isclose(w, math.hypot(bx - ax, by - ay), rel_tol=1e-9, abs_tol=1e-12):
            bad.append((u, v))
    checks.append(Check("weights-euclidean", not bad, f"off: {bad[:5]}" if bad else ""))
    if inst.grid is not None:
        sym = g.is_symmetric()
        checks.append(Check("graph-symmetric", sym, "" if sym else "a grid edge lacks its reverse"))
    else:
        checks.append(Check("graph-symmetric", True, "explicit graph, not required"))
    ts = inst.targets
    checks.append(Check("targets-count", len(ts) >= 2, f"{len(ts)} targets"))
    checks.append(Check("targets-distinct", len(set(ts)) == len(ts)))
    checks.append(Check("start-not-target", inst.start not in ts))
    reach = g.reachable_from(inst.start)
    lost = [t for t in ts if t not in reach]
    checks.append(Check("targets-reachable", not lost, f"unreachable: {lost}" if lost else ""))
    checks.append(Check("budget-nonnegative", inst.budget >= 0, f"budget {inst.budget}"))
    return checks


def check_tree(tree: RootedTree, inst: Instance) -> list[Check]:
    """Tree structure, root, leaves-are-targets and budget checks."""
    checks = []
    missing_nodes = sorted(u for u in tree.nodes() if u not in inst.graph)
    if missing_nodes:
        checks.append(Check("nodes-in-graph", False, f"unknown nodes: {missing_nodes[:10]}"))
        return checks
    checks.append(Check("nodes-in-graph", True))
    checks.append(Check("rooted-at-start", tree.root == inst.start,
                        f"root {tree.root}, start {inst.start}"))
    structural = tree.problems(require_leaf_targets=False)
    checks.append(Check("tree-structure", not structural, "; ".join(structural)))
    missing = sorted(set(inst.targets) - set(tree.nodes()))
    extra = sorted(v for v in tree.leaves() if v not in set(inst.targets))
    msg = []
    if missing:
        msg.append(f"missing targets {missing}")
    if extra:
        msg.append(f"non-target leaves {extra[:10]}")
    checks.append(Check("leaves-are-targets", not msg, "; ".join(msg)))
    w = tree.weight
    over = not math.isinf(inst.budget) and tree.weight_exact > inst.graph.from_float(inst.budget)
    checks.append(Check("within-budget", not over, f"weight {w:g}, budget {inst.budget:g}"))
    return checks
