"""JSON files for instances, trees, reports and run statistics.

Instance::

    {"grid": {"kind": "rect"|"tri", "rows": int, "cols": int, "spacing": float} | null,
     "nodes": [[x, y] | null, ...], "edges": [[u, v, w], ...],
     "start": int, "targets": [int, ...], "budget": float | null,
     "obstacles": [[[x, y], ...], ...]}

Grid instances carry ``grid`` and omit ``nodes``/``edges`` (the graph is the
grid minus the obstacles). Explicit graphs set ``grid`` to null and list node
coordinates by id; ids removed from an otherwise dense range are ``null``. A
null budget means unbounded.

Tree::

    {"root": int, "edges": [[parent, child], ...], "report": <report>}

Report::

    {"cd": float, "forced": int, "avg_priority": float, "weight": float,
     "targets": [{"node": int, "ldp": int, "u": float, "forced": bool, "priority": float}, ...]}

Stats::

    {"iterations": int, "accepted": int, "wall_ms": int, "cd_history": [float, ...],
     "rng": {"algorithm": "PCG64", "seed": int | null, "seed_kind": "mst" | "random"}}
"""

from __future__ import annotations

import json
import math
from pathlib import Path
from typing import Any, Sequence

from .errors import InstanceError, TreeError
from .graph import GridSpec, Instance, ObstacleRegion, WeightedDigraph, apply_obstacles
from .metrics import CdReport, cd_tree
from .reattachment import RunStats
from .seeding import RNG_ALGORITHM
from .tree import RootedTree


def dumps(data: Any) -> str:
    return json.dumps(data, indent=1, allow_nan=False) + "\n"


def write_json(path: str | Path, data: Any) -> None:
    Path(path).write_text(dumps(data), encoding="utf-8")


def read_json(path: str | Path) -> Any:
    return json.loads(Path(path).read_text(encoding="utf-8"))


# -- instances -----------------------------------------------------------------


def instance_to_json(inst: Instance) -> dict:
    out: dict[str, Any] = {}
    if inst.grid is not None:
        gs = inst.grid
        out["grid"] = {"kind": gs.kind, "rows": gs.rows, "cols": gs.cols, "spacing": gs.spacing}
    else:
        g = inst.graph
        out["grid"] = None
        out["nodes"] = [list(g.position(u)) if u in g else None for u in range(g.capacity)]
        out["edges"] = [[u, v, w] for u, v, w in g.edges()]
    out["start"] = inst.start
    out["targets"] = list(inst.targets)
    out["budget"] = None if math.isinf(inst.budget) else inst.budget
    out["obstacles"] = [[list(p) for p in r.vertices] for r in inst.obstacles]
    return out


def instance_from_json(data: dict) -> Instance:
    try:
        obstacles = tuple(ObstacleRegion(tuple(tuple(p) for p in poly))
                          for poly in data.get("obstacles") or ())
        grid_data = data.get("grid")
        if grid_data is not None:
            grid = GridSpec(grid_data["kind"], int(grid_data["rows"]), int(grid_data["cols"]),
                            float(grid_data.get("spacing", 1.0)))
            g = grid.build()
            if obstacles:
                g = apply_obstacles(g, obstacles)
        else:
            if "nodes" not in data or "edges" not in data:
                raise InstanceError("instance needs either 'grid' or both 'nodes' and 'edges'")
            grid = None
            pos = {i: tuple(p) for i, p in enumerate(data["nodes"]) if p is not None}
            g = WeightedDigraph(pos, [tuple(e) for e in data["edges"]])
        budget = data.get("budget")
        return Instance(g, int(data["start"]), tuple(int(t) for t in data["targets"]),
                        math.inf if budget is None else float(budget), obstacles, grid)
    except (KeyError, TypeError) as exc:
        raise InstanceError(f"malformed instance: {exc!r}") from exc


def save_instance(inst: Instance, path: str | Path) -> None:
    write_json(path, instance_to_json(inst))


def load_instance(path: str | Path) -> Instance:
    return instance_from_json(read_json(path))


# -- trees ---------------------------------------------------------------------


def tree_to_json(tree: RootedTree, targets: Sequence[int] | None = None,
                 report: CdReport | None = None) -> dict:
    if report is None and targets is not None:
        report = cd_tree(tree, targets)
    out: dict[str, Any] = {"root": tree.root, "edges": [list(e) for e in tree.edges()]}
    if report is not None:
        out["report"] = report.to_json()
    return out


def tree_from_json(data: dict, graph: WeightedDigraph) -> tuple[RootedTree, CdReport | None]:
    """Rebuild a tree on ``graph``; edges are ``[parent, child]`` pairs."""
    try:
        root = int(data["root"])
        parent: dict[int, int] = {}
        for p, v in data["edges"]:
            p, v = int(p), int(v)
            if v in parent:
                raise TreeError(f"node {v} has two parents")
            parent[v] = p
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, TreeError):
            raise
        raise TreeError(f"malformed tree: {exc!r}") from exc
    dangling = sorted({u for e in parent.items() for u in e if u not in graph} |
                      ({root} - set(graph.nodes())))
    if dangling:
        raise TreeError(f"tree references nodes not in the graph: {dangling[:10]}")
    report = CdReport.from_json(data["report"]) if data.get("report") is not None else None
    return RootedTree(graph, root, parent), report


def save_tree(tree: RootedTree, path: str | Path, targets: Sequence[int] | None = None,
              report: CdReport | None = None) -> None:
    write_json(path, tree_to_json(tree, targets, report))


def load_tree(path: str | Path, graph: WeightedDigraph) -> tuple[RootedTree, CdReport | None]:
    return tree_from_json(read_json(path), graph)


# -- run statistics ------------------------------------------------------------


def stats_to_json(stats: RunStats, seed_kind: str = "mst", rng_seed: int | None = None) -> dict:
    out = stats.to_json()
    out["rng"] = {"algorithm": RNG_ALGORITHM, "seed": rng_seed, "seed_kind": seed_kind}
    return out


def stats_from_json(data: dict) -> RunStats:
    return RunStats.from_json(data)
