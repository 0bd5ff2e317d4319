"""Random grid instances and the bundled airfield demo."""

from __future__ import annotations

import math
from importlib import resources
from typing import Sequence

import numpy as np

from .errors import InstanceError
from .graph import GridSpec, Instance, ObstacleRegion, apply_obstacles
from .seeding import make_rng, mst_seed


def parse_budget_factor(value: float | str | None) -> float:
    if value is None:
        return math.inf
    if isinstance(value, str):
        value = value.strip().lower()
        if value in ("inf", "infinity", "none", "unbounded"):
            return math.inf
    factor = float(value)
    if math.isnan(factor) or factor < 0:
        raise ValueError(f"budget factor must be a non-negative number or 'inf', got {value!r}")
    return factor


def gen_instance(
    kind: str,
    rows: int,
    cols: int,
    n_targets: int,
    rng_seed: int | np.random.Generator,
    budget_factor: float | str = math.inf,
    obstacles: Sequence[ObstacleRegion] = (),
    spacing: float = 1.0,
) -> Instance:
    """Grid instance with a random start and random targets.

    Start and targets are drawn without replacement from the nodes left after
    the obstacles are applied; the first draw is the start. The budget is
    ``budget_factor`` times the weight of the trimmed MST seed.
    """
    if n_targets < 2:
        raise InstanceError("at least two targets are required")
    grid = GridSpec(kind, int(rows), int(cols), float(spacing))
    g = grid.build()
    if obstacles:
        g = apply_obstacles(g, obstacles)
    nodes = np.array(g.nodes(), dtype=np.int64)
    if n_targets + 1 > len(nodes):
        raise InstanceError(f"{n_targets} targets and a start need more than {len(nodes)} nodes")
    rng = make_rng(rng_seed)
    picks = [int(x) for x in rng.choice(nodes, n_targets + 1, replace=False)]
    inst = Instance(g, picks[0], tuple(picks[1:]), math.inf, tuple(obstacles), grid)
    factor = parse_budget_factor(budget_factor)
    if math.isinf(factor):
        return inst
    w = mst_seed(g, inst.targets, inst.start).weight
    return inst.with_budget(factor * w)


def load_airfield() -> Instance:
    """The bundled obstacle-masked airfield instance (about 46k nodes)."""
    from .fileio import instance_from_json

    text = resources.files(__package__).joinpath("data", "airfield.json").read_text("utf-8")
    import json

    return instance_from_json(json.loads(text))


def airfield_layout() -> dict:
    """Parameters the bundled airfield file was generated from.

    A 160 x 160 triangulated grid with spacing 1, a runway strip and an
    apron block masked out, five targets at building-like spots and a start
    on the southern fence. The budget is twice the trimmed MST seed weight.
    """
    return {
        "grid": GridSpec("tri", 160, 160, 1.0),
        "obstacles": (
            ObstacleRegion.rectangle(20.2, 70.2, 140.8, 84.8),
            ObstacleRegion.rectangle(95.2, 20.2, 125.8, 55.8),
        ),
        "start_xy": (80.0, 0.0),
        "target_xy": ((30.0, 30.0), (135.0, 10.0), (20.0, 120.0), (80.0, 140.0), (145.0, 110.0)),
        "budget_factor": 2.0,
    }


def build_airfield() -> Instance:
    """Rebuild the airfield instance from :func:`airfield_layout`."""
    from .graph import snap_to_nodes

    lay = airfield_layout()
    grid = lay["grid"]
    g = apply_obstacles(grid.build(), lay["obstacles"])
    start = snap_to_nodes(g, [lay["start_xy"]])[0]
    targets = tuple(snap_to_nodes(g, lay["target_xy"]))
    inst = Instance(g, start, targets, math.inf, lay["obstacles"], grid)
    w = mst_seed(g, targets, start).weight
    return inst.with_budget(lay["budget_factor"] * w)
