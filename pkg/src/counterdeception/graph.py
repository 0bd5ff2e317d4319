"""Weighted planar digraphs, grid builders, obstacle masks and instances."""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping, Sequence

import numpy as np

from .errors import InstanceError

Point = tuple[float, float]

BOUNDARY_TOL = 1e-9


def _check_point(p: Sequence[float]) -> Point:
    x, y = float(p[0]), float(p[1])
    if not (math.isfinite(x) and math.isfinite(y)):
        raise ValueError(f"non-finite coordinate {p!r}")
    return (x, y)


def _exact_parts(w: float) -> tuple[int, int]:
    """Return ``(numerator, k)`` with ``w == numerator / 2**k`` exactly."""
    num, den = w.as_integer_ratio()
    return num, den.bit_length() - 1


class WeightedDigraph:
    """Directed graph with planar node positions and Euclidean edge weights.

    Node ids are non-negative integers. They need not be contiguous: dropping
    nodes (``subgraph``, ``apply_obstacles``) keeps the ids of the survivors,
    so targets and starts stay valid across graph copies.

    Besides the float weight, each edge carries an exact integer weight in
    units of ``2**-scale_bits``. Path lengths are accumulated on those
    integers, which makes equal-length paths compare equal regardless of
    summation order. ``to_float`` converts back with correct rounding.

    Instances are treated as immutable once built.
    """

    def __init__(
        self,
        positions: Mapping[int, Sequence[float]],
        edges: Iterable[tuple[int, int] | tuple[int, int, float]],
        *,
        rel_tol: float = 1e-9,
    ) -> None:
        pos = {int(u): _check_point(p) for u, p in positions.items()}
        if any(u < 0 for u in pos):
            raise ValueError("node ids must be non-negative")
        self._ids: tuple[int, ...] = tuple(sorted(pos))
        self._pos = pos
        cap = (self._ids[-1] + 1) if self._ids else 0

        raw: dict[tuple[int, int], float] = {}
        for e in edges:
            u, v = int(e[0]), int(e[1])
            if u not in pos or v not in pos:
                raise ValueError(f"edge ({u}, {v}) references an unknown node")
            if u == v:
                raise ValueError(f"self-loop at node {u}")
            if (u, v) in raw:
                raise ValueError(f"parallel edge ({u}, {v})")
            (x0, y0), (x1, y1) = pos[u], pos[v]
            dist = math.hypot(x1 - x0, y1 - y0)
            if len(e) > 2 and e[2] is not None:
                w = float(e[2])
                if not math.isfinite(w) or w < 0:
                    raise ValueError(f"edge ({u}, {v}) has invalid weight {w!r}")
                if not math.isclose(w, dist, rel_tol=rel_tol, abs_tol=1e-12):
                    raise ValueError(
                        f"edge ({u}, {v}) weight {w!r} differs from its length {dist!r}"
                    )
            else:
                w = dist
            raw[(u, v)] = w

        parts = {w: _exact_parts(w) for w in set(raw.values())}
        self.scale_bits = max((k for _, k in parts.values()), default=0)
        self._scale = 1 << self.scale_bits
        exact = {w: num << (self.scale_bits - k) for w, (num, k) in parts.items()}

        out: list[list[tuple[int, float, int]]] = [[] for _ in range(cap)]
        inn: list[list[tuple[int, float, int]]] = [[] for _ in range(cap)]
        for (u, v) in sorted(raw):
            w = raw[(u, v)]
            out[u].append((v, w, exact[w]))
            inn[v].append((u, w, exact[w]))
        self._out = out
        self._in = inn
        self._n_edges = len(raw)
        self._coords: np.ndarray | None = None

    # -- basic queries -------------------------------------------------------

    @property
    def capacity(self) -> int:
        """One more than the largest node id (size for id-indexed arrays)."""
        return len(self._out)

    def nodes(self) -> tuple[int, ...]:
        return self._ids

    def __len__(self) -> int:
        return len(self._ids)

    def __contains__(self, u: object) -> bool:
        return isinstance(u, (int, np.integer)) and int(u) in self._pos

    @property
    def num_edges(self) -> int:
        return self._n_edges

    def position(self, u: int) -> Point:
        return self._pos[u]

    @property
    def coords(self) -> np.ndarray:
        """``(len(self), 2)`` array of positions in ascending id order."""
        if self._coords is None:
            self._coords = np.array([self._pos[u] for u in self._ids], dtype=float).reshape(-1, 2)
        return self._coords

    def out_edges(self, u: int) -> list[tuple[int, float, int]]:
        """Outgoing ``(v, weight, exact_weight)`` triples, ascending in ``v``."""
        return self._out[u]

    def in_edges(self, v: int) -> list[tuple[int, float, int]]:
        return self._in[v]

    def successors(self, u: int) -> list[int]:
        return [v for v, _, _ in self._out[u]]

    def has_edge(self, u: int, v: int) -> bool:
        if u >= len(self._out) or u < 0:
            return False
        return any(x == v for x, _, _ in self._out[u])

    def _edge(self, u: int, v: int) -> tuple[int, float, int]:
        if 0 <= u < len(self._out):
            for e in self._out[u]:
                if e[0] == v:
                    return e
        raise KeyError((u, v))

    def weight(self, u: int, v: int) -> float:
        return self._edge(u, v)[1]

    def exact_weight(self, u: int, v: int) -> int:
        return self._edge(u, v)[2]

    def edges(self) -> Iterator[tuple[int, int, float]]:
        """All directed edges ``(u, v, w)`` in ascending ``(u, v)`` order."""
        for u in self._ids:
            for v, w, _ in self._out[u]:
                yield (u, v, w)

    def to_float(self, exact: int) -> float:
        return exact / self._scale

    def from_float(self, value: float) -> int:
        """Largest exact length not exceeding ``value`` (``value`` finite)."""
        num, den = float(value).as_integer_ratio()
        return (num * self._scale) // den

    # -- derived structure ---------------------------------------------------

    def undirected_edges(self) -> list[tuple[int, int, float]]:
        """Edges of the undirected shadow as ``(u, v, w)`` with ``u < v``.

        When both directions exist the forward weight of ``u -> v`` is used.
        """
        seen: dict[tuple[int, int], float] = {}
        for u, v, w in self.edges():
            key = (u, v) if u < v else (v, u)
            if key not in seen or u < v:
                seen[key] = w
        return [(u, v, seen[(u, v)]) for (u, v) in sorted(seen)]

    def neighbors_undirected(self) -> list[list[int]]:
        """Id-indexed neighbour lists of the undirected shadow."""
        nbrs: list[set[int]] = [set() for _ in range(self.capacity)]
        for u, v, _ in self.edges():
            nbrs[u].add(v)
            nbrs[v].add(u)
        return [sorted(s) for s in nbrs]

    def is_symmetric(self) -> bool:
        for u, v, w in self.edges():
            try:
                if self.weight(v, u) != w:
                    return False
            except KeyError:
                return False
        return True

    def reachable_from(self, s: int) -> set[int]:
        seen = {s}
        queue = deque([s])
        while queue:
            u = queue.popleft()
            for v, _, _ in self._out[u]:
                if v not in seen:
                    seen.add(v)
                    queue.append(v)
        return seen

    def is_connected_undirected(self) -> bool:
        if not self._ids:
            return True
        nbrs = self.neighbors_undirected()
        seen = {self._ids[0]}
        stack = [self._ids[0]]
        while stack:
            u = stack.pop()
            for v in nbrs[u]:
                if v not in seen:
                    seen.add(v)
                    stack.append(v)
        return len(seen) == len(self._ids)

    def subgraph(self, keep: Iterable[int]) -> "WeightedDigraph":
        """Induced subgraph on ``keep``; ids are preserved."""
        keep_set = set(keep) & set(self._ids)
        pos = {u: self._pos[u] for u in keep_set}
        edges = [(u, v, w) for u, v, w in self.edges() if u in keep_set and v in keep_set]
        return WeightedDigraph(pos, edges)

    def edge_subgraph(self, edges: Iterable[tuple[int, int]]) -> "WeightedDigraph":
        """Subgraph with the given directed edges and all nodes of ``self``."""
        chosen = [(u, v, self.weight(u, v)) for u, v in edges]
        return WeightedDigraph(dict(self._pos), chosen)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, WeightedDigraph):
            return NotImplemented
        return self._pos == other._pos and list(self.edges()) == list(other.edges())

    def __repr__(self) -> str:
        return f"WeightedDigraph(nodes={len(self)}, edges={self.num_edges})"


# -- grid builders -------------------------------------------------------------


def build_rect_grid(rows: int, cols: int, spacing: float = 1.0) -> WeightedDigraph:
    """Rectangular lattice; node ``r * cols + c`` sits at ``(c * spacing, r * spacing)``.

    Orthogonal neighbours are joined by a pair of directed edges of weight
    ``spacing``.
    """
    if rows < 1 or cols < 1:
        raise ValueError("rows and cols must be positive")
    if not (spacing > 0 and math.isfinite(spacing)):
        raise ValueError("spacing must be a positive finite number")
    pos = {r * cols + c: (c * spacing, r * spacing) for r in range(rows) for c in range(cols)}
    return WeightedDigraph(pos, _rect_edges(rows, cols, float(spacing)))


def _rect_edges(rows: int, cols: int, spacing: float) -> list[tuple[int, int, float]]:
    edges = []
    for r in range(rows):
        for c in range(cols):
            u = r * cols + c
            if c + 1 < cols:
                edges += [(u, u + 1, spacing), (u + 1, u, spacing)]
            if r + 1 < rows:
                edges += [(u, u + cols, spacing), (u + cols, u, spacing)]
    return edges


def build_tri_grid(rows: int, cols: int, spacing: float = 1.0) -> WeightedDigraph:
    """Rectangular lattice plus a centre node in every cell.

    Corner ids follow ``build_rect_grid``; the centre of cell ``(r, c)`` gets id
    ``rows * cols + r * (cols - 1) + c`` and is linked both ways to the four
    cell corners with weight ``spacing * sqrt(2) / 2``.
    """
    if rows < 2 or cols < 2:
        raise ValueError("a triangulated grid needs at least 2 rows and 2 cols")
    if not (spacing > 0 and math.isfinite(spacing)):
        raise ValueError("spacing must be a positive finite number")
    spacing = float(spacing)
    pos = {r * cols + c: (c * spacing, r * spacing) for r in range(rows) for c in range(cols)}
    edges = _rect_edges(rows, cols, spacing)
    diag = math.hypot(spacing / 2, spacing / 2)
    base = rows * cols
    for r in range(rows - 1):
        for c in range(cols - 1):
            m = base + r * (cols - 1) + c
            pos[m] = ((c + 0.5) * spacing, (r + 0.5) * spacing)
            for corner in (r * cols + c, r * cols + c + 1, (r + 1) * cols + c, (r + 1) * cols + c + 1):
                edges += [(m, corner, diag), (corner, m, diag)]
    return WeightedDigraph(pos, edges)


@dataclass(frozen=True)
class GridSpec:
    kind: str
    rows: int
    cols: int
    spacing: float = 1.0

    def __post_init__(self) -> None:
        if self.kind not in ("rect", "tri"):
            raise ValueError(f"unknown grid kind {self.kind!r}")

    def build(self) -> WeightedDigraph:
        builder = build_rect_grid if self.kind == "rect" else build_tri_grid
        return builder(self.rows, self.cols, self.spacing)


# -- obstacles -----------------------------------------------------------------


def _segments_cross(p1: Point, p2: Point, q1: Point, q2: Point) -> bool:
    def orient(a: Point, b: Point, c: Point) -> float:
        return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])

    def on_seg(a: Point, b: Point, c: Point) -> bool:
        return min(a[0], b[0]) <= c[0] <= max(a[0], b[0]) and min(a[1], b[1]) <= c[1] <= max(a[1], b[1])

    d1, d2 = orient(q1, q2, p1), orient(q1, q2, p2)
    d3, d4 = orient(p1, p2, q1), orient(p1, p2, q2)
    if ((d1 > 0) != (d2 > 0)) and ((d3 > 0) != (d4 > 0)) and 0 not in (d1, d2, d3, d4):
        return True
    return (
        (d1 == 0 and on_seg(q1, q2, p1))
        or (d2 == 0 and on_seg(q1, q2, p2))
        or (d3 == 0 and on_seg(p1, p2, q1))
        or (d4 == 0 and on_seg(p1, p2, q2))
    )


@dataclass(frozen=True)
class ObstacleRegion:
    """Simple polygon (implicitly closed) marking ground that cannot be built on."""

    vertices: tuple[Point, ...]

    def __post_init__(self) -> None:
        verts = tuple(_check_point(p) for p in self.vertices)
        object.__setattr__(self, "vertices", verts)
        k = len(verts)
        if k < 3:
            raise ValueError("an obstacle polygon needs at least 3 vertices")
        segs = [(verts[i], verts[(i + 1) % k]) for i in range(k)]
        for i in range(k):
            for j in range(i + 1, k):
                if j == i + 1 or (i == 0 and j == k - 1):
                    continue
                if _segments_cross(*segs[i], *segs[j]):
                    raise ValueError("obstacle polygon is self-intersecting")

    @classmethod
    def rectangle(cls, x0: float, y0: float, x1: float, y1: float) -> "ObstacleRegion":
        return cls(((x0, y0), (x1, y0), (x1, y1), (x0, y1)))

    def covers(self, points: np.ndarray) -> np.ndarray:
        """Boolean mask of points strictly inside or on the boundary (even-odd rule)."""
        pts = np.asarray(points, dtype=float).reshape(-1, 2)
        x, y = pts[:, 0], pts[:, 1]
        inside = np.zeros(len(pts), dtype=bool)
        on_edge = np.zeros(len(pts), dtype=bool)
        verts = self.vertices
        k = len(verts)
        for i in range(k):
            (x0, y0), (x1, y1) = verts[i], verts[(i + 1) % k]
            crosses = (y0 > y) != (y1 > y)
            with np.errstate(divide="ignore", invalid="ignore"):
                x_at = x0 + (y - y0) * (x1 - x0) / (y1 - y0)
            inside ^= crosses & (x < x_at)
            dx, dy = x1 - x0, y1 - y0
            seg2 = dx * dx + dy * dy
            if seg2 == 0:
                dist = np.hypot(x - x0, y - y0)
            else:
                t = np.clip(((x - x0) * dx + (y - y0) * dy) / seg2, 0.0, 1.0)
                dist = np.hypot(x - (x0 + t * dx), y - (y0 + t * dy))
            on_edge |= dist <= BOUNDARY_TOL
        return inside | on_edge


def apply_obstacles(g: WeightedDigraph, regions: Sequence[ObstacleRegion]) -> WeightedDigraph:
    """Copy of ``g`` without the nodes covered by any region (boundary included).

    Edges are removed only with their endpoints; an edge that passes over a
    region while both endpoints lie outside it is kept.
    """
    if not regions:
        return g.subgraph(g.nodes())
    blocked = np.zeros(len(g), dtype=bool)
    for region in regions:
        blocked |= region.covers(g.coords)
    ids = g.nodes()
    return g.subgraph(ids[i] for i in range(len(ids)) if not blocked[i])


def snap_to_nodes(g: WeightedDigraph, pts: Sequence[Sequence[float]]) -> list[int]:
    """Nearest node for each point; equal distances resolve to the smaller id."""
    if len(g) == 0:
        raise ValueError("cannot snap to an empty graph")
    coords = g.coords
    ids = g.nodes()
    out = []
    for p in pts:
        x, y = _check_point(p)
        d2 = (coords[:, 0] - x) ** 2 + (coords[:, 1] - y) ** 2
        out.append(ids[int(np.argmin(d2))])
    return out


def total_weight(g: WeightedDigraph, edges: Iterable[tuple[int, int]]) -> float:
    """Total length of a set of directed edges of ``g``.

    The sum is exact and rounded once at the end, so the result does not
    depend on iteration order.
    """
    return g.to_float(sum(g.exact_weight(u, v) for u, v in set(edges)))


# -- instances -----------------------------------------------------------------


@dataclass(eq=True)
class Instance:
    """Base graph, start node, ordered targets, budget and retained obstacles.

    ``grid`` records how the graph was built (if it came from a grid) so the
    instance can be written back compactly.
    """

    graph: WeightedDigraph
    start: int
    targets: tuple[int, ...]
    budget: float = math.inf
    obstacles: tuple[ObstacleRegion, ...] = ()
    grid: GridSpec | None = field(default=None)

    def __post_init__(self) -> None:
        self.start = int(self.start)
        self.targets = tuple(int(t) for t in self.targets)
        self.obstacles = tuple(self.obstacles)
        self.budget = math.inf if self.budget is None else float(self.budget)
        if math.isnan(self.budget) or self.budget < 0:
            raise InstanceError(f"budget must be non-negative, got {self.budget!r}")
        if len(self.targets) < 2:
            raise InstanceError("at least two targets are required")
        if len(set(self.targets)) != len(self.targets):
            raise InstanceError("targets must be pairwise distinct")
        if self.start in self.targets:
            raise InstanceError("the start node cannot also be a target")
        for u in (self.start, *self.targets):
            if u not in self.graph:
                raise InstanceError(f"node {u} is not in the graph (removed by an obstacle?)")
        reach = self.graph.reachable_from(self.start)
        missing = [t for t in self.targets if t not in reach]
        if missing:
            raise InstanceError(f"targets {missing} are not reachable from the start")

    @classmethod
    def from_grid(
        cls,
        grid: GridSpec,
        start: int,
        targets: Sequence[int],
        budget: float = math.inf,
        obstacles: Sequence[ObstacleRegion] = (),
    ) -> "Instance":
        g = apply_obstacles(grid.build(), obstacles) if obstacles else grid.build()
        return cls(g, start, tuple(targets), budget, tuple(obstacles), grid)

    def with_budget(self, budget: float) -> "Instance":
        return Instance(self.graph, self.start, self.targets, budget, self.obstacles, self.grid)
