"""Shortest-path searches on exact integer edge lengths."""

from __future__ import annotations

import heapq
import math
from typing import Container

from .graph import WeightedDigraph


def dijkstra(
    g: WeightedDigraph,
    source: int,
    *,
    reverse: bool = False,
    terminal: Container[int] = (),
    forbidden: Container[int] = (),
    stop_when: set[int] | None = None,
) -> tuple[dict[int, int], dict[int, int]]:
    """Single-source shortest paths with exact integer distances.

    With ``reverse=True`` the search follows edges backwards, so ``dist[v]``
    is the length of the shortest ``v -> source`` path and ``nxt[v]`` is the
    node after ``v`` on it. Otherwise ``dist[v]`` is ``source -> v`` and
    ``nxt[v]`` is the predecessor of ``v``.

    Nodes in ``terminal`` get a distance but are never expanded, so they can
    only end a path. Nodes in ``forbidden`` are never entered. The source
    itself is always expanded. ``stop_when`` ends the search once every node
    in it is settled (nodes that are unreachable keep it running to the end).
    """
    adj = g.in_edges if reverse else g.out_edges
    dist: dict[int, int] = {source: 0}
    link: dict[int, int] = {}
    done: set[int] = set()
    pending = set(stop_when) if stop_when else None
    heap = [(0, source)]
    while heap:
        d, u = heapq.heappop(heap)
        if u in done:
            continue
        done.add(u)
        if pending is not None:
            pending.discard(u)
            if not pending:
                break
        if u != source and u in terminal:
            continue
        for v, _, w in adj(u):
            if v in forbidden:
                continue
            nd = d + w
            old = dist.get(v)
            if old is None or nd < old:
                dist[v] = nd
                link[v] = u
                heapq.heappush(heap, (nd, v))
    return dist, link


def astar(
    g: WeightedDigraph,
    source: int,
    goal: int,
    *,
    forbidden: Container[int] = (),
) -> tuple[list[int], int] | None:
    """Shortest ``source -> goal`` path avoiding ``forbidden`` nodes.

    Uses straight-line distance to ``goal`` as the heuristic, which is
    admissible because edge weights are Euclidean lengths. Returns the node
    list and its exact length, or ``None`` when ``goal`` is unreachable.
    """
    gx, gy = g.position(goal)
    shrink = 1.0 - 1e-12

    def h(u: int) -> float:
        x, y = g.position(u)
        return math.hypot(x - gx, y - gy) * shrink

    best: dict[int, int] = {source: 0}
    prev: dict[int, int] = {}
    closed: set[int] = set()
    heap = [(h(source), 0, source)]
    while heap:
        _, d, u = heapq.heappop(heap)
        if u in closed:
            continue
        if u == goal:
            path = [u]
            while path[-1] != source:
                path.append(prev[path[-1]])
            path.reverse()
            return path, d
        closed.add(u)
        for v, _, w in g.out_edges(u):
            if v in forbidden or v in closed:
                continue
            nd = d + w
            old = best.get(v)
            if old is None or nd < old:
                best[v] = nd
                prev[v] = u
                heapq.heappush(heap, (g.to_float(nd) + h(v), nd, v))
    return None
