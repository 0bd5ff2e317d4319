"""Rooted trees embedded in a base graph."""

from __future__ import annotations

from typing import Iterable, Iterator, Mapping

from .errors import TreeError
from .graph import WeightedDigraph


class RootedTree:
    """A tree inside ``graph`` with every edge oriented away from ``root``.

    Stored as a parent map (the root has no entry) plus sorted child lists.
    Treat instances as values: operations that change a tree return a new one.
    """

    __slots__ = ("graph", "root", "parent", "children", "_depth")

    def __init__(self, graph: WeightedDigraph, root: int, parent: Mapping[int, int]) -> None:
        self.graph = graph
        self.root = int(root)
        self.parent: dict[int, int] = {int(v): int(p) for v, p in parent.items()}
        if self.root in self.parent:
            raise TreeError("the root cannot have a parent")
        children: dict[int, list[int]] = {self.root: []}
        for v in self.parent:
            children.setdefault(v, [])
        for v, p in self.parent.items():
            if p not in children:
                raise TreeError(f"node {v} hangs from {p}, which is not in the tree")
            children[p].append(v)
        for kids in children.values():
            kids.sort()
        self.children = children
        self._depth: dict[int, int] | None = None

    # -- construction helpers --------------------------------------------------

    @classmethod
    def from_edges(
        cls, graph: WeightedDigraph, root: int, edges: Iterable[tuple[int, int]]
    ) -> "RootedTree":
        """Orient an undirected edge set away from ``root``.

        Only the component containing ``root`` is kept. Raises ``TreeError`` if
        the component has a cycle.
        """
        nbrs: dict[int, list[int]] = {}
        for u, v in {(min(e), max(e)) for e in edges}:
            nbrs.setdefault(u, []).append(v)
            nbrs.setdefault(v, []).append(u)
        parent: dict[int, int] = {}
        seen = {root}
        stack = [root]
        while stack:
            u = stack.pop()
            for v in nbrs.get(u, ()):
                if v == parent.get(u):
                    continue
                if v in seen:
                    raise TreeError("edge set contains a cycle")
                seen.add(v)
                parent[v] = u
                stack.append(v)
        return cls(graph, root, parent)

    def copy(self) -> "RootedTree":
        return RootedTree(self.graph, self.root, self.parent)

    # -- queries ---------------------------------------------------------------

    def nodes(self) -> Iterator[int]:
        return iter(self.children)

    def __contains__(self, u: object) -> bool:
        return u in self.children

    def __len__(self) -> int:
        return len(self.children)

    def edges(self) -> list[tuple[int, int]]:
        """Tree edges ``(parent, child)`` in ascending order."""
        return sorted((p, v) for v, p in self.parent.items())

    def leaves(self) -> list[int]:
        return sorted(v for v, kids in self.children.items() if not kids and v != self.root)

    def preorder(self) -> list[int]:
        order = []
        stack = [self.root]
        while stack:
            u = stack.pop()
            order.append(u)
            stack.extend(reversed(self.children[u]))
        return order

    def depth_exact(self) -> dict[int, int]:
        """Exact root-to-node path lengths (graph units of ``2**-scale_bits``)."""
        if self._depth is None:
            g = self.graph
            depth = {self.root: 0}
            for u in self.preorder():
                du = depth[u]
                for v in self.children[u]:
                    depth[v] = du + g.exact_weight(u, v)
            self._depth = depth
        return self._depth

    def path_to_root(self, v: int) -> list[int]:
        path = [v]
        while path[-1] != self.root:
            path.append(self.parent[path[-1]])
        return path

    @property
    def weight_exact(self) -> int:
        g = self.graph
        return sum(g.exact_weight(p, v) for v, p in self.parent.items())

    @property
    def weight(self) -> float:
        return self.graph.to_float(self.weight_exact)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, RootedTree):
            return NotImplemented
        return self.root == other.root and self.parent == other.parent

    def __repr__(self) -> str:
        return f"RootedTree(root={self.root}, nodes={len(self)}, weight={self.weight:.6g})"

    # -- validation ------------------------------------------------------------

    def problems(self, targets: Iterable[int] = (), *, require_leaf_targets: bool = True) -> list[str]:
        """Human-readable list of violated tree invariants (empty when valid)."""
        out = []
        g = self.graph
        if self.root not in g:
            out.append(f"root {self.root} is not a graph node")
        for v, p in self.parent.items():
            if not g.has_edge(p, v):
                out.append(f"edge {p}->{v} is not in the base graph")
        reached = set(self.preorder())
        if len(reached) != len(self.children):
            out.append("tree is not connected to its root (cycle in the parent map)")
        tset = set(targets)
        missing = sorted(tset - set(self.children))
        if missing:
            out.append(f"targets missing from tree: {missing}")
        if require_leaf_targets and tset:
            bad = [v for v in self.leaves() if v not in tset]
            if bad:
                out.append(f"leaves that are not targets: {bad[:10]}")
        return out

    def validate(self, targets: Iterable[int] = (), *, require_leaf_targets: bool = True) -> None:
        msgs = self.problems(targets, require_leaf_targets=require_leaf_targets)
        if msgs:
            raise TreeError("; ".join(msgs))
