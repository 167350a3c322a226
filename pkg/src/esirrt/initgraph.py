"""Visibility graph over skeleton corner nodes and Prim MST path extraction."""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

from .errors import DisconnectedGraph, InvalidEndpoint
from .gridmap import OccupancyGrid, Path, Point, is_free, obstacle_free
from .skeleton import CornerSet

MERGE_RADIUS = 1.0  # vertices closer than this collapse onto the earlier one


@dataclass(frozen=True)
class NodeGraph:
    vertices: Tuple[Point, ...]
    # Undirected edges keyed (i, j) with i < j, value = Euclidean weight.
    edges: Dict[Tuple[int, int], float]
    start_index: int
    goal_index: int

    def adjacency(self) -> List[List[Tuple[int, float]]]:
        adj: List[List[Tuple[int, float]]] = [[] for _ in self.vertices]
        for (i, j), w in self.edges.items():
            adj[i].append((j, w))
            adj[j].append((i, w))
        for lst in adj:
            lst.sort()
        return adj


@dataclass(frozen=True)
class SpanningTree:
    vertices: Tuple[Point, ...]
    parent: Tuple[Optional[int], ...]  # parent[root] is None
    root: int
    total_weight: float


def build_visibility_graph(
    grid: OccupancyGrid, corners: CornerSet, start: Point, goal: Point
) -> NodeGraph:
    """Complete straight-line-visibility graph on corners plus start/goal.

    Corners within MERGE_RADIUS of an earlier vertex are dropped so that no
    zero-length (or near-duplicate) edges arise.
    """
    if not is_free(grid, start):
        raise InvalidEndpoint(f"start {start} is not on a free cell")
    if not is_free(grid, goal):
        raise InvalidEndpoint(f"goal {goal} is not on a free cell")
    if math.hypot(goal.x - start.x, goal.y - start.y) < 1e-9:
        raise InvalidEndpoint("start and goal coincide")

    vertices: List[Point] = [Point(*start), Point(*goal)]
    for c in corners:
        if all(
            math.hypot(c.x - v.x, c.y - v.y) >= MERGE_RADIUS for v in vertices
        ):
            vertices.append(Point(*c))

    edges: Dict[Tuple[int, int], float] = {}
    for i in range(len(vertices)):
        for j in range(i + 1, len(vertices)):
            if obstacle_free(grid, vertices[i], vertices[j]):
                a, b = vertices[i], vertices[j]
                edges[(i, j)] = math.hypot(b.x - a.x, b.y - a.y)
    return NodeGraph(
        vertices=tuple(vertices), edges=edges, start_index=0, goal_index=1
    )


def prim_mst(graph: NodeGraph, root: int) -> SpanningTree:
    """Prim's algorithm from ``root``; ties broken by lowest vertex index.

    Spans the component containing ``root``.  Raises DisconnectedGraph when
    the goal vertex is unreachable, reporting component membership.
    """
    n = len(graph.vertices)
    adj = graph.adjacency()
    parent: List[Optional[int]] = [None] * n
    in_tree = [False] * n
    total = 0.0
    # Heap entries (weight, vertex, parent): equal-weight frontier edges pop
    # in vertex-index order, keeping the tree deterministic.
    heap: List[Tuple[float, int, int]] = [(0.0, root, -1)]
    while heap:
        w, v, par = heapq.heappop(heap)
        if in_tree[v]:
            continue
        in_tree[v] = True
        if par >= 0:
            parent[v] = par
            total += w
        for u, wu in adj[v]:
            if not in_tree[u]:
                heapq.heappush(heap, (wu, u, v))
    if not in_tree[graph.goal_index]:
        members = {i: in_tree[i] for i in range(n)}
        raise DisconnectedGraph(
            "goal vertex is not reachable from start in the visibility graph",
            components=members,
        )
    return SpanningTree(
        vertices=graph.vertices,
        parent=tuple(parent),
        root=root,
        total_weight=total,
    )


def extract_path(tree: SpanningTree, start: int, goal: int) -> Path:
    """Unique tree path from ``start`` to ``goal`` as an ordered Path."""
    chain_s = _chain_to_root(tree, start)
    chain_g = _chain_to_root(tree, goal)
    if chain_s[-1] != chain_g[-1]:
        raise DisconnectedGraph("start and goal lie in different tree components")
    set_s = set(chain_s)
    # First vertex of goal's root-chain that also lies on start's chain is
    # the lowest common ancestor.
    lca_pos_g = next(i for i, v in enumerate(chain_g) if v in set_s)
    lca = chain_g[lca_pos_g]
    up = chain_s[: chain_s.index(lca) + 1]
    down = list(reversed(chain_g[:lca_pos_g]))
    indices = up + down
    if len(indices) == 1:
        return Path([tree.vertices[indices[0]]])
    return Path([tree.vertices[i] for i in indices])


def _chain_to_root(tree: SpanningTree, v: int) -> List[int]:
    chain = [v]
    seen = {v}
    while tree.parent[chain[-1]] is not None:
        nxt = tree.parent[chain[-1]]
        if nxt in seen:
            raise DisconnectedGraph("cycle detected in spanning tree parents")
        chain.append(nxt)
        seen.add(nxt)
    return chain
