import math
import random

import numpy as np
import pytest

from esirrt import (
    DisconnectedGraph,
    InvalidEndpoint,
    OccupancyGrid,
    Point,
    build_visibility_graph,
    extract_path,
    obstacle_free,
    prim_mst,
)
from esirrt.initgraph import NodeGraph, SpanningTree
from esirrt.skeleton import CornerSet


def open_grid(size=20):
    return OccupancyGrid(np.ones((size, size), dtype=bool))


def graph_from_edges(n, edges, start=0, goal=1):
    """Build a NodeGraph from explicit weighted edges (positions unused)."""
    verts = tuple(Point(float(i), 0.0) for i in range(n))
    emap = {}
    for i, j, w in edges:
        a, b = (i, j) if i < j else (j, i)
        emap[(a, b)] = float(w)
    return NodeGraph(vertices=verts, edges=emap, start_index=start, goal_index=goal)


def kruskal_weight(n, edges):
    """Independent MST oracle: Kruskal with union-find."""
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    total = 0.0
    count = 0
    for w, i, j in sorted((w, i, j) for i, j, w in edges):
        ri, rj = find(i), find(j)
        if ri != rj:
            parent[ri] = rj
            total += w
            count += 1
    return total, count


class TestBuildVisibilityGraph:
    def test_complete_graph_on_open_map(self):
        g = open_grid()
        corners = CornerSet(corners=(Point(5.5, 5.5), Point(10.5, 3.5)))
        ng = build_visibility_graph(g, corners, Point(2.5, 2.5), Point(17.5, 17.5))
        assert len(ng.vertices) == 4
        assert len(ng.edges) == 6
        for (i, j), w in ng.edges.items():
            a, b = ng.vertices[i], ng.vertices[j]
            assert w == pytest.approx(math.hypot(b.x - a.x, b.y - a.y))

    def test_wall_with_gap_matches_pairwise_oracle(self):
        free = np.ones((20, 20), dtype=bool)
        free[:, 10] = False
        free[9:12, 10] = True
        g = OccupancyGrid(free)
        corners = CornerSet(
            corners=(Point(5.5, 10.5), Point(15.5, 10.5), Point(5.5, 2.5), Point(15.5, 17.5))
        )
        ng = build_visibility_graph(g, corners, Point(2.5, 10.5), Point(17.5, 10.5))
        for i in range(len(ng.vertices)):
            for j in range(i + 1, len(ng.vertices)):
                expected = obstacle_free(g, ng.vertices[i], ng.vertices[j])
                assert ((i, j) in ng.edges) == expected

    def test_occupied_endpoint_rejected(self):
        free = np.ones((5, 5), dtype=bool)
        free[2, 2] = False
        g = OccupancyGrid(free)
        with pytest.raises(InvalidEndpoint):
            build_visibility_graph(g, CornerSet(()), Point(2.5, 2.5), Point(0.5, 0.5))

    def test_coincident_start_goal_rejected(self):
        with pytest.raises(InvalidEndpoint):
            build_visibility_graph(
                open_grid(), CornerSet(()), Point(2.5, 2.5), Point(2.5, 2.5)
            )

    def test_corner_near_start_merged(self):
        ng = build_visibility_graph(
            open_grid(),
            CornerSet(corners=(Point(2.6, 2.5), Point(8.5, 8.5))),
            Point(2.5, 2.5),
            Point(17.5, 17.5),
        )
        assert len(ng.vertices) == 3  # duplicate corner dropped

    def test_no_self_loops_or_zero_weights(self):
        ng = build_visibility_graph(
            open_grid(),
            CornerSet(corners=(Point(4.5, 9.5),)),
            Point(2.5, 2.5),
            Point(17.5, 17.5),
        )
        for (i, j), w in ng.edges.items():
            assert i != j and w > 0


class TestPrimMst:
    def test_path_graph(self):
        g = graph_from_edges(3, [(0, 1, 1.0), (1, 2, 1.0)], goal=2)
        t = prim_mst(g, 0)
        assert t.total_weight == pytest.approx(2.0)
        assert t.parent == (None, 0, 1)

    def test_triangle_unique_mst(self):
        g = graph_from_edges(3, [(0, 1, 1.0), (1, 2, 2.0), (0, 2, 3.0)], goal=2)
        t = prim_mst(g, 0)
        assert t.total_weight == pytest.approx(3.0)

    def test_disconnected_reports_components(self):
        g = graph_from_edges(4, [(0, 2, 1.0)], goal=1)
        with pytest.raises(DisconnectedGraph) as exc:
            prim_mst(g, 0)
        assert exc.value.components[0] is True
        assert exc.value.components[1] is False

    def test_matches_kruskal_on_random_graphs(self):
        rng = random.Random(13)
        for _ in range(100):
            n = rng.randrange(2, 21)
            edges = []
            # random spanning chain ensures connectivity
            order = list(range(n))
            rng.shuffle(order)
            for a, b in zip(order, order[1:]):
                edges.append((a, b, rng.uniform(0.1, 10)))
            for _ in range(rng.randrange(0, 2 * n)):
                i, j = rng.randrange(n), rng.randrange(n)
                if i != j and all({i, j} != {a, b} for a, b, _ in edges):
                    edges.append((i, j, rng.uniform(0.1, 10)))
            g = graph_from_edges(n, edges, goal=n - 1)
            t = prim_mst(g, 0)
            expected, count = kruskal_weight(n, edges)
            assert count == n - 1
            assert t.total_weight == pytest.approx(expected, abs=1e-12)

    def test_equal_weight_ties_are_deterministic(self):
        edges = [(0, 1, 1.0), (0, 2, 1.0), (1, 2, 1.0), (1, 3, 1.0), (2, 3, 1.0)]
        g = graph_from_edges(4, edges, goal=3)
        t1 = prim_mst(g, 0)
        t2 = prim_mst(g, 0)
        assert t1.parent == t2.parent


def bfs_path(tree: SpanningTree, start: int, goal: int):
    """Oracle: BFS over the undirected tree edges."""
    adj = {i: [] for i in range(len(tree.vertices))}
    for v, p in enumerate(tree.parent):
        if p is not None:
            adj[v].append(p)
            adj[p].append(v)
    prev = {start: None}
    queue = [start]
    while queue:
        v = queue.pop(0)
        if v == goal:
            break
        for u in adj[v]:
            if u not in prev:
                prev[u] = v
                queue.append(u)
    if goal not in prev:
        return None
    out = [goal]
    while prev[out[-1]] is not None:
        out.append(prev[out[-1]])
    return list(reversed(out))


def random_tree(rng, n):
    verts = tuple(
        Point(rng.uniform(0, 100), rng.uniform(0, 100)) for _ in range(n)
    )
    parent = [None] * n
    for v in range(1, n):
        parent[v] = rng.randrange(0, v)
    return SpanningTree(vertices=verts, parent=tuple(parent), root=0, total_weight=0.0)


class TestExtractPath:
    def test_chain(self):
        verts = (Point(0, 0), Point(5, 0), Point(9, 0))
        t = SpanningTree(vertices=verts, parent=(None, 0, 1), root=0, total_weight=9)
        p = extract_path(t, 0, 2)
        assert [tuple(q) for q in p] == [(0, 0), (5, 0), (9, 0)]

    def test_same_vertex(self):
        verts = (Point(0, 0), Point(5, 0))
        t = SpanningTree(vertices=verts, parent=(None, 0), root=0, total_weight=5)
        assert len(extract_path(t, 1, 1)) == 1

    def test_different_components(self):
        verts = (Point(0, 0), Point(5, 0))
        t = SpanningTree(vertices=verts, parent=(None, None), root=0, total_weight=0)
        with pytest.raises(DisconnectedGraph):
            extract_path(t, 0, 1)

    def test_matches_bfs_oracle_on_random_trees(self):
        rng = random.Random(19)
        for _ in range(100):
            n = rng.randrange(2, 31)
            t = random_tree(rng, n)
            a, b = rng.randrange(n), rng.randrange(n)
            expected = bfs_path(t, a, b)
            got = extract_path(t, a, b)
            assert [tuple(p) for p in got] == [tuple(t.vertices[i]) for i in expected]

    def test_path_is_simple(self):
        rng = random.Random(29)
        for _ in range(50):
            n = rng.randrange(2, 31)
            t = random_tree(rng, n)
            a, b = rng.randrange(n), rng.randrange(n)
            pts = [tuple(p) for p in extract_path(t, a, b)]
            assert len(pts) == len(set(pts))
