"""RRT* tree substrate and the three planner pipelines.

``plan`` dispatches between:
  - ``esirrt``: skeleton/MST initialization, hybrid smoothing, smoothed-path
    insertion and bidirectional rewiring, then informed RRT* iterations;
  - ``sirrt``: the same initialization without smoothing or rewiring;
  - ``irrt``: uniform random sampling until a first solution, then informed
    RRT* iterations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .errors import InvalidEndpoint, InvalidParameter, InvalidPath, InvalidRegion
from .gridmap import OccupancyGrid, Path, Point, is_free, obstacle_free
from .initgraph import SpanningTree, build_visibility_graph, extract_path, prim_mst
from .skeleton import harris_corners, thin
from .smoothing import (
    DEFAULT_SPLINE_N,
    DEFAULT_SUBSAMPLE_D,
    hybrid_path_smoothing,
)

PLANNER_IDS = ("irrt", "sirrt", "esirrt")
_EPS = 1e-9


@dataclass(frozen=True)
class PlannerParams:
    """Tunable knobs shared by all planners; defaults are map-scale neutral."""

    eta: float = 10.0                 # steer step (px)
    gamma: Optional[float] = None     # shrinking-ball constant; None = from free area
    goal_bias: float = 0.05           # uniform-phase goal sampling probability
    goal_radius: Optional[float] = None   # None = eta
    rewire_radius: Optional[float] = None  # None = 2 * subsample_d
    subsample_d: float = DEFAULT_SUBSAMPLE_D
    spline_n: int = DEFAULT_SPLINE_N
    harris_block_size: int = 5
    harris_k: float = 0.04
    harris_threshold: float = 0.01
    nms_radius: float = 5.0
    max_initial_iters: int = 50_000   # uniform-phase cap for irrt

    def effective_goal_radius(self) -> float:
        return self.eta if self.goal_radius is None else self.goal_radius

    def effective_rewire_radius(self) -> float:
        if self.rewire_radius is None:
            return 2.0 * self.subsample_d
        return self.rewire_radius

    def effective_gamma(self, grid: OccupancyGrid) -> float:
        if self.gamma is not None:
            return self.gamma
        return 2.0 * math.sqrt(1.5 * grid.free_count / math.pi)


class RngStream:
    """Seedable deterministic sample stream (PCG64).

    Identical seeds yield identical sequences on every platform; benchmark
    trial i uses seed ``base_seed + i``.
    """

    def __init__(self, seed: int):
        self.seed = int(seed)
        self._gen = np.random.Generator(np.random.PCG64(self.seed))

    def random(self) -> float:
        return float(self._gen.random())

    def unit_disk(self) -> Tuple[float, float]:
        while True:
            x = 2.0 * self.random() - 1.0
            y = 2.0 * self.random() - 1.0
            if x * x + y * y <= 1.0:
                return x, y


@dataclass(frozen=True)
class InformedRegion:
    focus_a: Point
    focus_b: Point
    c_best: float
    c_min: float

    def __post_init__(self):
        if not math.isfinite(self.c_best) or self.c_best < self.c_min - 1e-9:
            raise InvalidRegion(
                f"c_best {self.c_best} below c_min {self.c_min}"
            )


def informed_sample(region: InformedRegion, rng: RngStream) -> Point:
    """Uniform sample of the ellipse with the given foci and focal sum."""
    ax, ay = region.focus_a
    bx, by = region.focus_b
    cx, cy = (ax + bx) / 2.0, (ay + by) / 2.0
    if region.c_best <= region.c_min + 1e-12:
        t = rng.random()
        return Point(ax + t * (bx - ax), ay + t * (by - ay))
    r1 = region.c_best / 2.0
    r2 = math.sqrt(region.c_best**2 - region.c_min**2) / 2.0
    cos_t = (bx - ax) / region.c_min
    sin_t = (by - ay) / region.c_min
    ux, uy = rng.unit_disk()
    ex, ey = r1 * ux, r2 * uy
    return Point(cx + ex * cos_t - ey * sin_t, cy + ex * sin_t + ey * cos_t)


class PlanTree:
    """Rooted tree of states with parent links and cost-to-come."""

    def __init__(self, root: Sequence[float]):
        self._pos = np.empty((256, 2), dtype=np.float64)
        self._pos[0] = (root[0], root[1])
        self._cost = np.zeros(256, dtype=np.float64)
        self.n = 1
        self.parent: List[int] = [-1]
        self.children: List[List[int]] = [[]]
        self.root = 0

    @property
    def positions(self) -> np.ndarray:
        return self._pos[: self.n]

    @property
    def costs(self) -> np.ndarray:
        return self._cost[: self.n]

    def position(self, i: int) -> Point:
        return Point(float(self._pos[i, 0]), float(self._pos[i, 1]))

    def cost_of(self, i: int) -> float:
        return float(self._cost[i])

    def add(self, pos: Sequence[float], parent: int) -> int:
        if self.n == len(self._pos):
            grown = np.empty((2 * self.n, 2), dtype=np.float64)
            grown[: self.n] = self._pos
            self._pos = grown
            grown_c = np.empty(2 * self.n, dtype=np.float64)
            grown_c[: self.n] = self._cost
            self._cost = grown_c
        i = self.n
        self._pos[i] = (pos[0], pos[1])
        self.n += 1
        d = math.hypot(pos[0] - self._pos[parent, 0], pos[1] - self._pos[parent, 1])
        self.parent.append(parent)
        self._cost[i] = self._cost[parent] + d
        self.children.append([])
        self.children[parent].append(i)
        return i

    def reparent(self, v: int, new_parent: int) -> None:
        """Re-attach v under new_parent and propagate the cost delta to its subtree."""
        old = self.parent[v]
        self.children[old].remove(v)
        self.children[new_parent].append(v)
        self.parent[v] = new_parent
        d = math.hypot(
            self._pos[v, 0] - self._pos[new_parent, 0],
            self._pos[v, 1] - self._pos[new_parent, 1],
        )
        delta = self._cost[new_parent] + d - self._cost[v]
        subtree = [v]
        stack = [v]
        while stack:
            u = stack.pop()
            kids = self.children[u]
            subtree.extend(kids)
            stack.extend(kids)
        self._cost[subtree] += delta

    def ancestors(self, v: int) -> set:
        """All indices on v's parent chain, v included."""
        out = set()
        while v != -1:
            out.add(v)
            v = self.parent[v]
        return out

    def is_ancestor(self, a: int, v: int) -> bool:
        """True iff a lies on v's parent chain (v is its own ancestor)."""
        while v != -1:
            if v == a:
                return True
            v = self.parent[v]
        return False

    def nearest(self, p: Sequence[float]) -> int:
        dx = self._pos[: self.n, 0] - p[0]
        dy = self._pos[: self.n, 1] - p[1]
        return int(np.argmin(dx * dx + dy * dy))

    def near(self, p: Sequence[float], radius: float) -> np.ndarray:
        """Indices of nodes within radius of p, ascending."""
        dx = self._pos[: self.n, 0] - p[0]
        dy = self._pos[: self.n, 1] - p[1]
        return np.nonzero(dx * dx + dy * dy <= radius * radius)[0]

    def find(self, p: Sequence[float], tol: float = _EPS) -> int:
        """Index of the node coinciding with p within tol, or -1."""
        i = self.nearest(p)
        if math.hypot(self._pos[i, 0] - p[0], self._pos[i, 1] - p[1]) <= tol:
            return i
        return -1

    def path_from_root(self, v: int) -> Path:
        chain = [v]
        while self.parent[chain[-1]] != -1:
            chain.append(self.parent[chain[-1]])
        chain.reverse()
        return Path([self.position(i) for i in chain])


def nearest(tree: PlanTree, p: Sequence[float]) -> int:
    return tree.nearest(p)


def near(tree: PlanTree, p: Sequence[float], radius: float) -> List[int]:
    return [int(i) for i in tree.near(p, radius)]


def steer(frm: Sequence[float], to: Sequence[float], eta: float) -> Point:
    if eta <= 0:
        raise InvalidParameter("steer step eta must be positive")
    dx, dy = to[0] - frm[0], to[1] - frm[1]
    d = math.hypot(dx, dy)
    if d <= eta:
        return Point(float(to[0]), float(to[1]))
    s = eta / d
    return Point(frm[0] + s * dx, frm[1] + s * dy)


def shrinking_ball_radius(n: int, gamma: float, eta: float) -> float:
    if n <= 1:
        return eta
    return min(gamma * math.sqrt(math.log(n) / n), eta)


def extend(
    tree: PlanTree,
    grid: OccupancyGrid,
    p_new: Point,
    near_set: Sequence[int],
    nearest_idx: int,
) -> int:
    """Standard RRT* choose-parent / insert / rewire; returns the new index or -1."""
    px, py = p_new
    near_arr = np.asarray(near_set, dtype=np.intp)
    cand = np.union1d(near_arr, [nearest_idx])
    dists = np.hypot(tree._pos[cand, 0] - px, tree._pos[cand, 1] - py)
    through = tree._cost[cand] + dists
    # Ascending through-cost, lowest index first among ties.
    order = np.lexsort((cand, through))
    parent = -1
    for k in order:
        c = int(cand[k])
        if obstacle_free(grid, tree.position(c), p_new):
            parent = c
            break
    if parent == -1:
        return -1
    new = tree.add(p_new, parent)
    new_cost = tree.cost_of(new)
    if len(near_arr):
        nd = np.hypot(tree._pos[near_arr, 0] - px, tree._pos[near_arr, 1] - py)
        improvable = near_arr[new_cost + nd < tree._cost[near_arr] - _EPS]
        if len(improvable):
            chain = tree.ancestors(new)
            for q in sorted(int(q) for q in improvable):
                if q == parent or q in chain:
                    continue
                # Re-check: an earlier rewire may have already lowered q.
                qx, qy = tree._pos[q]
                if new_cost + math.hypot(px - qx, py - qy) < tree._cost[q] - _EPS:
                    if obstacle_free(grid, p_new, tree.position(q)):
                        tree.reparent(q, new)
    return new


def insert_smoothed_path(tree: PlanTree, smooth: Path) -> PlanTree:
    """Thread the smoothed path through the tree as a parent chain.

    Points coinciding with existing nodes are matched (re-parented onto the
    chain only when that strictly lowers their cost); new points are inserted
    as children of the previous chain node.
    """
    rx, ry = tree._pos[tree.root]
    if math.hypot(smooth[0].x - rx, smooth[0].y - ry) > _EPS:
        raise InvalidPath("smoothed path must start at the tree root")
    prev = tree.root
    for p in smooth.points[1:]:
        j = tree.find(p)
        if j >= 0:
            d = math.hypot(
                p.x - tree._pos[prev, 0], p.y - tree._pos[prev, 1]
            )
            if (
                j != prev
                and tree.costs[prev] + d < tree.costs[j] - _EPS
                and not tree.is_ancestor(j, prev)
            ):
                tree.reparent(j, prev)
            prev = j
        else:
            prev = tree.add(p, prev)
    return tree


def bidirectional_rewiring(
    tree: PlanTree, smooth: Path, radius: float, grid: OccupancyGrid
) -> PlanTree:
    """Forward/reverse rewiring around each smoothed-path node.

    Forward: neighbors adopt the path node as parent when strictly cheaper.
    Reverse: the path node adopts a cheaper neighbor as its parent (cost
    re-read after each accepted rewire).  Ancestor guards prevent cycles.
    """
    for p in smooth:
        p_idx = tree.find(p)
        if p_idx < 0:
            raise InvalidPath(f"smoothed path point {p} missing from tree")
        px, py = tree._pos[p_idx]
        neighbors = [int(q) for q in tree.near((px, py), radius) if q != p_idx]
        for q in neighbors:
            qx, qy = tree._pos[q]
            d = math.hypot(px - qx, py - qy)
            if (
                tree.costs[p_idx] + d < tree.costs[q] - _EPS
                and not tree.is_ancestor(q, p_idx)
                and obstacle_free(grid, (px, py), (qx, qy))
            ):
                tree.reparent(q, p_idx)
        for q in neighbors:
            qx, qy = tree._pos[q]
            d = math.hypot(px - qx, py - qy)
            if (
                tree.costs[q] + d < tree.costs[p_idx] - _EPS
                and not tree.is_ancestor(p_idx, q)
                and obstacle_free(grid, (qx, qy), (px, py))
            ):
                tree.reparent(p_idx, q)
    return tree


def plan_tree_from_mst(mst: SpanningTree) -> Tuple[PlanTree, dict]:
    """Convert a spanning tree into a PlanTree rooted at the MST root.

    Returns the tree and a map from graph vertex index to tree node index.
    Vertices unreachable from the root are dropped.
    """
    children: List[List[int]] = [[] for _ in mst.vertices]
    for v, par in enumerate(mst.parent):
        if par is not None:
            children[par].append(v)
    tree = PlanTree(mst.vertices[mst.root])
    mapping = {mst.root: tree.root}
    stack = sorted(children[mst.root], reverse=True)
    while stack:
        v = stack.pop()
        par = mst.parent[v]
        mapping[v] = tree.add(mst.vertices[v], mapping[par])
        stack.extend(sorted(children[v], reverse=True))
    return tree, mapping


@dataclass
class PlanResult:
    planner: str
    tree: PlanTree
    path: Optional[Path]
    trace: List[float] = field(default_factory=list)
    initial_iteration: int = 0
    initial_cost: float = math.inf
    goal_index: Optional[int] = None

    @property
    def final_cost(self) -> float:
        if self.trace:
            return self.trace[-1]
        return self.initial_cost


def plan(
    planner: str,
    grid: OccupancyGrid,
    start: Point,
    goal: Point,
    iters: int,
    seed: int,
    params: PlannerParams = PlannerParams(),
) -> PlanResult:
    """Run one planner end to end; see module docstring for the pipelines."""
    if planner not in PLANNER_IDS:
        raise InvalidParameter(f"unknown planner {planner!r}")
    if iters < 0:
        raise InvalidParameter("iteration budget must be >= 0")
    start = Point(float(start[0]), float(start[1]))
    goal = Point(float(goal[0]), float(goal[1]))
    if not is_free(grid, start):
        raise InvalidEndpoint(f"start {start} is not on a free cell")
    if not is_free(grid, goal):
        raise InvalidEndpoint(f"goal {goal} is not on a free cell")
    rng = RngStream(seed)
    c_min = math.hypot(goal.x - start.x, goal.y - start.y)
    gamma = params.effective_gamma(grid)

    if planner == "irrt":
        result = _irrt_initialize(grid, start, goal, rng, params, gamma)
    else:
        result = _skeleton_initialize(planner, grid, start, goal, params)
    tree, goal_idx = result.tree, result.goal_index

    for _ in range(iters):
        if goal_idx is not None:
            c_best = max(tree.cost_of(goal_idx), c_min)
            p_rand = informed_sample(
                InformedRegion(start, goal, c_best, c_min), rng
            )
        else:
            p_rand = _uniform_free_sample(grid, rng)
        _rrt_iteration(tree, grid, p_rand, params, gamma)
        result.trace.append(
            tree.cost_of(goal_idx) if goal_idx is not None else math.inf
        )

    if goal_idx is not None:
        result.path = tree.path_from_root(goal_idx)
    return result


def _rrt_iteration(
    tree: PlanTree,
    grid: OccupancyGrid,
    p_rand: Point,
    params: PlannerParams,
    gamma: float,
) -> int:
    near_idx = tree.nearest(p_rand)
    p_new = steer(tree.position(near_idx), p_rand, params.eta)
    if (
        math.hypot(p_new.x - tree._pos[near_idx, 0], p_new.y - tree._pos[near_idx, 1])
        <= _EPS
    ):
        return -1
    if not is_free(grid, p_new):
        return -1
    r = shrinking_ball_radius(tree.n, gamma, params.eta)
    near_set = tree.near(p_new, r)
    return extend(tree, grid, p_new, near_set, near_idx)


def _uniform_free_sample(grid: OccupancyGrid, rng: RngStream) -> Point:
    for _ in range(10_000):
        p = Point(rng.random() * grid.width, rng.random() * grid.height)
        if is_free(grid, p):
            return p
    raise InvalidParameter("failed to sample a free point (map nearly full?)")


def _irrt_initialize(
    grid: OccupancyGrid,
    start: Point,
    goal: Point,
    rng: RngStream,
    params: PlannerParams,
    gamma: float,
) -> PlanResult:
    tree = PlanTree(start)
    goal_radius = params.effective_goal_radius()
    trace: List[float] = []
    goal_idx: Optional[int] = None
    iteration = 0
    while goal_idx is None and iteration < params.max_initial_iters:
        iteration += 1
        if rng.random() < params.goal_bias:
            p_rand = goal
        else:
            p_rand = _uniform_free_sample(grid, rng)
        new = _rrt_iteration(tree, grid, p_rand, params, gamma)
        if new >= 0:
            p_new = tree.position(new)
            d_goal = math.hypot(p_new.x - goal.x, p_new.y - goal.y)
            if d_goal <= _EPS:
                goal_idx = new
            elif d_goal <= goal_radius and obstacle_free(grid, p_new, goal):
                goal_idx = tree.add(goal, new)
        trace.append(math.inf if goal_idx is None else tree.cost_of(goal_idx))
    initial_cost = math.inf if goal_idx is None else tree.cost_of(goal_idx)
    return PlanResult(
        planner="irrt",
        tree=tree,
        path=None,
        trace=trace,
        initial_iteration=iteration if goal_idx is not None else iteration,
        initial_cost=initial_cost,
        goal_index=goal_idx,
    )


def _skeleton_initialize(
    planner: str,
    grid: OccupancyGrid,
    start: Point,
    goal: Point,
    params: PlannerParams,
) -> PlanResult:
    skel = thin(grid)
    corners = harris_corners(
        skel,
        block_size=params.harris_block_size,
        k=params.harris_k,
        threshold=params.harris_threshold,
        nms_radius=params.nms_radius,
        include_endpoints=True,
    )
    graph = build_visibility_graph(grid, corners, start, goal)
    mst = prim_mst(graph, root=graph.start_index)
    init_path = extract_path(mst, graph.start_index, graph.goal_index)
    tree, mapping = plan_tree_from_mst(mst)
    goal_idx = mapping[graph.goal_index]
    if planner == "esirrt":
        smooth = hybrid_path_smoothing(
            init_path, d=params.subsample_d, n=params.spline_n, grid=grid
        )
        insert_smoothed_path(tree, smooth)
        bidirectional_rewiring(
            tree, smooth, params.effective_rewire_radius(), grid
        )
    return PlanResult(
        planner=planner,
        tree=tree,
        path=None,
        trace=[],
        initial_iteration=0,
        initial_cost=tree.cost_of(goal_idx),
        goal_index=goal_idx,
    )
