"""Skeleton-initialized RRT* planning on 2D occupancy grids."""

from .errors import (
    DisconnectedGraph,
    EmptyFreeSpace,
    EsirrtError,
    InvalidEndpoint,
    InvalidInput,
    InvalidParameter,
    InvalidPath,
    InvalidRegion,
    ParseError,
)
from .gridmap import (
    OccupancyGrid,
    Path,
    Point,
    is_free,
    load_pgm,
    obstacle_free,
    path_length,
    save_pgm,
    segment_cells,
)
from .initgraph import NodeGraph, SpanningTree, build_visibility_graph, extract_path, prim_mst
from .planner import (
    InformedRegion,
    PlannerParams,
    PlanResult,
    PlanTree,
    RngStream,
    bidirectional_rewiring,
    informed_sample,
    insert_smoothed_path,
    plan,
    steer,
)
from .skeleton import CornerSet, SkeletonGrid, harris_corners, skeleton_endpoints, thin
from .smoothing import (
    SplineCoeffs,
    collision_aware_correction,
    cubic_spline_fit,
    evaluate_spline,
    hybrid_path_smoothing,
    subsample_path,
    thomas_solve,
)

__version__ = "0.1.0"
