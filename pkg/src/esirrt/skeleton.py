"""Medial-axis extraction by morphological thinning and corner detection.

The free-space raster is thinned with the Zhang-Suen two-subiteration
algorithm, then salient nodes are picked on the skeleton with a Harris
corner detector (structure tensor of the binary skeleton image).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List, Tuple

import numpy as np
from scipy import ndimage

from .errors import EmptyFreeSpace
from .gridmap import OccupancyGrid, Point

_SOBEL_X = np.array([[-1, 0, 1], [-2, 0, 2], [-1, 0, 1]], dtype=np.float64)
_SOBEL_Y = _SOBEL_X.T


@dataclass(frozen=True)
class SkeletonGrid:
    base: OccupancyGrid
    skeleton_cells: np.ndarray  # bool, same shape as base.free

    def as_grid(self) -> OccupancyGrid:
        return OccupancyGrid(self.skeleton_cells)

    def pixel_count(self) -> int:
        return int(self.skeleton_cells.sum())


@dataclass(frozen=True)
class CornerSet:
    corners: Tuple[Point, ...]

    def __len__(self) -> int:
        return len(self.corners)

    def __iter__(self):
        return iter(self.corners)


def _neighbor_views(img: np.ndarray):
    """Zero-padded 8-neighborhoods P2..P9 (N, NE, E, SE, S, SW, W, NW)."""
    p = np.pad(img, 1)
    p2 = p[0:-2, 1:-1]
    p3 = p[0:-2, 2:]
    p4 = p[1:-1, 2:]
    p5 = p[2:, 2:]
    p6 = p[2:, 1:-1]
    p7 = p[2:, 0:-2]
    p8 = p[1:-1, 0:-2]
    p9 = p[0:-2, 0:-2]
    return p2, p3, p4, p5, p6, p7, p8, p9


def thin(grid: OccupancyGrid) -> SkeletonGrid:
    """Zhang-Suen thinning of the free-space raster.

    Idempotent and 8-connectivity preserving; cells outside the map are
    treated as occupied.
    """
    if grid.free_count == 0:
        raise EmptyFreeSpace("cannot thin a grid with no free cells")
    img = grid.free.astype(np.uint8)
    while True:
        changed = False
        for step in (0, 1):
            p2, p3, p4, p5, p6, p7, p8, p9 = _neighbor_views(img)
            ring = [p2, p3, p4, p5, p6, p7, p8, p9, p2]
            count = p2 + p3 + p4 + p5 + p6 + p7 + p8 + p9
            transitions = np.zeros_like(count)
            for a, b in zip(ring, ring[1:]):
                transitions += (a == 0) & (b == 1)
            if step == 0:
                c3 = (p2 * p4 * p6) == 0
                c4 = (p4 * p6 * p8) == 0
            else:
                c3 = (p2 * p4 * p8) == 0
                c4 = (p2 * p6 * p8) == 0
            removable = (
                (img == 1)
                & (count >= 2)
                & (count <= 6)
                & (transitions == 1)
                & c3
                & c4
            )
            if removable.any():
                img[removable] = 0
                changed = True
        if not changed:
            break
    return SkeletonGrid(base=grid, skeleton_cells=img.astype(bool))


def skeleton_endpoints(skel: SkeletonGrid) -> List[Point]:
    """Centers of skeleton pixels with exactly one 8-connected skeleton neighbor."""
    img = skel.skeleton_cells.astype(np.uint8)
    neigh = sum(_neighbor_views(img))
    ys, xs = np.nonzero((img == 1) & (neigh == 1))
    return [Point(float(x) + 0.5, float(y) + 0.5) for y, x in zip(ys, xs)]


def harris_response(skel: SkeletonGrid, block_size: int = 5, k: float = 0.04) -> np.ndarray:
    """Harris response map of the binary skeleton raster (skeleton=1, else 0)."""
    img = skel.skeleton_cells.astype(np.float64)
    gx = ndimage.convolve(img, _SOBEL_X, mode="nearest")
    gy = ndimage.convolve(img, _SOBEL_Y, mode="nearest")
    kern = _gaussian_kernel(block_size)
    sxx = ndimage.convolve(gx * gx, kern, mode="nearest")
    syy = ndimage.convolve(gy * gy, kern, mode="nearest")
    sxy = ndimage.convolve(gx * gy, kern, mode="nearest")
    det = sxx * syy - sxy * sxy
    trace = sxx + syy
    return det - k * trace * trace


def harris_corners(
    skel: SkeletonGrid,
    block_size: int = 5,
    k: float = 0.04,
    threshold: float = 0.01,
    nms_radius: float = 5.0,
    include_endpoints: bool = False,
) -> CornerSet:
    """Detect corner nodes on the skeleton.

    Keeps local maxima of the Harris response above ``threshold`` times the
    maximum response, thinned by greedy non-maximum suppression of radius
    ``nms_radius``.  With ``include_endpoints`` skeleton endpoints are added
    as highest-priority candidates (dead-end corridors keep a node).
    """
    if skel.pixel_count() == 0:
        return CornerSet(corners=())
    resp = harris_response(skel, block_size=block_size, k=k)
    resp = np.where(skel.skeleton_cells, resp, -np.inf)
    rmax = float(resp.max())

    candidates: List[Tuple[float, float, float, Point]] = []
    if include_endpoints:
        for p in skeleton_endpoints(skel):
            candidates.append((-math.inf, p.y, p.x, p))
    if rmax > 0.0:
        ys, xs = np.nonzero(resp >= threshold * rmax)
        for y, x in zip(ys, xs):
            pt = Point(float(x) + 0.5, float(y) + 0.5)
            candidates.append((-float(resp[y, x]), pt.y, pt.x, pt))
    candidates.sort(key=lambda c: (c[0], c[1], c[2]))

    kept: List[Point] = []
    r2 = nms_radius * nms_radius
    for _, _, _, pt in candidates:
        if all((pt.x - q.x) ** 2 + (pt.y - q.y) ** 2 >= r2 for q in kept):
            kept.append(pt)
    return CornerSet(corners=tuple(kept))


def _gaussian_kernel(size: int) -> np.ndarray:
    # Sigma follows the usual size->sigma rule for small smoothing windows.
    sigma = 0.3 * ((size - 1) * 0.5 - 1) + 0.8
    ax = np.arange(size, dtype=np.float64) - (size - 1) / 2.0
    g = np.exp(-(ax * ax) / (2.0 * sigma * sigma))
    kern = np.outer(g, g)
    return kern / kern.sum()
