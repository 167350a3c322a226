"""Binary occupancy grid, PGM ingestion, and collision/visibility primitives.

Coordinates are continuous pixel units with the origin at the top-left
corner, x rightward and y downward.  Cell (i, j) spans [i, i+1) x [j, j+1).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, List, NamedTuple, Sequence, Tuple

import numpy as np

from .errors import InvalidParameter, ParseError

DEFAULT_FREE_THRESHOLD = 127


class Point(NamedTuple):
    x: float
    y: float


@dataclass(frozen=True)
class Path:
    """Ordered waypoint sequence; consecutive points must be distinct."""

    points: Tuple[Point, ...]

    def __init__(self, points: Iterable[Sequence[float]]):
        pts = tuple(Point(float(p[0]), float(p[1])) for p in points)
        if not pts:
            raise InvalidParameter("path must contain at least one point")
        for p in pts:
            if not (math.isfinite(p.x) and math.isfinite(p.y)):
                raise InvalidParameter(f"non-finite path point {p}")
        for a, b in zip(pts, pts[1:]):
            if a.x == b.x and a.y == b.y:
                raise InvalidParameter(f"consecutive duplicate path point {a}")
        object.__setattr__(self, "points", pts)

    def __len__(self) -> int:
        return len(self.points)

    def __getitem__(self, i):
        return self.points[i]

    def __iter__(self):
        return iter(self.points)

    def reversed(self) -> "Path":
        return Path(tuple(reversed(self.points)))


def path_length(path) -> float:
    """Total Euclidean length of a path (Path or point sequence)."""
    pts = path.points if isinstance(path, Path) else list(path)
    return sum(
        math.hypot(b[0] - a[0], b[1] - a[1]) for a, b in zip(pts, pts[1:])
    )


class OccupancyGrid:
    """Immutable binary raster; ``free[y, x]`` is True where traversable."""

    def __init__(self, free: np.ndarray):
        free = np.asarray(free, dtype=bool)
        if free.ndim != 2 or free.shape[0] < 1 or free.shape[1] < 1:
            raise ParseError("grid must be 2-D with positive dimensions")
        self.free = free
        self.free.setflags(write=False)
        self.height, self.width = free.shape
        self.free_count = int(free.sum())
        # Plain nested lists: scalar indexing in the collision hot loop is
        # several times faster than numpy element access.
        self._rows: List[List[bool]] = free.tolist()

    def is_free_cell(self, ix: int, iy: int) -> bool:
        if 0 <= ix < self.width and 0 <= iy < self.height:
            return self._rows[iy][ix]
        return False

    def inflate(self, radius: int) -> "OccupancyGrid":
        """Grow obstacles by a square structuring element of given radius."""
        if radius < 0:
            raise InvalidParameter("inflation radius must be >= 0")
        if radius == 0:
            return self
        from scipy import ndimage

        occupied = ~self.free
        grown = ndimage.binary_dilation(
            occupied, structure=np.ones((2 * radius + 1, 2 * radius + 1), bool)
        )
        return OccupancyGrid(~grown)


def load_pgm(data: bytes, free_threshold: int = DEFAULT_FREE_THRESHOLD) -> OccupancyGrid:
    """Decode a binary (P5) PGM into an occupancy grid.

    A cell is free iff its gray value, rescaled to a 0-255 range when the
    header maxval differs from 255, is >= ``free_threshold``.
    """
    if not (0 <= free_threshold <= 255):
        raise InvalidParameter("free_threshold must be in [0, 255]")
    magic, rest = _next_token(data, 0)
    if magic != b"P5":
        raise ParseError("not a binary PGM (missing P5 magic)")
    wtok, rest = _next_token(data, rest)
    htok, rest = _next_token(data, rest)
    mtok, rest = _next_token(data, rest)
    try:
        width, height, maxval = int(wtok), int(htok), int(mtok)
    except ValueError as exc:
        raise ParseError(f"malformed PGM header: {exc}") from None
    if width <= 0 or height <= 0:
        raise ParseError(f"invalid PGM dimensions {width}x{height}")
    if not (0 < maxval <= 255):
        raise ParseError(f"unsupported PGM maxval {maxval}")
    pixels = data[rest : rest + width * height]
    if len(pixels) < width * height:
        raise ParseError("truncated PGM pixel data")
    raw = np.frombuffer(pixels, dtype=np.uint8).reshape(height, width)
    if maxval != 255:
        scaled = raw.astype(np.float64) * (255.0 / maxval)
    else:
        scaled = raw
    return OccupancyGrid(scaled >= free_threshold)


def save_pgm(grid: OccupancyGrid) -> bytes:
    """Encode a grid as a binary PGM (free=255, occupied=0)."""
    header = f"P5\n{grid.width} {grid.height}\n255\n".encode()
    body = np.where(grid.free, 255, 0).astype(np.uint8).tobytes()
    return header + body


def _next_token(data: bytes, pos: int) -> Tuple[bytes, int]:
    """Read one whitespace-delimited header token, skipping '#' comments.

    Returns (token, position just past the single terminating whitespace
    byte), matching the PGM convention that raster data begins immediately
    after the whitespace following maxval.
    """
    n = len(data)
    while pos < n:
        c = data[pos : pos + 1]
        if c == b"#":
            while pos < n and data[pos : pos + 1] not in (b"\n", b"\r"):
                pos += 1
        elif c.isspace():
            pos += 1
        else:
            break
    start = pos
    while pos < n and not data[pos : pos + 1].isspace() and data[pos : pos + 1] != b"#":
        pos += 1
    if start == pos:
        raise ParseError("truncated PGM header")
    token = data[start:pos]
    if pos < n and data[pos : pos + 1].isspace():
        pos += 1
    return token, pos


def is_free(grid: OccupancyGrid, p: Sequence[float]) -> bool:
    """True iff floor(p) is an in-bounds free cell."""
    x, y = p[0], p[1]
    if not (math.isfinite(x) and math.isfinite(y)):
        return False
    return grid.is_free_cell(math.floor(x), math.floor(y))


def segment_cells(a: Sequence[float], b: Sequence[float]) -> List[Tuple[int, int]]:
    """All cells whose closed unit square the closed segment a-b touches.

    Supercover enumeration: a superset of the 8-connected Bresenham trace,
    including cells touched only at a shared edge or corner.
    """
    x0, y0 = float(a[0]), float(a[1])
    x1, y1 = float(b[0]), float(b[1])
    if (x0, y0) > (x1, y1):
        x0, y0, x1, y1 = x1, y1, x0, y0
    cells = []
    if x0 == x1:
        ylo, yhi = (y0, y1) if y0 <= y1 else (y1, y0)
        j_lo, j_hi = math.ceil(ylo - 1.0), math.floor(yhi)
        for i in range(math.ceil(x0 - 1.0), math.floor(x1) + 1):
            for j in range(j_lo, j_hi + 1):
                cells.append((i, j))
        return cells
    slope = (y1 - y0) / (x1 - x0)
    for i in range(math.ceil(x0 - 1.0), math.floor(x1) + 1):
        xa = x0 if x0 > i else float(i)
        xb = x1 if x1 < i + 1 else float(i + 1)
        ya = y0 + slope * (xa - x0)
        yb = y0 + slope * (xb - x0)
        if ya > yb:
            ya, yb = yb, ya
        for j in range(math.ceil(ya - 1.0), math.floor(yb) + 1):
            cells.append((i, j))
    return cells


def obstacle_free(grid: OccupancyGrid, a: Sequence[float], b: Sequence[float]) -> bool:
    """True iff every cell the segment a-b touches is free and in bounds.

    Symmetric in its endpoints by construction.
    """
    x0, y0 = float(a[0]), float(a[1])
    x1, y1 = float(b[0]), float(b[1])
    if (x0, y0) > (x1, y1):
        x0, y0, x1, y1 = x1, y1, x0, y0
    rows = grid._rows
    w, h = grid.width, grid.height
    ceil = math.ceil
    floor = math.floor
    if x0 == x1:
        ylo, yhi = (y0, y1) if y0 <= y1 else (y1, y0)
        j_lo, j_hi = ceil(ylo - 1.0), floor(yhi)
        if j_lo < 0 or j_hi >= h:
            return False
        for i in range(ceil(x0 - 1.0), floor(x1) + 1):
            if i < 0 or i >= w:
                return False
            for j in range(j_lo, j_hi + 1):
                if not rows[j][i]:
                    return False
        return True
    slope = (y1 - y0) / (x1 - x0)
    for i in range(ceil(x0 - 1.0), floor(x1) + 1):
        if i < 0 or i >= w:
            return False
        xa = x0 if x0 > i else i
        xb = x1 if x1 < i + 1 else i + 1
        ya = y0 + slope * (xa - x0)
        yb = y0 + slope * (xb - x0)
        if ya > yb:
            ya, yb = yb, ya
        j_lo, j_hi = ceil(ya - 1.0), floor(yb)
        if j_lo < 0 or j_hi >= h:
            return False
        row_free = True
        for j in range(j_lo, j_hi + 1):
            if not rows[j][i]:
                row_free = False
                break
        if not row_free:
            return False
    return True
