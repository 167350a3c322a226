"""Bundled benchmark maps and their default endpoints/budgets.

Maps are generated procedurally and also shipped as PGM package data so the
CLI can reference them by name or by file path.
"""

from __future__ import annotations

import importlib.resources
from dataclasses import dataclass
from pathlib import Path as FsPath
from typing import Callable, Dict, Tuple

import numpy as np

from .gridmap import OccupancyGrid, Point, save_pgm


@dataclass(frozen=True)
class BundledMap:
    name: str
    build: Callable[[], OccupancyGrid]
    start: Point
    goal: Point
    preset_iters: int


def open_square_grid(size: int = 50) -> OccupancyGrid:
    return OccupancyGrid(np.ones((size, size), dtype=bool))


def multi_room_grid() -> OccupancyGrid:
    """Three-room office-like floor plan with door openings (160 x 120)."""
    free = np.ones((120, 160), dtype=bool)
    free[:3, :] = False
    free[-3:, :] = False
    free[:, :3] = False
    free[:, -3:] = False
    # Left partition, door near the top.
    free[:, 52:56] = False
    free[18:34, 52:56] = True
    # Right partition, door near the bottom.
    free[:, 104:108] = False
    free[86:102, 104:108] = True
    # Horizontal partition in the middle column, door in its center.
    free[58:62, 52:108] = False
    free[58:62, 72:86] = True
    return OccupancyGrid(free)


def narrow_passage_grid() -> OccupancyGrid:
    """Single dividing wall with a 4-px slit (100 x 60)."""
    free = np.ones((60, 100), dtype=bool)
    free[:2, :] = False
    free[-2:, :] = False
    free[:, :2] = False
    free[:, -2:] = False
    free[:, 48:52] = False
    free[28:32, 48:52] = True
    return OccupancyGrid(free)


BUNDLED: Dict[str, BundledMap] = {
    "multi_room": BundledMap(
        name="multi_room",
        build=multi_room_grid,
        start=Point(20.5, 95.5),
        goal=Point(140.5, 20.5),
        preset_iters=20_000,
    ),
    "narrow_passage": BundledMap(
        name="narrow_passage",
        build=narrow_passage_grid,
        start=Point(15.5, 30.5),
        goal=Point(85.5, 30.5),
        preset_iters=2_000,
    ),
    "open50": BundledMap(
        name="open50",
        build=open_square_grid,
        start=Point(5.5, 5.5),
        goal=Point(44.5, 44.5),
        preset_iters=2_000,
    ),
}


def bundled_map(name: str) -> Tuple[OccupancyGrid, BundledMap]:
    meta = BUNDLED[name]
    return meta.build(), meta


def bundled_map_path(name: str) -> FsPath:
    """Filesystem path of the shipped PGM for a bundled map."""
    res = importlib.resources.files("esirrt") / "maps" / f"{name}.pgm"
    return FsPath(str(res))


def write_bundled_data(out_dir: FsPath) -> None:
    """Regenerate the shipped PGM/preset package data (used at build time)."""
    out_dir = FsPath(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    for name, meta in BUNDLED.items():
        (out_dir / f"{name}.pgm").write_bytes(save_pgm(meta.build()))
        (out_dir / f"{name}.cfg").write_text(
            f"# preset for map {name}\niters={meta.preset_iters}\n"
        )
