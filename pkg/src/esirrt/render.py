"""Standalone SVG rendering of maps, trees, paths, and the informed ellipse.

One grid cell maps to one SVG unit.  Styling follows the usual debugging
palette: occupied cells dark, tree edges blue, initial path cyan, splined
path magenta, refined initial path green, final path red.
"""

from __future__ import annotations

import math
from typing import Dict, Optional

from .gridmap import OccupancyGrid, Path
from .planner import InformedRegion, PlanTree
from .skeleton import SkeletonGrid

PATH_STYLES = {
    "initial": ("path-initial", "#00c8c8"),
    "spline": ("path-spline", "#e000e0"),
    "refined": ("path-refined", "#00b000"),
    "final": ("path-final", "#e00000"),
}


def render_svg(
    grid: OccupancyGrid,
    tree: Optional[PlanTree] = None,
    paths: Optional[Dict[str, Path]] = None,
    region: Optional[InformedRegion] = None,
    skeleton: Optional[SkeletonGrid] = None,
) -> str:
    w, h = grid.width, grid.height
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" '
        f'viewBox="0 0 {w} {h}">'
    ]
    parts.append('<g class="map">')
    parts.append(f'<rect x="0" y="0" width="{w}" height="{h}" fill="#ffffff"/>')
    parts.extend(_raster_rects(~grid.free, "#303030"))
    parts.append("</g>")

    if skeleton is not None:
        parts.append('<g class="skeleton">')
        parts.extend(_raster_rects(skeleton.skeleton_cells, "#e0a000"))
        parts.append("</g>")

    if tree is not None:
        parts.append('<g class="tree">')
        for v in range(tree.n):
            par = tree.parent[v]
            if par == -1:
                continue
            x1, y1 = tree._pos[par]
            x2, y2 = tree._pos[v]
            parts.append(
                f'<line class="tree-edge" x1="{x1:.3f}" y1="{y1:.3f}" '
                f'x2="{x2:.3f}" y2="{y2:.3f}" stroke="#4060ff" stroke-width="0.3"/>'
            )
        parts.append("</g>")

    if paths:
        parts.append('<g class="paths">')
        for kind, path in paths.items():
            cls, color = PATH_STYLES.get(kind, (f"path-{kind}", "#000000"))
            pts = " ".join(f"{p.x:.3f},{p.y:.3f}" for p in path)
            parts.append(
                f'<polyline class="{cls}" points="{pts}" fill="none" '
                f'stroke="{color}" stroke-width="0.8"/>'
            )
        parts.append("</g>")

    if region is not None:
        a, b = region.focus_a, region.focus_b
        cx, cy = (a.x + b.x) / 2.0, (a.y + b.y) / 2.0
        rx = region.c_best / 2.0
        ry = math.sqrt(max(region.c_best**2 - region.c_min**2, 0.0)) / 2.0
        angle = math.degrees(math.atan2(b.y - a.y, b.x - a.x))
        parts.append(
            f'<ellipse class="informed-region" cx="{cx:.6f}" cy="{cy:.6f}" '
            f'rx="{rx:.6f}" ry="{ry:.6f}" '
            f'transform="rotate({angle:.6f} {cx:.6f} {cy:.6f})" '
            f'fill="none" stroke="#00b000" stroke-width="0.5"/>'
        )
    parts.append("</svg>")
    return "\n".join(parts)


def _raster_rects(mask, color: str):
    """One <rect> per horizontal run of set cells (compact raster encoding)."""
    rects = []
    for y in range(mask.shape[0]):
        row = mask[y]
        x = 0
        width = mask.shape[1]
        while x < width:
            if row[x]:
                x0 = x
                while x < width and row[x]:
                    x += 1
                rects.append(
                    f'<rect x="{x0}" y="{y}" width="{x - x0}" height="1" '
                    f'fill="{color}"/>'
                )
            else:
                x += 1
    return rects


def export_svg(
    out_path,
    grid: OccupancyGrid,
    tree: Optional[PlanTree] = None,
    paths: Optional[Dict[str, Path]] = None,
    region: Optional[InformedRegion] = None,
    skeleton: Optional[SkeletonGrid] = None,
) -> None:
    svg = render_svg(grid, tree=tree, paths=paths, region=region, skeleton=skeleton)
    with open(out_path, "w") as fh:
        fh.write(svg + "\n")
