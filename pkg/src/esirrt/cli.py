"""Command-line interface: plan, bench, and skeleton subcommands.

Exit codes: 0 success, 1 invalid input, 2 planning failure (disconnected or
no solution), 3 I/O error.
"""

from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path as FsPath

from . import maps
from .bench import BenchConfig, aggregate, export_csv, run_trials
from .errors import (
    DisconnectedGraph,
    EmptyFreeSpace,
    EsirrtError,
    ParseError,
)
from .gridmap import DEFAULT_FREE_THRESHOLD, OccupancyGrid, Point, load_pgm
from .planner import InformedRegion, PlannerParams, plan
from .render import export_svg
from .skeleton import harris_corners, thin

EXIT_OK = 0
EXIT_INVALID_INPUT = 1
EXIT_PLANNING_FAILURE = 2
EXIT_IO_ERROR = 3

# Keys accepted in a key=value config file; hyphens as in the CLI flags.
CONFIG_KEYS = {
    "eta",
    "gamma",
    "goal-bias",
    "goal-radius",
    "rewire-radius",
    "subsample-d",
    "spline-n",
    "seed",
    "iters",
}


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ParseError, EmptyFreeSpace) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID_INPUT
    except DisconnectedGraph as exc:
        print(f"planning failure: {exc}", file=sys.stderr)
        return EXIT_PLANNING_FAILURE
    except EsirrtError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID_INPUT
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO_ERROR


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="esirrt",
        description="Skeleton-initialized RRT* planning on 2D occupancy grids",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_plan = sub.add_parser("plan", help="run a single planning query")
    _add_map_args(p_plan)
    p_plan.add_argument("--start", required=True, help="start as x,y (pixels)")
    p_plan.add_argument("--goal", required=True, help="goal as x,y (pixels)")
    p_plan.add_argument(
        "--planner", choices=("irrt", "sirrt", "esirrt"), default="esirrt"
    )
    p_plan.add_argument("--iters", type=int, default=None)
    p_plan.add_argument("--seed", type=int, default=None)
    p_plan.add_argument("--svg", help="write a rendering of the result")
    p_plan.add_argument("--csv", help="write the per-iteration cost trace")
    _add_param_args(p_plan)
    p_plan.set_defaults(func=_cmd_plan)

    p_bench = sub.add_parser("bench", help="run seeded trials and aggregate")
    _add_map_args(p_bench)
    p_bench.add_argument("--start", required=True, help="start as x,y (pixels)")
    p_bench.add_argument("--goal", required=True, help="goal as x,y (pixels)")
    p_bench.add_argument(
        "--planners", default="irrt,sirrt,esirrt", help="comma-separated planner ids"
    )
    p_bench.add_argument("--trials", type=int, default=100)
    p_bench.add_argument("--iters", type=int, default=None)
    p_bench.add_argument("--seed-base", type=int, default=0)
    p_bench.add_argument("--out-dir", required=True)
    _add_param_args(p_bench)
    p_bench.set_defaults(func=_cmd_bench)

    p_skel = sub.add_parser("skeleton", help="render skeleton and corner nodes")
    _add_map_args(p_skel)
    p_skel.add_argument("--out", required=True, help="output SVG path")
    p_skel.set_defaults(func=_cmd_skeleton)
    return parser


def _add_map_args(sp) -> None:
    sp.add_argument(
        "--map",
        required=True,
        dest="map_path",
        help="PGM (P5) map file, or a bundled map name "
        f"({', '.join(sorted(maps.BUNDLED))})",
    )
    sp.add_argument(
        "--free-threshold",
        type=int,
        default=DEFAULT_FREE_THRESHOLD,
        help="gray value at or above which a cell is free (0-255)",
    )
    sp.add_argument(
        "--inflate",
        type=int,
        default=0,
        help="integer obstacle inflation radius in cells",
    )


def _add_param_args(sp) -> None:
    sp.add_argument("--eta", type=float, default=None)
    sp.add_argument("--gamma", type=float, default=None)
    sp.add_argument("--goal-bias", type=float, default=None)
    sp.add_argument("--goal-radius", type=float, default=None)
    sp.add_argument("--rewire-radius", type=float, default=None)
    sp.add_argument("--subsample-d", type=float, default=None)
    sp.add_argument("--spline-n", type=int, default=None)
    sp.add_argument("--config", help="key=value parameter file")


def _load_grid(args) -> OccupancyGrid:
    name = args.map_path
    if name in maps.BUNDLED:
        grid = maps.BUNDLED[name].build()
        if args.free_threshold != DEFAULT_FREE_THRESHOLD:
            # Bundled maps are strictly binary; the threshold is a no-op
            # unless it excludes white (255) cells entirely.
            if args.free_threshold > 255:
                raise ParseError("free threshold above 255")
    else:
        grid = load_pgm(FsPath(name).read_bytes(), args.free_threshold)
    if args.inflate:
        grid = grid.inflate(args.inflate)
    return grid


def _parse_point(text: str) -> Point:
    try:
        xs, ys = text.split(",")
        p = Point(float(xs), float(ys))
    except ValueError:
        raise ParseError(f"expected x,y point, got {text!r}") from None
    if not (math.isfinite(p.x) and math.isfinite(p.y)):
        raise ParseError(f"point {text!r} is not finite")
    return p


def _read_config(path) -> dict:
    values = {}
    for lineno, raw in enumerate(FsPath(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ParseError(f"{path}:{lineno}: expected key=value")
        key, val = (s.strip() for s in line.split("=", 1))
        if key not in CONFIG_KEYS:
            raise ParseError(f"{path}:{lineno}: unknown key {key!r}")
        values[key] = val
    return values


def _resolve_params(args) -> tuple[PlannerParams, int, int]:
    """Merge defaults < config file < explicit CLI flags.

    Returns (params, iters, seed/seed_base).
    """
    cfg = _read_config(args.config) if getattr(args, "config", None) else {}

    def pick(flag_value, key, cast):
        if flag_value is not None:
            return flag_value
        if key in cfg:
            try:
                return cast(cfg[key])
            except ValueError:
                raise ParseError(f"config value for {key!r} is not a number") from None
        return None

    base = PlannerParams()
    params = PlannerParams(
        eta=pick(args.eta, "eta", float) or base.eta,
        gamma=pick(args.gamma, "gamma", float),
        goal_bias=(
            v if (v := pick(args.goal_bias, "goal-bias", float)) is not None
            else base.goal_bias
        ),
        goal_radius=pick(args.goal_radius, "goal-radius", float),
        rewire_radius=pick(args.rewire_radius, "rewire-radius", float),
        subsample_d=pick(args.subsample_d, "subsample-d", float) or base.subsample_d,
        spline_n=pick(args.spline_n, "spline-n", int) or base.spline_n,
    )
    iters = pick(getattr(args, "iters", None), "iters", int)
    if iters is None:
        iters = 2000
    seed_flag = getattr(args, "seed", None)
    if seed_flag is None:
        seed_flag = getattr(args, "seed_base", None)
    seed = pick(seed_flag, "seed", int)
    if seed is None:
        seed = 0
    return params, iters, seed


def _cmd_plan(args) -> int:
    grid = _load_grid(args)
    start = _parse_point(args.start)
    goal = _parse_point(args.goal)
    params, iters, seed = _resolve_params(args)
    result = plan(args.planner, grid, start, goal, iters, seed, params)
    if result.goal_index is None:
        print("no solution found within the iteration budget", file=sys.stderr)
        return EXIT_PLANNING_FAILURE
    print(
        f"planner={args.planner} initial_iteration={result.initial_iteration} "
        f"initial_cost={result.initial_cost:.6g} final_cost={result.final_cost:.6g} "
        f"nodes={result.tree.n}"
    )
    if args.csv:
        lines = ["iteration,best_cost"]
        for i, c in enumerate(result.trace):
            lines.append(f"{i},{'inf' if math.isinf(c) else format(c, '.6g')}")
        FsPath(args.csv).write_text("\n".join(lines) + "\n")
    if args.svg:
        c_min = math.hypot(goal.x - start.x, goal.y - start.y)
        region = InformedRegion(
            start, goal, max(result.final_cost, c_min), c_min
        )
        export_svg(
            args.svg,
            grid,
            tree=result.tree,
            paths={"final": result.path},
            region=region,
        )
    return EXIT_OK


def _cmd_bench(args) -> int:
    grid = _load_grid(args)
    start = _parse_point(args.start)
    goal = _parse_point(args.goal)
    params, iters, seed_base = _resolve_params(args)
    planners = tuple(p.strip() for p in args.planners.split(",") if p.strip())
    config = BenchConfig(
        grid=grid,
        start=start,
        goal=goal,
        planners=planners,
        trials=args.trials,
        iters=iters,
        seed_base=seed_base,
        params=params,
    )
    records = run_trials(config)
    stats = aggregate(records)
    export_csv(records, stats, args.out_dir)
    for p in planners:
        row = stats.rows[p]["final_cost"]
        print(
            f"{p}: final {row.mean:.6g} ± {row.std:.6g} "
            f"({row.min:.6g}–{row.max:.6g}), failures={stats.failures[p]}"
        )
    if all(r.failed for r in records):
        return EXIT_PLANNING_FAILURE
    return EXIT_OK


def _cmd_skeleton(args) -> int:
    grid = _load_grid(args)
    skel = thin(grid)
    corners = harris_corners(skel, include_endpoints=True)
    export_svg(args.out, grid, skeleton=skel)
    # Corner markers appended by hand to keep render_svg group structure simple.
    svg = FsPath(args.out).read_text()
    markers = "".join(
        f'<circle class="corner" cx="{p.x:.3f}" cy="{p.y:.3f}" r="1.2" '
        f'fill="#e0a000" stroke="#806000" stroke-width="0.2"/>'
        for p in corners
    )
    svg = svg.replace("</svg>", f'<g class="corners">{markers}</g>\n</svg>')
    FsPath(args.out).write_text(svg)
    print(f"skeleton pixels={skel.pixel_count()} corners={len(corners)}")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
