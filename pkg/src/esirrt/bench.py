"""Trial runner, statistics aggregation, and CSV emission."""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from pathlib import Path as FsPath
from typing import Dict, List, Optional, Sequence, Tuple

from .errors import EsirrtError, InvalidInput
from .gridmap import OccupancyGrid, Point
from .planner import PlannerParams, PlanResult, plan

METRICS = ("initial_iteration", "initial_cost", "final_cost")


@dataclass
class TrialRecord:
    planner: str
    seed: int
    trial: int
    initial_iteration: int
    initial_cost: float
    final_cost: float
    wall_time_ms: float
    cost_trace: List[float] = field(default_factory=list)
    error: Optional[str] = None

    @property
    def failed(self) -> bool:
        return self.error is not None


@dataclass(frozen=True)
class StatRow:
    mean: float
    std: float
    min: float
    max: float


@dataclass
class BenchStats:
    # planner -> metric -> StatRow
    rows: Dict[str, Dict[str, StatRow]]
    failures: Dict[str, int]


@dataclass
class BenchConfig:
    grid: OccupancyGrid
    start: Point
    goal: Point
    planners: Sequence[str] = ("irrt", "sirrt", "esirrt")
    trials: int = 100
    iters: int = 2000
    seed_base: int = 0
    params: PlannerParams = field(default_factory=PlannerParams)


def run_trials(config: BenchConfig) -> List[TrialRecord]:
    """Run trials planner by planner; trial i uses seed seed_base + i.

    A planner failure is recorded (and the run continues) rather than
    aborting the benchmark.
    """
    if config.trials < 1:
        raise InvalidInput("trial count must be >= 1")
    records: List[TrialRecord] = []
    for planner in config.planners:
        for trial in range(config.trials):
            seed = config.seed_base + trial
            t0 = time.perf_counter()
            try:
                result = plan(
                    planner,
                    config.grid,
                    config.start,
                    config.goal,
                    config.iters,
                    seed,
                    config.params,
                )
                wall = (time.perf_counter() - t0) * 1000.0
                err = None
                if result.goal_index is None:
                    err = "no solution within iteration budget"
                records.append(
                    TrialRecord(
                        planner=planner,
                        seed=seed,
                        trial=trial,
                        initial_iteration=result.initial_iteration,
                        initial_cost=result.initial_cost,
                        final_cost=result.final_cost,
                        wall_time_ms=wall,
                        cost_trace=[float(c) for c in result.trace],
                        error=err,
                    )
                )
            except EsirrtError as exc:
                wall = (time.perf_counter() - t0) * 1000.0
                records.append(
                    TrialRecord(
                        planner=planner,
                        seed=seed,
                        trial=trial,
                        initial_iteration=0,
                        initial_cost=math.inf,
                        final_cost=math.inf,
                        wall_time_ms=wall,
                        cost_trace=[],
                        error=f"{type(exc).__name__}: {exc}",
                    )
                )
    return records


def _two_stat(values: Sequence[float]) -> StatRow:
    n = len(values)
    mean = sum(values) / n
    if min(values) == max(values):
        # identical samples: report exactly zero instead of sum/n roundoff
        return StatRow(mean=values[0], std=0.0, min=values[0], max=values[0])
    if n > 1:
        var = sum((v - mean) ** 2 for v in values) / (n - 1)
        std = math.sqrt(var)
    else:
        std = 0.0
    return StatRow(mean=mean, std=std, min=min(values), max=max(values))


def aggregate(records: Sequence[TrialRecord]) -> BenchStats:
    """Per-planner mean / sample std (n-1) / min / max of the three metrics.

    Failed trials are excluded from the statistics and counted separately.
    """
    if not records:
        raise InvalidInput("cannot aggregate an empty record list")
    planners = []
    for r in records:
        if r.planner not in planners:
            planners.append(r.planner)
    rows: Dict[str, Dict[str, StatRow]] = {}
    failures: Dict[str, int] = {}
    for p in planners:
        ok = [r for r in records if r.planner == p and not r.failed]
        failures[p] = sum(1 for r in records if r.planner == p and r.failed)
        if not ok:
            raise InvalidInput(f"no successful trials for planner {p!r}")
        rows[p] = {
            "initial_iteration": _two_stat([r.initial_iteration for r in ok]),
            "initial_cost": _two_stat([r.initial_cost for r in ok]),
            "final_cost": _two_stat([r.final_cost for r in ok]),
        }
    return BenchStats(rows=rows, failures=failures)


def fmt(v: float) -> str:
    """Render a number with 6 significant digits; infinities as 'inf'."""
    if isinstance(v, float) and math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return f"{v:.6g}"


def export_csv(
    records: Sequence[TrialRecord],
    stats: BenchStats,
    out_dir,
) -> List[FsPath]:
    """Write trials.csv, per-trial trace CSVs, and stats.csv.

    All files use '\\n' newlines and 6-significant-digit floats so repeated
    runs with identical configs produce identical bytes (wall time aside).
    """
    out = FsPath(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written: List[FsPath] = []

    trials_path = out / "trials.csv"
    lines = ["planner,seed,trial,initial_iteration,initial_cost,final_cost,wall_time_ms"]
    for r in records:
        if r.failed:
            continue
        lines.append(
            f"{r.planner},{r.seed},{r.trial},{r.initial_iteration},"
            f"{fmt(r.initial_cost)},{fmt(r.final_cost)},{fmt(r.wall_time_ms)}"
        )
    trials_path.write_text("\n".join(lines) + "\n")
    written.append(trials_path)

    for r in records:
        if r.failed:
            continue
        trace_path = out / f"trace_{r.planner}_{r.trial}.csv"
        tlines = ["iteration,best_cost"]
        for i, c in enumerate(r.cost_trace):
            tlines.append(f"{i},{fmt(c)}")
        trace_path.write_text("\n".join(tlines) + "\n")
        written.append(trace_path)

    stats_path = out / "stats.csv"
    slines = ["planner,metric,mean,std,min,max,failures"]
    for p, metrics in stats.rows.items():
        for m in METRICS:
            row = metrics[m]
            slines.append(
                f"{p},{m},{fmt(row.mean)},{fmt(row.std)},{fmt(row.min)},"
                f"{fmt(row.max)},{stats.failures[p]}"
            )
    stats_path.write_text("\n".join(slines) + "\n")
    written.append(stats_path)
    return written


def load_trials_csv(path) -> List[Tuple]:
    """Parse a trials.csv back into tuples (round-trip check helper)."""
    rows = []
    with open(path) as fh:
        header = fh.readline().strip().split(",")
        for line in fh:
            vals = line.strip().split(",")
            rec = dict(zip(header, vals))
            rows.append(
                (
                    rec["planner"],
                    int(rec["seed"]),
                    int(rec["trial"]),
                    int(rec["initial_iteration"]),
                    float(rec["initial_cost"]),
                    float(rec["final_cost"]),
                )
            )
    return rows
