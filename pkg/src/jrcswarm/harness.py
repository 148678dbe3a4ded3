"""Sweeps over target count and per-UAV power, plus CSV emission."""

from __future__ import annotations

import csv
import json
import math
import time
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Any, Callable, Iterable, Mapping, Sequence

import numpy as np

from jrcswarm.baselines import froc_solve, orfc_solve
from jrcswarm.errors import ConfigError, ConfigIssue, JrcError, PackingError
from jrcswarm.physics import Position3D
from jrcswarm.scenario import Bounds, ScenarioConfig, validate_config
from jrcswarm.solver import RunResult, djrc_run

METHODS: dict[str, Callable[[ScenarioConfig], RunResult]] = {
    "djrc": djrc_run,
    "froc": froc_solve,
    "orfc": orfc_solve,
}

METRICS_COLUMNS = ("method", "sweep_kind", "sweep_value", "trial", "eta_total",
                   "rate_total_bps", "converged", "iterations", "wall_time_s")
TRACE_COLUMNS = ("iteration", "eta_total", "rate_total_bps", "fbs_x", "fbs_y", "fbs_h",
                 "uav_index", "x", "y", "h", "gamma", "action")
SUMMARY_COLUMNS = ("method", "sweep_kind", "sweep_value", "trials",
                   "eta_total_mean", "eta_total_min", "eta_total_max",
                   "rate_total_bps_mean", "rate_total_bps_min", "rate_total_bps_max",
                   "converged_fraction")

MAX_DRAWS = 100_000


class SweepKind(str, Enum):
    TARGET_COUNT = "TargetCount"
    TOTAL_POWER = "TotalPower"


@dataclass(frozen=True)
class SweepSpec:
    """What to sweep.

    ``target_region`` (x_min, x_max, y_min, y_max) limits where targets are
    drawn and defaults to the flight box; ``min_separation`` defaults to
    ``2 * d_g``. ``target_count`` is the layout size for power sweeps.
    """

    kind: SweepKind
    values: tuple[float, ...]
    methods: tuple[str, ...] = ("djrc", "froc", "orfc")
    trials_per_point: int = 5
    seed: int = 0
    target_count: int = 10
    target_region: tuple[float, float, float, float] | None = None
    min_separation: float | None = None


@dataclass(frozen=True)
class MetricsRecord:
    method: str
    sweep_kind: str
    sweep_value: float
    trial: int
    eta_total: float
    rate_total: float
    converged: bool
    iterations_used: int
    #: NaN unless timing was requested, so repeated sweeps stay byte-identical
    wall_time: float = math.nan


# ---------------------------------------------------------------------------
# sweep descriptions

_SWEEP_KEYS = {"kind", "values", "methods", "trials_per_point", "seed", "target_count",
               "target_region", "min_separation"}


def sweep_from_dict(data: Mapping[str, Any]) -> SweepSpec:
    issues: list[ConfigIssue] = []
    if not isinstance(data, Mapping):
        raise ConfigError([ConfigIssue("<root>", "sweep must be a JSON object")])
    for key in data:
        if key not in _SWEEP_KEYS:
            issues.append(ConfigIssue(key, "unknown key", key, sorted(_SWEEP_KEYS)))
    try:
        kind = SweepKind(data.get("kind"))
    except ValueError:
        issues.append(ConfigIssue("kind", "unknown sweep kind", data.get("kind"),
                                  [k.value for k in SweepKind]))
        kind = SweepKind.TARGET_COUNT
    values = data.get("values")
    if not isinstance(values, list) or not values \
            or not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in values):
        issues.append(ConfigIssue("values", "must be a non-empty list of numbers", values))
        values = [1]
    elif any(b <= a for a, b in zip(values, values[1:])):
        issues.append(ConfigIssue("values", "must be strictly increasing", values))
    if kind is SweepKind.TARGET_COUNT and not all(float(v).is_integer() and v >= 1 for v in values):
        issues.append(ConfigIssue("values", "target counts must be integers >= 1", values))
    if kind is SweepKind.TOTAL_POWER and not all(v > 0 for v in values):
        issues.append(ConfigIssue("values", "powers must be > 0", values))
    methods = data.get("methods", ["djrc", "froc", "orfc"])
    if not isinstance(methods, list) or not methods or any(m not in METHODS for m in methods):
        issues.append(ConfigIssue("methods", "must be a non-empty subset", methods, sorted(METHODS)))
        methods = ["djrc"]
    trials = data.get("trials_per_point", 5)
    if not isinstance(trials, int) or isinstance(trials, bool) or trials < 1:
        issues.append(ConfigIssue("trials_per_point", "must be an integer >= 1", trials))
    seed = data.get("seed", 0)
    if not isinstance(seed, int) or isinstance(seed, bool) or seed < 0:
        issues.append(ConfigIssue("seed", "must be an unsigned integer", seed))
    count = data.get("target_count", 10)
    if not isinstance(count, int) or isinstance(count, bool) or count < 1:
        issues.append(ConfigIssue("target_count", "must be an integer >= 1", count))
    region = data.get("target_region")
    if region is not None:
        if not isinstance(region, list) or len(region) != 4 \
                or not region[0] < region[1] or not region[2] < region[3]:
            issues.append(ConfigIssue("target_region", "must be [x_min, x_max, y_min, y_max]",
                                      region))
        else:
            region = tuple(float(v) for v in region)
    sep = data.get("min_separation")
    if sep is not None and (not isinstance(sep, (int, float)) or sep <= 0):
        issues.append(ConfigIssue("min_separation", "must be > 0", sep))
    if issues:
        raise ConfigError(issues)
    cast = int if kind is SweepKind.TARGET_COUNT else float
    return SweepSpec(kind, tuple(cast(v) for v in values), tuple(methods), trials, seed,
                     count, region, None if sep is None else float(sep))


def load_sweep(path: str | Path) -> SweepSpec:
    path = Path(path)
    try:
        data = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError([ConfigIssue(str(path), f"invalid JSON: {exc}")]) from exc
    return sweep_from_dict(data)


# ---------------------------------------------------------------------------
# layouts and runs

def generate_targets(n: int, bounds: Bounds | Sequence[float], min_separation: float,
                     seed: int | Sequence[int]) -> list[Position3D]:
    """Uniform ground targets with pairwise horizontal spacing >= ``min_separation``.

    ``bounds`` is a :class:`Bounds` or an (x_min, x_max, y_min, y_max)
    tuple. Raises PackingError once MAX_DRAWS candidates have been tried.
    """
    if n < 1:
        raise ValueError("need at least one target")
    if isinstance(bounds, Bounds):
        x0, x1, y0, y1 = bounds.x_min, bounds.x_max, bounds.y_min, bounds.y_max
    else:
        x0, x1, y0, y1 = bounds
    rng = np.random.default_rng(seed)
    pts: list[tuple[float, float]] = []
    for _ in range(MAX_DRAWS):
        x, y = rng.uniform((x0, y0), (x1, y1))
        if all(math.hypot(x - px, y - py) >= min_separation for px, py in pts):
            pts.append((float(x), float(y)))
            if len(pts) == n:
                return [Position3D(x, y, 0.0) for x, y in pts]
    raise PackingError(f"placed {len(pts)} of {n} targets with spacing {min_separation} m "
                       f"after {MAX_DRAWS} draws")


def run_method(cfg: ScenarioConfig, method: str, timing: bool = False) -> tuple[RunResult, float]:
    start = time.perf_counter()
    result = METHODS[method](cfg)
    elapsed = time.perf_counter() - start if timing else math.nan
    return result, elapsed


def record_for(result: RunResult, kind: str, value: float, trial: int,
               wall_time: float = math.nan) -> MetricsRecord:
    return MetricsRecord(result.method, kind, value, trial, result.eta_total, result.rate_total,
                         result.converged, result.iterations_used, wall_time)


def _cell_config(base: ScenarioConfig, spec: SweepSpec, value, trial: int) -> ScenarioConfig:
    n = int(value) if spec.kind is SweepKind.TARGET_COUNT else spec.target_count
    region = spec.target_region or base.bounds
    sep = spec.min_separation if spec.min_separation is not None else 2 * base.safe_distance_dg
    # layout depends on (seed, n, trial) only, so every method and power level shares it
    targets = generate_targets(n, region, sep, [spec.seed, n, trial])
    changes: dict[str, Any] = {"targets": tuple(targets), "weights_w": None}
    if spec.kind is SweepKind.TOTAL_POWER:
        changes["total_power_pt"] = float(value)
    return validate_config(base.replace(**changes))


def run_sweep(base_cfg: ScenarioConfig, spec: SweepSpec, timing: bool = False,
              progress: Callable[[MetricsRecord], None] | None = None,
              results: list[tuple[MetricsRecord, ScenarioConfig, RunResult]] | None = None) -> list[MetricsRecord]:
    """Run every (value, trial, method) cell; failures become converged=False records.

    Pass a list as ``results`` to also collect ``(record, cfg, result)`` for
    every cell that ran.
    """
    records: list[MetricsRecord] = []
    for value in spec.values:
        for trial in range(spec.trials_per_point):
            try:
                cfg = _cell_config(base_cfg, spec, value, trial)
            except JrcError:
                cfg = None
            for method in spec.methods:
                if cfg is None:
                    rec = MetricsRecord(method, spec.kind.value, value, trial, math.nan, math.nan,
                                        False, 0)
                else:
                    try:
                        result, elapsed = run_method(cfg, method, timing)
                        rec = record_for(result, spec.kind.value, value, trial, elapsed)
                        if results is not None:
                            results.append((rec, cfg, result))
                    except JrcError:
                        rec = MetricsRecord(method, spec.kind.value, value, trial, math.nan,
                                            math.nan, False, 0)
                records.append(rec)
                if progress is not None:
                    progress(rec)
    records.sort(key=lambda r: (r.method, r.sweep_value, r.trial))
    return records


def summarize(records: Iterable[MetricsRecord]) -> list[dict[str, Any]]:
    """Mean/min/max per (method, sweep value)."""
    groups: dict[tuple, list[MetricsRecord]] = {}
    for r in records:
        groups.setdefault((r.method, r.sweep_kind, r.sweep_value), []).append(r)
    rows = []
    for (method, kind, value), recs in sorted(groups.items(), key=lambda kv: (kv[0][0], kv[0][2])):
        eta = np.array([r.eta_total for r in recs])
        rate = np.array([r.rate_total for r in recs])
        rows.append({
            "method": method, "sweep_kind": kind, "sweep_value": value, "trials": len(recs),
            "eta_total_mean": math.fsum(eta) / len(eta), "eta_total_min": float(eta.min()),
            "eta_total_max": float(eta.max()),
            "rate_total_bps_mean": math.fsum(rate) / len(rate),
            "rate_total_bps_min": float(rate.min()), "rate_total_bps_max": float(rate.max()),
            "converged_fraction": sum(r.converged for r in recs) / len(recs),
        })
    return rows


# ---------------------------------------------------------------------------
# CSV

def _fmt(v: Any) -> str:
    if isinstance(v, bool) or isinstance(v, np.bool_):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        v = float(v)
        return "" if math.isnan(v) else f"{v:.17g}"
    if isinstance(v, Enum):
        return str(v.value)
    return str(v)


def _write_rows(path: str | Path, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> None:
    path = Path(path)
    try:
        with path.open("w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(header)
            for row in rows:
                w.writerow([_fmt(v) for v in row])
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror or exc}") from exc


def metrics_rows(records: Sequence[MetricsRecord]) -> list[tuple]:
    return [(r.method, r.sweep_kind, r.sweep_value, r.trial, r.eta_total, r.rate_total,
             r.converged, r.iterations_used, r.wall_time) for r in records]


def trace_rows(result: RunResult) -> list[tuple]:
    rows = []
    for it in result.trace:
        for m, (pos, gamma) in enumerate(zip(it.uav_positions, it.gammas)):
            action = it.actions_taken[m].kind.value if it.actions_taken else "init"
            rows.append((it.iteration, it.eta_total, it.rate_total, it.fbs.x, it.fbs.y, it.fbs.h,
                         m, pos.x, pos.y, pos.h, gamma, action))
    return rows


def emit_csv(data: RunResult | Sequence[MetricsRecord], path: str | Path) -> None:
    """Write metrics records or a run trace as CSV (one row per UAV per iteration for traces)."""
    if isinstance(data, RunResult):
        _write_rows(path, TRACE_COLUMNS, trace_rows(data))
        return
    if not data:
        raise ValueError("no records to write")
    _write_rows(path, METRICS_COLUMNS, metrics_rows(data))


def emit_summary_csv(records: Sequence[MetricsRecord], path: str | Path) -> None:
    rows = summarize(records)
    _write_rows(path, SUMMARY_COLUMNS, [[row[c] for c in SUMMARY_COLUMNS] for row in rows])
