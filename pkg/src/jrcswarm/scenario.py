"""Scenario configuration, initial swarm construction and the C1-C8 constraint checker.

Constraint ids used throughout the package:

====  ========================================================
C1    UAV within radar range of its target (d <= R(p_r))
C2    uplink rate >= R_min
C3    pairwise UAV separation >= d_g
C4    x inside [x_min, x_max] (UAVs and FBS)
C5    y inside [y_min, y_max] (UAVs and FBS)
C6    0 < altitude <= h_max (UAVs and FBS)
C7    FBS altitude strictly above every UAV
C8    power split factor in [0, 1]
====  ========================================================
"""

from __future__ import annotations

import dataclasses
import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Iterable, Mapping

import numpy as np

from jrcswarm.errors import (
    ConfigError,
    ConfigIssue,
    DegenerateGeometryError,
    InfeasibleScenarioError,
)
from jrcswarm.physics import (
    CommParams,
    Position3D,
    RadarParams,
    db_to_linear,
    distance3d,
    radar_range,
    uplink_rates,
)

INTERFERENCE_MODES = ("full", "none")


@dataclass(frozen=True)
class Bounds:
    x_min: float = 0.0
    x_max: float = 1000.0
    y_min: float = 0.0
    y_max: float = 1000.0
    h_max: float = 100.0

    @property
    def diagonal(self) -> float:
        return math.sqrt((self.x_max - self.x_min) ** 2 + (self.y_max - self.y_min) ** 2
                         + self.h_max ** 2)


@dataclass(frozen=True)
class AlgoParams:
    """Step sizes and iteration caps.

    ``learning_rate_alpha=None`` picks the FBS step so that the first ascent
    move is ``1e-3 * box diagonal`` long. ``grad_tolerance_eps`` is relative:
    FBS ascent stops once ``|grad f| <= eps * |f|`` (per meter).
    """

    delta_gamma: float = 0.01
    delta_r: float = 2.0
    learning_rate_alpha: float | None = None
    grad_tolerance_eps: float = 1e-3
    fd_step: float = 0.5
    max_outer_iters_Tm: int = 500
    max_fbs_iters_TF: int = 100


@dataclass(frozen=True)
class ScenarioConfig:
    targets: tuple[Position3D, ...]
    bounds: Bounds = Bounds()
    total_power_pt: float = 30.0
    safe_distance_dg: float = 40.0
    fbs_clearance_dh: float = 10.0
    weights_w: tuple[float, ...] | None = None
    radar: RadarParams = RadarParams()
    comm: CommParams = CommParams()
    algo: AlgoParams = AlgoParams()
    seed: int = 0
    interference: str = "full"
    baseline_gamma: float = 0.5

    @property
    def n_uavs(self) -> int:
        return len(self.targets)

    @property
    def interference_on(self) -> bool:
        return self.interference == "full"

    @property
    def uav_ceiling(self) -> float:
        """Highest UAV altitude that still leaves room for the FBS clearance."""
        return self.bounds.h_max - self.fbs_clearance_dh

    def target_array(self) -> np.ndarray:
        return np.array(self.targets, dtype=float).reshape(-1, 3)

    def replace(self, **changes) -> "ScenarioConfig":
        return dataclasses.replace(self, **changes)


@dataclass(frozen=True)
class UavState:
    pos: Position3D
    gamma: float
    target_index: int


@dataclass(frozen=True)
class SwarmState:
    uavs: tuple[UavState, ...]
    fbs: Position3D
    iteration: int = 0

    def positions(self) -> np.ndarray:
        return np.array([u.pos for u in self.uavs], dtype=float).reshape(-1, 3)

    def gammas(self) -> np.ndarray:
        return np.array([u.gamma for u in self.uavs], dtype=float)

    def with_uav(self, m: int, uav: UavState) -> "SwarmState":
        uavs = list(self.uavs)
        uavs[m] = uav
        return dataclasses.replace(self, uavs=tuple(uavs))


@dataclass(frozen=True)
class ConstraintEntry:
    """One constraint evaluated for one subject (UAV index, or ``"fbs"``).

    ``slack`` is in the constraint's native unit; negative means violated.
    """

    id: str
    subject: int | str
    passed: bool
    slack: float


@dataclass(frozen=True)
class ConstraintReport:
    entries: tuple[ConstraintEntry, ...]

    @property
    def all_satisfied(self) -> bool:
        return all(e.passed for e in self.entries)

    def failures(self) -> list[ConstraintEntry]:
        return [e for e in self.entries if not e.passed]

    def for_id(self, cid: str) -> list[ConstraintEntry]:
        return [e for e in self.entries if e.id == cid]

    def passed(self, cid: str, subject: int | str | None = None) -> bool:
        return all(e.passed for e in self.entries
                   if e.id == cid and (subject is None or e.subject == subject))


# ---------------------------------------------------------------------------
# config ingestion

_SECTION_TYPES = {"bounds": Bounds, "radar": RadarParams, "comm": CommParams, "algo": AlgoParams}
_TOP_KEYS = {f.name for f in dataclasses.fields(ScenarioConfig)}


def _parse_targets(raw: Any, issues: list[ConfigIssue]) -> tuple[Position3D, ...]:
    if not isinstance(raw, (list, tuple)):
        issues.append(ConfigIssue("targets", "must be a list of [x, y] or [x, y, 0]", raw))
        return ()
    out = []
    for i, t in enumerate(raw):
        if isinstance(t, Mapping):
            t = [t.get("x"), t.get("y"), t.get("h", 0.0)]
        if not isinstance(t, (list, tuple)) or len(t) not in (2, 3):
            issues.append(ConfigIssue(f"targets[{i}]", "must have 2 or 3 coordinates", t))
            continue
        try:
            coords = [float(c) for c in t] + [0.0] * (3 - len(t))
        except (TypeError, ValueError):
            issues.append(ConfigIssue(f"targets[{i}]", "coordinates must be numbers", t))
            continue
        out.append(Position3D(*coords))
    return tuple(out)


def _parse_section(name: str, raw: Any, issues: list[ConfigIssue]):
    cls = _SECTION_TYPES[name]
    if raw is None:
        return cls()
    if not isinstance(raw, Mapping):
        issues.append(ConfigIssue(name, "must be an object", raw))
        return cls()
    known = {f.name for f in dataclasses.fields(cls)}
    for key in raw:
        if key not in known:
            issues.append(ConfigIssue(f"{name}.{key}", "unknown key", key, sorted(known)))
    values = {k: v for k, v in raw.items() if k in known}
    if name == "radar" and "noise_figure_F" in values:
        # files carry the noise figure in dB
        try:
            values["noise_figure_F"] = float(db_to_linear(float(values["noise_figure_F"])))
        except (TypeError, ValueError):
            issues.append(ConfigIssue("radar.noise_figure_F", "must be a number (dB)",
                                      values["noise_figure_F"]))
            del values["noise_figure_F"]
    return cls(**values)


def config_from_dict(data: Mapping[str, Any]) -> ScenarioConfig:
    """Build and validate a config from its JSON object form.

    Raises ConfigError listing every problem found.
    """
    issues: list[ConfigIssue] = []
    if not isinstance(data, Mapping):
        raise ConfigError([ConfigIssue("<root>", "config must be a JSON object", type(data).__name__)])
    for key in data:
        if key not in _TOP_KEYS:
            issues.append(ConfigIssue(key, "unknown key", key, sorted(_TOP_KEYS)))
    kwargs: dict[str, Any] = {"targets": _parse_targets(data.get("targets"), issues)}
    for name in _SECTION_TYPES:
        kwargs[name] = _parse_section(name, data.get(name), issues)
    for key in ("total_power_pt", "safe_distance_dg", "fbs_clearance_dh", "seed",
                "interference", "baseline_gamma"):
        if key in data:
            kwargs[key] = data[key]
    if data.get("weights_w") is not None:
        w = data["weights_w"]
        kwargs["weights_w"] = tuple(w) if isinstance(w, (list, tuple)) else w
    cfg = ScenarioConfig(**kwargs)
    return validate_config(cfg, _prior=issues)


def load_config(path: str | Path) -> ScenarioConfig:
    path = Path(path)
    try:
        data = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError([ConfigIssue(str(path), f"invalid JSON: {exc}")]) from exc
    return config_from_dict(data)


def config_to_dict(cfg: ScenarioConfig) -> dict[str, Any]:
    """Inverse of config_from_dict (noise figure written back in dB)."""
    out: dict[str, Any] = {
        "targets": [[t.x, t.y, t.h] for t in cfg.targets],
        "total_power_pt": cfg.total_power_pt,
        "safe_distance_dg": cfg.safe_distance_dg,
        "fbs_clearance_dh": cfg.fbs_clearance_dh,
        "weights_w": list(cfg.weights_w) if cfg.weights_w is not None else None,
        "seed": cfg.seed,
        "interference": cfg.interference,
        "baseline_gamma": cfg.baseline_gamma,
    }
    for name in _SECTION_TYPES:
        out[name] = dataclasses.asdict(getattr(cfg, name))
    out["radar"]["noise_figure_F"] = 10.0 * math.log10(cfg.radar.noise_figure_F)
    return out


def _is_number(v: Any) -> bool:
    return isinstance(v, (int, float, np.floating, np.integer)) and not isinstance(v, bool) \
        and math.isfinite(v)


def validate_config(cfg: ScenarioConfig, _prior: Iterable[ConfigIssue] = ()) -> ScenarioConfig:
    """Check every invariant; return the normalized config (weights filled in).

    Raises ConfigError carrying the full list of violations.
    """
    issues = list(_prior)
    b = cfg.bounds

    def need_positive(path: str, value: Any) -> None:
        if not _is_number(value) or value <= 0:
            issues.append(ConfigIssue(path, "must be a finite number > 0", value, "> 0"))

    def need_nonnegative(path: str, value: Any) -> None:
        if not _is_number(value) or value < 0:
            issues.append(ConfigIssue(path, "must be a finite number >= 0", value, ">= 0"))

    for f in dataclasses.fields(Bounds):
        if not _is_number(getattr(b, f.name)):
            issues.append(ConfigIssue(f"bounds.{f.name}", "must be a finite number",
                                      getattr(b, f.name)))
    bounds_ok = all(_is_number(getattr(b, f.name)) for f in dataclasses.fields(Bounds))
    if bounds_ok:
        if not b.x_min < b.x_max:
            issues.append(ConfigIssue("bounds.x", "degenerate flight box",
                                      (b.x_min, b.x_max), "x_min < x_max"))
        if not b.y_min < b.y_max:
            issues.append(ConfigIssue("bounds.y", "degenerate flight box",
                                      (b.y_min, b.y_max), "y_min < y_max"))
        if not b.h_max > 0:
            issues.append(ConfigIssue("bounds.h_max", "degenerate flight box", b.h_max, "> 0"))

    if not cfg.targets:
        issues.append(ConfigIssue("targets", "at least one target required", 0, ">= 1"))
    for i, t in enumerate(cfg.targets):
        if not all(math.isfinite(c) for c in t):
            issues.append(ConfigIssue(f"targets[{i}]", "coordinates must be finite", tuple(t)))
            continue
        if t.h != 0.0:
            issues.append(ConfigIssue(f"targets[{i}].h", "targets sit on the ground", t.h, 0.0))
        if bounds_ok and not (b.x_min <= t.x <= b.x_max and b.y_min <= t.y <= b.y_max):
            issues.append(ConfigIssue(f"targets[{i}]", "outside flight box", (t.x, t.y),
                                      f"[{b.x_min},{b.x_max}]x[{b.y_min},{b.y_max}]"))

    need_positive("total_power_pt", cfg.total_power_pt)
    need_positive("safe_distance_dg", cfg.safe_distance_dg)
    need_positive("fbs_clearance_dh", cfg.fbs_clearance_dh)
    if _is_number(cfg.fbs_clearance_dh) and bounds_ok and cfg.fbs_clearance_dh >= b.h_max:
        issues.append(ConfigIssue("fbs_clearance_dh", "leaves no room below h_max",
                                  cfg.fbs_clearance_dh, f"< {b.h_max}"))

    weights = cfg.weights_w
    n = len(cfg.targets)
    if weights is None:
        weights = tuple([1.0 / n] * n) if n else ()
    elif not isinstance(weights, tuple) or not all(_is_number(w) for w in weights):
        issues.append(ConfigIssue("weights_w", "must be a list of numbers", weights))
    else:
        weights = tuple(float(w) for w in weights)
        if len(weights) != n:
            issues.append(ConfigIssue("weights_w", "length must match targets", len(weights), n))
        if any(w < 0 for w in weights):
            issues.append(ConfigIssue("weights_w", "weights must be >= 0", weights))
        total = math.fsum(weights)
        if abs(total - 1.0) > 1e-9:
            issues.append(ConfigIssue("weights_w", f"weights sum {total:g} != 1", total, 1.0))

    for name in ("radar", "comm"):
        section = getattr(cfg, name)
        for f in dataclasses.fields(section):
            # a zero rate floor is legal: sensing-only operation
            check = need_nonnegative if f.name == "rate_min_Rmin" else need_positive
            check(f"{name}.{f.name}", getattr(section, f.name))
    r = cfg.radar
    if _is_number(r.radar_bandwidth_Br) and _is_number(r.carrier_freq_fc) \
            and not r.radar_bandwidth_Br < r.carrier_freq_fc:
        issues.append(ConfigIssue("radar.radar_bandwidth_Br", "must be below the carrier",
                                  r.radar_bandwidth_Br, f"< {r.carrier_freq_fc}"))
    for p in ("los_prob_xi", "nlos_prob_xi"):
        v = getattr(cfg.comm, p)
        if _is_number(v) and v > 1:
            issues.append(ConfigIssue(f"comm.{p}", "probability must be in [0, 1]", v, "<= 1"))

    a = cfg.algo
    for f in dataclasses.fields(a):
        v = getattr(a, f.name)
        if f.name == "learning_rate_alpha" and v is None:
            continue
        need_positive(f"algo.{f.name}", v)
    if _is_number(a.delta_gamma) and a.delta_gamma > 1:
        issues.append(ConfigIssue("algo.delta_gamma", "must be <= 1", a.delta_gamma, "<= 1"))
    for f in ("max_outer_iters_Tm", "max_fbs_iters_TF"):
        v = getattr(a, f)
        if not isinstance(v, (int, np.integer)) or isinstance(v, bool):
            issues.append(ConfigIssue(f"algo.{f}", "must be an integer", v))

    if not isinstance(cfg.seed, (int, np.integer)) or isinstance(cfg.seed, bool) or cfg.seed < 0:
        issues.append(ConfigIssue("seed", "must be an unsigned integer", cfg.seed))
    if cfg.interference not in INTERFERENCE_MODES:
        issues.append(ConfigIssue("interference", "unknown mode", cfg.interference,
                                  "|".join(INTERFERENCE_MODES)))
    if not _is_number(cfg.baseline_gamma) or not 0.0 <= cfg.baseline_gamma <= 1.0:
        issues.append(ConfigIssue("baseline_gamma", "must be in [0, 1]", cfg.baseline_gamma))

    if issues:
        raise ConfigError(issues)
    return cfg.replace(weights_w=weights)


# ---------------------------------------------------------------------------
# initial state

def assign_targets(cfg: ScenarioConfig) -> list[tuple[int, int]]:
    """One UAV per target, UAV m watches target m."""
    return [(m, m) for m in range(cfg.n_uavs)]


def fbs_bounds(cfg: ScenarioConfig, uav_altitudes) -> tuple[np.ndarray, np.ndarray]:
    """Feasible FBS box given the UAV altitudes (floor = max altitude + d_h)."""
    b = cfg.bounds
    floor = min(float(np.max(uav_altitudes)) + cfg.fbs_clearance_dh, b.h_max)
    return np.array([b.x_min, b.y_min, floor]), np.array([b.x_max, b.y_max, b.h_max])


def initial_swarm(cfg: ScenarioConfig) -> SwarmState:
    """UAVs hover d_g above their targets with all power on radar; FBS over the target centroid."""
    dg = cfg.safe_distance_dg
    if dg > cfg.uav_ceiling:
        raise InfeasibleScenarioError(
            f"d_g={dg} m leaves no room under h_max={cfg.bounds.h_max} m with d_h={cfg.fbs_clearance_dh} m")
    uavs = tuple(UavState(Position3D(float(cfg.targets[n].x), float(cfg.targets[n].y), float(dg)), 0.0, n)
                 for _, n in assign_targets(cfg))
    n = cfg.n_uavs
    cx = math.fsum(t.x for t in cfg.targets) / n
    cy = math.fsum(t.y for t in cfg.targets) / n
    lo, hi = fbs_bounds(cfg, [u.pos.h for u in uavs])
    fbs = np.clip([cx, cy, dg + cfg.fbs_clearance_dh], lo, hi)
    return SwarmState(uavs, Position3D(*map(float, fbs)), 0)


# ---------------------------------------------------------------------------
# evaluation helpers shared by solver and baselines

def radar_powers(state: SwarmState, cfg: ScenarioConfig) -> np.ndarray:
    return (1.0 - state.gammas()) * cfg.total_power_pt


def comm_powers(state: SwarmState, cfg: ScenarioConfig) -> np.ndarray:
    return state.gammas() * cfg.total_power_pt


def target_distances(state: SwarmState, cfg: ScenarioConfig) -> np.ndarray:
    tgt = cfg.target_array()[[u.target_index for u in state.uavs]]
    return np.asarray(distance3d(state.positions(), tgt)).reshape(-1)


def uav_snrs(state: SwarmState, cfg: ScenarioConfig) -> np.ndarray:
    d = target_distances(state, cfg)
    if np.any(d <= 0):
        raise DegenerateGeometryError("a UAV coincides with its target")
    return radar_powers(state, cfg) * cfg.radar.snr_per_watt_at_1m / d**4


def uav_rates(state: SwarmState, cfg: ScenarioConfig) -> np.ndarray:
    return uplink_rates(state.positions(), comm_powers(state, cfg), state.fbs, cfg.comm,
                        cfg.radar.tx_gain_gT, cfg.interference_on)


def radar_ranges(p_radar, cfg: ScenarioConfig) -> np.ndarray:
    """Radar range per UAV; zero radar power gives zero range."""
    p = np.asarray(p_radar, dtype=float)
    out = np.zeros_like(p)
    pos = p > 0
    if np.any(pos):
        out[pos] = radar_range(p[pos], cfg.radar)
    return out


def weighted_objective(state: SwarmState, cfg: ScenarioConfig) -> float:
    """Sum over UAVs of w_m * radar SNR toward the assigned target."""
    eta = uav_snrs(state, cfg)
    w = cfg.weights_w or tuple([1.0 / cfg.n_uavs] * cfg.n_uavs)
    return math.fsum(w[u.target_index] * e for u, e in zip(state.uavs, eta))


# ---------------------------------------------------------------------------
# constraint checker

def _pair_distances(pos: np.ndarray) -> np.ndarray:
    diff = pos[:, None, :] - pos[None, :, :]
    d = np.sqrt(np.sum(diff * diff, axis=-1))
    np.fill_diagonal(d, np.inf)
    return d


def _box_entries(cid: str, subject, value: float, lo: float, hi: float, strict_lo: bool = False):
    slack = min(value - lo, hi - value)
    ok = (value > lo if strict_lo else value >= lo) and value <= hi
    return ConstraintEntry(cid, subject, bool(ok), float(slack))


def check_constraints(s: SwarmState, cfg: ScenarioConfig) -> ConstraintReport:
    """Evaluate C1-C8 on ``s``; never raises on violations."""
    b = cfg.bounds
    entries: list[ConstraintEntry] = []
    pos = s.positions()
    gam = s.gammas()
    m_count = len(s.uavs)

    rng = radar_ranges((1.0 - np.clip(gam, 0.0, 1.0)) * cfg.total_power_pt, cfg)
    dist = target_distances(s, cfg)
    try:
        rates = uav_rates(s, cfg)
    except DegenerateGeometryError:  # FBS coincides with a UAV
        rates = np.zeros(m_count)
    pair = _pair_distances(pos) if m_count > 1 else np.full((1, 1), np.inf)
    nearest = pair.min(axis=1)

    for m in range(m_count):
        entries.append(ConstraintEntry("C1", m, bool(dist[m] <= rng[m]), float(rng[m] - dist[m])))
    for m in range(m_count):
        slack = float(rates[m] - cfg.comm.rate_min_Rmin)
        entries.append(ConstraintEntry("C2", m, bool(rates[m] >= cfg.comm.rate_min_Rmin), slack))
    for m in range(m_count):
        slack = float(nearest[m] - cfg.safe_distance_dg) if math.isfinite(nearest[m]) else math.inf
        entries.append(ConstraintEntry("C3", m, bool(nearest[m] >= cfg.safe_distance_dg), slack))
    subjects = [(m, pos[m]) for m in range(m_count)] + [("fbs", np.asarray(s.fbs, dtype=float))]
    for subj, p in subjects:
        entries.append(_box_entries("C4", subj, p[0], b.x_min, b.x_max))
    for subj, p in subjects:
        entries.append(_box_entries("C5", subj, p[1], b.y_min, b.y_max))
    for subj, p in subjects:
        entries.append(_box_entries("C6", subj, p[2], 0.0, b.h_max, strict_lo=True))
    top = float(pos[:, 2].max()) if m_count else 0.0
    entries.append(ConstraintEntry("C7", "fbs", bool(s.fbs.h > top), float(s.fbs.h - top)))
    for m in range(m_count):
        g = gam[m]
        entries.append(ConstraintEntry("C8", m, bool(0.0 <= g <= 1.0), float(min(g, 1.0 - g))))
    return ConstraintReport(tuple(entries))
