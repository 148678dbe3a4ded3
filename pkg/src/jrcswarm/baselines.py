"""Fixed-power comparison strategies.

FROC parks every UAV at the edge of its radar range on the ray from its
target toward the FBS. ORFC starts each UAV over its target and creeps toward
the FBS only until its uplink meets the rate floor. Both keep the power split
at ``cfg.baseline_gamma`` and reuse the DJRC FBS ascent.
"""

from __future__ import annotations

import math

import numpy as np

from jrcswarm.physics import Position3D
from jrcswarm.scenario import (
    ScenarioConfig,
    SwarmState,
    UavState,
    check_constraints,
    initial_swarm,
    radar_ranges,
    uav_rates,
    weighted_objective,
)
from jrcswarm.solver import (
    ActionKind,
    RunResult,
    UavAction,
    _in_flight_box,
    _separation_ok,
    fbs_ascent,
    make_trace,
    step_toward,
)

#: Placement is considered settled once nothing moves farther than this (m).
SETTLE_TOLERANCE = 0.1
# keeps the placed UAV a hair inside its range so C1 survives rounding
_RANGE_SHRINK = 1.0 - 1e-12


def _fixed_gamma_start(cfg: ScenarioConfig) -> SwarmState:
    s = initial_swarm(cfg)
    uavs = tuple(UavState(u.pos, cfg.baseline_gamma, u.target_index) for u in s.uavs)
    return SwarmState(uavs, s.fbs, 0)


def _ray_point(target: np.ndarray, fbs: np.ndarray, reach: float, cfg: ScenarioConfig):
    """Point ``reach`` meters from ``target`` toward ``fbs``, limited by the FBS clearance.

    Returns ``(position, distance_along_ray)``.
    """
    ray = fbs - target
    length = math.sqrt(float(ray @ ray))
    unit = ray / length
    s = min(reach, length - cfg.fbs_clearance_dh)
    if unit[2] > 0:
        s = min(s, cfg.uav_ceiling / unit[2])
    s = max(s, 0.0)
    return target + s * unit, s


def _froc_place(fbs: Position3D, cfg: ScenarioConfig, reach: float):
    """Place all UAVs in index order; later UAVs back off toward their target to keep d_g."""
    targets = cfg.target_array()
    fbs_arr = np.asarray(fbs, dtype=float)
    placed: list[np.ndarray] = []
    clamped: list[bool] = []
    step = cfg.algo.delta_r
    for n in range(cfg.n_uavs):
        tgt = targets[n]
        pos, s = _ray_point(tgt, fbs_arr, reach, cfg)
        was_clamped = s < reach
        unit = (pos - tgt) / s if s > 0 else np.array([0.0, 0.0, 1.0])
        while any(math.dist(pos, q) < cfg.safe_distance_dg for q in placed) \
                and s - step >= cfg.safe_distance_dg:
            s -= step
            pos = tgt + s * unit
            was_clamped = True
        hover = np.array([tgt[0], tgt[1], cfg.safe_distance_dg])
        crowded = any(math.dist(pos, q) < cfg.safe_distance_dg for q in placed)
        if pos[2] <= 0 or (crowded and all(math.dist(hover, q) >= cfg.safe_distance_dg
                                           for q in placed)):
            # the ray is exhausted: fall back to hovering over the target
            pos = hover
            was_clamped = True
        placed.append(pos)
        clamped.append(bool(was_clamped))
    return [Position3D(*map(float, p)) for p in placed], clamped


def _finish(method: str, state: SwarmState, trace, settled: bool, cfg: ScenarioConfig,
            clamped=()) -> RunResult:
    report = check_constraints(state, cfg)
    return RunResult(
        method=method,
        final=state,
        converged=bool(settled and report.all_satisfied),
        iterations_used=state.iteration,
        trace=tuple(trace),
        objective=weighted_objective(state, cfg),
        report=report,
        clamped=tuple(clamped),
    )


def froc_solve(cfg: ScenarioConfig) -> RunResult:
    """UAVs at maximum radar range toward the FBS; alternate placement and FBS ascent."""
    gamma = cfg.baseline_gamma
    p_radar = (1.0 - gamma) * cfg.total_power_pt
    reach = float(radar_ranges([p_radar], cfg)[0]) * _RANGE_SHRINK
    state = _fixed_gamma_start(cfg)
    trace = [make_trace(state, cfg)]
    clamped: list[bool] = []
    settled = False
    for t in range(1, cfg.algo.max_outer_iters_Tm + 1):
        positions, clamped = _froc_place(state.fbs, cfg, reach)
        uavs = tuple(UavState(p, gamma, n) for n, p in enumerate(positions))
        placed = SwarmState(uavs, state.fbs, t)
        ascent = fbs_ascent(placed, cfg)
        new_state = SwarmState(uavs, ascent.position, t)
        shift = max(
            max(math.dist(a.pos, b.pos) for a, b in zip(state.uavs, new_state.uavs)),
            math.dist(state.fbs, new_state.fbs),
        )
        state = new_state
        trace.append(make_trace(state, cfg, [UavAction(ActionKind.PLACE)] * len(uavs), ascent))
        if shift < SETTLE_TOLERANCE:
            settled = True
            break
    return _finish("froc", state, trace, settled, cfg, clamped)


def orfc_solve(cfg: ScenarioConfig) -> RunResult:
    """UAVs start over their targets and step toward the FBS only while below R_min."""
    state = _fixed_gamma_start(cfg)
    ascent = fbs_ascent(state, cfg)
    state = SwarmState(state.uavs, ascent.position, 0)
    trace = [make_trace(state, cfg, (), ascent)]
    ranges = radar_ranges([(1.0 - cfg.baseline_gamma) * cfg.total_power_pt], cfg)
    settled = False
    for t in range(1, cfg.algo.max_outer_iters_Tm + 1):
        rates = uav_rates(state, cfg)
        uavs = list(state.uavs)
        actions = []
        moved = False
        for m, cur in enumerate(state.uavs):
            if rates[m] >= cfg.comm.rate_min_Rmin:
                actions.append(UavAction(ActionKind.HOLD))
                continue
            new_pos = step_toward(cur.pos, state.fbs, cfg.algo.delta_r)
            ok = (new_pos is not None and _in_flight_box(new_pos, cfg)
                  and math.dist(new_pos, cfg.targets[cur.target_index]) <= ranges[0]
                  and _separation_ok(m, new_pos, state, cfg))
            if ok:
                uavs[m] = UavState(new_pos, cur.gamma, cur.target_index)
                actions.append(UavAction(ActionKind.MOVE_TOWARD_FBS))
                moved = True
            else:
                actions.append(UavAction(ActionKind.HOLD, stalled=True))
        if not moved:
            settled = True
            break
        stepped = SwarmState(tuple(uavs), state.fbs, t)
        ascent = fbs_ascent(stepped, cfg)
        state = SwarmState(stepped.uavs, ascent.position, t)
        trace.append(make_trace(state, cfg, actions, ascent))
    return _finish("orfc", state, trace, settled, cfg)
