"""Distributed joint radar-communication (DJRC) placement.

Each outer iteration every UAV looks one step ahead from the same frozen
snapshot, choosing between raising its communication share (``a1``) and
stepping toward the FBS (``a2``). All moves are committed together, then the
FBS climbs the sum-rate surface by projected gradient ascent.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Sequence

import numpy as np

from jrcswarm.errors import DegenerateGeometryError
from jrcswarm.physics import Position3D, uplink_rates
from jrcswarm.scenario import (
    ConstraintReport,
    ScenarioConfig,
    SwarmState,
    UavState,
    check_constraints,
    comm_powers,
    fbs_bounds,
    initial_swarm,
    radar_ranges,
    uav_rates,
    uav_snrs,
    weighted_objective,
)

#: Reward granted to any action that lifts a zero rate above zero.
BOOTSTRAP_REWARD = 1e6


class ActionKind(str, Enum):
    INCREASE_POWER = "a1"
    MOVE_TOWARD_FBS = "a2"
    HOLD = "hold"
    PLACE = "place"


@dataclass(frozen=True)
class UavAction:
    kind: ActionKind
    predicted_reward: float = 0.0
    stalled: bool = False


@dataclass(frozen=True)
class ActionEval:
    feasible: bool
    predicted_reward: float
    state: UavState


@dataclass(frozen=True)
class IterationTrace:
    iteration: int
    eta_total: float
    rate_total: float
    uav_positions: tuple[Position3D, ...]
    gammas: tuple[float, ...]
    fbs: Position3D
    actions_taken: tuple[UavAction, ...]
    objective: float
    fbs_objective_before: float = math.nan
    fbs_objective_after: float = math.nan
    fbs_converged: bool = True


@dataclass(frozen=True)
class RunResult:
    method: str
    final: SwarmState
    converged: bool
    iterations_used: int
    trace: tuple[IterationTrace, ...]
    objective: float
    report: ConstraintReport
    #: baselines only: True where a UAV could not sit at its nominal placement
    clamped: tuple[bool, ...] = field(default=())

    @property
    def eta_total(self) -> float:
        return self.trace[-1].eta_total

    @property
    def rate_total(self) -> float:
        return self.trace[-1].rate_total


@dataclass(frozen=True)
class FbsAscent:
    position: Position3D
    start_objective: float
    objective: float
    steps: int
    converged: bool


# ---------------------------------------------------------------------------
# reward and per-UAV actions

def reward(before: Sequence[float], after: Sequence[float]) -> float:
    """Relative rate gain minus relative radar-SNR loss.

    ``before``/``after`` are ``(rate, snr)`` pairs. A zero starting rate has
    no relative gain; any action that makes it positive earns
    :data:`BOOTSTRAP_REWARD` instead.
    """
    r0, e0 = before
    r1, e1 = after
    if not e0 > 0:
        raise ValueError(f"starting radar SNR must be > 0, got {e0!r}")
    if r0 == 0:
        rate_term = BOOTSTRAP_REWARD if r1 > 0 else 0.0
    else:
        rate_term = (r1 - r0) / r0
    return rate_term - (e0 - e1) / e0


def _rate_and_snr(m: int, uav: UavState, snapshot: SwarmState, cfg: ScenarioConfig):
    pos = snapshot.positions()
    pos[m] = uav.pos
    p_comm = comm_powers(snapshot, cfg)
    p_comm[m] = uav.gamma * cfg.total_power_pt
    r = uplink_rates(pos, p_comm, snapshot.fbs, cfg.comm, cfg.radar.tx_gain_gT,
                     cfg.interference_on)[m]
    tgt = cfg.targets[uav.target_index]
    d = math.dist(uav.pos, tgt)
    if d <= 0:
        raise DegenerateGeometryError(f"UAV {m} coincides with its target")
    eta = (1.0 - uav.gamma) * cfg.total_power_pt * cfg.radar.snr_per_watt_at_1m / d**4
    return float(r), float(eta)


def _within_radar_range(uav: UavState, cfg: ScenarioConfig) -> bool:
    rng = radar_ranges([(1.0 - uav.gamma) * cfg.total_power_pt], cfg)[0]
    return math.dist(uav.pos, cfg.targets[uav.target_index]) <= rng


def _blockers(m: int, new_pos, snapshot: SwarmState, cfg: ScenarioConfig) -> list[int]:
    """Neighbours whose snapshot position the move would approach too closely.

    The margin ``d_g + delta_r`` covers the neighbour's own simultaneous
    step; a move that does not approach a neighbour is always allowed.
    """
    need = cfg.safe_distance_dg + cfg.algo.delta_r
    old = snapshot.uavs[m].pos
    out = []
    for u, other in enumerate(snapshot.uavs):
        if u == m:
            continue
        d_new = math.dist(new_pos, other.pos)
        if d_new < need and d_new < math.dist(old, other.pos):
            out.append(u)
    return out


def _separation_ok(m: int, new_pos, snapshot: SwarmState, cfg: ScenarioConfig) -> bool:
    return not _blockers(m, new_pos, snapshot, cfg)


def _deflected_step(m: int, snapshot: SwarmState, cfg: ScenarioConfig, blocker: int):
    """Step toward the FBS with the component pointing into ``blocker`` removed."""
    pos = np.asarray(snapshot.uavs[m].pos, dtype=float)
    heading = np.asarray(snapshot.fbs, dtype=float) - pos
    heading /= math.sqrt(float(heading @ heading))
    normal = pos - np.asarray(snapshot.uavs[blocker].pos, dtype=float)
    nn = math.sqrt(float(normal @ normal))
    if nn == 0.0:
        return None
    normal /= nn
    tangent = heading - min(float(heading @ normal), 0.0) * normal
    tn = math.sqrt(float(tangent @ tangent))
    if tn < 1e-9:
        return None
    return Position3D(*map(float, pos + cfg.algo.delta_r * tangent / tn))


def _in_flight_box(p, cfg: ScenarioConfig) -> bool:
    b = cfg.bounds
    return (b.x_min <= p[0] <= b.x_max and b.y_min <= p[1] <= b.y_max
            and 0.0 < p[2] <= cfg.uav_ceiling)


def step_toward(pos, goal, step: float):
    """``pos`` moved ``step`` meters along the straight line to ``goal``; None if they coincide."""
    pos = np.asarray(pos, dtype=float)
    delta = np.asarray(goal, dtype=float) - pos
    norm = math.sqrt(float(delta @ delta))
    if norm == 0.0:
        return None
    return Position3D(*map(float, pos + step * delta / norm))


def evaluate_action(m: int, a: ActionKind | str, snapshot: SwarmState,
                    cfg: ScenarioConfig) -> ActionEval:
    """Simulate action ``a`` for UAV ``m`` against the frozen snapshot."""
    a = ActionKind(a)
    cur = snapshot.uavs[m]
    if a is ActionKind.INCREASE_POWER:
        gamma = min(cur.gamma + cfg.algo.delta_gamma, 1.0)
        cand = UavState(cur.pos, gamma, cur.target_index)
        feasible = gamma > cur.gamma and 0.0 <= gamma <= 1.0 and _within_radar_range(cand, cfg)
    elif a is ActionKind.MOVE_TOWARD_FBS:
        new_pos = step_toward(cur.pos, snapshot.fbs, cfg.algo.delta_r)
        if new_pos is None:
            return ActionEval(False, -math.inf, cur)
        blocking = _blockers(m, new_pos, snapshot, cfg)
        if len(blocking) == 1:
            # slide around a single neighbour instead of stalling behind it
            new_pos = _deflected_step(m, snapshot, cfg, blocking[0])
            if new_pos is None:
                return ActionEval(False, -math.inf, cur)
        cand = UavState(new_pos, cur.gamma, cur.target_index)
        feasible = (_in_flight_box(new_pos, cfg) and _within_radar_range(cand, cfg)
                    and _separation_ok(m, new_pos, snapshot, cfg))
    else:
        raise ValueError(f"only a1/a2 can be evaluated, got {a}")
    if not feasible:
        return ActionEval(False, -math.inf, cand)
    before = _rate_and_snr(m, cur, snapshot, cfg)
    after = _rate_and_snr(m, cand, snapshot, cfg)
    return ActionEval(True, reward(before, after), cand)


def _uav_satisfied(m: int, snapshot: SwarmState, cfg: ScenarioConfig) -> bool:
    cur = snapshot.uavs[m]
    if not _within_radar_range(cur, cfg):
        return False
    r, _ = _rate_and_snr(m, cur, snapshot, cfg)
    if r < cfg.comm.rate_min_Rmin:
        return False
    return all(math.dist(cur.pos, o.pos) >= cfg.safe_distance_dg
               for u, o in enumerate(snapshot.uavs) if u != m)


def uav_step(m: int, snapshot: SwarmState, cfg: ScenarioConfig) -> tuple[UavAction, UavState]:
    """Greedy one-step choice for UAV ``m``; ties go to ``a1``."""
    cur = snapshot.uavs[m]
    if _uav_satisfied(m, snapshot, cfg):
        return UavAction(ActionKind.HOLD), cur
    best: tuple[ActionKind, ActionEval] | None = None
    for kind in (ActionKind.INCREASE_POWER, ActionKind.MOVE_TOWARD_FBS):
        ev = evaluate_action(m, kind, snapshot, cfg)
        if ev.feasible and (best is None or ev.predicted_reward > best[1].predicted_reward):
            best = (kind, ev)
    if best is None:
        return UavAction(ActionKind.HOLD, 0.0, stalled=True), cur
    return UavAction(best[0], best[1].predicted_reward), best[1].state


# ---------------------------------------------------------------------------
# FBS placement

def _sum_rates(points, snapshot: SwarmState, cfg: ScenarioConfig) -> np.ndarray:
    rates = uplink_rates(snapshot.positions(), comm_powers(snapshot, cfg), points, cfg.comm,
                         cfg.radar.tx_gain_gT, cfg.interference_on)
    rates = np.sort(rates, axis=-1)  # order-free sum
    return rates.sum(axis=-1)


def fbs_objective(fbs, snapshot: SwarmState, cfg: ScenarioConfig) -> float:
    """Sum of all UAV uplink rates (bit/s) with the FBS at ``fbs``."""
    return float(_sum_rates(np.asarray(fbs, dtype=float), snapshot, cfg))


def central_difference(func: Callable[[np.ndarray], np.ndarray], point, step: float,
                       lo=None, hi=None) -> np.ndarray:
    """Central-difference gradient of a batched scalar field.

    ``func`` maps an (K, n) array of points to (K,) values. Probes are clipped
    to ``[lo, hi]`` and the actual probe spacing is used as the denominator.
    """
    point = np.asarray(point, dtype=float)
    n = point.size
    offsets = np.eye(n) * step
    plus = point + offsets
    minus = point - offsets
    if lo is not None:
        plus = np.maximum(plus, lo)
        minus = np.maximum(minus, lo)
    if hi is not None:
        plus = np.minimum(plus, hi)
        minus = np.minimum(minus, hi)
    values = func(np.vstack([plus, minus]))
    span = np.diagonal(plus) - np.diagonal(minus)
    grad = np.zeros(n)
    ok = span > 0
    grad[ok] = (values[:n][ok] - values[n:][ok]) / span[ok]
    return grad


def fbs_gradient(fbs, snapshot: SwarmState, cfg: ScenarioConfig,
                 step: float | None = None) -> np.ndarray:
    """Finite-difference gradient of :func:`fbs_objective`, probes kept in the flight box."""
    b = cfg.bounds
    step = cfg.algo.fd_step if step is None else step
    return central_difference(lambda pts: _sum_rates(pts, snapshot, cfg), fbs, step,
                              lo=np.array([b.x_min, b.y_min, 0.0]),
                              hi=np.array([b.x_max, b.y_max, b.h_max]))


def _project_gradient(g: np.ndarray, p: np.ndarray, lo: np.ndarray, hi: np.ndarray) -> np.ndarray:
    g = g.copy()
    g[(p <= lo) & (g < 0)] = 0.0
    g[(p >= hi) & (g > 0)] = 0.0
    return g


def fbs_ascent(snapshot: SwarmState, cfg: ScenarioConfig) -> FbsAscent:
    """Projected gradient ascent on the sum rate, with step halving on failure.

    The feasible region is the flight box with the altitude floor set
    ``d_h`` above the highest UAV. Only improving steps are accepted, so the
    returned objective never falls below the (projected) starting value.
    """
    algo = cfg.algo
    lo, hi = fbs_bounds(cfg, snapshot.positions()[:, 2])
    p = np.clip(np.asarray(snapshot.fbs, dtype=float), lo, hi)
    f = fbs_objective(p, snapshot, cfg)
    start = f
    g = fbs_gradient(p, snapshot, cfg)
    alpha = algo.learning_rate_alpha
    diag = cfg.bounds.diagonal
    converged = False
    steps = 0
    for steps in range(1, algo.max_fbs_iters_TF + 1):
        pg = _project_gradient(g, p, lo, hi)
        gnorm = math.sqrt(float(pg @ pg))
        if gnorm <= algo.grad_tolerance_eps * abs(f):
            converged = True
            break
        if alpha is None:
            alpha = 1e-3 * diag / gnorm
        cand = np.clip(p + alpha * pg, lo, hi)
        if np.array_equal(cand, p):
            converged = True
            break
        fc = fbs_objective(cand, snapshot, cfg)
        if fc >= f:
            p, f = cand, fc
            g = fbs_gradient(p, snapshot, cfg)
        else:
            alpha *= 0.5
    return FbsAscent(Position3D(*map(float, p)), start, f, steps, converged)


def fbs_optimize(snapshot: SwarmState, cfg: ScenarioConfig) -> Position3D:
    """Best FBS position found by :func:`fbs_ascent`."""
    return fbs_ascent(snapshot, cfg).position


# ---------------------------------------------------------------------------
# outer loop

def make_trace(state: SwarmState, cfg: ScenarioConfig, actions: Sequence[UavAction] = (),
               fbs: FbsAscent | None = None) -> IterationTrace:
    eta = uav_snrs(state, cfg)
    rates = uav_rates(state, cfg)
    return IterationTrace(
        iteration=state.iteration,
        eta_total=math.fsum(eta),
        rate_total=math.fsum(rates),
        uav_positions=tuple(u.pos for u in state.uavs),
        gammas=tuple(u.gamma for u in state.uavs),
        fbs=state.fbs,
        actions_taken=tuple(actions),
        objective=weighted_objective(state, cfg),
        fbs_objective_before=fbs.start_objective if fbs else math.nan,
        fbs_objective_after=fbs.objective if fbs else math.nan,
        fbs_converged=fbs.converged if fbs else True,
    )


def djrc_run(cfg: ScenarioConfig) -> RunResult:
    """Run DJRC from the initial swarm until every constraint holds or T_m iterations pass."""
    state = initial_swarm(cfg)
    trace = [make_trace(state, cfg)]
    report = check_constraints(state, cfg)
    t = 0
    while not report.all_satisfied and t < cfg.algo.max_outer_iters_Tm:
        t += 1
        steps = [uav_step(m, state, cfg) for m in range(len(state.uavs))]
        moved = SwarmState(tuple(s for _, s in steps), state.fbs, t)
        ascent = fbs_ascent(moved, cfg)
        state = SwarmState(moved.uavs, ascent.position, t)
        trace.append(make_trace(state, cfg, [a for a, _ in steps], ascent))
        report = check_constraints(state, cfg)
    return RunResult(
        method="djrc",
        final=state,
        converged=report.all_satisfied,
        iterations_used=t,
        trace=tuple(trace),
        objective=weighted_objective(state, cfg),
        report=report,
    )
