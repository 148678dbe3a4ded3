import math

import numpy as np
import pytest

from conftest import make_cfg
from jrcswarm import solver
from jrcswarm.physics import CommParams, Position3D
from jrcswarm.scenario import SwarmState, UavState, check_constraints, initial_swarm
from jrcswarm.solver import (
    BOOTSTRAP_REWARD,
    ActionEval,
    ActionKind,
    central_difference,
    djrc_run,
    evaluate_action,
    fbs_ascent,
    fbs_gradient,
    fbs_objective,
    fbs_optimize,
    reward,
    uav_step,
)


def _triangle(radius=100.0, centre=(500.0, 500.0)):
    c = np.asarray(centre)
    return [tuple(c + radius * np.array([math.cos(a), math.sin(a)]))
            for a in np.deg2rad([90.0, 210.0, 330.0])]


def _swarm(points, gamma=0.5, alt=40.0, fbs=(500.0, 500.0, 60.0)):
    uavs = tuple(UavState(Position3D(float(p[0]), float(p[1]), alt), gamma, k)
                 for k, p in enumerate(points))
    return SwarmState(uavs, Position3D(*map(float, fbs)))


# reward

@pytest.mark.parametrize("before, after, expected", [
    ((1.0, 100.0), (1.1, 90.0), 0.0),
    ((5.0, 50.0), (5.0, 50.0), 0.0),
    ((2.0, 10.0), (3.0, 10.0), 0.5),
])
def test_reward_arithmetic(before, after, expected):
    assert reward(before, after) == pytest.approx(expected, abs=1e-12)


def test_reward_bootstrap_from_zero_rate():
    assert reward((0.0, 100.0), (1.0, 99.0)) == pytest.approx(BOOTSTRAP_REWARD - 0.01)
    assert reward((0.0, 100.0), (0.0, 100.0)) == 0.0


def test_reward_rejects_zero_snr():
    with pytest.raises(ValueError):
        reward((1.0, 0.0), (1.0, 0.0))


# actions

def test_a1_infeasible_at_full_comm_power():
    cfg = make_cfg([(500, 500)])
    s = _swarm([(500, 500)], gamma=1.0)
    assert not evaluate_action(0, ActionKind.INCREASE_POWER, s, cfg).feasible


def test_a2_blocked_by_close_neighbour():
    cfg = make_cfg([(500, 500), (480, 575), (520, 575)])
    # the step toward the FBS closes on two neighbours at once, so no slide is possible
    s = SwarmState(_swarm([(500, 500), (480, 535), (520, 535)]).uavs, Position3D(500.0, 700.0, 60.0))
    ev = evaluate_action(0, ActionKind.MOVE_TOWARD_FBS, s, cfg)
    assert not ev.feasible


def test_a2_step_length_and_direction():
    cfg = make_cfg([(500, 500)])
    s = _swarm([(500, 500)], fbs=(500.0, 700.0, 60.0))
    ev = evaluate_action(0, ActionKind.MOVE_TOWARD_FBS, s, cfg)
    assert ev.feasible
    moved = np.subtract(ev.state.pos, s.uavs[0].pos)
    assert np.linalg.norm(moved) == pytest.approx(cfg.algo.delta_r)
    assert moved[1] > 0 and moved[0] == 0


def test_initial_state_selects_a1_by_bootstrap():
    cfg = make_cfg([(420, 450), (580, 470), (500, 600)])
    s = initial_swarm(cfg)
    ev = evaluate_action(0, ActionKind.INCREASE_POWER, s, cfg)
    assert ev.feasible and ev.predicted_reward > BOOTSTRAP_REWARD / 2
    action, new = uav_step(0, s, cfg)
    assert action.kind is ActionKind.INCREASE_POWER
    assert new.gamma == pytest.approx(cfg.algo.delta_gamma)


def _fake_evals(monkeypatch, r1, r2):
    def fake(m, a, snapshot, cfg):
        a = ActionKind(a)
        r = r1 if a is ActionKind.INCREASE_POWER else r2
        return ActionEval(True, r, snapshot.uavs[m])
    monkeypatch.setattr(solver, "evaluate_action", fake)
    monkeypatch.setattr(solver, "_uav_satisfied", lambda m, s, c: False)


def test_argmax_prefers_higher_reward(monkeypatch):
    cfg = make_cfg([(500, 500)])
    _fake_evals(monkeypatch, 0.1, 0.2)
    assert uav_step(0, _swarm([(500, 500)]), cfg)[0].kind is ActionKind.MOVE_TOWARD_FBS
    _fake_evals(monkeypatch, 0.2, 0.1)
    assert uav_step(0, _swarm([(500, 500)]), cfg)[0].kind is ActionKind.INCREASE_POWER


def test_tie_goes_to_a1(monkeypatch):
    _fake_evals(monkeypatch, 0.3, 0.3)
    action, _ = uav_step(0, _swarm([(500, 500)]), make_cfg([(500, 500)]))
    assert action.kind is ActionKind.INCREASE_POWER


def test_satisfied_uav_holds():
    cfg = make_cfg([(500, 500)])
    s = _swarm([(500, 500)], gamma=0.5, fbs=(500.0, 520.0, 60.0))
    assert check_constraints(s, cfg).passed("C2")
    action, new = uav_step(0, s, cfg)
    assert action.kind is ActionKind.HOLD and not action.stalled and new == s.uavs[0]


# FBS placement

def test_central_difference_exact_on_affine():
    coef = np.array([3.0, -2.0, 0.5])
    g = central_difference(lambda pts: pts @ coef + 7.0, [1.0, 2.0, 3.0], 0.5)
    assert np.allclose(g, coef, rtol=0, atol=1e-12)


def test_central_difference_one_sided_at_bound():
    g = central_difference(lambda pts: pts[:, 0] ** 2, [0.0], 0.5, lo=np.array([0.0]))
    assert g[0] == pytest.approx(0.5)  # (0.25 - 0) / 0.5


def test_symmetric_pair_has_zero_cross_axis_gradient():
    cfg = make_cfg([(400, 500), (600, 500)])
    s = _swarm([(400, 500), (600, 500)], fbs=(500.0, 620.0, 60.0))
    f = fbs_objective(s.fbs, s, cfg)
    assert abs(fbs_gradient(s.fbs, s, cfg)[0]) <= 1e-6 * abs(f)


def test_gradient_agrees_with_finer_step():
    cfg = make_cfg(_triangle())
    s = _swarm(_triangle(), fbs=(530.0, 470.0, 70.0))
    coarse = fbs_gradient(s.fbs, s, cfg)
    fine = fbs_gradient(s.fbs, s, cfg, step=cfg.algo.fd_step / 10)
    assert np.allclose(coarse, fine, rtol=1e-4, atol=1e-4 * np.abs(fine).max())


def test_objective_permutation_invariant():
    pts = [(300, 400), (550, 420), (480, 650), (700, 300)]
    cfg = make_cfg(pts)
    s = _swarm(pts, fbs=(510.0, 470.0, 70.0))
    perm = [3, 1, 0, 2]
    sp = SwarmState(tuple(UavState(s.uavs[k].pos, s.uavs[k].gamma, i) for i, k in enumerate(perm)), s.fbs)
    assert fbs_objective(s.fbs, s, cfg) == fbs_objective(sp.fbs, sp, make_cfg([pts[k] for k in perm]))


def test_single_uav_objective_monotone_in_distance():
    cfg = make_cfg([(500, 500)])
    s = _swarm([(500, 500)])
    vals = [fbs_objective((500.0 + dx, 500.0, 50.0), s, cfg) for dx in range(0, 400, 20)]
    assert all(a > b for a, b in zip(vals, vals[1:]))


def test_single_uav_optimum_is_directly_above_at_floor():
    cfg = make_cfg([(500, 500)])
    s = _swarm([(500, 500)], fbs=(650.0, 420.0, 95.0))
    p = fbs_optimize(s, cfg)
    assert math.dist(p, (500.0, 500.0, 50.0)) < 1.0


def test_objective_rises_approaching_from_far():
    cfg = make_cfg(_triangle(), comm=CommParams(), interference="none")
    s = _swarm(_triangle())
    # along a line toward the centroid, while still outside the UAV triangle
    vals = [fbs_objective((500.0, y, 50.0), s, cfg) for y in np.arange(950.0, 620.0, -10.0)]
    assert all(b > a for a, b in zip(vals, vals[1:]))


def test_stationary_start_is_returned_unchanged():
    cfg = make_cfg(_triangle(), interference="none")
    s = _swarm(_triangle(), fbs=(500.0, 500.0, 50.0))
    assert tuple(fbs_optimize(s, cfg)) == (500.0, 500.0, 50.0)


@pytest.mark.parametrize("start", [(510.0, 505.0, 60.0), (700.0, 800.0, 90.0), (200.0, 300.0, 55.0)])
def test_optimum_matches_grid_oracle(start):
    # brute-force sum-rate at 1 m resolution on the altitude floor; the peaks
    # sit directly over the UAVs, one per UAV, so every grid local maximum
    # close to the best value is a valid target
    cfg = make_cfg(_triangle(), interference="none")
    s = _swarm(_triangle(), fbs=start)
    xs = np.arange(350.0, 651.0, 1.0)
    vals = np.array([[fbs_objective((x, y, 50.0), s, cfg) for x in xs] for y in xs])
    padded = np.pad(vals, 1, constant_values=-np.inf)
    neigh = np.max([padded[1 + dy:1 + dy + len(xs), 1 + dx:1 + dx + len(xs)]
                    for dy in (-1, 0, 1) for dx in (-1, 0, 1) if dy or dx], axis=0)
    iy, ix = np.nonzero((vals >= neigh) & (vals >= 0.99 * vals.max()))
    peaks = [((xs[i], xs[j], 50.0), vals[j, i]) for j, i in zip(iy, ix)]
    assert len(peaks) == 3
    res = fbs_ascent(s, cfg)
    near = min(peaks, key=lambda pk: math.dist(res.position, pk[0]))
    assert math.dist(res.position, near[0]) <= 1.0
    assert res.objective >= near[1] * (1 - 1e-4)


def test_centroid_is_not_the_sum_rate_optimum():
    cfg = make_cfg(_triangle(), interference="none")
    s = _swarm(_triangle())
    assert fbs_objective((500.0, 600.0, 50.0), s, cfg) > 10 * fbs_objective((500.0, 500.0, 50.0), s, cfg)


def test_ascent_never_decreases_objective():
    cfg = make_cfg(_triangle())
    rng = np.random.default_rng(4)
    for _ in range(20):
        start = (rng.uniform(0, 1000), rng.uniform(0, 1000), rng.uniform(50, 100))
        s = _swarm(_triangle(), gamma=rng.uniform(0.05, 1.0), fbs=start)
        res = fbs_ascent(s, cfg)
        assert res.objective >= res.start_objective


# full run

def test_single_target_zero_floor_converges_immediately():
    cfg = make_cfg([(500, 500)], comm=CommParams(rate_min_Rmin=0.0))
    r = djrc_run(cfg)
    assert r.converged and r.iterations_used == 0 and len(r.trace) == 1


def test_reference_converges(reference_cfg):
    r = djrc_run(reference_cfg)
    assert r.converged and r.report.all_satisfied
    assert r.iterations_used == len(r.trace) - 1


def test_iteration_cap_respected():
    cfg = make_cfg([(0, 0), (300, 0), (600, 300)])
    cfg = cfg.replace(algo=cfg.algo.__class__(max_outer_iters_Tm=5))
    r = djrc_run(cfg)
    assert not r.converged and r.iterations_used == 5
