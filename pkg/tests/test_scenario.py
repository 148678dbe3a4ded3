import json

import numpy as np
import pytest

from conftest import make_cfg
from jrcswarm.errors import ConfigError, InfeasibleScenarioError
from jrcswarm.physics import Position3D
from jrcswarm.scenario import (
    Bounds,
    ScenarioConfig,
    SwarmState,
    UavState,
    assign_targets,
    check_constraints,
    config_from_dict,
    config_to_dict,
    initial_swarm,
    load_config,
    radar_ranges,
    uav_snrs,
    validate_config,
)


def _messages(exc):
    return " | ".join(str(i) for i in exc.value.issues)


# validation

def test_reference_config_is_valid(reference_cfg):
    cfg = validate_config(reference_cfg)
    assert cfg.weights_w == pytest.approx((1 / 3, 1 / 3, 1 / 3))


def test_degenerate_box_rejected():
    with pytest.raises(ConfigError) as exc:
        validate_config(make_cfg([(0, 0)], bounds=Bounds(x_min=0, x_max=0)))
    assert "degenerate flight box" in _messages(exc)


def test_weights_must_sum_to_one():
    with pytest.raises(ConfigError) as exc:
        validate_config(make_cfg([(100, 100), (300, 300)], weights_w=(0.5, 0.6)))
    assert "1.1" in _messages(exc)


def test_validation_collects_every_issue():
    data = {"targets": [[2000, 0]], "total_power_pt": -1, "safe_distance_dg": 0, "extra": 1}
    with pytest.raises(ConfigError) as exc:
        config_from_dict(data)
    paths = {i.path for i in exc.value.issues}
    assert {"extra", "targets[0]", "total_power_pt", "safe_distance_dg"} <= paths


def test_unknown_section_key_rejected():
    with pytest.raises(ConfigError) as exc:
        config_from_dict({"targets": [[1, 1]], "radar": {"gain": 3}})
    assert "radar.gain" in _messages(exc)


def test_noise_figure_read_in_db():
    cfg = config_from_dict({"targets": [[1, 1]], "radar": {"noise_figure_F": 5}})
    assert cfg.radar.noise_figure_F == pytest.approx(10 ** 0.5)


def test_clearance_must_fit_under_ceiling():
    with pytest.raises(ConfigError):
        validate_config(make_cfg([(10, 10)], fbs_clearance_dh=100.0))


def test_config_round_trip(reference_cfg, tmp_path):
    path = tmp_path / "c.json"
    path.write_text(json.dumps(config_to_dict(reference_cfg)))
    assert load_config(path) == reference_cfg


# assignment and initial state

@pytest.mark.parametrize("n", [1, 3, 10])
def test_identity_assignment(n):
    cfg = make_cfg([(10.0 * k + 10, 10) for k in range(n)])
    assert assign_targets(cfg) == [(k, k) for k in range(n)]


def test_initial_swarm_three_targets():
    s = initial_swarm(make_cfg([(0, 0), (300, 0), (600, 300)]))
    assert [tuple(u.pos) for u in s.uavs] == [(0, 0, 40), (300, 0, 40), (600, 300, 40)]
    assert all(u.gamma == 0.0 for u in s.uavs)
    assert tuple(s.fbs) == (300.0, 100.0, 50.0)


def test_initial_swarm_single_target():
    s = initial_swarm(make_cfg([(100, 100)]))
    assert tuple(s.uavs[0].pos) == (100, 100, 40)
    assert tuple(s.fbs) == (100, 100, 50)


def test_initial_swarm_symmetric_targets_centre_fbs():
    s = initial_swarm(make_cfg([(400, 400), (600, 600), (400, 600), (600, 400)]))
    assert s.fbs.x == 500.0 and s.fbs.y == 500.0


def test_initial_swarm_rejects_dg_above_ceiling():
    cfg = make_cfg([(100, 100)], safe_distance_dg=95.0)
    with pytest.raises(InfeasibleScenarioError):
        initial_swarm(cfg)


# constraint checker

def test_initial_state_c1_holds_c2_fails():
    cfg = make_cfg([(0, 0), (300, 0), (600, 300)])
    report = check_constraints(initial_swarm(cfg), cfg)
    assert report.passed("C1")
    assert not any(e.passed for e in report.for_id("C2"))
    assert radar_ranges([30.0], cfg)[0] == pytest.approx(322.0, rel=1e-3)


def test_coincident_uavs_fail_c3():
    cfg = make_cfg([(100, 100), (200, 100)])
    u = UavState(Position3D(150.0, 100.0, 40.0), 0.5, 0)
    v = UavState(Position3D(150.0, 100.0, 40.0), 0.5, 1)
    report = check_constraints(SwarmState((u, v), Position3D(150.0, 300.0, 60.0)), cfg)
    c3 = report.for_id("C3")
    assert all(not e.passed for e in c3)
    assert c3[0].slack == pytest.approx(-40.0)


def test_gamma_out_of_range_fails_c8():
    cfg = make_cfg([(100, 100)])
    s = initial_swarm(cfg)
    bad = s.with_uav(0, UavState(s.uavs[0].pos, 1.5, 0))
    assert not check_constraints(bad, cfg).passed("C8", 0)


def test_fbs_below_uav_fails_c7():
    cfg = make_cfg([(100, 100)])
    s = initial_swarm(cfg)
    low = SwarmState(s.uavs, Position3D(200.0, 200.0, 30.0))
    assert not check_constraints(low, cfg).passed("C7")


def test_close_targets_flag_c3():
    cfg = make_cfg([(100, 100), (120, 100)])
    assert not check_constraints(initial_swarm(cfg), cfg).passed("C3")


def test_c1_boundary_agrees_with_snr_threshold():
    cfg = make_cfg([(500, 500)])
    r = radar_ranges([15.0], cfg)[0]
    for frac, inside in [(1 - 1e-9, True), (1 + 1e-9, False)]:
        # place the UAV straight above the target at the boundary distance
        s = SwarmState((UavState(Position3D(500.0, 500.0 + np.sqrt((r * frac) ** 2 - 40.0**2), 40.0),
                                 0.5, 0),), Position3D(500.0, 500.0, 90.0))
        assert check_constraints(s, cfg).passed("C1") is inside
        assert bool(uav_snrs(s, cfg)[0] >= cfg.radar.snr_min_eta) is inside


def test_checker_is_permutation_equivariant():
    cfg = make_cfg([(100, 100), (400, 200), (250, 500)])
    s = initial_swarm(cfg)
    perm = [2, 0, 1]
    cfg_p = cfg.replace(targets=tuple(cfg.targets[k] for k in perm))
    s_p = initial_swarm(cfg_p)
    a = {(e.id, e.subject): e for e in check_constraints(s, cfg).entries}
    b = {(e.id, e.subject): e for e in check_constraints(s_p, cfg_p).entries}
    for (cid, subj), e in a.items():
        subj_p = subj if subj == "fbs" else perm.index(subj)
        assert b[(cid, subj_p)].passed == e.passed
        assert b[(cid, subj_p)].slack == e.slack
