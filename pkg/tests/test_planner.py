import math

import numpy as np
import pytest

from uavvlc.geometry import smallest_enclosing_disk
from uavvlc.model import Association, NetworkParams, Placement, Scenario
from uavvlc.planner import (
    CAPACITY, D2D_RANGE, D2D_SOURCE, ILLUMINATION, SINGLE_SERVER, STRUCTURAL, PlannerConfig,
    baseline_fixed_placement, check_constraints, evaluate, exhaustive_solve, objective,
    optimize_placement, plan,
)

NADIR_RATE = 10.294850568735893  # mpmath oracle, see test_model


def _scenario(points, **kw):
    return Scenario(np.asarray(points, dtype=float), NetworkParams(**kw))


def _random_scenario(seed, n=200, **kw):
    rng = np.random.default_rng(seed)
    return Scenario(rng.uniform(0, 200, size=(n, 2)), NetworkParams(**kw), seed=seed)


def test_objective_examples():
    scen = _scenario([[50, 50], [55, 50]])
    place = Placement((50, 50), (0, 0))
    assert objective(place, Association.empty(2), scen) == 0.0
    pair = Association((1, 0), (-1, 0))
    assert objective(place, pair, scen) == pytest.approx(2 / 3 * NADIR_RATE + 1 / 3, rel=1e-12)
    assert objective(place, pair, scen) == pytest.approx(7.196567045823929, rel=1e-12)
    rate_only = _scenario([[50, 50], [55, 50]], weight_rate=1.0, weight_d2d=0.0)
    assert objective(place, pair, rate_only) == pytest.approx(NADIR_RATE, rel=1e-12)


def test_check_constraints_clean():
    scen = _scenario([[50, 50], [55, 50], [150, 150]])
    place = Placement((50, 50), (150, 150))
    assert check_constraints(place, Association((1, 0, 2), (-1, 0, -1)), scen) == []


def test_check_capacity_breach():
    pts = [[50 + 20 * i, 50] for i in range(4)]
    scen = _scenario(pts, capacity=3)
    found = check_constraints(Placement((80, 50), (0, 0)), Association((1, 1, 1, 1), (-1,) * 4), scen)
    assert [v.constraint for v in found] == [CAPACITY]
    assert found[0].value == 4 and found[0].bound == 3


def test_check_illumination_breach():
    scen = _scenario([[0, 0], [200, 150]])
    place = Placement((0, 0), (0, 0))
    # second user is 250 m away horizontally: zero gain
    found = check_constraints(place, Association((0, 1), (-1, -1)), scen)
    assert [v.constraint for v in found] == [ILLUMINATION]
    assert found[0].indices == (1,) and found[0].value == 0.0 and found[0].bound == 0.4


def test_check_reports_every_violation():
    scen = _scenario([[10, 10], [12, 10], [100, 100], [150, 10]])
    place = Placement((10, 10), (0, 0))
    assoc = Association((1, 1, 0, 0), (2, -1, 0, 3))
    kinds = sorted(v.constraint for v in check_constraints(place, assoc, scen))
    # user 0: UAV + D2D at once, source 2 is not served and too far;
    # user 2 links to 0 out of range; user 3 links to itself
    assert kinds == sorted([SINGLE_SERVER, D2D_SOURCE, D2D_RANGE, D2D_RANGE, STRUCTURAL])


def test_check_dimension_mismatch():
    with pytest.raises(ValueError):
        check_constraints(Placement((0, 0), (0, 0)), Association.empty(3), _scenario([[1, 1]]))


def test_optimize_placement_examples():
    scen = _scenario([[0, 0], [2, 0], [1, 1], [120, 120]])
    assoc = Association((1, 1, 1, 0), (-1,) * 4)
    place, ok = optimize_placement(scen, assoc, Placement((50, 50), (7, 7)), 0)
    assert place.uav1 == pytest.approx((1.0, 0.0))
    assert place.uav2 == (7.0, 7.0)
    assert ok == (True, True)

    single = Association((0, 0, 0, 2), (-1,) * 4)
    place, ok = optimize_placement(scen, single, None, 0)
    assert place.uav2 == pytest.approx((120.0, 120.0))
    assert ok == (True, True)
    assert evaluate(scen, place, single).per_user_illuminance[3] == pytest.approx(190.98593171027440)


def test_optimize_placement_flags_unreachable_set():
    # a 45 degree field of view limits the horizontal reach to 100 m < 141 m
    scen = _scenario([[0, 0], [200, 200]], fov_half_angle_deg=45.0)
    place, ok = optimize_placement(scen, Association((1, 1), (-1, -1)), None, 0)
    assert place.uav1 == pytest.approx((100.0, 100.0))
    assert ok == (False, True)


@pytest.mark.parametrize("seed", range(10))
def test_placement_never_increases_farthest_distance(seed):
    rng = np.random.default_rng(seed)
    scen = _random_scenario(seed, n=40, capacity=6)
    start = Placement(rng.uniform(0, 200, 2), rng.uniform(0, 200, 2))
    assoc = plan(scen, PlannerConfig(seed=seed, max_outer_iters=1)).association
    moved, _ = optimize_placement(scen, assoc, start, rng)
    for i in (1, 2):
        pts = scen.users[assoc.served_by(i)]
        if len(pts):
            before = np.hypot(*(pts - start[i]).T).max()
            after = np.hypot(*(pts - moved[i]).T).max()
            assert after <= before + 1e-9


def test_plan_all_users_at_one_point():
    scen = _scenario([[60, 70]] * 25, capacity=3)
    result = plan(scen, PlannerConfig(seed=4))
    assert result.feasible
    assert result.iterations <= 2
    assert result.placement.uav1 == pytest.approx((60.0, 70.0))
    assert result.placement.uav2 == pytest.approx((60.0, 70.0))
    assert len(result.association.centroids) == 6
    assert result.d2d_count == 25 - 6


def test_plan_single_user_matches_exhaustive():
    scen = _scenario([[40, 160]])
    result = plan(scen, PlannerConfig(seed=0))
    assert result.objective == pytest.approx(2 / 3 * NADIR_RATE, rel=1e-12)
    assert exhaustive_solve(scen).objective == pytest.approx(2 / 3 * NADIR_RATE, rel=1e-12)


def test_plan_deterministic_and_trace_bookkeeping():
    scen = _random_scenario(21)
    cfg = PlannerConfig(seed=3)
    a, b = plan(scen, cfg), plan(scen, cfg)
    assert a == b
    best = [t.best_objective for t in a.trace]
    assert best == sorted(best)
    assert a.objective == best[-1]
    assert len(a.trace) <= cfg.max_outer_iters + 1
    assert a.objective == pytest.approx(
        scen.params.weight_rate * a.sum_rate + scen.params.weight_d2d * a.d2d_count, abs=1e-9
    )


def test_plan_respects_outer_limit():
    scen = _random_scenario(2)
    result = plan(scen, PlannerConfig(seed=0, max_outer_iters=1, objective_tolerance=1e9))
    assert len(result.trace) == 2


def test_plan_no_coverable_user():
    # start far away from every user: nothing can be served, still feasible
    scen = Scenario(np.array([[190.0, 190.0]]), NetworkParams(), start=Placement((0, 0), (0, 0)))
    result = plan(scen)
    assert result.feasible and result.objective == 0.0


def test_exhaustive_examples():
    pair = [[100, 100], [105, 100]]
    d2d = exhaustive_solve(_scenario(pair, capacity=1, weight_rate=0.01, weight_d2d=0.99))
    assert len(d2d.association.centroids) == 1 and d2d.d2d_count == 1
    assert d2d.objective == pytest.approx(0.01 * NADIR_RATE + 0.99, rel=1e-12)
    rate = exhaustive_solve(_scenario(pair, capacity=1))
    assert sorted(rate.association.uav) == [1, 2]
    assert rate.objective == pytest.approx(2 / 3 * 2 * NADIR_RATE, rel=1e-12)


def test_exhaustive_guard():
    with pytest.raises(ValueError, match="too large"):
        exhaustive_solve(_random_scenario(0, n=12, capacity=2))
    with pytest.raises(ValueError, match="too large"):
        exhaustive_solve(_random_scenario(0, n=5, capacity=3))


def test_exhaustive_places_uavs_on_enclosing_disks():
    scen = _random_scenario(8, n=7, capacity=2)
    best = exhaustive_solve(scen)
    assert best.feasible
    for i in (1, 2):
        served = best.association.served_by(i)
        if served:
            center = smallest_enclosing_disk(scen.users[served], 0).center
            assert math.dist(center, best.placement[i]) < 1e-9


@pytest.mark.parametrize("seed", range(12))
def test_plan_bounded_by_exhaustive_and_baseline(seed):
    rng = np.random.default_rng(seed)
    width = (30.0, 200.0)[seed % 2]
    params = NetworkParams(area_width=width, area_height=width, capacity=int(rng.integers(1, 3)))
    scen = Scenario(rng.uniform(0, width, size=(int(rng.integers(1, 9)), 2)), params)
    cfg = PlannerConfig(seed=seed)
    result = plan(scen, cfg)
    assert result.feasible and check_constraints(result.placement, result.association, scen) == []
    assert result.objective <= exhaustive_solve(scen).objective + 1e-9
    assert result.objective >= baseline_fixed_placement(scen, cfg).objective


def test_baseline_single_iteration():
    scen = _random_scenario(1)
    base = baseline_fixed_placement(scen, PlannerConfig(seed=1))
    assert len(base.trace) == 1
    assert base.placement == scen.start
    assert base.feasible


def test_baseline_near_plan_when_users_at_corner():
    rng = np.random.default_rng(0)
    scen = Scenario(rng.uniform(0, 4, size=(30, 2)), NetworkParams())
    cfg = PlannerConfig(seed=0)
    base, best = baseline_fixed_placement(scen, cfg), plan(scen, cfg)
    assert best.objective >= base.objective
    assert best.objective <= base.objective * 1.01
