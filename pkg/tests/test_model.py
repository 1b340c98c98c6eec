import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from mpmath import mp, mpf

from uavvlc.model import (
    Association, NetworkParams, Placement, Point2, Scenario, channel_gain,
    coverage_distance_limit, covers, fov_distance_bound, illuminance,
    illumination_distance_bound, lambertian_order, link_rate, optical_gain, sum_rate,
)

DEFAULTS = NetworkParams()

# frozen from a 40-digit mpmath evaluation of the closed forms
NADIR_GAIN = 9.549296585513720e-4
OFFSET100_GAIN = 2.387324146378430e-4
NADIR_RATE = 10.294850568735893
OFFSET100_RATE = 8.294857425450826
ILLUM_BOUND = 467.4501964042970


def _mp_lambertian(deg):
    mp.dps = 40
    return -mp.log(2) / mp.log(mp.cos(mp.radians(deg)))


@pytest.mark.parametrize("deg, expected", [(60, 1.0), (45, 2.0), (30, 4.818841679306418)])
def test_lambertian_order(deg, expected):
    assert lambertian_order(math.radians(deg)) == pytest.approx(expected, rel=1e-12)


@pytest.mark.parametrize("bad", [0.0, -0.1, math.pi / 2, 2.0])
def test_lambertian_order_domain(bad):
    with pytest.raises(ValueError):
        lambertian_order(bad)


@given(st.floats(min_value=1.0, max_value=89.0))
def test_lambertian_order_matches_high_precision(deg):
    assert lambertian_order(math.radians(deg)) == pytest.approx(float(_mp_lambertian(deg)), rel=1e-12)


@given(st.floats(min_value=5.0, max_value=85.0), st.floats(min_value=1.01, max_value=3.0))
def test_optical_gain_matches_high_precision(psi_c_deg, n_r):
    mp.dps = 40
    params = NetworkParams(fov_half_angle_deg=psi_c_deg, refractive_index=n_r)
    expected = mpf(n_r) ** 2 / mp.sin(mp.radians(psi_c_deg)) ** 2
    assert optical_gain(0.0, params) == pytest.approx(float(expected), rel=1e-12)


def test_optical_gain():
    assert optical_gain(0.0, DEFAULTS) == pytest.approx(3.0, rel=1e-15)
    assert optical_gain(math.radians(30), DEFAULTS) == pytest.approx(3.0, rel=1e-15)
    assert optical_gain(math.radians(70), DEFAULTS) == 0.0
    # boundary counts as outside
    assert optical_gain(DEFAULTS.psi_c, DEFAULTS) == 0.0


def test_channel_gain_examples():
    uav = Point2(50.0, 50.0)
    assert channel_gain(uav, (50.0, 50.0), DEFAULTS) == pytest.approx(NADIR_GAIN, rel=1e-12)
    assert channel_gain(uav, (150.0, 50.0), DEFAULTS) == pytest.approx(OFFSET100_GAIN, rel=1e-12)
    assert channel_gain(uav, (250.0, 50.0), DEFAULTS) == 0.0


def test_channel_gain_broadcasts():
    users = np.array([[0.0, 0.0], [100.0, 0.0], [200.0, 0.0]])
    h = channel_gain((0.0, 0.0), users, DEFAULTS)
    np.testing.assert_allclose(h, [NADIR_GAIN, OFFSET100_GAIN, 0.0], rtol=1e-12)


def test_illuminance():
    assert illuminance(0.0, DEFAULTS) == 0.0
    assert illuminance(NADIR_GAIN, DEFAULTS) == pytest.approx(190.98593171027440, rel=1e-12)
    dim = NetworkParams(dimming=0.5)
    assert illuminance(NADIR_GAIN, dim) == pytest.approx(95.49296585513720, rel=1e-12)


def test_link_rate():
    assert link_rate(0.0, DEFAULTS) == 0.0
    assert link_rate(NADIR_GAIN, DEFAULTS) == pytest.approx(NADIR_RATE, rel=1e-12)
    assert link_rate(OFFSET100_GAIN, DEFAULTS) == pytest.approx(OFFSET100_RATE, rel=1e-12)


def test_coverage_distance_limit():
    assert illumination_distance_bound(DEFAULTS) == pytest.approx(ILLUM_BOUND, rel=1e-12)
    assert fov_distance_bound(DEFAULTS) == pytest.approx(200.0, rel=1e-12)
    assert coverage_distance_limit(DEFAULTS) == pytest.approx(200.0, rel=1e-12)
    half = NetworkParams(led_power=1e5)
    assert illumination_distance_bound(half) == pytest.approx(ILLUM_BOUND * 2 ** -0.25, rel=1e-12)
    assert coverage_distance_limit(half) == pytest.approx(200.0, rel=1e-12)


def test_coverage_limit_tiny_threshold_wide_fov():
    params = NetworkParams(illum_threshold=1e-20, fov_half_angle_deg=89.99)
    assert coverage_distance_limit(params) == pytest.approx(fov_distance_bound(params))
    assert coverage_distance_limit(params) > 5e5


@given(st.floats(min_value=0.0, max_value=400.0), st.floats(min_value=0.0, max_value=400.0))
def test_gain_monotone_in_horizontal_distance(r1, r2):
    lo, hi = sorted((r1, r2))
    g_lo = channel_gain((0.0, 0.0), (lo, 0.0), DEFAULTS)
    g_hi = channel_gain((0.0, 0.0), (hi, 0.0), DEFAULTS)
    assert g_hi <= g_lo
    if hi - lo > 1e-6 and g_hi > 0:
        assert g_hi < g_lo


def test_everything_zero_beyond_fov_cutoff():
    r_cut = math.sqrt(fov_distance_bound(DEFAULTS) ** 2 - DEFAULTS.uav_height**2)
    for r in (r_cut + 1e-9, r_cut + 1, 300.0, 1e4):
        h = channel_gain((0.0, 0.0), (r, 0.0), DEFAULTS)
        assert h == 0.0
        assert illuminance(h, DEFAULTS) == 0.0
        assert link_rate(h, DEFAULTS) == 0.0


@pytest.mark.parametrize("params", [
    DEFAULTS,
    # illumination bound binds instead of the field of view
    NetworkParams(led_power=2e3, fov_half_angle_deg=80.0),
    NetworkParams(half_power_angle_deg=30.0, illum_threshold=50.0),
])
def test_illuminance_threshold_iff_distance_bound(params):
    z = params.uav_height
    bound_ill = illumination_distance_bound(params)
    bound_fov = fov_distance_bound(params)
    for bound in (bound_ill, bound_fov):
        if bound <= z:
            continue
        for d in (bound * (1 - 1e-6), bound * (1 + 1e-6), bound * 0.5 + z * 0.5, bound * 1.5):
            if d < z:
                continue
            r = math.sqrt(d * d - z * z)
            lux = illuminance(channel_gain((0.0, 0.0), (r, 0.0), params), params)
            expected = d <= bound_ill and d < bound_fov
            assert (lux >= params.illum_threshold) == expected
            assert bool(covers((0.0, 0.0), (r, 0.0), params)) == expected


@given(st.floats(min_value=1e-9, max_value=1e-2), st.floats(min_value=1e-9, max_value=1e-2))
def test_link_rate_strictly_increasing(h1, h2):
    if h1 == h2:
        return
    lo, hi = sorted((h1, h2))
    assert link_rate(lo, DEFAULTS) < link_rate(hi, DEFAULTS)


def test_params_validation():
    with pytest.raises(ValueError, match="sum to 1"):
        NetworkParams(weight_rate=0.5, weight_d2d=0.6)
    with pytest.raises(ValueError):
        NetworkParams(half_power_angle_deg=90.0)
    with pytest.raises(ValueError):
        NetworkParams(capacity=0)
    with pytest.raises(ValueError):
        NetworkParams(led_power=-1.0)
    with pytest.raises(ValueError):
        NetworkParams(refractive_index=1.0)


def test_scenario_rejects_outside_users():
    with pytest.raises(ValueError, match="outside"):
        Scenario(np.array([[10.0, 10.0], [201.0, 5.0]]))
    with pytest.raises(ValueError):
        Scenario(np.zeros((0, 2)))


def test_sum_rate():
    scen = Scenario(np.array([[50.0, 50.0], [150.0, 150.0], [20.0, 180.0]]))
    place = Placement((50.0, 50.0), (150.0, 150.0))
    assert sum_rate(place, Association.empty(3), scen) == 0.0
    one = Association((1, 0, 0), (-1, -1, -1))
    assert sum_rate(place, one, scen) == pytest.approx(NADIR_RATE, rel=1e-12)
    two = Association((1, 2, 0), (-1, -1, -1))
    assert sum_rate(place, two, scen) == pytest.approx(2 * NADIR_RATE, rel=1e-12)
    # D2D users add no rate
    d2d = Association((1, 2, 0), (-1, -1, 0))
    assert sum_rate(place, d2d, scen) == pytest.approx(2 * NADIR_RATE, rel=1e-12)
    with pytest.raises(ValueError):
        sum_rate(place, Association.empty(2), scen)


def test_association_tags_round_trip():
    assoc = Association((1, 0, 2, 0, 1), (-1, 0, -1, -1, 2))
    tags = assoc.tags()
    assert tags == ["uav1", "d2d:0", "uav2", "none", "uav1+d2d:2"]
    assert Association.from_tags(tags) == assoc
    with pytest.raises(ValueError):
        Association.from_tags(["uav3"])
