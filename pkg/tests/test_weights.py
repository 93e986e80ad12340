import math

import numpy as np
import pytest
from scipy.integrate import quad

from carleman.errors import CarlemanError
from carleman.weights import (GridWeight, RadialWeight,
                              RearrangementProfile, piecewise_power,
                              rearrange_grid, rearrange_radial_monotone,
                              rearranged_power_weight, unit_ball_volume)
from conftest import profile_rel_error


class TestPiecewisePower:
    def test_values(self):
        assert piecewise_power(0.5, 2, -1) == 0.25
        assert piecewise_power(1.0, 3.7, -2.2) == 1.0
        assert piecewise_power(4.0, 2, -1) == 0.25

    def test_array(self):
        t = np.array([0.5, 1.0, 4.0])
        np.testing.assert_allclose(piecewise_power(t, 2, -1), [0.25, 1.0, 0.25])

    def test_domain(self):
        with pytest.raises(ValueError):
            piecewise_power(0.0, 1, 1)
        with pytest.raises(ValueError):
            piecewise_power(np.array([1.0, -2.0]), 1, 1)


def test_unit_ball_volume():
    assert unit_ball_volume(1) == pytest.approx(2.0)
    assert unit_ball_volume(2) == pytest.approx(math.pi)
    assert unit_ball_volume(3) == pytest.approx(4 * math.pi / 3)


class TestRadialRearrangement:
    def test_constant_weight(self):
        w = RadialWeight(profile=lambda r: np.ones_like(r), monotonicity="non-increasing", n=2)
        prof = rearrange_radial_monotone(w)
        assert prof.value(0.3) == 1.0 and prof.value(42.0) == 1.0

    def test_exponential_1d(self):
        w = RadialWeight(profile=lambda r: np.exp(-r), monotonicity="non-increasing", n=1)
        prof = rearrange_radial_monotone(w)
        for t in [0.1, 1.0, 4.0]:
            assert prof.value(t) == pytest.approx(math.exp(-t / 2.0))  # V_1 = 2

    def test_power_weight_closed_form(self):
        prof = rearranged_power_weight(2, 1.0, 1.0)  # |x|^-1 on R^2
        for t in [0.2, 1.0, 7.0]:
            assert prof.value(t) == pytest.approx((t / math.pi) ** -0.5)

    def test_non_monotone_rejected(self):
        w = RadialWeight(profile=lambda r: np.sin(r) + 1.1, monotonicity="non-increasing", n=1)
        with pytest.raises(CarlemanError):
            rearrange_radial_monotone(w)
        w2 = RadialWeight(profile=lambda r: r, monotonicity="non-decreasing", n=1)
        with pytest.raises(CarlemanError):
            rearrange_radial_monotone(w2)


class TestGridRearrangement:
    def test_constant(self):
        gw = GridWeight(n=2, L=2.0, N=32, values=np.full((32, 32), 3.0))
        prof = rearrange_grid(gw)
        assert prof.value(1.0) == pytest.approx(3.0)
        # zero beyond the total box measure
        assert prof.value(17.0) == pytest.approx(0.0, abs=1e-12)

    def test_ball_indicator_measure(self):
        gw = GridWeight.from_function(lambda r: (r <= 1.0).astype(float), 2, 2.0, 256)
        prof = rearrange_grid(gw)
        cell = gw.h**2
        measured = np.count_nonzero(gw.values) * cell
        assert abs(measured - math.pi) < 2 * math.pi * gw.h + cell
        # profile is the indicator of [0, measured)
        assert prof.value(measured - 3 * cell) == 1.0
        assert prof.value(measured + 3 * cell) == 0.0

    def test_singular_power_matches_closed_form(self):
        gw = GridWeight.from_function(lambda r: r**-0.5, 2, 1.35, 512)
        prof = rearrange_grid(gw)
        closed = rearranged_power_weight(2, 0.5, 0.5)
        pts = np.geomspace(0.1, 5.0, 120)
        err = profile_rel_error(prof, lambda t: closed.value(t), pts, gw.h**2)
        assert err < 0.02

    def test_inverse_radius_matches_closed_form(self):
        # u = |x|^-1 on R^2 rearranges to (t/pi)^(-1/2)
        gw = GridWeight.from_function(lambda r: r**-1.0, 2, 1.35, 512)
        prof = rearrange_grid(gw)
        pts = np.geomspace(0.1, 5.0, 120)
        err = profile_rel_error(prof, lambda t: (t / math.pi) ** -0.5, pts, gw.h**2)
        assert err < 0.02

    def test_equimeasurability(self):
        rng = np.random.default_rng(3)
        vals = rng.uniform(0, 1, size=(64, 64))
        gw = GridWeight(n=2, L=1.0, N=64, values=vals)
        prof = rearrange_grid(gw)
        cell = gw.h**2
        for lam in [0.1, 0.45, 0.9]:
            count_measure = np.count_nonzero(vals > lam) * cell
            above = prof.t[prof.values > lam]
            largest_t = above.max() if above.size else 0.0
            assert abs(largest_t - count_measure) <= 1.5 * cell

    def test_order_preserving(self):
        rng = np.random.default_rng(4)
        w1 = rng.uniform(0, 1, size=(32, 32))
        w2 = w1 + rng.uniform(0, 1, size=(32, 32))
        p1 = rearrange_grid(GridWeight(n=2, L=1.0, N=32, values=w1))
        p2 = rearrange_grid(GridWeight(n=2, L=1.0, N=32, values=w2))
        assert np.all(p1.values <= p2.values + 1e-15)

    def test_scaling_exact(self):
        rng = np.random.default_rng(5)
        vals = rng.uniform(0, 2, size=(32, 32))
        p1 = rearrange_grid(GridWeight(n=2, L=1.0, N=32, values=vals))
        p2 = rearrange_grid(GridWeight(n=2, L=1.0, N=32, values=2.5 * vals))
        np.testing.assert_array_equal(2.5 * p1.values, p2.values)


class TestProfile:
    def test_monotonicity_enforced(self):
        t = np.array([1.0, 2.0, 3.0])
        with pytest.raises(ValueError):
            RearrangementProfile(t=t, values=np.array([1.0, 2.0, 1.5]))

    def test_running_integral_closed_form(self):
        prof = rearranged_power_weight(3, 1.5, 0.5)
        C, divergent = prof.cumulative()
        assert not divergent
        for s in [0.05, 1.0, unit_ball_volume(3), 30.0]:
            oracle, _ = quad(lambda t: prof.value(t), 0, s, limit=400)
            assert C(s) == pytest.approx(oracle, rel=1e-9)

    def test_running_integral_tabulated(self):
        # closed-form-free profile falls back to trapezoid + head extrapolation
        grid = np.geomspace(1e-8, 1e8, 2000)
        vals = (1.0 + grid) ** -0.75
        prof = RearrangementProfile(t=grid, values=vals)
        C, divergent = prof.cumulative()
        assert not divergent
        for s in [0.5, 3.0, 100.0]:
            oracle, _ = quad(lambda t: (1 + t) ** -0.75, 0, s, limit=200)
            assert C(s) == pytest.approx(oracle, rel=2e-3)

    def test_divergent_head(self):
        prof = rearranged_power_weight(2, 2.5, 2.5)  # alpha >= n
        _, divergent = prof.cumulative()
        assert divergent

    def test_scaled_and_powered(self):
        prof = rearranged_power_weight(2, 1.0, 0.5)
        assert prof.scaled(3.0).value(0.7) == pytest.approx(3 * prof.value(0.7))
        assert prof.powered(2.0).value(0.7) == pytest.approx(prof.value(0.7) ** 2)

    def test_power_equivalence_constant(self):
        # u = |x|^(-a1,-a2) rearranges to (t/V_n)^(-a1/n,-a2/n) exactly
        n, a1, a2 = 3, 1.2, 0.3
        prof = rearranged_power_weight(n, a1, a2)
        vn = unit_ball_volume(n)
        for t in [0.01, vn, 10.0]:
            expected = piecewise_power(t / vn, -a1 / n, -a2 / n)
            assert prof.value(t) == pytest.approx(expected)
