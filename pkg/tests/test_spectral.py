import math

import numpy as np
import pytest
from scipy.integrate import quad

from carleman.errors import TiltSafetyError
from carleman.spectral import (Direction, GridFunction, fourier, gradient,
                               gradient_magnitude, inverse_fourier, sample,
                               sample_radial, tilt, weighted_norm)
from carleman.weights import PiecewisePowerWeight


def bump(s):
    out = np.zeros(np.shape(s))
    inside = np.abs(s) < 1
    with np.errstate(divide="ignore", over="ignore", under="ignore"):
        out[inside] = np.exp(-1.0 / (1.0 - np.asarray(s)[inside] ** 2))
    return out


class TestSampling:
    def test_compact_bump_passes_boundary_check(self):
        import warnings
        with warnings.catch_warnings():
            warnings.simplefilter("error")
            f = sample_radial(lambda r: bump(r), 2, 2.0, 64)
        assert f.boundary_rel_magnitude() == 0.0

    def test_wide_gaussian_ok_narrow_box_warns(self):
        import warnings
        with warnings.catch_warnings():
            warnings.simplefilter("error")
            sample_radial(lambda r: np.exp(-r**2 / 2), 1, 12.0, 256)
        with pytest.warns(UserWarning, match="boundary"):
            sample_radial(lambda r: np.exp(-r**2 / 2), 1, 2.0, 64)

    def test_midpoint_nodes_avoid_origin(self):
        f = sample_radial(lambda r: r**-0.5, 2, 1.0, 32, check_boundary=False)
        assert np.all(np.isfinite(f.values.real))
        assert f.radius().min() > 0


class TestFourier:
    def test_gaussian_pair(self):
        # error normalized by the transform's peak (the far tail of the
        # exact transform sits below the float64 noise floor)
        f = sample_radial(lambda r: np.exp(-r**2 / 2), 1, 12.0, 512)
        fhat = fourier(f)
        xi = fhat.nodes()
        exact = math.sqrt(2 * math.pi) * np.exp(-(xi**2) / 2)
        mask = np.abs(xi) <= 8
        err = np.abs(fhat.values[mask] - exact[mask]) / exact.max()
        assert err.max() < 1e-8

    def test_gaussian_pair_2d(self):
        f = sample_radial(lambda r: np.exp(-r**2 / 2), 2, 10.0, 128)
        fhat = fourier(f)
        xi = fhat.nodes()
        R2 = np.add.outer(xi**2, xi**2)
        exact = (2 * math.pi) * np.exp(-R2 / 2)
        err = np.abs(fhat.values - exact) / exact.max()
        assert err.max() < 1e-8

    def test_zero_frequency_is_quadrature_integral(self):
        f = sample_radial(lambda r: bump(r / 2.0), 1, 4.0, 128)
        fhat = fourier(f)
        k0 = f.N // 2
        assert fhat.nodes()[k0] == pytest.approx(0.0, abs=1e-14)
        assert fhat.values[k0] == pytest.approx(np.sum(f.values) * f.h, rel=1e-13)

    def test_translation_modulation(self):
        L, N = 8.0, 256
        f = sample_radial(lambda r: bump(r), 1, L, N)
        c = 16 * (2 * L / N)  # shift by a whole number of cells
        g = sample(lambda x: bump(x - c), 1, L, N)
        fhat, ghat = fourier(f), fourier(g)
        xi = fhat.nodes()
        np.testing.assert_allclose(ghat.values, np.exp(-1j * c * xi) * fhat.values,
                                   atol=1e-12 * np.abs(fhat.values).max())

    def test_parseval(self):
        for n, L, N in [(1, 12.0, 512), (2, 8.0, 128)]:
            f = sample_radial(lambda r: np.exp(-r**2 / 2), n, L, N)
            lhs = weighted_norm(fourier(f), None, 2)
            rhs = (2 * math.pi) ** (n / 2) * weighted_norm(f, None, 2)
            assert lhs == pytest.approx(rhs, rel=1e-12)

    def test_roundtrip(self):
        f = sample_radial(lambda r: bump(r / 3.0) * np.cos(r), 2, 6.0, 64)
        back = inverse_fourier(fourier(f))
        assert np.abs(back.values - f.values).max() < 1e-10 * np.abs(f.values).max()


class TestTilt:
    def test_zero_tilt_is_identity(self):
        f = sample_radial(lambda r: bump(r), 2, 2.0, 32)
        assert tilt(f, 0.0, Direction.axis(2)) is f

    def test_composition(self):
        f = sample_radial(lambda r: bump(r), 1, 3.0, 64)
        d = Direction.axis(1)
        a = tilt(f, 0.7 + 0.4, d)
        b = tilt(tilt(f, 0.7, d), 0.4, d)
        # pointwise product associativity, up to one rounding of exp
        np.testing.assert_allclose(a.values, b.values, rtol=1e-14, atol=0)

    def test_bounded_by_exponential_on_unit_support(self):
        f = sample_radial(lambda r: bump(r), 1, 3.0, 128)
        for tau in [0.5, 1.0, 2.0]:
            tf = tilt(f, tau, Direction.axis(1))
            assert np.abs(tf.values).max() <= math.exp(tau) * np.abs(f.values).max() * (1 + 1e-12)

    def test_shifted_transform_identity(self):
        f = sample_radial(lambda r: np.exp(-r**2 / 2), 1, 12.0, 1024)
        d = Direction.axis(1)
        for tau in [0.5, 1.0, 2.0]:
            th = fourier(tilt(f, tau, d))
            xi = th.nodes()
            mask = np.abs(xi) <= 6
            exact = (math.sqrt(2 * math.pi) * math.exp(tau**2 / 2)
                     * np.exp(-(xi[mask] ** 2) / 2) * np.exp(1j * tau * xi[mask]))
            rel = np.abs(th.values[mask] - exact) / np.abs(exact)
            assert rel.max() < 1e-6

    def test_offset_applies_global_factor(self):
        f = sample_radial(lambda r: bump(r), 1, 3.0, 64)
        t0 = tilt(f, 1.0, Direction(np.array([1.0]), b=0.0))
        t1 = tilt(f, 1.0, Direction(np.array([1.0]), b=0.3))
        np.testing.assert_allclose(t1.values, math.exp(-0.3) * t0.values, rtol=1e-13)

    def test_safety_refusal(self):
        # deliberately under-sized box: the sample itself is fine for
        # untilted use, but a strong tilt pushes the tail over the wall
        f = sample_radial(lambda r: np.exp(-r**2 / 2), 1, 6.0, 128,
                          check_boundary=False)
        with pytest.raises(TiltSafetyError, match="increase L or decrease tau"):
            tilt(f, 5.0, Direction.axis(1))


class TestGradient:
    def test_symbolic_oracle(self):
        L, N = 12.0, 1024
        f = sample(lambda x: np.sin(x) * bump(x / 4.0), 1, L, N)
        (g,) = gradient(f)
        x = f.nodes()
        inside = np.abs(x) < 4.0
        s = x / 4.0
        db = np.zeros_like(x)
        db[inside] = bump(s[inside]) * (-2 * s[inside] / (1 - s[inside] ** 2) ** 2) / 4.0
        exact = np.cos(x) * bump(s) + np.sin(x) * db
        num = np.sqrt(np.sum(np.abs(g.values - exact) ** 2))
        den = np.sqrt(np.sum(np.abs(exact) ** 2))
        assert num / den < 1e-6

    def test_plateau_interior_gradient_vanishes(self):
        # smooth plateau: constant on r < 1, so the gradient there is ~ 0
        def prof(r):
            out = np.ones(np.shape(r))
            trans = (r >= 1.0) & (r < 3.0)
            out[trans] = bump((r[trans] - 1.0) / 2.0) / bump(np.array([0.0]))[0]
            out[r >= 3.0] = 0.0
            return out

        f = sample_radial(prof, 2, 5.0, 256, check_boundary=False)
        mag = gradient_magnitude(f)
        r = f.radius()
        interior = np.abs(mag.values[r < 0.5])
        assert interior.max() < 1e-3 * np.abs(mag.values).max()

    def test_product_rule_identity(self):
        # grad(e^{tau l} f1) = e^{tau l} (tau a f1 + grad f1)
        L, N, tau = 6.0, 1024, 1.0
        f1 = sample_radial(lambda r: bump(r / 2.0), 1, L, N)
        d = Direction.axis(1)
        ell = f1.linear_form(d)
        g = GridFunction(n=1, L=L, N=N, values=f1.values * np.exp(tau * ell))
        (lhs,) = gradient(g)
        (df1,) = gradient(f1)
        rhs = np.exp(tau * ell) * (tau * f1.values + df1.values)
        num = np.sqrt(np.sum(np.abs(lhs.values - rhs) ** 2))
        den = np.sqrt(np.sum(np.abs(rhs) ** 2))
        assert num / den < 1e-6


class TestWeightedNorm:
    def test_gaussian_l2(self):
        for n, L, N in [(1, 12.0, 512), (2, 10.0, 256)]:
            f = sample_radial(lambda r: np.exp(-r**2 / 2), n, L, N)
            assert weighted_norm(f, None, 2) == pytest.approx(math.pi ** (n / 4), rel=1e-8)

    def test_ball_volume(self):
        f = sample_radial(lambda r: (r <= 1.0).astype(float), 2, 2.0, 512,
                          check_boundary=False)
        assert weighted_norm(f, None, 2) == pytest.approx(math.sqrt(math.pi), rel=5e-3)

    def test_singular_weight_refinement_rate(self):
        # |x|^-1 weighted square integral of a bump on R^2 against the exact
        # radial oracle; midpoint quadrature converges at rate >= 1 in h
        w = PiecewisePowerWeight(-1.0, -1.0)
        exact = 2 * math.pi * quad(lambda r: bump(r) ** 2, 0, 1, limit=200)[0]

        def value(N):
            f = sample_radial(lambda r: bump(r), 2, 2.0, N)
            return weighted_norm(f, w, 2.0) ** 2

        e1 = abs(value(128) - exact)
        e2 = abs(value(256) - exact)
        assert e2 < e1 / 2**0.9

    def test_nonfinite_weight_rejected(self):
        f = sample_radial(lambda r: bump(r), 1, 2.0, 32)
        wv = np.ones(f.values.shape)
        wv[0] = np.inf
        with pytest.raises(ValueError, match="finite"):
            weighted_norm(f, wv, 2.0)

    def test_deterministic(self):
        f = sample_radial(lambda r: bump(r / 1.5), 2, 4.0, 128)
        w = PiecewisePowerWeight(-0.5, 0.0)
        vals = {weighted_norm(f, w, 2.5) for _ in range(5)}
        assert len(vals) == 1
