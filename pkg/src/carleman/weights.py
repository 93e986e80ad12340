"""Weights on R^n and their non-increasing rearrangements.

Two rearrangement routes are provided and cross-checked against each other:

* :func:`rearrange_radial_monotone` -- closed form for radially
  non-increasing weights, ``f*(t) = f0((t / V_n)^(1/n))`` with ``V_n`` the
  unit-ball volume;
* :func:`rearrange_grid` -- the brute-force oracle: sort the sampled cell
  values in decreasing order, so the value at measure ``t = (k + 1/2) h^n``
  is the ``(k+1)``-th largest sample.

Profiles are tabulated on a wide log grid (sup-type condition constants
scan many decades of measure); piecewise power weights additionally carry
exact closed forms for both the profile and its running integral.
"""

import math
from dataclasses import dataclass, field
from functools import lru_cache, reduce
from typing import Callable, Optional

import numpy as np

from . import _kernels
from .errors import CarlemanError

__all__ = [
    "DEFAULT_T_GRID",
    "unit_ball_volume",
    "piecewise_power",
    "PiecewisePowerWeight",
    "RadialWeight",
    "GridWeight",
    "RearrangementProfile",
    "power_profile",
    "rearranged_power_weight",
    "rearrange_radial_monotone",
    "rearrange_grid",
    "axis_nodes",
    "radius_grid",
]

#: log-spaced measure grid shared by profiles and condition-constant scans
DEFAULT_T_GRID = np.geomspace(1e-8, 1e8, 2000)


def unit_ball_volume(n: int) -> float:
    """Volume of the unit ball in R^n: pi^(n/2) / Gamma(n/2 + 1)."""
    if n < 1:
        raise ValueError("dimension must be >= 1")
    return math.pi ** (n / 2.0) / math.gamma(n / 2.0 + 1.0)


def piecewise_power(t, beta1: float, beta2: float):
    """Evaluate t^(beta1,beta2): t**beta1 for t <= 1, t**beta2 for t >= 1.

    Accepts scalars or arrays; requires t > 0 (both branches agree at 1).
    """
    if np.isscalar(t):
        if t <= 0:
            raise ValueError("piecewise power is defined for t > 0 only")
        return t**beta1 if t <= 1.0 else t**beta2
    t = np.asarray(t, dtype=np.float64)
    if np.any(t <= 0):
        raise ValueError("piecewise power is defined for t > 0 only")
    flat = np.ascontiguousarray(t).ravel()
    return _kernels.piecewise_power_values(flat, beta1, beta2).reshape(t.shape)


@dataclass(frozen=True)
class PiecewisePowerWeight:
    """The weight t -> t^(beta1,beta2), applied to |x| when used on R^n."""

    beta1: float
    beta2: float

    def __call__(self, t):
        return piecewise_power(t, self.beta1, self.beta2)

    def reciprocal(self) -> "PiecewisePowerWeight":
        return PiecewisePowerWeight(-self.beta1, -self.beta2)


@dataclass(frozen=True)
class RadialWeight:
    """A radial weight r -> profile(r) with a declared monotonicity flag."""

    profile: Callable
    monotonicity: str  # "non-increasing" | "non-decreasing" | "none"
    n: int


def axis_nodes(L: float, N: int, offset: float = 0.5) -> np.ndarray:
    """Per-axis node coordinates -L + (j + offset) h, h = 2L/N."""
    h = 2.0 * L / N
    return -L + (np.arange(N) + offset) * h


@lru_cache(maxsize=32)
def _radius_grid_cached(n: int, L: float, N: int, offset: float) -> np.ndarray:
    sq = axis_nodes(L, N, offset) ** 2
    r2 = reduce(np.add.outer, [sq] * n) if n > 1 else sq.copy()
    r = np.sqrt(r2)
    r.setflags(write=False)
    return r


def radius_grid(n: int, L: float, N: int, offset: float = 0.5) -> np.ndarray:
    """|x| at every node of the n-dimensional product grid.

    Cached per grid geometry (read-only array); every quadrature on the
    same grid reuses it.
    """
    return _radius_grid_cached(int(n), float(L), int(N), float(offset))


@dataclass(frozen=True)
class GridWeight:
    """Nonnegative samples of a weight at midpoint-offset box nodes."""

    n: int
    L: float
    N: int
    values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=np.float64)
        if vals.shape != (self.N,) * self.n:
            raise ValueError(f"values must have shape {(self.N,) * self.n}")
        if not np.all(np.isfinite(vals)):
            raise ValueError("grid weight values must be finite")
        if np.any(vals < 0):
            raise ValueError("grid weight values must be nonnegative")
        object.__setattr__(self, "values", vals)

    @property
    def h(self) -> float:
        return 2.0 * self.L / self.N

    def nodes(self) -> np.ndarray:
        return axis_nodes(self.L, self.N)

    @classmethod
    def from_function(cls, fn: Callable, n: int, L: float, N: int) -> "GridWeight":
        r = radius_grid(n, L, N)
        return cls(n=n, L=L, N=N, values=np.asarray(fn(r), dtype=np.float64))


@dataclass(frozen=True)
class RearrangementProfile:
    """Non-increasing rearrangement f*(t) tabulated on a log measure grid.

    ``closed_form`` (when present) is preferred over table interpolation.
    ``powerlaw = (scale, e1, e2, knot)`` marks exact piecewise-power
    profiles ``scale * (t/knot)^(e1,e2)``, unlocking exact running
    integrals.
    """

    t: np.ndarray
    values: np.ndarray
    closed_form: Optional[Callable] = None
    powerlaw: Optional[tuple] = None
    _cum_cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        t = np.asarray(self.t, dtype=np.float64)
        v = np.asarray(self.values, dtype=np.float64)
        if t.ndim != 1 or t.shape != v.shape:
            raise ValueError("abscissae and values must be 1-d arrays of equal length")
        if np.any(~np.isfinite(t)) or np.any(t <= 0):
            raise ValueError("abscissae must be positive and finite")
        if np.any(np.diff(t) <= 0):
            raise ValueError("abscissae must be strictly increasing")
        if np.any(v < 0):
            raise ValueError("profile values must be nonnegative")
        vmax = v.max(initial=0.0)
        if np.any(np.diff(v) > 1e-9 * max(vmax, 1.0)):
            raise ValueError("profile values must be non-increasing")
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "values", v)

    def value(self, s):
        """Evaluate f*(s); clamps outside the tabulated range."""
        if self.closed_form is not None:
            return self.closed_form(s)
        s = np.asarray(s, dtype=np.float64)
        logv = np.log(np.maximum(self.values, 1e-300))
        out = np.exp(np.interp(np.log(s), np.log(self.t), logv))
        out = np.where(out < 1e-290, 0.0, out)
        return float(out) if out.ndim == 0 else out

    def scaled(self, c: float) -> "RearrangementProfile":
        """The rearrangement of c*w is c*w* (c > 0)."""
        if c <= 0:
            raise ValueError("scale must be positive")
        cf = None if self.closed_form is None else (lambda s, f=self.closed_form: c * f(s))
        pl = None
        if self.powerlaw is not None:
            scale, e1, e2, knot = self.powerlaw
            pl = (c * scale, e1, e2, knot)
        return RearrangementProfile(self.t, c * self.values, cf, pl)

    def powered(self, expo: float) -> "RearrangementProfile":
        """Pointwise power (f*)^expo; stays non-increasing for expo > 0."""
        if expo <= 0:
            raise ValueError("exponent must be positive")
        cf = None if self.closed_form is None else (lambda s, f=self.closed_form: f(s) ** expo)
        pl = None
        if self.powerlaw is not None:
            scale, e1, e2, knot = self.powerlaw
            pl = (scale**expo, e1 * expo, e2 * expo, knot)
        return RearrangementProfile(self.t, self.values**expo, cf, pl)

    # -- running integral ------------------------------------------------

    def head_exponent(self) -> float:
        """Local decay rate a with f*(t) ~ t^-a near the left end of the table."""
        if self.powerlaw is not None:
            return -self.powerlaw[1]
        v0, v1 = self.values[0], self.values[1]
        if v0 <= 0:
            return 0.0
        if v1 <= 0:
            return 0.0
        return float(-(math.log(v1) - math.log(v0)) / (math.log(self.t[1]) - math.log(self.t[0])))

    def cumulative(self):
        """Return (C, divergent): C(s) = int_0^s f*(t) dt, or divergence at 0.

        Exact for piecewise-power profiles; otherwise trapezoid accumulation
        on the log table with a local-power extrapolation below the table.
        """
        if "cum" in self._cum_cache:
            return self._cum_cache["cum"]
        if self.powerlaw is not None:
            scale, e1, e2, knot = self.powerlaw
            if e1 <= -1.0:
                result = (None, True)
            else:
                result = (_powerlaw_cumulative(scale, e1, e2, knot), False)
        else:
            a0 = self.head_exponent()
            if a0 >= 1.0 - 1e-12 and self.values[0] > 0:
                result = (None, True)
            else:
                head = self.t[0] * self.values[0] / (1.0 - a0) if self.values[0] > 0 else 0.0
                seg = 0.5 * (self.values[1:] + self.values[:-1]) * np.diff(self.t)
                cum = head + np.concatenate([[0.0], np.cumsum(seg)])
                t, v0 = self.t, self.values[0]

                def C(s, t=t, cum=cum, head=head, a0=a0, v0=v0):
                    s = np.asarray(s, dtype=np.float64)
                    below = s < t[0]
                    out = np.interp(s, t, cum)
                    if np.any(below) and head > 0:
                        out = np.where(below, head * (s / t[0]) ** (1.0 - a0), out)
                    elif np.any(below):
                        out = np.where(below, 0.0, out)
                    return float(out) if out.ndim == 0 else out

                result = (C, False)
        self._cum_cache["cum"] = result
        return result


def _powerlaw_cumulative(scale, e1, e2, knot):
    """Exact int_0^s of scale*(t/knot)^(e1,e2) dt for e1 > -1."""

    def C(s):
        s = np.asarray(s, dtype=np.float64)
        x = s / knot
        lo = scale * knot * np.minimum(x, 1.0) ** (1.0 + e1) / (1.0 + e1)
        if e2 == -1.0:
            hi = scale * knot * np.log(np.maximum(x, 1.0))
        else:
            hi = scale * knot * (np.maximum(x, 1.0) ** (1.0 + e2) - 1.0) / (1.0 + e2)
        out = lo + hi
        return float(out) if out.ndim == 0 else out

    return C


def power_profile(scale: float, e1: float, e2: float, knot: float,
                  grid: np.ndarray = DEFAULT_T_GRID) -> RearrangementProfile:
    """Exact piecewise-power profile f*(t) = scale * (t/knot)^(e1,e2).

    Both exponents must be nonpositive so the profile is non-increasing.
    """
    if e1 > 1e-12 or e2 > 1e-12:
        raise ValueError("a non-increasing power profile needs nonpositive exponents")

    def cf(s, scale=scale, e1=e1, e2=e2, knot=knot):
        return scale * piecewise_power(np.asarray(s, dtype=np.float64) / knot, e1, e2)

    return RearrangementProfile(grid, cf(grid), cf, (scale, e1, e2, knot))


def rearranged_power_weight(n: int, alpha1: float, alpha2: float,
                            grid: np.ndarray = DEFAULT_T_GRID) -> RearrangementProfile:
    """Exact rearrangement of u = |x|^(-alpha1,-alpha2) on R^n (alpha_j >= 0).

    The weight is radially non-increasing, so u*(t) = (t/V_n)^(-a1/n,-a2/n).
    """
    if alpha1 < 0 or alpha2 < 0:
        raise ValueError("power-weight exponents must be nonnegative")
    vn = unit_ball_volume(n)
    return power_profile(1.0, -alpha1 / n, -alpha2 / n, vn, grid)


def rearrange_radial_monotone(w: RadialWeight,
                              grid: np.ndarray = DEFAULT_T_GRID) -> RearrangementProfile:
    """Closed-form rearrangement f*(t) = f0((t/V_n)^(1/n)).

    Only valid for radially non-increasing profiles; pass the reciprocal
    profile to rearrange 1/v for a non-decreasing v.
    """
    if w.monotonicity != "non-increasing":
        raise CarlemanError("closed-form rearrangement requires a non-increasing radial profile")
    vn = unit_ball_volume(w.n)

    def cf(t, f0=w.profile, vn=vn, n=w.n):
        return f0((np.asarray(t, dtype=np.float64) / vn) ** (1.0 / n))

    vals = np.asarray(cf(grid), dtype=np.float64)
    if np.any(np.diff(vals) > 1e-9 * max(vals.max(initial=0.0), 1.0)):
        raise CarlemanError("radial profile is not non-increasing on the sample grid")
    return RearrangementProfile(grid, vals, cf)


def rearrange_grid(w: GridWeight) -> RearrangementProfile:
    """Brute-force rearrangement: sort the cell values in decreasing order.

    f*(t) at t = (k + 1/2) h^n is the (k+1)-th largest sample; beyond the
    total box measure the profile drops to zero (the weight is treated as
    supported on the box).
    """
    cell = w.h**w.n
    svals = np.sort(w.values.ravel())[::-1]
    m = svals.size
    t = (np.arange(m + 1) + 0.5) * cell
    vals = np.concatenate([svals, [0.0]])
    return RearrangementProfile(t, vals)
