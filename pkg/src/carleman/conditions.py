"""Condition constants for the weighted gradient and Fourier inequalities.

Every constant here is a sup or an integral functional of rearranged
weights.  Sups are taken by a log-spaced scan over ``s in [1e-8, 1e8]``
(2000 points) followed by golden-section refinement around the scan
maximum; divergence is declared when an endpoint value exceeds 10x the
interior maximum and is still growing toward the endpoint.  Running
integrals ``int_0^s`` are accumulated once per profile (exactly for
piecewise powers, by trapezoid on the log grid otherwise).

The two-exponent tilted condition on the target weight u uses the kernel

    K(s) = int_0^{1/s} (t + tau^n)^(-gamma'/n) dt

which has the closed forms implemented in :func:`kernel_integral`.
"""

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import CarlemanError
from .params import ParamSet
from .weights import DEFAULT_T_GRID, RearrangementProfile, piecewise_power

__all__ = [
    "ConditionValue",
    "EquivalenceReport",
    "kernel_integral",
    "u_condition",
    "v_condition",
    "v_condition_integral",
    "pitt_sup_condition",
    "pitt_integral_condition",
    "sup_integral_vs_pointwise",
    "u_condition_simplified",
]

SCAN_GRID = DEFAULT_T_GRID


@dataclass(frozen=True)
class ConditionValue:
    """A condition constant: finite value or divergence verdict."""

    value: float
    argmax_s: Optional[float]
    method: str  # "closed-form" | "scan"
    divergence: Optional[str] = None  # None | "s->0" | "s->inf" | "s->0,s->inf"
    note: Optional[str] = None

    @property
    def finite(self) -> bool:
        return math.isfinite(self.value)


def kernel_integral(s, tau: float, gamma_prime: float, n: int):
    """int_0^{1/s} (t + tau^n)^(-gamma'/n) dt, closed form.

    tau = 0 requires gamma' < n (otherwise the integral diverges for every
    s and +inf is returned).  The tau > 0 branches use expm1/log1p forms
    that stay accurate when 1/s << tau^n.
    """
    s = np.asarray(s, dtype=np.float64)
    e = 1.0 - gamma_prime / n
    if tau == 0.0:
        if e <= 0:
            out = np.full(s.shape, math.inf)
            return float(out) if out.ndim == 0 else out
        out = (1.0 / s) ** e / e
        return float(out) if out.ndim == 0 else out
    tn = tau**n
    if e == 0.0:
        out = np.log1p(1.0 / (s * tn))
    else:
        out = tn**e * np.expm1(e * np.log1p(1.0 / (s * tn))) / e
    return float(out) if out.ndim == 0 else out


# ---------------------------------------------------------------------------
# sup-over-s machinery
# ---------------------------------------------------------------------------

_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


def _golden_max(fn, lo: float, hi: float, iters: int = 80):
    """Deterministic golden-section maximization of fn on [lo, hi] in log s."""
    a, b = math.log(lo), math.log(hi)
    c = b - _INV_PHI * (b - a)
    d = a + _INV_PHI * (b - a)
    fc, fd = fn(math.exp(c)), fn(math.exp(d))
    for _ in range(iters):
        if b - a < 1e-12:
            break
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - _INV_PHI * (b - a)
            fc = fn(math.exp(c))
        else:
            a, c, fc = c, d, fd
            d = a + _INV_PHI * (b - a)
            fd = fn(math.exp(d))
    if fc >= fd:
        return math.exp(c), fc
    return math.exp(d), fd


def _sup_scan(fn, grid=SCAN_GRID, refine=True):
    """Scan fn over the log grid; returns (sup, argmax_s, divergence)."""
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        vals = np.asarray(fn(grid), dtype=np.float64)
    if np.all(vals == 0.0):
        return 0.0, None, None
    if np.any(np.isnan(vals)):
        raise CarlemanError("condition integrand evaluated to NaN")
    trim = len(grid) // 8
    interior_max = vals[trim:-trim].max()
    dirs = []
    if np.any(np.isinf(vals)):
        if np.isinf(vals[: trim]).any():
            dirs.append("s->0")
        if np.isinf(vals[-trim:]).any():
            dirs.append("s->inf")
        if not dirs:
            dirs.append("interior")
    else:
        # endpoint dominating the interior and still growing toward it
        if vals[0] > 10.0 * interior_max and vals[0] > vals[1] > vals[2]:
            dirs.append("s->0")
        if vals[-1] > 10.0 * interior_max and vals[-1] > vals[-2] > vals[-3]:
            dirs.append("s->inf")
        # power-counting check: a maximum sitting at an endpoint with a
        # locally nonzero log-log slope keeps growing off the grid (the
        # integrands are power-like, possibly with log factors, at the ends)
        peak = vals.max()
        dlog = math.log(grid[1]) - math.log(grid[0])
        if not dirs and peak > 0:
            if vals[0] >= 0.99 * peak and vals[1] > 0:
                m0 = (math.log(vals[1]) - math.log(vals[0])) / dlog
                if m0 < -1e-4:
                    dirs.append("s->0")
            if vals[-1] >= 0.99 * peak and vals[-2] > 0:
                m1 = (math.log(vals[-1]) - math.log(vals[-2])) / dlog
                if m1 > 1e-4:
                    dirs.append("s->inf")
    if dirs:
        return math.inf, None, ",".join(dirs)
    k = int(np.argmax(vals))
    best_s, best_v = grid[k], vals[k]
    if refine and 0 < k < len(grid) - 1:
        s_ref, v_ref = _golden_max(lambda s: float(fn(s)), grid[k - 1], grid[k + 1])
        if v_ref > best_v:
            best_s, best_v = s_ref, v_ref
    return float(best_v), float(best_s), None


def _is_zero_profile(profile: RearrangementProfile) -> bool:
    return profile.values.max(initial=0.0) == 0.0


def _cumulative_or_divergent(profile: RearrangementProfile):
    C, divergent = profile.cumulative()
    return C, divergent


def _method(*profiles: RearrangementProfile) -> str:
    return "closed-form" if all(p.closed_form is not None for p in profiles) else "scan"


# ---------------------------------------------------------------------------
# condition constants
# ---------------------------------------------------------------------------


def u_condition(u_star: RearrangementProfile, ps: ParamSet, tau: float) -> ConditionValue:
    """Tilt-dependent condition constant attached to the target weight u.

    For tau > 0 this is the q-th root of

        sup_s  [int_0^s u*(t) dt] * K(s)^(q/gamma')

    with K the kernel integral; for tau = 0 it is the q-th root of the
    simplified sup  s^(1 - q(1/gamma' - 1/n)) u*(s).
    """
    if tau < 0:
        raise CarlemanError("tau must be nonnegative")
    if _is_zero_profile(u_star):
        return ConditionValue(0.0, None, _method(u_star), note="excluded-degenerate: u == 0")
    q, gp, n = ps.q, ps.gamma_prime, ps.n
    if tau == 0.0:
        if gp >= n:
            return ConditionValue(
                math.inf, None, _method(u_star), divergence="s->0",
                note="kernel integral divergent at tau = 0 (gamma' >= n)")
        expo = 1.0 - q * (1.0 / gp - 1.0 / n)
        sup, arg, div = _sup_scan(lambda s: s**expo * u_star.value(s))
    else:
        C, divergent = _cumulative_or_divergent(u_star)
        if divergent:
            return ConditionValue(
                math.inf, None, _method(u_star), divergence="s->0",
                note="running integral of u* divergent at 0")
        sup, arg, div = _sup_scan(lambda s: C(s) * kernel_integral(s, tau, gp, n) ** (q / gp))
    if div:
        return ConditionValue(math.inf, None, _method(u_star), divergence=div)
    return ConditionValue(sup ** (1.0 / q), arg, _method(u_star))


def v_condition(v_recip_star: RearrangementProfile, ps: ParamSet) -> ConditionValue:
    """Sup-type condition constant attached to the gradient-side weight v.

    The p-th root of sup_s s^(p/gamma' - 1) (1/v)*(s); p <= q regime only.
    """
    if ps.case != "a":
        raise CarlemanError("sup-type v condition applies to the p <= q regime")
    if _is_zero_profile(v_recip_star):
        return ConditionValue(0.0, None, _method(v_recip_star),
                              note="excluded-degenerate: v == +inf")
    expo = ps.p / ps.gamma_prime - 1.0
    sup, arg, div = _sup_scan(lambda s: s**expo * v_recip_star.value(s))
    if div:
        return ConditionValue(math.inf, None, _method(v_recip_star), divergence=div)
    return ConditionValue(sup ** (1.0 / ps.p), arg, _method(v_recip_star))


def _log_quadrature(integrand_fn, grid=SCAN_GRID):
    """Integrate integrand(s) ds over (0, inf) from a log-grid tabulation.

    Endpoint behavior is classified by local log-log slopes; analytic
    head/tail corrections are added for the convergent power-like ends.
    Returns (value, divergence-or-None).
    """
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        vals = np.asarray(integrand_fn(grid), dtype=np.float64)
    if np.all(vals == 0.0):
        return 0.0, None
    if np.any(np.isinf(vals)) or np.any(np.isnan(vals)):
        return math.inf, "interior"
    logt = np.log(grid)
    dirs = []
    head = tail = 0.0
    # left end: integrand ~ s^m0 needs m0 > -1
    if vals[0] > 0 and vals[1] > 0:
        m0 = (math.log(vals[1]) - math.log(vals[0])) / (logt[1] - logt[0])
        if m0 <= -1.0 + 1e-9:
            dirs.append("s->0")
        else:
            head = vals[0] * grid[0] / (1.0 + m0)
    # right end: integrand ~ s^m1 needs m1 < -1
    if vals[-1] > 0 and vals[-2] > 0:
        m1 = (math.log(vals[-1]) - math.log(vals[-2])) / (logt[-1] - logt[-2])
        if m1 >= -1.0 - 1e-9:
            dirs.append("s->inf")
        else:
            tail = vals[-1] * grid[-1] / (-1.0 - m1)
    if dirs:
        return math.inf, ",".join(dirs)
    # main part: int I ds = int I * s dln s, trapezoid in ln s
    main = float(np.trapezoid(vals * grid, logt))
    return head + main + tail, None


def v_condition_integral(v_recip_star: RearrangementProfile, ps: ParamSet) -> ConditionValue:
    """Integral-type condition constant for the q < p regime.

    The r-th root (1/r = 1/gamma - 1/p) of

        int_0^inf s^(-r/gamma - 1) [int_0^s ((1/v)*)^(1/(p-1))]^(r/p') ds.

    The inner-bracket exponent r/p' = r/gamma' + 1 is the one consistent
    with integration by parts and with the scaling law c -> c^(-1/p).
    """
    if ps.case != "b":
        raise CarlemanError("integral-type v condition applies to the q < p regime")
    if _is_zero_profile(v_recip_star):
        return ConditionValue(0.0, None, _method(v_recip_star),
                              note="excluded-degenerate: v == +inf")
    p, gamma = ps.p, ps.gamma
    r = 1.0 / (1.0 / gamma - 1.0 / p)
    g = v_recip_star.powered(1.0 / (p - 1.0))
    C, divergent = g.cumulative()
    if divergent:
        return ConditionValue(math.inf, None, _method(v_recip_star), divergence="s->0",
                              note="inner running integral divergent at 0")
    rp = r / ps.p_prime
    val, div = _log_quadrature(lambda s: s ** (-r / gamma - 1.0) * C(s) ** rp)
    if div:
        return ConditionValue(math.inf, None, _method(v_recip_star), divergence=div)
    return ConditionValue(val ** (1.0 / r), None, _method(v_recip_star))


def pitt_sup_condition(u_star: RearrangementProfile, w_recip_star: RearrangementProfile,
                       p: float, q: float) -> ConditionValue:
    """Sup-type Pitt condition for 1 < p <= q:

        sup_s [int_0^{1/s} u*]^(1/q) [int_0^s ((1/w)*)^(1/(p-1))]^(1/p').

    The two inner integrals run over reciprocal ranges of s.
    """
    if not 1.0 < p <= q:
        raise CarlemanError("sup-type Pitt condition requires 1 < p <= q")
    if _is_zero_profile(u_star):
        return ConditionValue(0.0, None, _method(u_star), note="excluded-degenerate: u == 0")
    method = _method(u_star, w_recip_star)
    Cu, div_u = u_star.cumulative()
    if div_u:
        return ConditionValue(math.inf, None, method, divergence="s->0",
                              note="running integral of u* divergent at 0")
    g = w_recip_star.powered(1.0 / (p - 1.0))
    Cg, div_g = g.cumulative()
    if div_g:
        return ConditionValue(math.inf, None, method, divergence="s->0",
                              note="running integral of ((1/w)*)^(1/(p-1)) divergent at 0")
    pp = p / (p - 1.0)
    sup, arg, div = _sup_scan(lambda s: Cu(1.0 / s) ** (1.0 / q) * Cg(s) ** (1.0 / pp))
    if div:
        return ConditionValue(math.inf, None, method, divergence=div)
    return ConditionValue(sup, arg, method)


def pitt_integral_condition(u_star: RearrangementProfile, w_recip_star: RearrangementProfile,
                            p: float, q: float) -> ConditionValue:
    """Integral-type Pitt condition for 1 < q < p, with 1/r = 1/q - 1/p:

        [int_0^inf [int_0^{1/s} u*]^(r/q) [int_0^s g]^(r/q') g(s) ds]^(1/r),

    where g = ((1/w)*)^(1/(p-1)).
    """
    if not 1.0 < q < p:
        raise CarlemanError("integral-type Pitt condition requires 1 < q < p")
    if _is_zero_profile(u_star):
        return ConditionValue(0.0, None, _method(u_star), note="excluded-degenerate: u == 0")
    method = _method(u_star, w_recip_star)
    r = 1.0 / (1.0 / q - 1.0 / p)
    qp = q / (q - 1.0)
    Cu, div_u = u_star.cumulative()
    if div_u:
        return ConditionValue(math.inf, None, method, divergence="s->0",
                              note="running integral of u* divergent at 0")
    g = w_recip_star.powered(1.0 / (p - 1.0))
    Cg, div_g = g.cumulative()
    if div_g:
        return ConditionValue(math.inf, None, method, divergence="s->0",
                              note="running integral of ((1/w)*)^(1/(p-1)) divergent at 0")
    val, div = _log_quadrature(
        lambda s: Cu(1.0 / s) ** (r / q) * Cg(s) ** (r / qp) * g.value(s))
    if div:
        return ConditionValue(math.inf, None, method, divergence=div)
    return ConditionValue(val ** (1.0 / r), None, method)


@dataclass(frozen=True)
class EquivalenceReport:
    """Sup of the running integral vs sup of the pointwise form."""

    integral_sup: ConditionValue
    pointwise_sup: ConditionValue
    ratio: float
    beta1_ok: bool
    note: Optional[str] = None


def sup_integral_vs_pointwise(psi: RearrangementProfile, beta1: float,
                              beta2: float) -> EquivalenceReport:
    """Compare A = sup s^(-b1,-b2) int_0^s psi with B = sup s^(1-b1,1-b2') psi(s).

    Here b2' = min(b2, 1).  For non-increasing psi not identically zero the
    two sups are finite together (and comparable) only when b1 <= 1; b1 > 1
    forces psi == 0.
    """
    if beta1 <= 0 or beta2 <= 0:
        raise CarlemanError("both exponents must be positive")
    method = _method(psi)
    b2c = min(beta2, 1.0)
    if _is_zero_profile(psi):
        zero = ConditionValue(0.0, None, method, note="psi == 0")
        return EquivalenceReport(zero, zero, math.nan, beta1 <= 1.0)
    C, divergent = psi.cumulative()
    if divergent:
        A = ConditionValue(math.inf, None, method, divergence="s->0",
                           note="running integral of psi divergent at 0")
    else:
        sup, arg, div = _sup_scan(lambda s: piecewise_power(s, -beta1, -beta2) * C(s))
        A = (ConditionValue(math.inf, None, method, divergence=div) if div
             else ConditionValue(sup, arg, method))
    supb, argb, divb = _sup_scan(lambda s: piecewise_power(s, 1.0 - beta1, 1.0 - b2c) * psi.value(s))
    B = (ConditionValue(math.inf, None, method, divergence=divb) if divb
         else ConditionValue(supb, argb, method))
    if A.finite and B.finite and B.value > 0:
        ratio = A.value / B.value
    else:
        ratio = math.nan
    note = "beta1 > 1 forces psi == 0" if beta1 > 1.0 else None
    return EquivalenceReport(A, B, ratio, beta1 <= 1.0, note)


def u_condition_simplified(u_star: RearrangementProfile, ps: ParamSet) -> ConditionValue:
    """Simplified unit-tilt condition constant for the target weight u.

    Routing (part (a) tuples): for n >= 2 with 1/gamma' > 1/n the sup of
    s^((1 - q(1/gamma' - 1/n), 0)) u*(s); for n = 2 with p = gamma = 2 the
    exact log form sup (ln(1/s + 1))^(q/2) int_0^s u*; for n = 1 the sup of
    s^((0, -q/gamma')) int_0^s u*.  Returned as the q-th root.
    """
    if ps.case != "a":
        raise CarlemanError("simplified condition implemented for part (a) tuples")
    if _is_zero_profile(u_star):
        return ConditionValue(0.0, None, _method(u_star), note="excluded-degenerate: u == 0")
    q, gp, n = ps.q, ps.gamma_prime, ps.n
    method = _method(u_star)
    if n >= 2 and 1.0 / gp > 1.0 / n + 1e-12:
        expo1 = 1.0 - q * (1.0 / gp - 1.0 / n)
        sup, arg, div = _sup_scan(lambda s: piecewise_power(s, expo1, 0.0) * u_star.value(s))
        note = "n >= 2, 1/gamma' > 1/n"
    elif n == 2 and abs(ps.p - 2.0) < 1e-12 and abs(ps.gamma - 2.0) < 1e-12:
        C, divergent = _cumulative_or_divergent(u_star)
        if divergent:
            return ConditionValue(math.inf, None, method, divergence="s->0",
                                  note="running integral of u* divergent at 0")
        sup, arg, div = _sup_scan(lambda s: np.log1p(1.0 / s) ** (q / 2.0) * C(s))
        note = "n = 2, p = gamma = 2 (log form)"
    elif n == 1:
        C, divergent = _cumulative_or_divergent(u_star)
        if divergent:
            return ConditionValue(math.inf, None, method, divergence="s->0",
                                  note="running integral of u* divergent at 0")
        sup, arg, div = _sup_scan(lambda s: piecewise_power(s, 0.0, -q / gp) * C(s))
        note = "n = 1"
    else:
        raise CarlemanError("no simplified form applies to this exponent tuple")
    if div:
        return ConditionValue(math.inf, None, method, divergence=div, note=note)
    return ConditionValue(sup ** (1.0 / q), arg, method, note=note)
