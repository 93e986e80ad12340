"""Exponent tuples and admissible piecewise-power weight regions.

A :class:`ParamSet` bundles the dimension ``n``, the Lebesgue exponents
``p <= q`` (part (a)) or ``q < p`` (part (b)), the intermediate exponent
``gamma`` and the tilt strength ``tau``.  All admissibility conditions in
this package are phrased in terms of the dual exponent ``gamma' =
gamma/(gamma-1)``:

* part (a): ``1 < p <= q`` and ``max(p, p') <= gamma <= q``; for ``tau = 0``
  additionally ``1/n < 1/gamma' <= 1/n + 1/q``.
* part (b): ``1 < q < p``; ``n/(n-1) < gamma <= q`` for ``tau = 0`` and
  ``1 < gamma <= q`` for ``tau > 0``.

For part (a) the admissible piecewise-power weights ``u = |x|^(-a1,-a2)``,
``v = |x|^(b1,b2)`` (all exponents nonnegative) form the box

    a1 <= n(1 - q/gamma' + q/n),    a2 >= same bound (tau = 0) or a2 >= 0,
    0 <= b1 <= n(p/gamma' - 1),     b2 >= n(p/gamma' - 1),

and on pure powers ``u = |x|^-a``, ``v = |x|^b`` the balance
``a/q + b/p = n(1/q - 1/p) + 1`` (equality at ``tau = 0``, ``<=`` for
``tau > 0``) is necessary for the gradient inequality to hold.
"""

import math
from dataclasses import dataclass

from .errors import ParameterError

__all__ = [
    "ParamSet",
    "PowerExponents",
    "PowerRegion",
    "validate_params",
    "admissible_powers",
    "necessity_check",
]

#: absolute tolerance for exact rational balances (all quantities are O(1))
BALANCE_TOL = 1e-12


@dataclass(frozen=True)
class ParamSet:
    """A validated exponent tuple; construct via :func:`validate_params`."""

    n: int
    p: float
    q: float
    gamma: float
    tau: float
    case: str  # "a" (p <= q) or "b" (q < p)

    @property
    def p_prime(self) -> float:
        return self.p / (self.p - 1.0)

    @property
    def q_prime(self) -> float:
        return self.q / (self.q - 1.0)

    @property
    def gamma_prime(self) -> float:
        return self.gamma / (self.gamma - 1.0)

    @property
    def r(self) -> float:
        """1/r = 1/p - 1/q; infinite when p = q, undefined (nan) in part (b)."""
        if self.case == "b":
            return math.nan
        if self.p == self.q:
            return math.inf
        return 1.0 / (1.0 / self.p - 1.0 / self.q)


@dataclass(frozen=True)
class PowerExponents:
    """Exponents of u = |x|^(-alpha1,-alpha2) and v = |x|^(beta1,beta2)."""

    alpha1: float
    alpha2: float
    beta1: float
    beta2: float

    def __post_init__(self):
        for name in ("alpha1", "alpha2", "beta1", "beta2"):
            if getattr(self, name) < 0:
                raise ParameterError(f"{name} must be nonnegative")


def validate_params(n, p, q, gamma, tau, case) -> ParamSet:
    """Validate an exponent tuple and return the frozen :class:`ParamSet`.

    Raises :class:`ParameterError` naming the first violated rule.
    """
    if case not in ("a", "b"):
        raise ParameterError(f"unknown case {case!r} (expected 'a' or 'b')")
    for name, val in (("p", p), ("q", q), ("gamma", gamma), ("tau", tau)):
        if not math.isfinite(val):
            raise ParameterError(f"{name} is not finite")
    if int(n) != n or n < 1:
        raise ParameterError("n must be a positive integer")
    n = int(n)
    if not 1.0 < p:
        raise ParameterError("p must exceed 1")
    if not 1.0 < q:
        raise ParameterError("q must exceed 1")
    if tau < 0:
        raise ParameterError("tau must be nonnegative")

    p_prime = p / (p - 1.0)
    if case == "a":
        if q < p:
            raise ParameterError("q < p in part (a)")
        if gamma < max(p, p_prime) - BALANCE_TOL:
            raise ParameterError("gamma below max(p,p')")
        if gamma > q + BALANCE_TOL:
            raise ParameterError("gamma above q")
        if tau == 0.0:
            gamma_prime = gamma / (gamma - 1.0)
            # strict on the left (the kernel integral diverges at equality)
            if not 1.0 / n < 1.0 / gamma_prime:
                raise ParameterError("1/gamma' must exceed 1/n when tau = 0")
            if 1.0 / gamma_prime > 1.0 / n + 1.0 / q + BALANCE_TOL:
                raise ParameterError("1/gamma' above 1/n + 1/q when tau = 0")
    else:
        if q >= p:
            raise ParameterError("p <= q in part (b)")
        if gamma > q + BALANCE_TOL:
            raise ParameterError("gamma above q")
        if tau == 0.0:
            if n == 1:
                raise ParameterError("gamma above n/(n-1) impossible for n = 1 when tau = 0")
            if gamma <= n / (n - 1.0) + BALANCE_TOL:
                raise ParameterError("gamma must exceed n/(n-1) when tau = 0")
        else:
            if gamma <= 1.0:
                raise ParameterError("gamma must exceed 1")
    return ParamSet(n=n, p=float(p), q=float(q), gamma=float(gamma), tau=float(tau), case=case)


@dataclass(frozen=True)
class PowerRegion:
    """The admissible exponent box for piecewise-power weights (part (a))."""

    alpha1_max: float
    alpha2_min: float
    beta1_max: float
    beta2_min: float
    tau: float

    def contains(self, powers: PowerExponents, tol: float = BALANCE_TOL) -> bool:
        return (
            powers.alpha1 <= self.alpha1_max + tol
            and powers.alpha2 >= self.alpha2_min - tol
            and powers.beta1 <= self.beta1_max + tol
            and powers.beta2 >= self.beta2_min - tol
        )


def admissible_powers(ps: ParamSet) -> PowerRegion:
    """Exponent bounds for admissible piecewise-power weight pairs.

    For ``tau > 0`` the lower bound on ``alpha2`` relaxes to 0; the other
    three bounds do not depend on ``tau``.  The returned region may be empty
    (``alpha1_max < 0``) for tuples that are only valid at ``tau > 0``.
    """
    if ps.case != "a":
        raise ParameterError("admissible power region is defined for part (a) only")
    gp = ps.gamma_prime
    a_bound = ps.n * (1.0 - ps.q / gp + ps.q / ps.n)
    b_bound = ps.n * (ps.p / gp - 1.0)
    alpha2_min = a_bound if ps.tau == 0.0 else 0.0
    return PowerRegion(
        alpha1_max=a_bound,
        alpha2_min=alpha2_min,
        beta1_max=b_bound,
        beta2_min=b_bound,
        tau=ps.tau,
    )


def necessity_check(alpha: float, beta: float, ps: ParamSet) -> str:
    """Classify a pure-power pair against the scaling balance.

    Returns ``"exact"`` when ``alpha/q + beta/p`` equals
    ``n(1/q - 1/p) + 1`` to within ``1e-12``; for ``tau > 0`` a strictly
    smaller value is ``"subcritical"``; anything else is ``"violated"``.
    """
    if alpha < 0 or beta < 0:
        raise ParameterError("alpha and beta must be nonnegative")
    lhs = alpha / ps.q + beta / ps.p
    rhs = ps.n * (1.0 / ps.q - 1.0 / ps.p) + 1.0
    if abs(lhs - rhs) <= BALANCE_TOL:
        return "exact"
    if ps.tau > 0 and lhs < rhs:
        return "subcritical"
    return "violated"
