"""Minimum-degree threshold for random intersection graphs.

The threshold equation is

    p (1 - (1 - p)^(n-1)) = (ln n + ln a_n + c) / m

where ``a_n = 1`` when m is below ``n ln n / ln ln n`` and
``a_n = np ln n / (e^{np} - 1)`` above it.  Near the switch point the law is
not stated, so that band (relative width ``eps_regime`` either side) raises
:class:`RegimeError` instead of picking a side.
"""
from __future__ import annotations

import json
import math
import warnings
from dataclasses import asdict, dataclass
from typing import NamedTuple

from .errors import InfeasibleError, ParameterError, RegimeError
from .model import one_minus_q_pow

AN_ONE = "an_equals_1"
AN_FORMULA = "an_formula"
EXCLUDED = "excluded_band"

MAX_OUTER = 50
P_TOL = 1e-14


class AnValue(NamedTuple):
    value: float
    branch: str


def regime_pivot(n: int) -> float:
    """``n ln n / ln ln n``, the m at which the a_n formula switches."""
    return n * math.log(n) / math.log(math.log(n))


def a_branch(n: int, m: int, eps_regime: float = 0.1) -> str:
    if n < 3:
        raise ParameterError("need n >= 3")
    if not 0 < eps_regime < 1:
        raise ParameterError("eps_regime must lie in (0, 1)")
    pivot = regime_pivot(n)
    if m > (1 + eps_regime) * pivot:
        return AN_FORMULA
    if m < (1 - eps_regime) * pivot:
        return AN_ONE
    return EXCLUDED


def _an_formula(n: int, p: float) -> float:
    x = n * p
    if x == 0:
        return math.log(n)
    return x * math.log(n) / math.expm1(x)


def a_n(n: int, m: int, p: float, eps_regime: float = 0.1) -> AnValue:
    if not 0.0 < p < 1.0:
        raise ParameterError("p must lie in (0, 1)")
    branch = a_branch(n, m, eps_regime)
    if branch == EXCLUDED:
        raise RegimeError(f"m={m} lies within {eps_regime} of n ln n / ln ln n = {regime_pivot(n):.1f}")
    if branch == AN_ONE:
        return AnValue(1.0, branch)
    return AnValue(_an_formula(n, p), branch)


def threshold_lhs(n: int, p: float) -> float:
    """``p (1 - (1-p)^(n-1))``, strictly increasing on (0, 1) for n >= 2."""
    return p * one_minus_q_pow(p, n - 1)


def _bisect(n: int, target: float) -> float:
    """Root of ``threshold_lhs(n, p) = target`` on (0, 1), run to machine precision."""
    lo, hi = 0.0, 1.0
    while True:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if threshold_lhs(n, mid) < target:
            lo = mid
        else:
            hi = mid
    # pick the endpoint with the smaller residual
    return lo if abs(threshold_lhs(n, lo) - target) <= abs(threshold_lhs(n, hi) - target) else hi


@dataclass(frozen=True)
class ThresholdSpec:
    n: int
    m: int
    c: float
    eps_regime: float
    a_branch: str
    a_n: float
    p: float
    residual: float
    iterations: int

    def as_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.as_dict(), sort_keys=True)


def _target(n, m, a, c):
    return (math.log(n) + math.log(a) + c) / m


def solve_p(n: int, m: int, c: float, eps_regime: float = 0.1) -> ThresholdSpec:
    """Solve the threshold equation for p.

    With ``a_n = 1`` this is a single bisection.  In the high-m branch a_n
    depends on p, so the bisection is wrapped in a fixed-point loop on a_n.
    """
    if m < 1:
        raise ParameterError("need m >= 1")
    if not math.isfinite(c):
        raise ParameterError("c must be finite")
    branch = a_branch(n, m, eps_regime)
    if branch == EXCLUDED:
        raise RegimeError(f"m={m} lies within {eps_regime} of n ln n / ln ln n = {regime_pivot(n):.1f}")
    if m < math.log(n) ** 2:
        warnings.warn(f"m={m} < ln^2 n = {math.log(n) ** 2:.2f}; the threshold law assumes ln^2 n = o(m)",
                      RuntimeWarning, stacklevel=2)

    def solve_for(a):
        t = _target(n, m, a, c)
        if not 0.0 < t < 1.0:
            raise InfeasibleError(f"target {t} is outside (0, 1)")
        return _bisect(n, t)

    a = 1.0 if branch == AN_ONE else math.log(n)
    p = solve_for(a)
    it = 1
    if branch == AN_FORMULA:
        for it in range(2, MAX_OUTER + 1):
            a = _an_formula(n, p)
            p_new = solve_for(a)
            done = abs(p_new - p) < P_TOL
            p = p_new
            if done:
                break
        a = _an_formula(n, p)
    residual = abs(threshold_lhs(n, p) - _target(n, m, a, c))
    return ThresholdSpec(n=n, m=m, c=float(c), eps_regime=eps_regime, a_branch=branch, a_n=a,
                         p=p, residual=residual, iterations=it)


def limit_min_degree_prob(c: float) -> float:
    """Limiting ``Pr[min degree >= 2]``: ``exp(-exp(-c))``, 0 at -inf and 1 at +inf."""
    if c == math.inf:
        return 1.0
    if c == -math.inf or c < -700:
        return 0.0
    return math.exp(-math.exp(-c))


def poisson_degree1_mean(c: float) -> float:
    """Predicted limiting mean (and variance) of the number of degree-1 vertices."""
    if not math.isfinite(c):
        raise ParameterError("c must be finite")
    return math.exp(-c)
