"""Exponential integral E1 via power series and continued fraction.

E1(x) = integral_x^inf exp(-t)/t dt for x > 0.  Below the crossover the
alternating power series around the Euler-Mascheroni constant is used; above
it a modified-Lentz evaluation of the continued fraction, which naturally
produces the scaled form exp(x)*E1(x) needed when exp(-x) underflows.
"""

from __future__ import annotations

import math

from .errors import NumericDomainError

EULER_GAMMA = 0.5772156649015328606

_SERIES_CUTOFF = 1.0
_CF_MAX_ITER = 600
_CF_EPS = 1e-17
_CF_TINY = 1e-300


def _series_sum(x: float) -> float:
    """S(x) = sum_{k>=1} (-1)^{k+1} x^k / (k * k!), for x <= 1."""
    total = 0.0
    term = 1.0  # x^k / k! accumulator
    for k in range(1, 200):
        term *= x / k
        contrib = term / k if k % 2 == 1 else -term / k
        total += contrib
        if abs(contrib) < 1e-18 * max(abs(total), 1e-30):
            break
    return total


def _cf_scaled(x: float) -> float:
    """exp(x) * E1(x) by modified Lentz on the continued fraction, x > 0."""
    b = x + 1.0
    c = 1.0 / _CF_TINY
    d = 1.0 / b
    h = d
    for i in range(1, _CF_MAX_ITER + 1):
        a = -float(i * i)
        b += 2.0
        d = 1.0 / (a * d + b)
        c = b + a / c
        delta = c * d
        h *= delta
        if abs(delta - 1.0) < _CF_EPS:
            return h
    return h  # converged to double precision long before this for x > 1


def exp_integral_e1(x: float) -> float:
    """E1(x), relative accuracy ~1e-14 across [1e-8, 700]."""
    if x <= 0:
        raise NumericDomainError(f"E1 requires x > 0, got {x}")
    if x <= _SERIES_CUTOFF:
        return -EULER_GAMMA - math.log(x) + _series_sum(x)
    return math.exp(-x) * _cf_scaled(x)


def exp_scaled_e1(x: float) -> float:
    """exp(x) * E1(x); safe in the large-x regime where exp(-x) underflows."""
    if x <= 0:
        raise NumericDomainError(f"scaled E1 requires x > 0, got {x}")
    if x <= _SERIES_CUTOFF:
        return math.exp(x) * (-EULER_GAMMA - math.log(x) + _series_sum(x))
    return _cf_scaled(x)


def e1_scaled_plus_log(x: float) -> float:
    """exp(x) * E1(x) + ln(x), with the small-x log cancellation removed.

    For x -> 0 the two terms cancel to -EulerGamma + O(x); evaluating them
    separately loses precision, so the log is folded into the series via
    expm1.
    """
    if x <= 0:
        raise NumericDomainError(f"requires x > 0, got {x}")
    if x <= _SERIES_CUTOFF:
        return math.exp(x) * (-EULER_GAMMA + _series_sum(x)) - math.log(x) * math.expm1(x)
    return _cf_scaled(x) + math.log(x)
