"""Analytic machinery for the iterated-majority scaling limit.

The recursion map of m-ary majority is the polynomial

    majority_map(m, x) = P(Bin(m, x) >= (m+1)/2),

whose centered translate centered_map has slope growth_rate(m) at its middle
fixed point.  Iterating the centered map on shrinking inputs produces the
limit profile: limit_cdf(x) = 1/2 + lim_n centered_map^(n)(x * rate^-n), an
odd, strictly increasing, 1-Lipschitz bijection onto (-1/2, 1/2).  Tails
decay like exp(-Theta(x^tail_exponent)) and are evaluated in log space via
the exact conjugation of the near-fixed-point dynamics to the dynamics of
majority_map near 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.special import betainc

from .errors import ToleranceError

_POLY_M_MAX = 31        # closed-form polynomial is exact to ~1e-11 up to here
_POLY_X_SMALL = 0.05    # below this the polynomial has no cancellation, any m
_X_SWITCH = 0.05        # iterate value past which the step moves to log space
_LOG_TINY = math.log(1e-300)


@dataclass(frozen=True)
class IterMajParams:
    """Arity and iteration tolerances for the limit computation."""

    m: int
    tol: float = 1e-12
    max_depth: int = 200

    def __post_init__(self):
        if self.m < 3 or self.m % 2 == 0:
            raise ValueError("arity must be an odd integer >= 3")
        if not 0.0 < self.tol < 1e-3:
            raise ValueError("tolerance must lie in (0, 1e-3)")


@dataclass(frozen=True)
class LimitEvaluation:
    """One evaluation of the limit profile at ``alpha``.

    ``value`` is the centered CDF value, strictly inside (-1/2, 1/2)
    mathematically; ``tail_form`` flags that 1/2 - |value| was tracked in log
    space, with ``log_tail`` holding log(1/2 - |value|).  Once log_tail drops
    below roughly -36, double rounding makes ``value`` exactly +-0.5 and the
    strict gap is carried by log_tail alone.
    """

    alpha: float
    value: float
    depth_used: int
    tail_form: bool
    log_tail: Optional[float] = None


def growth_rate(m: int) -> float:
    """Slope of the majority recursion map at its middle fixed point:
    m * C(m-1, (m-1)/2) / 2^(m-1)."""
    _check_arity(m)
    if m <= 511:
        return m * math.comb(m - 1, (m - 1) // 2) / (1 << (m - 1))
    return math.exp(math.log(m) + math.lgamma(m) - 2.0 * math.lgamma((m + 1) / 2)
                    - (m - 1) * math.log(2.0))


def growth_rate_by_recursion(m: int) -> float:
    """Same quantity through the two-step recursion seeded at 3/2."""
    _check_arity(m)
    value = 1.5
    for k in range(5, m + 1, 2):
        value *= k / (k - 1)
    return value


def tail_exponent(m: int) -> float:
    """log((m+1)/2) / log(growth_rate(m)); lies strictly between 1 and 2."""
    return math.log((m + 1) / 2) / math.log(growth_rate(m))


def _check_arity(m: int):
    if m < 3 or m % 2 == 0:
        raise ValueError("arity must be an odd integer >= 3")


def majority_map(m: int, x: float) -> float:
    """Probability that m-bit majority is 1 when each bit is 1 w.p. x."""
    _check_arity(m)
    if not 0.0 <= x <= 1.0:
        raise ValueError("argument must lie in [0, 1]")
    if x == 0.0 or x == 1.0:
        return float(x)
    k0 = (m + 1) // 2
    if m <= 60:
        # ascending-magnitude direct sum
        terms = sorted(math.comb(m, k) * x ** k * (1.0 - x) ** (m - k)
                       for k in range(k0, m + 1))
        return math.fsum(terms)
    return float(betainc(k0, k0, x))


def majority_map_deriv(m: int, x: float) -> float:
    """Closed-form derivative ((m+1)/2) C(m,(m-1)/2) [x(1-x)]^((m-1)/2)."""
    _check_arity(m)
    if not 0.0 <= x <= 1.0:
        raise ValueError("argument must lie in [0, 1]")
    q = (m - 1) // 2
    if x == 0.0 or x == 1.0:
        return 0.0
    log_val = (math.log((m + 1) / 2)
               + math.lgamma(m + 1) - math.lgamma(q + 1) - math.lgamma(m - q + 1)
               + q * math.log(x * (1.0 - x)))
    return math.exp(log_val)


def _poly_coefficients(m: int):
    """Coefficients of the exact odd polynomial for the centered map:
    centered_map(x) = K * integral_0^x (1/4 - u^2)^q du."""
    q = (m - 1) // 2
    k_front = (m + 1) // 2 * math.comb(m, q)
    return [k_front * math.comb(q, j) * 0.25 ** (q - j) * (-1) ** j / (2 * j + 1)
            for j in range(q + 1)]


_POLY_CACHE: dict = {}


def centered_map(m: int, x: float) -> float:
    """The majority recursion map translated to fix 0: g(1/2 + x) - 1/2."""
    _check_arity(m)
    if not -0.5 <= x <= 0.5:
        raise ValueError("argument must lie in [-1/2, 1/2]")
    if m <= _POLY_M_MAX or abs(x) <= _POLY_X_SMALL:
        coefs = _POLY_CACHE.get(m)
        if coefs is None:
            coefs = _POLY_CACHE[m] = _poly_coefficients(m)
        x2 = x * x
        s = 0.0
        for c in reversed(coefs):
            s = s * x2 + c
        return s * x
    k0 = (m + 1) // 2
    return float(betainc(k0, k0, 0.5 + x)) - 0.5


def centered_map_deriv(m: int, x: float) -> float:
    """Derivative of the centered map; equals growth_rate(m) at 0."""
    return majority_map_deriv(m, 0.5 + x)


def _log_majority_map(m: int, log_eps: float) -> float:
    """log majority_map(m, exp(log_eps)) for small eps, exact in log space."""
    k0 = (m + 1) // 2
    lead = math.lgamma(m + 1) - math.lgamma(k0 + 1) - math.lgamma(m - k0 + 1)
    out = lead + k0 * log_eps
    if log_eps > _LOG_TINY:
        eps = math.exp(log_eps)
        out += (m - k0) * math.log1p(-eps)
        ratio = eps / (1.0 - eps)
        bracket = 1.0
        coef = 1.0
        for j in range(1, m - k0 + 1):
            coef *= (m - k0 - j + 1) / (k0 + j)
            bracket += coef * ratio ** j
        out += math.log(bracket)
    return out


def _iterate(m: int, alpha: float, depth: int):
    """centered_map^(depth)(alpha * rate^-depth) for alpha >= 0.

    Once the iterate passes _X_SWITCH the remaining steps run on
    log(1/2 - x) through the exact fixed-point conjugation to majority_map
    near 0, for two reasons: the handoff happens while 1/2 - x is still of
    order 1 (full relative precision, since one map application from there
    can land deeper than doubles can represent for large arity), and the
    subsequent superexponential collapse keeps relative accuracy instead of
    underflowing.  Returns (value, log_tail)."""
    rate = growth_rate(m)
    x = alpha * rate ** (-depth)
    if x > 0.5:
        raise ValueError("iteration depth too small for this argument")
    log_eps = math.log(0.5 - x) if x > _X_SWITCH else None
    for _ in range(depth):
        if log_eps is None and x > _X_SWITCH:
            log_eps = math.log(0.5 - x)
        if log_eps is None:
            x = centered_map(m, x)
        else:
            log_eps = _log_majority_map(m, log_eps)
    if log_eps is None:
        return x, None
    value = 0.5 - math.exp(log_eps) if log_eps > -700.0 else 0.5
    return value, log_eps


def centered_cdf(params: IterMajParams, alpha: float) -> LimitEvaluation:
    """Limit profile value at ``alpha``: the centered limiting CDF.

    Runs the shrinking-input iteration at increasing depth until successive
    evaluations agree within ``params.tol`` (the depth-indexed sequence is
    monotone decreasing for alpha > 0, which is the convergence monitor).
    """
    if not math.isfinite(alpha):
        raise ValueError("argument must be finite")
    if alpha == 0.0:
        return LimitEvaluation(alpha=0.0, value=0.0, depth_used=0, tail_form=False)
    m, tol = params.m, params.tol
    a = abs(alpha)
    rate = growth_rate(m)
    depth = max(1, math.ceil(math.log(max(a, tol) / tol) / math.log(rate)) + 10)
    if depth > params.max_depth:
        raise ToleranceError(
            f"required starting depth {depth} exceeds cap {params.max_depth}")
    prev = None
    while True:
        value, log_tail = _iterate(m, a, depth)
        if prev is not None:
            pv, plt = prev
            close = abs(value - pv) < tol
            if close and log_tail is not None and plt is not None and log_tail < -1.0:
                close = abs(log_tail - plt) < tol * abs(log_tail)
            if close:
                break
        prev = (value, log_tail)
        depth += 8
        if depth > params.max_depth:
            raise ToleranceError(
                f"no convergence within depth cap {params.max_depth}",
                best=_signed_evaluation(alpha, value, depth - 8, log_tail))
    return _signed_evaluation(alpha, value, depth, log_tail)


def _signed_evaluation(alpha, value, depth, log_tail):
    signed = value if alpha >= 0 else -value
    return LimitEvaluation(alpha=float(alpha), value=signed, depth_used=depth,
                           tail_form=log_tail is not None, log_tail=log_tail)


def limit_cdf(params: IterMajParams, x) -> np.ndarray | float:
    """Limiting CDF of the rescaled flip time: 1/2 + centered_cdf(x)."""
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    out = np.array([0.5 + centered_cdf(params, float(t)).value for t in xs])
    return out if np.ndim(x) else float(out[0])


def limit_density(params: IterMajParams, alpha: float) -> float:
    """Density of the limit law: the infinite product
    prod_k centered_map_deriv(L(alpha * rate^-k)) / rate, truncated once a
    factor is within tol of 1.  Decreasing on [0, inf); equals 1 at 0."""
    if not math.isfinite(alpha):
        raise ValueError("argument must be finite")
    m, tol = params.m, params.tol
    rate = growth_rate(m)
    a = abs(alpha)
    product = 1.0
    for k in range(1, params.max_depth + 1):
        arg = a * rate ** (-k)
        val = centered_cdf(params, arg).value
        factor = centered_map_deriv(m, val) / rate
        product *= factor
        if 1.0 - factor < tol:
            return product
    raise ToleranceError("density product did not stabilize", best=product)


def log_upper_tail(params: IterMajParams, x: float) -> float:
    """log P(W >= x) = log(1/2 - centered_cdf(x)) for x >= 0, exact in log
    space far into the tail."""
    if x < 0:
        raise ValueError("tail argument must be >= 0 (use symmetry)")
    ev = centered_cdf(params, x)
    if ev.tail_form and ev.log_tail is not None:
        return ev.log_tail
    return math.log(0.5 - ev.value)


def upper_tail(params: IterMajParams, x: float) -> float:
    """P(W >= x) for x >= 0; underflows to 0.0 below ~1e-308 (use
    log_upper_tail for the deep tail)."""
    lt = log_upper_tail(params, x)
    return math.exp(lt) if lt > -745.0 else 0.0


def large_m_density(x) -> np.ndarray | float:
    """Pointwise large-arity limit of the densities: exp(-pi x^2), the
    centered Gaussian with variance 1/(2 pi)."""
    xs = np.asarray(x, dtype=float)
    out = np.exp(-math.pi * xs ** 2)
    return float(out) if out.ndim == 0 else out


def limit_quantile(params: IterMajParams, q: float) -> float:
    """Inverse of limit_cdf by monotone bisection: |limit_cdf(a) - q| < tol."""
    if not 0.0 < q < 1.0:
        raise ValueError("probability must lie in (0, 1)")
    if q == 0.5:
        return 0.0
    if q < 0.5:
        return -limit_quantile(params, 1.0 - q)
    target = q - 0.5
    tol = params.tol
    lo, hi = 0.0, 1.0
    while centered_cdf(params, hi).value < target:
        hi *= 2.0
        if hi > 1e9:
            raise ToleranceError("quantile bracket exploded")
    for _ in range(300):
        mid = 0.5 * (lo + hi)
        val = centered_cdf(params, mid).value
        if abs(val - target) < tol:
            return mid
        if val < target:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)
