"""Gamma-family special functions on the real line.

The upper incomplete gamma function is needed for arbitrary real first
argument, including the negative orders that appear in the misalignment
closed forms. Everything is built around the *scaled* upper function

    S(a, x) = Gamma(a, x) * exp(x) * x**(-a),

which stays O(1/|a|) even where Gamma(a, x) itself over- or underflows.
Evaluation strategy:

* x >= a + 1 (and x >= 1.5 for a < 1): modified Lentz continued fraction.
* a >= 1, x < a + 1: power series for the lower function, complemented.
* a < 1, x < 1.5: a cancellation-free form anchored at a0 = a - round(a)
  in [-0.5, 0.5) (or at a itself on [0.5, 1)), followed by downward recurrence
  S(b - 1) = (1 - x S(b)) / (1 - b).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

from scipy.special import zeta as _zeta

__all__ = [
    "ConvergenceWarning",
    "SpecFunResult",
    "gamma",
    "upper_inc_gamma",
    "upper_inc_gamma_result",
    "upper_inc_gamma_scaled",
    "upper_inc_gamma_scaled_result",
    "lower_inc_gamma",
    "gammainc_p",
    "gammainc_q",
    "erf",
]

MAX_ITER = 10_000
_EPS = 2.0 ** -53
_FPMIN = 1e-300
_EULER = 0.57721566490153286061
_SMALL_X = 1.5

# (-1)^k zeta(k) / k for the Maclaurin series of lgamma(1 + a)
_LGAMMA1P_COEF = [(-1) ** k * float(_zeta(k)) / k for k in range(2, 64)]


class ConvergenceWarning(RuntimeWarning):
    """An expansion hit the iteration cap before reaching double precision."""


@dataclass(frozen=True)
class SpecFunResult:
    value: float
    converged: bool
    iterations: int

    def __post_init__(self):
        if self.converged and not math.isfinite(self.value):
            raise ValueError("a converged result must be finite")


def gamma(a: float) -> float:
    """Gamma function; raises ``ValueError`` at the poles 0, -1, -2, ..."""
    if a <= 0 and a == math.floor(a):
        raise ValueError(f"gamma has a pole at a={a}")
    return math.gamma(a)


def erf(x: float) -> float:
    return math.erf(x)


def _gamma1pm1_over_a(a: float) -> float:
    """(Gamma(1 + a) - 1) / a, accurate as a -> 0."""
    if a == 0.0:
        return -_EULER
    if abs(a) < 0.5:
        # lgamma(1 + a) / a as a power series, then expm1 keeps the digits
        s = 0.0
        p = a
        for c in _LGAMMA1P_COEF:
            p *= a
            term = c * p
            s += term
            if abs(term) < _EPS * 1e-3:
                break
        lg_over_a = -_EULER + s / a
        return math.expm1(a * lg_over_a) / a
    return (math.gamma(1.0 + a) - 1.0) / a


def _lower_series(a: float, x: float) -> tuple[float, bool, int]:
    """sum_n x^n / (a (a+1) ... (a+n)); gamma(a, x) = x^a e^-x times this."""
    term = 1.0 / a
    total = term
    for n in range(1, MAX_ITER + 1):
        term *= x / (a + n)
        total += term
        if abs(term) < abs(total) * _EPS:
            return total, True, n
    return total, False, MAX_ITER


def _upper_cf(a: float, x: float) -> tuple[float, bool, int]:
    """Continued fraction for S(a, x), valid for all real a when x is not small."""
    b = x + 1.0 - a
    c = 1.0 / _FPMIN
    d = 1.0 / b if b != 0.0 else 1.0 / _FPMIN
    h = d
    for i in range(1, MAX_ITER + 1):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < _FPMIN:
            d = _FPMIN
        c = b + an / c
        if abs(c) < _FPMIN:
            c = _FPMIN
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _EPS:
            return h, True, i
    return h, False, MAX_ITER


def _upper_small_x_frac(a0: float, x: float) -> tuple[float, bool, int]:
    """Gamma(a0, x) for a0 in [-0.5, 1) and 0 < x < 1.5, without cancellation.

    Gamma(a0, x) = (Gamma(1+a0) - 1)/a0 - (x^a0 - 1)/a0
                   - x^a0 * sum_{n>=1} (-x)^n / (n! (a0 + n))
    """
    lnx = math.log(x)
    t = a0 * lnx
    em = lnx if a0 == 0.0 else math.expm1(t) / a0
    s = 0.0
    term = 1.0
    ok = False
    n = 0
    for n in range(1, MAX_ITER + 1):
        term *= -x / n
        contrib = term / (a0 + n)
        s += contrib
        if abs(contrib) < _EPS * abs(s):
            ok = True
            break
    val = _gamma1pm1_over_a(a0) - em - math.exp(t) * s
    return val, ok, n


def _scaled(a: float, x: float) -> tuple[float, bool, int]:
    if x < _SMALL_X and a < 1.0:
        # anchor in [-0.5, 0.5) (or a itself on [0.5, 1)) so that no
        # recurrence step divides by a small b - 1
        a0 = a if a >= 0.5 else a - math.floor(a + 0.5)
        g0, ok, it = _upper_small_x_frac(a0, x)
        s = g0 * math.exp(x - a0 * math.log(x))
        b = a0
        while b > a + 0.5:
            s = (x * s - 1.0) / (b - 1.0)
            b -= 1.0
            it += 1
        return s, ok, it
    if a >= 1.0 and x < a + 1.0:
        series, ok, it = _lower_series(a, x)
        # S = Gamma(a) e^x x^-a - series
        log_pref = math.lgamma(a) + x - a * math.log(x)
        return math.exp(log_pref) - series, ok, it
    return _upper_cf(a, x)


def upper_inc_gamma_scaled(a: float, x: float) -> float:
    """Gamma(a, x) * exp(x) * x**(-a) for real a and x > 0."""
    if not x > 0:
        raise ValueError(f"x must be positive, got {x}")
    s, ok, it = _scaled(a, x)
    if not ok:
        warnings.warn(f"upper_inc_gamma_scaled({a}, {x}) did not converge in {it} iterations",
                      ConvergenceWarning, stacklevel=2)
    return s


def upper_inc_gamma_scaled_result(a: float, x: float) -> SpecFunResult:
    if not x > 0:
        raise ValueError(f"x must be positive, got {x}")
    s, ok, it = _scaled(a, x)
    return SpecFunResult(s, ok and math.isfinite(s), it)


def upper_inc_gamma_result(a: float, x: float) -> SpecFunResult:
    """Upper incomplete gamma with convergence bookkeeping."""
    if not x > 0:
        raise ValueError(f"x must be positive, got {x}")
    if a >= 1.0 and x < a + 1.0 and not (x < _SMALL_X and a < 1.0):
        series, ok, it = _lower_series(a, x)
        value = math.gamma(a) - series * math.exp(a * math.log(x) - x)
        return SpecFunResult(value, ok and math.isfinite(value), it)
    s, ok, it = _scaled(a, x)
    log_pref = a * math.log(x) - x
    try:
        value = s * math.exp(log_pref)
    except OverflowError:
        value = math.inf
    return SpecFunResult(value, ok and math.isfinite(value), it)


def upper_inc_gamma(a: float, x: float) -> float:
    """Gamma(a, x) = int_x^inf t^(a-1) e^-t dt for any real a and x > 0.

    Emits :class:`ConvergenceWarning` when the iteration budget runs out.
    """
    res = upper_inc_gamma_result(a, x)
    if not res.converged:
        warnings.warn(f"upper_inc_gamma({a}, {x}) did not converge "
                      f"({res.iterations} iterations)", ConvergenceWarning, stacklevel=2)
    return res.value


def gammainc_p(a: float, x: float) -> float:
    """Regularized lower incomplete gamma P(a, x), a > 0."""
    if a <= 0:
        raise ValueError(f"a must be positive, got {a}")
    if x < 0:
        raise ValueError(f"x must be nonnegative, got {x}")
    if x == 0:
        return 0.0
    if math.isinf(x):
        return 1.0
    if x < a + 1.0:
        series, ok, it = _lower_series(a, x)
        if not ok:
            warnings.warn(f"gammainc_p({a}, {x}) did not converge", ConvergenceWarning, stacklevel=2)
        return series * math.exp(a * math.log(x) - x - math.lgamma(a))
    return 1.0 - gammainc_q(a, x)


def gammainc_q(a: float, x: float) -> float:
    """Regularized upper incomplete gamma Q(a, x) = 1 - P(a, x), a > 0."""
    if a <= 0:
        raise ValueError(f"a must be positive, got {a}")
    if x < 0:
        raise ValueError(f"x must be nonnegative, got {x}")
    if x == 0:
        return 1.0
    if math.isinf(x):
        return 0.0
    if x < a + 1.0:
        return 1.0 - gammainc_p(a, x)
    s, ok, it = _upper_cf(a, x)
    if not ok:
        warnings.warn(f"gammainc_q({a}, {x}) did not converge", ConvergenceWarning, stacklevel=2)
    return s * math.exp(a * math.log(x) - x - math.lgamma(a))


def lower_inc_gamma(a: float, x: float) -> float:
    """gamma(a, x) = int_0^x t^(a-1) e^-t dt, a > 0, x >= 0."""
    if a <= 0:
        raise ValueError(f"a must be positive, got {a}")
    if x < 0:
        raise ValueError(f"x must be nonnegative, got {x}")
    if x == 0:
        return 0.0
    if x < a + 1.0:
        series, ok, _ = _lower_series(a, x)
        if not ok:
            warnings.warn(f"lower_inc_gamma({a}, {x}) did not converge", ConvergenceWarning, stacklevel=2)
        return series * math.exp(a * math.log(x) - x)
    return math.gamma(a) - upper_inc_gamma(a, x)
