"""End-to-end outage probability of the dual-hop decode-and-forward link.

With a DF relay the end-to-end SNR is the minimum of the two hop SNRs, and
the hops are independent, so

    P_out(x) = 1 - (1 - F_1(x)) (1 - F_2(x)).

Three per-hop CDFs are available:

* :func:`cdf_link_nobm` - BM-free hop, regularized incomplete gamma.
* :func:`cdf_link_bm_closed` - hop with pointing misalignment, the finite
  sum over ``k < mu`` of negative-order upper incomplete gamma terms.
  Requires integer ``mu``.
* :func:`cdf_link_quadrature` - the same misalignment CDF by adaptive
  quadrature of F_f(y / t) against the misalignment law. This is the
  reference; it accepts any real ``mu``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from enum import Enum
from typing import TYPE_CHECKING, Optional

from scipy import integrate

from .atmosphere import Environment
from .channel import LinkConfig, fading_cdf, fading_pdf, mean_snr
from .specfun import ConvergenceWarning, upper_inc_gamma_result, upper_inc_gamma_scaled_result

if TYPE_CHECKING:
    from .mcsim import McConfig

__all__ = [
    "Method",
    "Scenario",
    "OutageResult",
    "Diagnostics",
    "cdf_link_bm_closed",
    "cdf_link_nobm",
    "cdf_link_nobm_quadrature",
    "cdf_link_quadrature",
    "cdf_link",
    "combine_links",
    "outage_probability",
]

QUAD_EPSABS = 1e-15
QUAD_EPSREL = 1e-10


class Method(str, Enum):
    CLOSED_FORM = "closed_form"
    QUADRATURE = "quadrature"
    MONTE_CARLO = "monte_carlo"


@dataclass
class Diagnostics:
    """Mutable counters filled in while evaluating a CDF."""

    clamp_events: int = 0
    nonconverged: int = 0
    quad_warnings: int = 0

    def merge(self, other: "Diagnostics") -> None:
        self.clamp_events += other.clamp_events
        self.nonconverged += other.nonconverged
        self.quad_warnings += other.quad_warnings

    def flags(self) -> list[str]:
        out = []
        if self.clamp_events:
            out.append(f"clamp={self.clamp_events}")
        if self.nonconverged:
            out.append(f"nonconverged={self.nonconverged}")
        if self.quad_warnings:
            out.append(f"quad_warning={self.quad_warnings}")
        return out


@dataclass(frozen=True)
class Scenario:
    link1: LinkConfig = field(default_factory=LinkConfig)
    link2: LinkConfig = field(default_factory=LinkConfig)
    environment: Environment = field(default_factory=Environment)
    snr_threshold: float = 1.0

    def __post_init__(self):
        if not self.snr_threshold > 0:
            raise ValueError(f"snr_threshold must be positive, got {self.snr_threshold}")

    @property
    def case(self) -> str:
        """``"both"``, ``"single"`` or ``"none"``, by which hops carry misalignment."""
        n = self.link1.has_misalignment + self.link2.has_misalignment
        return ("none", "single", "both")[n]


@dataclass(frozen=True)
class OutageResult:
    op: float
    method: Method
    stderr: Optional[float] = None
    flags: tuple[str, ...] = ()

    def __post_init__(self):
        if not 0.0 <= self.op <= 1.0:
            raise ValueError(f"op outside [0, 1]: {self.op}")
        if (self.stderr is not None) != (self.method is Method.MONTE_CARLO):
            raise ValueError("stderr is reported for Monte-Carlo results only")


def _clamp(p: float, diag: Optional[Diagnostics]) -> float:
    if p < 0.0 or p > 1.0 or math.isnan(p):
        if diag is not None:
            diag.clamp_events += 1
        if math.isnan(p):
            return 1.0
        return min(max(p, 0.0), 1.0)
    return p


def cdf_link_nobm(x: float, link: LinkConfig, env: Environment) -> float:
    """CDF of a BM-free hop SNR: F_f(sqrt(x / mean_snr))."""
    if x <= 0:
        return 0.0
    return fading_cdf(math.sqrt(x / mean_snr(link, env)), link)


def cdf_link_nobm_quadrature(x: float, link: LinkConfig, env: Environment) -> float:
    """BM-free hop CDF by integrating the fading density directly."""
    if x <= 0:
        return 0.0
    y = math.sqrt(x / mean_snr(link, env))
    val, _ = integrate.quad(fading_pdf, 0.0, y, args=(link,), epsabs=0.0, epsrel=1e-13, limit=200)
    return min(val, 1.0)


def _bm_sum_literal(x, a, mu, hh, zeta, s_o, rho, diag):
    w = mu * s_o ** -a * x ** (a / 2) / (rho ** (a / 2) * hh ** a)
    total = 0.0
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ConvergenceWarning)
        for k in range(mu):
            res = upper_inc_gamma_result((a * k - zeta) / a, w)
            if not res.converged and diag is not None:
                diag.nonconverged += 1
            try:
                pref = (x ** (zeta / 2) / (a * rho ** (zeta / 2) * hh ** zeta)
                        * zeta / s_o ** zeta * mu ** (zeta / a) / math.factorial(k))
            except (OverflowError, ZeroDivisionError):
                return math.nan
            total += pref * res.value
    return total


def cdf_link_bm_closed(x: float, link: LinkConfig, env: Environment,
                       diag: Optional[Diagnostics] = None, literal: bool = False) -> float:
    """CDF of a misaligned hop SNR from the finite incomplete-gamma sum.

    1 - sum_{k=0}^{mu-1} x^(z/2) / (a rho^(z/2) h^z) * z / S^z * mu^(z/a) / k!
                          * Gamma((a k - z) / a, mu S^-a x^(a/2) / (rho^(a/2) h^a))

    with a = alpha, z = zeta, h = hhat, S = s_o, rho = mean SNR. Writing the
    incomplete gamma as Gamma(b, w) = w^b e^-w G(b, w) with the scaled G, the
    zeta-dependent powers cancel exactly and term k reduces to
    (zeta / a) w^k e^-w G(k - zeta/a, w) / k!, w being the gamma argument.
    That form stays accurate for very large ``zeta``. ``literal=True``
    evaluates every factor as written instead, in plain double precision; it
    overflows or loses digits once ``zeta`` is large and exists for comparison.
    """
    mp = link.misalignment
    if mp is None:
        raise ValueError("link has no misalignment parameters")
    if not link.mu_is_integer:
        raise ValueError(f"closed form needs integer fading_mu, got {link.fading_mu}")
    if x <= 0:
        return 0.0
    if math.isinf(x):
        return 1.0
    a, mu, hh = link.fading_alpha, int(link.fading_mu), link.fading_hhat
    zeta, s_o = mp.zeta, mp.s_o
    rho = mean_snr(link, env)
    if literal:
        total = _bm_sum_literal(x, a, mu, hh, zeta, s_o, rho, diag)
        if not math.isfinite(total):
            # the literal form has broken down numerically; report it, do not guess
            if diag is not None:
                diag.nonconverged += 1
            return math.nan
        return _clamp(1.0 - total, diag)
    log_y = 0.5 * (math.log(x) - math.log(rho))  # log sqrt(x / rho)
    log_w = math.log(mu) + a * (log_y - math.log(s_o) - math.log(hh))
    w = math.exp(log_w)
    log_c0 = math.log(zeta) - math.log(a) - w
    total = 0.0
    for k in range(mu):
        res = upper_inc_gamma_scaled_result((a * k - zeta) / a, w)
        if not res.converged and diag is not None:
            diag.nonconverged += 1
        total += res.value * math.exp(log_c0 + k * log_w - math.lgamma(k + 1.0))
    return _clamp(1.0 - total, diag)


def cdf_link_quadrature(x: float, link: LinkConfig, env: Environment,
                        diag: Optional[Diagnostics] = None) -> float:
    """Reference CDF of a misaligned hop: int_0^S F_f(y / t) f_m(t) dt.

    Integrated after the change of variable t = S exp(-s / zeta), i.e. over
    the exponential of the misalignment log-quantile, so the integrand is
    F_f((y / S) exp(s / zeta)) exp(-s) on [0, inf) for every zeta.
    """
    mp = link.misalignment
    if mp is None:
        raise ValueError("link has no misalignment parameters")
    if x <= 0:
        return 0.0
    y_over_s = math.sqrt(x / mean_snr(link, env)) / mp.s_o
    inv_zeta = 1.0 / mp.zeta

    def integrand(s: float) -> float:
        e = math.exp(-s)
        if e == 0.0:
            return 0.0
        arg = s * inv_zeta
        if arg > 700.0:
            return e
        return fading_cdf(y_over_s * math.exp(arg), link) * e

    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", integrate.IntegrationWarning)
        val, _ = integrate.quad(integrand, 0.0, math.inf, epsabs=QUAD_EPSABS, epsrel=QUAD_EPSREL, limit=200)
    if diag is not None:
        diag.quad_warnings += sum(issubclass(w.category, integrate.IntegrationWarning) for w in caught)
    return _clamp(val, diag)


def cdf_link(x: float, link: LinkConfig, env: Environment, method: Method,
             diag: Optional[Diagnostics] = None) -> float:
    """Per-hop CDF for the analytic methods, dispatched on misalignment presence."""
    method = Method(method)
    if not link.has_misalignment:
        return cdf_link_nobm(x, link, env)
    if method is Method.CLOSED_FORM:
        return cdf_link_bm_closed(x, link, env, diag)
    if method is Method.QUADRATURE:
        return cdf_link_quadrature(x, link, env, diag)
    raise ValueError(f"no per-hop CDF for method {method.value}")


def combine_links(f1: float, f2: float) -> float:
    """1 - (1 - F1)(1 - F2), written to keep relative accuracy for small CDFs."""
    for f in (f1, f2):
        if not 0.0 <= f <= 1.0:
            raise ValueError(f"CDF value outside [0, 1]: {f}")
    if f1 == 1.0 or f2 == 1.0:
        return 1.0
    return min(f1 + f2 - f1 * f2, 1.0)


def outage_probability(s: Scenario, method: Method | str = Method.QUADRATURE,
                       mc: Optional["McConfig"] = None) -> OutageResult:
    """Probability that min(rho_1, rho_2) <= snr_threshold."""
    method = Method(method)
    if method is Method.MONTE_CARLO:
        from .mcsim import McConfig, estimate_op

        est = estimate_op(s, mc if mc is not None else McConfig())
        return OutageResult(est.op_hat, method, stderr=est.stderr)
    diag = Diagnostics()
    x = s.snr_threshold
    f1 = cdf_link(x, s.link1, s.environment, method, diag)
    f2 = cdf_link(x, s.link2, s.environment, method, diag)
    return OutageResult(combine_links(f1, f2), method, flags=tuple(diag.flags()))
