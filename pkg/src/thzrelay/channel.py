"""Per-hop channel: deterministic path gain, alpha-mu fading, pointing misalignment.

The hop SNR is ``mean_snr * (h_f * h_m)**2`` where ``mean_snr`` folds the
transmit power-to-noise budget and the squared deterministic path gain.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

from .atmosphere import SPEED_OF_LIGHT, Environment, absorption_coefficient
from .specfun import gammainc_p

__all__ = [
    "MisalignmentParams",
    "LinkConfig",
    "HopStatistics",
    "db_to_linear",
    "zeta_from_geometry",
    "gaussian_beam_geometry",
    "path_gain",
    "fading_pdf",
    "fading_cdf",
    "misalignment_pdf",
    "misalignment_cdf",
    "mean_snr",
    "hop_statistics",
]


def db_to_linear(value_db: float) -> float:
    return 10.0 ** (value_db / 10.0)


def zeta_from_geometry(w: float, sigma_s: float) -> float:
    """Misalignment shape w^2 / (4 sigma_s^2) from beam width and jitter std (both m)."""
    if not (w > 0 and sigma_s > 0):
        raise ValueError("beam width and jitter standard deviation must be positive")
    return w * w / (4.0 * sigma_s * sigma_s)


def gaussian_beam_geometry(aperture_radius: float, beam_waist: float) -> tuple[float, float]:
    """Collected fraction and equivalent beam width for a circular aperture in a Gaussian beam.

    Experimental: the default scenarios never use it. Returns ``(s_o, w_eq)``
    with ``s_o = erf(nu)**2`` and
    ``w_eq**2 = w**2 * sqrt(pi) * erf(nu) / (2 nu exp(-nu**2))``,
    ``nu = sqrt(pi / 2) * a / w``.
    """
    if not (aperture_radius > 0 and beam_waist > 0):
        raise ValueError("aperture radius and beam waist must be positive")
    nu = math.sqrt(math.pi / 2.0) * aperture_radius / beam_waist
    e = math.erf(nu)
    w_eq2 = beam_waist ** 2 * math.sqrt(math.pi) * e / (2.0 * nu * math.exp(-nu * nu))
    return e * e, math.sqrt(w_eq2)


@dataclass(frozen=True)
class MisalignmentParams:
    """Power-law misalignment on ``[0, s_o]`` with shape ``zeta``.

    Use :meth:`from_geometry` to derive ``zeta`` from beam width and jitter.
    """

    zeta: float
    s_o: float = 1.0
    derived_from: Optional[tuple[float, float]] = None

    def __post_init__(self):
        if not self.zeta > 0:
            raise ValueError(f"zeta must be positive, got {self.zeta}")
        if not 0.0 < self.s_o <= 1.0:
            raise ValueError(f"s_o must lie in (0, 1], got {self.s_o}")
        if self.derived_from is not None:
            w, sigma = self.derived_from
            if self.zeta != zeta_from_geometry(w, sigma):
                raise ValueError("zeta is inconsistent with derived_from geometry")

    @classmethod
    def from_geometry(cls, beam_width: float, jitter_sigma: float, s_o: float = 1.0) -> "MisalignmentParams":
        return cls(zeta=zeta_from_geometry(beam_width, jitter_sigma), s_o=s_o,
                   derived_from=(beam_width, jitter_sigma))

    @property
    def jitter_sigma(self) -> Optional[float]:
        return None if self.derived_from is None else self.derived_from[1]


@dataclass(frozen=True)
class LinkConfig:
    """One hop. Frequency in Hz, distance in m, gains in dBi, budget in dB.

    ``fading_mu`` may be non-integer; only the closed-form expressions insist
    on an integer.
    """

    frequency: float = 275e9
    distance: float = 10.0
    tx_gain_db: float = 55.0
    rx_gain_db: float = 55.0
    fading_alpha: float = 1.0
    fading_mu: float = 3
    fading_hhat: float = 1.0
    misalignment: Optional[MisalignmentParams] = None
    tx_power_over_noise_db: float = 50.0

    def __post_init__(self):
        for name in ("frequency", "distance", "fading_alpha", "fading_mu", "fading_hhat"):
            value = getattr(self, name)
            if not (value > 0 and math.isfinite(value)):
                raise ValueError(f"{name} must be positive and finite, got {value}")

    @property
    def has_misalignment(self) -> bool:
        return self.misalignment is not None

    @property
    def mu_is_integer(self) -> bool:
        return float(self.fading_mu).is_integer()


@dataclass(frozen=True)
class HopStatistics:
    path_gain: float
    mean_snr: float


def path_gain(link: LinkConfig, env: Environment, beta: Optional[float] = None) -> float:
    """Deterministic amplitude gain (c sqrt(G_t G_r) / (4 pi f d)) exp(-beta d / 2).

    ``beta`` overrides the molecular absorption coefficient (1/m).
    """
    if beta is None:
        beta = absorption_coefficient(link.frequency, env)
    g = math.sqrt(db_to_linear(link.tx_gain_db) * db_to_linear(link.rx_gain_db))
    free_space = SPEED_OF_LIGHT * g / (4.0 * math.pi * link.frequency * link.distance)
    return free_space * math.exp(-0.5 * beta * link.distance)


def mean_snr(link: LinkConfig, env: Environment, beta: Optional[float] = None) -> float:
    return db_to_linear(link.tx_power_over_noise_db) * path_gain(link, env, beta) ** 2


def hop_statistics(link: LinkConfig, env: Environment) -> HopStatistics:
    g = path_gain(link, env)
    return HopStatistics(path_gain=g, mean_snr=db_to_linear(link.tx_power_over_noise_db) * g * g)


def fading_pdf(x: float, link: LinkConfig) -> float:
    """Generalized-Gamma (alpha-mu) envelope density."""
    if x < 0:
        return 0.0
    a, mu, hh = link.fading_alpha, link.fading_mu, link.fading_hhat
    if x == 0:
        am = a * mu
        if am > 1:
            return 0.0
        if am < 1:
            return math.inf
        return a * mu ** mu / (hh ** am * math.gamma(mu))
    log_f = (math.log(a) + mu * math.log(mu) + (a * mu - 1.0) * math.log(x)
             - a * mu * math.log(hh) - math.lgamma(mu) - mu * (x / hh) ** a)
    return math.exp(log_f)


def fading_cdf(x: float, link: LinkConfig) -> float:
    """Envelope CDF, 1 - Gamma(mu, mu (x/hhat)^alpha) / Gamma(mu), as P(mu, .)."""
    if x <= 0:
        return 0.0
    if math.isinf(x):
        return 1.0
    mu = link.fading_mu
    log_arg = math.log(mu) + link.fading_alpha * (math.log(x) - math.log(link.fading_hhat))
    if log_arg > 700.0:
        return 1.0
    return gammainc_p(mu, math.exp(log_arg))


def misalignment_pdf(x: float, mp: MisalignmentParams) -> float:
    if x < 0 or x > mp.s_o:
        return 0.0
    return mp.zeta / mp.s_o ** mp.zeta * x ** (mp.zeta - 1.0)


def misalignment_cdf(x: float, mp: MisalignmentParams) -> float:
    if x <= 0:
        return 0.0
    if x >= mp.s_o:
        return 1.0
    return (x / mp.s_o) ** mp.zeta
