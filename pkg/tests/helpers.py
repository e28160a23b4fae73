"""Shared scenario builders for the test suite."""

import dataclasses
import math

import mpmath

from thzrelay.atmosphere import Environment
from thzrelay.channel import LinkConfig, MisalignmentParams, mean_snr, path_gain

ENV = Environment()


def link_with_mean_snr(rho: float, zeta=None, s_o=1.0, env=ENV, **kw) -> LinkConfig:
    """LinkConfig whose mean SNR equals ``rho`` (budget solved from the path gain)."""
    base = LinkConfig(**kw)
    g = path_gain(base, env)
    budget = 10 * math.log10(rho) - 20 * math.log10(g)
    mp = None if zeta is None else MisalignmentParams(zeta=zeta, s_o=s_o)
    link = dataclasses.replace(base, tx_power_over_noise_db=budget, misalignment=mp)
    assert math.isclose(mean_snr(link, env), rho, rel_tol=1e-12)
    return link


def mp_link_cdf(x, alpha, mu, hhat, rho, zeta=None, s_o=1.0, dps=30):
    """Arbitrary-precision per-hop SNR CDF, straight from the fading and misalignment laws."""
    with mpmath.workdps(dps):
        x, alpha, mu, hhat, rho = (mpmath.mpf(v) for v in (x, alpha, mu, hhat, rho))
        y = mpmath.sqrt(x / rho)

        def ff(r):
            return mpmath.gammainc(mu, 0, mu * (r / hhat) ** alpha, regularized=True)

        if zeta is None:
            return float(ff(y))
        zeta, s_o = mpmath.mpf(zeta), mpmath.mpf(s_o)
        # t = S_o u^(1/zeta), u uniform on (0, 1)
        return float(mpmath.quad(lambda u: ff(y / (s_o * u ** (1 / zeta))), [0, 0.5, 1]))
