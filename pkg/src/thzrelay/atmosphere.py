"""Molecular absorption in the 275-425 GHz window.

The absorption coefficient is the sum of two water-vapour resonance terms and
a dry-air cubic in frequency. The resonance line shape comes in two flavours:

``"squared"``
    A_k / (B_k + (f/c - delta_k)**2), the Lorentzian form of the underlying
    fitted model. This is the default.
``"printed"``
    A_k / (B_k + (f/c - delta_k)), the unsquared variant. Its denominator
    crosses zero inside the band, so it yields a pole and negative values;
    it is kept for comparison only.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

__all__ = [
    "SPEED_OF_LIGHT",
    "BAND",
    "AbsorptionConstants",
    "CONSTANTS",
    "Environment",
    "OutOfBandWarning",
    "saturated_vapor_pressure",
    "mixing_ratio",
    "absorption_terms",
    "absorption_coefficient",
    "LINE_SHAPES",
]

SPEED_OF_LIGHT = 299_792_458.0  # m/s
BAND = (275e9, 425e9)  # Hz
LINE_SHAPES = ("squared", "printed")


@dataclass(frozen=True)
class AbsorptionConstants:
    g1: float = 0.2205
    g2: float = 0.1303
    g3: float = 0.0294
    g4: float = 2.014
    g5: float = 0.1702
    g6: float = 0.0303
    g7: float = 0.4093
    g8: float = 0.0925
    g9: float = 0.537
    g10: float = 0.0956
    delta1: float = 10.835  # cm^-1
    delta2: float = 12.664  # cm^-1
    p0: float = -6.36e-3
    p1: float = 9.06e-14  # s
    p2: float = -3.94e-25  # s^2
    p3: float = 5.54e-37  # s^3
    kappa1: float = 6.1121  # hPa
    kappa2: float = 1.0007
    kappa3: float = 3.46e-6  # 1/hPa
    kappa4: float = 17.502
    kappa5: float = 273.15  # K
    kappa6: float = 32.18  # K


CONSTANTS = AbsorptionConstants()


class OutOfBandWarning(UserWarning):
    """Frequency lies outside the band the absorption fit was made for."""


@dataclass(frozen=True)
class Environment:
    """Ambient conditions. Temperature in K, pressure in hPa, humidity as a fraction."""

    temperature: float = 296.0
    pressure: float = 1013.25
    relative_humidity: float = 0.5

    def __post_init__(self):
        if not self.temperature > 100.0:
            raise ValueError(f"temperature must exceed 100 K, got {self.temperature}")
        if not self.pressure > 0.0:
            raise ValueError(f"pressure must be positive, got {self.pressure}")
        if not 0.0 <= self.relative_humidity <= 1.0:
            raise ValueError(f"relative_humidity must lie in [0, 1], got {self.relative_humidity}")


def saturated_vapor_pressure(env: Environment, const: AbsorptionConstants = CONSTANTS) -> float:
    """Buck-type saturation vapour pressure in hPa, including the pressure enhancement."""
    t = env.temperature
    if t <= const.kappa6:
        raise ValueError(f"temperature {t} K is at or below the pole {const.kappa6} K")
    enhancement = const.kappa2 + const.kappa3 * env.pressure
    return const.kappa1 * enhancement * math.exp(const.kappa4 * (t - const.kappa5) / (t - const.kappa6))


def mixing_ratio(env: Environment, const: AbsorptionConstants = CONSTANTS) -> float:
    """Volume mixing ratio of water vapour."""
    if env.pressure <= 0:
        raise ValueError("pressure must be positive")
    return env.relative_humidity * saturated_vapor_pressure(env, const) / env.pressure


def _dry_polynomial(f: float, const: AbsorptionConstants) -> float:
    return ((const.p3 * f + const.p2) * f + const.p1) * f + const.p0


def absorption_terms(f: float, env: Environment, line_shape: str = "squared",
                     const: AbsorptionConstants = CONSTANTS) -> tuple[float, float, float]:
    """The three additive contributions (u1, u2, u3) to the absorption coefficient, 1/m."""
    if line_shape not in LINE_SHAPES:
        raise ValueError(f"line_shape must be one of {LINE_SHAPES}, got {line_shape!r}")
    if not BAND[0] <= f <= BAND[1]:
        warnings.warn(f"frequency {f:.6g} Hz outside {BAND[0]:.3g}-{BAND[1]:.3g} Hz",
                      OutOfBandWarning, stacklevel=2)
    v = mixing_ratio(env, const)
    a1 = const.g1 * v * (const.g2 * v + const.g3)
    a2 = const.g4 * v * (const.g5 * v + const.g6)
    b1 = (const.g7 * v + const.g8) ** 2
    b2 = (const.g9 * v + const.g10) ** 2
    wavenumber = f / (100.0 * SPEED_OF_LIGHT)  # cm^-1
    d1 = wavenumber - const.delta1
    d2 = wavenumber - const.delta2
    if line_shape == "squared":
        d1, d2 = d1 * d1, d2 * d2
    u1 = a1 / (b1 + d1) if a1 != 0.0 else 0.0
    u2 = a2 / (b2 + d2) if a2 != 0.0 else 0.0
    return u1, u2, _dry_polynomial(f, const)


def absorption_coefficient(f: float, env: Environment, line_shape: str = "squared",
                           const: AbsorptionConstants = CONSTANTS) -> float:
    """Molecular absorption coefficient beta(f) in 1/m.

    Frequencies outside 275-425 GHz are evaluated anyway, with an
    :class:`OutOfBandWarning`.
    """
    u1, u2, u3 = absorption_terms(f, env, line_shape, const)
    return (u1 + u2) + u3
