"""Outage analysis of dual-hop decode-and-forward THz relay links.

Hops combine deterministic path gain (free-space spreading plus molecular
absorption), alpha-mu fading and power-law pointing misalignment.
"""

__version__ = "0.1.0"

from .atmosphere import Environment, absorption_coefficient, mixing_ratio, saturated_vapor_pressure
from .channel import (HopStatistics, LinkConfig, MisalignmentParams, fading_cdf, fading_pdf,
                      hop_statistics, mean_snr, misalignment_cdf, path_gain, zeta_from_geometry)
from .mcsim import McConfig, McEstimate, estimate_op
from .outage import (Method, OutageResult, Scenario, cdf_link_bm_closed, cdf_link_nobm,
                     cdf_link_quadrature, combine_links, outage_probability)

__all__ = [
    "Environment",
    "absorption_coefficient",
    "mixing_ratio",
    "saturated_vapor_pressure",
    "HopStatistics",
    "LinkConfig",
    "MisalignmentParams",
    "fading_cdf",
    "fading_pdf",
    "hop_statistics",
    "mean_snr",
    "misalignment_cdf",
    "path_gain",
    "zeta_from_geometry",
    "McConfig",
    "McEstimate",
    "estimate_op",
    "Method",
    "OutageResult",
    "Scenario",
    "cdf_link_bm_closed",
    "cdf_link_nobm",
    "cdf_link_quadrature",
    "combine_links",
    "outage_probability",
]
