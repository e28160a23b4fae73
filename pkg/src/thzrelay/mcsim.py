"""Seeded Monte-Carlo estimate of the outage probability.

Trials are split into ``chunks``; chunk ``i`` draws from its own Philox
stream keyed by ``SeedSequence([seed, i])``. Counts are reduced by summation,
so the estimate depends only on ``(seed, chunks, trials)`` and not on how many
workers run the chunks.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .channel import LinkConfig, MisalignmentParams, mean_snr
from .outage import Scenario

__all__ = [
    "McConfig",
    "McEstimate",
    "chunk_rng",
    "chunk_sizes",
    "sample_fading",
    "sample_misalignment",
    "estimate_op",
]

# samples drawn per block inside a chunk; part of the stream layout, so fixed
BLOCK = 1 << 20


@dataclass(frozen=True)
class McConfig:
    trials: int = 1_000_000
    seed: int = 0
    chunks: int = 8

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be a positive integer")
        if self.chunks < 1:
            raise ValueError("chunks must be a positive integer")
        if not 0 <= self.seed < 2 ** 64:
            raise ValueError("seed must be a 64-bit unsigned integer")


@dataclass(frozen=True)
class McEstimate:
    op_hat: float
    stderr: float
    trials_used: int


def chunk_rng(seed: int, index: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, index])))


def chunk_sizes(trials: int, chunks: int) -> list[int]:
    base, extra = divmod(trials, chunks)
    return [base + (i < extra) for i in range(chunks)]


def sample_fading(rng: np.random.Generator, link: LinkConfig, size: int) -> np.ndarray:
    """alpha-mu envelope samples: hhat * (G / mu)**(1/alpha), G ~ Gamma(mu, 1)."""
    g = rng.standard_gamma(link.fading_mu, size)
    return link.fading_hhat * (g / link.fading_mu) ** (1.0 / link.fading_alpha)


def sample_misalignment(rng: np.random.Generator, mp: MisalignmentParams, size: int) -> np.ndarray:
    """Inverse-CDF draw S_o * U**(1/zeta), U uniform on (0, 1]."""
    u = 1.0 - rng.random(size)
    return mp.s_o * u ** (1.0 / mp.zeta)


def _hop_snr(rng, link, rho_bar, n):
    h = sample_fading(rng, link, n)
    if link.misalignment is not None:
        h *= sample_misalignment(rng, link.misalignment, n)
    return rho_bar * h * h


def _count_chunk(s: Scenario, rho1: float, rho2: float, index: int, n: int, seed: int) -> int:
    rng = chunk_rng(seed, index)
    outages = 0
    done = 0
    while done < n:
        m = min(BLOCK, n - done)
        snr = np.minimum(_hop_snr(rng, s.link1, rho1, m), _hop_snr(rng, s.link2, rho2, m))
        outages += int(np.count_nonzero(snr <= s.snr_threshold))
        done += m
    return outages


def estimate_op(s: Scenario, mc: McConfig, workers: Optional[int] = None,
                snr_threshold: Optional[float] = None) -> McEstimate:
    """Fraction of trials with min(rho_1, rho_2) <= threshold.

    ``snr_threshold`` overrides the scenario threshold (0 is allowed here).
    With zero (or all) trials in outage the standard error is the
    rule-of-three ceiling 3 / N.
    """
    if snr_threshold is not None:
        s = _with_threshold(s, snr_threshold)
    rho1 = mean_snr(s.link1, s.environment)
    rho2 = mean_snr(s.link2, s.environment)
    sizes = chunk_sizes(mc.trials, mc.chunks)
    args = [(s, rho1, rho2, i, n, mc.seed) for i, n in enumerate(sizes) if n > 0]
    if workers == 1 or len(args) == 1:
        counts = [_count_chunk(*a) for a in args]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            counts = list(pool.map(lambda a: _count_chunk(*a), args))
    total = sum(counts)
    p = total / mc.trials
    if 0 < total < mc.trials:
        stderr = math.sqrt(p * (1.0 - p) / mc.trials)
    else:
        stderr = 3.0 / mc.trials  # rule of three when every trial agrees
    return McEstimate(op_hat=p, stderr=stderr, trials_used=mc.trials)


class _ThresholdView:
    """Scenario stand-in that allows a zero threshold (Scenario requires > 0)."""

    def __init__(self, s: Scenario, threshold: float):
        self.link1, self.link2, self.environment = s.link1, s.link2, s.environment
        self.snr_threshold = threshold


def _with_threshold(s: Scenario, threshold: float):
    if threshold < 0:
        raise ValueError("threshold must be nonnegative")
    return _ThresholdView(s, threshold)
