"""Best fixed convex weight in hindsight.

For a fixed weight beta the total loss over the stream is a quadratic in
beta, fully determined by three running sums.  With d = yhat1 - yhat2 and
r = y - yhat2,

    loss(beta) = sum(r^2) - 2*beta*sum(r*d) + beta^2*sum(d^2)

so the stats are additive under concatenation and the minimizer over [0, 1]
is the clamped ratio sum(r*d) / sum(d^2).  A brute-force grid search over
beta is kept as an independent check; it evaluates residuals directly and
never touches the closed form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, NamedTuple

import numpy as np

from .mixture import SignalSample

__all__ = [
    "OracleStats",
    "BestBeta",
    "GridBest",
    "accumulate",
    "merge",
    "subtract",
    "stats_from",
    "loss_at_beta",
    "best_beta",
    "grid_best_beta",
]


@dataclass(frozen=True)
class OracleStats:
    """Sufficient statistics of the hindsight loss quadratic."""

    n: int = 0
    s_dd: float = 0.0
    s_rd: float = 0.0
    s_rr: float = 0.0


def accumulate(stats: OracleStats, sample: SignalSample) -> OracleStats:
    """Fold one sample into the statistics."""
    d = sample.yhat1 - sample.yhat2
    r = sample.y - sample.yhat2
    return OracleStats(
        n=stats.n + 1,
        s_dd=stats.s_dd + d * d,
        s_rd=stats.s_rd + r * d,
        s_rr=stats.s_rr + r * r,
    )


def merge(a: OracleStats, b: OracleStats) -> OracleStats:
    """Statistics of the concatenation of two streams."""
    return OracleStats(a.n + b.n, a.s_dd + b.s_dd, a.s_rd + b.s_rd, a.s_rr + b.s_rr)


def subtract(total: OracleStats, prefix: OracleStats) -> OracleStats:
    """Statistics of a suffix, given the whole stream and a prefix of it."""
    if prefix.n > total.n:
        raise ValueError(f"prefix has {prefix.n} samples but the total only {total.n}")
    return OracleStats(
        total.n - prefix.n,
        total.s_dd - prefix.s_dd,
        total.s_rd - prefix.s_rd,
        total.s_rr - prefix.s_rr,
    )


def stats_from(samples: Iterable[SignalSample]) -> OracleStats:
    stats = OracleStats()
    for sample in samples:
        stats = accumulate(stats, sample)
    return stats


def loss_at_beta(stats: OracleStats, beta: float) -> float:
    """Total squared loss of the fixed weight ``beta`` on the summarized stream."""
    if not 0.0 <= beta <= 1.0:
        raise ValueError(f"weight must lie in [0, 1], got {beta}")
    value = stats.s_rr - 2.0 * beta * stats.s_rd + beta * beta * stats.s_dd
    # the quadratic is a sum of squares; clamp float cancellation noise
    return max(value, 0.0)


class BestBeta(NamedTuple):
    beta: float
    loss: float
    degenerate: bool


def best_beta(stats: OracleStats) -> BestBeta:
    """Minimizer of the hindsight loss over [0, 1].

    When the experts coincide everywhere (s_dd == 0) every weight is
    optimal; the midpoint is reported with ``degenerate`` set.
    """
    if stats.n < 1:
        raise ValueError("need at least one sample")
    if stats.s_dd <= 0.0:
        return BestBeta(0.5, loss_at_beta(stats, 0.5), True)
    beta = min(max(stats.s_rd / stats.s_dd, 0.0), 1.0)
    return BestBeta(beta, loss_at_beta(stats, beta), False)


class GridBest(NamedTuple):
    beta: float
    loss: float


def _beta_grid(resolution: float) -> np.ndarray:
    count = math.floor(1.0 / resolution + 1e-9)
    grid = np.minimum(np.arange(count + 1) * resolution, 1.0)
    if grid[-1] < 1.0:
        grid = np.append(grid, 1.0)
    return grid


def grid_best_beta(samples, resolution: float) -> GridBest:
    """Brute-force search over the weight grid {0, resolution, ..., 1}.

    Evaluates the residual sum directly for every grid point; ties go to
    the smallest weight.  Independent of :func:`best_beta` by construction.
    """
    samples = list(samples)
    if not samples:
        raise ValueError("sequence must be non-empty")
    if not 0.0 < resolution <= 0.1:
        raise ValueError(f"resolution must lie in (0, 0.1], got {resolution}")
    grid = _beta_grid(resolution)
    y = np.array([s.y for s in samples])
    y1 = np.array([s.yhat1 for s in samples])
    y2 = np.array([s.yhat2 for s in samples])
    losses = np.empty(len(grid))
    chunk = max(1, int(2_000_000 // max(len(samples), 1)))
    for start in range(0, len(grid), chunk):
        betas = grid[start : start + chunk, None]
        residual = y[None, :] - (betas * y1[None, :] + (1.0 - betas) * y2[None, :])
        losses[start : start + chunk] = np.einsum("ij,ij->i", residual, residual)
    i = int(np.argmin(losses))
    return GridBest(float(grid[i]), float(losses[i]))
