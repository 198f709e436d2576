"""Binomial intervals, a 2x2 chi-square test and the two-sample KS test.

Critical values are tabulated at fixed significance levels; no p-values.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import DomainError

# chi-square, one degree of freedom
CHI2_DF1 = {0.05: 3.841458820694124, 0.01: 6.6348966010212145, 0.001: 10.827566170662733}
# asymptotic two-sample KS coefficients c(alpha)
KS_C = {0.05: 1.358, 0.01: 1.628, 0.001: 1.949}
# two-sided normal quantiles
Z = {0.95: 1.959963984540054, 0.99: 2.5758293035489004, 0.999: 3.2905267314919255}


@dataclass(frozen=True)
class TestResult:
    """``passed`` is ``statistic <= threshold`` for every test here."""

    __test__ = False

    statistic: float
    threshold: float
    passed: bool
    significance: float
    degenerate: bool = False


def wilson_interval(successes: int, trials: int, z: float = Z[0.999]) -> tuple[float, float]:
    if not (trials >= 1 and 0 <= successes <= trials and z > 0):
        raise DomainError(f"bad arguments successes={successes}, trials={trials}, z={z}")
    p = successes / trials
    z2 = z * z
    denom = 1 + z2 / trials
    center = (p + z2 / (2 * trials)) / denom
    half = z * math.sqrt(p * (1 - p) / trials + z2 / (4 * trials * trials)) / denom
    lo = 0.0 if successes == 0 else max(0.0, center - half)
    hi = 1.0 if successes == trials else min(1.0, center + half)
    return lo, hi


def chi_square_independence_2x2(table, significance: float = 0.001) -> TestResult:
    """Pearson statistic for a 2x2 contingency table, without continuity correction.

    A table with an empty row or column has no information about
    association; it passes with statistic 0 and ``degenerate=True``.
    """
    if significance not in CHI2_DF1:
        raise DomainError(f"significance must be one of {sorted(CHI2_DF1)}")
    obs = np.asarray(table, dtype=float)
    if obs.shape != (2, 2) or (obs < 0).any() or obs.sum() < 1:
        raise DomainError("need a 2x2 table of non-negative counts with positive total")
    threshold = CHI2_DF1[significance]
    rows, cols, total = obs.sum(axis=1), obs.sum(axis=0), obs.sum()
    if (rows == 0).any() or (cols == 0).any():
        return TestResult(0.0, threshold, True, significance, degenerate=True)
    expected = np.outer(rows, cols) / total
    stat = float(((obs - expected) ** 2 / expected).sum())
    return TestResult(stat, threshold, stat <= threshold, significance)


def ks_two_sample(a, b, significance: float = 0.05) -> TestResult:
    if significance not in KS_C:
        raise DomainError(f"significance must be one of {sorted(KS_C)}")
    a = np.sort(np.asarray(a, dtype=float))
    b = np.sort(np.asarray(b, dtype=float))
    if a.size == 0 or b.size == 0:
        raise DomainError("both samples must be nonempty")
    grid = np.concatenate([a, b])
    fa = np.searchsorted(a, grid, side="right") / a.size
    fb = np.searchsorted(b, grid, side="right") / b.size
    stat = float(np.max(np.abs(fa - fb)))
    threshold = KS_C[significance] * math.sqrt((a.size + b.size) / (a.size * b.size))
    return TestResult(stat, threshold, stat <= threshold, significance)
