"""Displacement profiles and their Poisson-Dirichlet scaling limit.

After relabelling seat ``j <= k`` as ``n + j``, passenger ``i`` is displaced
by ``S_i - i >= 0``. Each lost passenger starts a chain of displacements;
normalised by ``n`` and sorted, a chain's displacements approach a
Poisson-Dirichlet(1) vector, which :func:`stick_breaking_sample` draws by
uniform stick-breaking.
"""

from __future__ import annotations

from dataclasses import dataclass

import numba
import numpy as np

from .core import DomainError, Instance, NotConsecutive, Outcome, relabel
from .forward import _random, _trial_state, run_batch
from .rng import SplitMix64, finalize
from .stats import TestResult, ks_two_sample

ORACLE_SALT = 0x5EA7AB1E0DDC0FFE
MAX_PIECES = 64


@dataclass(frozen=True)
class DisplacementProfile:
    chain: int
    n: int
    displacements: tuple[int, ...]

    @property
    def components(self) -> tuple[float, ...]:
        return tuple(d / self.n for d in sorted(self.displacements, reverse=True))

    @property
    def largest(self) -> float:
        return max(self.displacements) / self.n


def displacement_profile(instance: Instance, outcome: Outcome) -> list[DisplacementProfile]:
    """One profile per lost passenger, following that passenger's displacement chain."""
    if not instance.is_consecutive:
        raise NotConsecutive("displacement profiles need lost = {1..k}")
    n = instance.n
    out = []
    for i in range(1, instance.k + 1):
        passenger = i
        ds = []
        while True:
            s = relabel(instance, outcome.seat(passenger))
            if s <= passenger:
                raise ValueError(f"passenger {passenger} moved left; not a valid outcome")
            ds.append(s - passenger)
            if s > n:
                break
            passenger = s
        out.append(DisplacementProfile(i, n, tuple(ds)))
    return out


@dataclass(frozen=True)
class StickBreakingSample:
    pieces: tuple[float, ...]
    truncation_mass: float

    @property
    def components(self) -> tuple[float, ...]:
        return tuple(sorted(self.pieces, reverse=True))


def stick_breaking_sample(rng: SplitMix64, epsilon: float = 1e-9) -> StickBreakingSample:
    """Break pieces ``V_i * prod_{j<i} (1 - V_j)`` until less than ``epsilon`` is left."""
    if not 0 < epsilon < 1:
        raise DomainError("epsilon must lie in (0, 1)")
    rest = 1.0
    pieces = []
    while rest >= epsilon and len(pieces) < MAX_PIECES:
        v = rng.random()
        pieces.append(v * rest)
        rest *= 1.0 - v
    return StickBreakingSample(tuple(pieces), rest)


@numba.njit(cache=True, nogil=True)
def _stick_kernel(seed, t0, t1, epsilon, out):
    state = np.empty(1, np.uint64)
    for t in range(t0, t1):
        state[0] = _trial_state(seed, t)
        rest = 1.0
        best = 0.0
        count = 0
        while rest >= epsilon and count < 64:
            v = _random(state)
            piece = v * rest
            if piece > best:
                best = piece
            rest *= 1.0 - v
            count += 1
        out[t - t0] = best


def stick_breaking_largest(samples: int, seed: int, epsilon: float = 1e-9) -> np.ndarray:
    """Largest piece of ``samples`` stick-breaking draws; sample ``t`` uses trial stream ``t``."""
    out = np.empty(samples, dtype=np.float64)
    _stick_kernel(np.uint64(seed % (1 << 64)), 0, samples, epsilon, out)
    return out


def oracle_seed(seed: int) -> int:
    return finalize((seed ^ ORACLE_SALT) % (1 << 64))


@dataclass(frozen=True)
class ConvergenceRow:
    n: int
    k: int
    trials: int
    ks_distance: float
    mean_largest: float
    var_largest: float
    max_cross_corr: float | None
    ks_test: TestResult

    COLUMNS = ("n", "k", "trials", "ks_distance", "mean_largest", "var_largest", "max_cross_corr")

    def as_record(self) -> dict:
        return {c: getattr(self, c) for c in self.COLUMNS}


@dataclass(frozen=True)
class ConvergenceReport:
    rows: list[ConvergenceRow]
    oracle_mean_largest: float
    seed: int


def largest_components(n: int, k: int, trials: int, seed: int, workers: int = 1) -> np.ndarray:
    """``(trials, k)`` array of each chain's largest normalised displacement."""
    batch = run_batch(Instance.consecutive(n, k), trials, seed, workers, record_largest=True)
    return batch.largest / n


def convergence_report(
    n_values: list[int],
    k: int,
    trials: int,
    seed: int,
    workers: int = 1,
    significance: float = 0.01,
    epsilon: float = 1e-9,
) -> ConvergenceReport:
    """Compare chain-wise largest displacements with the stick-breaking oracle for each n.

    All chains are pooled for the KS distance, mean and variance. The
    oracle draws ``trials * k`` samples from its own seed stream.
    """
    if k < 1 or trials < 2:
        raise DomainError("need k >= 1 and trials >= 2")
    for n in n_values:
        if n < 10 * k:
            raise DomainError(f"n={n} is below 10*k={10 * k}")
    oracle = stick_breaking_largest(trials * k, oracle_seed(seed), epsilon)
    rows = []
    for n in n_values:
        largest = largest_components(n, k, trials, seed, workers)
        pooled = largest.ravel()
        ks = ks_two_sample(pooled, oracle, significance)
        cross = None
        if k > 1:
            corr = np.corrcoef(largest, rowvar=False)
            cross = float(np.max(np.abs(corr[~np.eye(k, dtype=bool)])))
        rows.append(
            ConvergenceRow(
                n=n,
                k=k,
                trials=trials,
                ks_distance=ks.statistic,
                mean_largest=float(pooled.mean()),
                var_largest=float(pooled.var(ddof=1)),
                max_cross_corr=cross,
                ks_test=ks,
            )
        )
    return ConvergenceReport(rows, float(oracle.mean()), seed)
