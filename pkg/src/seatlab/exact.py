"""Exact rational probabilities for the boarding process.

Two independent routes are provided. :func:`enumerate_outcomes` expands
every uniform choice depth-first and merges leaves by outcome. The event
functions propagate a distribution over occupied-seat bitmasks passenger
by passenger (the process is Markov in that state), which stays small for
the instances of interest and never lists outcomes.

Seat ``j`` is bit ``j - 1`` of a mask. No floating point is used here.
"""

from __future__ import annotations

import os
from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Callable, Iterable

from .core import DomainError, Instance, Outcome, TooLarge

DEFAULT_MAX_LEAVES = 10**7
DEFAULT_MAX_STATES = 10**6


def default_max_leaves() -> int:
    """Enumeration bound; ``SEATLAB_MAX_LEAVES`` overrides the default."""
    raw = os.environ.get("SEATLAB_MAX_LEAVES")
    return int(raw) if raw else DEFAULT_MAX_LEAVES


def format_rational(p: Fraction) -> str:
    return f"{p.numerator}/{p.denominator}"


def parse_rational(text: str) -> Fraction:
    num, den = text.split("/")
    return Fraction(int(num), int(den))


@dataclass(frozen=True)
class ExactDistribution:
    """Outcomes with exact probabilities, sorted by ``seat_of``."""

    entries: tuple[tuple[Outcome, Fraction], ...]

    def as_dict(self) -> dict[tuple[int, ...], Fraction]:
        return {o.seat_of: p for o, p in self.entries}

    def total(self) -> Fraction:
        return sum((p for _, p in self.entries), Fraction(0))

    def prob(self, event: Callable[[Outcome], bool]) -> Fraction:
        return sum((p for o, p in self.entries if event(o)), Fraction(0))

    def __len__(self):
        return len(self.entries)

    @classmethod
    def from_weights(cls, weights: dict[tuple[int, ...], Fraction]) -> "ExactDistribution":
        return cls(tuple((Outcome(k), weights[k]) for k in sorted(weights)))


def _chooses(instance: Instance, m: int, mask: int) -> bool:
    return m in instance.lost or bool(mask >> (m - 1) & 1)


def count_leaves(instance: Instance, max_states: int = DEFAULT_MAX_STATES) -> int:
    """Number of distinct choice sequences (decision-tree leaves)."""
    n = instance.n
    layer = {0: 1}
    for m in range(1, n + 1):
        nxt: dict[int, int] = defaultdict(int)
        for mask, c in layer.items():
            if not _chooses(instance, m, mask):
                nxt[mask | 1 << (m - 1)] += c
                continue
            for s in range(n):
                if not mask >> s & 1:
                    nxt[mask | 1 << s] += c
        if len(nxt) > max_states:
            raise TooLarge(f"leaf count needs more than {max_states} states", max_states)
        layer = nxt
    return sum(layer.values())


def enumerate_outcomes(instance: Instance, max_leaves: int | None = None) -> ExactDistribution:
    """Full outcome distribution by depth-first expansion of every choice."""
    bound = default_max_leaves() if max_leaves is None else max_leaves
    leaves = count_leaves(instance)
    if leaves > bound:
        raise TooLarge(
            f"enumeration needs {leaves} leaves, bound is {bound}", bound, leaves
        )
    n = instance.n
    weights: dict[tuple[int, ...], Fraction] = defaultdict(Fraction)
    seat_of = [0] * n

    def expand(m: int, mask: int, w: Fraction):
        if m > n:
            weights[tuple(seat_of)] += w
            return
        if not _chooses(instance, m, mask):
            seat_of[m - 1] = m
            expand(m + 1, mask | 1 << (m - 1), w)
            return
        branch = w / (n - m + 1)
        for s in range(n):
            if not mask >> s & 1:
                seat_of[m - 1] = s + 1
                expand(m + 1, mask | 1 << s, branch)

    expand(1, 0, Fraction(1))
    return ExactDistribution.from_weights(weights)


def _check_free(instance: Instance, passengers: Iterable[int]) -> frozenset[int]:
    ms = frozenset(passengers)
    bad = sorted(m for m in ms if m in instance.lost or not 1 <= m <= instance.n)
    if bad:
        raise DomainError(f"passengers {bad} are lost or out of range")
    return ms


def joint_prob(
    instance: Instance, passengers: Iterable[int], max_states: int = DEFAULT_MAX_STATES
) -> Fraction:
    """Exact probability that every passenger in ``passengers`` finds their seat taken."""
    ms = _check_free(instance, passengers)
    if not ms:
        raise DomainError("need at least one passenger")
    n = instance.n
    layer = {0: Fraction(1)}
    for m in range(1, n + 1):
        nxt: dict[int, Fraction] = defaultdict(Fraction)
        bit = 1 << (m - 1)
        for mask, p in layer.items():
            if not _chooses(instance, m, mask):
                if m in ms:
                    continue
                nxt[mask | bit] += p
                continue
            branch = p / (n - m + 1)
            for s in range(n):
                if not mask >> s & 1:
                    nxt[mask | 1 << s] += branch
        if len(nxt) > max_states:
            raise TooLarge(f"more than {max_states} states at passenger {m}", max_states, len(nxt))
        layer = nxt
    return sum(layer.values(), Fraction(0))


def event_prob(instance: Instance, m: int, max_states: int = DEFAULT_MAX_STATES) -> Fraction:
    """Exact ``Pr(D_m)``."""
    return joint_prob(instance, [m], max_states)


def closed_form(n: int, k: int, m: int) -> Fraction:
    """``k / (n - m + k + 1)``: chance passenger m finds seat m taken when passes 1..k are lost."""
    if not 1 <= k < m <= n:
        raise DomainError(f"need 1 <= k < m <= n, got n={n}, k={k}, m={m}")
    return Fraction(k, n - m + k + 1)


def event_vector_distribution(
    instance: Instance, max_states: int = DEFAULT_MAX_STATES
) -> dict[frozenset[int], Fraction]:
    """Joint law of all occupancy events, keyed by the set of passengers displaced."""
    n = instance.n
    layer: dict[tuple[int, int], Fraction] = {(0, 0): Fraction(1)}
    for m in range(1, n + 1):
        nxt: dict[tuple[int, int], Fraction] = defaultdict(Fraction)
        bit = 1 << (m - 1)
        for (mask, ev), p in layer.items():
            if not _chooses(instance, m, mask):
                nxt[mask | bit, ev] += p
                continue
            if m not in instance.lost:
                ev |= bit
            branch = p / (n - m + 1)
            for s in range(n):
                if not mask >> s & 1:
                    nxt[mask | 1 << s, ev] += branch
        if len(nxt) > max_states:
            raise TooLarge(f"more than {max_states} states at passenger {m}", max_states, len(nxt))
        layer = nxt
    out: dict[frozenset[int], Fraction] = defaultdict(Fraction)
    for (_, ev), p in layer.items():
        out[frozenset(m for m in range(1, n + 1) if ev >> (m - 1) & 1)] += p
    return dict(out)


@dataclass(frozen=True)
class Violation:
    passengers: tuple[int, ...]
    joint: Fraction
    product: Fraction


@dataclass(frozen=True)
class IndependenceReport:
    instance: Instance
    marginals: dict[int, Fraction]
    subsets_checked: int
    violations: list[Violation] = field(default_factory=list)

    @property
    def independent(self) -> bool:
        return not self.violations


def verify_independence(
    instance: Instance, max_states: int = DEFAULT_MAX_STATES
) -> IndependenceReport:
    """Compare ``Pr(all of M)`` with the product of marginals for every nonempty ``M``.

    Violations are reported, not raised: outside consecutive lost sets no
    independence is claimed.
    """
    free = instance.choosers_free()
    if len(free) > 20:
        raise TooLarge(f"{2 ** len(free) - 1} subsets to check", 2**20 - 1, 2 ** len(free) - 1)
    law = event_vector_distribution(instance, max_states)

    def joint(ms):
        return sum((p for ev, p in law.items() if ms <= ev), Fraction(0))

    marg = {m: joint(frozenset([m])) for m in free}
    checked = 0
    violations = []
    for size in range(1, len(free) + 1):
        for ms in combinations(free, size):
            checked += 1
            prod = Fraction(1)
            for m in ms:
                prod *= marg[m]
            j = joint(frozenset(ms)) if size > 1 else marg[ms[0]]
            if j != prod:
                violations.append(Violation(ms, j, prod))
    return IndependenceReport(instance, marg, checked, violations)
