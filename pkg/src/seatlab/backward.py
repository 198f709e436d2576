"""Backward seating: colour the seats first, then seat passengers along colour chains.

Seats live in the relabelled set ``k+1 .. n+k``, where seat ``n + j`` stands
for original seat ``j``. Seat ``m <= n`` is red with probability
``k / (n - m + k + 1)`` and red seats carry a shade in ``1..k``; the top
seats ``n+1 .. n+k`` are always red and carry each shade exactly once.
Passenger ``i`` then walks the shade-``i`` seats left to right, displacing
each seat's owner into the next shade-``i`` seat.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from itertools import permutations, product
from math import factorial

from .core import DomainError, Outcome, SeatlabError, TooLarge
from .exact import ExactDistribution, default_max_leaves
from .rng import SplitMix64


class MalformedColoring(SeatlabError, ValueError):
    pass


@dataclass(frozen=True)
class ColoredSeats:
    """``shades[m - k - 1]`` is 0 for a black seat ``m``, else its shade."""

    n: int
    k: int
    shades: tuple[int, ...]

    @property
    def seats(self) -> range:
        return range(self.k + 1, self.n + self.k + 1)

    def shade(self, seat: int) -> int:
        return self.shades[seat - self.k - 1]

    def red_seats(self) -> frozenset[int]:
        return frozenset(s for s in self.seats if self.shade(s))

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "k": self.k,
            "colors": [{"seat": s, "shade": self.shade(s) or None} for s in self.seats],
        }

    @classmethod
    def from_json(cls, data: dict) -> "ColoredSeats":
        n, k = int(data["n"]), int(data["k"])
        by_seat = {int(c["seat"]): c["shade"] for c in data["colors"]}
        if sorted(by_seat) != list(range(k + 1, n + k + 1)):
            raise MalformedColoring("colors must list every seat k+1..n+k exactly once")
        return cls(n, k, tuple(int(by_seat[s] or 0) for s in range(k + 1, n + k + 1)))


def red_probability(n: int, k: int, seat: int) -> Fraction:
    return Fraction(k, n - seat + k + 1) if seat <= n else Fraction(1)


def _check_nk(n: int, k: int) -> None:
    if not (k >= 1 and n >= k + 1):
        raise DomainError(f"need k >= 1 and n >= k + 1, got n={n}, k={k}")


def sample_coloring(n: int, k: int, rng: SplitMix64) -> ColoredSeats:
    _check_nk(n, k)
    shades = []
    for m in range(k + 1, n + 1):
        # red with probability k / (n - m + k + 1), drawn exactly
        if rng.bounded(n - m + k + 1) < k:
            shades.append(rng.bounded(k) + 1)
        else:
            shades.append(0)
    top = list(range(1, k + 1))
    rng.shuffle(top)
    return ColoredSeats(n, k, tuple(shades + top))


def sample_coloring_via_records(n: int, rng: SplitMix64) -> ColoredSeats:
    """k = 1 colouring: seat m is red iff ``n - m + 2`` is a record of n uniforms."""
    _check_nk(n, 1)
    best = -1.0
    record = [False] * (n + 1)
    for s in range(1, n + 1):
        u = rng.random()
        if u > best:
            record[s] = True
            best = u
    return ColoredSeats(n, 1, tuple(int(record[n - m + 2]) for m in range(2, n + 2)))


def _chains(colored: ColoredSeats) -> dict[int, list[int]]:
    n, k = colored.n, colored.k
    if len(colored.shades) != n:
        raise MalformedColoring(f"expected {n} seat colours, got {len(colored.shades)}")
    if any(not 0 <= s <= k for s in colored.shades):
        raise MalformedColoring(f"shades must lie in 0..{k}")
    top = sorted(colored.shade(s) for s in range(n + 1, n + k + 1))
    if top != list(range(1, k + 1)):
        raise MalformedColoring("seats n+1..n+k must carry each shade exactly once")
    chains: dict[int, list[int]] = {i: [] for i in range(1, k + 1)}
    for s in colored.seats:
        if colored.shade(s):
            chains[colored.shade(s)].append(s)
    return chains


def seat_from_coloring(colored: ColoredSeats) -> Outcome:
    n = colored.n
    seat_of = list(range(1, n + 1))
    for shade, reds in _chains(colored).items():
        passenger = shade
        for s in reds:
            seat_of[passenger - 1] = s - n if s > n else s
            passenger = s
    return Outcome(tuple(seat_of))


def red_gaps(colored: ColoredSeats) -> dict[int, list[int]]:
    """Per shade ``i``: distances from ``i`` to its first red seat and between successive ones."""
    out = {}
    for shade, reds in _chains(colored).items():
        prev = shade
        gaps = []
        for s in reds:
            gaps.append(s - prev)
            prev = s
        out[shade] = gaps
    return out


def backward_distribution(n: int, k: int, max_leaves: int | None = None) -> ExactDistribution:
    """Exact outcome law of the backward construction."""
    _check_nk(n, k)
    bound = default_max_leaves() if max_leaves is None else max_leaves
    leaves = (k + 1) ** (n - k) * factorial(k)
    if leaves > bound:
        raise TooLarge(f"backward enumeration needs {leaves} leaves, bound is {bound}", bound, leaves)
    seats = range(k + 1, n + 1)
    per_seat = []
    for m in seats:
        p = red_probability(n, k, m)
        per_seat.append([(0, 1 - p)] + [(i, p / k) for i in range(1, k + 1)])
    tops = list(permutations(range(1, k + 1)))
    w_top = Fraction(1, len(tops))
    weights: dict[tuple[int, ...], Fraction] = defaultdict(Fraction)
    for combo in product(*per_seat):
        w = Fraction(1)
        for _, p in combo:
            w *= p
        if not w:
            continue
        body = tuple(s for s, _ in combo)
        for top in tops:
            o = seat_from_coloring(ColoredSeats(n, k, body + top))
            weights[o.seat_of] += w * w_top
    return ExactDistribution.from_weights(weights)


def record_coloring_distribution(n: int) -> dict[frozenset[int], Fraction]:
    """Law of the red-seat set under the record coupling, exact over all n! relative orders."""
    _check_nk(n, 1)
    if n > 10:
        raise TooLarge(f"{n}! relative orders", factorial(10), factorial(n))
    out: dict[frozenset[int], Fraction] = defaultdict(Fraction)
    w = Fraction(1, factorial(n))
    for order in permutations(range(n)):
        best = -1
        reds = []
        for s, u in enumerate(order, start=1):
            if u > best:
                best = u
                reds.append(n - s + 2)
        out[frozenset(reds)] += w
    return dict(out)


def independent_coloring_distribution(n: int) -> dict[frozenset[int], Fraction]:
    """Product law on seats ``2..n+1`` with ``Pr(red at m) = 1 / (n - m + 2)``."""
    _check_nk(n, 1)
    out = {}
    seats = range(2, n + 2)
    for flags in product((False, True), repeat=n):
        w = Fraction(1)
        for m, red in zip(seats, flags):
            p = red_probability(n, 1, m)
            w *= p if red else 1 - p
        if w:
            out[frozenset(m for m, red in zip(seats, flags) if red)] = w
    return out
