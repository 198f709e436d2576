"""Domain types for the boarding process and the rule-replay referee.

Passengers and seats are labelled ``1..n``. Passenger ``i`` is assigned
seat ``i``. Passengers in ``lost`` pick uniformly among all empty seats
(their own included); everyone else takes their own seat when it is free
and otherwise picks uniformly among the empty seats.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable


class SeatlabError(Exception):
    """Base class for errors raised by this package."""


class InvalidInstance(SeatlabError, ValueError):
    pass


class EmptySeatCount(InvalidInstance):
    pass


class LostOutOfRange(InvalidInstance):
    pass


class ReplayError(SeatlabError):
    pass


class IllegalChoice(ReplayError):
    pass


class OptionCountMismatch(ReplayError):
    pass


class TraceTooShort(ReplayError):
    pass


class TraceTooLong(ReplayError):
    pass


class DomainError(SeatlabError, ValueError):
    pass


class NotConsecutive(SeatlabError, ValueError):
    pass


class TooLarge(SeatlabError):
    """An exact computation would exceed its configured size bound."""

    def __init__(self, message: str, bound: int, estimate: int | None = None):
        super().__init__(message)
        self.bound = bound
        self.estimate = estimate


@dataclass(frozen=True)
class Instance:
    """Seat count ``n`` and the passengers who lost their boarding passes."""

    n: int
    lost: frozenset[int] = field(default_factory=frozenset)

    def __post_init__(self):
        object.__setattr__(self, "lost", frozenset(self.lost))
        validate(self)

    @classmethod
    def consecutive(cls, n: int, k: int) -> "Instance":
        """Instance whose first ``k`` passengers lost their passes."""
        return cls(n, frozenset(range(1, k + 1)))

    @property
    def is_consecutive(self) -> bool:
        return self.lost == frozenset(range(1, len(self.lost) + 1))

    @property
    def k(self) -> int:
        return len(self.lost)

    @property
    def lost_sorted(self) -> tuple[int, ...]:
        return tuple(sorted(self.lost))

    def choosers_free(self) -> list[int]:
        """Passengers whose occupancy event ``D_m`` is defined."""
        return [m for m in range(1, self.n + 1) if m not in self.lost]


def validate(instance: Instance) -> None:
    """Raise an :class:`InvalidInstance` subclass naming the failed invariant."""
    n = instance.n
    if not isinstance(n, int) or n < 1:
        raise EmptySeatCount(f"seat count must be >= 1, got {n!r}")
    bad = sorted(x for x in instance.lost if not (isinstance(x, int) and 1 <= x <= n))
    if bad:
        raise LostOutOfRange(f"lost labels {bad} outside 1..{n}")


@dataclass(frozen=True)
class Choice:
    passenger: int
    seat: int
    options: int


Trace = tuple[Choice, ...]


def trace_probability(trace: Iterable[Choice]) -> Fraction:
    p = Fraction(1)
    for c in trace:
        p /= c.options
    return p


@dataclass(frozen=True)
class Outcome:
    """``seat_of[i - 1]`` is the seat taken by passenger ``i``."""

    seat_of: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "seat_of", tuple(int(s) for s in self.seat_of))

    @property
    def n(self) -> int:
        return len(self.seat_of)

    def seat(self, passenger: int) -> int:
        return self.seat_of[passenger - 1]

    def is_bijection(self) -> bool:
        return sorted(self.seat_of) == list(range(1, self.n + 1))

    @classmethod
    def identity(cls, n: int) -> "Outcome":
        return cls(tuple(range(1, n + 1)))


def replay(instance: Instance, trace: Iterable[Choice]) -> Outcome:
    """Rebuild the outcome a trace describes, auditing each recorded choice.

    A trace entry is consumed exactly when the boarding rule makes a
    passenger choose. Each entry's ``options`` must equal the number of
    empty seats at that moment.
    """
    n = instance.n
    steps = iter(trace)
    empty = set(range(1, n + 1))
    seat_of = [0] * n
    for m in range(1, n + 1):
        if m not in instance.lost and m in empty:
            seat_of[m - 1] = m
            empty.discard(m)
            continue
        try:
            c = next(steps)
        except StopIteration:
            raise TraceTooShort(f"trace ended before passenger {m} chose") from None
        if c.passenger != m:
            raise IllegalChoice(f"expected a choice by passenger {m}, got passenger {c.passenger}")
        if c.options != len(empty):
            raise OptionCountMismatch(
                f"passenger {m} had {len(empty)} empty seats, trace says {c.options}"
            )
        if c.seat not in empty:
            raise IllegalChoice(f"passenger {m} chose seat {c.seat}, which is not empty")
        seat_of[m - 1] = c.seat
        empty.discard(c.seat)
    if next(steps, None) is not None:
        raise TraceTooLong("trace has entries left after every passenger boarded")
    return Outcome(tuple(seat_of))


def extract_trace(instance: Instance, outcome: Outcome) -> Trace:
    """The unique trace that replays to ``outcome`` (inverse of :func:`replay`)."""
    n = instance.n
    empty = set(range(1, n + 1))
    out = []
    for m in range(1, n + 1):
        s = outcome.seat(m)
        if not (m not in instance.lost and m in empty):
            out.append(Choice(m, s, len(empty)))
        empty.discard(s)
    return tuple(out)


def events_of(instance: Instance, outcome: Outcome) -> dict[int, bool]:
    """Occupancy events: ``D_m`` is True when passenger m found seat m taken."""
    return {m: outcome.seat(m) != m for m in instance.choosers_free()}


def relabel(instance: Instance, seat: int) -> int:
    """Map seat ``j <= k`` to ``n + j`` for a consecutive lost set ``{1..k}``."""
    if not instance.is_consecutive:
        raise NotConsecutive("relabelling is defined only for lost = {1..k}")
    return seat + instance.n if seat <= instance.k else seat


def is_monotone(instance: Instance, outcome: Outcome) -> bool:
    """Every passenger past the lost block sits at or to the right of their own seat."""
    k = instance.k
    return all(relabel(instance, outcome.seat(m)) >= m for m in range(k + 1, instance.n + 1))
