"""The Red Now card game.

A deck of ``reds`` red and ``blacks`` black cards is turned over one card at
a time. Exactly once, just before some card is exposed, the player calls
"Red Now" and wins if that card is red. A strategy sees the colours exposed
so far (a string over ``"R"``/``"B"``) and the deck composition. If it has
not called by the time one card is left, the call is forced.

``mode="bottom"`` scores the bottom card of the deck instead of the next
card; both modes give the same win probability for every strategy.
"""

from __future__ import annotations

import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from math import comb
from pathlib import Path

from .core import DomainError, SeatlabError, TooLarge
from .rng import MASK64, SplitMix64, mix64

DEFAULT_MAX_SEQUENCES = 10**6
MODES = ("next", "bottom")


class StrategyNeverCalls(SeatlabError):
    pass


@dataclass(frozen=True)
class Deck:
    reds: int
    blacks: int

    def __post_init__(self):
        if self.reds < 0 or self.blacks < 0 or self.reds + self.blacks < 1:
            raise DomainError(f"invalid deck ({self.reds} red, {self.blacks} black)")

    @property
    def size(self) -> int:
        return self.reds + self.blacks


class Strategy:
    name = "strategy"

    def decide(self, prefix: str, deck: Deck) -> bool:
        """True to call before the next card is exposed."""
        raise NotImplementedError

    def __repr__(self):
        return f"<{self.name}>"


class Immediate(Strategy):
    name = "immediate"

    def decide(self, prefix, deck):
        return True


class LastChance(Strategy):
    name = "last"

    def decide(self, prefix, deck):
        return False


class Threshold(Strategy):
    """Call once the unseen cards are at least a fraction ``theta`` red."""

    def __init__(self, theta: float):
        self.theta = theta
        self.name = f"threshold:{theta}"

    def decide(self, prefix, deck):
        remaining = deck.size - len(prefix)
        reds_left = deck.reds - prefix.count("R")
        return reds_left >= self.theta * remaining


class BlackRun(Strategy):
    """Call right after ``j`` blacks in a row have been exposed."""

    def __init__(self, j: int):
        if j < 1:
            raise DomainError("run length must be >= 1")
        self.j = j
        self.name = f"black-run:{j}"

    def decide(self, prefix, deck):
        return prefix.endswith("B" * self.j)


class RandomTable(Strategy):
    """Pseudo-random decision for every prefix, fixed by ``seed``.

    The call rate itself is drawn from the seed, between 0.05 and 0.95.
    """

    def __init__(self, seed: int):
        self.seed = seed
        self.name = f"random:{seed}"
        rate = 0.05 + 0.9 * (mix64(seed, 0) >> 11) / (1 << 53)
        self._cut = int(rate * (1 << 64))

    def decide(self, prefix, deck):
        key = int("1" + prefix.replace("R", "1").replace("B", "0"), 2)
        return mix64(self.seed & MASK64, key) < self._cut


class Table(Strategy):
    """Explicit decision table: ``entries`` maps a prefix to call/wait."""

    def __init__(self, entries: dict[str, bool], default: bool = False, name: str = "table"):
        bad = [p for p in entries if set(p) - {"R", "B"}]
        if bad:
            raise DomainError(f"prefixes may contain only R and B: {bad}")
        self.entries = dict(entries)
        self.default = default
        self.name = name

    def decide(self, prefix, deck):
        return self.entries.get(prefix, self.default)

    @classmethod
    def from_json(cls, data: dict) -> "Table":
        if data.get("type") != "table":
            raise DomainError('decision table JSON needs "type": "table"')

        def action(text):
            if text not in ("call", "wait"):
                raise DomainError(f"action must be 'call' or 'wait', got {text!r}")
            return text == "call"

        entries = {e["prefix"]: action(e["action"]) for e in data.get("entries", [])}
        return cls(entries, action(data.get("default", "wait")))


def strategy_library() -> list[Strategy]:
    return [
        Immediate(),
        LastChance(),
        Threshold(0.5),
        Threshold(0.6),
        Threshold(0.4),
        Threshold(0.75),
        BlackRun(1),
        BlackRun(2),
        BlackRun(3),
    ]


def random_strategies(count: int, seed: int = 0) -> list[Strategy]:
    return [RandomTable(mix64(seed, i)) for i in range(count)]


def parse_strategy(text: str) -> Strategy:
    """Build a strategy from ``immediate``, ``last``, ``threshold:0.6``,
    ``black-run:2``, ``random:7``, inline table JSON or a path to a JSON file."""
    text = text.strip()
    if text.startswith("{"):
        return Table.from_json(json.loads(text))
    name, _, arg = text.partition(":")
    try:
        if name == "immediate" and not arg:
            return Immediate()
        if name == "last" and not arg:
            return LastChance()
        if name == "threshold":
            return Threshold(float(arg))
        if name == "black-run":
            return BlackRun(int(arg))
        if name == "random":
            return RandomTable(int(arg))
    except ValueError as exc:
        raise DomainError(f"bad strategy parameter in {text!r}") from exc
    path = Path(text)
    if path.suffix == ".json" and path.exists():
        return Table.from_json(json.loads(path.read_text()))
    raise DomainError(f"unknown strategy {text!r}")


def call_index(cards: str, strategy: Strategy, deck: Deck) -> int:
    """Position of the card the player calls on; forced at the last card."""
    last = len(cards) - 1
    for t in range(last):
        if strategy.decide(cards[:t], deck):
            return t
    return last


def _next_sequence(seq: list[str]) -> bool:
    """Advance to the lexicographic successor in place; False after the last one."""
    i = len(seq) - 2
    while i >= 0 and seq[i] >= seq[i + 1]:
        i -= 1
    if i < 0:
        return False
    j = len(seq) - 1
    while seq[j] <= seq[i]:
        j -= 1
    seq[i], seq[j] = seq[j], seq[i]
    seq[i + 1 :] = reversed(seq[i + 1 :])
    return True


def color_sequences(deck: Deck):
    """Every distinct colour order of the deck, in lexicographic order."""
    seq = ["B"] * deck.blacks + ["R"] * deck.reds
    yield "".join(seq)
    while _next_sequence(seq):
        yield "".join(seq)


def win_probability_exact(
    deck: Deck,
    strategy: Strategy,
    mode: str = "next",
    max_sequences: int = DEFAULT_MAX_SEQUENCES,
) -> Fraction:
    if mode not in MODES:
        raise DomainError(f"mode must be one of {MODES}")
    total = comb(deck.size, deck.reds)
    if total > max_sequences:
        raise TooLarge(f"{total} colour orders exceed bound {max_sequences}", max_sequences, total)
    wins = 0
    for cards in color_sequences(deck):
        t = call_index(cards, strategy, deck)
        scored = cards[t] if mode == "next" else cards[-1]
        wins += scored == "R"
    return Fraction(wins, total)


@dataclass(frozen=True)
class GameBatch:
    deck: Deck
    strategy: str
    mode: str
    trials: int
    wins: int
    master_seed: int

    @property
    def frequency(self) -> float:
        return self.wins / self.trials


def play_once(deck: Deck, strategy: Strategy, rng: SplitMix64, mode: str = "next") -> bool:
    """One shuffled game; cards are dealt by an ascending Fisher-Yates pass
    over ``R * reds + B * blacks``, stopped as soon as the result is known."""
    cards = ["R"] * deck.reds + ["B"] * deck.blacks
    size = len(cards)
    prefix = ""
    t = 0
    while True:
        j = t + rng.bounded(size - t)
        cards[t], cards[j] = cards[j], cards[t]
        if t == size - 1 or strategy.decide(prefix, deck):
            break
        prefix += cards[t]
        t += 1
    if mode == "next":
        return cards[t] == "R"
    for i in range(t + 1, size - 1):
        j = i + rng.bounded(size - i)
        cards[i], cards[j] = cards[j], cards[i]
    return cards[-1] == "R"


def _play_range(deck, strategy, mode, seed, t0, t1):
    return sum(play_once(deck, strategy, SplitMix64.for_trial(seed, t), mode) for t in range(t0, t1))


def win_frequency_mc(
    deck: Deck,
    strategy: Strategy,
    trials: int,
    seed: int,
    mode: str = "next",
    workers: int = 1,
) -> GameBatch:
    if trials < 1:
        raise DomainError("trials must be >= 1")
    if mode not in MODES:
        raise DomainError(f"mode must be one of {MODES}")
    workers = max(1, min(workers, trials))
    bounds = [trials * i // workers for i in range(workers + 1)]
    if workers == 1:
        wins = _play_range(deck, strategy, mode, seed, 0, trials)
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [
                pool.submit(_play_range, deck, strategy, mode, seed, bounds[i], bounds[i + 1])
                for i in range(workers)
            ]
            wins = sum(f.result() for f in futures)
    return GameBatch(deck, strategy.name, mode, trials, wins, seed)
