"""Forward sampling of the boarding process and a deterministic batch runner.

Only passengers who must choose are visited: lost passengers and displaced
ones. Everyone else sits in their own seat without touching the generator.
A choice among ``e`` empty seats draws ``r = bounded(e)`` and takes the
``r``-th smallest empty seat, so the outcome of a stream is fixed by the
rule alone and not by the bookkeeping used to find that seat. Passenger
``m`` always faces exactly ``n - m + 1`` empty seats.

The empty seats seen by passenger ``m`` are the still-empty lost seats below
``m`` (at most ``|lost|`` of them) followed by ``m..n`` minus the seats
already taken ahead of ``m`` (also at most ``|lost|``). Both lists stay
short, so a trial costs ``O(|lost| * choosers)`` instead of ``O(n)``.
"""

from __future__ import annotations

import bisect
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numba
import numpy as np

from .core import Choice, Instance, Outcome, Trace
from .rng import GOLDEN, SplitMix64

__all__ = ["BatchResult", "run_batch", "sample_outcome", "sample_choices"]


@dataclass(frozen=True)
class Step:
    passenger: int
    seat: int
    options: int
    chain: int


def sample_choices(instance: Instance, rng: SplitMix64) -> list[Step]:
    """Run one boarding and return every choice made, in boarding order.

    ``chain`` is the 1-based rank, within the lost set, of the lost passenger
    whose displacement chain the choice belongs to.
    """
    n = instance.n
    lost = instance.lost_sorted
    is_lost = instance.lost
    low: list[int] = []
    ahead: list[int] = []
    pending: dict[int, int] = {}
    steps = []
    li = 0
    while True:
        nxt_lost = lost[li] if li < len(lost) else n + 1
        nxt_ahead = ahead[0] if ahead else n + 1
        m = min(nxt_lost, nxt_ahead)
        if m > n:
            break
        if m == nxt_lost:
            li += 1
            chain = li
            pending.pop(m, None)
        else:
            chain = pending.pop(m)
        r = rng.bounded(n - m + 1)
        if r < len(low):
            seat = low.pop(r)
        else:
            seat = m + r - len(low)
            for t in ahead:
                if t > seat:
                    break
                seat += 1
        steps.append(Step(m, seat, n - m + 1, chain))
        own_taken = bool(ahead) and ahead[0] == m
        if own_taken:
            ahead.pop(0)
        if seat > m:
            bisect.insort(ahead, seat)
            if seat not in is_lost:
                pending[seat] = chain
        if m in is_lost and seat != m and not own_taken:
            low.append(m)
    return steps


def sample_outcome(instance: Instance, rng: SplitMix64) -> tuple[Outcome, Trace]:
    """Sample one boarding; the returned trace replays to the returned outcome."""
    seat_of = list(range(1, instance.n + 1))
    trace = []
    for st in sample_choices(instance, rng):
        seat_of[st.passenger - 1] = st.seat
        trace.append(Choice(st.passenger, st.seat, st.options))
    return Outcome(tuple(seat_of)), tuple(trace)


# numba replica of sample_choices + aggregation. Keep in lockstep with rng.py.

_U_GOLDEN = np.uint64(GOLDEN)
_U_M1 = np.uint64(0xBF58476D1CE4E5B9)
_U_M2 = np.uint64(0x94D049BB133111EB)
_S30 = np.uint64(30)
_S27 = np.uint64(27)
_S31 = np.uint64(31)
_S11 = np.uint64(11)
_ONE = np.uint64(1)
_ZERO = np.uint64(0)


@numba.njit(cache=True, nogil=True)
def _finalize(z):
    z = (z ^ (z >> _S30)) * _U_M1
    z = (z ^ (z >> _S27)) * _U_M2
    return z ^ (z >> _S31)


@numba.njit(cache=True, nogil=True)
def _trial_state(seed, t):
    return _finalize(seed + (np.uint64(t) + _ONE) * _U_GOLDEN)


@numba.njit(cache=True, nogil=True)
def _next_u64(state):
    state[0] = state[0] + _U_GOLDEN
    return _finalize(state[0])


@numba.njit(cache=True, nogil=True)
def _bounded(state, s):
    us = np.uint64(s)
    threshold = (_ZERO - us) % us
    x = _next_u64(state)
    while x < threshold:
        x = _next_u64(state)
    return np.int64(x % us)


@numba.njit(cache=True, nogil=True)
def _random(state):
    return np.float64(_next_u64(state) >> _S11) * (1.0 / 9007199254740992.0)


@numba.njit(cache=True, nogil=True)
def _batch_kernel(n, lost, is_lost, seed, t0, t1, counts, last_ok, largest, track_col, tracked):
    k = lost.shape[0]
    record_largest = largest.shape[0] > 0
    record_tracked = tracked.shape[0] > 0
    low = np.empty(k + 1, np.int64)
    ahead = np.empty(k + 1, np.int64)
    ahead_chain = np.empty(k + 1, np.int64)
    state = np.empty(1, np.uint64)
    ok = 0
    for t in range(t0, t1):
        row = t - t0
        state[0] = _trial_state(seed, t)
        nlow = 0
        nahead = 0
        li = 0
        last_seat = n
        while True:
            nxt_lost = lost[li] if li < k else n + 1
            nxt_ahead = ahead[0] if nahead > 0 else n + 1
            m = min(nxt_lost, nxt_ahead)
            if m > n:
                break
            own_taken = nahead > 0 and ahead[0] == m
            if m == nxt_lost:
                li += 1
                chain = li
            else:
                chain = ahead_chain[0]
                counts[m] += 1
                if record_tracked and track_col[m] >= 0:
                    tracked[row, track_col[m]] = 1
            r = _bounded(state, n - m + 1)
            if r < nlow:
                seat = low[r]
                for j in range(r, nlow - 1):
                    low[j] = low[j + 1]
                nlow -= 1
            else:
                seat = m + r - nlow
                for j in range(nahead):
                    if ahead[j] > seat:
                        break
                    seat += 1
            if m == n:
                last_seat = seat
            if record_largest:
                target = seat + n if is_lost[seat] else seat
                d = target - m
                if d > largest[row, chain - 1]:
                    largest[row, chain - 1] = d
            if own_taken:
                for j in range(nahead - 1):
                    ahead[j] = ahead[j + 1]
                    ahead_chain[j] = ahead_chain[j + 1]
                nahead -= 1
            if seat > m:
                pos = nahead
                while pos > 0 and ahead[pos - 1] > seat:
                    ahead[pos] = ahead[pos - 1]
                    ahead_chain[pos] = ahead_chain[pos - 1]
                    pos -= 1
                ahead[pos] = seat
                # ignored when seat is lost: its owner starts a fresh chain
                ahead_chain[pos] = chain
                nahead += 1
            if is_lost[m] and seat != m and not own_taken:
                low[nlow] = m
                nlow += 1
        if last_seat == n:
            ok += 1
    last_ok[0] += ok


@dataclass(frozen=True, eq=False)
class BatchResult:
    """Aggregated Monte Carlo counts for one instance.

    ``event_counts[m - 1]`` counts trials where passenger ``m`` found their
    seat taken (always 0 for lost passengers). ``largest`` holds, per trial
    and per displacement chain, the largest integer displacement after
    relabelling; divide by ``n`` for the normalised value. ``tracked`` holds
    per-trial indicators of ``D_m`` for the passengers in ``track``.
    """

    instance: Instance
    trials: int
    master_seed: int
    event_counts: np.ndarray
    last_correct_count: int
    largest: np.ndarray | None = None
    track: tuple[int, ...] = ()
    tracked: np.ndarray | None = None

    def frequency(self, m: int) -> float:
        return self.event_counts[m - 1] / self.trials

    def __eq__(self, other):
        if not isinstance(other, BatchResult):
            return NotImplemented

        def same(a, b):
            if a is None or b is None:
                return a is b
            return np.array_equal(a, b)

        return (
            self.instance == other.instance
            and self.trials == other.trials
            and self.master_seed == other.master_seed
            and self.last_correct_count == other.last_correct_count
            and self.track == other.track
            and np.array_equal(self.event_counts, other.event_counts)
            and same(self.largest, other.largest)
            and same(self.tracked, other.tracked)
        )

    __hash__ = None


def _chunks(trials: int, workers: int) -> list[tuple[int, int]]:
    workers = max(1, min(workers, trials))
    bounds = [trials * i // workers for i in range(workers + 1)]
    return [(bounds[i], bounds[i + 1]) for i in range(workers)]


def run_batch(
    instance: Instance,
    trials: int,
    master_seed: int,
    workers: int = 1,
    *,
    record_largest: bool = False,
    track: tuple[int, ...] = (),
) -> BatchResult:
    """Simulate ``trials`` boardings; trial ``t`` uses ``SplitMix64.for_trial(master_seed, t)``.

    The result depends only on ``(instance, trials, master_seed)`` and the
    recording options; ``workers`` only splits the trial range.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    n = instance.n
    lost = np.array(instance.lost_sorted, dtype=np.int64)
    is_lost = np.zeros(n + 2, dtype=np.bool_)
    is_lost[lost] = True
    seed = np.uint64(master_seed % (1 << 64))
    k = max(len(lost), 1)
    largest = np.zeros((trials if record_largest else 0, k), dtype=np.int64)
    track = tuple(track)
    for m in track:
        if not 1 <= m <= n or m in instance.lost:
            raise ValueError(f"cannot track passenger {m}")
    track_col = np.full(n + 2, -1, dtype=np.int64)
    for col, m in enumerate(track):
        track_col[m] = col
    tracked = np.zeros((trials if track else 0, max(len(track), 1)), dtype=np.uint8)

    def work(span):
        t0, t1 = span
        counts = np.zeros(n + 2, dtype=np.int64)
        ok = np.zeros(1, dtype=np.int64)
        lg = largest[t0:t1] if record_largest else largest
        tr = tracked[t0:t1] if track else tracked
        _batch_kernel(n, lost, is_lost, seed, t0, t1, counts, ok, lg, track_col, tr)
        return counts, int(ok[0])

    spans = _chunks(trials, workers)
    if len(spans) == 1:
        parts = [work(spans[0])]
    else:
        with ThreadPoolExecutor(max_workers=len(spans)) as pool:
            parts = list(pool.map(work, spans))
    counts = sum(p[0] for p in parts)
    last_ok = sum(p[1] for p in parts)
    return BatchResult(
        instance=instance,
        trials=trials,
        master_seed=master_seed,
        event_counts=counts[1 : n + 1].copy(),
        last_correct_count=last_ok,
        largest=largest if record_largest else None,
        track=track,
        tracked=tracked[:, : len(track)].astype(bool) if track else None,
    )
