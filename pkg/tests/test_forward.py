from collections import Counter

import numpy as np
import pytest
from scipy import stats as sps

from seatlab.core import Instance, events_of, is_monotone, replay
from seatlab.exact import enumerate_outcomes
from seatlab.forward import run_batch, sample_outcome
from seatlab.rng import SplitMix64
from seatlab.stats import wilson_interval


def sample_many(inst, trials, seed):
    return [sample_outcome(inst, SplitMix64.for_trial(seed, t)) for t in range(trials)]


def test_two_seats_identity_or_swap():
    outcomes = Counter(o.seat_of for o, _ in sample_many(Instance(2, {1}), 20000, 1))
    assert set(outcomes) == {(1, 2), (2, 1)}
    lo, hi = wilson_interval(outcomes[(1, 2)], 20000)
    assert lo <= 0.5 <= hi


def test_single_seat():
    outcome, trace = sample_outcome(Instance(1, {1}), SplitMix64(0))
    assert outcome.seat_of == (1,)
    assert [c.options for c in trace] == [1]


def test_middle_lost_pass():
    inst = Instance(3, {2})
    hits = 0
    for outcome, _ in sample_many(inst, 20000, 2):
        assert outcome.seat(1) == 1
        hits += events_of(inst, outcome)[3]
    lo, hi = wilson_interval(hits, 20000)
    assert lo <= 0.5 <= hi


@pytest.mark.parametrize(
    "inst",
    [Instance(8, {1}), Instance(8, {1, 2, 3}), Instance(9, {2, 5, 6}), Instance(5, {1, 2, 3, 4, 5})],
    ids=str,
)
def test_sampled_traces_replay(inst):
    for outcome, trace in sample_many(inst, 500, 3):
        assert replay(inst, trace) == outcome
        assert outcome.is_bijection()
        if inst.is_consecutive:
            assert is_monotone(inst, outcome)


@pytest.mark.parametrize(
    "inst",
    [Instance(2, {1}), Instance(7, {1, 2}), Instance(9, {3, 4, 8}), Instance(6, set()), Instance(4, {1, 2, 3, 4})],
    ids=str,
)
def test_kernel_matches_python_sampler(inst):
    trials, seed = 3000, 17
    counts = np.zeros(inst.n, dtype=np.int64)
    last = 0
    for outcome, _ in sample_many(inst, trials, seed):
        for m, hit in events_of(inst, outcome).items():
            counts[m - 1] += hit
        last += outcome.seat(inst.n) == inst.n
    batch = run_batch(inst, trials, seed)
    assert np.array_equal(batch.event_counts, counts)
    assert batch.last_correct_count == last


def test_kernel_largest_matches_python_chains():
    from seatlab.pd import displacement_profile

    inst = Instance.consecutive(30, 3)
    batch = run_batch(inst, 400, 5, record_largest=True)
    for t, (outcome, _) in enumerate(sample_many(inst, 400, 5)):
        expected = [max(p.displacements) for p in displacement_profile(inst, outcome)]
        assert list(batch.largest[t]) == expected


def test_tracked_indicators_match_counts():
    inst = Instance(10, {1})
    batch = run_batch(inst, 5000, 9, track=(2, 10))
    assert batch.tracked.shape == (5000, 2)
    assert batch.tracked[:, 0].sum() == batch.event_counts[1]
    assert batch.tracked[:, 1].sum() == batch.event_counts[9]


@pytest.mark.parametrize("workers", [2, 3, 7])
def test_worker_count_does_not_change_results(workers):
    inst = Instance.consecutive(50, 2)
    base = run_batch(inst, 20001, 123, 1, record_largest=True, track=(3, 50))
    assert run_batch(inst, 20001, 123, workers, record_largest=True, track=(3, 50)) == base


def test_seed_changes_results():
    inst = Instance.consecutive(50, 2)
    assert run_batch(inst, 2000, 1) != run_batch(inst, 2000, 2)


def test_empty_lost_set_batch():
    batch = run_batch(Instance(5, set()), 100, 0)
    assert not batch.event_counts.any()
    assert batch.last_correct_count == 100


@pytest.mark.slow
def test_two_seat_batch_frequency():
    batch = run_batch(Instance(2, {1}), 10**6, 42)
    assert abs(batch.last_correct_count / 10**6 - 0.5) <= 0.0015


@pytest.mark.slow
def test_three_lost_passes_last_passenger():
    batch = run_batch(Instance(100, {1, 2, 3}), 10**6, 42)
    assert abs(batch.last_correct_count / 10**6 - 0.25) <= 0.0013


@pytest.mark.parametrize(
    "n,k", [(n, k) for n in range(2, 7) for k in (1, 2) if k < n]
)
def test_outcome_frequencies_fit_exact_law(n, k):
    """Chi-square goodness of fit at significance 0.001 over 10^5 trials."""
    inst = Instance.consecutive(n, k)
    law = enumerate_outcomes(inst).as_dict()
    trials = 10**5
    seen = Counter(o.seat_of for o, _ in sample_many(inst, trials, 1000 + 10 * n + k))
    assert set(seen) <= set(law)
    keys = sorted(law)
    observed = np.array([seen[key] for key in keys], dtype=float)
    expected = np.array([float(law[key]) * trials for key in keys])
    stat = ((observed - expected) ** 2 / expected).sum()
    assert stat <= sps.chi2.ppf(0.999, len(keys) - 1)
