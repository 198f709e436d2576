import numpy as np
import pytest

from seatlab.backward import ColoredSeats, red_gaps, seat_from_coloring
from seatlab.core import DomainError, Instance, NotConsecutive, Outcome
from seatlab.exact import enumerate_outcomes
from seatlab.forward import sample_outcome
from seatlab.pd import (
    convergence_report,
    displacement_profile,
    stick_breaking_largest,
    stick_breaking_sample,
)
from seatlab.rng import SplitMix64

# mean of the largest Poisson-Dirichlet(1) component (Golomb-Dickman constant)
GOLOMB_DICKMAN = 0.6243299885435508
# stick_breaking_largest(10**6, 0).mean(), frozen from the oracle run
ORACLE_MEAN_SEED0 = 0.6243033067299166


def test_profile_single_chain_to_top():
    [p] = displacement_profile(Instance(5, {1}), Outcome.identity(5))
    assert p.components == (1.0,)


def test_profile_figure_example():
    [p] = displacement_profile(Instance(4, {1}), Outcome((4, 2, 3, 1)))
    assert p.components == (0.75, 0.25)


def test_profile_needs_consecutive():
    with pytest.raises(NotConsecutive):
        displacement_profile(Instance(4, {2}), Outcome.identity(4))


@pytest.mark.parametrize("n,k", [(n, 1) for n in range(2, 8)] + [(n, 2) for n in range(3, 7)])
def test_profile_equals_red_gaps(n, k):
    from itertools import permutations, product

    inst = Instance.consecutive(n, k)
    for body in product(range(k + 1), repeat=n - k):
        for top in permutations(range(1, k + 1)):
            c = ColoredSeats(n, k, body + top)
            profiles = displacement_profile(inst, seat_from_coloring(c))
            gaps = red_gaps(c)
            for prof in profiles:
                assert list(prof.displacements) == gaps[prof.chain]


@pytest.mark.parametrize("n,k", [(6, 1), (6, 2), (7, 3)])
def test_displacement_conservation(n, k):
    inst = Instance.consecutive(n, k)
    for outcome, _ in enumerate_outcomes(inst).entries:
        profiles = displacement_profile(inst, outcome)
        assert sum(sum(p.displacements) for p in profiles) == n * k
        for p in profiles:
            assert list(p.components) == sorted(p.components, reverse=True)
            assert sum(p.displacements) <= n + k - 1


def test_profiles_of_sampled_outcomes():
    inst = Instance.consecutive(200, 3)
    for t in range(200):
        outcome, _ = sample_outcome(inst, SplitMix64.for_trial(0, t))
        profiles = displacement_profile(inst, outcome)
        assert [p.chain for p in profiles] == [1, 2, 3]
        assert sum(sum(p.displacements) for p in profiles) == 600


def test_first_piece_uniform():
    first = [stick_breaking_sample(SplitMix64.for_trial(1, t), 0.5).pieces[0] for t in range(10**5)]
    assert abs(np.mean(first) - 0.5) <= 0.005


def test_stick_breaking_residual():
    eps = 1e-6
    for t in range(500):
        s = stick_breaking_sample(SplitMix64.for_trial(2, t), eps)
        total = sum(s.components)
        assert 1 - eps <= total <= 1 + 1e-12
        assert s.truncation_mass < eps
        assert list(s.components) == sorted(s.components, reverse=True)


def test_stick_breaking_epsilon_domain():
    with pytest.raises(DomainError):
        stick_breaking_sample(SplitMix64(0), 1.5)


def test_kernel_matches_python_oracle():
    py = [max(stick_breaking_sample(SplitMix64.for_trial(3, t)).pieces) for t in range(2000)]
    assert np.array_equal(np.array(py), stick_breaking_largest(2000, 3))


@pytest.mark.slow
def test_oracle_mean_largest():
    mean = stick_breaking_largest(10**6, 0).mean()
    assert mean == pytest.approx(ORACLE_MEAN_SEED0, abs=1e-12)
    assert abs(mean - 0.6243) <= 0.002
    assert abs(mean - GOLOMB_DICKMAN) <= 0.002


def test_convergence_report_shape():
    report = convergence_report([30, 300], 2, 2000, 0)
    assert [r.n for r in report.rows] == [30, 300]
    for r in report.rows:
        assert r.max_cross_corr is not None and 0 <= r.max_cross_corr <= 1
        assert 0 < r.mean_largest < 1
    with pytest.raises(DomainError):
        convergence_report([15], 2, 100, 0)


@pytest.mark.slow
def test_convergence_examples():
    report = convergence_report([100, 1000, 10000], 1, 10**5, 0)
    ks = [r.ks_distance for r in report.rows]
    assert ks[2] < ks[0]
    # one adjacent inversion tolerated between 10^3 and 10^4
    assert ks[1] < ks[0]
    assert abs(report.rows[2].mean_largest - report.oracle_mean_largest) <= 0.01
    wide = convergence_report([10000], 3, 10**5, 0)
    assert wide.rows[0].max_cross_corr < 0.05
