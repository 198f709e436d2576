import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from seatlab.core import DomainError, Instance
from seatlab.forward import run_batch
from seatlab.pd import stick_breaking_largest
from seatlab.stats import (
    CHI2_DF1,
    chi_square_independence_2x2,
    ks_two_sample,
    wilson_interval,
)


def test_wilson_edges():
    assert wilson_interval(0, 10, 1.96)[0] == 0.0
    assert wilson_interval(10, 10, 1.96)[1] == 1.0


def test_wilson_direct_formula():
    z, s, n = 1.96, 5, 10
    center = (s + z * z / 2) / (n + z * z)
    half = z * math.sqrt(n) / (n + z * z) * math.sqrt(0.25 + z * z / (4 * n))
    lo, hi = wilson_interval(s, n, z)
    assert lo == pytest.approx(center - half, rel=1e-12)
    assert hi == pytest.approx(center + half, rel=1e-12)
    assert (lo + hi) / 2 == pytest.approx(0.5)


def test_wilson_domain():
    with pytest.raises(DomainError):
        wilson_interval(11, 10, 1.96)
    with pytest.raises(DomainError):
        wilson_interval(1, 0, 1.96)


@given(st.integers(1, 10**6).flatmap(lambda n: st.tuples(st.integers(0, n), st.just(n))),
       st.sampled_from([1.0, 1.96, 3.29]))
def test_wilson_contains_estimate(pair, z):
    s, n = pair
    lo, hi = wilson_interval(s, n, z)
    assert 0 <= lo <= s / n <= hi <= 1


def test_chi_square_examples():
    r = chi_square_independence_2x2([[50, 50], [50, 50]])
    assert r.statistic == 0 and r.passed
    for sig in CHI2_DF1:
        r = chi_square_independence_2x2([[100, 0], [0, 100]], sig)
        assert r.statistic == pytest.approx(200.0) and not r.passed


def test_chi_square_degenerate():
    r = chi_square_independence_2x2([[0, 0], [3, 4]])
    assert r.passed and r.degenerate and r.statistic == 0


def test_chi_square_domain():
    with pytest.raises(DomainError):
        chi_square_independence_2x2([[1, 2, 3], [1, 2, 3]])
    with pytest.raises(DomainError):
        chi_square_independence_2x2([[1, 2], [3, 4]], 0.2)


@given(st.lists(st.integers(0, 1000), min_size=4, max_size=4))
def test_chi_square_transpose_invariant(cells):
    if sum(cells) == 0:
        return
    t = [[cells[0], cells[1]], [cells[2], cells[3]]]
    a = chi_square_independence_2x2(t)
    b = chi_square_independence_2x2(np.transpose(t))
    assert a.statistic == pytest.approx(b.statistic, rel=1e-9, abs=1e-9)


def test_simulated_events_pass_chi_square():
    trials = 10**5
    batch = run_batch(Instance(10, {1}), trials, 11, track=(2, 4))
    d2, d4 = batch.tracked[:, 0], batch.tracked[:, 1]
    table = [[np.sum(d2 & d4), np.sum(d2 & ~d4)], [np.sum(~d2 & d4), np.sum(~d2 & ~d4)]]
    assert chi_square_independence_2x2(table, 0.001).passed


def test_ks_examples():
    a = [0.1, 0.5, 0.7]
    r = ks_two_sample(a, list(a))
    assert r.statistic == 0 and r.passed
    r = ks_two_sample(np.linspace(0, 0.49, 50), np.linspace(0.5, 1, 50))
    assert r.statistic == 1 and not r.passed
    assert ks_two_sample([1.0], [2.0], 0.01).threshold == pytest.approx(1.628 * math.sqrt(2))


def test_ks_same_distribution():
    a = stick_breaking_largest(10**4, 1)
    b = stick_breaking_largest(10**4, 2)
    assert ks_two_sample(a, b, 0.05).passed


def test_ks_domain():
    with pytest.raises(DomainError):
        ks_two_sample([], [1.0])


# integer-valued so the transform below stays strictly increasing in floating point
samples = st.lists(st.integers(-1000, 1000), min_size=1, max_size=40)


@settings(max_examples=200)
@given(samples, samples)
def test_ks_symmetric_and_transform_invariant(a, b):
    ab = ks_two_sample(a, b).statistic
    assert ab == ks_two_sample(b, a).statistic
    def f(x):
        return np.cbrt(np.asarray(x, dtype=float)) * 3 + 2

    assert ks_two_sample(f(a), f(b)).statistic == pytest.approx(ab)
