import pytest

from seatlab.core import (
    Choice,
    EmptySeatCount,
    IllegalChoice,
    Instance,
    LostOutOfRange,
    OptionCountMismatch,
    Outcome,
    TraceTooLong,
    TraceTooShort,
    events_of,
    extract_trace,
    is_monotone,
    relabel,
    replay,
    trace_probability,
)
from seatlab.exact import enumerate_outcomes


def test_validate_examples():
    Instance(2, {1})
    Instance(5, set())
    with pytest.raises(LostOutOfRange):
        Instance(3, {4})
    with pytest.raises(EmptySeatCount):
        Instance(0, set())


def test_consecutive_predicate():
    assert Instance(5, {1, 2}).is_consecutive
    assert Instance(5, set()).is_consecutive
    assert not Instance(5, {2}).is_consecutive
    assert Instance.consecutive(6, 3).lost == frozenset({1, 2, 3})


def test_replay_own_seat():
    out = replay(Instance(2, {1}), [Choice(1, 1, 2)])
    assert out == Outcome.identity(2)


def test_replay_forced_swap():
    out = replay(Instance(2, {1}), [Choice(1, 2, 2), Choice(2, 1, 1)])
    assert out.seat_of == (2, 1)


def test_replay_figure_chain():
    inst = Instance(4, {1})
    out = replay(inst, [Choice(1, 4, 4), Choice(4, 1, 1)])
    assert out.seat_of == (4, 2, 3, 1)
    assert events_of(inst, out) == {2: False, 3: False, 4: True}


def test_replay_errors():
    inst = Instance(2, {1})
    with pytest.raises(IllegalChoice):
        replay(inst, [Choice(1, 2, 2), Choice(2, 2, 1)])
    with pytest.raises(OptionCountMismatch):
        replay(inst, [Choice(1, 2, 3), Choice(2, 1, 1)])
    with pytest.raises(TraceTooShort):
        replay(inst, [Choice(1, 2, 2)])
    with pytest.raises(TraceTooLong):
        replay(inst, [Choice(1, 1, 2), Choice(2, 2, 1)])
    with pytest.raises(IllegalChoice):
        replay(inst, [Choice(2, 1, 2)])


def test_events_of_examples():
    assert not any(events_of(Instance(5, {1}), Outcome.identity(5)).values())
    assert events_of(Instance(2, {1}), Outcome((2, 1))) == {2: True}


def test_empty_lost_set_has_empty_trace():
    inst = Instance(5, set())
    assert replay(inst, []) == Outcome.identity(5)


def test_trace_probability():
    assert trace_probability([Choice(1, 4, 4), Choice(4, 1, 1)]) == pytest.approx(0.25)


def test_relabel_needs_consecutive():
    assert relabel(Instance(5, {1, 2}), 2) == 7
    assert relabel(Instance(5, {1, 2}), 3) == 3


@pytest.mark.parametrize("n,k", [(n, k) for n in range(1, 8) for k in range(4) if k <= n])
def test_enumerated_outcomes_are_monotone_bijections(n, k):
    inst = Instance.consecutive(n, k)
    for outcome, _ in enumerate_outcomes(inst).entries:
        assert outcome.is_bijection()
        assert is_monotone(inst, outcome)
        assert replay(inst, extract_trace(inst, outcome)) == outcome


def test_trace_round_trip_non_consecutive():
    inst = Instance(6, {2, 5})
    for outcome, p in enumerate_outcomes(inst).entries:
        trace = extract_trace(inst, outcome)
        assert replay(inst, trace) == outcome
        # one trace per outcome, so its weight is the outcome's probability
        assert trace_probability(trace) == p
