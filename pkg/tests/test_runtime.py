import random

import pytest
from hypothesis import given, settings, strategies as st

from conftest import belief_product
from obsmode.belief import build_belief
from obsmode.model import run_cost, validate_model
from obsmode.oracle import random_instance
from obsmode.product import build_product
from obsmode.runtime import (OFF_STRATEGY, RUNNING, SATISFIED, SessionError, feed_observation,
                             next_command, replay, start_session)
from obsmode.scltl import compile_to_dfa, holds_strong
from obsmode.synthesis import Infeasible, synth_bounded, synth_unbounded

RECT, DIAMOND = {"rectangle"}, {"diamond"}


@pytest.fixture
def c1(running_bp):
    _, bp = running_bp
    return synth_unbounded(bp), bp


@pytest.fixture
def c2(running_bp):
    _, bp = running_bp
    return synth_bounded(bp, 2), bp


def test_start(c1):
    strategy, bp = c1
    s = start_session(strategy)
    assert s.members == [("s1", 0)]
    assert s.accumulated_cost == 0 and s.status == RUNNING and s.steps == 0


def test_commands_of_c1(c1):
    strategy, bp = c1
    s = start_session(strategy, bp)
    assert next_command(s) == ("a", "m2")
    feed_observation(s, RECT)
    assert [x for x, _ in s.members] == ["s2", "s3"]
    assert s.accumulated_cost == 1
    assert next_command(s) == ("a", "m1")

    s = start_session(strategy, bp)
    feed_observation(s, DIAMOND)
    assert s.members == [("s4", 0)] and s.accumulated_cost == 1
    assert next_command(s) == ("b", "m1")
    feed_observation(s, set())
    assert s.status == SATISFIED and s.accumulated_cost == 1
    with pytest.raises(SessionError):
        next_command(s)
    with pytest.raises(SessionError):
        feed_observation(s, set())


def test_unknown_observation_is_off_strategy(c1):
    strategy, bp = c1
    s = start_session(strategy, bp)
    feed_observation(s, {"circle"})
    assert s.status == OFF_STRATEGY
    assert s.current_belief == bp.init and not s.history
    with pytest.raises(SessionError):
        next_command(s)


def test_replay(c1, c2):
    strategy, bp = c1
    assert replay(strategy, bp, [RECT], initial=set()) == ("a", "m1")
    assert replay(strategy, bp, [DIAMOND], initial=set()) == ("b", "m1")
    assert replay(strategy, bp, [DIAMOND, set()]) == SATISFIED
    assert replay(strategy, bp, [DIAMOND], initial={"circle"}) == OFF_STRATEGY
    strategy, bp = c2
    assert replay(strategy, bp, [{"rectangle", "blue"}], initial=set()) == ("b", "m1")


def test_accepting_start():
    model = validate_model({
        "states": ["s"], "actions": ["a"], "transitions": [{"from": "s", "action": "a", "to": ["s"]}],
        "init": "s", "ap": ["goal"], "labels": {"s": ["goal"]},
        "modes": [{"name": "m", "cost": "0.5"}], "init_mode": "m"})
    _, bp = belief_product(model, "F goal")
    s = start_session(synth_unbounded(bp), bp)
    assert s.status == SATISFIED and s.accumulated_cost == 0.5


def test_undefined_strategy_cannot_start(c1):
    strategy, bp = c1

    class Empty:
        def action_at(self, b, t=0):
            return None
    with pytest.raises(SessionError):
        start_session(Empty(), bp)


def test_grid_session_starts_free(grid_bp):
    _, bp = grid_bp
    s = start_session(synth_unbounded(bp), bp)
    assert s.members == [("sinit", bp.product.states[bp.product.init][1])]
    assert s.accumulated_cost == 0


@given(st.integers(0, 10_000), st.integers(0, 2**32), st.booleans())
@settings(deadline=None)
def test_cosimulation(seed, walk_seed, bounded):
    """Drive a session with the observations of a concrete run."""
    model, f = random_instance(seed)
    bp = build_belief(build_product(model, compile_to_dfa(f, model.atomic_props)))
    try:
        strategy = synth_bounded(bp, 6) if bounded else synth_unbounded(bp)
    except Infeasible:
        return
    rng = random.Random(walk_seed)
    p = bp.product
    true = p.init
    session = start_session(strategy, bp)
    run = [(model.init_state, model.init_mode)]
    for _ in range(len(bp.beliefs) + 1):
        assert p.states[true] in session.members
        if session.status != RUNNING:
            break
        action, mode = next_command(session)
        true = rng.choice(p.succ[true][p.actions.index(action)])
        s = p.states[true][0]
        run.append((s, mode))
        feed_observation(session, model.mode(mode).obs_fn[s])
    assert session.status == SATISFIED
    trace = [model.label(s) for s, _ in run]
    assert holds_strong(trace, f)
    # the run may satisfy the formula before the controller can know it
    first = next(i for i in range(1, len(trace) + 1) if holds_strong(trace[:i], f))
    assert session.accumulated_cost == run_cost(model, run)
    assert run_cost(model, run[:first]) <= session.accumulated_cost <= strategy.total_cost


@given(st.lists(st.sampled_from([frozenset(RECT), frozenset(DIAMOND), frozenset()]), max_size=4))
def test_replay_is_deterministic(obs):
    from obsmode.casestudy import running_example
    model = running_example()
    _, bp = belief_product(model, "F star")
    strategy = synth_unbounded(bp)
    assert replay(strategy, bp, obs) == replay(strategy, bp, obs)
