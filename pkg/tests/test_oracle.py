import json
from pathlib import Path

import pytest
from hypothesis import given, settings, strategies as st

from conftest import belief_product
from obsmode.belief import build_belief
from obsmode.model import model_to_raw, run_cost, validate_model
from obsmode.oracle import (ConstantStrategy, backward_induction_profile,
                            backward_induction_value, check_instance, random_instance,
                            verify_strategy)
from obsmode.product import build_product
from obsmode.scltl import compile_to_dfa, to_text
from obsmode.synthesis import Infeasible, synth_bounded, synth_unbounded, wtg_profile

GOLDEN = Path(__file__).parent / "golden" / "random_instance_1.json"
seeds = st.integers(0, 10_000)


def test_c1(running, running_bp):
    f, bp = running_bp
    rep = verify_strategy(running, f, synth_unbounded(bp), bp)
    assert rep.satisfies and rep.worst_case_cost == 1 and rep.worst_case_steps <= 3


def test_c2(running, running_bp):
    f, bp = running_bp
    rep = verify_strategy(running, f, synth_bounded(bp, 2), bp)
    assert rep.satisfies and rep.worst_case_cost == 2 and rep.worst_case_steps == 2


def test_constant_strategy_fails(running, running_bp):
    f, bp = running_bp
    rep = verify_strategy(running, f, ConstantStrategy(bp, "a", "m1"), bp)
    assert not rep.satisfies
    assert rep.worst_case_cost is None and rep.worst_case_steps is None
    assert rep.as_dict()["worst_case_cost"] is None


def test_witness(running, running_bp):
    f, bp = running_bp
    rep = verify_strategy(running, f, synth_unbounded(bp), bp)
    assert rep.witness_run[0] == ("s1", "m1")
    assert run_cost(running, rep.witness_run) == rep.worst_case_cost
    assert rep.witness_steps == len(rep.witness_run) - 1 <= rep.worst_case_steps
    doc = rep.as_dict()
    assert doc["worst_case_cost"] == "1" and doc["witness_run"][0] == ["s1", "m1"]


def test_unknown_detector(running, running_bp):
    f, bp = running_bp
    with pytest.raises(ValueError):
        verify_strategy(running, f, synth_unbounded(bp), bp, detector="guess")


def test_backward_induction_examples(running_bp):
    _, bp = running_bp
    assert backward_induction_value(bp)[bp.init] == 1
    assert backward_induction_value(bp, 2)[bp.init] == 2
    assert backward_induction_value(bp, 1)[bp.init] is None
    assert backward_induction_profile(bp, 4) == [None, 2, 1, 1]


def test_backward_induction_free_modes(running):
    raw = model_to_raw(running)
    for m in raw["modes"]:
        m["cost"] = "0"
    _, bp = belief_product(validate_model(raw), "F star")
    values = backward_induction_value(bp)
    winning = synth_unbounded(bp).wtg
    assert all(values[b] == 0 for b in winning)


def test_golden_instance():
    want = json.loads(GOLDEN.read_text())
    model, f = random_instance(1)
    assert model_to_raw(model) == want["model"]
    assert to_text(f) == want["formula"]


@given(seeds)
def test_instances_are_valid_and_small(seed):
    model, f = random_instance(seed)
    assert validate_model(model_to_raw(model)) == model
    assert 2 <= len(model.states) <= 6
    assert len(model.actions) <= 3 and len(model.modes) <= 3 and len(model.atomic_props) <= 2
    assert f[0] in ("F", "U", "X")


def test_instances_are_deterministic():
    assert random_instance(42) == random_instance(42)


@given(seeds)
@settings(max_examples=60, deadline=None)
def test_cross_checks(seed):
    assert check_instance(seed) == []


@given(seeds, st.sampled_from(["source", "target"]))
@settings(deadline=None)
def test_detectors_agree(seed, convention):
    model, f = random_instance(seed)
    bp = build_belief(build_product(model, compile_to_dfa(f, model.atomic_props), convention))
    strategies = [ConstantStrategy(bp, *bp.action_name(j)) for j in range(len(bp.belief_actions))]
    try:
        strategies.append(synth_unbounded(bp))
    except Infeasible:
        pass
    for s in strategies:
        a = verify_strategy(model, f, s, bp)
        b = verify_strategy(model, f, s, bp, detector="dfa")
        assert (a.satisfies, a.worst_case_cost, a.worst_case_steps) == \
            (b.satisfies, b.worst_case_cost, b.worst_case_steps)
        if a.satisfies:
            assert run_cost(model, a.witness_run) == a.worst_case_cost


@given(seeds)
@settings(deadline=None)
def test_source_labeling_value_matches_verification(seed):
    model, f = random_instance(seed)
    bp = build_belief(build_product(model, compile_to_dfa(f, model.atomic_props), "source"))
    try:
        st_ = synth_unbounded(bp)
    except Infeasible:
        return
    rep = verify_strategy(model, f, st_, bp)
    assert rep.satisfies
    # belief acceptance lags by one step, so the verified cost never exceeds
    # the raw value plus the initial mode
    assert rep.worst_case_cost <= st_.value + model.mode(model.init_mode).cost


def test_profile_matches_oracle_on_grid(grid_bp):
    _, bp = grid_bp
    assert wtg_profile(bp, 12) == backward_induction_profile(bp, 12)
