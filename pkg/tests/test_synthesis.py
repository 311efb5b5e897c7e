import os
import subprocess
import sys
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from conftest import belief_product
from obsmode import kernels
from obsmode.belief import build_belief
from obsmode.model import model_to_raw, validate_model
from obsmode.oracle import backward_induction_value, random_instance
from obsmode.product import build_product
from obsmode.scltl import compile_to_dfa
from obsmode.synthesis import (BOUNDED, UNBOUNDED, Infeasible, iteration_cap, synth_bounded,
                               synth_unbounded, wtg_profile)

seeds = st.integers(0, 10_000)
BACKENDS = sorted(kernels.BACKENDS)


def instance_bp(seed):
    model, f = random_instance(seed)
    return build_belief(build_product(model, compile_to_dfa(f, model.atomic_props)))


def members(bp, i):
    return [s for s, _ in bp.members(i)]


@pytest.mark.parametrize("backend", BACKENDS)
def test_running_unbounded(running_bp, backend):
    _, bp = running_bp
    st_ = synth_unbounded(bp, backend)
    assert st_.kind == UNBOUNDED
    assert st_.value == 1 and st_.total_cost == 1
    assert st_.command(bp.init) == ("a", "m2")
    after = {tuple(members(bp, t)): st_.command(t) for t in bp.edges[bp.init][st_.choice[bp.init]]}
    assert after == {("s2", "s3"): ("a", "m1"), ("s4",): ("b", "m1")}


@pytest.mark.parametrize("backend", BACKENDS)
def test_running_bounded(running_bp, backend):
    _, bp = running_bp
    st_ = synth_bounded(bp, 2, backend)
    assert st_.kind == BOUNDED and st_.bound == 2
    assert st_.total_cost == 2
    assert st_.command(bp.init) == ("a", "m3")
    with pytest.raises(Infeasible):
        synth_bounded(bp, 1, backend)


def test_running_profile(running_bp):
    _, bp = running_bp
    assert wtg_profile(bp, 6) == [None, 2, 1, 1, 1, 1]


def test_bounded_step_budget(running_bp):
    _, bp = running_bp
    st_ = synth_bounded(bp, 3)
    assert st_.action_at(bp.init, 3) is None
    assert st_.action_at(bp.init, 0) == st_.choice[bp.init]


def test_grid(grid_bp):
    _, bp = grid_bp
    assert synth_unbounded(bp).total_cost == 1
    with pytest.raises(Infeasible, match="given bound"):
        synth_bounded(bp, 8)
    assert synth_bounded(bp, 10).total_cost == 2


def _single_state(label, init_cost="0"):
    return validate_model({
        "states": ["s"], "actions": ["a"], "transitions": [{"from": "s", "action": "a", "to": ["s"]}],
        "init": "s", "ap": ["goal"], "labels": {"s": label},
        "modes": [{"name": "m", "cost": init_cost}], "init_mode": "m"})


def test_accepting_start():
    _, bp = belief_product(_single_state(["goal"], "1/2"), "F goal")
    st_ = synth_unbounded(bp)
    assert st_.value == 0 and st_.choice == {}
    assert st_.total_cost == Fraction(1, 2)
    assert wtg_profile(bp, 3) == [0, 0, 0]
    assert synth_bounded(bp, 1).value == 0


def test_unreachable_goal_is_infeasible():
    _, bp = belief_product(_single_state([]), "F goal")
    with pytest.raises(Infeasible, match="no suitable strategy"):
        synth_unbounded(bp)
    assert wtg_profile(bp, 2) == [None, None]


def test_source_reports_raw_value(running):
    _, bp = belief_product(running, "F star", "source")
    st_ = synth_unbounded(bp)
    assert st_.total_cost == st_.value


def test_initial_mode_is_charged_under_target(running):
    raw_model = validate_model({**model_to_raw(running), "init_mode": "m3"})
    _, bp = belief_product(raw_model, "F star")
    st_ = synth_unbounded(bp)
    assert st_.total_cost == 2 + st_.value


def test_bad_bounds(running_bp):
    _, bp = running_bp
    with pytest.raises(ValueError):
        synth_bounded(bp, 0)
    with pytest.raises(ValueError):
        wtg_profile(bp, 0)


def test_trace_records(running_bp):
    _, bp = running_bp
    recs = synth_unbounded(bp).trace.as_records()
    assert recs[-1]["belief"] == bp.init and recs[-1]["delta"] == "1"
    assert [r["iteration"] for r in recs] == list(range(1, len(recs) + 1))
    recs = synth_bounded(bp, 2).trace.as_records()
    assert all("changed" in r for r in recs)


def test_unknown_backend():
    with pytest.raises(ValueError, match="not available"):
        kernels.get("quantum")


def test_pure_fallback_is_selected_by_env():
    env = dict(os.environ, OBSMODE_PURE="1")
    out = subprocess.run([sys.executable, "-c", "from obsmode import kernels; print(kernels.DEFAULT)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"


@pytest.mark.skipif("compiled" not in kernels.BACKENDS, reason="extension not built")
@given(seeds)
@settings(max_examples=150, deadline=None)
def test_backends_agree(seed):
    bp = instance_bp(seed)
    results = []
    for backend in ("python", "compiled"):
        try:
            u = synth_unbounded(bp, backend)
            unb = (u.choice, u.wtg, u.trace.entries)
        except Infeasible:
            unb = None
        k = iteration_cap(bp)
        try:
            b = synth_bounded(bp, k, backend)
            bnd = (b.choice, b.wtg, b.layers)
        except Infeasible:
            bnd = None
        results.append((unb, bnd, wtg_profile(bp, k + 2, backend)))
    assert results[0] == results[1]


@given(seeds)
@settings(deadline=None)
def test_settled_values_never_decrease(seed):
    bp = instance_bp(seed)
    try:
        st_ = synth_unbounded(bp)
    except Infeasible as exc:
        entries = exc.trace.entries
    else:
        entries = st_.trace.entries
    deltas = [d for _, d, _ in entries]
    assert deltas == sorted(deltas)


@given(seeds)
@settings(deadline=None)
def test_optimal_against_backward_induction(seed):
    bp = instance_bp(seed)
    oracle = backward_induction_value(bp)
    try:
        st_ = synth_unbounded(bp)
    except Infeasible:
        assert oracle[bp.init] is None
        return
    assert all(oracle[b] == v for b, v in st_.wtg.items())
    for b in bp.accepting:
        assert st_.wtg.get(b, 0) == 0


@given(seeds)
@settings(deadline=None)
def test_monotone_in_bound(seed):
    bp = instance_bp(seed)
    prev = None
    for k in range(1, iteration_cap(bp) + 1):
        try:
            wtg = synth_bounded(bp, k).wtg
        except Infeasible:
            wtg = {b: v for b, v in backward_induction_value(bp, k).items() if v is not None}
        if prev is not None:
            for b, v in prev.items():
                assert wtg[b] <= v
        prev = wtg
    profile = wtg_profile(bp, iteration_cap(bp))
    assert all(a is None or (b is not None and b <= a) for a, b in zip(profile, profile[1:]))


@given(seeds)
@settings(deadline=None)
def test_cap_bound_equals_unbounded(seed):
    bp = instance_bp(seed)
    try:
        unb = synth_unbounded(bp).value
    except Infeasible:
        unb = None
    assert wtg_profile(bp, iteration_cap(bp))[-1] == unb


def _paths_reach_acceptance(bp, st_, limit):
    """Every play of ``st_`` from the start accepts within ``limit`` steps."""
    frontier = [(bp.init, 0)]
    while frontier:
        b, t = frontier.pop()
        if b in bp.accepting:
            continue
        if t >= limit:
            return False
        j = st_.action_at(b, t)
        if j is None:
            return False
        frontier.extend((b2, t + 1) for b2 in bp.edges[b][j])
    return True


@given(seeds)
@settings(deadline=None)
def test_strategies_close(seed):
    bp = instance_bp(seed)
    try:
        st_ = synth_unbounded(bp)
    except Infeasible:
        return
    assert _paths_reach_acceptance(bp, st_, len(st_.wtg))
    for b, j in st_.choice.items():
        assert b in st_.wtg
        assert all(t in st_.wtg for t in bp.edges[b][j])
    for k in range(1, 6):
        try:
            assert _paths_reach_acceptance(bp, synth_bounded(bp, k), k)
        except Infeasible:
            pass


@pytest.mark.skipif("compiled" not in kernels.BACKENDS, reason="extension not built")
def test_backends_agree_on_grid(grid_bp):
    _, bp = grid_bp
    u = [synth_unbounded(bp, b) for b in ("python", "compiled")]
    assert u[0].choice == u[1].choice and u[0].wtg == u[1].wtg
    b = [synth_bounded(bp, 12, b) for b in ("python", "compiled")]
    assert b[0].layers == b[1].layers and b[0].wtg == b[1].wtg
