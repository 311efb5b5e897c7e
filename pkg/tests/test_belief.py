from itertools import combinations

from hypothesis import assume, given, settings, strategies as st

from conftest import belief_product
from obsmode.belief import (BeliefStats, belief_stats, belief_successors, belief_to_dot,
                            build_belief, dead_dfa_states)
from obsmode.model import validate_model
from obsmode.oracle import random_instance
from obsmode.product import SOURCE, build_product
from obsmode.scltl import compile_to_dfa, parse_formula

seeds = st.integers(0, 10_000)


def instance_bp(seed, convention="target"):
    model, f = random_instance(seed)
    dfa = compile_to_dfa(f, model.atomic_props)
    return model, build_belief(build_product(model, dfa, convention))


def named(bp, succ):
    return [[bp.product.states[p] for p in b] for b in succ]


def test_successors_of_initial_belief(running_bp, running):
    _, bp = running_bp
    p = bp.product
    a = p.actions.index("a")
    split = {m: named(bp, belief_successors(p, running.modes, (p.init,), a, m)) for m in range(3)}
    assert split[0] == [[("s2", 0), ("s3", 0), ("s4", 0)]]
    assert split[1] == [[("s2", 0), ("s3", 0)], [("s4", 0)]]
    assert split[2] == [[("s2", 0)], [("s3", 0)], [("s4", 0)]]


def test_disabled_action_gives_no_successors(running_bp, running):
    _, bp = running_bp
    p = bp.product
    assert belief_successors(p, running.modes, (p.init,), p.actions.index("b"), 0) == []


def test_initial_fragment(running_bp):
    _, bp = running_bp
    assert bp.members(bp.init) == [("s1", 0)]
    assert bp.mode_name(bp.init) == "m1"
    succ = {bp.action_name(j): [(bp.members(t), bp.mode_name(t)) for t in ts]
            for j, ts in bp.edges[bp.init].items()}
    assert succ == {
        ("a", "m1"): [([("s2", 0), ("s3", 0), ("s4", 0)], "m1")],
        ("a", "m2"): [([("s2", 0), ("s3", 0)], "m2"), ([("s4", 0)], "m2")],
        ("a", "m3"): [([("s2", 0)], "m3"), ([("s3", 0)], "m3"), ([("s4", 0)], "m3")],
    }
    assert [bp.weight(bp.action_index("a", m)) for m in ("m1", "m2", "m3")] == [0, 1, 2]


def test_lookup(running_bp):
    _, bp = running_bp
    p = bp.product
    members = [p.index(("s2", 0)), p.index(("s3", 0))]
    i = bp.index(members, "m2")
    assert bp.find(members, 1) == i
    assert bp.find(members, "m3") is None
    assert bp.observation(i, 1) == {"rectangle"}
    assert bp.observation(i, 2) is None


def test_running_counts(running_bp):
    _, bp = running_bp
    assert belief_stats(bp) == BeliefStats(25, 87)


def test_decided_beliefs_are_not_expanded(running_bp):
    _, bp = running_bp
    dead = dead_dfa_states(bp.product.dfa)
    for i, members in enumerate(bp.beliefs):
        decided = i in bp.accepting or any(bp.product.states[p][1] in dead for p in members)
        if decided:
            assert not bp.edges[i]


def test_dead_dfa_states():
    dfa = compile_to_dfa(parse_formula("(! dang) U target"), ["dang", "target"])
    dead = dead_dfa_states(dfa)
    assert len(dead) == 1
    assert not dead & dfa.accepting and dfa.init not in dead


def test_full_observation_gives_singletons():
    raw = {
        "states": ["a0", "a1", "a2", "a3"], "actions": ["go"],
        "transitions": [{"from": "a0", "action": "go", "to": ["a1", "a2"]},
                        {"from": "a1", "action": "go", "to": ["a3"]},
                        {"from": "a2", "action": "go", "to": ["a0", "a3"]},
                        {"from": "a3", "action": "go", "to": ["a3"]}],
        "init": "a0", "ap": ["p"], "labels": {"a3": ["p"]},
        "observations": ["o0", "o1", "o2", "o3"],
        "modes": [{"name": "eye", "cost": 1,
                   "obs": {f"a{i}": [f"o{i}"] for i in range(4)}}],
        "init_mode": "eye",
    }
    model = validate_model(raw)
    _, bp = belief_product(model, "F p")
    p = bp.product
    assert all(len(b) == 1 for b in bp.beliefs)
    assert len(bp.beliefs) == len(p.states)
    for i, (b,) in enumerate(map(tuple, bp.beliefs)):
        for j, succ in bp.edges[i].items():
            assert sorted(bp.beliefs[t][0] for t in succ) == list(p.succ[b][bp.belief_actions[j][0]])


def test_grid_counts(grid_bp):
    _, bp = grid_bp
    assert belief_stats(bp) == BeliefStats(367, 2812)


def test_dot(running_bp):
    _, bp = running_bp
    dot = belief_to_dot(bp)
    assert dot.count("->") == belief_stats(bp).transition_count + 1
    assert '"(a,m3), 2"' in dot


@given(seeds, st.sampled_from(["source", "target"]))
@settings(deadline=None)
def test_structure(seed, convention):
    model, bp = instance_bp(seed, convention)
    p = bp.product
    for i, members in enumerate(bp.beliefs):
        # observation-consistent under the mode carried by the belief
        if i != bp.init:
            assert bp.observation(i, bp.belief_modes[i]) is not None
        assert (i in bp.accepting) == all(q in p.accepting for q in members)
        assert len({p.states[q][1] for q in members}) <= len(members)
        for j, succ in bp.edges[i].items():
            a, m = bp.belief_actions[j]
            assert bp.weights[j] == model.modes[m].cost
            post = set()
            for q in members:
                assert p.succ[q][a], "offered action must be enabled in every member"
                post.update(p.succ[q][a])
            parts = [set(bp.beliefs[t]) for t in succ]
            assert set().union(*parts) == post
            assert sum(len(x) for x in parts) == len(post)
            # distinct successors are told apart by their observation
            obs = [bp.observation(t, m) for t in succ]
            assert len(set(obs)) == len(obs)
            assert all(bp.belief_modes[t] == m for t in succ)


def naive_belief_stats(bp):
    """Reachable beliefs by enumerating every subset of product states."""
    p, modes = bp.product, bp.model.modes
    n = len(p.states)
    subsets = [frozenset(c) for k in range(1, n + 1) for c in combinations(range(n), k)]
    dead = dead_dfa_states(p.dfa)
    start = (frozenset([p.init]), bp.m_init)
    seen, todo, transitions = {start}, [start], 0
    while todo:
        b, _ = todo.pop()
        if all(q in p.accepting for q in b) or any(p.states[q][1] in dead for q in b):
            continue
        for a in range(len(p.actions)):
            if not all(p.succ[q][a] for q in b):
                continue
            post = {t for q in b for t in p.succ[q][a]}
            for m, mode in enumerate(modes):
                def obs(q):
                    return mode.obs_fn[p.states[q][0]]
                for c in subsets:
                    if not c <= post:
                        continue
                    o = obs(next(iter(c)))
                    if c != {q for q in post if obs(q) == o}:
                        continue
                    transitions += 1
                    if (c, m) not in seen:
                        seen.add((c, m))
                        todo.append((c, m))
    return BeliefStats(len(seen), transitions)


@given(seeds)
@settings(max_examples=40, deadline=None)
def test_counts_match_naive_construction(seed):
    _, bp = instance_bp(seed)
    assume(len(bp.product.states) <= 10)
    assert belief_stats(bp) == naive_belief_stats(bp)


def test_source_labeling_builds(running):
    dfa = compile_to_dfa(parse_formula("F star"), ["star"])
    bp = build_belief(build_product(running, dfa, SOURCE))
    assert bp.members(bp.init) == [("s1", 0)]
    assert len(bp.beliefs) > 25
