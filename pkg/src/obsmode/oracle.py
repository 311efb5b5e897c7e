"""Brute-force checks that do not share code with the synthesis kernels.

:func:`verify_strategy` plays a strategy against every resolution of the
non-determinism and decides satisfaction on the propositional trace with
:func:`holds_strong`.  :func:`backward_induction_value` recomputes optimal
belief values by plain value iteration over exact rationals.
:func:`random_instance` generates small models for property tests.
"""

from __future__ import annotations

import random
import sys
from dataclasses import dataclass, field
from fractions import Fraction

from .belief import BeliefProduct
from .model import NtsModel, validate_model
from .scltl import holds_strong, Atom, NegAtom, And, Or, Next, Until, Eventually, TRUE


@dataclass
class VerificationReport:
    """Outcome of :func:`verify_strategy`.

    ``worst_case_cost`` and ``worst_case_steps`` are None when some branch
    never satisfies the formula.  ``witness_run`` is a configuration run of
    maximal cost (ties go to the longest run, then to the first one in state
    declaration order); ``witness_steps`` is its number of transitions.
    """

    satisfies: bool
    worst_case_cost: Fraction | None
    worst_case_steps: int | None
    witness_run: list = field(default_factory=list)
    witness_steps: int | None = None

    def as_dict(self):
        return {
            "satisfies": self.satisfies,
            "worst_case_cost": None if self.worst_case_cost is None else str(self.worst_case_cost),
            "worst_case_steps": self.worst_case_steps,
            "witness_run": [list(c) for c in self.witness_run],
            "witness_steps": self.witness_steps,
        }


class ConstantStrategy:
    """Plays the same ``(action, mode)`` in every belief where it is offered."""

    def __init__(self, bp: BeliefProduct, action, mode):
        self.bp = bp
        self.j = bp.action_index(action, mode)

    def action_at(self, belief, steps_taken=0):
        return self.j if self.j in self.bp.edges[belief] else None


_FAIL = None


def verify_strategy(model: NtsModel, formula, strategy, bp: BeliefProduct,
                    detector: str = "trace") -> VerificationReport:
    """Worst case of ``strategy`` over all runs of ``model``.

    Every configuration up to and including the earliest satisfying one is
    charged, the initial one with the initial mode.  With ``detector="dfa"``
    satisfaction is read off the product's DFA component instead of the
    trace, which is only useful to cross-check the two.
    """
    if detector not in ("trace", "dfa"):
        raise ValueError(f"unknown detector {detector!r}")
    product = bp.product
    dfa = product.dfa
    modes = model.modes
    bounded = getattr(strategy, "kind", None) == "bounded"
    memo: dict = {}
    on_path: set = set()

    def satisfied(p, trace):
        if detector == "trace":
            return holds_strong(trace, formula)
        s, q = product.states[p]
        if product.convention == "source":
            q = dfa.step(q, model.label(s))
        return q in dfa.accepting

    # result of a node: (cost, steps, witness_tail) with the tail being the
    # states after this node, or _FAIL
    def explore(p, b, t, trace):
        key = (p, b, t if bounded else 0)
        if key in memo:
            return memo[key]
        if satisfied(p, trace):
            memo[key] = (Fraction(0), 0, ())
            return memo[key]
        if key in on_path:
            return _FAIL
        j = strategy.action_at(b, t)
        if j is None:
            memo[key] = _FAIL
            return _FAIL
        a, m = bp.belief_actions[j]
        s = product.states[p][0]
        targets = product.succ[p][a]
        if not targets:
            memo[key] = _FAIL
            return _FAIL
        on_path.add(key)
        best = None
        worst_steps = 0
        obs_fn = modes[m].obs_fn
        for p2 in targets:
            s2 = product.states[p2][0]
            b2 = None
            for cand in bp.edges[b][j]:
                if p2 in bp.beliefs[cand]:
                    b2 = cand
                    break
            if b2 is None or obs_fn[s2] != bp.observation(b2, m):
                raise RuntimeError(f"belief tracking lost product state {product.states[p2]}")
            sub = explore(p2, b2, t + 1, trace + [model.label(s2)])
            if sub is _FAIL:
                best = _FAIL
                break
            cost = modes[m].cost + sub[0]
            steps = 1 + sub[1]
            worst_steps = max(worst_steps, steps)
            if best is None or (cost, steps) > (best[0], len(best[2])):
                best = (cost, steps, ((s2, modes[m].name),) + sub[2])
        on_path.discard(key)
        if best is not _FAIL:
            best = (best[0], worst_steps, best[2])
        memo[key] = best
        return best

    old = sys.getrecursionlimit()
    sys.setrecursionlimit(max(old, 4 * len(bp.beliefs) * len(product.states) + 1000))
    try:
        root = explore(product.init, bp.init, 0, [model.label(model.init_state)])
    finally:
        sys.setrecursionlimit(old)

    if root is _FAIL:
        return VerificationReport(False, None, None, [], None)
    g0 = modes[bp.m_init].cost
    run = [(model.init_state, modes[bp.m_init].name)] + list(root[2])
    return VerificationReport(True, g0 + root[0], root[1], run, len(run) - 1)


def backward_induction_value(bp: BeliefProduct, k=None) -> dict:
    """Optimal worst-case weight to acceptance for every belief.

    ``k=None`` iterates to the fixpoint (unbounded problem); otherwise exactly
    ``k`` rounds are run, giving the optimum over strategies that accept
    within ``k`` steps.  Values are Fractions, None for unreachable.
    """
    n = len(bp.beliefs)
    value = [Fraction(0) if b in bp.accepting else None for b in range(n)]
    rounds = 0
    while k is None or rounds < k:
        new = list(value)
        for b in range(n):
            if b in bp.accepting:
                continue
            best = None
            for j, succ in bp.edges[b].items():
                if any(value[t] is None for t in succ):
                    continue
                cand = bp.weights[j] + max(value[t] for t in succ)
                if best is None or cand < best:
                    best = cand
            new[b] = best
        rounds += 1
        if new == value:
            break
        value = new
    return dict(enumerate(value))


# --------------------------------------------------------------------------
# random instances

_COSTS = ("0", "1/2", "1", "3/2", "2", "3")


def _random_formula(rng, aps, depth, top=False):
    if top:
        op = rng.choice(("F", "F", "U", "X"))
        if op == "F":
            return Eventually(_random_formula(rng, aps, depth - 1))
        if op == "X":
            return Next(_random_formula(rng, aps, depth - 1))
        return Until(_random_formula(rng, aps, depth - 1), _random_formula(rng, aps, depth - 1))
    if depth <= 0 or rng.random() < 0.25:
        r = rng.random()
        if r < 0.08:
            return TRUE
        p = rng.choice(aps)
        return NegAtom(p) if r < 0.3 else Atom(p)
    op = rng.choice(("and", "or", "X", "U", "F", "F"))
    if op == "and":
        return And(_random_formula(rng, aps, depth - 1), _random_formula(rng, aps, depth - 1))
    if op == "or":
        return Or(_random_formula(rng, aps, depth - 1), _random_formula(rng, aps, depth - 1))
    if op == "X":
        return Next(_random_formula(rng, aps, depth - 1))
    if op == "U":
        return Until(_random_formula(rng, aps, depth - 1), _random_formula(rng, aps, depth - 1))
    return Eventually(_random_formula(rng, aps, depth - 1))


def random_instance(seed, n_states=6, n_actions=3, n_modes=3, n_aps=2, depth=3):
    """Deterministic random ``(model, formula)`` for the given seed.

    Sizes are upper bounds; the actual sizes are drawn from 1..bound (2.. for
    states).  States without any enabled action get a self-loop.  The formula
    has a temporal operator at the top and the first mode observes nothing,
    later modes progressively more.
    """
    rng = random.Random(seed)
    ns = rng.randint(2, n_states)
    na = rng.randint(1, n_actions)
    nm = rng.randint(1, n_modes)
    nap = rng.randint(1, n_aps)
    states = [f"s{i}" for i in range(ns)]
    actions = [f"a{i}" for i in range(na)]
    aps = ["p", "q"][:nap]
    obs = [f"o{i}" for i in range(3)]

    transitions = []
    for s in states:
        enabled = False
        for a in actions:
            if rng.random() < 0.8:
                k = rng.choice((1, 1, 1, 2, 3))
                transitions.append({"from": s, "action": a,
                                    "to": rng.sample(states, min(k, ns))})
                enabled = True
        if not enabled:
            transitions.append({"from": s, "action": rng.choice(actions), "to": [s]})

    # the initial state stays unlabeled so that few formulas hold at once
    labels = {s: [p for p in aps if i and rng.random() < 0.4]
              for i, s in enumerate(states)}
    modes = []
    for i in range(nm):
        cost = "0" if i == 0 and rng.random() < 0.3 else rng.choice(_COSTS[1:])
        informative = i / max(nm - 1, 1)
        fn = {s: [o for o in obs if rng.random() < 0.5 * informative] for s in states}
        modes.append({"name": f"m{i}", "cost": cost, "obs": fn})

    raw = {
        "states": states, "actions": actions, "transitions": transitions,
        "init": states[0], "ap": aps, "labels": labels, "observations": obs,
        "modes": modes, "init_mode": rng.choice(modes)["name"],
    }
    return validate_model(raw), _random_formula(rng, aps, depth, top=True)


def backward_induction_profile(bp: BeliefProduct, k_max: int) -> list:
    """Values of the initial belief after 1..k_max rounds, in one pass."""
    n = len(bp.beliefs)
    value = [Fraction(0) if b in bp.accepting else None for b in range(n)]
    out = []
    for _ in range(k_max):
        new = list(value)
        for b in range(n):
            if b in bp.accepting:
                continue
            best = None
            for j, succ in bp.edges[b].items():
                if any(value[t] is None for t in succ):
                    continue
                cand = bp.weights[j] + max(value[t] for t in succ)
                if best is None or cand < best:
                    best = cand
            new[b] = best
        value = new
        out.append(value[bp.init])
    return out


def check_instance(seed, backend=None, verify_bounded_upto=6) -> list:
    """Cross-check synthesis against the oracles on ``random_instance(seed)``.

    Returns a list of problems, empty when everything agrees.
    """
    from .product import build_product
    from .belief import build_belief
    from .scltl import compile_to_dfa, to_text
    from .synthesis import Infeasible, synth_bounded, synth_unbounded, wtg_profile

    model, formula = random_instance(seed)
    where = f"seed {seed} ({to_text(formula)})"
    dfa = compile_to_dfa(formula, model.atomic_props)
    bp = build_belief(build_product(model, dfa))
    problems = []

    bi = backward_induction_value(bp)
    try:
        unb = synth_unbounded(bp, backend)
    except Infeasible:
        unb = None
    if unb is None:
        if bi[bp.init] is not None:
            problems.append(f"{where}: unbounded infeasible but oracle value {bi[bp.init]}")
    else:
        for b, v in unb.wtg.items():
            if bi[b] != v:
                problems.append(f"{where}: belief {b} wtg {v} != oracle {bi[b]}")
        rep = verify_strategy(model, formula, unb, bp)
        rep_dfa = verify_strategy(model, formula, unb, bp, detector="dfa")
        if not rep.satisfies or rep.worst_case_cost != unb.total_cost:
            problems.append(f"{where}: unbounded verification {rep.as_dict()} vs {unb.total_cost}")
        if (rep.satisfies, rep.worst_case_cost, rep.worst_case_steps) != \
                (rep_dfa.satisfies, rep_dfa.worst_case_cost, rep_dfa.worst_case_steps):
            problems.append(f"{where}: trace and DFA satisfaction disagree")
        if rep.satisfies and rep.worst_case_steps > len(bp.beliefs) - 1:
            problems.append(f"{where}: {rep.worst_case_steps} steps exceed belief count")

    k_max = max(len(bp.beliefs) - 1, 1)
    profile = wtg_profile(bp, k_max, backend)
    oracle = backward_induction_profile(bp, k_max)
    for k, (got, want) in enumerate(zip(profile, oracle), start=1):
        if got != want:
            problems.append(f"{where}: k={k} value {got} != oracle {want}")
    if (unb.value if unb else None) != profile[-1]:
        problems.append(f"{where}: bound {k_max} value {profile[-1]} != unbounded")

    for k in range(1, min(k_max, verify_bounded_upto) + 1):
        try:
            st = synth_bounded(bp, k, backend)
        except Infeasible:
            if profile[k - 1] is not None:
                problems.append(f"{where}: k={k} infeasible but profile {profile[k - 1]}")
            continue
        if st.value != profile[k - 1]:
            problems.append(f"{where}: k={k} strategy value {st.value} != profile")
        rep = verify_strategy(model, formula, st, bp)
        if not rep.satisfies or rep.worst_case_cost != st.total_cost or rep.worst_case_steps > k:
            problems.append(f"{where}: k={k} verification {rep.as_dict()} vs {st.total_cost}")
    return problems
