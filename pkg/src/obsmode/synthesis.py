"""Worst-case optimal strategy synthesis on the weighted belief product.

:func:`synth_unbounded` settles beliefs one at a time in order of their
worst-case weight-to-go (a Dijkstra-style min/max game search).
:func:`synth_bounded` performs synchronous Bellman-Ford style rounds, one per
allowed step.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from . import kernels
from .belief import BeliefProduct
from .product import TARGET

UNBOUNDED = "unbounded"
BOUNDED = "bounded"


class Infeasible(Exception):
    """No strategy reaches an accepting belief (within the bound, if any)."""

    def __init__(self, message, trace=None):
        super().__init__(message)
        self.trace = trace


@dataclass
class SynthesisTrace:
    """Per-iteration record.

    Unbounded runs log one entry per settled belief: ``(belief, delta,
    winning_size)``.  Bounded runs log one entry per round: ``(changed,
    None, winning_size)`` where ``changed`` is the number of beliefs whose
    weight-to-go improved.
    """

    kind: str
    entries: list = field(default_factory=list)

    def as_records(self):
        out = []
        for i, (b, delta, size) in enumerate(self.entries, start=1):
            rec = {"iteration": i, "winning": size}
            if self.kind == UNBOUNDED:
                rec["belief"] = b
                rec["delta"] = str(delta)
            else:
                rec["changed"] = b
            out.append(rec)
        return out


@dataclass
class Strategy:
    """Belief strategy with weight-to-go values.

    ``choice`` maps belief index to belief-action index.  For bounded
    strategies the choice also depends on how many steps are left:
    ``layers[r]`` is the choice map with ``r`` steps remaining, and ``choice``
    is the top layer.  ``wtg`` only holds finite values; a missing belief is
    unreachable.
    """

    bp: BeliefProduct
    choice: dict
    wtg: dict
    kind: str = UNBOUNDED
    bound: int | None = None
    layers: list | None = None
    trace: SynthesisTrace | None = None

    @property
    def m_init(self) -> int:
        return self.bp.m_init

    @property
    def value(self) -> Fraction:
        """Worst-case weight of reaching an accepting belief from the start."""
        return self.wtg[self.bp.init]

    @property
    def total_cost(self) -> Fraction:
        """Worst-case cost in the original system.

        The initial configuration's mode is charged on top of the belief
        weights.  Under the source labeling convention belief acceptance
        lags satisfaction by one step, so the raw belief value is returned
        instead.
        """
        if self.bp.product.convention == TARGET:
            return self.bp.model.modes[self.m_init].cost + self.value
        return self.value

    def action_at(self, belief: int, steps_taken: int = 0):
        """Belief-action index to play, or None when there is none."""
        if self.kind == UNBOUNDED:
            return self.choice.get(belief)
        remaining = self.bound - steps_taken
        if remaining <= 0:
            return None
        layer = self.layers[min(remaining, len(self.layers) - 1)]
        return layer.get(belief)

    def command(self, belief: int, steps_taken: int = 0):
        """``(action, mode)`` names for :meth:`action_at`."""
        j = self.action_at(belief, steps_taken)
        return None if j is None else self.bp.action_name(j)


def to_csr(bp: BeliefProduct):
    """Flatten ``bp`` for the kernels; weights are scaled to integers.

    Returns ``(arrays, scale, edge_action)`` where ``edge_action[e]`` is the
    belief-action index of CSR edge ``e``.
    """
    scale = 1
    for w in bp.weights:
        scale = scale * w.denominator // math.gcd(scale, w.denominator)
    int_w = [int(w * scale) for w in bp.weights]

    edge_ptr, edge_w, succ_ptr, succ, edge_action = [0], [], [0], [], []
    for row in bp.edges:
        for j in sorted(row):
            edge_w.append(int_w[j])
            edge_action.append(j)
            succ.extend(row[j])
            succ_ptr.append(len(succ))
        edge_ptr.append(len(edge_w))
    accepting = [1 if b in bp.accepting else 0 for b in range(len(bp.beliefs))]
    arrays = (len(bp.beliefs), edge_ptr, edge_w, succ_ptr, succ, accepting)
    return arrays, scale, edge_action


def _finite_map(values, finite, scale):
    return {b: Fraction(v, scale) for b, (v, f) in enumerate(zip(values, finite)) if f}


def synth_unbounded(bp: BeliefProduct, backend=None) -> Strategy:
    """Minimize the worst-case weight of reaching an accepting belief.

    Beliefs are settled in non-decreasing order of weight-to-go; ties go to
    the lowest belief index, then the first action, then the first mode.  The
    search stops once the initial belief is settled, so ``wtg`` is only
    complete for beliefs settled before it.

    Raises :class:`Infeasible` when the initial belief cannot be forced into
    the accepting set.
    """
    impl = kernels.get(backend)
    arrays, scale, edge_action = to_csr(bp)
    value, finite, choice, order, deltas = impl.unbounded(*arrays, bp.init)

    trace = SynthesisTrace(UNBOUNDED)
    size = len(bp.accepting)
    for b, d in zip(order, deltas):
        size += 1
        trace.entries.append((b, Fraction(d, scale), size))
    if not finite[bp.init]:
        raise Infeasible("no suitable strategy exists", trace)

    choices = {b: edge_action[e] for b, e in enumerate(choice) if e >= 0}
    return Strategy(bp, choices, _finite_map(value, finite, scale),
                    kind=UNBOUNDED, trace=trace)


def iteration_cap(bp: BeliefProduct) -> int:
    """Rounds after which the bounded sweep cannot improve any more."""
    return max(len(bp.beliefs) - 1, 1)


def _bounded_rounds(bp, k, backend):
    impl = kernels.get(backend)
    arrays, scale, edge_action = to_csr(bp)
    values, finites, choices = impl.bounded(*arrays, k, iteration_cap(bp))
    return values, finites, choices, scale, edge_action


def synth_bounded(bp: BeliefProduct, k: int, backend=None) -> Strategy:
    """Minimize worst-case weight among strategies that accept within ``k``
    steps.

    Every round recomputes all beliefs from the previous round's values, then
    commits them together.  The returned strategy keeps one choice map per
    number of remaining steps, since the cheapest way out of a belief can
    depend on how much of the budget is left.
    """
    if k < 1:
        raise ValueError("bound must be at least 1")
    values, finites, choices, scale, edge_action = _bounded_rounds(bp, k, backend)

    trace = SynthesisTrace(BOUNDED)
    for i in range(1, len(values)):
        changed = sum(1 for a, b in zip(values[i - 1], values[i]) if a != b)
        changed += sum(1 for a, b in zip(finites[i - 1], finites[i]) if a != b)
        trace.entries.append((changed, None, sum(finites[i])))

    last = len(values) - 1
    if not finites[last][bp.init]:
        raise Infeasible("no suitable strategy exists for given bound", trace)

    layers = [{b: edge_action[e] for b, e in enumerate(layer) if e >= 0}
              for layer in choices]
    return Strategy(bp, layers[last], _finite_map(values[last], finites[last], scale),
                    kind=BOUNDED, bound=k, layers=layers, trace=trace)


def wtg_profile(bp: BeliefProduct, k_max: int, backend=None) -> list:
    """``wtg(b_init)`` for k = 1..k_max; ``None`` marks an infeasible bound."""
    if k_max < 1:
        raise ValueError("k_max must be at least 1")
    values, finites, _, scale, _ = _bounded_rounds(bp, k_max, backend)
    out = []
    for k in range(1, k_max + 1):
        i = min(k, len(values) - 1)
        out.append(Fraction(values[i][bp.init], scale) if finites[i][bp.init] else None)
    return out
