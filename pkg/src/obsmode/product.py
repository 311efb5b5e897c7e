"""Synchronous product of an NTS with a DFA."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from .model import NtsModel, post
from .scltl import Dfa

SOURCE = "source"
TARGET = "target"
CONVENTIONS = (SOURCE, TARGET)


@dataclass(frozen=True)
class Product:
    """Reachable fragment of ``model x dfa``.

    States are ``(nts_state, dfa_state)`` pairs indexed in BFS order;
    ``succ[i][a]`` is the tuple of successor indices under ``actions[a]``.
    """

    states: tuple
    actions: tuple
    succ: tuple
    init: int
    accepting: frozenset
    convention: str
    model: NtsModel
    dfa: Dfa

    def index(self, state) -> int:
        return self._index[state]

    def __post_init__(self):
        object.__setattr__(self, "_index",
                           {s: i for i, s in enumerate(self.states)})

    def label(self, i) -> frozenset:
        return self.model.label(self.states[i][0])

    def post(self, i, a) -> tuple:
        return self.succ[i][a]


@dataclass(frozen=True)
class ProductStats:
    state_count: int
    transition_count: int
    degree_of_nondeterminism: int


def build_product(model: NtsModel, dfa: Dfa, convention: str = TARGET) -> Product:
    """Build the reachable product.

    With ``convention="source"`` the DFA reads the label of the state being
    left, so ``(s, q) -a-> (s', delta(q, L(s)))`` and the initial state is
    ``(s_init, q0)``.  With ``"target"`` it reads the label of the state being
    entered, and the initial state already consumed ``L(s_init)``.
    """
    if convention not in CONVENTIONS:
        raise ValueError(f"unknown labeling convention {convention!r}")
    if set(dfa.aps) != set(model.atomic_props):
        raise ValueError("alphabet mismatch: DFA propositions "
                         f"{sorted(dfa.aps)} vs model {sorted(model.atomic_props)}")

    letter = {s: dfa.letter_index(model.label(s)) for s in model.states}
    if convention == SOURCE:
        init = (model.init_state, dfa.init)
    else:
        init = (model.init_state, dfa.delta[dfa.init][letter[model.init_state]])

    index = {init: 0}
    states = [init]
    succ = []
    queue = deque([init])
    while queue:
        s, q = queue.popleft()
        row = []
        for a in model.actions:
            targets = []
            for t in post(model, s, a):
                qn = dfa.delta[q][letter[s] if convention == SOURCE else letter[t]]
                nxt = (t, qn)
                if nxt not in index:
                    index[nxt] = len(states)
                    states.append(nxt)
                    queue.append(nxt)
                targets.append(index[nxt])
            row.append(tuple(sorted(targets)))
        succ.append(tuple(row))

    accepting = frozenset(i for i, (_, q) in enumerate(states) if q in dfa.accepting)
    return Product(states=tuple(states), actions=model.actions, succ=tuple(succ),
                   init=0, accepting=accepting, convention=convention,
                   model=model, dfa=dfa)


def product_stats(p: Product) -> ProductStats:
    """Counts; a transition is an enabled (state, action) pair."""
    transitions = 0
    dn = 0
    for row in p.succ:
        for targets in row:
            if targets:
                transitions += 1
                dn = max(dn, len(targets))
    return ProductStats(len(p.states), transitions, dn)


def product_to_dot(p: Product) -> str:
    lines = ["digraph product {", '  __start [shape=point];']
    for i, (s, q) in enumerate(p.states):
        shape = "doublecircle" if i in p.accepting else "ellipse"
        lines.append(f'  p{i} [shape={shape}, label="({s},q{q})"];')
    lines.append(f"  __start -> p{p.init};")
    for i, row in enumerate(p.succ):
        for a, targets in enumerate(row):
            for t in targets:
                lines.append(f'  p{i} -> p{t} [label="{p.actions[a]}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"
