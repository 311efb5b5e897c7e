"""Weighted belief product over an NTS x DFA product."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from fractions import Fraction

from .product import Product


@dataclass(frozen=True)
class BeliefProduct:
    """Reachable belief graph.

    A belief is a set of product states together with the observation mode
    that is active in them.  ``beliefs[i]`` is the sorted tuple of
    product-state indices and ``belief_modes[i]`` the mode index.  Belief actions
    are ``(action_index, mode_index)`` pairs listed in ``belief_actions``
    (actions major, modes minor).  ``edges[i]`` maps an offered belief-action
    index to the tuple of successor belief indices; disabled belief actions
    are absent.  ``weights[j]`` is the cost of belief action ``j``.
    Beliefs that are accepting or that contain a product state with no way
    left to acceptance are not expanded, so their rows are empty.
    """

    product: Product
    beliefs: tuple
    belief_modes: tuple
    belief_actions: tuple
    edges: tuple
    weights: tuple
    init: int
    accepting: frozenset
    m_init: int

    def __post_init__(self):
        object.__setattr__(self, "_index",
                           {(b, m): i for i, (b, m)
                            in enumerate(zip(self.beliefs, self.belief_modes))})

    def _key(self, belief, mode):
        if isinstance(mode, str):
            mode = self.model.mode_names.index(mode)
        return tuple(sorted(belief)), mode

    def index(self, belief, mode) -> int:
        """Index of the belief with product-state members ``belief``."""
        return self._index[self._key(belief, mode)]

    def find(self, belief, mode):
        return self._index.get(self._key(belief, mode))

    def mode_name(self, i) -> str:
        return self.model.modes[self.belief_modes[i]].name

    @property
    def model(self):
        return self.product.model

    def action_name(self, j):
        a, m = self.belief_actions[j]
        return (self.product.actions[a], self.model.modes[m].name)

    def action_index(self, action, mode) -> int:
        a = self.product.actions.index(action)
        m = self.model.mode_names.index(mode)
        return a * len(self.model.modes) + m

    def members(self, i):
        """Belief ``i`` as (nts_state, dfa_state) pairs."""
        return [self.product.states[p] for p in self.beliefs[i]]

    def observation(self, i, mode_index) -> frozenset:
        """Shared observation of the belief's members under a mode, if any."""
        obs_fn = self.model.modes[mode_index].obs_fn
        seen = {obs_fn[self.product.states[p][0]] for p in self.beliefs[i]}
        return next(iter(seen)) if len(seen) == 1 else None

    def weight(self, j) -> Fraction:
        return self.weights[j]


@dataclass(frozen=True)
class BeliefStats:
    belief_count: int
    transition_count: int


def belief_successors(product: Product, modes, belief, action: int, mode: int) -> list:
    """Split the ``action``-successors of ``belief`` by their observation
    under ``modes[mode]``.

    Returns a list of sorted member tuples, ordered by member tuple.  The list
    is empty when some member has no ``action``-successor.
    """
    obs_fn = modes[mode].obs_fn
    reached = set()
    for p in belief:
        targets = product.succ[p][action]
        if not targets:
            return []
        reached.update(targets)
    groups = {}
    for p in reached:
        groups.setdefault(obs_fn[product.states[p][0]], []).append(p)
    return sorted(tuple(sorted(g)) for g in groups.values())


def dead_dfa_states(dfa) -> frozenset:
    """DFA states from which no accepting state is reachable."""
    live = set(dfa.accepting)
    changed = True
    while changed:
        changed = False
        for q, row in enumerate(dfa.delta):
            if q not in live and any(t in live for t in row):
                live.add(q)
                changed = True
    return frozenset(q for q in range(len(dfa.delta)) if q not in live)


def build_belief(product: Product, modes=None, m_init=None) -> BeliefProduct:
    """Materialize every belief reachable from ``({product.init}, m_init)``.

    ``modes`` defaults to the model's modes and ``m_init`` to its initial
    mode; either may be given by name.
    """
    model = product.model
    if modes is None:
        modes = model.modes
    modes = tuple(modes)
    if m_init is None:
        m_init = model.init_mode
    if isinstance(m_init, str):
        m_init = [m.name for m in modes].index(m_init)

    belief_actions = tuple((a, m) for a in range(len(product.actions))
                           for m in range(len(modes)))
    weights = tuple(modes[m].cost for _, m in belief_actions)

    dead = dead_dfa_states(product.dfa)
    hopeless = {p for p, (_, q) in enumerate(product.states) if q in dead}

    def is_accepting(b):
        return all(p in product.accepting for p in b)

    init = ((product.init,), m_init)
    index = {init: 0}
    keys = [init]
    edges = []
    queue = deque([init])
    while queue:
        b, _ = queue.popleft()
        row = {}
        edges.append(row)
        # decided beliefs: nothing after them matters for synthesis
        if is_accepting(b) or any(p in hopeless for p in b):
            continue
        for j, (a, m) in enumerate(belief_actions):
            succ = belief_successors(product, modes, b, a, m)
            if not succ:
                continue
            ids = []
            for nb in succ:
                key = (nb, m)
                if key not in index:
                    index[key] = len(keys)
                    keys.append(key)
                    queue.append(key)
                ids.append(index[key])
            row[j] = tuple(ids)

    accepting = frozenset(i for i, (b, _) in enumerate(keys) if is_accepting(b))
    return BeliefProduct(product=product,
                         beliefs=tuple(b for b, _ in keys),
                         belief_modes=tuple(m for _, m in keys),
                         belief_actions=belief_actions, edges=tuple(edges),
                         weights=weights, init=0, accepting=accepting,
                         m_init=m_init)


def belief_stats(bp: BeliefProduct) -> BeliefStats:
    """A transition is a (belief, belief action, successor belief) triple."""
    return BeliefStats(len(bp.beliefs),
                       sum(len(s) for row in bp.edges for s in row.values()))


def belief_to_dot(bp: BeliefProduct) -> str:
    lines = ["digraph belief {", '  __start [shape=point];']
    for i in range(len(bp.beliefs)):
        shape = "doublecircle" if i in bp.accepting else "box"
        label = ",".join(f"({s},q{q})" for s, q in bp.members(i))
        lines.append(f'  b{i} [shape={shape}, label="{{{label}}} {bp.mode_name(i)}"];')
    lines.append(f"  __start -> b{bp.init};")
    for i, row in enumerate(bp.edges):
        for j, succ in row.items():
            a, m = bp.action_name(j)
            for t in succ:
                lines.append(f'  b{i} -> b{t} [label="({a},{m}), {bp.weights[j]}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"
