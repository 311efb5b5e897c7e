"""Non-deterministic transition systems with costed observation modes."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from collections import deque
from typing import Mapping, Sequence


class ModelError(ValueError):
    """Raised when a raw model violates one or more structural invariants.

    ``violations`` holds every problem found, each as a human-readable string
    prefixed with the location it was found at.
    """

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


def to_cost(value) -> Fraction:
    """Parse a cost (int, decimal string, Fraction) into an exact rational.

    Floats are routed through ``str`` so that ``0.1`` becomes ``1/10``.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise ValueError(f"invalid cost {value!r}")
    if isinstance(value, float):
        value = repr(value)
    try:
        return Fraction(value)
    except (ValueError, TypeError, ZeroDivisionError):
        raise ValueError(f"invalid cost {value!r}") from None


@dataclass(frozen=True)
class ObservationMode:
    name: str
    cost: Fraction
    obs_fn: Mapping[str, frozenset]


@dataclass(frozen=True)
class NtsModel:
    states: tuple
    actions: tuple
    transitions: Mapping[tuple, tuple]
    init_state: str
    atomic_props: tuple
    labels: Mapping[str, frozenset]
    observations: tuple
    modes: tuple
    init_mode: str
    _mode_index: dict = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "_mode_index",
                           {m.name: m for m in self.modes})

    def mode(self, name) -> ObservationMode:
        try:
            return self._mode_index[name]
        except KeyError:
            raise KeyError(f"unknown mode {name}") from None

    @property
    def mode_names(self):
        return tuple(m.name for m in self.modes)

    def label(self, state) -> frozenset:
        return self.labels.get(state, frozenset())


def _as_seq(raw, key, violations):
    value = raw.get(key)
    if value is None:
        violations.append(f"{key}: missing")
        return []
    if isinstance(value, (str, bytes)) or not isinstance(value, Sequence):
        violations.append(f"{key}: expected a list")
        return []
    return list(value)


def _dedupe(seq, key, violations):
    seen = {}
    for item in seq:
        if item in seen:
            violations.append(f"{key}: duplicate entry {item}")
        seen.setdefault(item, None)
    return tuple(seen)


def validate_model(raw) -> NtsModel:
    """Build an :class:`NtsModel` from a plain mapping, checking every invariant.

    ``raw`` uses the same keys as the JSON model file: ``states``, ``actions``,
    ``transitions`` (list of ``{from, action, to}``), ``init``, ``ap``,
    ``labels``, ``observations``, ``modes`` (list of ``{name, cost, obs}``) and
    ``init_mode``.  All violations are collected before raising
    :class:`ModelError`, so the caller sees the full list at once.
    """
    v: list[str] = []

    states = _dedupe(_as_seq(raw, "states", v), "states", v)
    actions = _dedupe(_as_seq(raw, "actions", v), "actions", v)
    aps = _dedupe(_as_seq(raw, "ap", v) if "ap" in raw else [], "ap", v)
    observations = _dedupe(
        _as_seq(raw, "observations", v) if "observations" in raw else [],
        "observations", v)
    if not states:
        v.append("states: must be non-empty")
    if not actions:
        v.append("actions: must be non-empty")
    state_set, action_set = set(states), set(actions)
    ap_set, obs_set = set(aps), set(observations)

    trans: dict[tuple, set] = {}
    for i, t in enumerate(_as_seq(raw, "transitions", v)):
        where = f"transitions[{i}]"
        if not isinstance(t, Mapping):
            v.append(f"{where}: expected an object")
            continue
        src, act, dst = t.get("from"), t.get("action"), t.get("to")
        if src not in state_set:
            v.append(f"{where}: unknown state {src}")
        if act not in action_set:
            v.append(f"{where}: unknown action {act}")
        if isinstance(dst, str) or not isinstance(dst, Sequence):
            v.append(f"{where}: 'to' must be a list of states")
            continue
        for d in dst:
            if d not in state_set:
                v.append(f"{where}: unknown state {d}")
        trans.setdefault((src, act), set()).update(dst)

    init = raw.get("init")
    if init not in state_set:
        v.append(f"init: unknown state {init}")

    labels: dict[str, frozenset] = {}
    raw_labels = raw.get("labels", {})
    if not isinstance(raw_labels, Mapping):
        v.append("labels: expected an object")
        raw_labels = {}
    for s, props in raw_labels.items():
        if s not in state_set:
            v.append(f"labels: unknown state {s}")
            continue
        for p in props:
            if p not in ap_set:
                v.append(f"labels[{s}]: unknown proposition {p}")
        labels[s] = frozenset(props)

    modes = []
    seen_modes = set()
    for i, m in enumerate(_as_seq(raw, "modes", v)):
        where = f"modes[{i}]"
        if not isinstance(m, Mapping):
            v.append(f"{where}: expected an object")
            continue
        name = m.get("name")
        if not isinstance(name, str) or not name:
            v.append(f"{where}: missing name")
            continue
        if name in seen_modes:
            v.append(f"{where}: duplicate mode {name}")
        seen_modes.add(name)
        try:
            cost = to_cost(m.get("cost"))
            if cost < 0:
                v.append(f"{where}: negative cost {cost}")
        except ValueError as exc:
            v.append(f"{where}: {exc}")
            cost = Fraction(0)
        obs_raw = m.get("obs", {})
        if not isinstance(obs_raw, Mapping):
            v.append(f"{where}: 'obs' must be an object")
            obs_raw = {}
        obs_fn = {}
        for s, os_ in obs_raw.items():
            if s not in state_set:
                v.append(f"{where}.obs: unknown state {s}")
                continue
            for o in os_:
                if o not in obs_set:
                    v.append(f"{where}.obs[{s}]: unknown observation {o}")
            obs_fn[s] = frozenset(os_)
        # states without an entry observe nothing
        obs_fn = {s: obs_fn.get(s, frozenset()) for s in states}
        modes.append(ObservationMode(name, cost, obs_fn))
    if not modes:
        v.append("modes: must be non-empty")

    init_mode = raw.get("init_mode")
    if init_mode not in seen_modes:
        v.append(f"init_mode: unknown mode {init_mode}")

    if not v:
        # dead ends: every reachable state must enable at least one action
        seen, queue = {init}, deque([init])
        while queue:
            s = queue.popleft()
            succ = [trans.get((s, a), ()) for a in actions]
            if not any(succ):
                v.append(f"dead end {s}")
            for targets in succ:
                for t in sorted(targets, key=states.index):  # stable BFS
                    if t not in seen:
                        seen.add(t)
                        queue.append(t)

    if v:
        raise ModelError(v)

    order = {s: i for i, s in enumerate(states)}
    transitions = {k: tuple(sorted(val, key=order.__getitem__))
                   for k, val in trans.items() if val}
    return NtsModel(
        states=states, actions=actions, transitions=transitions,
        init_state=init, atomic_props=aps,
        labels={s: labels.get(s, frozenset()) for s in states},
        observations=observations, modes=tuple(modes), init_mode=init_mode)


def post(model: NtsModel, state, action) -> tuple:
    """Successors in declaration order; empty when the action is disabled."""
    return model.transitions.get((state, action), ())


def observe(model: NtsModel, mode, state) -> frozenset:
    return model.mode(mode).obs_fn[state]


def run_cost(model: NtsModel, run) -> Fraction:
    """Cost of a finite configuration run: the sum of mode costs over all of it.

    ``run`` is a sequence of ``(state, mode)`` pairs; every configuration
    is charged, the first one included.
    """
    if not run:
        raise ValueError("run must be non-empty")
    total = Fraction(0)
    for i, (s, m) in enumerate(run):
        if i:
            prev = run[i - 1][0]
            if not any(s in post(model, prev, a) for a in model.actions):
                raise ValueError(f"no transition {prev} -> {s}")
        total += model.mode(m).cost
    return total


def reachable_states(model: NtsModel) -> list:
    seen, order, queue = {model.init_state}, [model.init_state], deque([model.init_state])
    while queue:
        s = queue.popleft()
        for a in model.actions:
            for t in post(model, s, a):
                if t not in seen:
                    seen.add(t)
                    order.append(t)
                    queue.append(t)
    return order


def model_to_raw(model: NtsModel) -> dict:
    """Inverse of :func:`validate_model`; costs become decimal/fraction strings."""
    trans = []
    for s in model.states:
        for a in model.actions:
            targets = post(model, s, a)
            if targets:
                trans.append({"from": s, "action": a, "to": list(targets)})
    return {
        "states": list(model.states),
        "actions": list(model.actions),
        "transitions": trans,
        "init": model.init_state,
        "ap": list(model.atomic_props),
        "labels": {s: sorted(model.labels[s]) for s in model.states
                   if model.labels[s]},
        "observations": list(model.observations),
        "modes": [{"name": m.name, "cost": format_cost(m.cost),
                   "obs": {s: sorted(m.obs_fn[s]) for s in model.states
                           if m.obs_fn[s]}}
                  for m in model.modes],
        "init_mode": model.init_mode,
    }


def format_cost(c: Fraction) -> str:
    if c.denominator == 1:
        return str(c.numerator)
    # terminating decimals print as decimals, everything else as p/q
    d = c.denominator
    while d % 2 == 0:
        d //= 2
    while d % 5 == 0:
        d //= 5
    if d == 1:
        from decimal import Decimal, getcontext
        getcontext().prec = 60
        return format(Decimal(c.numerator) / Decimal(c.denominator), "f")
    return f"{c.numerator}/{c.denominator}"
