"""Online execution of a belief strategy from observations."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .belief import BeliefProduct

RUNNING = "running"
SATISFIED = "satisfied"
OFF_STRATEGY = "off-strategy"


class SessionError(RuntimeError):
    pass


@dataclass
class Session:
    """Mutable execution state; one per controlled system.

    ``history`` holds ``(belief, belief_action, observation)`` triples.
    ``accumulated_cost`` starts with the initial mode's cost.
    """

    strategy: object
    bp: BeliefProduct
    current_belief: int
    accumulated_cost: Fraction
    status: str = RUNNING
    history: list = field(default_factory=list)
    pending: int | None = None

    @property
    def steps(self) -> int:
        return len(self.history)

    @property
    def members(self):
        return self.bp.members(self.current_belief)


def start_session(strategy, bp: BeliefProduct = None) -> Session:
    bp = bp if bp is not None else strategy.bp
    cost = bp.model.modes[bp.m_init].cost
    if bp.init in bp.accepting:
        return Session(strategy, bp, bp.init, cost, SATISFIED)
    if strategy.action_at(bp.init, 0) is None:
        raise SessionError("strategy is not defined at the initial belief")
    return Session(strategy, bp, bp.init, cost)


def next_command(session: Session):
    """``(action, mode)`` to apply now."""
    if session.status != RUNNING:
        raise SessionError(f"session is {session.status}")
    j = session.strategy.action_at(session.current_belief, session.steps)
    if j is None:
        raise SessionError(f"no command for belief {session.current_belief}")
    session.pending = j
    return session.bp.action_name(j)


def feed_observation(session: Session, obs) -> Session:
    """Advance to the successor belief that produced ``obs``.

    An observation no successor can produce moves the session to the
    off-strategy status and keeps the last consistent belief.
    """
    if session.status != RUNNING:
        raise SessionError(f"session is {session.status}")
    if session.pending is None:
        next_command(session)
    j = session.pending
    bp = session.bp
    obs = frozenset(obs)
    _, m = bp.belief_actions[j]
    nxt = None
    for b2 in bp.edges[session.current_belief].get(j, ()):
        if bp.observation(b2, m) == obs:
            nxt = b2
            break
    if nxt is None:
        session.status = OFF_STRATEGY
        session.pending = None
        return session
    session.history.append((session.current_belief, j, obs))
    session.accumulated_cost += bp.weights[j]
    session.current_belief = nxt
    session.pending = None
    if nxt in bp.accepting:
        session.status = SATISFIED
    return session


def replay(strategy, bp: BeliefProduct, obs_sequence, initial=None):
    """Feed ``obs_sequence`` from the start.

    ``initial``, when given, is the observation of the initial state under
    the initial mode; a mismatch is off-strategy.  Returns the command for
    the reached belief, or the session status when the session is no longer
    running.
    """
    session = start_session(strategy, bp)
    if initial is not None and bp.observation(bp.init, bp.m_init) != frozenset(initial):
        session.status = OFF_STRATEGY
    for obs in obs_sequence:
        if session.status != RUNNING:
            break
        feed_observation(session, obs)
    if session.status != RUNNING:
        return session.status
    return next_command(session)
