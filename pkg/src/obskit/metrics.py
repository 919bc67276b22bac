"""Quantitative measures over observers and coupled runs.

Complexity is the log-capacity of the behaviorally reduced machine;
redundancy is whatever the reduction removed.  Adaptation time counts loop
steps until a deterministic coupled run settles, and the hitting-time
solver bounds the stochastic analog through the standard first-passage
linear system.
"""

from __future__ import annotations

import math
from collections.abc import Callable, Sequence
from dataclasses import dataclass

import numpy as np

from .core import CoupledSystem, JointState, Observer
from .errors import CapExceededError, DefinitionError, IdentifierError, NumericalError
from .morphism import minimize

ROW_SUM_TOLERANCE = 1e-9

TRANSIENT_TO_CYCLE = "transient-to-cycle"
GOAL_REACHED = "goal-reached"
GOAL_UNREACHABLE = "goal-unreachable"


@dataclass(frozen=True)
class ComplexityReport:
    """Log-capacity split into genuine complexity and redundancy (nats)."""

    raw_log: float
    redundancy: float
    complexity: float
    reduced_sizes: tuple[int, int, int]


def complexity(obs: Observer) -> ComplexityReport:
    """Measure an observer's capacity after removing behavioral redundancy.

    The raw capacity is ln(|states| * |inputs| * |outputs|).  Reducing the
    machine gives the complexity ln of the reduced product; redundancy is
    the difference.  Relabeled observers get bit-identical reports.
    """
    reduced, _, _ = minimize(obs)
    raw = math.log(len(obs.states) * len(obs.inputs) * len(obs.outputs))
    kept = math.log(len(reduced.states) * len(reduced.inputs) * len(reduced.outputs))
    return ComplexityReport(
        raw_log=raw,
        redundancy=raw - kept,
        complexity=kept,
        reduced_sizes=(len(reduced.states), len(reduced.inputs), len(reduced.outputs)),
    )


@dataclass(frozen=True)
class AdaptationResult:
    """How a deterministic coupled run settled.

    ``steps`` is the adaptation count: for a goal run, the first step index
    satisfying the predicate; for a free run, the step at which the joint
    state either stops changing (a fixed point) or completes its first
    return to an earlier state (a cycle of period > 1).
    """

    kind: str
    steps: int | None = None
    cycle_period: int | None = None


def adaptation_time(
    system: CoupledSystem,
    joint: JointState,
    goal: Callable[[JointState], bool] | None = None,
    cap: int | None = None,
) -> AdaptationResult:
    """Count loop steps until the coupled run settles or meets a goal.

    Without a goal the run always settles: a deterministic finite loop
    revisits a joint state within |states| * |env states| steps.  With a
    goal, a revisit before satisfaction proves the goal unreachable.  The
    cap guards goal runs over state spaces too large to exhaust; exceeding
    it raises ``CapExceededError``.
    """
    if cap is None:
        cap = len(system.observer.states) * len(system.environment.states) + 1
    if cap < 1:
        raise DefinitionError("cap must be at least 1")
    system._check_joint(joint)

    if goal is not None and goal(joint):
        return AdaptationResult(kind=GOAL_REACHED, steps=0)

    seen: dict[JointState, int] = {joint: 0}
    current = joint
    for t in range(1, cap + 1):
        current, _ = system.step(current)
        if goal is not None and goal(current):
            return AdaptationResult(kind=GOAL_REACHED, steps=t)
        if current in seen:
            if goal is not None:
                return AdaptationResult(kind=GOAL_UNREACHABLE)
            period = t - seen[current]
            settled = seen[current] if period == 1 else t
            return AdaptationResult(
                kind=TRANSIENT_TO_CYCLE, steps=settled, cycle_period=period
            )
        seen[current] = t
    raise CapExceededError(f"no revisit or goal within {cap} steps")


def expected_hitting_time(
    transition_matrix: Sequence[Sequence[float]],
    start: int,
    goal: Sequence[int],
) -> float:
    """Expected steps for a Markov chain to first reach the goal set.

    Solves t = 1 + Q t on the non-goal states by dense LU elimination with
    partial pivoting.  Returns ``math.inf`` when no positive-probability
    path connects the start to the goal.  A singular reduced system (a
    closed non-goal component) raises ``NumericalError``.
    """
    P = np.asarray(transition_matrix, dtype=float)
    if P.ndim != 2 or P.shape[0] != P.shape[1] or P.shape[0] == 0:
        raise DefinitionError("transition matrix must be square and non-empty")
    n = P.shape[0]
    if np.any(P < 0.0):
        raise DefinitionError("transition probabilities must be non-negative")
    bad = np.nonzero(np.abs(P.sum(axis=1) - 1.0) > ROW_SUM_TOLERANCE)[0]
    if bad.size:
        raise DefinitionError(f"row {int(bad[0])} does not sum to 1")

    goal_set = set(int(i) for i in goal)
    if not goal_set:
        raise DefinitionError("goal set must not be empty")
    if not all(0 <= i < n for i in goal_set) or not 0 <= start < n:
        raise IdentifierError("start and goal indices must address matrix rows")

    if start in goal_set:
        return 0.0

    # reachability pre-pass over positive-probability edges
    frontier = [start]
    reachable = {start}
    while frontier:
        i = frontier.pop()
        for j in np.nonzero(P[i] > 0.0)[0]:
            j = int(j)
            if j not in reachable:
                reachable.add(j)
                frontier.append(j)
    if not (reachable & goal_set):
        return math.inf

    others = [i for i in range(n) if i not in goal_set]
    Q = P[np.ix_(others, others)]
    A = np.eye(len(others)) - Q
    try:
        t = np.linalg.solve(A, np.ones(len(others)))
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"reduced first-passage system is singular: {exc}") from None
    return float(t[others.index(start)])
