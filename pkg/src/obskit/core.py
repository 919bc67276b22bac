"""Finite observers, environments, and the closed feedback loop between them.

An ``Observer`` is a finite machine that senses an input, updates its
internal state, and emits an action from the new state.  An ``Environment``
is the dual machine: it consumes the observer's action and offers the next
sensor reading.  ``CoupledSystem`` wires the two into the closed loop

    reading -> state update -> action -> environment update -> next reading

and ``CoupledSystem.run`` records that loop as a ``Trace``.

All values are immutable after construction, so shared instances may be
used freely from multiple threads.
"""

from __future__ import annotations

from collections.abc import Hashable, Iterable, Iterator, Mapping
from dataclasses import dataclass

from .errors import DefinitionError, IdentifierError, IncompatibleAlphabetsError

Ident = Hashable


def _ordered_unique(label: str, items: Iterable[Ident]) -> tuple[Ident, ...]:
    out = tuple(items)
    if not out:
        raise DefinitionError(f"{label} must not be empty")
    if len(set(out)) != len(out):
        raise DefinitionError(f"duplicate identifiers in {label}: {out!r}")
    return out


def _check_total(label: str, mapping: Mapping, keys: list, values: tuple) -> dict:
    table = dict(mapping)
    missing = [k for k in keys if k not in table]
    if missing:
        raise DefinitionError(f"{label} is not total, missing {missing[0]!r}")
    if len(table) != len(keys):
        extra = set(table) - set(keys)
        raise DefinitionError(f"{label} has entries outside its domain: {sorted(map(repr, extra))}")
    allowed = set(values)
    for k, v in table.items():
        if v not in allowed:
            raise DefinitionError(f"{label}[{k!r}] = {v!r} is not a declared target")
    return table


@dataclass(frozen=True)
class Observer:
    """A finite sensing/acting machine.

    ``transition`` maps (state, input) to the next state and ``output_map``
    maps each state to the action it emits.  ``boundary`` is a free-form
    description of what counts as inside the machine; it carries no
    dynamics.  Identifier sets keep their construction order, and every
    algorithm in the package iterates in that order, so results are
    reproducible.
    """

    states: tuple[Ident, ...]
    inputs: tuple[Ident, ...]
    outputs: tuple[Ident, ...]
    transition: dict
    output_map: dict
    boundary: str = ""

    def __post_init__(self) -> None:
        object.__setattr__(self, "states", _ordered_unique("states", self.states))
        object.__setattr__(self, "inputs", _ordered_unique("inputs", self.inputs))
        object.__setattr__(self, "outputs", _ordered_unique("outputs", self.outputs))
        keys = [(x, y) for x in self.states for y in self.inputs]
        object.__setattr__(
            self, "transition", _check_total("transition", self.transition, keys, self.states)
        )
        object.__setattr__(
            self, "output_map",
            _check_total("output_map", self.output_map, list(self.states), self.outputs),
        )

    def step(self, state: Ident, received: Ident) -> Ident:
        """Next internal state after sensing ``received`` in ``state``."""
        if state not in self.output_map:
            raise IdentifierError(f"unknown state {state!r}")
        if (state, received) not in self.transition:
            raise IdentifierError(f"unknown input {received!r}")
        return self.transition[(state, received)]

    def output(self, state: Ident) -> Ident:
        """Action emitted while in ``state``."""
        try:
            return self.output_map[state]
        except KeyError:
            raise IdentifierError(f"unknown state {state!r}") from None

    def respond(self, start: Ident, word: Iterable[Ident]) -> tuple[Ident, ...]:
        """Open-loop run: feed a word of inputs, collect the emitted actions."""
        state = start
        emitted = []
        for symbol in word:
            state = self.step(state, symbol)
            emitted.append(self.output(state))
        return tuple(emitted)


@dataclass(frozen=True)
class Environment:
    """The machine on the far side of an observer's boundary.

    ``transition`` maps (environment state, observer action) to the next
    environment state; ``observation`` maps each environment state to the
    reading it offers the observer.
    """

    states: tuple[Ident, ...]
    actions: tuple[Ident, ...]
    transition: dict
    observation: dict

    def __post_init__(self) -> None:
        object.__setattr__(self, "states", _ordered_unique("environment states", self.states))
        object.__setattr__(self, "actions", _ordered_unique("actions", self.actions))
        keys = [(s, a) for s in self.states for a in self.actions]
        object.__setattr__(
            self, "transition", _check_total("environment transition", self.transition, keys, self.states)
        )
        table = dict(self.observation)
        missing = [s for s in self.states if s not in table]
        if missing:
            raise DefinitionError(f"observation map is not total, missing {missing[0]!r}")
        if len(table) != len(self.states):
            raise DefinitionError("observation map has entries outside the state set")
        object.__setattr__(self, "observation", table)

    def observe(self, state: Ident) -> Ident:
        try:
            return self.observation[state]
        except KeyError:
            raise IdentifierError(f"unknown environment state {state!r}") from None

    def react(self, state: Ident, action: Ident) -> Ident:
        try:
            return self.transition[(state, action)]
        except KeyError:
            raise IdentifierError(f"unknown environment state or action ({state!r}, {action!r})") from None


@dataclass(frozen=True)
class TraceRecord:
    """One loop iteration: reading y, new state x, action z, new env state s."""

    t: int
    y: Ident
    x: Ident
    z: Ident
    s: Ident


@dataclass(frozen=True)
class Trace:
    """Time-indexed record of a closed-loop run."""

    steps: tuple[TraceRecord, ...] = ()

    def __len__(self) -> int:
        return len(self.steps)

    def __iter__(self) -> Iterator[TraceRecord]:
        return iter(self.steps)

    def joint_states(self) -> tuple[tuple[Ident, Ident], ...]:
        """The (observer state, environment state) pair after each step."""
        return tuple((r.x, r.s) for r in self.steps)


JointState = tuple[Ident, Ident]


@dataclass(frozen=True)
class CoupledSystem:
    """An observer wired to an environment in a closed loop.

    Construction rejects incompatible alphabets: every reading the
    environment can offer must be an observer input, and every observer
    action must be an environment action.
    """

    observer: Observer
    environment: Environment

    def __post_init__(self) -> None:
        readings = set(self.environment.observation.values())
        unknown = readings - set(self.observer.inputs)
        if unknown:
            raise IncompatibleAlphabetsError(
                f"environment offers readings the observer cannot sense: {sorted(map(repr, unknown))}"
            )
        stray = set(self.observer.outputs) - set(self.environment.actions)
        if stray:
            raise IncompatibleAlphabetsError(
                f"observer actions the environment does not accept: {sorted(map(repr, stray))}"
            )

    def _check_joint(self, joint: JointState) -> None:
        x, s = joint
        if x not in self.observer.output_map:
            raise IdentifierError(f"unknown observer state {x!r}")
        if s not in self.environment.observation:
            raise IdentifierError(f"unknown environment state {s!r}")

    def step(self, joint: JointState, when: int = 0) -> tuple[JointState, TraceRecord]:
        """Advance the loop once.

        In order: the environment offers y, the observer updates to x', the
        new state emits z, and the environment reacts to z.
        """
        self._check_joint(joint)
        x, s = joint
        y = self.environment.observe(s)
        x2 = self.observer.step(x, y)
        z = self.observer.output(x2)
        s2 = self.environment.react(s, z)
        return (x2, s2), TraceRecord(when, y, x2, z, s2)

    def run(self, joint: JointState, horizon: int) -> Trace:
        """Iterate the loop ``horizon`` times and record every step."""
        if horizon < 0:
            raise DefinitionError("horizon must be non-negative")
        self._check_joint(joint)
        records = []
        current = joint
        for t in range(horizon):
            current, record = self.step(current, t)
            records.append(record)
        return Trace(tuple(records))

    def reachable_joints(self, starts: Iterable[JointState]) -> tuple[JointState, ...]:
        """Joint states visited by the loop from each start, starts included."""
        seen: dict[JointState, None] = {}
        for start in starts:
            self._check_joint(start)
            current = start
            local = set()
            while current not in local:
                local.add(current)
                seen.setdefault(current, None)
                current, _ = self.step(current)
        return tuple(seen)


@dataclass(frozen=True)
class MinimalityReport:
    """Per-condition verdicts for the minimal-observer test."""

    has_inputs: bool
    has_outputs: bool
    nontrivial_dynamics: bool
    actions_can_change_environment: bool
    readings_track_environment: bool

    @property
    def feedback_closure(self) -> bool:
        return self.actions_can_change_environment and self.readings_track_environment

    @property
    def passed(self) -> bool:
        return (
            self.has_inputs
            and self.has_outputs
            and self.nontrivial_dynamics
            and self.feedback_closure
        )

    def conditions(self) -> dict[str, bool]:
        return {
            "has_inputs": self.has_inputs,
            "has_outputs": self.has_outputs,
            "nontrivial_dynamics": self.nontrivial_dynamics,
            "actions_can_change_environment": self.actions_can_change_environment,
            "readings_track_environment": self.readings_track_environment,
        }


def validate_minimal(system: CoupledSystem, starts: Iterable[JointState]) -> MinimalityReport:
    """Check the minimality conditions of a coupled system.

    The cardinality conditions are checked on the observer alone.  Feedback
    closure is approximated by two one-step non-constancy checks over the
    environment states reachable from ``starts`` under the closed loop:
    some reachable environment state must react differently to at least two
    actions, and the observation map must not be constant on the reachable
    states.  The check is sound but not complete; a pass can still hide a
    loop whose actions never matter further downstream.
    """
    obs = system.observer
    env = system.environment
    reachable = system.reachable_joints(starts)
    env_reachable = []
    for _, s in reachable:
        if s not in env_reachable:
            env_reachable.append(s)

    actions_matter = any(
        len({env.transition[(s, a)] for a in env.actions}) > 1 for s in env_reachable
    )
    readings_vary = len({env.observation[s] for s in env_reachable}) > 1

    return MinimalityReport(
        has_inputs=len(obs.inputs) >= 1,
        has_outputs=len(obs.outputs) >= 1,
        nontrivial_dynamics=len(obs.states) > 1,
        actions_can_change_environment=actions_matter,
        readings_track_environment=readings_vary,
    )
