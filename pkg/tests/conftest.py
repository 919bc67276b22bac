"""Shared fixtures, random machine generators, and independent oracles.

The oracles here deliberately re-derive results from first principles
(exhaustive enumeration, transitive closure, Monte-Carlo simulation, a
fresh cellular-automaton implementation) so the tests check the library
against something it does not share code with.
"""

from __future__ import annotations

import random
from itertools import permutations
from pathlib import Path

import numpy as np
import pytest

from obskit.composition import default_registry
from obskit.core import CoupledSystem, Environment, Observer

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


@pytest.fixture(autouse=True)
def _fresh_registry():
    default_registry().clear()
    yield
    default_registry().clear()


# -- random machine generators -------------------------------------------------

def random_observer(rng: random.Random, max_size: int = 5, sizes=None) -> Observer:
    if sizes is None:
        sizes = (rng.randint(1, max_size), rng.randint(1, max_size), rng.randint(1, max_size))
    nx, ny, nz = sizes
    states = tuple(f"x{i}" for i in range(nx))
    inputs = tuple(f"y{j}" for j in range(ny))
    outputs = tuple(f"z{k}" for k in range(nz))
    transition = {(x, y): rng.choice(states) for x in states for y in inputs}
    output_map = {x: rng.choice(outputs) for x in states}
    return Observer(states, inputs, outputs, transition, output_map)


def relabeled(obs: Observer, rng: random.Random, prefix: str = "r") -> Observer:
    """Fresh names and a shuffled construction order; isomorphic by design."""
    def fresh(items, tag):
        names = [f"{prefix}{tag}{i}" for i in range(len(items))]
        rng.shuffle(names)
        return dict(zip(items, names))

    sx = fresh(obs.states, "s")
    sy = fresh(obs.inputs, "i")
    sz = fresh(obs.outputs, "o")
    new_states = [sx[x] for x in obs.states]
    new_inputs = [sy[y] for y in obs.inputs]
    new_outputs = [sz[z] for z in obs.outputs]
    rng.shuffle(new_states)
    rng.shuffle(new_inputs)
    rng.shuffle(new_outputs)
    return Observer(
        states=tuple(new_states),
        inputs=tuple(new_inputs),
        outputs=tuple(new_outputs),
        transition={(sx[x], sy[y]): sx[v] for (x, y), v in obs.transition.items()},
        output_map={sx[x]: sz[z] for x, z in obs.output_map.items()},
        boundary=obs.boundary,
    )


def random_environment(rng: random.Random, obs: Observer, n_env: int = 3) -> Environment:
    states = tuple(f"s{i}" for i in range(n_env))
    transition = {(s, z): rng.choice(states) for s in states for z in obs.outputs}
    observation = {s: rng.choice(obs.inputs) for s in states}
    return Environment(states, obs.outputs, transition, observation)


def random_system(rng: random.Random, max_size: int = 4, n_env: int = 4) -> CoupledSystem:
    obs = random_observer(rng, max_size=max_size)
    env = random_environment(rng, obs, n_env=rng.randint(1, n_env))
    return CoupledSystem(obs, env)


def relabel_environment(env: Environment, state_names: dict, action_map: dict,
                        reading_map: dict) -> Environment:
    """Rename environment states and translate alphabets via the given maps."""
    return Environment(
        states=tuple(state_names[s] for s in env.states),
        actions=tuple(action_map[a] for a in env.actions),
        transition={
            (state_names[s], action_map[a]): state_names[v]
            for (s, a), v in env.transition.items()
        },
        observation={state_names[s]: reading_map[r] for s, r in env.observation.items()},
    )


# -- isomorphism oracle ---------------------------------------------------------

def _tables(obs: Observer):
    si = {x: i for i, x in enumerate(obs.states)}
    zi = {z: k for k, z in enumerate(obs.outputs)}
    f = [[si[obs.transition[(x, y)]] for y in obs.inputs] for x in obs.states]
    g = [zi[obs.output_map[x]] for x in obs.states]
    return f, g


def brute_force_isomorphism(a: Observer, b: Observer):
    """Exhaustive search over every bijection triple, in lexicographic order.

    Returns the first valid (state, input, output) index-permutation triple
    or None.  The transition check does not involve the output permutation,
    so it is hoisted out of the innermost loop.
    """
    shape = (len(a.states), len(a.inputs), len(a.outputs))
    if shape != (len(b.states), len(b.inputs), len(b.outputs)):
        return None
    nx, ny, nz = shape
    fa, ga = _tables(a)
    fb, gb = _tables(b)
    for px in permutations(range(nx)):
        for py in permutations(range(ny)):
            if all(px[fa[i][j]] == fb[px[i]][py[j]] for i in range(nx) for j in range(ny)):
                for pz in permutations(range(nz)):
                    if all(pz[ga[i]] == gb[px[i]] for i in range(nx)):
                        return px, py, pz
    return None


def morphism_vectors(a: Observer, b: Observer, morphism):
    """Express a morphism as index-permutation vectors for oracle comparison."""
    px = tuple(b.states.index(morphism.state_map[x]) for x in a.states)
    py = tuple(b.inputs.index(morphism.input_map[y]) for y in a.inputs)
    pz = tuple(b.outputs.index(morphism.output_map[z]) for z in a.outputs)
    return px, py, pz


# -- cycle-detection oracle ------------------------------------------------------

def cycle_oracle(graph: dict) -> bool:
    """Transitive closure by Floyd-Warshall; cyclic iff some node reaches itself."""
    nodes = list(graph)
    for targets in graph.values():
        for t in targets:
            if t not in nodes:
                nodes.append(t)
    index = {n: i for i, n in enumerate(nodes)}
    n = len(nodes)
    reach = [[False] * n for _ in range(n)]
    for u, targets in graph.items():
        for v in targets:
            reach[index[u]][index[v]] = True
    for k in range(n):
        rk = reach[k]
        for i in range(n):
            if reach[i][k]:
                ri = reach[i]
                for j in range(n):
                    if rk[j]:
                        ri[j] = True
    return any(reach[i][i] for i in range(n))


# -- Monte-Carlo hitting-time oracle ----------------------------------------------

def mc_hitting_oracle(matrix, start: int, goal, trials: int, seed: int):
    """Simulate the chain; returns (mean hitting time, standard error)."""
    P = np.asarray(matrix, dtype=float)
    cumulative = np.cumsum(P, axis=1)
    goal_set = np.zeros(P.shape[0], dtype=bool)
    goal_set[list(goal)] = True
    rng = np.random.default_rng(seed)

    position = np.full(trials, start, dtype=np.int64)
    steps = np.zeros(trials, dtype=np.int64)
    active = ~goal_set[position]
    guard = 0
    while active.any():
        guard += 1
        if guard > 1_000_000:
            raise RuntimeError("oracle runaway: chain does not hit the goal")
        draws = rng.random(int(active.sum()))
        rows = cumulative[position[active]]
        position[active] = (rows < draws[:, None]).sum(axis=1)
        steps[active] += 1
        active[active] = ~goal_set[position[active]]
    mean = float(steps.mean())
    stderr = float(steps.std(ddof=1) / np.sqrt(trials)) if trials > 1 else 0.0
    return mean, stderr


def random_dense_chain(rng: np.random.Generator, n: int):
    """Row-stochastic matrix with strictly positive entries (fast mixing)."""
    raw = rng.random((n, n)) + 0.05
    return raw / raw.sum(axis=1, keepdims=True)


# -- independent cellular-automaton oracle ------------------------------------------

def eca_oracle_step(cells, number: int):
    """Fresh rule application straight from the number's bits."""
    w = len(cells)
    return tuple(
        (number >> (4 * cells[(i - 1) % w] + 2 * cells[i] + cells[(i + 1) % w])) & 1
        for i in range(w)
    )


def eca_oracle_run(cells, number: int, steps: int):
    rows = [tuple(cells)]
    for _ in range(steps):
        rows.append(eca_oracle_step(rows[-1], number))
    return rows


# -- fixed observer corpus -----------------------------------------------------------

def observer_corpus(seed: int = 2024, size: int = 50) -> list[Observer]:
    """Fixed mix of random machines and relabelings for oracle comparisons."""
    rng = random.Random(seed)
    corpus: list[Observer] = []
    while len(corpus) < size:
        nx = rng.choice((2, 2, 3, 3, 4))
        ny = rng.choice((1, 2, 2, 3))
        nz = rng.choice((1, 2, 2, 3))
        base = random_observer(rng, sizes=(nx, ny, nz))
        corpus.append(base)
        if len(corpus) < size and rng.random() < 0.4:
            corpus.append(relabeled(base, rng, prefix=f"c{len(corpus)}"))
    return corpus[:size]
