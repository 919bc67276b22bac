"""Structure-preserving maps between observers.

A morphism is a triple of maps (states, inputs, outputs) that makes the
transition and output diagrams commute.  Bijective morphisms witness that
two observers differ only by relabeling, and that relation is an
equivalence.  This module checks morphisms, searches for isomorphisms,
partitions observer collections into equivalence classes, and computes the
behavioral quotient that drives the redundancy metric.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product

from .core import Ident, Observer
from .errors import IdentifierError, MorphismShapeError


@dataclass(frozen=True)
class ObserverMorphism:
    """A triple of maps from one observer's sets into another's.

    ``bijective`` is derived: it is true when all three maps are injective,
    which for maps between equal-size finite sets is the same as being
    bijections.
    """

    state_map: dict
    input_map: dict
    output_map: dict
    bijective: bool = field(init=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "state_map", dict(self.state_map))
        object.__setattr__(self, "input_map", dict(self.input_map))
        object.__setattr__(self, "output_map", dict(self.output_map))
        injective = all(
            len(set(m.values())) == len(m)
            for m in (self.state_map, self.input_map, self.output_map)
        )
        object.__setattr__(self, "bijective", injective)

    def inverse(self) -> "ObserverMorphism":
        """Componentwise inverse; only defined for bijective morphisms."""
        if not self.bijective:
            raise MorphismShapeError("cannot invert a non-bijective morphism")
        return ObserverMorphism(
            state_map={v: k for k, v in self.state_map.items()},
            input_map={v: k for k, v in self.input_map.items()},
            output_map={v: k for k, v in self.output_map.items()},
        )


def identity_morphism(obs: Observer) -> ObserverMorphism:
    return ObserverMorphism(
        state_map={x: x for x in obs.states},
        input_map={y: y for y in obs.inputs},
        output_map={z: z for z in obs.outputs},
    )


@dataclass(frozen=True)
class MorphismCheck:
    """Outcome of a commutation check, with every violating witness."""

    holds: bool
    transition_failures: tuple[tuple[Ident, Ident], ...]
    output_failures: tuple[Ident, ...]

    def __bool__(self) -> bool:
        return self.holds


def _require_total(label: str, mapping: dict, domain: tuple, codomain: tuple) -> None:
    missing = [k for k in domain if k not in mapping]
    if missing:
        raise MorphismShapeError(f"{label} is not total, missing {missing[0]!r}")
    if set(mapping) != set(domain):
        raise MorphismShapeError(f"{label} has entries outside the source set")
    target = set(codomain)
    for k, v in mapping.items():
        if v not in target:
            raise MorphismShapeError(f"{label}[{k!r}] = {v!r} is outside the target set")


def check_homomorphism(src: Observer, dst: Observer, morphism: ObserverMorphism) -> MorphismCheck:
    """Verify both commutation conditions, collecting all violations.

    The transition condition requires mapping-then-stepping to agree with
    stepping-then-mapping for every (state, input) pair; the output
    condition requires the mapped state to emit the mapped action.
    """
    _require_total("state map", morphism.state_map, src.states, dst.states)
    _require_total("input map", morphism.input_map, src.inputs, dst.inputs)
    _require_total("output map", morphism.output_map, src.outputs, dst.outputs)

    mx, my, mz = morphism.state_map, morphism.input_map, morphism.output_map
    bad_transitions = tuple(
        (x, y)
        for x, y in product(src.states, src.inputs)
        if mx[src.transition[(x, y)]] != dst.transition[(mx[x], my[y])]
    )
    bad_outputs = tuple(x for x in src.states if mz[src.output_map[x]] != dst.output_map[mx[x]])
    return MorphismCheck(
        holds=not bad_transitions and not bad_outputs,
        transition_failures=bad_transitions,
        output_failures=bad_outputs,
    )


# -- index tables and signature refinement ----------------------------------

def _index_tables(obs: Observer) -> tuple[list[list[int]], list[int]]:
    si = {x: i for i, x in enumerate(obs.states)}
    yi = {y: j for j, y in enumerate(obs.inputs)}
    zi = {z: k for k, z in enumerate(obs.outputs)}
    f = [[si[obs.transition[(x, y)]] for y in obs.inputs] for x in obs.states]
    g = [zi[obs.output_map[x]] for x in obs.states]
    return f, g


def _refine_pair(fa, ga, nza, fb, gb, nzb):
    """Jointly refine label-free colors on two machines.

    Colors are computed with one shared renumbering per round, so equal
    colors across the machines mean "not yet distinguishable by structure".
    Any isomorphism must map each element to one of the same color, which
    makes the colors a sound candidate filter for the search below.
    """

    def fibers(g, nz):
        count = [0] * nz
        for k in g:
            count[k] += 1
        return count

    fib_a, fib_b = fibers(ga, nza), fibers(gb, nzb)
    oc_a, oc_b = list(fib_a), list(fib_b)
    sc_a, sc_b = [0] * len(fa), [0] * len(fb)
    ic_a = [0] * (len(fa[0]) if fa else 0)
    ic_b = [0] * (len(fb[0]) if fb else 0)

    def renumber(keys_a, keys_b):
        palette = {k: n for n, k in enumerate(sorted(set(keys_a) | set(keys_b)))}
        return [palette[k] for k in keys_a], [palette[k] for k in keys_b]

    def round_keys(f, g, sc, ic, oc):
        skeys = [
            (sc[i], oc[g[i]], tuple(sorted((ic[j], sc[f[i][j]]) for j in range(len(ic)))))
            for i in range(len(f))
        ]
        ikeys = [
            (ic[j], tuple(sorted((sc[i], sc[f[i][j]]) for i in range(len(f)))))
            for j in range(len(ic))
        ]
        okeys = [
            (oc[k], tuple(sorted(sc[i] for i in range(len(f)) if g[i] == k)))
            for k in range(len(oc))
        ]
        return skeys, ikeys, okeys

    while True:
        ska, ika, oka = round_keys(fa, ga, sc_a, ic_a, oc_a)
        skb, ikb, okb = round_keys(fb, gb, sc_b, ic_b, oc_b)
        new_sc_a, new_sc_b = renumber(ska, skb)
        new_ic_a, new_ic_b = renumber(ika, ikb)
        new_oc_a, new_oc_b = renumber(oka, okb)
        stable = (
            len(set(new_sc_a + new_sc_b)) == len(set(sc_a + sc_b))
            and len(set(new_ic_a + new_ic_b)) == len(set(ic_a + ic_b))
            and len(set(new_oc_a + new_oc_b)) == len(set(oc_a + oc_b))
        )
        sc_a, sc_b, ic_a, ic_b, oc_a, oc_b = (
            new_sc_a, new_sc_b, new_ic_a, new_ic_b, new_oc_a, new_oc_b,
        )
        if stable:
            return sc_a, ic_a, oc_a, sc_b, ic_b, oc_b


def find_isomorphism(
    a: Observer,
    b: Observer,
    anchors: tuple[Ident, Ident] | None = None,
) -> ObserverMorphism | None:
    """Search for a bijective morphism from ``a`` to ``b``.

    Returns the lexicographically least isomorphism under the sets'
    construction order (states first, then inputs, then outputs), or None.
    With ``anchors`` given, the state map is pinned to send the first
    anchor to the second, which usually collapses the search to a single
    branch.  Candidates are pre-filtered by the joint signature refinement,
    so the worst case stays exponential but routine instances resolve
    without backtracking.
    """
    if anchors is not None:
        ax, bx = anchors
        if ax not in a.output_map:
            raise IdentifierError(f"anchor {ax!r} is not a state of the first observer")
        if bx not in b.output_map:
            raise IdentifierError(f"anchor {bx!r} is not a state of the second observer")

    nx, ny, nz = len(a.states), len(a.inputs), len(a.outputs)
    if (nx, ny, nz) != (len(b.states), len(b.inputs), len(b.outputs)):
        return None
    if canonical_invariants(a) != canonical_invariants(b):
        return None

    fa, ga = _index_tables(a)
    fb, gb = _index_tables(b)
    sc_a, ic_a, oc_a, sc_b, ic_b, oc_b = _refine_pair(fa, ga, nz, fb, gb, nz)
    if sorted(sc_a) != sorted(sc_b) or sorted(ic_a) != sorted(ic_b) or sorted(oc_a) != sorted(oc_b):
        return None

    state_cands = [[u for u in range(nx) if sc_b[u] == sc_a[i]] for i in range(nx)]
    input_cands = [[v for v in range(ny) if ic_b[v] == ic_a[j]] for j in range(ny)]
    if anchors is not None:
        i0 = a.states.index(anchors[0])
        u0 = b.states.index(anchors[1])
        if u0 not in state_cands[i0]:
            return None
        state_cands[i0] = [u0]

    px = [-1] * nx
    x_used = [False] * nx

    def complete_outputs(py: list[int]) -> list[int] | None:
        forced: dict[int, int] = {}
        for i in range(nx):
            want = gb[px[i]]
            have = forced.setdefault(ga[i], want)
            if have != want:
                return None
        if len(set(forced.values())) != len(forced):
            return None
        reserved = set(forced.values())
        pz = [-1] * nz
        free = iter([w for w in range(nz) if w not in reserved])
        for k in range(nz):
            pz[k] = forced[k] if k in forced else next(free)
        return pz

    def match_inputs(j: int, py: list[int], y_used: list[bool]) -> list[int] | None:
        if j == ny:
            return list(py)
        for v in input_cands[j]:
            if y_used[v]:
                continue
            if all(fb[px[i]][v] == px[fa[i][j]] for i in range(nx)):
                py[j] = v
                y_used[v] = True
                result = match_inputs(j + 1, py, y_used)
                y_used[v] = False
                if result is not None:
                    return result
        return None

    def extend_states(i: int) -> ObserverMorphism | None:
        if i == nx:
            py = match_inputs(0, [-1] * ny, [False] * ny)
            if py is None:
                return None
            pz = complete_outputs(py)
            if pz is None:
                return None
            return ObserverMorphism(
                state_map={a.states[i]: b.states[px[i]] for i in range(nx)},
                input_map={a.inputs[j]: b.inputs[py[j]] for j in range(ny)},
                output_map={a.outputs[k]: b.outputs[pz[k]] for k in range(nz)},
            )
        for u in state_cands[i]:
            if x_used[u]:
                continue
            px[i] = u
            x_used[u] = True
            found = extend_states(i + 1)
            x_used[u] = False
            if found is not None:
                return found
        return None

    return extend_states(0)


def equivalent(a: Observer, b: Observer) -> bool:
    """True when the two observers differ only by a relabeling."""
    return find_isomorphism(a, b) is not None


def equivalence_partition(observers: list[Observer]) -> list[list[int]]:
    """Group indices of pairwise-equivalent observers.

    Union-find over pairwise isomorphism checks; observers with different
    invariant vectors are never compared directly.
    """
    n = len(observers)
    parent = list(range(n))

    def find(i: int) -> int:
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    by_invariant: dict[tuple, list[int]] = {}
    for i, obs in enumerate(observers):
        by_invariant.setdefault(canonical_invariants(obs), []).append(i)

    for bucket in by_invariant.values():
        for pos, i in enumerate(bucket):
            for j in bucket[pos + 1:]:
                if find(i) != find(j) and equivalent(observers[i], observers[j]):
                    parent[find(j)] = find(i)

    groups: dict[int, list[int]] = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    return sorted((sorted(g) for g in groups.values()), key=lambda g: g[0])


def canonical_invariants(obs: Observer) -> tuple:
    """A relabeling-invariant fingerprint of an observer.

    Equal vectors are necessary (not sufficient) for equivalence, which
    makes this a sound prefilter: differing vectors prove non-equivalence.
    """
    reduced, _, _ = minimize(obs)
    fiber: dict[Ident, int] = {}
    for x in obs.states:
        z = obs.output_map[x]
        fiber[z] = fiber.get(z, 0) + 1
    indegree: dict[Ident, int] = {x: 0 for x in obs.states}
    for target in obs.transition.values():
        indegree[target] += 1
    return (
        len(obs.states),
        len(obs.inputs),
        len(obs.outputs),
        (len(reduced.states), len(reduced.inputs), len(reduced.outputs)),
        tuple(sorted(fiber.values())),
        tuple(sorted(indegree.values())),
    )


@dataclass(frozen=True)
class BehavioralPartition:
    """Greatest partition of states into behaviorally equivalent blocks.

    Two states share a block exactly when they emit the same action and,
    for every input, step into the same block.
    """

    classes: tuple[tuple[Ident, ...], ...]

    def block_of(self, state: Ident) -> tuple[Ident, ...]:
        for block in self.classes:
            if state in block:
                return block
        raise IdentifierError(f"unknown state {state!r}")


def _state_partition(obs: Observer) -> list[int]:
    """Block index per state, refined to the greatest fixed point."""
    f, g = _index_tables(obs)
    nx = len(obs.states)
    block = list(g)
    while True:
        keys = [(block[i], tuple(block[t] for t in f[i])) for i in range(nx)]
        palette: dict[tuple, int] = {}
        new_block = []
        for key in keys:
            palette.setdefault(key, len(palette))
            new_block.append(palette[key])
        if len(set(new_block)) == len(set(block)):
            return new_block
        block = new_block


def minimize(obs: Observer) -> tuple[Observer, BehavioralPartition, ObserverMorphism]:
    """Quotient an observer by behavioral redundancy.

    States merge by the greatest behavioral partition.  Inputs merge when,
    for every state, they step into the same block.  Outputs shrink to the
    image of the output map.  Every surviving element is named by the
    earliest merged member, so an observer with no redundancy minimizes to
    itself, identically.

    Returns the quotient observer, the state partition, and the quotient
    morphism, which always passes ``check_homomorphism``.  Outputs that
    were never emitted have no constraint from the commutation conditions;
    the quotient morphism sends them to the first surviving output.
    """
    block = _state_partition(obs)
    nx = len(obs.states)

    block_members: dict[int, list[Ident]] = {}
    for i, x in enumerate(obs.states):
        block_members.setdefault(block[i], []).append(x)
    ordered_blocks = sorted(block_members.values(), key=lambda m: obs.states.index(m[0]))
    state_rep = {x: members[0] for members in ordered_blocks for x in members}

    input_key: dict[Ident, tuple] = {
        y: tuple(block[obs.states.index(obs.transition[(x, y)])] for x in obs.states)
        for y in obs.inputs
    }
    input_groups: dict[tuple, list[Ident]] = {}
    for y in obs.inputs:
        input_groups.setdefault(input_key[y], []).append(y)
    input_rep = {y: members[0] for members in input_groups.values() for y in members}

    new_states = tuple(members[0] for members in ordered_blocks)
    new_inputs = tuple(y for y in obs.inputs if input_rep[y] == y)
    emitted = {obs.output_map[x] for x in obs.states}
    new_outputs = tuple(z for z in obs.outputs if z in emitted)

    new_transition = {
        (x, y): state_rep[obs.transition[(x, y)]]
        for x in new_states
        for y in new_inputs
    }
    new_output_map = {x: obs.output_map[x] for x in new_states}
    quotient = Observer(
        states=new_states,
        inputs=new_inputs,
        outputs=new_outputs,
        transition=new_transition,
        output_map=new_output_map,
        boundary=obs.boundary,
    )

    partition = BehavioralPartition(tuple(tuple(members) for members in ordered_blocks))
    fallback = new_outputs[0]
    quotient_map = ObserverMorphism(
        state_map=dict(state_rep),
        input_map=dict(input_rep),
        output_map={z: (z if z in emitted else fallback) for z in obs.outputs},
    )
    return quotient, partition, quotient_map
