"""Morphism checking, isomorphism search, equivalence laws, minimization."""

from __future__ import annotations

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from obskit.core import Observer
from obskit.errors import IdentifierError, MorphismShapeError
from obskit.machines import redundant_observer, thermostat
from obskit.morphism import (
    ObserverMorphism,
    canonical_invariants,
    check_homomorphism,
    equivalence_partition,
    equivalent,
    find_isomorphism,
    identity_morphism,
    minimize,
)

from conftest import (
    brute_force_isomorphism,
    morphism_vectors,
    random_observer,
    relabeled,
)


def constant_output_observer() -> Observer:
    return Observer(
        states=("p", "q"),
        inputs=("u", "v"),
        outputs=("w0", "w1"),
        transition={("p", "u"): "q", ("p", "v"): "p", ("q", "u"): "p", ("q", "v"): "q"},
        output_map={"p": "w0", "q": "w0"},
    )


# -- check_homomorphism ---------------------------------------------------------

def test_identity_is_a_homomorphism():
    obs = thermostat()
    assert check_homomorphism(obs, obs, identity_morphism(obs)).holds


def test_quotient_of_redundant_pair_is_a_homomorphism():
    source = redundant_observer()
    reduced, _, quotient = minimize(source)
    assert len(reduced.states) == 1
    assert check_homomorphism(source, reduced, quotient).holds


def test_state_swap_fails_with_witness():
    obs = thermostat()
    swap = ObserverMorphism(
        state_map={"OFF": "ON", "ON": "OFF"},
        input_map={y: y for y in obs.inputs},
        output_map={z: z for z in obs.outputs},
    )
    verdict = check_homomorphism(obs, obs, swap)
    assert not verdict.holds
    assert ("OFF", "Cold") in verdict.transition_failures


def test_partial_state_map_is_shape_error():
    obs = thermostat()
    broken = ObserverMorphism(
        state_map={"OFF": "OFF"},
        input_map={y: y for y in obs.inputs},
        output_map={z: z for z in obs.outputs},
    )
    with pytest.raises(MorphismShapeError):
        check_homomorphism(obs, obs, broken)


def test_image_outside_target_is_shape_error():
    obs = thermostat()
    broken = ObserverMorphism(
        state_map={"OFF": "ELSEWHERE", "ON": "ON"},
        input_map={y: y for y in obs.inputs},
        output_map={z: z for z in obs.outputs},
    )
    with pytest.raises(MorphismShapeError):
        check_homomorphism(obs, obs, broken)


# -- find_isomorphism -------------------------------------------------------------

def test_pure_relabeling_is_found_and_verifies():
    rng = random.Random(11)
    first = thermostat()
    second = relabeled(first, rng)
    morphism = find_isomorphism(first, second)
    assert morphism is not None and morphism.bijective
    assert check_homomorphism(first, second, morphism).holds


def test_thermostat_not_equivalent_to_constant_output_machine():
    a, b = thermostat(), constant_output_observer()
    assert brute_force_isomorphism(a, b) is None
    assert find_isomorphism(a, b) is None


def test_anchored_identity_search():
    obs = thermostat()
    morphism = find_isomorphism(obs, obs, anchors=("OFF", "OFF"))
    assert morphism is not None
    assert morphism.state_map["OFF"] == "OFF"


def test_unknown_anchor_is_identifier_error():
    with pytest.raises(IdentifierError):
        find_isomorphism(thermostat(), thermostat(), anchors=("NOPE", "OFF"))
    with pytest.raises(IdentifierError):
        find_isomorphism(thermostat(), thermostat(), anchors=("OFF", "NOPE"))


def test_anchor_selects_the_swap_automorphism():
    # swapping states, inputs, and outputs together commutes with both tables
    swapped = find_isomorphism(thermostat(), thermostat(), anchors=("OFF", "ON"))
    assert swapped is not None
    assert swapped.state_map == {"OFF": "ON", "ON": "OFF"}
    assert swapped.input_map == {"Cold": "Hot", "Hot": "Cold"}
    assert swapped.output_map == {"HeaterOff": "HeaterOn", "HeaterOn": "HeaterOff"}
    assert check_homomorphism(thermostat(), thermostat(), swapped).holds


def test_anchor_can_rule_out_all_isomorphisms():
    sink = Observer(
        states=("s0", "s1"), inputs=("y",), outputs=("w0", "w1"),
        transition={("s0", "y"): "s0", ("s1", "y"): "s0"},
        output_map={"s0": "w0", "s1": "w1"},
    )
    assert find_isomorphism(sink, sink, anchors=("s0", "s1")) is None


def test_search_matches_brute_force_on_random_pairs():
    rng = random.Random(404)
    for trial in range(120):
        a = random_observer(rng, max_size=3)
        if trial % 3 == 0:
            b = relabeled(a, rng, prefix=f"t{trial}")
        elif trial % 3 == 1:
            b = random_observer(rng, sizes=(len(a.states), len(a.inputs), len(a.outputs)))
        else:
            b = random_observer(rng, max_size=3)
        expected = brute_force_isomorphism(a, b)
        got = find_isomorphism(a, b)
        if expected is None:
            assert got is None
        else:
            assert got is not None
            assert morphism_vectors(a, b, got) == expected


def test_search_matches_brute_force_on_five_element_sets():
    rng = random.Random(55)
    for trial in range(6):
        a = random_observer(rng, sizes=(5, 5, 5))
        b = relabeled(a, rng, prefix=f"f{trial}")
        expected = brute_force_isomorphism(a, b)
        got = find_isomorphism(a, b)
        assert expected is not None and got is not None
        assert morphism_vectors(a, b, got) == expected


# -- equivalence laws ----------------------------------------------------------------

@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 10**9))
def test_equivalence_is_reflexive(seed):
    obs = random_observer(random.Random(seed))
    assert equivalent(obs, obs)


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 10**9))
def test_equivalence_is_symmetric_with_verifying_inverse(seed):
    rng = random.Random(seed)
    a = random_observer(rng, max_size=4)
    b = relabeled(a, rng)
    forward = find_isomorphism(a, b)
    assert forward is not None
    assert check_homomorphism(b, a, forward.inverse()).holds
    assert equivalent(b, a)


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 10**9))
def test_symmetry_agrees_on_arbitrary_pairs(seed):
    rng = random.Random(seed)
    a = random_observer(rng, max_size=3)
    b = random_observer(rng, max_size=3)
    assert equivalent(a, b) == equivalent(b, a)


@settings(max_examples=20, deadline=None)
@given(seed=st.integers(0, 10**9))
def test_equivalence_is_transitive_along_relabelings(seed):
    rng = random.Random(seed)
    a = random_observer(rng, max_size=4)
    b = relabeled(a, rng, prefix="m")
    c = relabeled(b, rng, prefix="n")
    assert equivalent(a, b) and equivalent(b, c)
    assert equivalent(a, c)


# -- equivalence_partition -------------------------------------------------------------

def test_partition_groups_relabelings_together():
    rng = random.Random(3)
    group = [thermostat(), relabeled(thermostat(), rng), constant_output_observer()]
    assert equivalence_partition(group) == [[0, 1], [2]]


def test_partition_of_empty_list():
    assert equivalence_partition([]) == []


def test_partition_of_singleton():
    assert equivalence_partition([thermostat()]) == [[0]]


# -- canonical_invariants -----------------------------------------------------------------

def test_invariants_equal_for_isomorphic_pairs():
    rng = random.Random(77)
    for _ in range(25):
        a = random_observer(rng, max_size=4)
        assert canonical_invariants(a) == canonical_invariants(relabeled(a, rng))


def test_thermostat_invariants():
    vector = canonical_invariants(thermostat())
    assert vector[0:3] == (2, 2, 2)
    assert vector[3] == (2, 2, 2)


def test_redundant_observer_reduces_to_one_state():
    vector = canonical_invariants(redundant_observer())
    assert vector[3] == (1, 1, 1)


def test_differing_invariants_imply_non_equivalence():
    rng = random.Random(909)
    checked = 0
    for _ in range(200):
        a = random_observer(rng, max_size=3)
        b = random_observer(rng, max_size=3)
        if canonical_invariants(a) != canonical_invariants(b):
            checked += 1
            assert brute_force_isomorphism(a, b) is None
    assert checked > 50


# -- minimize ----------------------------------------------------------------------------

def test_thermostat_is_already_minimal():
    reduced, partition, quotient = minimize(thermostat())
    assert reduced == thermostat()
    assert partition.classes == (("OFF",), ("ON",))
    assert check_homomorphism(thermostat(), reduced, quotient).holds


def test_redundant_pair_collapses():
    source = redundant_observer()
    reduced, partition, quotient = minimize(source)
    assert reduced.states == ("a",)
    assert partition.classes == (("a", "b"),)
    assert quotient.state_map == {"a": "a", "b": "a"}
    assert check_homomorphism(source, reduced, quotient).holds


def test_behaviorally_equal_inputs_merge():
    obs = Observer(
        states=("s0", "s1"),
        inputs=("go", "run"),  # identical columns
        outputs=("out0", "out1"),
        transition={("s0", "go"): "s1", ("s0", "run"): "s1",
                    ("s1", "go"): "s0", ("s1", "run"): "s0"},
        output_map={"s0": "out0", "s1": "out1"},
    )
    reduced, _, quotient = minimize(obs)
    assert reduced.inputs == ("go",)
    assert quotient.input_map == {"go": "go", "run": "go"}
    assert check_homomorphism(obs, reduced, quotient).holds


def test_unused_outputs_are_dropped():
    obs = Observer(
        states=("s",), inputs=("y",), outputs=("used", "never"),
        transition={("s", "y"): "s"}, output_map={"s": "used"},
    )
    reduced, _, quotient = minimize(obs)
    assert reduced.outputs == ("used",)
    assert quotient.output_map == {"used": "used", "never": "used"}
    assert check_homomorphism(obs, reduced, quotient).holds


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 10**9))
def test_minimize_is_idempotent_up_to_isomorphism(seed):
    obs = random_observer(random.Random(seed), max_size=4)
    reduced, _, _ = minimize(obs)
    again, _, _ = minimize(reduced)
    assert equivalent(reduced, again)


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 10**9))
def test_quotient_map_is_surjective_homomorphism(seed):
    obs = random_observer(random.Random(seed), max_size=4)
    reduced, _, quotient = minimize(obs)
    assert check_homomorphism(obs, reduced, quotient).holds
    assert set(quotient.state_map.values()) == set(reduced.states)
    assert set(quotient.input_map.values()) == set(reduced.inputs)
    assert set(quotient.output_map.values()) == set(reduced.outputs)


@settings(max_examples=20, deadline=None)
@given(seed=st.integers(0, 10**9))
def test_minimized_forms_of_equivalent_observers_are_isomorphic(seed):
    rng = random.Random(seed)
    a = random_observer(rng, max_size=4)
    b = relabeled(a, rng)
    ra, _, _ = minimize(a)
    rb, _, _ = minimize(b)
    assert equivalent(ra, rb)
