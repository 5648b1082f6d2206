import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from strategies import structures
from fincsp.errors import PreconditionViolated, SignatureMismatch
from fincsp.homs import (
    count_homs,
    counting_probe,
    enumerate_homs,
    find_hom,
    hom_exists,
    hom_violation,
    is_homomorphism,
    star_congruence,
)
from fincsp.instances import example_4_12, nor_template, star_demo, unary_algebra
from fincsp.structure import Structure

MIXED = (("f", 2), ("g", 1))
RELS = (("R", 2),)


@settings(max_examples=60, deadline=None)
@given(structures(max_size=4, funcs=MIXED, rels=RELS), structures(max_size=3, funcs=MIXED, rels=RELS, max_tuples=5))
def test_enumeration_matches_brute_force(X, A):
    assert enumerate_homs(X, A) == oracles.homs(X, A)
    assert enumerate_homs(X, A, surjective=True) == oracles.homs(X, A, surjective=True)


@settings(max_examples=60, deadline=None)
@given(structures(max_size=5, funcs=(), rels=(("R", 2), ("S", 1))), structures(max_size=3, funcs=(), rels=(("R", 2), ("S", 1))))
def test_modes_agree(X, A):
    homs = oracles.homs(X, A)
    assert count_homs(X, A) == len(homs)
    assert hom_exists(X, A) == bool(homs)
    assert find_hom(X, A) == (homs[0] if homs else None)


@settings(max_examples=40, deadline=None)
@given(structures(max_size=4), st.data())
def test_is_homomorphism_matches_oracle(X, data):
    A = nor_template()
    h = tuple(data.draw(st.lists(st.integers(0, 1), min_size=X.size, max_size=X.size)))
    X = Structure(A.signature, X.size, {"m": X.ops["f"]}, {})
    assert is_homomorphism(h, X, A) == oracles.is_hom(h, X, A)
    assert (hom_violation(h, X, A) is None) == is_homomorphism(h, X, A)


def test_allowed_restricts_values():
    X = unary_algebra((0, 1, 2))
    A = unary_algebra((0, 1, 2))
    assert count_homs(X, A) == 27
    homs = enumerate_homs(X, A, allowed=[{0}, {1, 2}, {2}])
    assert homs == [(0, 1, 2), (0, 2, 2)]


def test_signature_mismatch():
    with pytest.raises(SignatureMismatch):
        count_homs(example_4_12(), nor_template())


def test_unknown_mode():
    with pytest.raises(ValueError):
        enumerate_homs(nor_template(), nor_template(), mode="sample")


def test_single_point_structure_has_one_map():
    one = Structure.build(1, {"m": (2, [0])})
    assert count_homs(one, nor_template()) == 0
    assert count_homs(one, one) == 1


def test_free_algebra_probe_of_negation():
    probe = counting_probe(unary_algebra((1, 0)), "free-algebra", 3)
    assert [size for size, _, _ in probe.counts] == [2, 4, 6]
    assert [surj for _, _, surj in probe.counts] == [2, 4, 8]
    assert "n=3 |X|=6" in probe.render()


def test_star_probe_needs_type1_block():
    assert star_congruence(star_demo()) is not None
    with pytest.raises(PreconditionViolated):
        counting_probe(example_4_12(), "star-extension", 2)


def test_unknown_probe_family():
    with pytest.raises(ValueError):
        counting_probe(nor_template(), "other", 1)
