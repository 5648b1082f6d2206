import itertools

import pytest
from hypothesis import given, settings

import oracles
from strategies import algebras
from fincsp.clones import (
    BudgetExceeded,
    OperationTable,
    check_unary_on_block,
    clone_upto,
    essential_arity,
    free_algebra,
    star_extension,
    term_closure,
    unary_polynomials,
)
from fincsp.errors import PreconditionViolated
from fincsp.homs import count_homs, is_homomorphism
from fincsp.instances import example_4_12, star_demo, unary_algebra
from fincsp.structure import Congruence
from fincsp.terms import term_table


def test_essential_arity():
    assert essential_arity((0, 0, 1, 1), 2, 2) == 1
    assert essential_arity((0, 1, 1, 0), 2, 2) == 2
    assert essential_arity((1, 1, 1, 1), 2, 2) == 0
    t = OperationTable(2, 2, (0, 0, 1, 1))
    assert t.is_essentially_unary() and t(1, 0) == 1 and t.image() == {0, 1}


def test_negation_clone_sizes():
    clone = clone_upto(unary_algebra((1, 0)), 3)
    # term operations only: each projection and its negation
    assert [len(clone[m]) for m in (1, 2, 3)] == [2, 4, 6]


def test_term_closure_sizes_of_negation():
    A = unary_algebra((1, 0))
    assert [len(term_closure(A, m)) for m in (1, 2, 3)] == [2, 4, 6]


def test_closure_terms_induce_their_rows():
    A = example_4_12()
    cl = unary_polynomials(A)
    from fincsp.structure import with_constants

    Ac = with_constants(A)
    for i, row in enumerate(cl.rows()):
        assert term_table(cl.term(i), Ac, 1) == row


def test_unary_polynomials_of_example():
    rows = set(unary_polynomials(example_4_12()).rows())
    assert rows == oracles.unary_polynomials(example_4_12())
    assert len(rows) == 13
    assert {(0, 1, 1), (1, 1, 0)} <= rows


@settings(max_examples=40, deadline=None)
@given(algebras(max_size=3))
def test_unary_polynomials_match_oracle(A):
    assert set(unary_polynomials(A).rows()) == oracles.unary_polynomials(A)


def test_budget_exceeded():
    with pytest.raises(BudgetExceeded):
        term_closure(example_4_12(), 3, budget=20)


@settings(max_examples=30, deadline=None)
@given(algebras(max_size=2))
def test_free_algebra_universal_property(A):
    F, gens, tables = free_algebra(A, 2)
    # every map of the generators extends to exactly one homomorphism: evaluate the tables
    for a, b in itertools.product(range(A.size), repeat=2):
        h = tuple(t[a * A.size + b] for t in tables)
        assert is_homomorphism(h, F, A)
        assert h[gens[0]] == a and h[gens[1]] == b
    assert count_homs(F, A) == A.size**2


def test_free_algebra_of_negation():
    A = unary_algebra((1, 0))
    for n in range(1, 5):
        F, _, _ = free_algebra(A, n)
        assert F.size == 2 * n


def test_star_extension_counts():
    A = star_demo()
    alpha = Congruence.from_blocks(3, [[0, 1], [2]])
    for n in range(1, 5):
        ext = star_extension(A, alpha, n)
        X = ext.algebra
        surjective = count_homs(X, A, surjective=True)
        assert surjective >= 2**n - 2
        for phi in itertools.product((0, 1), repeat=n):
            assert is_homomorphism(ext.extension(phi), X, A)


def test_star_extension_preconditions():
    A = example_4_12()
    alpha = Congruence.from_blocks(3, [[0, 1], [2]])
    assert check_unary_on_block(A, (0, 1)) is not None
    with pytest.raises(PreconditionViolated):
        star_extension(A, alpha, 2)
