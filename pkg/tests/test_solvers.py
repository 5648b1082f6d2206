import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from strategies import algebras
from fincsp.errors import SignatureMismatch, WrongDomain
from fincsp.instances import (
    boolean_catalogue,
    boolean_template,
    mixed_instance,
    nor_template,
    prop_5_1,
    seeded,
    z_template,
)
from fincsp.solvers import (
    NonUnaryOperation,
    SchaeferPolymorphism,
    affine_equations,
    brute_solve,
    classify_boolean,
    gf2_solve,
    preservation_failure,
    prop5_solve,
    schaefer_check,
    sheffer_solve,
    z_solve,
)
from fincsp.structure import Structure, expand


@settings(max_examples=200, deadline=None)
@given(st.integers(1, 6).flatmap(lambda n: st.tuples(
    st.just(n),
    st.lists(st.tuples(st.sets(st.integers(0, n - 1), min_size=1), st.integers(0, 1)), max_size=8),
)))
def test_gf2_matches_exhaustive_search(case):
    n, eqs = case
    masks = [(sum(1 << v for v in vs), rhs) for vs, rhs in eqs]
    values = gf2_solve(masks, n)
    assert (values is not None) == oracles.gf2_consistent(eqs, n)
    if values is not None:
        assert all(sum(values[v] for v in vs) % 2 == rhs for vs, rhs in eqs)


def test_affine_equations_cut_out_even_tuples():
    even = {t for t in itertools.product((0, 1), repeat=3) if sum(t) % 2 == 0}
    eqs = affine_equations(even, 3)
    sols = {t for t in itertools.product((0, 1), repeat=3) if all(sum(c * x for c, x in zip(cs, t)) % 2 == r for cs, r in eqs)}
    assert sols == even


@pytest.mark.parametrize(
    "rels, expected",
    [
        (["NAE"], set()),
        (["ONE_IN_THREE"], set()),
        (["IMPL"], {"const0", "const1", "min", "max", "majority"}),
        (["ZERO"], {"const0", "min", "max", "majority", "minority"}),
        (["EVEN3"], {"const0", "minority"}),
    ],
)
def test_schaefer_examples(rels, expected):
    assert schaefer_check(boolean_template([], rels)) == expected


def test_schaefer_preconditions():
    with pytest.raises(WrongDomain):
        schaefer_check(prop_5_1())
    with pytest.raises(SignatureMismatch):
        schaefer_check(nor_template())


def test_refutation_points_at_a_relation():
    R = boolean_template([], ["NAE"])
    rel, rows = preservation_failure(R, "minority")
    assert rel == "NAE"
    assert tuple(a ^ b ^ c for a, b, c in zip(*rows)) not in R.rels["NAE"]


def test_classifier_verdicts():
    assert classify_boolean(boolean_template(["neg"], ["NAE"])).complexity == "NP-complete"
    v = classify_boolean(boolean_template(["nor"], ["NAE"]))
    assert v.polynomial and v.reason == NonUnaryOperation("b_nor")
    v = classify_boolean(boolean_template(["neg"], ["EVEN3"]))
    assert v.reason == SchaeferPolymorphism("minority")
    v = classify_boolean(boolean_template(["c0"], ["IMPL"]))
    assert v.reason == SchaeferPolymorphism("const0")
    assert "P:" in v.render()


def test_np_complete_render_lists_all_six():
    text = classify_boolean(boolean_template(["neg"], ["NAE"])).render()
    assert text.startswith("NP-complete")
    for name in ("const0", "const1", "min", "max", "majority", "minority"):
        assert f"  {name}: fails" in text


def test_catalogue_solvers_on_small_instances():
    for i, (name, A) in enumerate(boolean_catalogue()):
        v = classify_boolean(A)
        if not v.polynomial:
            continue
        rng = seeded(100 + i)
        for _ in range(8):
            X = mixed_instance(rng, A, 5)
            got = v.solver(X)
            assert got.answer == bool(oracles.homs(X, A)), name
            if got.answer:
                assert oracles.is_hom(got.witness, X, A)


def test_sheffer_solver_sweep():
    A = nor_template()
    rng = seeded(11)
    for _ in range(80):
        X = mixed_instance(rng, A, 7)
        got = sheffer_solve(X)
        assert got.answer == brute_solve(X, A).answer
        if got.answer:
            assert oracles.is_hom(got.witness, X, A)


@settings(max_examples=80, deadline=None)
@given(algebras(max_size=4, funcs=(("f", 2),)))
def test_sheffer_solver_renames_the_symbol(X):
    A = nor_template()
    Xm = Structure(A.signature, X.size, {"m": X.ops["f"]}, {})
    assert sheffer_solve(X).answer == bool(oracles.homs(Xm, A))


def test_sheffer_with_relations_needs_target():
    A = expand(nor_template(), rels={"Z": (1, [(0,)])})
    X = Structure.build(2, {"m": (2, [1, 0, 0, 0])}, {"Z": (1, [(1,)])})
    with pytest.raises(SignatureMismatch):
        sheffer_solve(X)
    assert not sheffer_solve(X, A).answer


def test_z_solver_sweep():
    A = z_template()
    rng = seeded(12)
    for _ in range(80):
        X = mixed_instance(rng, A, 7)
        got = z_solve(X)
        assert got.answer == brute_solve(X, A).answer
        if got.answer:
            assert oracles.is_hom(got.witness, X, A)


def test_z_solver_detects_inconsistency():
    # one element: x + x = x forces x = 0 but x + x + 1 = x forces x = 1
    X = Structure.build(1, {"p": (2, [0]), "q": (2, [0])})
    assert not z_solve(X)
    with pytest.raises(SignatureMismatch):
        z_solve(nor_template())


def test_prop5_solver_sweep():
    A = prop_5_1()
    rng = seeded(13)
    for _ in range(40):
        X = mixed_instance(rng, A, 6)
        got = prop5_solve(X)
        assert got.answer == brute_solve(X, A).answer
        if got.answer:
            assert oracles.is_hom(got.witness, X, A)
