import pytest
from hypothesis import given, settings

import oracles
from strategies import structures
from fincsp.errors import ShapeMismatch
from fincsp.structure import Structure
from fincsp.instances import (
    boolean_template,
    build_not23_instance,
    build_z_counterexample,
    mixed_instance,
    nor_template,
    seeded,
    semilattice,
    z_template,
)
from fincsp.width import (
    Counterexample,
    KlSystem,
    Pass,
    all_maps_system,
    has_extension,
    kl_minimality,
    paper_p_system,
    restrictions_of,
    solve_by_minimality,
    subsets_upto,
    verify_system,
    width_harness,
)

RELS = (("R", 2), ("T", 3))


def test_explicit_system_is_compatible():
    X, A, P = build_not23_instance(), nor_template(), paper_p_system()
    assert P.nontrivial()
    assert verify_system(X, A, P, 2, 3) is True
    assert verify_system(X, A, P, 2, 4) is True
    assert oracles.homs(X, A) == []


def test_minimality_contains_explicit_system():
    X, A = build_not23_instance(), nor_template()
    M = kl_minimality(X, A, 2, 3)
    assert M.nontrivial()
    assert M.contains(paper_p_system())
    assert verify_system(X, A, M, 2, 3) is True


def test_shrunk_family_breaks_compatibility():
    X, A, P = build_not23_instance(), nor_template(), paper_p_system()
    families = dict(P.families)
    families[(0, 5)] = ((0, 0),)
    result = verify_system(X, A, KlSystem(2, 10, 2, families), 2, 3)
    assert not result
    assert result.origin.startswith("G_m")
    assert "does not extend" in str(result)


def test_verify_checks_shape():
    X, A, P = build_not23_instance(), nor_template(), paper_p_system()
    with pytest.raises(ShapeMismatch):
        verify_system(X, A, P, 3, 3)
    families = dict(P.families)
    del families[(1, 2)]
    with pytest.raises(ShapeMismatch):
        verify_system(X, A, KlSystem(2, 10, 2, families), 2, 3)


def test_k_must_not_exceed_l():
    with pytest.raises(ValueError):
        kl_minimality(nor_template(), nor_template(), 3, 2)


def test_full_system_of_unconstrained_instance():
    X = Structure.build(2, {}, {"IMPL": (2, [])})
    A = boolean_template([], ["IMPL"])
    P = all_maps_system(2, 2, 2)
    assert verify_system(X, A, P, 2, 3) is True
    assert kl_minimality(X, A, 2, 3).families == P.families


@settings(max_examples=40, deadline=None)
@given(structures(max_size=5, funcs=(), rels=RELS, max_tuples=4), structures(max_size=2, min_size=2, funcs=(), rels=RELS, max_tuples=5))
def test_restrictions_of_homs_survive(X, A):
    M = kl_minimality(X, A, 2, 3)
    homs = oracles.homs(X, A)
    for h in homs:
        for K in subsets_upto(X.size, 2):
            assert restrictions_of(h, K) in M.family(K)
    if homs:
        assert M.nontrivial()


@settings(max_examples=30, deadline=None)
@given(structures(max_size=5, funcs=(), rels=RELS, max_tuples=4), structures(max_size=2, min_size=2, funcs=(), rels=RELS, max_tuples=5))
def test_larger_windows_prune_more(X, A):
    M3 = kl_minimality(X, A, 2, 3)
    M4 = kl_minimality(X, A, 2, 4)
    assert M3.contains(M4)


def test_deleted_maps_lack_extensions():
    X, A = build_not23_instance(), nor_template()
    seen = []

    def check(masks, K, f, window):
        seen.append(K)
        assert not has_extension(masks, K, f, window, A.size)

    rng = seeded(5)
    kl_minimality(X, A, 2, 3, on_delete=check)
    for _ in range(5):
        Y = mixed_instance(rng, A, 6)
        kl_minimality(Y, A, 2, 3, on_delete=check)
    assert seen


def test_majority_template_solved_by_minimality():
    A = boolean_template([], ["IMPL", "OR2"])
    rng = seeded(21)
    for _ in range(60):
        X = mixed_instance(rng, A, 7)
        nontrivial = kl_minimality(X, A, 2, 3).nontrivial()
        assert nontrivial == bool(oracles.homs(X, A))
        h = solve_by_minimality(X, A)
        assert (h is not None) == nontrivial


def test_dump_format():
    P = paper_p_system()
    lines = P.dump().splitlines()
    assert lines[0] == "K={}: ()"
    assert lines[1] == "K={0}: (0)"
    assert any(line.startswith("K={0,5}: (0,1)") for line in lines)


def test_harness_finds_constructions():
    result = width_harness(nor_template(), 2, 3, max_n=4, samples=5)
    assert isinstance(result, Counterexample)
    assert result.instance.size == 10 and result.checked == 1
    result = width_harness(z_template(), 2, 3, max_n=4, samples=5)
    assert result.verdict == "counterexample"
    assert result.instance.size == build_z_counterexample().size


def test_harness_passes_for_semilattice():
    result = width_harness(semilattice(), 2, 3, max_n=5, samples=30)
    assert isinstance(result, Pass)
    assert result.checked > 30
