import math

import pytest
from hypothesis import given, settings

import oracles
from strategies import algebras
from fincsp.enumerators import (
    InKsurjEff,
    NotInKsurj,
    PairSeparation,
    Recursive,
    Trivial,
    Unknown,
    certificate_enumerator,
    classify_3element,
    classify_simple_ksurj,
    derive_certificate,
    enum_homs_group,
    enum_homs_semilattice,
    enumerate_homs_certified,
    greedy_generators,
    is_group,
    render_certificate,
    validate_certificate,
)
from fincsp.errors import InvalidCertificate, NotSimple, TargetNotGroup, TargetNotSemilattice, WrongSize
from fincsp.instances import (
    cyclic_group,
    example_4_12,
    mixed_instance,
    nor_template,
    prop_5_1,
    seeded,
    semilattice,
    star_demo,
    unary_algebra,
)
from fincsp.structure import Congruence

GROUP_SIG = (("mul", 2), ("inv", 1), ("e", 0))


@settings(max_examples=80, deadline=None)
@given(algebras(max_size=5, funcs=(("s", 2),)))
def test_semilattice_enumeration(X):
    for kind in ("meet", "join"):
        homs = enum_homs_semilattice(X, semilattice(kind))
        assert list(homs) == oracles.homs(X, semilattice(kind))
        assert len(homs) <= homs.reduced_size + 1


@pytest.mark.parametrize("order", [2, 3, 4])
def test_group_enumeration(order):
    G = cyclic_group(order)
    rng = seeded(order)
    for _ in range(40):
        X = mixed_instance(rng, G, 6)
        homs = enum_homs_group(X, G)
        assert list(homs) == oracles.homs(X, G)
        assert len(homs) <= X.size ** math.ceil(math.log2(order))


@settings(max_examples=60, deadline=None)
@given(algebras(max_size=4, funcs=GROUP_SIG))
def test_group_enumeration_on_arbitrary_algebras(X):
    G = cyclic_group(3)
    assert list(enum_homs_group(X, G)) == oracles.homs(X, G)


def test_generators_are_few():
    G = cyclic_group(4)
    gens = greedy_generators(G)
    assert gens and len(gens) <= 2
    assert is_group(G) and not is_group(semilattice())


def test_wrong_targets():
    with pytest.raises(TargetNotSemilattice):
        enum_homs_semilattice(nor_template(), nor_template())
    with pytest.raises(TargetNotGroup):
        enum_homs_group(semilattice(), semilattice())


@pytest.mark.parametrize(
    "template",
    [example_4_12, lambda: prop_5_1().algebraic_reduct(), lambda: cyclic_group(3)],
    ids=["example", "prop", "Z3"],
)
def test_certificate_enumerator_matches_brute_force(template):
    A = template()
    verdict = derive_certificate(A)
    assert isinstance(verdict, InKsurjEff)
    validate_certificate(A, verdict.certificate)
    rng = seeded(7)
    for _ in range(30):
        X = mixed_instance(rng, A, 6)
        assert certificate_enumerator(X, A, verdict.certificate) == oracles.homs(X, A, surjective=True)


def test_certified_enumeration_covers_all_homs():
    A = example_4_12()
    rng = seeded(3)
    for _ in range(30):
        X = mixed_instance(rng, A, 6)
        homs = enumerate_homs_certified(X, A)
        assert list(homs) == oracles.homs(X, A)


def test_invalid_certificates_are_rejected():
    A = example_4_12()
    cert = derive_certificate(A).certificate
    with pytest.raises(InvalidCertificate):
        validate_certificate(A, Trivial())
    broken = Recursive(cert.alpha, cert.quotient, cert.separations[1:])
    with pytest.raises(InvalidCertificate):
        validate_certificate(A, broken)
    sep = cert.separations[0]
    wrong = PairSeparation(sep.pair, tuple(reversed(sep.table)), sep.term, sep.leaf)
    with pytest.raises(InvalidCertificate):
        validate_certificate(A, Recursive(cert.alpha, cert.quotient, (wrong,) + cert.separations[1:]))
    not_congruence = Congruence.from_blocks(3, [[0, 2], [1]])
    with pytest.raises(InvalidCertificate):
        validate_certificate(A, Recursive(not_congruence, cert.quotient, cert.separations))


def test_render_certificate_mentions_leaves():
    text = render_certificate(derive_certificate(example_4_12()).certificate)
    assert "semilattice" in text or "affine" in text


def test_verdicts():
    assert isinstance(derive_certificate(unary_algebra((1, 0))), NotInKsurj)
    star = classify_3element(star_demo())
    assert star.name == "NotInKsurj"
    assert star.probe.counts[-1][2] >= 2**5 - 2
    assert classify_3element(example_4_12()).name == "InKsurjEff"
    assert classify_simple_ksurj(nor_template()).name == "InKsurjEff"
    assert Unknown("x").name == "Unknown"


def test_classifier_preconditions():
    with pytest.raises(WrongSize):
        classify_3element(nor_template())
    with pytest.raises(NotSimple):
        classify_simple_ksurj(example_4_12())


def test_negation_probe_doubles():
    verdict = derive_certificate(unary_algebra((1, 0)))
    assert [surj for _, _, surj in verdict.probe.counts] == [2, 4, 8, 16]
