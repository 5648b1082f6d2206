"""Acceptance criteria, one test per criterion.

Each test records a ``criterion N: PASS/FAIL`` line that is printed in the
terminal summary, then asserts.
"""

import math
import time

import pytest

import oracles
from conftest import ACCEPTANCE_LINES
from fincsp import cli
from fincsp.congruences import all_congruences, type_of_cover
from fincsp.enumerators import (
    InKsurjEff,
    certificate_enumerator,
    classify_3element,
    enum_homs_group,
    enum_homs_semilattice,
)
from fincsp.homs import count_homs, counting_probe, enumerate_homs, find_hom, hom_exists
from fincsp.instances import (
    boolean_algebra,
    boolean_catalogue,
    boolean_template,
    build_not23_instance,
    cyclic_group,
    example_4_12,
    mixed_instance,
    nor_template,
    prop_5_1,
    seeded,
    semilattice,
    star_demo,
    unary_algebra,
    z_template,
)
from fincsp.rewrite import enforce_identities
from fincsp.solvers import SCHAEFER_OPS, classify_boolean, prop5_solve, sheffer_solve, z_solve
from fincsp.structure import Structure, generated_subuniverse, induced_substructure
from fincsp.terms import load_identities
from fincsp.width import kl_minimality, paper_p_system, verify_system


def record(number, ok, detail):
    ACCEPTANCE_LINES.append(f"criterion {number}: {'PASS' if ok else 'FAIL'} ({detail})")
    assert ok, detail


def test_criterion_1_ten_element_instance():
    start = time.perf_counter()
    outcome = cli.run(["paper", "prop-6-1"])
    X, A = build_not23_instance(), nor_template()
    homs = oracles.homs(X, A)
    P = paper_p_system()
    verified = verify_system(X, A, P, 2, 3)
    M = kl_minimality(X, A, 2, 3)
    elapsed = time.perf_counter() - start
    ok = (
        X.size == 10
        and dict(outcome.fields)["homomorphisms"] == 0
        and homs == []
        and P.nontrivial()
        and verified is True
        and M.nontrivial()
        and M.contains(P)
        and elapsed < 5
    )
    record(1, ok, f"homs={len(homs)}, explicit system {verified}, minimality nontrivial={M.nontrivial()}, {elapsed:.2f}s")


def _agreement(solver, A, count, n_max, seed):
    rng = seeded(seed)
    bad = 0
    for _ in range(count):
        X = mixed_instance(rng, A, n_max)
        got = solver(X)
        truth = find_hom(X, A) is not None
        if got.answer != truth or (got.answer and not oracles.is_hom(got.witness, X, A)):
            bad += 1
    return bad


def test_criterion_2_sheffer_pipeline():
    start = time.perf_counter()
    bad = _agreement(sheffer_solve, nor_template(), 500, 10, seed=2)
    elapsed = time.perf_counter() - start
    record(2, bad == 0 and elapsed < 60, f"{bad} disagreements on 500 instances, {elapsed:.1f}s")


def test_criterion_3_z_template():
    bad = _agreement(z_solve, z_template(), 500, 10, seed=3)
    record(3, bad == 0, f"{bad} disagreements on 500 instances")


def test_criterion_4_count_preservation():
    group_names = {"mul": "mul", "inv": "inv", "e": "e"}
    cases = [
        (load_identities("semilattice"), [semilattice("meet"), semilattice("join"), _chain_semilattice()]),
        (load_identities("group", group_names), [cyclic_group(2), cyclic_group(3)]),
        (load_identities("boolean-algebra"), [boolean_algebra()]),
    ]
    rng = seeded(4)
    bad = checked = 0
    for i in range(200):
        ids, targets = cases[i % 3]
        A = targets[(i // 3) % len(targets)]
        X = mixed_instance(rng, A, 7)
        Xr, _, _ = enforce_identities(X, ids)
        checked += 1
        if count_homs(X, A) != count_homs(Xr, A):
            bad += 1
    record(4, bad == 0 and checked == 200, f"{bad} count mismatches on {checked} pairs")


def _chain_semilattice():
    return Structure.build(3, {"s": (2, [min(x, y) for x in range(3) for y in range(3)])})


def test_criterion_5_enumerators():
    problems = []
    rng = seeded(5)
    for i in range(200):
        S = semilattice("meet" if i % 2 else "join")
        X = mixed_instance(rng, S, 7)
        homs = enum_homs_semilattice(X, S)
        if list(homs) != enumerate_homs(X, S) or len(homs) > homs.reduced_size + 1:
            problems.append(("semilattice", i))
    for i in range(200):
        G = cyclic_group((2, 3, 4)[i % 3])
        X = mixed_instance(rng, G, 7)
        homs = enum_homs_group(X, G)
        if list(homs) != enumerate_homs(X, G) or len(homs) > X.size ** math.ceil(math.log2(G.size)):
            problems.append(("group", i))
    templates = [example_4_12(), prop_5_1().algebraic_reduct()]
    certs = [classify_3element(A).certificate for A in templates]
    for i in range(200):
        A, cert = templates[i % 2], certs[i % 2]
        X = mixed_instance(rng, A, 7)
        if certificate_enumerator(X, A, cert) != enumerate_homs(X, A, surjective=True):
            problems.append(("certificate", i))
    record(5, not problems, f"{len(problems)} mismatches over 600 instances")


def _alpha():
    L = all_congruences(example_4_12())
    return L, L.minimal()[0]


def test_criterion_6a_example_congruences():
    L, _ = _alpha()
    blocks = {frozenset(frozenset(b) for b in theta.blocks()) for theta in L.congruences}
    expected = {
        frozenset({frozenset({0}), frozenset({1}), frozenset({2})}),
        frozenset({frozenset({0, 1}), frozenset({2})}),
        frozenset({frozenset({0, 1, 2})}),
    }
    assert blocks == oracles.congruences(example_4_12())
    record("6a", blocks == expected, f"{len(blocks)} congruences")


def test_criterion_6b_example_type():
    L, alpha = _alpha()
    t = type_of_cover(example_4_12(), L.bottom, alpha)
    record("6b", t == 5, f"typ(0, alpha) = {t}; the trace {{0,1}} carries negation and join, expected 5 as stated")


def test_criterion_6c_example_classification():
    verdict = classify_3element(example_4_12())
    record("6c", isinstance(verdict, InKsurjEff), f"{verdict.name}")


def test_criterion_6d_example_certificate():
    A = example_4_12()
    cert = classify_3element(A).certificate
    rng = seeded(6)
    bad = 0
    for _ in range(200):
        X = mixed_instance(rng, A, 7)
        if certificate_enumerator(X, A, cert) != enumerate_homs(X, A, surjective=True):
            bad += 1
    record("6d", bad == 0, f"{bad} mismatches on 200 instances")


def test_criterion_7_three_element_template():
    A = prop_5_1()
    alg = A.algebraic_reduct()
    L = all_congruences(alg)
    types = [type_of_cover(alg, L.bottom, beta) for beta in L.minimal()]
    verdict = classify_3element(alg)
    rng = seeded(7)
    bad = 0
    for _ in range(300):
        X = mixed_instance(rng, A, 8)
        got = prop5_solve(X)
        if got.answer != hom_exists(X, A) or (got.answer and not oracles.is_hom(got.witness, X, A)):
            bad += 1
    ok = 1 not in types and isinstance(verdict, InKsurjEff) and bad == 0
    record(7, ok, f"minimal cover types {types}, {verdict.name}, {bad} disagreements on 300 instances")


def test_criterion_8_growth_witnesses():
    neg = unary_algebra((1, 0))
    probe = counting_probe(neg, "free-algebra", 4)
    sizes = [size for size, _, _ in probe.counts]
    surj = [s for _, _, s in probe.counts]
    free_ok = surj == [2, 4, 8, 16] and sizes == [2, 4, 6, 8]
    star = counting_probe(star_demo(), "star-extension", 6)
    star_surj = [s for _, _, s in star.counts]
    star_ok = all(star_surj[n - 1] >= 2**n - 2 for n in range(2, 7))
    # independent recount on the smaller members
    from fincsp.clones import star_extension
    from fincsp.homs import star_congruence

    alpha = star_congruence(star_demo())
    for n in (2, 3):
        X = star_extension(star_demo(), alpha, n).algebra
        star_ok &= len(oracles.homs(X, star_demo(), surjective=True)) == star_surj[n - 1]
    record(8, free_ok and star_ok, f"free: sizes {sizes} surjective {surj}; star: surjective {star_surj}")


def test_criterion_9_boolean_catalogue():
    catalogue = boolean_catalogue()
    problems = []
    for i, (name, A) in enumerate(catalogue):
        v = classify_boolean(A)
        if v.polynomial:
            rng = seeded(900 + i)
            for _ in range(25):
                X = mixed_instance(rng, A, 6)
                got = v.solver(X)
                truth = bool(oracles.homs(X, A))
                if got.answer != truth or (got.answer and not oracles.is_hom(got.witness, X, A)):
                    problems.append(name)
                    break
        else:
            if set(v.refutations) != set(SCHAEFER_OPS) or any(r is None for r in v.refutations.values()):
                problems.append(name)
    hard = sum(1 for _, A in catalogue if not classify_boolean(A).polynomial)
    ok = len(catalogue) >= 20 and not problems
    record(9, ok, f"{len(catalogue)} templates, {hard} NP-complete, problems: {problems or 'none'}")


def test_criterion_10_majority_template():
    A = boolean_template([], ["IMPL", "OR2"])
    rng = seeded(10)
    bad = 0
    for _ in range(200):
        X = mixed_instance(rng, A, 8)
        if kl_minimality(X, A, 2, 3).nontrivial() != hom_exists(X, A):
            bad += 1
    record(10, bad == 0, f"{bad} disagreements on 200 instances")


@pytest.mark.long
def test_criterion_11_nine_nine_minimality():
    start = time.perf_counter()
    X, A = build_not23_instance(), nor_template()
    full = kl_minimality(X, A, 9, 9)
    rng = seeded(11)
    bad = sampled = 0
    for _ in range(20):
        seed = rng.sample(range(X.size), rng.randint(1, 3))
        B = sorted(generated_subuniverse(X, seed))
        sub, _ = induced_substructure(X, B)
        k = min(9, sub.size)
        sampled += 1
        if kl_minimality(sub, A, k, k).nontrivial() and not hom_exists(sub, A):
            bad += 1
    elapsed = time.perf_counter() - start
    ok = (full.is_trivial() or hom_exists(X, A)) and bad == 0 and elapsed < 600
    status = "trivial" if full.is_trivial() else "nontrivial"
    record(11, ok, f"(9,9)-minimality {status}; {bad} bad of {sampled} sampled subinstances; {elapsed:.1f}s")
