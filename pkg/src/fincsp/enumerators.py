"""Polynomial-time homomorphism enumerators and the certificates that drive them.

Targets that are two-element semilattices or groups have dedicated
enumerators.  Any other target is handled through a recursive certificate:
a congruence ``alpha``, a certificate for the quotient, and for each pair of
distinct ``alpha``-related elements a unary polynomial separating them whose
range sits inside a set carrying a semilattice or group operation (a leaf).
Surjective homomorphisms into the target are then reconstructed from the
quotient homomorphism and the leaf homomorphisms.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .clones import DEFAULT_BUDGET, unary_polynomials
from .congruences import (
    all_congruences,
    find_type1free_chain,
    induced_binary_polynomials,
    separating_polynomial,
    type_of_cover,
)
from .errors import (
    BudgetExceeded,
    InvalidCertificate,
    NotFound,
    NotSimple,
    SignatureMismatch,
    TargetNotGroup,
    TargetNotSemilattice,
    TraceTooLarge,
    WrongSize,
)
from .homs import counting_probe, enumerate_homs, is_homomorphism
from .rewrite import enforce_identities
from .structure import (
    Congruence,
    Structure,
    constant_name,
    expand,
    flat_index,
    find_congruence_violation,
    generated_subuniverse,
    induced_substructure,
    quotient,
    subuniverses,
)
from .terms import _eval, format_term, load_identities, satisfies_all, symbols_of, term_table


class HomList(list):
    """A list of homomorphisms remembering the size of the reduced instance."""

    reduced_size = None


# -- semilattices ------------------------------------------------------------------------


def _single_binary_symbol(S):
    funcs = S.signature.funcs
    if len(funcs) != 1 or funcs[0][1] != 2 or S.signature.rels:
        return None
    return funcs[0][0]


def semilattice_units(S):
    """``(unit, absorbing)`` of a two-element semilattice, or None."""
    s = _single_binary_symbol(S)
    if s is None or S.size != 2:
        return None
    ids = load_identities("semilattice", {"s": s})
    if not satisfies_all(S, ids):
        return None
    unit = next(u for u in range(2) if S.apply(s, (u, 1 - u)) == 1 - u)
    return unit, 1 - unit


def enum_homs_semilattice(X, S):
    """All homomorphisms into a two-element semilattice via principal filters."""
    units = semilattice_units(S)
    if units is None:
        raise TargetNotSemilattice("target must be a two-element semilattice with one binary symbol")
    if X.signature.funcs != S.signature.funcs:
        raise SignatureMismatch("instance and target signatures differ")
    s = S.signature.funcs[0][0]
    unit, absorbing = units
    Xr, qmap, _ = enforce_identities(X, load_identities("semilattice", {"s": s}))
    n = Xr.size
    candidates = [[absorbing] * n]
    for x in range(n):
        up = [y for y in range(n) if Xr.apply(s, (x, y)) == x]
        h = [absorbing] * n
        for y in up:
            h[y] = unit
        candidates.append(h)
    out = HomList()
    seen = set()
    for h in candidates:
        lifted = tuple(h[q] for q in qmap)
        if lifted in seen:
            continue
        if is_homomorphism(lifted, X, S):
            seen.add(lifted)
            out.append(lifted)
    out.sort()
    out.reduced_size = n
    return out


# -- groups -----------------------------------------------------------------------------------


def group_symbols(S):
    """``(mul, inv, e)`` by arity, or None if the signature does not fit."""
    by_arity = {}
    for name, k in S.signature.funcs:
        by_arity.setdefault(k, []).append(name)
    if sorted(k for _, k in S.signature.funcs) != [0, 1, 2] or S.signature.rels:
        return None
    return by_arity[2][0], by_arity[1][0], by_arity[0][0]


def is_group(S):
    names = group_symbols(S)
    if names is None:
        return False
    return satisfies_all(S, load_identities("group", dict(zip(("mul", "inv", "e"), names))))


def greedy_generators(S):
    """Add elements outside the current subuniverse until everything is generated."""
    gens = []
    current = generated_subuniverse(S, [])
    for x in range(S.size):
        if x not in current:
            gens.append(x)
            current = generated_subuniverse(S, gens)
    return gens


def _extend_from_generators(X, G, assignment, names):
    """Propagate generator values through the group operations; None on conflict."""
    mul, inv, e = names
    h = {X.ops[e][0]: G.ops[e][0]}
    for x, v in assignment.items():
        if h.get(x, v) != v:
            return None
        h[x] = v
    frontier = list(h)
    while frontier:
        nxt = []
        known = list(h)
        for x in frontier:
            steps = [(X.apply(inv, (x,)), G.apply(inv, (h[x],)))]
            for y in known:
                steps.append((X.apply(mul, (x, y)), G.apply(mul, (h[x], h[y]))))
                steps.append((X.apply(mul, (y, x)), G.apply(mul, (h[y], h[x]))))
            for z, v in steps:
                if z in h:
                    if h[z] != v:
                        return None
                else:
                    h[z] = v
                    nxt.append(z)
                    known.append(z)
        frontier = nxt
    if len(h) != X.size:
        return None
    return tuple(h[x] for x in range(X.size))


def enum_homs_group(X, G):
    """All homomorphisms into a finite group from assignments of a small generating set."""
    names = group_symbols(G)
    if names is None or not is_group(G):
        raise TargetNotGroup("target must be a group with binary, unary and nullary symbols")
    if X.signature.funcs != G.signature.funcs:
        raise SignatureMismatch("instance and target signatures differ")
    ids = load_identities("group", dict(zip(("mul", "inv", "e"), names)))
    Xr, qmap, _ = enforce_identities(X, ids)
    gens = greedy_generators(Xr)
    out = HomList()
    seen = set()
    for values in itertools.product(range(G.size), repeat=len(gens)):
        h = _extend_from_generators(Xr, G, dict(zip(gens, values)), names)
        if h is None:
            continue
        lifted = tuple(h[q] for q in qmap)
        if lifted not in seen and is_homomorphism(lifted, X, G):
            seen.add(lifted)
            out.append(lifted)
    out.sort()
    out.reduced_size = Xr.size
    out.generators = gens
    return out


# -- certificates ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SemilatticeLeaf:
    """``term`` (a binary polynomial) acts as a semilattice operation on ``domain``."""

    domain: tuple
    term: object

    kind = "semilattice"

    def symbols(self):
        return {"s": (2, self.term)}


@dataclass(frozen=True)
class AffineLeaf:
    """Polynomials making ``domain`` an abelian group."""

    domain: tuple
    mul: object
    inv: object
    unit: object

    kind = "affine"

    def symbols(self):
        return {"mul": (2, self.mul), "inv": (1, self.inv), "e": (0, self.unit)}


@dataclass(frozen=True)
class PairSeparation:
    pair: tuple
    table: tuple
    term: object
    leaf: object


@dataclass(frozen=True)
class Trivial:
    """Certificate of a one-element algebra."""


@dataclass(frozen=True)
class Recursive:
    alpha: Congruence
    quotient: object
    separations: tuple


def _leaf_structure(A, leaf):
    """The leaf algebra on its domain, re-indexed to positions in the domain."""
    As = with_constants_for(A, leaf_constants(leaf))
    ops = {}
    pos = {v: i for i, v in enumerate(leaf.domain)}
    for name, (k, term) in leaf.symbols().items():
        table = []
        for args in itertools.product(leaf.domain, repeat=k):
            v = _eval(term, As, args)
            if v not in pos:
                raise InvalidCertificate(f"leaf operation {name} leaves the leaf domain")
            table.append(pos[v])
        ops[name] = (k, table)
    return Structure.build(len(leaf.domain), ops)


def leaf_constants(leaf):
    out = set()
    for _, (_, term) in leaf.symbols().items():
        out |= _constants_in(term)
    return out


def _constants_in(term):
    return {int(s[len("const_"):]) for s in symbols_of(term) if s.startswith("const_")}


def with_constants_for(A, consts, values=None):
    """Expand ``A`` by ``const_a`` symbols, interpreted as ``values[a]`` (default ``a``)."""
    extra = {}
    for a in sorted(consts):
        extra[constant_name(a)] = (0, [a if values is None else values[a]])
    return expand(A.algebraic_reduct(), extra)


def certificate_constants(cert):
    if isinstance(cert, Trivial):
        return set()
    out = set()
    for sep in cert.separations:
        out |= _constants_in(sep.term) | leaf_constants(sep.leaf)
    return out


def validate_certificate(A, cert):
    """Raise InvalidCertificate unless ``cert`` certifies ``A``."""
    if isinstance(cert, Trivial):
        if A.size != 1:
            raise InvalidCertificate("trivial certificate for an algebra with more than one element")
        return
    if not isinstance(cert, Recursive):
        raise InvalidCertificate(f"unknown certificate node {type(cert).__name__}")
    alpha = cert.alpha
    if alpha.size != A.size:
        raise InvalidCertificate("congruence size does not match the algebra")
    if find_congruence_violation(A, alpha) is not None:
        raise InvalidCertificate("alpha is not a congruence")
    validate_certificate(quotient(A, alpha), cert.quotient)
    covered = set()
    for sep in cert.separations:
        a, b = sep.pair
        if not alpha.related(a, b) or a == b:
            raise InvalidCertificate(f"pair {sep.pair} is not inside an alpha-block")
        As = with_constants_for(A, _constants_in(sep.term))
        table = term_table(sep.term, As, 1)
        if table != tuple(sep.table):
            raise InvalidCertificate(f"separating term does not induce the stated table for {sep.pair}")
        if table[a] == table[b]:
            raise InvalidCertificate(f"polynomial does not separate {sep.pair}")
        block = alpha.block(a)
        if not {table[x] for x in block} <= set(sep.leaf.domain):
            raise InvalidCertificate(f"image of the block of {a} is not inside the leaf domain")
        L = _leaf_structure(A, sep.leaf)
        if sep.leaf.kind == "semilattice":
            if semilattice_units(L) is None:
                raise InvalidCertificate("leaf operation is not a semilattice on a two-element set")
        elif not is_group(L):
            raise InvalidCertificate("leaf operations do not form a group")
        covered.add((min(a, b), max(a, b)))
    for block in alpha.blocks():
        for a, b in itertools.combinations(block, 2):
            if (a, b) not in covered:
                raise InvalidCertificate(f"pair {(a, b)} has no separating polynomial")


def _leaf_tables(Xs, leaf):
    return {name: (k, term_table(term, Xs, k)) for name, (k, term) in leaf.symbols().items()}


def _leaf_homs(Z, leaf, tables, n, A, cache):
    """Homomorphisms from the closure ``Z`` into the leaf algebra, as dicts
    from elements of the instance to elements of ``A``."""
    Zelems = sorted(Z)
    zpos = {z: i for i, z in enumerate(Zelems)}
    ops = {}
    for name, (k, table) in tables.items():
        ops[name] = (
            k,
            tuple(zpos[table[flat_index(args, n)]] for args in itertools.product(Zelems, repeat=k)),
        )
    key = (leaf, tuple(Zelems), tuple(sorted(ops.items())))
    if key not in cache:
        Zalg = Structure.build(len(Zelems), {name: (k, list(t)) for name, (k, t) in ops.items()})
        if leaf not in cache:
            cache[leaf] = _leaf_structure(A, leaf)
        L = cache[leaf]
        if leaf.kind == "semilattice":
            homs = enum_homs_semilattice(Zalg, L)
        else:
            homs = enum_homs_group(Zalg, L)
        cache[key] = [{z: leaf.domain[h[i]] for i, z in enumerate(Zelems)} for h in homs]
    return cache[key]


def _leaf_closure(size, tables, seed):
    """Subuniverse generated by ``seed`` under the leaf operations."""
    S = Structure.build(size, {name: (k, list(t)) for name, (k, t) in tables.items()})
    return generated_subuniverse(S, seed)


def certificate_enumerator(X, A, cert, check=True):
    """Surjective homomorphisms ``X -> A`` reconstructed from ``cert``.

    Constants in the certificate's polynomials are interpreted in ``X`` by
    guessing, for each constant ``a``, an element of ``X`` that a surjective
    homomorphism sends to ``a``; every guess is consistent with the quotient
    homomorphism, so the number of guesses stays polynomial.
    """
    if X.signature.funcs != A.signature.funcs:
        raise SignatureMismatch("instance and target signatures differ")
    if check:
        validate_certificate(A, cert)
    return sorted(_certified(X, A, cert))


def _certified(X, A, cert):
    n = X.size
    if isinstance(cert, Trivial):
        h = (0,) * n
        return {h} if is_homomorphism(h, X, A) else set()
    alpha = cert.alpha
    Q = quotient(A, alpha)
    idx = alpha.index_map()
    reps = alpha.representatives()
    consts = sorted(certificate_constants(cert))
    groups = {}
    for sep in cert.separations:
        key = (alpha.block_of[sep.pair[0]], sep.term, sep.leaf)
        groups.setdefault(key, sep)
    groups = list(groups.items())
    results = set()
    cache = {}
    for tilde in _certified(X.algebraic_reduct(), Q, cert.quotient):
        pools = [[x for x in range(n) if tilde[x] == idx[a]] for a in consts]
        for guess in itertools.product(*pools):
            values = dict(zip(consts, guess))
            Xs = with_constants_for(X, consts, values)
            plans = []
            dead = False
            for (rep, term, leaf), sep in groups:
                ftab = term_table(term, Xs, 1)
                members = [x for x in range(n) if tilde[x] == idx[rep]]
                if not members:
                    continue
                Y = {ftab[x] for x in members}
                tables = _leaf_tables(Xs, leaf)
                Z = _leaf_closure(n, tables, Y)
                homs = _leaf_homs(Z, leaf, tables, n, A, cache)
                if not homs:
                    dead = True
                    break
                plans.append((members, ftab, sep.table, homs))
            if dead:
                continue
            cand = [set(alpha.block(reps[tilde[x]])) for x in range(n)]
            _combine(plans, 0, cand, X, A, results)
    return results


def _combine(plans, i, cand, X, A, results):
    if i == len(plans):
        for h in itertools.product(*[sorted(c) for c in cand]):
            if len(set(h)) == A.size and is_homomorphism(h, X, A):
                results.add(h)
        return
    members, ftab, fA, homs = plans[i]
    for g in homs:
        new = list(cand)
        ok = True
        for x in members:
            want = g[ftab[x]]
            keep = {c for c in cand[x] if fA[c] == want}
            if not keep:
                ok = False
                break
            new[x] = keep
        if ok:
            _combine(plans, i + 1, new, X, A, results)


def enumerate_homs_certified(X, A, certificates=None, budget=DEFAULT_BUDGET):
    """All homomorphisms ``X -> A``: surjective homomorphisms onto each
    subalgebra, each enumerated through that subalgebra's certificate.

    ``certificates`` maps subuniverses (frozensets) to certificates; missing
    ones are derived.  A subalgebra without a certificate falls back to the
    brute-force engine and is reported in ``fallbacks``.
    """
    out = HomList()
    out.fallbacks = []
    for B in subuniverses(A.algebraic_reduct()):
        sub, elems = induced_substructure(A, B)
        cert = (certificates or {}).get(B)
        if cert is None:
            verdict = derive_certificate(sub.algebraic_reduct(), budget)
            cert = verdict.certificate if isinstance(verdict, InKsurjEff) else None
        if cert is None:
            out.fallbacks.append(B)
            homs = enumerate_homs(X, sub, surjective=True)
        else:
            homs = certificate_enumerator(X.algebraic_reduct(), sub.algebraic_reduct(), cert)
            homs = [h for h in homs if is_homomorphism(h, X, sub)]
        out.extend(tuple(elems[v] for v in h) for h in homs)
    out.sort()
    return out


def render_certificate(cert, indent=""):
    if isinstance(cert, Trivial):
        return f"{indent}trivial (one element)"
    lines = [f"{indent}congruence {cert.alpha.render()}"]
    for sep in cert.separations:
        leaf = sep.leaf
        if leaf.kind == "semilattice":
            desc = f"semilattice on {{{','.join(map(str, leaf.domain))}}} via {format_term(leaf.term)}"
        else:
            desc = (
                f"group on {{{','.join(map(str, leaf.domain))}}} via mul={format_term(leaf.mul)}"
                f" inv={format_term(leaf.inv)} e={format_term(leaf.unit)}"
            )
        lines.append(
            f"{indent}  separate {sep.pair}: f={format_term(sep.term)} table={sep.table}; leaf {desc}"
        )
    lines.append(f"{indent}  quotient:")
    lines.append(render_certificate(cert.quotient, indent + "    "))
    return "\n".join(lines)


# -- deriving certificates ----------------------------------------------------------------------


@dataclass
class InKsurjEff:
    certificate: object
    strategy: str

    name = "InKsurjEff"


@dataclass
class NotInKsurj:
    cover: tuple
    probe: object
    reason: str

    name = "NotInKsurj"


@dataclass
class Unknown:
    reason: str

    name = "Unknown"


def _is_semilattice_table(t):
    return t[0] == 0 and t[3] == 1 and t[1] == t[2]


def _group_table(t, p):
    """Identity element if the ``p x p`` table is an abelian group operation."""
    rows = [t[i * p : (i + 1) * p] for i in range(p)]
    if any(sorted(r) != list(range(p)) for r in rows):
        return None
    if any(t[x * p + y] != t[y * p + x] for x in range(p) for y in range(p)):
        return None
    for x, y, z in itertools.product(range(p), repeat=3):
        if t[t[x * p + y] * p + z] != t[x * p + t[y * p + z]]:
            return None
    for e in range(p):
        if all(t[e * p + x] == x for x in range(p)):
            return e
    return None


def _is_prime(p):
    return p >= 2 and all(p % d for d in range(2, int(p**0.5) + 1))


def find_leaf(A, D, budget=DEFAULT_BUDGET):
    """A semilattice or cyclic-group leaf on the set ``D``, or None."""
    D = tuple(sorted(D))
    p = len(D)
    if not _is_prime(p):
        return None
    polys = induced_binary_polynomials(A, D, budget)
    if p == 2:
        for t, term in polys:
            if _is_semilattice_table(t):
                return SemilatticeLeaf(D, term)
    for t, term in polys:
        e = _group_table(t, p)
        if e is None:
            continue
        inv = 0
        for _ in range(p - 2):
            inv = ("__mul__", 0, inv)
        inv = _substitute_symbol(inv, term)
        return AffineLeaf(D, term, inv, (constant_name(D[e]),))
    return None


def _substitute_symbol(t, mul_term):
    """Replace the placeholder ``__mul__`` by the binary term ``mul_term``."""
    from .terms import is_var, substitute

    if is_var(t):
        return t
    children = [_substitute_symbol(c, mul_term) for c in t[1:]]
    if t[0] == "__mul__":
        return substitute(mul_term, children)
    return (t[0],) + tuple(children)


def _quotient_chain(alpha, chain):
    """Map congruences above ``alpha`` to congruences of the quotient."""
    reps = alpha.representatives()
    return [Congruence.from_labels([theta.block_of[r] for r in reps]) for theta in chain]


def certificate_from_chain(A, chain, budget=DEFAULT_BUDGET):
    """Certificate along a maximal chain whose covers all avoid type 1."""
    if A.size == 1:
        return Trivial()
    alpha = chain[1]
    seps = []
    leaf_cache = {}
    for block in alpha.blocks():
        for a, b in itertools.combinations(block, 2):
            sep = separating_polynomial(A, alpha, a, b, budget)
            fa = sep.table[a]
            D = tuple(sorted(u for u in sep.image if alpha.related(u, fa)))
            if D not in leaf_cache:
                leaf_cache[D] = find_leaf(A, D, budget)
            leaf = leaf_cache[D]
            if leaf is None:
                raise NotFound(f"no semilattice or group leaf on trace {D}")
            seps.append(PairSeparation((a, b), sep.table, sep.term, leaf))
    Q = quotient(A, alpha)
    qchain = _quotient_chain(alpha, chain[1:])
    return Recursive(alpha, certificate_from_chain(Q, qchain, budget), tuple(seps))


def certificate_full_congruence(A, budget=DEFAULT_BUDGET):
    """Certificate using the full congruence: every pair separated by a unary
    polynomial whose range carries a leaf."""
    n = A.size
    if n == 1:
        return Trivial()
    cl = unary_polynomials(A, budget)
    rows = cl.rows()
    order = sorted(range(len(rows)), key=lambda i: (len(set(rows[i])), i))
    leaf_cache = {}
    seps = []
    for a, b in itertools.combinations(range(n), 2):
        for i in order:
            row = rows[i]
            if row[a] == row[b]:
                continue
            D = tuple(sorted(set(row)))
            if D not in leaf_cache:
                leaf_cache[D] = find_leaf(A, D, budget)
            if leaf_cache[D] is not None:
                seps.append(PairSeparation((a, b), row, cl.term(i), leaf_cache[D]))
                break
        else:
            raise NotFound(f"no polynomial with a leaf range separates {a} and {b}")
    return Recursive(Congruence.full(n), Trivial(), tuple(seps))


PROBE_FREE_N = 4
PROBE_STAR_N = 5


def _free_probe(A, budget):
    for n_max in range(PROBE_FREE_N, 0, -1):
        try:
            return counting_probe(A, "free-algebra", n_max, budget=min(budget, 4000))
        except BudgetExceeded:
            continue
    return None


def derive_certificate(A, budget=DEFAULT_BUDGET):
    """Try to certify polynomial enumerability of surjective homomorphisms into ``A``.

    The chain strategy is tried first, then the full-congruence strategy.
    Non-membership is reported only where it is known to follow: a simple
    algebra of type 1, or a three-element algebra with a type-1 minimal
    congruence.
    """
    if A.signature.rels:
        A = A.algebraic_reduct()
    if A.size == 1:
        return InKsurjEff(Trivial(), "trivial")
    try:
        L = all_congruences(A)
        minimal = L.minimal()
        types = {m: type_of_cover(A, L.bottom, m, budget) for m in minimal}
        if len(L) == 2 and types[L.top] == 1:
            return NotInKsurj((L.bottom, L.top), _free_probe(A, budget), "simple algebra of type 1")
        if A.size == 3:
            for m in minimal:
                if types[m] == 1:
                    probe = counting_probe(A, "star-extension", PROBE_STAR_N, alpha=m, budget=budget)
                    return NotInKsurj((L.bottom, m), probe, "minimal congruence of type 1")
        chain = find_type1free_chain(A, budget, L)
        if chain:
            try:
                return InKsurjEff(certificate_from_chain(A, chain, budget), "chain")
            except NotFound:
                pass
        try:
            return InKsurjEff(certificate_full_congruence(A, budget), "full-congruence")
        except NotFound as exc:
            return Unknown(f"no certificate found: {exc}")
    except (BudgetExceeded, TraceTooLarge) as exc:
        return Unknown(f"budget exhausted: {exc}")


def classify_simple_ksurj(A, budget=DEFAULT_BUDGET):
    from .congruences import is_simple

    if not is_simple(A):
        raise NotSimple("algebra is not simple")
    return derive_certificate(A, budget)


def classify_3element(A, budget=DEFAULT_BUDGET):
    if A.size != 3:
        raise WrongSize(f"expected 3 elements, got {A.size}")
    return derive_certificate(A, budget)
