"""Decision procedures for concrete templates and the two-element classifier."""

from __future__ import annotations

import functools
import itertools
from dataclasses import dataclass, field

from .clones import essential_arity
from .enumerators import (
    InKsurjEff,
    certificate_enumerator,
    derive_certificate,
    enum_homs_semilattice,
    enumerate_homs_certified,
)
from .errors import SignatureMismatch, WrongDomain
from .homs import find_hom, is_homomorphism
from .instances import boolean_algebra, nor_template, prop_5_1, sheffer_spec
from .rewrite import enforce_identities, qfpp_reduce
from .structure import Structure, graph_of, induced_substructure, subuniverses
from .terms import load_identities
from .width import solve_by_minimality


@dataclass
class SolveResult:
    answer: bool
    witness: tuple = None
    method: str = ""

    def __bool__(self):
        return self.answer


# -- the six Schaefer operations ---------------------------------------------------------------

SCHAEFER_OPS = {
    "const0": (1, lambda x: 0),
    "const1": (1, lambda x: 1),
    "min": (2, lambda x, y: x & y),
    "max": (2, lambda x, y: x | y),
    "majority": (3, lambda x, y, z: (x & y) | (y & z) | (x & z)),
    "minority": (3, lambda x, y, z: x ^ y ^ z),
}


def preservation_failure(R, name):
    """First ``(relation, input tuples)`` the operation maps outside the relation, or None."""
    k, op = SCHAEFER_OPS[name]
    for rel, _ in R.signature.rels:
        tuples = sorted(R.rels[rel])
        target = R.rels[rel]
        for rows in itertools.product(tuples, repeat=k):
            image = tuple(op(*col) for col in zip(*rows)) if rows and rows[0] else ()
            if image not in target:
                return rel, rows
    return None


def _check_boolean(S):
    if S.size != 2:
        raise WrongDomain(f"expected a two-element domain, got {S.size}")


def schaefer_check(R):
    """The Schaefer operations preserving every relation of ``R``."""
    _check_boolean(R)
    if R.signature.funcs:
        raise SignatureMismatch("schaefer_check takes a relational structure")
    return {name for name in SCHAEFER_OPS if preservation_failure(R, name) is None}


# -- GF(2) ------------------------------------------------------------------------------------


def gf2_solve(equations, nvars):
    """Solve ``xor of variables in mask = rhs`` equations; a 0/1 list or None."""
    pivots = {}  # pivot bit -> (mask, rhs)
    for mask, rhs in equations:
        for bit, (pm, pr) in pivots.items():
            if mask >> bit & 1:
                mask ^= pm
                rhs ^= pr
        if not mask:
            if rhs:
                return None
            continue
        bit = mask.bit_length() - 1
        for other, (om, orhs) in list(pivots.items()):
            if om >> bit & 1:
                pivots[other] = (om ^ mask, orhs ^ rhs)
        pivots[bit] = (mask, rhs)
    values = [0] * nvars
    for bit, (mask, rhs) in pivots.items():
        # free variables are 0, so the pivot takes the right-hand side
        values[bit] = rhs
    return values


def affine_equations(R, arity):
    """Equations ``c . x = b`` cutting out ``R`` if it is an affine subspace of ``{0,1}**arity``."""
    tuples = sorted(R)
    if not tuples:
        return [(0, 1)]
    base = tuples[0]
    out = []
    for c in range(1, 2**arity):
        coeffs = [(c >> (arity - 1 - i)) & 1 for i in range(arity)]
        rhs = sum(a * b for a, b in zip(coeffs, base)) % 2
        if all(sum(a * b for a, b in zip(coeffs, t)) % 2 == rhs for t in tuples):
            out.append((coeffs, rhs))
    return out


def affine_solve(X, A):
    """Homomorphism to a two-element template whose graph is preserved by minority."""
    GX, GA = graph_of(X), graph_of(A)
    eqs = []
    for name, k in GX.signature.rels:
        cut = affine_equations(GA.rels[name], k)
        for t in GX.rels[name]:
            for coeffs, rhs in cut:
                mask = 0
                for c, y in zip(coeffs, t):
                    if c:
                        mask ^= 1 << y
                eqs.append((mask, rhs))
    values = gf2_solve(eqs, X.size)
    if values is None:
        return None
    h = tuple(values)
    return h if is_homomorphism(h, X, A) else None


# -- two-element classifier --------------------------------------------------------------------


@dataclass(frozen=True)
class NonUnaryOperation:
    symbol: str

    def __str__(self):
        return f"operation {self.symbol} is not essentially unary"


@dataclass(frozen=True)
class SchaeferPolymorphism:
    which: str

    def __str__(self):
        return f"graph is preserved by {self.which}"


@dataclass
class BooleanVerdict:
    complexity: str  # "P" or "NP-complete"
    reason: object = None
    refutations: dict = field(default_factory=dict)
    solver: object = field(default=None, repr=False)

    @property
    def polynomial(self):
        return self.complexity == "P"

    def render(self):
        if self.polynomial:
            return f"P: {self.reason}"
        lines = ["NP-complete: all operations essentially unary; graph has none of the six polymorphisms"]
        for name, (rel, rows) in self.refutations.items():
            lines.append(f"  {name}: fails on {rel} at {list(rows)}")
        return "\n".join(lines)


def certificates_for(A):
    """Certificates for every subalgebra of ``A``, keyed by subuniverse."""
    out = {}
    alg = A.algebraic_reduct()
    for B in subuniverses(alg):
        sub, _ = induced_substructure(alg, B)
        verdict = derive_certificate(sub)
        if isinstance(verdict, InKsurjEff):
            out[B] = verdict.certificate
    return out


def _certified_solver(A):
    certs = certificates_for(A)

    def solve(X):
        homs = enumerate_homs_certified(X, A, certs)
        return SolveResult(bool(homs), homs[0] if homs else None, "certified enumeration")

    return solve


def _constant_solver(A, c):
    def solve(X):
        h = (c,) * X.size
        return SolveResult(True, h, f"constant {c}") if is_homomorphism(h, X, A) else SolveResult(False)

    return solve


def _minimality_solver(A):
    def solve(X):
        h = solve_by_minimality(X, A, 2, 3)
        return SolveResult(h is not None, h, "(2,3)-minimality")

    return solve


def _affine_solver(A):
    def solve(X):
        h = affine_solve(X, A)
        return SolveResult(h is not None, h, "linear equations over GF(2)")

    return solve


def classify_boolean(A):
    """Polynomial time or NP-complete, for a template on ``{0,1}``."""
    _check_boolean(A)
    for name, k in A.signature.funcs:
        if essential_arity(A.ops[name], 2, k) >= 2:
            return BooleanVerdict("P", NonUnaryOperation(name), solver=_certified_solver(A))
    G = graph_of(A)
    admitted = schaefer_check(G)
    for name in SCHAEFER_OPS:
        if name in admitted:
            if name.startswith("const"):
                solver = _constant_solver(A, int(name[-1]))
            elif name == "minority":
                solver = _affine_solver(A)
            else:
                solver = _minimality_solver(A)
            return BooleanVerdict("P", SchaeferPolymorphism(name), solver=solver)
    refutations = {name: preservation_failure(G, name) for name in SCHAEFER_OPS}
    return BooleanVerdict("NP-complete", None, refutations)


# -- the NOR template -----------------------------------------------------------------------------


def _single_binary(X):
    funcs = X.signature.funcs
    if len(funcs) != 1 or funcs[0][1] != 2:
        raise SignatureMismatch("expected exactly one binary operation symbol")
    return funcs[0][0]


def _renamed_algebra(X, mapping):
    return Structure.build(X.size, {mapping[name]: (k, list(X.ops[name])) for name, k in X.signature.funcs})


def boolean_algebra_atom(B):
    """An atom of a finite Boolean algebra with more than one element."""
    bottom = B.apply("zero", (0,))
    above = [x for x in range(B.size) if x != bottom]
    for a in above:
        if all(B.apply("and", (a, y)) in (a, bottom) for y in range(B.size)):
            return a
    raise AssertionError("finite Boolean algebra without an atom")


def sheffer_solve(X, target=None):
    """Homomorphism to the NOR template by rewriting into a Boolean algebra.

    The instance is quotiented until it satisfies the compatibility
    identities, translated into the Boolean-algebra signature, and quotiented
    until it is a Boolean algebra; a homomorphism exists exactly when more
    than one element survives.  ``target`` may add relations to the template;
    these are checked on the witness, with brute force as a fallback.
    """
    sym = _single_binary(X)
    A = nor_template()
    alg = _renamed_algebra(X, {sym: "m"})
    spec = sheffer_spec()
    X1, q1, _ = enforce_identities(alg, spec.compatibility_identities())
    Y = qfpp_reduce(X1, spec, A, boolean_algebra(), validate=False)
    X2, q2, _ = enforce_identities(Y, load_identities("boolean-algebra"))
    if X2.size <= 1:
        answer = SolveResult(False, None, "Boolean algebra collapsed")
    else:
        atom = boolean_algebra_atom(X2)
        ultra = [1 if X2.apply("and", (atom, y)) == atom else 0 for y in range(X2.size)]
        h = tuple(ultra[q2[q1[x]]] for x in range(X.size))
        answer = SolveResult(True, h, "Boolean algebra atom")
    if X.signature.rels:
        if target is None:
            raise SignatureMismatch("instance has relations but no target interprets them")
        if answer.answer and is_homomorphism(answer.witness, X, target):
            return answer
        h = find_hom(X, target)
        return SolveResult(h is not None, h, "brute force (relations)")
    return answer


# -- the XOR template ----------------------------------------------------------------------------


def z_solve(X):
    """Homomorphism to ``({0,1}; x+y, x+y+1)`` by Gaussian elimination over GF(2).

    The first binary symbol is read as ``x+y`` and the second as ``x+y+1``.
    """
    funcs = X.signature.funcs
    if len(funcs) != 2 or any(k != 2 for _, k in funcs) or X.signature.rels:
        raise SignatureMismatch("expected exactly two binary operation symbols")
    (p, _), (q, _) = funcs
    n = X.size
    eqs = []
    for x in range(n):
        for y in range(n):
            i = x * n + y
            base = (1 << x) ^ (1 << y)
            eqs.append((base ^ (1 << X.ops[p][i]), 0))
            eqs.append((base ^ (1 << X.ops[q][i]), 1))
    values = gf2_solve(eqs, n)
    if values is None:
        return SolveResult(False, None, "inconsistent linear system")
    return SolveResult(True, tuple(values), "linear system")


# -- the three-element example -------------------------------------------------------------------


@functools.lru_cache(maxsize=None)
def _prop5_certificate():
    verdict = derive_certificate(prop_5_1().algebraic_reduct())
    assert isinstance(verdict, InKsurjEff)
    return verdict.certificate


def prop5_solve(X):
    """Homomorphism to the three-element template with disequality ``E``.

    A homomorphism either hits all three elements (enumerated from the
    certificate and filtered by ``E``), or lands in ``{0,2}`` (a semilattice),
    or in ``{0,1}`` or ``{1,2}`` (where the operation is a projection and the
    graph has a majority polymorphism).
    """
    A = prop_5_1()
    if X.signature != A.signature:
        raise SignatureMismatch("instance signature differs from the template")
    Xalg, Aalg = X.algebraic_reduct(), A.algebraic_reduct()
    for h in certificate_enumerator(Xalg, Aalg, _prop5_certificate(), check=False):
        if is_homomorphism(h, X, A):
            return SolveResult(True, h, "surjective")
    B, elems = induced_substructure(A, [0, 2])
    for h in enum_homs_semilattice(Xalg, B.algebraic_reduct()):
        if is_homomorphism(h, X, B):
            return SolveResult(True, tuple(elems[v] for v in h), "semilattice {0,2}")
    for part in ([0, 1], [1, 2]):
        C, elems = induced_substructure(A, part)
        h = solve_by_minimality(X, C, 2, 3)
        if h is not None:
            return SolveResult(True, tuple(elems[v] for v in h), f"majority {{{part[0]},{part[1]}}}")
    return SolveResult(False, None, "no case applies")


def brute_solve(X, A):
    h = find_hom(X, A)
    return SolveResult(h is not None, h, "brute force")
