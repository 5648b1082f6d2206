"""Instance rewriting: enforcing identities by quotienting, and translating
instances between term-equivalent templates with quantifier-free
primitive positive definitions of the relations."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .congruences import principal_congruence
from .errors import (
    CompatibilityIdentitiesNotEnforced,
    ParseError,
    SpecInvalid,
    UnknownSymbol,
)
from .structure import Signature, Structure, quotient
from .terms import (
    Identity,
    assignment_grid,
    check_term,
    eval_term_vectors,
    format_term,
    identity_counterexample,
    is_var,
    parse_term,
    substitute,
    term_table,
    var_count,
    _eval,
)


@dataclass
class Enforced:
    structure: Structure
    quotient_map: tuple
    steps: int

    def __iter__(self):
        return iter((self.structure, self.quotient_map, self.steps))


def enforce_identities(X, identities):
    """Quotient ``X`` until it satisfies every identity.

    The first violated identity (list order, lexicographic assignment) is
    repaired by collapsing the principal congruence of its two values; the
    scan then restarts.  Returns the final structure, the composed map from
    the original domain, and the number of quotient steps.
    """
    for ident in identities:
        check_term(ident.lhs, X.signature)
        check_term(ident.rhs, X.signature)
    qmap = tuple(range(X.size))
    steps = 0
    current = X
    while True:
        for ident in identities:
            ce = identity_counterexample(current, ident)
            if ce is not None:
                break
        else:
            return Enforced(current, qmap, steps)
        a = _eval(ident.lhs, current, ce)
        b = _eval(ident.rhs, current, ce)
        theta = principal_congruence(current, a, b)
        current = quotient(current, theta)
        idx = theta.index_map()
        qmap = tuple(idx[v] for v in qmap)
        steps += 1


# -- translations -------------------------------------------------------------------------


@dataclass
class TranslationSpec:
    """Term translations between a source signature and a target signature.

    ``to_target[f]`` is a target term for each source function symbol,
    ``to_source[g]`` a source term for each target function symbol, and
    ``relations[R]`` a list of atoms ``(T, (r_1, ..., r_m))`` over target
    terms defining the source relation ``R``.
    """

    source: Signature
    target: Signature
    to_target: dict
    to_source: dict
    relations: dict = field(default_factory=dict)

    def __post_init__(self):
        for f, k in self.source.funcs:
            if f not in self.to_target:
                raise SpecInvalid(f"no translation for source symbol {f}")
            _check_translation(self.to_target[f], self.target, k, f)
        for g, k in self.target.funcs:
            if g not in self.to_source:
                raise SpecInvalid(f"no translation for target symbol {g}")
            _check_translation(self.to_source[g], self.source, k, g)
        for R, k in self.source.rels:
            if R not in self.relations:
                raise SpecInvalid(f"no definition for source relation {R}")
            for T, terms in self.relations[R]:
                if not self.target.has_rel(T):
                    raise SpecInvalid(f"atom uses unknown target relation {T}")
                if len(terms) != self.target.rel_arity(T):
                    raise SpecInvalid(f"atom {T} has {len(terms)} arguments")
                for t in terms:
                    _check_translation(t, self.target, k, R)

    def compatibility_identities(self):
        """``f(x) = t_f[s_1, ..., s_l](x)`` for each source symbol ``f``."""
        out = []
        for f, k in self.source.funcs:
            lhs = (f,) + tuple(range(k))
            rhs = back_translate(self.to_target[f], self.to_source)
            out.append(Identity(lhs, rhs, k))
        return out

    def validate(self, A, B):
        """Check the translations on concrete templates; raise SpecInvalid."""
        if A.signature != self.source or B.signature.funcs != self.target.funcs or B.signature.rels != self.target.rels:
            raise SpecInvalid("templates do not match the specification signatures")
        if A.size != B.size:
            raise SpecInvalid("templates must share their domain")
        for f, k in self.source.funcs:
            if term_table(self.to_target[f], B, k) != A.ops[f]:
                raise SpecInvalid(f"{f} is not induced by {format_term(self.to_target[f])} on the target")
        for g, k in self.target.funcs:
            if term_table(self.to_source[g], A, k) != B.ops[g]:
                raise SpecInvalid(f"{g} is not induced by {format_term(self.to_source[g])} on the source")
        for R, k in self.source.rels:
            defined = define_relation(B, self.relations[R], k)
            if defined != A.rels[R]:
                raise SpecInvalid(f"definition of {R} does not match the source relation")


def _check_translation(t, signature, arity, name):
    try:
        check_term(t, signature)
    except Exception as exc:
        raise SpecInvalid(f"translation of {name}: {exc}") from None
    if var_count(t) > arity:
        raise SpecInvalid(f"translation of {name} uses more than {arity} variables")


def back_translate(t, to_source):
    """Replace every target symbol in ``t`` by its source translation."""
    if is_var(t):
        return t
    children = [back_translate(c, to_source) for c in t[1:]]
    return substitute(to_source[t[0]], children)


def _atom_values(S, terms, k):
    grid = assignment_grid(S.size, k)
    shape = (S.size**k,)
    return [np.broadcast_to(eval_term_vectors(t, S, grid), shape) for t in terms]


def define_relation(B, atoms, k):
    """Tuples of ``B**k`` satisfying every atom."""
    keep = np.ones(B.size**k, dtype=bool)
    for T, terms in atoms:
        cols = _atom_values(B, terms, k)
        rel = B.rels[T]
        mask = np.fromiter(
            (tuple(int(c[i]) for c in cols) in rel for i in range(B.size**k)),
            dtype=bool,
            count=B.size**k,
        )
        keep &= mask
    return frozenset(
        args for i, args in enumerate(itertools.product(range(B.size), repeat=k)) if keep[i]
    )


def qfpp_reduce(X, spec, A, B, validate=True):
    """Translate an instance of ``A`` into an instance of ``B`` on the same domain.

    ``X`` must already satisfy the compatibility identities of ``spec``.
    """
    if validate:
        spec.validate(A, B)
    if X.signature != spec.source:
        raise SpecInvalid("instance signature does not match the specification source")
    for ident in spec.compatibility_identities():
        ce = identity_counterexample(X, ident)
        if ce is not None:
            raise CompatibilityIdentitiesNotEnforced(f"{ident} fails at {ce}")
    ops = {g: term_table(spec.to_source[g], X, k) for g, k in spec.target.funcs}
    Y = Structure(Signature(spec.target.funcs, ()), X.size, ops, {})
    rels = {T: set() for T, _ in spec.target.rels}
    for R, k in spec.source.rels:
        for t in sorted(X.rels[R]):
            for T, terms in spec.relations[R]:
                rels[T].add(tuple(_eval(r, Y, t) for r in terms))
    return Structure(spec.target, X.size, ops, rels)


# -- .tspec files ---------------------------------------------------------------------------


def parse_tspec(text, source, target):
    """Parse ``func <name> = <term>`` and ``rel <name> : <atom> & ...`` lines.

    A ``func`` line belongs to whichever of the two signatures declares the
    name; ``source``/``target`` are the signatures of the two templates.
    """
    to_target, to_source, relations = {}, {}, {}
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head, _, rest = line.partition(" ")
        if head == "func":
            name, eq, body = rest.partition("=")
            name = name.strip()
            if not eq:
                raise ParseError("expected 'func <name> = <term>'", number)
            term = parse_term(body, number)
            if source.has_func(name):
                to_target[name] = term
            elif target.has_func(name):
                to_source[name] = term
            else:
                raise ParseError(f"unknown function symbol {name!r}", number)
        elif head == "rel":
            name, colon, body = rest.partition(":")
            name = name.strip()
            if not colon:
                raise ParseError("expected 'rel <name> : <atom> & ...'", number)
            if not source.has_rel(name):
                raise ParseError(f"unknown source relation {name!r}", number)
            atoms = []
            for chunk in body.split("&"):
                atom = parse_term(chunk, number)
                if is_var(atom):
                    raise ParseError("an atom must apply a relation symbol", number)
                atoms.append((atom[0], tuple(atom[1:])))
            relations[name] = atoms
        else:
            raise ParseError(f"unexpected keyword {head!r}", number)
    try:
        return TranslationSpec(source, target, to_target, to_source, relations)
    except UnknownSymbol as exc:
        raise SpecInvalid(str(exc)) from None


def format_tspec(spec):
    lines = [f"func {f} = {format_term(spec.to_target[f])}" for f, _ in spec.source.funcs]
    lines += [f"func {g} = {format_term(spec.to_source[g])}" for g, _ in spec.target.funcs]
    for R, _ in spec.source.rels:
        atoms = [format_term((T,) + tuple(terms)) for T, terms in spec.relations[R]]
        lines.append(f"rel {R} : " + " & ".join(atoms))
    return "\n".join(lines) + "\n"
