"""Finite structures with operations and relations, and their constructions.

Domains are always ``0..n-1``.  An operation of arity ``k`` is stored as a
flat tuple of ``n**k`` values in lexicographic argument order, so that
``f(a_1, ..., a_k)`` lives at index ``sum(a_i * n**(k-i))``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property
from typing import Mapping

import numpy as np

from .errors import (
    BadTable,
    DuplicateSymbol,
    NotACongruence,
    NotClosed,
    SignatureMismatch,
)


def _check_token(name):
    if not isinstance(name, str) or not name or any(ch.isspace() for ch in name):
        raise BadTable(f"invalid symbol name {name!r}")


def flat_index(args, n):
    idx = 0
    for a in args:
        idx = idx * n + a
    return idx


@dataclass(frozen=True)
class Signature:
    """Ordered function symbols and relation symbols with arities."""

    funcs: tuple = ()
    rels: tuple = ()

    def __post_init__(self):
        funcs = tuple((str(name), int(k)) for name, k in self.funcs)
        rels = tuple((str(name), int(k)) for name, k in self.rels)
        object.__setattr__(self, "funcs", funcs)
        object.__setattr__(self, "rels", rels)
        seen = set()
        for name, k in funcs + rels:
            _check_token(name)
            if name in seen:
                raise DuplicateSymbol(f"symbol {name!r} declared twice")
            seen.add(name)
        for name, k in funcs:
            if k < 0:
                raise BadTable(f"negative arity for {name}")
        for name, k in rels:
            if k < 1:
                raise BadTable(f"relation {name} needs positive arity")

    @property
    def func_names(self):
        return tuple(name for name, _ in self.funcs)

    @property
    def rel_names(self):
        return tuple(name for name, _ in self.rels)

    def func_arity(self, name):
        for f, k in self.funcs:
            if f == name:
                return k
        raise KeyError(name)

    def rel_arity(self, name):
        for r, k in self.rels:
            if r == name:
                return k
        raise KeyError(name)

    def has_func(self, name):
        return any(f == name for f, _ in self.funcs)

    def has_rel(self, name):
        return any(r == name for r, _ in self.rels)

    def symbols(self):
        return set(self.func_names) | set(self.rel_names)

    def algebraic(self):
        return Signature(self.funcs, ())

    def relational(self):
        return Signature((), self.rels)


@dataclass(frozen=True)
class Structure:
    """A finite structure over a :class:`Signature`.

    ``ops`` maps each function symbol to its flat table and ``rels`` maps each
    relation symbol to a frozenset of tuples.  Instances are treated as
    immutable; every construction returns a new structure.
    """

    signature: Signature
    size: int
    ops: Mapping[str, tuple] = field(default_factory=dict)
    rels: Mapping[str, frozenset] = field(default_factory=dict)

    def __post_init__(self):
        n = int(self.size)
        if n < 1:
            raise BadTable("domain must be nonempty")
        object.__setattr__(self, "size", n)
        ops = {}
        for name, k in self.signature.funcs:
            if name not in self.ops:
                raise BadTable(f"missing table for {name}")
            table = tuple(int(v) for v in self.ops[name])
            if len(table) != n**k:
                raise BadTable(f"table of {name} has length {len(table)}, expected {n**k}")
            if any(v < 0 or v >= n for v in table):
                raise BadTable(f"table of {name} has an out-of-range entry")
            ops[name] = table
        rels = {}
        for name, k in self.signature.rels:
            tuples = frozenset(tuple(int(v) for v in t) for t in self.rels.get(name, ()))
            for t in tuples:
                if len(t) != k:
                    raise BadTable(f"tuple {t} of {name} does not have arity {k}")
                if any(v < 0 or v >= n for v in t):
                    raise BadTable(f"tuple {t} of {name} has an out-of-range entry")
            rels[name] = tuples
        extra = (set(self.ops) - set(ops)) | (set(self.rels) - set(rels))
        if extra:
            raise BadTable(f"symbols not in signature: {sorted(extra)}")
        object.__setattr__(self, "ops", ops)
        object.__setattr__(self, "rels", rels)

    @classmethod
    def build(cls, size, ops=None, rels=None):
        """Build a structure, inferring arities where possible.

        ``ops`` values are either a flat table or an ``(arity, table)`` pair;
        ``rels`` values are either a collection of tuples or an
        ``(arity, tuples)`` pair (needed for empty relations).
        """
        funcs, tables = [], {}
        for name, value in (ops or {}).items():
            if _is_pair(value):
                k, table = int(value[0]), list(value[1])
            else:
                table = list(value)
                k = _infer_arity(len(table), size, name)
            funcs.append((name, k))
            tables[name] = table
        relsig, tuples = [], {}
        for name, value in (rels or {}).items():
            if _is_pair(value):
                k, ts = int(value[0]), [tuple(t) for t in value[1]]
            else:
                ts = [tuple(t) for t in value]
                if not ts:
                    raise BadTable(f"cannot infer arity of empty relation {name}")
                k = len(ts[0])
            relsig.append((name, k))
            tuples[name] = ts
        return cls(Signature(tuple(funcs), tuple(relsig)), size, tables, tuples)

    # -- access ---------------------------------------------------------------

    @property
    def domain(self):
        return range(self.size)

    def arity(self, name):
        return self.signature.func_arity(name)

    def apply(self, name, args):
        return self.ops[name][flat_index(args, self.size)]

    def relation(self, name):
        return self.rels[name]

    @cached_property
    def arrays(self):
        """Operation tables as numpy arrays of shape ``(n,)*k``."""
        n = self.size
        return {
            name: np.asarray(self.ops[name], dtype=np.int64).reshape((n,) * k)
            for name, k in self.signature.funcs
        }

    @cached_property
    def flat_arrays(self):
        return {name: np.asarray(t, dtype=np.int64) for name, t in self.ops.items()}

    def is_algebra(self):
        return not self.signature.rels

    def is_relational(self):
        return not self.signature.funcs

    def algebraic_reduct(self):
        return Structure(self.signature.algebraic(), self.size, self.ops, {})

    def relational_reduct(self):
        return Structure(self.signature.relational(), self.size, {}, self.rels)

    def __repr__(self):
        parts = [f"{name}/{k}" for name, k in self.signature.funcs]
        parts += [f"{name}:{k}[{len(self.rels[name])}]" for name, k in self.signature.rels]
        return f"Structure(n={self.size}; {', '.join(parts)})"


def _is_pair(value):
    return (
        isinstance(value, tuple)
        and len(value) == 2
        and isinstance(value[0], int)
        and isinstance(value[1], (list, tuple, set, frozenset))
    )


def _infer_arity(length, n, name):
    if n == 1:
        if length != 1:
            raise BadTable(f"table of {name} has length {length} on a 1-element domain")
        raise BadTable(f"arity of {name} is ambiguous on a 1-element domain; pass (arity, table)")
    k, p = 0, 1
    while p < length:
        p *= n
        k += 1
    if p != length:
        raise BadTable(f"table of {name} has length {length}, not a power of {n}")
    return k


# -- congruences ---------------------------------------------------------------


@dataclass(frozen=True)
class Congruence:
    """An equivalence on ``0..n-1`` given by canonical block representatives.

    ``block_of[x]`` is the smallest element of the block of ``x``.
    """

    block_of: tuple

    def __post_init__(self):
        bo = tuple(int(v) for v in self.block_of)
        for x, r in enumerate(bo):
            if r > x or bo[r] != r:
                raise ValueError(f"non-canonical block representative at {x}")
        object.__setattr__(self, "block_of", bo)

    @classmethod
    def from_labels(cls, labels):
        first = {}
        return cls(tuple(first.setdefault(lab, x) for x, lab in enumerate(labels)))

    @classmethod
    def from_blocks(cls, size, blocks):
        labels = list(range(size))
        for block in blocks:
            block = sorted(block)
            for x in block:
                labels[x] = block[0]
        return cls.from_labels(labels)

    @classmethod
    def identity(cls, size):
        return cls(tuple(range(size)))

    @classmethod
    def full(cls, size):
        return cls((0,) * size)

    @property
    def size(self):
        return len(self.block_of)

    def related(self, a, b):
        return self.block_of[a] == self.block_of[b]

    def blocks(self):
        out = {}
        for x, r in enumerate(self.block_of):
            out.setdefault(r, []).append(x)
        return tuple(tuple(out[r]) for r in sorted(out))

    def block(self, a):
        r = self.block_of[a]
        return tuple(x for x in range(self.size) if self.block_of[x] == r)

    @property
    def num_blocks(self):
        return len(set(self.block_of))

    def representatives(self):
        return tuple(sorted(set(self.block_of)))

    def index_map(self):
        """Map each element to the index of its block among sorted representatives."""
        pos = {r: i for i, r in enumerate(self.representatives())}
        return tuple(pos[r] for r in self.block_of)

    def is_identity(self):
        return self.block_of == tuple(range(self.size))

    def is_full(self):
        return all(r == 0 for r in self.block_of)

    def pairs(self):
        return {(a, b) for a in range(self.size) for b in range(self.size) if self.related(a, b)}

    def __le__(self, other):
        return all(other.related(x, r) for x, r in enumerate(self.block_of))

    def __lt__(self, other):
        return self <= other and self != other

    def join(self, other):
        parent = list(range(self.size))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for rel in (self, other):
            for x, r in enumerate(rel.block_of):
                a, b = find(x), find(r)
                if a != b:
                    parent[max(a, b)] = min(a, b)
        return Congruence.from_labels([find(x) for x in range(self.size)])

    def meet(self, other):
        return Congruence.from_labels(list(zip(self.block_of, other.block_of)))

    def render(self):
        return "".join("{" + ",".join(map(str, b)) + "}" for b in self.blocks())

    def __repr__(self):
        return f"Congruence({self.render()})"


def find_congruence_violation(S, theta):
    """Return ``(symbol, args1, args2)`` witnessing that ``theta`` is not
    preserved by some operation of ``S``, or ``None``."""
    n = S.size
    if theta.size != n:
        raise ValueError("congruence size does not match structure")
    moved = [x for x in range(n) if theta.block_of[x] != x]
    for name, k in S.signature.funcs:
        table = S.ops[name]
        for i in range(k):
            for rest in itertools.product(range(n), repeat=k - 1):
                for x in moved:
                    r = theta.block_of[x]
                    a1 = rest[:i] + (x,) + rest[i:]
                    a2 = rest[:i] + (r,) + rest[i:]
                    if not theta.related(table[flat_index(a1, n)], table[flat_index(a2, n)]):
                        return name, a1, a2
    return None


def is_congruence(S, theta):
    return find_congruence_violation(S, theta) is None


# -- constructions -----------------------------------------------------------------


def graph_of(S):
    """Replace every k-ary operation by its (k+1)-ary graph relation ``G_f``."""
    if not S.signature.funcs:
        return S
    rels = dict(S.rels)
    relsig = list(S.signature.rels)
    n = S.size
    for name, k in S.signature.funcs:
        gname = f"G_{name}"
        if S.signature.has_rel(gname) or gname in rels:
            raise DuplicateSymbol(f"graph relation {gname} clashes with an existing symbol")
        table = S.ops[name]
        rels[gname] = frozenset(
            args + (table[i],) for i, args in enumerate(itertools.product(range(n), repeat=k))
        )
        relsig.append((gname, k + 1))
    return Structure(Signature((), tuple(relsig)), n, {}, rels)


def product(S1, S2):
    """Direct product; the pair ``(i1, i2)`` is encoded as ``i1 * n2 + i2``."""
    if S1.signature != S2.signature:
        raise SignatureMismatch("product needs identical signatures")
    n1, n2 = S1.size, S2.size
    n = n1 * n2
    ops = {}
    for name, k in S1.signature.funcs:
        t1, t2 = S1.ops[name], S2.ops[name]
        table = []
        for args in itertools.product(range(n), repeat=k):
            a1 = [a // n2 for a in args]
            a2 = [a % n2 for a in args]
            table.append(t1[flat_index(a1, n1)] * n2 + t2[flat_index(a2, n2)])
        ops[name] = table
    rels = {}
    for name, k in S1.signature.rels:
        rels[name] = [
            tuple(u * n2 + v for u, v in zip(t1, t2))
            for t1 in S1.rels[name]
            for t2 in S2.rels[name]
        ]
    return Structure(S1.signature, n, ops, rels)


def power(S, k):
    out = S
    for _ in range(k - 1):
        out = product(out, S)
    return out


def induced_substructure(S, subset):
    """Restrict ``S`` to ``subset``; returns ``(substructure, elements)`` where
    ``elements[i]`` is the original element re-indexed as ``i``."""
    elems = tuple(sorted(set(subset)))
    if not elems:
        raise ValueError("subset must be nonempty")
    pos = {x: i for i, x in enumerate(elems)}
    m = len(elems)
    ops = {}
    for name, k in S.signature.funcs:
        table = []
        for args in itertools.product(elems, repeat=k):
            v = S.apply(name, args)
            if v not in pos:
                raise NotClosed(name, args)
            table.append(pos[v])
        ops[name] = table
    rels = {
        name: [tuple(pos[v] for v in t) for t in S.rels[name] if all(v in pos for v in t)]
        for name, _ in S.signature.rels
    }
    return Structure(S.signature, m, ops, rels), elems


def quotient(S, theta):
    """Quotient by a congruence; relations are lifted existentially."""
    bad = find_congruence_violation(S, theta)
    if bad is not None:
        raise NotACongruence(*bad)
    reps = theta.representatives()
    idx = theta.index_map()
    m = len(reps)
    ops = {}
    for name, k in S.signature.funcs:
        ops[name] = [idx[S.apply(name, args)] for args in itertools.product(reps, repeat=k)]
    rels = {name: {tuple(idx[v] for v in t) for t in S.rels[name]} for name, _ in S.signature.rels}
    return Structure(S.signature, m, ops, rels)


def generated_subuniverse(S, seed):
    """Least subset containing ``seed`` and closed under the operations of ``S``.

    An empty seed yields the subuniverse generated by the nullary operations.
    """
    current = set(seed)
    order = sorted(current)
    frontier = list(order)
    ops = [(S.ops[name], k) for name, k in S.signature.funcs]
    n = S.size
    for table, k in ops:
        if k == 0 and table[0] not in current:
            current.add(table[0])
            frontier.append(table[0])
    while frontier:
        fresh = set(frontier)
        old = [x for x in current if x not in fresh]
        new = list(frontier)
        frontier = []
        everything = old + new
        for table, k in ops:
            if k == 0:
                continue
            # tuples using at least one new element: first new coordinate at position p
            for p in range(k):
                for args in itertools.product(
                    *([old] * p + [new] + [everything] * (k - p - 1))
                ):
                    v = table[flat_index(args, n)]
                    if v not in current:
                        current.add(v)
                        frontier.append(v)
    return frozenset(current)


def expand(S, ops=None, rels=None):
    """Add fresh operations and relations to ``S``."""
    ops = dict(ops or {})
    rels = dict(rels or {})
    extra = Structure.build(S.size, ops, rels)
    clash = S.signature.symbols() & extra.signature.symbols()
    if clash:
        raise DuplicateSymbol(f"symbols already present: {sorted(clash)}")
    sig = Signature(
        S.signature.funcs + extra.signature.funcs, S.signature.rels + extra.signature.rels
    )
    return Structure(sig, S.size, {**S.ops, **extra.ops}, {**S.rels, **extra.rels})


def constant_name(a):
    return f"const_{a}"


def with_constants(S):
    """The expansion of ``S`` by one nullary symbol ``const_a`` per element."""
    return expand(S, {constant_name(a): (0, [a]) for a in range(S.size)})


def subuniverses(S):
    """All nonempty subuniverses of ``S`` (exhaustive over subsets)."""
    n = S.size
    found = set()
    for mask in range(1, 1 << n):
        subset = [x for x in range(n) if mask >> x & 1]
        if generated_subuniverse(S, subset) == frozenset(subset):
            found.add(frozenset(subset))
    return sorted(found, key=lambda s: (len(s), sorted(s)))


def is_isomorphism(h, S1, S2):
    from .homs import is_homomorphism

    if S1.size != S2.size or len(set(h)) != S1.size:
        return False
    inverse = [0] * S1.size
    for x, y in enumerate(h):
        inverse[y] = x
    return is_homomorphism(h, S1, S2) and is_homomorphism(tuple(inverse), S2, S1)
