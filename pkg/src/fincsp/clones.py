"""Term and polynomial clones at bounded arity, free algebras, star extensions.

All clone computations go through :func:`close`, which closes a list of
generator vectors under the basic operations of a structure acting
pointwise.  A vector is the list of values of an operation on a fixed list
of argument points; taking all points of ``A**m`` yields the ``m``-ary
clone, taking fewer points yields restrictions (used for traces).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .errors import BudgetExceeded, PreconditionViolated
from .structure import Congruence, Structure, constant_name, flat_index
from .terms import assignment_grid

DEFAULT_BUDGET = 10**6
DEFAULT_MAX_ARITY = 3


@dataclass(frozen=True)
class OperationTable:
    arity: int
    size: int
    values: tuple

    def __post_init__(self):
        values = tuple(int(v) for v in self.values)
        object.__setattr__(self, "values", values)
        if len(values) != self.size**self.arity:
            raise ValueError("table length does not match arity and size")

    def __call__(self, *args):
        return self.values[flat_index(args, self.size)]

    def array(self):
        return np.asarray(self.values, dtype=np.int64).reshape((self.size,) * self.arity)

    def essential_coordinates(self):
        return essential_coordinates(self.values, self.size, self.arity)

    def essential_arity(self):
        return len(self.essential_coordinates())

    def is_essentially_unary(self):
        return self.essential_arity() <= 1

    def image(self):
        return frozenset(self.values)


def essential_coordinates(values, size, arity):
    if arity == 0:
        return ()
    arr = np.asarray(values, dtype=np.int64).reshape((size,) * arity)
    out = []
    for i in range(arity):
        first = np.take(arr, [0], axis=i)
        if np.any(arr != first):
            out.append(i)
    return tuple(out)


def essential_arity(table, size=None, arity=None):
    if isinstance(table, OperationTable):
        return table.essential_arity()
    return len(essential_coordinates(table, size, arity))


def essentially_unary(table, size=None, arity=None):
    return essential_arity(table, size, arity) <= 1


# -- closure engine ------------------------------------------------------------------


class Closure:
    """Vectors reachable from generators, with a witness term for each.

    ``vectors`` is an ``(M, P)`` integer array; ``parents[i]`` is either
    ``("gen", term)`` or ``(symbol, child_indices)``.
    """

    def __init__(self, size, vectors, parents):
        self.size = size
        self.vectors = vectors
        self.parents = parents
        self._terms = {}

    def __len__(self):
        return len(self.vectors)

    def term(self, i):
        if i in self._terms:
            return self._terms[i]
        kind, data = self.parents[i]
        if kind == "gen":
            t = data
        else:
            t = (kind,) + tuple(self.term(j) for j in data)
        self._terms[i] = t
        return t

    def rows(self):
        return [tuple(int(v) for v in row) for row in self.vectors]


class _KeyIndex:
    """Maps vectors to closure indices, using packed integer keys when they fit."""

    def __init__(self, size, width):
        self.packed = width == 0 or width * np.log2(max(size, 2)) < 62
        if self.packed:
            self.weights = np.asarray([size ** (width - 1 - i) for i in range(width)], dtype=np.int64)
        self.index = {}

    def keys(self, rows):
        if self.packed:
            return (rows @ self.weights).tolist() if rows.shape[1] else [0] * len(rows)
        return [row.tobytes() for row in rows]


def close(S, generators, width, budget=DEFAULT_BUDGET, symbols=None):
    """Close ``generators`` (a list of ``(vector, term)``) under the operations of ``S``.

    Work proceeds in rounds; each round applies every operation to the
    argument tuples that use at least one vector found in the previous
    round.  Raises BudgetExceeded once more than ``budget`` vectors exist.
    """
    n = S.size
    ops = [(name, k) for name, k in S.signature.funcs if symbols is None or name in symbols]
    keyer = _KeyIndex(n, width)
    store = []
    parents = []

    def add_batch(rows, make_parent):
        rows = np.ascontiguousarray(rows, dtype=np.int64)
        if len(rows) == 0:
            return []
        keys = keyer.keys(rows)
        added = []
        for r, key in enumerate(keys):
            if key in keyer.index:
                continue
            keyer.index[key] = len(store)
            store.append(rows[r])
            parents.append(make_parent(r))
            added.append(len(store) - 1)
            if len(store) > budget:
                raise BudgetExceeded(f"closure exceeded budget of {budget} operations")
        return added

    for vec, term in generators:
        vec = np.asarray(vec, dtype=np.int64).reshape(1, width)
        add_batch(vec, lambda r, term=term: ("gen", term))
    for name, k in ops:
        if k == 0:
            vec = np.full((1, width), S.ops[name][0], dtype=np.int64)
            add_batch(vec, lambda r, name=name: (name, ()))

    frontier = list(range(len(store)))
    while frontier:
        # indices are appended in order, so everything before the frontier is old
        arr = np.stack(store)
        old = list(range(frontier[0]))
        new = list(frontier)
        everything = old + new
        next_frontier = []
        for name, k in ops:
            if k == 0:
                continue
            table = S.flat_arrays[name]
            for p in range(k):
                heads = [old] * p + [new] + [everything] * (k - p - 1)
                last = heads[-1]
                if not last:
                    continue
                mat = arr[last]
                # enumerate all but the last argument in Python, vectorize the last
                for prefix in itertools.product(*heads[:-1]):
                    acc = np.zeros(width, dtype=np.int64)
                    for i in prefix:
                        acc = acc * n + arr[i]
                    rows = table[acc * n + mat]
                    added = add_batch(
                        rows,
                        lambda r, prefix=prefix, name=name, last=last: (
                            name,
                            tuple(prefix) + (last[r],),
                        ),
                    )
                    next_frontier.extend(added)
        frontier = next_frontier
    vectors = np.stack(store) if store else np.empty((0, width), np.int64)
    return Closure(n, vectors, parents)


def projection_generators(n, points):
    """Projection vectors on a list of points (tuples of equal length)."""
    if not points:
        return []
    m = len(points[0])
    pts = np.asarray(points, dtype=np.int64).reshape(len(points), m)
    return [(pts[:, i], i) for i in range(m)]


def constant_generators(n, width):
    return [(np.full(width, a, dtype=np.int64), (constant_name(a),)) for a in range(n)]


def term_closure(S, arity, budget=DEFAULT_BUDGET, constants=False):
    """Closure of the ``arity``-ary projections on all of ``A**arity``.

    With ``constants`` the constant operations are added as generators, giving
    polynomial operations whose witness terms use ``const_a`` symbols.
    """
    n = S.size
    width = n**arity
    grid = assignment_grid(n, arity)
    gens = [(grid[i], i) for i in range(arity)]
    if constants:
        gens += constant_generators(n, width)
    return close(S, gens, width, budget)


def polynomial_closure_on(S, points, budget=DEFAULT_BUDGET):
    """Restrictions to ``points`` of all polynomials of ``S`` of arity ``len(points[0])``."""
    width = len(points)
    gens = projection_generators(S.size, points) + constant_generators(S.size, width)
    return close(S, gens, width, budget)


def _tables(closure, n, arity):
    return {OperationTable(arity, n, row) for row in closure.rows()}


def clone_upto(S, max_arity=DEFAULT_MAX_ARITY, budget=DEFAULT_BUDGET):
    """Term operations of ``S`` of each arity ``0..max_arity`` as sets of tables."""
    if max_arity < 1:
        raise ValueError("max_arity must be at least 1")
    out = {}
    total = 0
    for m in range(0, max_arity + 1):
        cl = term_closure(S, m, budget - total)
        total += len(cl)
        out[m] = _tables(cl, S.size, m)
    return out


def polynomial_clone_upto(S, max_arity=DEFAULT_MAX_ARITY, budget=DEFAULT_BUDGET):
    """Polynomial operations (term operations of the constant expansion)."""
    if max_arity < 0:
        raise ValueError("max_arity must be nonnegative")
    out = {}
    total = 0
    for m in range(0, max_arity + 1):
        cl = term_closure(S, m, budget - total, constants=True)
        total += len(cl)
        out[m] = _tables(cl, S.size, m)
    return out


def unary_polynomials(S, budget=DEFAULT_BUDGET):
    """Closure of the unary polynomials; rows are tables, terms use ``const_a``."""
    return term_closure(S, 1, budget, constants=True)


# -- free algebras ---------------------------------------------------------------------


def free_algebra(A, n, budget=DEFAULT_BUDGET):
    """Free algebra on ``n`` generators in the variety of ``A``.

    Returns ``(F, generators, tables)``: ``F`` is a Structure whose element
    ``i`` is the ``n``-ary term operation ``tables[i]``; ``generators[j]`` is
    the element for the projection onto coordinate ``j``.
    """
    if n < 1:
        raise ValueError("need at least one generator")
    cl = term_closure(A, n, budget)
    work = sum(len(cl) ** k for _, k in A.signature.funcs)
    if work > budget:
        raise BudgetExceeded(f"operation tables of the free algebra need {work} entries")
    F = _closure_algebra(A, cl)
    tables = cl.rows()
    index = {row: i for i, row in enumerate(tables)}
    grid = assignment_grid(A.size, n)
    generators = tuple(index[tuple(int(v) for v in grid[j])] for j in range(n))
    return F, generators, tables


def _closure_algebra(A, cl):
    """The subalgebra of a power of ``A`` formed by the closure vectors."""
    n = A.size
    M = len(cl)
    vecs = cl.vectors
    keyer = _KeyIndex(n, vecs.shape[1])
    for i, key in enumerate(keyer.keys(vecs)):
        keyer.index[key] = i
    ops = {}
    for name, k in A.signature.funcs:
        table = A.flat_arrays[name]
        values = []
        for args in itertools.product(range(M), repeat=k):
            acc = np.zeros(vecs.shape[1], dtype=np.int64)
            for i in args:
                acc = acc * n + vecs[i]
            row = table[acc].reshape(1, -1)
            values.append(keyer.index[keyer.keys(row)[0]])
        ops[name] = values
    return Structure(A.signature, M, ops, {})


# -- star extension ---------------------------------------------------------------------


def _induced_unary_on(A, block, budget):
    """Unary polynomials of ``A`` mapping ``block`` into itself, restricted to it."""
    cl = polynomial_closure_on(A, [(b,) for b in block], budget)
    inside = set(block)
    out = set()
    for row in cl.rows():
        if all(v in inside for v in row):
            out.add(row)
    return sorted(out)


def check_unary_on_block(A, block, budget=DEFAULT_BUDGET):
    """Return a binary polynomial preserving ``block`` that is not essentially
    unary on it (as ``(restricted table, term)``), or None."""
    points = list(itertools.product(block, repeat=2))
    cl = polynomial_closure_on(A, points, budget)
    inside = set(block)
    pos = {b: i for i, b in enumerate(block)}
    for i, row in enumerate(cl.rows()):
        if not all(v in inside for v in row):
            continue
        local = [pos[v] for v in row]
        if essential_arity(local, len(block), 2) > 1:
            return row, cl.term(i)
    return None


@dataclass
class StarExtension:
    algebra: Structure
    star: int
    elements: list  # tables over B**n for the non-star elements
    block: tuple
    outside: int
    generators: tuple

    def extension(self, phi):
        """The homomorphism determined by a map from generators into the block."""
        m = len(phi)
        values = []
        for t in self.elements:
            values.append(t[flat_index([self.block.index(v) for v in phi], len(self.block))] if m else t[0])
        values.append(self.outside)
        return tuple(values)


def star_extension(A, alpha, n, budget=DEFAULT_BUDGET):
    """Build the algebra ``X`` on ``F(n) + {star}`` whose surjective homomorphisms
    into ``A`` include one for every surjective map of the generators onto the
    two-element block of ``alpha``.

    ``F(n)`` is the free algebra of the induced algebra on the block; it is
    computed directly as the set of tables ``u(x_i)`` over ``block**n``.
    """
    if A.size != 3:
        raise PreconditionViolated("star extension needs a 3-element algebra")
    if not isinstance(alpha, Congruence):
        alpha = Congruence(tuple(alpha))
    blocks = alpha.blocks()
    big = [b for b in blocks if len(b) == 2]
    if len(blocks) != 2 or not big:
        raise PreconditionViolated("congruence must have one 2-element block and one singleton")
    from .structure import find_congruence_violation

    bad = find_congruence_violation(A, alpha)
    if bad is not None:
        raise PreconditionViolated("alpha is not a congruence", bad)
    block = tuple(big[0])
    outside = next(b[0] for b in blocks if len(b) == 1)
    witness = check_unary_on_block(A, block, budget)
    if witness is not None:
        raise PreconditionViolated(
            "a polynomial preserving the block is not essentially unary on it", witness
        )
    if n < 1:
        raise ValueError("need at least one generator")

    unary = _induced_unary_on(A, block, budget)  # maps on block, as tuples indexed by block position
    pos = {b: i for i, b in enumerate(block)}
    grid = assignment_grid(2, n)
    elements = set()
    for u in unary:
        if u[0] == u[1]:
            elements.add(tuple([u[0]] * (2**n)))
        else:
            for i in range(n):
                elements.add(tuple(u[int(g)] for g in grid[i]))
    elements = sorted(elements)
    index = {t: i for i, t in enumerate(elements)}
    star = len(elements)
    size = star + 1
    generators = tuple(index[tuple(block[int(g)] for g in grid[i])] for i in range(n))

    def compose(q, t):
        return index[tuple(q[pos[v]] for v in t)]

    def const_elem(v):
        return index[tuple([v] * (2**n))]

    ops = {}
    for name, k in A.signature.funcs:
        rules = {}
        for I in itertools.product((False, True), repeat=k):
            rules[I] = _star_rule(A, name, k, I, block, outside)
        values = []
        for args in itertools.product(range(size), repeat=k):
            I = tuple(a == star for a in args)
            rule = rules[I]
            if rule[0] == "star":
                values.append(star)
            elif rule[0] == "const":
                values.append(const_elem(rule[1]))
            else:
                _, q, i = rule
                values.append(compose(q, elements[args[i]]))
        ops[name] = values
    X = Structure(A.signature, size, ops, {})
    return StarExtension(X, star, elements, block, outside, generators)


def _star_rule(A, name, k, I, block, outside):
    free = [j for j in range(k) if not I[j]]
    vals = {}
    for bs in itertools.product(block, repeat=len(free)):
        args = [outside] * k
        for j, b in zip(free, bs):
            args[j] = b
        vals[bs] = A.apply(name, args)
    image = set(vals.values())
    if outside in image:
        if image != {outside}:
            raise PreconditionViolated(
                f"{name} with star positions {I} maps block tuples both into and out of the block"
            )
        return ("star",)
    if len(image) == 1:
        return ("const", next(iter(image)))
    pos = {b: i for i, b in enumerate(block)}
    local = [pos[vals[bs]] for bs in itertools.product(block, repeat=len(free))]
    coords = essential_coordinates(local, 2, len(free))
    if len(coords) > 1:
        raise PreconditionViolated(
            f"{name} with star positions {I} is not essentially unary on the block",
            (name, I),
        )
    c = coords[0]
    q = []
    for b in block:
        bs = [block[0]] * len(free)
        bs[c] = b
        q.append(vals[tuple(bs)])
    return ("unary", tuple(q), free[c])
