"""Congruence generation, congruence lattices and tame congruence theory data
for covers: minimal sets, traces, types and separating polynomials."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .clones import (
    DEFAULT_BUDGET,
    close,
    constant_generators,
    essential_arity,
    polynomial_closure_on,
    unary_polynomials,
)
from .errors import BudgetExceeded, NotFound, TraceTooLarge
from .structure import Congruence, Signature, Structure, flat_index


def principal_congruence(S, a, b):
    """Least congruence of the algebraic reduct of ``S`` identifying ``a`` and ``b``."""
    return generated_congruence(S, [(a, b)])


def generated_congruence(S, pairs):
    n = S.size
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    ops = [(S.ops[name], k) for name, k in S.signature.funcs if k > 0]
    work = []

    def union(x, y):
        rx, ry = find(x), find(y)
        if rx != ry:
            parent[max(rx, ry)] = min(rx, ry)
            work.append((x, y))

    for x, y in pairs:
        union(x, y)
    # propagating each merged pair through every position of every operation
    # is enough: a congruence is an equivalence closed under unary translations
    while work:
        x, y = work.pop()
        for table, k in ops:
            for i in range(k):
                for rest in itertools.product(range(n), repeat=k - 1):
                    a1 = rest[:i] + (x,) + rest[i:]
                    a2 = rest[:i] + (y,) + rest[i:]
                    union(table[flat_index(a1, n)], table[flat_index(a2, n)])
    return Congruence.from_labels([find(x) for x in range(n)])


@dataclass
class CongruenceLattice:
    congruences: list
    covers: list = field(default_factory=list)

    def __len__(self):
        return len(self.congruences)

    def index(self, theta):
        return self.congruences.index(theta)

    @property
    def bottom(self):
        return self.congruences[0]

    @property
    def top(self):
        return self.congruences[-1]

    def minimal(self):
        """Atoms of the lattice (covers of the bottom)."""
        return [self.congruences[j] for i, j in self.covers if i == 0]

    def upper_covers(self, i):
        return [j for a, j in self.covers if a == i]

    def render(self):
        lines = [f"{i}: {theta.render()}" for i, theta in enumerate(self.congruences)]
        lines += [f"{i} < {j}" for i, j in self.covers]
        return "\n".join(lines)


def _sort_key(theta):
    return (-theta.num_blocks, theta.block_of)


def all_congruences(S, budget=10**5):
    """All congruences, as joins of principal congruences, with the cover relation."""
    n = S.size
    bottom = Congruence.identity(n)
    principals = set()
    for a in range(n):
        for b in range(a + 1, n):
            principals.add(principal_congruence(S, a, b))
    found = {bottom} | principals
    frontier = list(principals)
    principals = sorted(principals, key=_sort_key)
    while frontier:
        nxt = []
        for theta in frontier:
            for p in principals:
                j = theta.join(p)
                if j not in found:
                    found.add(j)
                    nxt.append(j)
                    if len(found) > budget:
                        raise BudgetExceeded(f"more than {budget} congruences")
        frontier = nxt
    cons = sorted(found, key=_sort_key)
    covers = []
    for i, lo in enumerate(cons):
        for j, hi in enumerate(cons):
            if i == j or not lo < hi:
                continue
            if any(lo < mid and mid < hi for mid in cons):
                continue
            covers.append((i, j))
    return CongruenceLattice(cons, sorted(covers))


def is_simple(S):
    return S.size > 1 and len(all_congruences(S)) == 2


def minimal_congruences(S):
    return all_congruences(S).minimal()


# -- minimal sets and traces -------------------------------------------------------


def _separates(table, alpha, beta):
    """Whether the unary map ``table`` sends some beta-pair outside alpha."""
    n = len(table)
    for x in range(n):
        for y in range(x + 1, n):
            if beta.related(x, y) and not alpha.related(table[x], table[y]):
                return True
    return False


def minimal_sets(S, alpha, beta, budget=DEFAULT_BUDGET):
    """Inclusion-minimal images ``p(A)`` of unary polynomials with ``p(beta)`` not inside ``alpha``."""
    if not alpha < beta:
        raise ValueError("need alpha strictly below beta")
    cl = unary_polynomials(S, budget)
    images = {frozenset(row) for row in cl.rows() if _separates(row, alpha, beta)}
    minimal = [U for U in images if not any(V < U for V in images)]
    return sorted(minimal, key=lambda U: (len(U), sorted(U)))


def traces(S, alpha, beta, U):
    """The ``(alpha, beta)``-traces inside the minimal set ``U``."""
    out = []
    for a in sorted(U):
        N = frozenset(x for x in U if beta.related(a, x))
        if any(not alpha.related(a, x) for x in N) and N not in out:
            out.append(N)
    return out


@dataclass
class TraceReport:
    minimal_sets: list
    traces: list  # (N, U) pairs
    type_label: int


# -- types ------------------------------------------------------------------------------


def induced_binary_polynomials(S, N, budget=DEFAULT_BUDGET):
    """Binary polynomials of ``S`` mapping ``N`` into itself, as ``(table on N, term)``.

    Tables are indexed by positions in ``sorted(N)``.
    """
    elems = sorted(N)
    pos = {v: i for i, v in enumerate(elems)}
    points = list(itertools.product(elems, repeat=2))
    cl = polynomial_closure_on(S, points, budget)
    out = []
    seen = set()
    for i, row in enumerate(cl.rows()):
        if all(v in pos for v in row):
            local = tuple(pos[v] for v in row)
            if local not in seen:
                seen.add(local)
                out.append((local, cl.term(i)))
    return out


def _quotient_ops(tables, m, labels):
    """Push binary tables on ``m`` points down to the quotient given by ``labels``."""
    k = max(labels) + 1
    out = set()
    for t in tables:
        q = [None] * (k * k)
        for x in range(m):
            for y in range(m):
                q[labels[x] * k + labels[y]] = labels[t[x * m + y]]
        out.add(tuple(q))
    return sorted(out), k


def _generate_clone(ops, k, arity, budget):
    """Clone on ``0..k-1`` generated by binary tables, at the given arity."""
    funcs = tuple((f"g{i}", 2) for i in range(len(ops)))
    S = Structure(Signature(funcs, ()), k, {f"g{i}": t for i, t in enumerate(ops)}, {})
    from .terms import assignment_grid

    grid = assignment_grid(k, arity)
    gens = [(grid[i], i) for i in range(arity)] + constant_generators(k, k**arity)
    cl = close(S, gens, k**arity, budget)
    return set(cl.rows())


def _bin(fn):
    return tuple(fn(x, y) for x in range(2) for y in range(2))


MEET = _bin(lambda x, y: x & y)
JOIN = _bin(lambda x, y: x | y)
NEG = (1, 0)
MINORITY = tuple(x ^ y ^ z for x in range(2) for y in range(2) for z in range(2))


def classify_two_element(ops, budget=DEFAULT_BUDGET):
    """Type of the two-element algebra on ``{0,1}`` generated (with constants) by binary ``ops``."""
    c2 = _generate_clone(ops, 2, 2, budget)
    if all(essential_arity(t, 2, 2) <= 1 for t in c2):
        return 1
    c1 = _generate_clone(ops, 2, 1, budget)
    has_meet, has_join, has_neg = MEET in c2, JOIN in c2, NEG in c1
    if has_meet and has_join and has_neg:
        return 3
    if has_meet and has_join:
        return 4
    if has_meet or has_join:
        return 5
    c3 = _generate_clone(ops, 2, 3, budget)
    if MINORITY in c3:
        return 2
    raise AssertionError("two-element clone with constants outside the known list")


def _z3_labelings():
    for perm in itertools.permutations(range(3)):
        yield perm


def classify_three_element(ops, budget=DEFAULT_BUDGET):
    """Type (1 or 2) of the three-element minimal algebra generated by binary ``ops``."""
    c3 = _generate_clone(ops, 3, 3, budget)
    for perm in _z3_labelings():
        inv = [0] * 3
        for v, lab in enumerate(perm):
            inv[lab] = v
        maltsev = tuple(
            inv[(perm[x] - perm[y] + perm[z]) % 3]
            for x in range(3)
            for y in range(3)
            for z in range(3)
        )
        if maltsev in c3:
            return 2
    return 1


def trace_type(S, alpha, N, budget=DEFAULT_BUDGET):
    """Type of the induced algebra on the trace ``N`` modulo ``alpha``."""
    elems = sorted(N)
    m = len(elems)
    labels_raw = [alpha.block_of[v] for v in elems]
    reps = sorted(set(labels_raw))
    labels = [reps.index(r) for r in labels_raw]
    k = len(reps)
    if k > 3:
        raise TraceTooLarge(f"trace has {k} classes modulo alpha; only 2 or 3 are supported")
    polys = induced_binary_polynomials(S, N, budget)
    ops, k = _quotient_ops([t for t, _ in polys], m, labels)
    if k == 2:
        return classify_two_element(ops, budget)
    return classify_three_element(ops, budget)


def trace_report(S, alpha, beta, budget=DEFAULT_BUDGET):
    Us = minimal_sets(S, alpha, beta, budget)
    pairs = []
    types = set()
    for U in Us:
        for N in traces(S, alpha, beta, U):
            pairs.append((N, U))
            types.add(trace_type(S, alpha, N, budget))
    if len(types) != 1:
        raise AssertionError(f"traces of one cover received different types {sorted(types)}")
    return TraceReport(Us, pairs, types.pop())


def type_of_cover(S, alpha, beta, budget=DEFAULT_BUDGET):
    """Type label (1..5) of the cover ``(alpha, beta)``, from one trace."""
    Us = minimal_sets(S, alpha, beta, budget)
    N = traces(S, alpha, beta, Us[0])[0]
    return trace_type(S, alpha, N, budget)


def simple_type(S, budget=DEFAULT_BUDGET):
    n = S.size
    return type_of_cover(S, Congruence.identity(n), Congruence.full(n), budget)


# -- separation and chains -----------------------------------------------------------------


@dataclass
class Separation:
    table: tuple
    term: object
    trace: frozenset
    image: frozenset


def separating_polynomial(S, alpha, a, b, budget=DEFAULT_BUDGET):
    """A unary polynomial ``f`` with ``f(a) != f(b)`` whose image is a
    ``(0, alpha)``-minimal set; also returns the trace ``f(a/alpha)``."""
    n = S.size
    if a == b or not alpha.related(a, b):
        raise NotFound(f"({a},{b}) is not a pair of distinct alpha-related elements")
    zero = Congruence.identity(n)
    cl = unary_polynomials(S, budget)
    rows = cl.rows()
    images = {frozenset(r) for r in rows if _separates(r, zero, alpha)}
    minimal = {U for U in images if not any(V < U for V in images)}
    for i, row in enumerate(rows):
        if row[a] != row[b] and frozenset(row) in minimal:
            N = frozenset(row[x] for x in alpha.block(a))
            return Separation(row, cl.term(i), N, frozenset(row))
    raise NotFound(f"no polynomial onto a minimal set separates {a} and {b}")


@dataclass
class ChainFailure:
    """No type-1-free maximal chain; ``cover`` is a type-1 cover met on the search."""

    cover: tuple

    def __bool__(self):
        return False


def find_type1free_chain(S, budget=DEFAULT_BUDGET, lattice=None):
    """Depth-first search for a maximal chain from 0 to 1 with no cover of type 1."""
    L = lattice or all_congruences(S)
    memo = {}
    witness = []

    def typ(i, j):
        if (i, j) not in memo:
            memo[(i, j)] = type_of_cover(S, L.congruences[i], L.congruences[j], budget)
        return memo[(i, j)]

    top = len(L) - 1
    dead = set()

    def dfs(i):
        if i == top:
            return [i]
        if i in dead:
            return None
        for j in L.upper_covers(i):
            if typ(i, j) == 1:
                witness.append((L.congruences[i], L.congruences[j]))
                continue
            rest = dfs(j)
            if rest is not None:
                return [i] + rest
        dead.add(i)
        return None

    path = dfs(0)
    if path is None:
        return ChainFailure(witness[0] if witness else None)
    return [L.congruences[i] for i in path]


def chain_types(S, chain, budget=DEFAULT_BUDGET):
    return [type_of_cover(S, lo, hi, budget) for lo, hi in zip(chain, chain[1:])]
