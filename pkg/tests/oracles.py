"""Independent brute-force oracles used by the tests.

Nothing here calls into the search or closure code of the package; only the
plain data structures are shared.
"""

import itertools


def apply(S, name, args):
    n = S.size
    idx = 0
    for a in args:
        idx = idx * n + a
    return S.ops[name][idx]


def is_hom(h, X, A):
    for name, k in X.signature.funcs:
        for args in itertools.product(range(X.size), repeat=k):
            if h[apply(X, name, args)] != apply(A, name, [h[a] for a in args]):
                return False
    for name, _ in X.signature.rels:
        for t in X.rels[name]:
            if tuple(h[a] for a in t) not in A.rels[name]:
                return False
    return True


def homs(X, A, surjective=False):
    out = []
    for h in itertools.product(range(A.size), repeat=X.size):
        if surjective and len(set(h)) != A.size:
            continue
        if is_hom(h, X, A):
            out.append(h)
    return out


def set_partitions(n):
    """All partitions of ``range(n)`` as label lists (restricted growth strings)."""
    def grow(prefix, top):
        if len(prefix) == n:
            yield list(prefix)
            return
        for label in range(top + 2):
            yield from grow(prefix + [label], max(top, label))

    if n == 0:
        yield []
        return
    yield from grow([0], 0)


def is_congruence(S, labels):
    n = S.size
    for name, k in S.signature.funcs:
        for left in itertools.product(range(n), repeat=k):
            for right in itertools.product(range(n), repeat=k):
                if all(labels[a] == labels[b] for a, b in zip(left, right)):
                    if labels[apply(S, name, left)] != labels[apply(S, name, right)]:
                        return False
    return True


def congruences(S):
    """Congruences as frozensets of blocks."""
    out = set()
    for labels in set_partitions(S.size):
        if is_congruence(S, labels):
            blocks = {}
            for x, lab in enumerate(labels):
                blocks.setdefault(lab, set()).add(x)
            out.add(frozenset(frozenset(b) for b in blocks.values()))
    return out


def unary_polynomials(S):
    """Unary polynomial tables by saturating compositions with basic operations."""
    n = S.size
    found = {tuple(range(n))} | {tuple([a] * n) for a in range(n)}
    changed = True
    while changed:
        changed = False
        current = list(found)
        for name, k in S.signature.funcs:
            for args in itertools.product(current, repeat=k):
                t = tuple(apply(S, name, [f[x] for f in args]) for x in range(n))
                if t not in found:
                    found.add(t)
                    changed = True
    return found


def binary_polynomials(S):
    n = S.size
    pts = list(itertools.product(range(n), repeat=2))
    found = {tuple(p[0] for p in pts), tuple(p[1] for p in pts)}
    found |= {tuple([a] * len(pts)) for a in range(n)}
    changed = True
    while changed:
        changed = False
        current = list(found)
        for name, k in S.signature.funcs:
            for args in itertools.product(current, repeat=k):
                t = tuple(apply(S, name, [f[i] for f in args]) for i in range(len(pts)))
                if t not in found:
                    found.add(t)
                    changed = True
    return found


def gf2_consistent(equations, nvars):
    """Existence of a 0/1 solution by trying every assignment (small systems only)."""
    for values in itertools.product((0, 1), repeat=nvars):
        if all(sum(values[v] for v in vs) % 2 == rhs for vs, rhs in equations):
            return True
    return False
