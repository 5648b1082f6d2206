"""Brute-force homomorphism search between finite structures.

This is the reference oracle for every faster procedure in the package, so it
stays simple: elements of the source are assigned in domain order, values are
tried in domain order, and operation tuples whose arguments are all assigned
immediately force (or refute) the value of their result.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .errors import SignatureMismatch
from .structure import flat_index


def hom_violation(h, X, A):
    """First violated constraint as ``(symbol, tuple)``, or None."""
    if len(h) != X.size:
        return ("<length>", (len(h), X.size))
    if any(not 0 <= v < A.size for v in h):
        return ("<range>", tuple(h))
    n = X.size
    for name, k in X.signature.funcs:
        tx, ta = X.ops[name], A.ops[name]
        for args in itertools.product(range(n), repeat=k):
            image = tuple(h[a] for a in args)
            if h[tx[flat_index(args, n)]] != ta[flat_index(image, A.size)]:
                return (name, args)
    for name, _ in X.signature.rels:
        target = A.rels[name]
        for t in sorted(X.rels[name]):
            if tuple(h[a] for a in t) not in target:
                return (name, t)
    return None


def is_homomorphism(h, X, A):
    if X.signature != A.signature:
        return False
    return hom_violation(h, X, A) is None


def is_surjective(h, size):
    return len(set(h)) == size


def _check_signatures(X, A):
    if X.signature != A.signature:
        raise SignatureMismatch(
            f"source signature {X.signature} differs from target signature {A.signature}"
        )


class _Search:
    def __init__(self, X, A, surjective, allowed=None):
        self.X, self.A = X, A
        self.n, self.m = X.size, A.size
        self.surjective = surjective
        self.allowed = allowed
        # constraints: (kind, payload, distinct elements)
        self.cons = []
        touching = [[] for _ in range(self.n)]
        for name, k in X.signature.funcs:
            tx = X.ops[name]
            ta = A.ops[name]
            for args in itertools.product(range(self.n), repeat=k):
                res = tx[flat_index(args, self.n)]
                cid = len(self.cons)
                elems = set(args)
                self.cons.append(("op", (ta, args, res), len(elems)))
                for e in elems:
                    touching[e].append(cid)
        for name, k in X.signature.rels:
            target = A.rels[name]
            for t in sorted(X.rels[name]):
                cid = len(self.cons)
                elems = set(t)
                self.cons.append(("rel", (target, t), len(elems)))
                for e in elems:
                    touching[e].append(cid)
        self.touching = touching
        self.remaining = [c[2] for c in self.cons]
        self.h = [-1] * self.n
        self.trail = []
        self.hits = [0] * self.m
        self.missing = self.m

    def _set(self, x, v):
        self.h[x] = v
        self.trail.append(x)
        if self.hits[v] == 0:
            self.missing -= 1
        self.hits[v] += 1

    def _undo_to(self, mark):
        while len(self.trail) > mark:
            x = self.trail.pop()
            v = self.h[x]
            self.hits[v] -= 1
            if self.hits[v] == 0:
                self.missing += 1
            self.h[x] = -1
            for cid in self.touching[x]:
                self.remaining[cid] += 1

    def _assign(self, x, v):
        """Assign and propagate; returns False on conflict (caller undoes)."""
        queue = [(x, v)]
        h = self.h
        m = self.m
        while queue:
            x, v = queue.pop()
            if h[x] != -1:
                if h[x] != v:
                    return False
                continue
            if self.allowed is not None and v not in self.allowed[x]:
                return False
            self._set(x, v)
            # update every counter before checking, so undo stays symmetric
            ready = []
            for cid in self.touching[x]:
                self.remaining[cid] -= 1
                if not self.remaining[cid]:
                    ready.append(cid)
            for cid in ready:
                kind, payload, _ = self.cons[cid]
                if kind == "op":
                    ta, args, res = payload
                    idx = 0
                    for a in args:
                        idx = idx * m + h[a]
                    want = ta[idx]
                    if h[res] == -1:
                        queue.append((res, want))
                    elif h[res] != want:
                        return False
                else:
                    target, t = payload
                    if tuple(h[a] for a in t) not in target:
                        return False
        return True

    def run(self, on_solution):
        """Depth-first search; ``on_solution`` returns True to stop."""
        # nullary operations of X are constraints with no arguments
        for cid, (kind, payload, count) in enumerate(self.cons):
            if count == 0:
                if kind == "op":
                    ta, args, res = payload
                    if not self._assign(res, ta[0]):
                        return
                elif tuple() not in payload[0]:
                    return
        self._dfs(0, on_solution)

    def _dfs(self, start, on_solution):
        x = start
        while x < self.n and self.h[x] != -1:
            x += 1
        if x == self.n:
            if self.surjective and self.missing:
                return False
            return on_solution(tuple(self.h))
        if self.surjective:
            unassigned = sum(1 for v in self.h if v == -1)
            if unassigned < self.missing:
                return False
        for v in range(self.m):
            mark = len(self.trail)
            ok = self._assign(x, v)
            if ok and self._dfs(x + 1, on_solution):
                self._undo_to(mark)
                return True
            self._undo_to(mark)
        return False


def enumerate_homs(X, A, mode="enumerate", surjective=False, allowed=None):
    """Homomorphisms ``X -> A``: ``mode`` is ``exists``, ``count`` or ``enumerate``.

    ``allowed`` optionally restricts each source element to a set of values.
    Enumeration is in lexicographic order of value sequences.
    """
    _check_signatures(X, A)
    if mode not in ("exists", "count", "enumerate"):
        raise ValueError(f"unknown mode {mode!r}")
    search = _Search(X, A, surjective, allowed)
    found = []
    counter = [0]

    def on_solution(h):
        if mode == "exists":
            found.append(h)
            return True
        if mode == "count":
            counter[0] += 1
        else:
            found.append(h)
        return False

    search.run(on_solution)
    if mode == "exists":
        return bool(found)
    if mode == "count":
        return counter[0]
    return found


def find_hom(X, A, surjective=False, allowed=None):
    """The lexicographically first homomorphism, or None."""
    _check_signatures(X, A)
    search = _Search(X, A, surjective, allowed)
    found = []

    def on_solution(h):
        found.append(h)
        return True

    search.run(on_solution)
    return found[0] if found else None


def count_homs(X, A, surjective=False):
    return enumerate_homs(X, A, "count", surjective)


def hom_exists(X, A):
    return enumerate_homs(X, A, "exists")


# -- growth probes -------------------------------------------------------------------


@dataclass
class CountingProbe:
    family: str
    sizes: list = field(default_factory=list)
    counts: list = field(default_factory=list)  # (instance size, homs, surjective homs)

    def render(self):
        lines = [f"family: {self.family}"]
        for n, (size, total, surj) in zip(self.sizes, self.counts):
            lines.append(f"n={n} |X|={size} homs={total} surjective={surj}")
        return "\n".join(lines)


def star_congruence(A, budget=None):
    """A minimal congruence of a 3-element algebra with a 2-element block and type 1, or None."""
    from .congruences import all_congruences, type_of_cover

    if A.size != 3:
        return None
    L = all_congruences(A)
    for alpha in L.minimal():
        if alpha.num_blocks == 2 and type_of_cover(A, L.bottom, alpha) == 1:
            return alpha
    return None


def counting_probe(A, family, n_max, alpha=None, budget=10**6):
    """Brute-force (surjective) homomorphism counts from a growth family into ``A``."""
    from .clones import free_algebra, star_extension

    probe = CountingProbe(family)
    if family == "star-extension" and alpha is None and n_max >= 1:
        alpha = star_congruence(A)
        if alpha is None:
            from .errors import PreconditionViolated

            raise PreconditionViolated("no type-1 minimal congruence with a 2-element block")
    for n in range(1, n_max + 1):
        if family == "free-algebra":
            X = free_algebra(A, n, budget)[0]
        elif family == "star-extension":
            X = star_extension(A, alpha, n, budget).algebra
        else:
            raise ValueError(f"unknown probe family {family!r}")
        total = count_homs(X, A)
        surj = count_homs(X, A, surjective=True)
        probe.sizes.append(n)
        probe.counts.append((X.size, total, surj))
    return probe
