"""(k,l)-systems of partial maps and the (k,l)-minimality algorithm.

A system assigns to every set ``K`` of at most ``k`` source elements a set of
maps ``K -> A``.  Maps on a sorted ``K`` are stored as value tuples.  During
the fixpoint a family is a boolean mask over all ``|A|**|K|`` value tuples,
indexed in lexicographic order.

Windows are the sets ``L`` with ``|L| <= l`` (all maps ``L -> A`` allowed)
and the scopes of the tuples of ``graph(X)`` (only maps sending the tuple into
the matching relation of ``graph(A)``).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .errors import ShapeMismatch
from .homs import find_hom, is_homomorphism
from .instances import known_constructions, mixed_instance, seeded
from .structure import Structure, graph_of


@dataclass
class KlSystem:
    k: int
    source_size: int
    target_size: int
    families: dict  # sorted tuple K -> sorted tuple of value tuples
    log: list = field(default_factory=list, repr=False)

    def family(self, K):
        return self.families[tuple(sorted(K))]

    def is_trivial(self):
        return any(not maps for maps in self.families.values())

    def nontrivial(self):
        return not self.is_trivial()

    def contains(self, other):
        """Pointwise inclusion ``other <= self``."""
        return all(set(maps) <= set(self.families.get(K, ())) for K, maps in other.families.items())

    def dump(self, names=None):
        label = (lambda x: names[x]) if names else str
        lines = []
        for K in sorted(self.families, key=lambda K: (len(K), K)):
            head = "K={" + ",".join(label(x) for x in K) + "}:"
            maps = " ".join("(" + ",".join(map(str, f)) + ")" for f in self.families[K])
            lines.append(f"{head} {maps}".rstrip())
        return "\n".join(lines) + "\n"


def subsets_upto(n, k):
    for size in range(k + 1):
        yield from itertools.combinations(range(n), size)


def _codes(values, positions, m):
    """Lexicographic codes of the restrictions of the rows of ``values``."""
    code = np.zeros(len(values), dtype=np.int64)
    for p in positions:
        code = code * m + values[:, p]
    return code


def _all_maps(size, m):
    if size == 0:
        return np.zeros((1, 0), dtype=np.int64)
    return np.array(list(itertools.product(range(m), repeat=size)), dtype=np.int64)


@dataclass
class _Window:
    L: tuple
    maps: np.ndarray  # candidate maps L -> A, rows in lexicographic order
    subsets: list  # (K, positions inside L, codes of restrictions)
    origin: str


def _windows(X, A, k, l):
    m = A.size
    GX, GA = graph_of(X), graph_of(A)
    out = []
    for name, _ in GX.signature.rels:
        target = GA.rels[name]
        for t in sorted(GX.rels[name]):
            L = tuple(sorted(set(t)))
            pos = [L.index(y) for y in t]
            maps = _all_maps(len(L), m)
            keep = [tuple(int(g[p]) for p in pos) in target for g in maps]
            label = f"{name}{t}"
            out.append(_make_window(L, maps[np.array(keep, dtype=bool)], k, m, label))
    for L in subsets_upto(X.size, l):
        out.append(_make_window(L, _all_maps(len(L), m), k, m, "subset"))
    return out


def _make_window(L, maps, k, m, origin):
    subsets = []
    for size in range(min(k, len(L)) + 1):
        for pos in itertools.combinations(range(len(L)), size):
            K = tuple(L[p] for p in pos)
            subsets.append((K, pos, _codes(maps, pos, m)))
    return _Window(L, maps, subsets, origin)


def _masks_from_system(P, m):
    masks = {}
    for K, maps in P.families.items():
        mask = np.zeros(m ** len(K), dtype=bool)
        for f in maps:
            code = 0
            for v in f:
                code = code * m + v
            mask[code] = True
        masks[K] = mask
    return masks


def _system_from_masks(masks, k, n, m, log=None):
    families = {}
    for K, mask in masks.items():
        values = list(itertools.product(range(m), repeat=len(K)))
        families[K] = tuple(values[i] for i in np.flatnonzero(mask))
    return KlSystem(k, n, m, families, log if log is not None else [])


def _consistent(window, masks):
    ok = np.ones(len(window.maps), dtype=bool)
    for K, _, codes in window.subsets:
        ok &= masks[K][codes]
    return ok


def kl_minimality(X, A, k, l, allowed=None, on_delete=None):
    """The largest compatible (k,l)-system from ``X`` to ``A``.

    ``allowed`` optionally pins source elements to value sets (applied to the
    singleton families).  ``on_delete(masks, K, f, window)`` is called before
    each deletion with the current state.
    """
    if not 1 <= k <= l:
        raise ValueError("need 1 <= k <= l")
    n, m = X.size, A.size
    masks = {K: np.ones(m ** len(K), dtype=bool) for K in subsets_upto(n, k)}
    if allowed is not None:
        for x, values in enumerate(allowed):
            if values is not None:
                mask = np.zeros(m, dtype=bool)
                mask[list(values)] = True
                masks[(x,)] &= mask
    windows = _windows(X, A, k, l)
    log = []
    changed = True
    while changed:
        changed = False
        for w in windows:
            ok = _consistent(w, masks)
            for K, _, codes in w.subsets:
                support = np.zeros(m ** len(K), dtype=bool)
                support[codes[ok]] = True
                dead = masks[K] & ~support
                if dead.any():
                    for code in np.flatnonzero(dead):
                        f = _decode(int(code), len(K), m)
                        if on_delete is not None:
                            on_delete(masks, K, f, w)
                        log.append((K, f, w.L, w.origin))
                    masks[K] = masks[K] & support
                    changed = True
                    ok = _consistent(w, masks)
    return _system_from_masks(masks, k, n, m, log)


def _decode(code, size, m):
    out = []
    for _ in range(size):
        out.append(code % m)
        code //= m
    return tuple(reversed(out))


def has_extension(masks, K, f, window, m):
    """Whether ``f`` on ``K`` extends to a map of ``window`` consistent with ``masks``."""
    ok = _consistent(window, masks)
    for K2, _, codes in window.subsets:
        if K2 == K:
            code = 0
            for v in f:
                code = code * m + v
            return bool((ok & (codes == code)).any())
    raise KeyError(K)


@dataclass
class SystemViolation:
    """Failing forth requirement: ``f`` in ``P_K`` has no good extension on ``L``."""

    K: tuple
    f: tuple
    L: tuple
    origin: str

    def __bool__(self):
        return False

    def __str__(self):
        return f"map {self.f} on {self.K} does not extend over {self.L} ({self.origin})"


def verify_system(X, A, P, k, l):
    """True if ``P`` is a compatible (k,l)-system, else the first SystemViolation."""
    n, m = X.size, A.size
    if P.k != k or P.source_size != n or P.target_size != m:
        raise ShapeMismatch("system shape does not match the instance, template and k")
    for K in subsets_upto(n, k):
        if K not in P.families:
            raise ShapeMismatch(f"system has no family for {K}")
    for K, maps in P.families.items():
        if len(K) > k or any(len(f) != len(K) for f in maps):
            raise ShapeMismatch(f"family for {K} has maps of the wrong shape")
    masks = _masks_from_system(P, m)
    for w in _windows(X, A, k, l):
        ok = _consistent(w, masks)
        # largest sets first, so the witness names the most specific map
        for K, _, codes in reversed(w.subsets):
            support = np.zeros(m ** len(K), dtype=bool)
            support[codes[ok]] = True
            missing = masks[K] & ~support
            if missing.any():
                f = _decode(int(np.flatnonzero(missing)[0]), len(K), m)
                return SystemViolation(K, f, w.L, w.origin)
    return True


def all_maps_system(n, m, k):
    families = {K: tuple(itertools.product(range(m), repeat=len(K))) for K in subsets_upto(n, k)}
    return KlSystem(k, n, m, families)


def restrictions_of(h, K):
    return tuple(h[x] for x in K)


def solve_by_minimality(X, A, k=2, l=3):
    """Self-reduction: pin elements one at a time, keeping (k,l)-minimality
    nontrivial.  Returns a homomorphism or None; the answer is only guaranteed
    for templates of relational width (k,l)."""
    allowed = [None] * X.size
    if kl_minimality(X, A, k, l).is_trivial():
        return None
    for x in range(X.size):
        for v in range(A.size):
            allowed[x] = {v}
            if kl_minimality(X, A, k, l, allowed).nontrivial():
                break
        else:
            return None
    h = tuple(next(iter(s)) for s in allowed)
    return h if is_homomorphism(h, X, A) else None


# -- the system from the non-collapse construction ---------------------------------------------

ZERO, ZERO_BAR = 0, 5


def _kind(x):
    if x == ZERO:
        return ("0", None)
    if x == ZERO_BAR:
        return ("0~", None)
    if x < 5:
        return ("a", x - 1)
    return ("a~", x - 6)


def _pair_allows(x, y, vx, vy):
    """Explicit pair rules; None when no rule names the pair."""
    kx, ky = _kind(x), _kind(y)
    if {kx[0], ky[0]} == {"0", "0~"}:
        return (vx, vy) == ((0, 1) if kx[0] == "0" else (1, 0))
    if kx[0] == "0" or ky[0] == "0":
        return (vx if kx[0] == "0" else vy) == 0
    if kx[0] == "0~" or ky[0] == "0~":
        return (vx if kx[0] == "0~" else vy) == 1
    if kx[0] == "a~" and ky[0] == "a":
        kx, ky, vx, vy = ky, kx, vy, vx
    (tx, i), (ty, j) = kx, ky
    if tx == "a" and ty == "a":
        return (vx, vy) != (1, 1)
    if tx == "a" and ty == "a~":
        if i == j:
            return vx != vy
        return (vx, vy) != (1, 0)
    return (vx, vy) != (0, 0)


def paper_p_system():
    """The explicit nontrivial (2,l)-system on the 10-element instance.

    Singletons and the empty set get the projections of the pair families.
    """
    n, m = 10, 2
    families = {}
    for x, y in itertools.combinations(range(n), 2):
        families[(x, y)] = tuple(
            (vx, vy) for vx in range(m) for vy in range(m) if _pair_allows(x, y, vx, vy)
        )
    for x in range(n):
        values = set()
        for K, maps in families.items():
            if len(K) == 2 and x in K:
                i = K.index(x)
                proj = {f[i] for f in maps}
                values = proj if not values else values & proj
        families[(x,)] = tuple((v,) for v in sorted(values))
    families[()] = ((),)
    return KlSystem(2, n, m, families)


# -- harness -----------------------------------------------------------------------------


@dataclass
class Pass:
    checked: int

    verdict = "pass"


@dataclass
class Counterexample:
    instance: object
    system: KlSystem
    checked: int

    verdict = "counterexample"


def _small_algebras(A, n):
    """All algebras of size ``n`` in the signature of ``A`` (no relations)."""
    sig = A.signature
    names = [name for name, _ in sig.funcs]
    sizes = [n**k for _, k in sig.funcs]
    for values in itertools.product(range(n), repeat=sum(sizes)):
        ops, i = {}, 0
        for name, size in zip(names, sizes):
            ops[name] = list(values[i : i + size])
            i += size
        yield Structure(sig, n, ops, {name: set() for name, _ in sig.rels})


def width_harness(A, k, l, max_n, samples, seed=0, exhaustive_upto=2, extra=None):
    """Search instances for a nontrivial (k,l)-minimality output without a
    homomorphism.

    ``extra`` instances are tried first; by default these are the built-in
    constructions known for ``A`` (which may be larger than ``max_n``).  Then
    all algebras up to ``exhaustive_upto`` elements, then ``samples`` seeded
    random instances with at most ``max_n`` elements.
    """
    rng = seeded(seed)
    checked = 0
    if extra is None:
        extra = known_constructions(A)

    def candidates():
        yield from extra
        for n in range(1, exhaustive_upto + 1):
            if n ** sum(n**a for _, a in A.signature.funcs) <= 5000 and not A.signature.rels:
                yield from _small_algebras(A, n)
        for _ in range(samples):
            yield mixed_instance(rng, A, max_n, n_min=min(3, max_n))

    for X in candidates():
        checked += 1
        P = kl_minimality(X, A, k, l)
        if P.nontrivial() and find_hom(X, A) is None:
            return Counterexample(X, P, checked)
    return Pass(checked)
