"""Built-in templates and instances, and seeded random instance generators.

Named instances are stored as ``.finstr`` text and parsed on demand, so the
parser is exercised whenever one of them is used.
"""

from __future__ import annotations

import itertools
import random

from .finstr import parse_structure
from .structure import Structure

NOR_TEXT = """\
# x . y = not x and not y
domain 2
op m 2
1 0
0 0
"""

Z_TEXT = """\
# two binary operations: x + y and x + y + 1 modulo 2
domain 2
op p 2
0 1
1 0
op q 2
1 0
0 1
"""

EXAMPLE_4_12_TEXT = """\
# three elements, one binary operation o; {0,1}^2 + {(2,2)} is its only
# nontrivial congruence
domain 3
op o 2
0 1 2
1 1 2
1 0 2
"""

PROP_5_1_TEXT = """\
# binary relation E (disequality) and binary operation f
domain 3
op f 2
0 1 2
0 1 2
2 1 2
rel E 2 6
0 1
0 2
1 0
1 2
2 0
2 1
"""

BOOLEAN_ALGEBRA_TEXT = """\
# Boolean algebra with the bounds as unary constant operations
domain 2
op and 2
0 0
0 1
op or 2
0 1
1 1
op not 1
1 0
op zero 1
0 0
op one 1
1 1
"""

# f(x, y) = 2 if either argument is 2, else x: the block {0,1} only sees
# essentially unary polynomials, so surjective homomorphism counts grow
# exponentially
STAR_DEMO_TEXT = """\
domain 3
op f 2
0 0 2
1 1 2
2 2 2
"""


def nor_template():
    return parse_structure(NOR_TEXT)


def z_template():
    return parse_structure(Z_TEXT)


def example_4_12():
    return parse_structure(EXAMPLE_4_12_TEXT)


def prop_5_1():
    return parse_structure(PROP_5_1_TEXT)


def boolean_algebra():
    return parse_structure(BOOLEAN_ALGEBRA_TEXT)


def star_demo():
    return parse_structure(STAR_DEMO_TEXT)


def semilattice(kind="meet", symbol="s"):
    table = [0, 0, 0, 1] if kind == "meet" else [0, 1, 1, 1]
    return Structure.build(2, {symbol: table})


def cyclic_group(n, names=("mul", "inv", "e")):
    mul, inv, e = names
    return Structure.build(
        n,
        {
            mul: (2, [(x + y) % n for x in range(n) for y in range(n)]),
            inv: (1, [(-x) % n for x in range(n)]),
            e: (0, [0]),
        },
    )


def unary_algebra(table, symbol="u"):
    return Structure.build(len(table), {symbol: (1, list(table))})


# -- the 10-element instance without a homomorphism to the NOR template ---------------------

NOT23_NAMES = ("0", "a0", "a1", "a2", "a3", "0~", "a0~", "a1~", "a2~", "a3~")


def _bar(x):
    return x + 5 if x < 5 else x - 5


def _a(i):
    return 1 + i


def _abar(i):
    return 6 + i


def not23_table():
    """Multiplication table of the 10-element instance as a dict ``(x, y) -> z``.

    Element ``0`` is 0, ``1+i`` is ``a_i``, ``5`` is the barred 0 and ``6+i``
    is the barred ``a_i``.  Entries left open are ``a_i * a_j = a_k`` with
    ``k`` the least index outside ``{i, j}``.
    """
    zero, zbar = 0, 5
    t = {}

    def put(x, y, z):
        if (x, y) in t and t[(x, y)] != z:
            raise AssertionError(f"conflicting entries for {(x, y)}")
        t[(x, y)] = z

    for x in range(10):
        put(x, zero, _bar(x))
        put(zero, x, _bar(x))
        put(x, zbar, zero)
        put(zbar, x, zero)
        put(x, _bar(x), zero)
        put(_bar(x), x, zero)
        put(x, x, _bar(x))
    put(_a(0), _a(1), _a(2))
    put(_a(1), _a(0), _a(3))
    put(_a(2), _a(3), _a(0))
    put(_a(3), _a(2), _a(1))
    for i in range(4):
        for j in range(4):
            if i == j:
                continue
            put(_abar(i), _a(j), _a(i))
            put(_a(j), _abar(i), _a(i))
            put(_abar(i), _abar(j), zero)
    for i in range(4):
        for j in range(4):
            if i != j and (_a(i), _a(j)) not in t:
                k = min(set(range(4)) - {i, j})
                put(_a(i), _a(j), _a(k))
    assert len(t) == 100
    return t


def not23_finstr():
    t = not23_table()
    rows = [" ".join(str(t[(x, y)]) for y in range(10)) for x in range(10)]
    names = ", ".join(f"{i}={name}" for i, name in enumerate(NOT23_NAMES))
    return f"# elements: {names}\ndomain 10\nop m 2\n" + "\n".join(rows) + "\n"


def build_not23_instance():
    return parse_structure(not23_finstr())


# -- an instance of the two-operation template with the same behaviour ------------------------

Z_NAMES = ("0", "a0", "a1", "a2", "0~", "a0~", "a1~", "a2~")


def _z_value(x):
    """Intended value of an element as ``(variable or None, constant)``."""
    if x == 0:
        return None, 0
    if x == 4:
        return None, 1
    return (x - 1, 0) if x < 4 else (x - 5, 1)


def _z_element(v, c):
    if v is None:
        return 4 if c else 0
    return 5 + v if c else 1 + v


def z_counterexample_table():
    """``p`` on the 8-element instance: ``x`` and ``x~`` stand for ``x`` and
    ``x + 1``; ``a_i p a_j`` is ``a_k`` when ``i < j`` and ``a_k~`` when
    ``i > j`` (``k`` the third index), which no assignment satisfies."""
    n = 8
    table = []
    for x in range(n):
        for y in range(n):
            vx, cx = _z_value(x)
            vy, cy = _z_value(y)
            if vx is None or vy is None or vx == vy:
                v = None if vx == vy else (vx if vx is not None else vy)
                table.append(_z_element(v, cx ^ cy))
            else:
                flip = 1 if vx > vy else 0
                table.append(_z_element(3 - vx - vy, cx ^ cy ^ flip))
    return table


def build_z_counterexample():
    p = z_counterexample_table()
    q = [_z_element(_z_value(v)[0], _z_value(v)[1] ^ 1) for v in p]
    rows = lambda t: "\n".join(" ".join(map(str, t[i * 8 : (i + 1) * 8])) for i in range(8))
    names = ", ".join(f"{i}={name}" for i, name in enumerate(Z_NAMES))
    text = f"# elements: {names}\ndomain 8\nop p 2\n{rows(p)}\nop q 2\n{rows(q)}\n"
    return parse_structure(text)


def known_constructions(A):
    """Built-in instances without a homomorphism to ``A`` but with nontrivial
    (2,3)-minimality, for the templates that have them."""
    out = []
    for template, build in ((nor_template(), build_not23_instance), (z_template(), build_z_counterexample)):
        if A.signature == template.signature and A.size == template.size and A.ops == template.ops:
            out.append(build())
    return out


# -- translation between the NOR template and Boolean algebras -------------------------------

SHEFFER_TSPEC = """\
func m = (not (or x0 x1))
func and = (m (m x0 x0) (m x1 x1))
func or = (m (m x0 x1) (m x0 x1))
func not = (m x0 x0)
func zero = (m x0 (m x0 x0))
func one = (m (m x0 (m x0 x0)) (m x0 (m x0 x0)))
"""


def sheffer_spec():
    from .rewrite import parse_tspec

    return parse_tspec(SHEFFER_TSPEC, nor_template().signature, boolean_algebra().signature)


# -- named relations on {0,1} ----------------------------------------------------------------

BOOLEAN_RELATIONS = {
    "NAE": [t for t in itertools.product((0, 1), repeat=3) if len(set(t)) > 1],
    "ONE_IN_THREE": [t for t in itertools.product((0, 1), repeat=3) if sum(t) == 1],
    "IMPL": [(0, 0), (0, 1), (1, 1)],
    "ZERO": [(0,)],
    "ONE": [(1,)],
    "OR2": [(0, 1), (1, 0), (1, 1)],
    "EQ": [(0, 0), (1, 1)],
    "NEQ": [(0, 1), (1, 0)],
    "EVEN3": [t for t in itertools.product((0, 1), repeat=3) if sum(t) % 2 == 0],
}

UNARY_OPS = {"id": (0, 1), "neg": (1, 0), "c0": (0, 0), "c1": (1, 1)}

BINARY_OPS = {
    "nor": (1, 0, 0, 0),
    "xor": (0, 1, 1, 0),
    "xnor": (1, 0, 0, 1),
    "and": (0, 0, 0, 1),
    "or": (0, 1, 1, 1),
}


def boolean_template(ops=(), rels=()):
    """Two-element template from named operations and relations."""
    built_ops = {}
    for name in ops:
        if name in UNARY_OPS:
            built_ops[f"u_{name}"] = (1, list(UNARY_OPS[name]))
        else:
            built_ops[f"b_{name}"] = (2, list(BINARY_OPS[name]))
    built_rels = {name: (len(BOOLEAN_RELATIONS[name][0]), BOOLEAN_RELATIONS[name]) for name in rels}
    return Structure.build(2, built_ops, built_rels)


def boolean_catalogue():
    """Named two-element templates used to exercise the dichotomy classifier."""
    out = []
    for u in UNARY_OPS:
        for r in ("NAE", "ONE_IN_THREE", "IMPL", "ZERO", "ONE"):
            out.append((f"{u}+{r}", boolean_template([u], [r])))
    extra = [
        (["neg"], ["NAE", "ZERO"]),
        (["neg", "c0"], ["IMPL"]),
        (["id"], ["OR2", "IMPL"]),
        (["neg"], ["EQ", "NEQ"]),
        (["neg"], ["EVEN3"]),
        (["nor"], ["NAE"]),
        (["nor"], ["ZERO"]),
        (["nor"], []),
        (["xor"], ["ONE_IN_THREE"]),
        (["xor", "xnor"], []),
        (["xor", "xnor"], ["NAE"]),
        (["and"], ["ONE_IN_THREE"]),
        (["or"], ["NAE", "ONE"]),
    ]
    for ops, rels in extra:
        out.append(("+".join(ops + rels), boolean_template(ops, rels)))
    return out


# -- random instances ----------------------------------------------------------------------


def random_structure(rng, n, signature, density=0.3, max_tuples=None):
    ops = {name: [rng.randrange(n) for _ in range(n**k)] for name, k in signature.funcs}
    rels = {}
    for name, k in signature.rels:
        count = max(0, int(round(density * n * rng.random() * 2)))
        if max_tuples is not None:
            count = min(count, max_tuples)
        rels[name] = {tuple(rng.randrange(n) for _ in range(k)) for _ in range(count)}
    return Structure(signature, n, ops, rels)


def planted_structure(rng, n, A, density=0.3, noise=0):
    """Random instance built around a random map ``h`` into ``A``.

    Operation entries are chosen inside the preimage required by ``h`` when
    possible, so ``h`` is usually a homomorphism; ``noise`` entries are then
    overwritten at random.
    """
    h = [rng.randrange(A.size) for _ in range(n)]
    if n >= A.size and rng.random() < 0.5:
        h[: A.size] = range(A.size)
        rng.shuffle(h)
    pre = {v: [x for x in range(n) if h[x] == v] for v in range(A.size)}
    ops = {}
    for name, k in A.signature.funcs:
        table = []
        for args in itertools.product(range(n), repeat=k):
            want = A.apply(name, [h[a] for a in args])
            choices = pre[want]
            table.append(rng.choice(choices) if choices else rng.randrange(n))
        ops[name] = table
    rels = {}
    for name, k in A.signature.rels:
        allowed = [t for t in itertools.product(range(n), repeat=k) if tuple(h[a] for a in t) in A.rels[name]]
        count = max(0, int(round(density * n * rng.random() * 2)))
        rels[name] = set(rng.sample(allowed, min(count, len(allowed)))) if allowed else set()
    for _ in range(noise):
        if not ops:
            break
        name = rng.choice(sorted(ops))
        i = rng.randrange(len(ops[name]))
        ops[name][i] = rng.randrange(n)
    return Structure(A.signature, n, ops, rels)


def mixed_instance(rng, A, n_max, n_min=1, density=0.3):
    """One instance from a mixture of planted, perturbed and uniform generators."""
    n = rng.randint(n_min, n_max)
    roll = rng.random()
    if roll < 0.4:
        return planted_structure(rng, n, A, density)
    if roll < 0.7:
        return planted_structure(rng, n, A, density, noise=rng.randint(1, 2))
    return random_structure(rng, n, A.signature, density)


def seeded(seed):
    return random.Random(seed)
