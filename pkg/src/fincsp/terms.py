"""Terms, identities and their evaluation over finite structures.

A term is either an ``int`` (the variable ``x<i>``) or a tuple
``(symbol, child, ...)``.  The textual form is a prefix s-expression::

    (f (g x0) x1)

Nullary symbols may be written bare (``e``) or applied (``(e)``).
"""

from __future__ import annotations

import functools
import itertools
import re
from dataclasses import dataclass
from importlib import resources

import numpy as np

from .errors import ArityMismatch, ParseError, UnknownSymbol

_VAR = re.compile(r"x(\d+)$")
_TOKEN = re.compile(r"\(|\)|[^\s()]+")


def var(i):
    return int(i)


def app(symbol, *children):
    return (symbol, *children)


def is_var(t):
    return isinstance(t, int)


def variables(t):
    if is_var(t):
        return {t}
    out = set()
    for c in t[1:]:
        out |= variables(c)
    return out


def var_count(t):
    vs = variables(t)
    return max(vs) + 1 if vs else 0


def symbols_of(t):
    if is_var(t):
        return set()
    out = {t[0]}
    for c in t[1:]:
        out |= symbols_of(c)
    return out


def depth(t):
    if is_var(t):
        return 0
    return 1 + max((depth(c) for c in t[1:]), default=0)


def substitute(t, mapping):
    """Replace variable ``i`` by ``mapping[i]`` (a term)."""
    if is_var(t):
        return mapping[t]
    return (t[0],) + tuple(substitute(c, mapping) for c in t[1:])


def rename(t, symbols):
    """Rename function symbols according to ``symbols`` (missing names kept)."""
    if is_var(t):
        return t
    return (symbols.get(t[0], t[0]),) + tuple(rename(c, symbols) for c in t[1:])


def format_term(t):
    if is_var(t):
        return f"x{t}"
    if len(t) == 1:
        return t[0]
    return "(" + " ".join([t[0]] + [format_term(c) for c in t[1:]]) + ")"


def parse_term(text, line=None):
    tokens = _TOKEN.findall(text)
    if not tokens:
        raise ParseError("empty term", line)
    term, pos = _parse_tokens(tokens, 0, line)
    if pos != len(tokens):
        raise ParseError(f"trailing tokens after term: {' '.join(tokens[pos:])}", line)
    return term


def _parse_tokens(tokens, pos, line):
    if pos >= len(tokens):
        raise ParseError("unexpected end of term", line)
    tok = tokens[pos]
    if tok == ")":
        raise ParseError("unexpected ')'", line)
    if tok != "(":
        m = _VAR.match(tok)
        if m:
            return int(m.group(1)), pos + 1
        return (tok,), pos + 1
    pos += 1
    if pos >= len(tokens) or tokens[pos] in "()":
        raise ParseError("expected a symbol after '('", line)
    symbol = tokens[pos]
    if _VAR.match(symbol):
        raise ParseError(f"variable {symbol} cannot be applied", line)
    pos += 1
    children = []
    while True:
        if pos >= len(tokens):
            raise ParseError("missing ')'", line)
        if tokens[pos] == ")":
            return (symbol, *children), pos + 1
        child, pos = _parse_tokens(tokens, pos, line)
        children.append(child)


def check_term(t, signature):
    """Raise UnknownSymbol / ArityMismatch if ``t`` does not fit ``signature``."""
    if is_var(t):
        return
    name = t[0]
    if not signature.has_func(name):
        raise UnknownSymbol(f"unknown function symbol {name!r}")
    k = signature.func_arity(name)
    if len(t) - 1 != k:
        raise ArityMismatch(f"{name} has arity {k}, applied to {len(t) - 1} arguments")
    for c in t[1:]:
        check_term(c, signature)


def eval_term(t, S, assignment):
    check_term(t, S.signature)
    return _eval(t, S, assignment)


def _eval(t, S, assignment):
    if is_var(t):
        if t >= len(assignment):
            raise ArityMismatch(f"assignment does not cover x{t}")
        return assignment[t]
    return S.apply(t[0], [_eval(c, S, assignment) for c in t[1:]])


def eval_term_vectors(t, S, inputs):
    """Evaluate ``t`` pointwise on numpy vectors; ``inputs[i]`` is the vector for ``x<i>``."""
    if is_var(t):
        return inputs[t]
    if len(t) == 1:
        shape = inputs[0].shape if inputs else ()
        return np.full(shape, S.ops[t[0]][0], dtype=np.int64)
    args = [eval_term_vectors(c, S, inputs) for c in t[1:]]
    return S.arrays[t[0]][tuple(args)]


def assignment_grid(n, m):
    """Vectors of length ``n**m`` listing each coordinate of all assignments in lex order."""
    if m == 0:
        return []
    grid = np.indices((n,) * m, dtype=np.int64).reshape(m, -1)
    return [grid[i] for i in range(m)]


def term_table(t, S, arity=None):
    """The ``arity``-ary operation induced by ``t`` on ``S`` as a flat tuple."""
    check_term(t, S.signature)
    m = var_count(t) if arity is None else arity
    if var_count(t) > m:
        raise ArityMismatch(f"term uses {var_count(t)} variables, table arity is {m}")
    if m == 0:
        return (_eval(t, S, ()),)
    values = eval_term_vectors(t, S, assignment_grid(S.size, m))
    values = np.broadcast_to(values, (S.size**m,))
    return tuple(int(v) for v in values)


@dataclass(frozen=True)
class Identity:
    lhs: object
    rhs: object
    var_count: int

    def __post_init__(self):
        need = max(var_count(self.lhs), var_count(self.rhs))
        if need > self.var_count:
            raise ValueError(f"identity uses {need} variables but declares {self.var_count}")

    @classmethod
    def of(cls, lhs, rhs):
        return cls(lhs, rhs, max(var_count(lhs), var_count(rhs)))

    def renamed(self, symbols):
        return Identity(rename(self.lhs, symbols), rename(self.rhs, symbols), self.var_count)

    def __str__(self):
        return f"{format_term(self.lhs)} = {format_term(self.rhs)}"


def identity_counterexample(S, ident):
    """First assignment (lexicographic) where the two sides differ, or None."""
    check_term(ident.lhs, S.signature)
    check_term(ident.rhs, S.signature)
    m = ident.var_count
    if m == 0:
        ok = _eval(ident.lhs, S, ()) == _eval(ident.rhs, S, ())
        return None if ok else ()
    grid = assignment_grid(S.size, m)
    left = np.broadcast_to(eval_term_vectors(ident.lhs, S, grid), grid[0].shape)
    right = np.broadcast_to(eval_term_vectors(ident.rhs, S, grid), grid[0].shape)
    bad = np.flatnonzero(left != right)
    if bad.size == 0:
        return None
    i = int(bad[0])
    return tuple(int(g[i]) for g in grid)


def satisfies_identity(S, ident):
    return identity_counterexample(S, ident) is None


def satisfies_all(S, identities):
    return all(satisfies_identity(S, ident) for ident in identities)


def parse_identities(text):
    out = []
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.count("=") != 1:
            raise ParseError("expected '<term> = <term>'", number)
        left, right = line.split("=")
        out.append(Identity.of(parse_term(left, number), parse_term(right, number)))
    return out


def format_identities(identities):
    return "".join(f"{ident}\n" for ident in identities)


SHIPPED_IDENTITIES = ("semilattice", "group", "boolean-algebra")

# the symbols each shipped file is written over, in a canonical order
SHIPPED_SYMBOLS = {
    "semilattice": ("s",),
    "group": ("mul", "inv", "e"),
    "boolean-algebra": ("and", "or", "not", "zero", "one"),
}


def load_identities(name_or_path, symbols=None):
    """Load a shipped identity file by name or any file by path.

    ``symbols`` optionally renames the function symbols used in the file.
    """
    key = str(name_or_path)
    stem = key[:-4] if key.endswith(".ids") else key
    if stem in SHIPPED_IDENTITIES:
        ids = list(_shipped(stem))
    else:
        with open(key, encoding="utf-8") as fh:
            ids = parse_identities(fh.read())
    if symbols:
        ids = [ident.renamed(symbols) for ident in ids]
    return ids


@functools.lru_cache(maxsize=None)
def _shipped(stem):
    text = resources.files("fincsp").joinpath("data").joinpath(f"{stem}.ids").read_text("utf-8")
    return tuple(parse_identities(text))


def all_assignments(n, m):
    return itertools.product(range(n), repeat=m)
