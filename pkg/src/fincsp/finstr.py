"""Reader and writer for the line-oriented ``.finstr`` structure format.

::

    # comment
    domain 3
    op f 2
    0 1 2
    1 1 2
    1 0 2
    rel E 2 2
    0 1
    1 0
"""

from __future__ import annotations

from .errors import BadTable, DuplicateSymbol, ParseError
from .structure import Signature, Structure


def _lines(text):
    out = []
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            out.append((number, line.split()))
    return out


def _int(token, line, what):
    try:
        return int(token)
    except ValueError:
        raise ParseError(f"expected {what}, got {token!r}", line) from None


def parse_structure(text):
    lines = _lines(text)
    if not lines:
        raise ParseError("empty input", 1)
    number, tokens = lines[0]
    if tokens[0] != "domain" or len(tokens) != 2:
        raise ParseError("first line must be 'domain <n>'", number)
    n = _int(tokens[1], number, "domain size")
    if n < 1:
        raise ParseError("domain size must be positive", number)

    # flatten the remaining lines into (line, token) pairs, remembering line ends
    stream = [(num, tok, i == len(toks) - 1) for num, toks in lines[1:] for i, tok in enumerate(toks)]
    pos = 0
    funcs, rels, tables, tuples = [], [], {}, {}
    seen = set()

    def take(what):
        nonlocal pos
        if pos >= len(stream):
            last = stream[-1][0] if stream else number
            raise ParseError(f"unexpected end of input, expected {what}", last)
        item = stream[pos]
        pos += 1
        return item

    while pos < len(stream):
        line, keyword, _ = take("'op' or 'rel'")
        if keyword == "op":
            _, name, _ = take("operation name")
            line_a, tok, _ = take("arity")
            k = _int(tok, line_a, "arity")
            if k < 0:
                raise ParseError("arity must be nonnegative", line_a)
            if name in seen:
                raise ParseError(f"duplicate symbol {name!r}", line)
            seen.add(name)
            need = n**k
            table = []
            while len(table) < need:
                if pos >= len(stream) or stream[pos][1] in ("op", "rel"):
                    where = stream[pos][0] if pos < len(stream) else (stream[-1][0] if stream else line)
                    raise ParseError(
                        f"table of {name} has {len(table)} entries, expected {need}", where
                    )
                num, tok, _ = take("table entry")
                v = _int(tok, num, "table entry")
                if not 0 <= v < n:
                    raise ParseError(f"element {v} out of range for domain {n}", num)
                table.append(v)
            funcs.append((name, k))
            tables[name] = table
        elif keyword == "rel":
            _, name, _ = take("relation name")
            line_a, tok, _ = take("arity")
            k = _int(tok, line_a, "arity")
            line_m, tok, end = take("tuple count")
            m = _int(tok, line_m, "tuple count")
            if k < 1:
                raise ParseError("relation arity must be positive", line_a)
            if m < 0:
                raise ParseError("tuple count must be nonnegative", line_m)
            if not end:
                raise ParseError("relation header must end its line", line_m)
            if name in seen:
                raise ParseError(f"duplicate symbol {name!r}", line)
            seen.add(name)
            ts = []
            for _ in range(m):
                row = []
                row_line = stream[pos][0] if pos < len(stream) else line_m
                while True:
                    num, tok, end = take(f"tuple of {name}")
                    if num != row_line:
                        raise ParseError(f"tuple of {name} must have {k} entries", row_line)
                    v = _int(tok, num, "tuple entry")
                    if not 0 <= v < n:
                        raise ParseError(f"element {v} out of range for domain {n}", num)
                    row.append(v)
                    if end:
                        break
                if len(row) != k:
                    raise ParseError(f"tuple of {name} has {len(row)} entries, expected {k}", row_line)
                ts.append(tuple(row))
            rels.append((name, k))
            tuples[name] = ts
        else:
            raise ParseError(f"unexpected token {keyword!r}", line)
    try:
        return Structure(Signature(tuple(funcs), tuple(rels)), n, tables, tuples)
    except (BadTable, DuplicateSymbol) as exc:
        raise ParseError(str(exc), number) from None


def serialize_structure(S):
    n = S.size
    out = [f"domain {n}"]
    for name, k in S.signature.funcs:
        out.append(f"op {name} {k}")
        table = S.ops[name]
        width = 1 if k == 0 else n
        for i in range(0, len(table), width):
            out.append(" ".join(map(str, table[i : i + width])))
    for name, k in S.signature.rels:
        ts = sorted(S.rels[name])
        out.append(f"rel {name} {k} {len(ts)}")
        out.extend(" ".join(map(str, t)) for t in ts)
    return "\n".join(out) + "\n"


def load_structure(path):
    with open(path, encoding="utf-8") as fh:
        return parse_structure(fh.read())


def dump_structure(S, path):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(serialize_structure(S))
