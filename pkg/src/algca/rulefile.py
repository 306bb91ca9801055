"""Line-oriented rule files.

One directive per line; ``#`` starts a comment.  Example (XOR over F_2)::

    field F2
    alphabet affine 1
    group Z 1
    memory 0; 1
    rule x0_0 + x1_0

Directives:

``format 1``
    Optional format version; files without it are read as version 1.
``field F<p>`` or ``field Q``
    Base field.  p must be prime.  Optional for table alphabets.
``alphabet affine <n>``
    Points of K^n cut out by the ``equation`` lines that follow (polynomials
    in u0..u<n-1>).  Over Q, ``sample`` lines list points used for checks.
``alphabet table <sym> <sym> ...``
    A finite set of named symbols; the rule must then be given by ``map`` lines.
``alphabet projective``
    P^1(F_p) as a table alphabet with symbols ``x:1`` and ``1:0``.
``group Z <d>``
    The free abelian group Z^d; elements are written ``a,b,...``.
``group finite <name> <name> ...`` followed by one ``product`` line per element
    The row for element a lists a*b for each b in declared order.
``memory <g>; <g>; ...``
    The memory set.  Its order fixes the memory index m in ``x<m>_<i>``.
``rule <polynomial>``
    One line per alphabet coordinate, in variables ``x<m>_<i>``.
``map <s> ... -> <s>``
    One table row: symbols for each memory element, then the output.
"""

from __future__ import annotations

import itertools
import dataclasses
from dataclasses import dataclass

from .alphabets import (AlphabetError, RationalAffineAlphabet, RegularMap, RegularMapError,
                        TableAlphabet, check_regular_map, coordinate_names, enumerate_points,
                        projective_line, rule_variables)
from .ca import CAError, CellularAutomaton, make_ca
from .fields import QQ, PrimeField, is_prime
from .groups import FiniteGroup, FreeAbelian, GroupError
from .parsing import PolySyntaxError, parse_polynomial

FORMAT_VERSION = "1"
DIRECTIVES = ("format", "field", "alphabet", "equation", "sample", "group", "product", "memory", "rule", "map")


class RuleFileError(ValueError):
    def __init__(self, message, line, column=1):
        super().__init__(f"line {line}, column {column}: {message}")
        self.message = message
        self.line = line
        self.column = column


@dataclass
class _Line:
    number: int
    keyword: str
    rest: str
    offset: int  # column where ``rest`` starts (1-based)


@dataclass
class _Sections:
    format: _Line | None = None
    field: _Line | None = None
    alphabet: _Line | None = None
    group: _Line | None = None
    memory: _Line | None = None
    equations: list = dataclasses.field(default_factory=list)
    samples: list = dataclasses.field(default_factory=list)
    products: list = dataclasses.field(default_factory=list)
    rules: list = dataclasses.field(default_factory=list)
    maps: list = dataclasses.field(default_factory=list)


def _lines(text):
    for no, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0].rstrip()
        stripped = body.lstrip()
        if not stripped:
            continue
        indent = len(body) - len(stripped)
        kw, _, rest = stripped.partition(" ")
        lead = len(rest) - len(rest.lstrip())
        yield _Line(no, kw, rest.strip(), indent + len(kw) + 2 + lead)


def _split_sections(text) -> _Sections:
    s = _Sections()
    for ln in _lines(text):
        if ln.keyword not in DIRECTIVES:
            raise RuleFileError(f"unknown directive {ln.keyword!r}", ln.number, ln.offset - len(ln.keyword) - 1)
        if ln.keyword in ("format", "field", "alphabet", "group", "memory"):
            if getattr(s, ln.keyword) is not None:
                raise RuleFileError(f"duplicate {ln.keyword} directive", ln.number)
            setattr(s, ln.keyword, ln)
        else:
            {"equation": s.equations, "sample": s.samples, "product": s.products,
             "rule": s.rules, "map": s.maps}[ln.keyword].append(ln)
    if s.format is not None and s.format.rest != FORMAT_VERSION:
        raise RuleFileError(f"unsupported format {s.format.rest!r}; this reader knows {FORMAT_VERSION}",
                            s.format.number, s.format.offset)
    return s


def _require(s: _Sections, *names):
    for name in names:
        if getattr(s, name) is None:
            raise RuleFileError(f"missing {name} directive", 1)


def _poly(ln: _Line, F, names):
    try:
        return parse_polynomial(ln.rest, F, names)
    except PolySyntaxError as e:
        raise RuleFileError(e.message, ln.number, ln.offset + e.column - 1) from None


def _parse_field(s: _Sections):
    ln = s.field
    if ln is None:
        if s.alphabet.rest.split()[:1] == ["table"]:
            return None
        raise RuleFileError("missing field directive", 1)
    name = ln.rest
    if name == "Q":
        return QQ
    if name.startswith("F") and name[1:].isdigit():
        p = int(name[1:])
        if not is_prime(p):
            raise RuleFileError(f"modulus {p} is not prime", ln.number, ln.offset + 1)
        return PrimeField(p)
    raise RuleFileError(f"expected F<p> or Q, found {name!r}", ln.number, ln.offset)


def _parse_alphabet(s: _Sections, F):
    ln = s.alphabet
    kind, _, rest = ln.rest.partition(" ")
    rest = rest.strip()
    if kind == "table":
        syms = rest.split()
        if not syms:
            raise RuleFileError("table alphabet needs at least one symbol", ln.number, ln.offset)
        try:
            return TableAlphabet(syms)
        except AlphabetError as e:
            raise RuleFileError(str(e), ln.number, ln.offset) from None
    if kind == "projective":
        if not isinstance(F, PrimeField):
            raise RuleFileError("projective alphabets are supported over F_p only", ln.number, ln.offset)
        return projective_line(F.p)
    if kind != "affine":
        raise RuleFileError(f"unknown alphabet kind {kind!r}", ln.number, ln.offset)
    if not rest.isdigit() or int(rest) < 1:
        raise RuleFileError("affine alphabet needs a positive dimension", ln.number, ln.offset + len(kind) + 1)
    n = int(rest)
    names = coordinate_names(n)
    eqs = [_poly(e, F, names) for e in s.equations]
    if isinstance(F, PrimeField):
        if s.samples:
            raise RuleFileError("sample points are only used over Q", s.samples[0].number)
        try:
            return enumerate_points(F.p, n, eqs)
        except AlphabetError as e:
            raise RuleFileError(str(e), ln.number) from None
    samples = []
    for sl in s.samples:
        try:
            pt = tuple(QQ(x) for x in sl.rest.split(":"))
        except (ValueError, ZeroDivisionError):
            raise RuleFileError(f"bad sample point {sl.rest!r}", sl.number, sl.offset) from None
        if len(pt) != n:
            raise RuleFileError(f"sample point needs {n} coordinates", sl.number, sl.offset)
        samples.append(pt)
    try:
        return RationalAffineAlphabet(n, eqs, samples)
    except AlphabetError as e:
        raise RuleFileError(str(e), s.samples[0].number if s.samples else ln.number) from None


def _parse_group(s: _Sections):
    ln = s.group
    kind, _, rest = ln.rest.partition(" ")
    rest = rest.strip()
    if kind == "Z":
        if not rest.isdigit() or int(rest) < 1:
            raise RuleFileError("group Z needs a positive rank", ln.number, ln.offset + 2)
        if s.products:
            raise RuleFileError("product lines are only allowed for finite groups", s.products[0].number)
        return FreeAbelian(int(rest))
    if kind == "finite":
        names = tuple(rest.split())
        if not names:
            raise RuleFileError("finite group needs element names", ln.number, ln.offset)
        if len(s.products) != len(names):
            raise RuleFileError(f"need {len(names)} product lines, found {len(s.products)}", ln.number)
        index = {x: i for i, x in enumerate(names)}
        table = []
        for pl in s.products:
            row = pl.rest.split()
            if len(row) != len(names):
                raise RuleFileError(f"product row needs {len(names)} entries", pl.number, pl.offset)
            bad = next((x for x in row if x not in index), None)
            if bad is not None:
                raise RuleFileError(f"unknown element {bad!r}", pl.number, pl.offset + pl.rest.index(bad))
            table.append(tuple(index[x] for x in row))
        try:
            return FiniteGroup(names, tuple(table))
        except GroupError as e:
            raise RuleFileError(str(e), s.products[0].number) from None
    raise RuleFileError(f"unknown group kind {kind!r}", ln.number, ln.offset)


def _parse_element(G, text, ln: _Line, col):
    text = text.strip()
    if isinstance(G, FreeAbelian):
        try:
            g = tuple(int(x) for x in text.split(","))
        except ValueError:
            raise RuleFileError(f"bad group element {text!r}", ln.number, col) from None
        if len(g) != G.rank:
            raise RuleFileError(f"element {text!r} needs {G.rank} coordinates", ln.number, col)
        return g
    try:
        return G.index_of(text)
    except (GroupError, ValueError):
        raise RuleFileError(f"unknown group element {text!r}", ln.number, col) from None


def _parse_memory(G, ln: _Line):
    out = []
    col = ln.offset
    if not ln.rest.strip():
        return out
    for part in ln.rest.split(";"):
        lead = len(part) - len(part.lstrip())
        out.append(_parse_element(G, part, ln, col + lead))
        col += len(part) + 1
    if len(set(out)) != len(out):
        raise RuleFileError("memory set has duplicates", ln.number, ln.offset)
    return out


def _parse_rule(s: _Sections, A, k):
    if A.kind == "table":
        if s.rules:
            raise RuleFileError("a table alphabet needs map lines, not rule lines", s.rules[0].number)
        table = {}
        for ml in s.maps:
            lhs, arrow, rhs = ml.rest.partition("->")
            if not arrow:
                raise RuleFileError("expected '->'", ml.number, ml.offset + len(ml.rest))
            syms = lhs.split()
            if len(syms) != k:
                raise RuleFileError(f"map row needs {k} input symbols, found {len(syms)}", ml.number, ml.offset)
            try:
                key = tuple(A.parse(x) for x in syms)
                val = A.parse(rhs.strip())
            except AlphabetError as e:
                raise RuleFileError(str(e), ml.number, ml.offset) from None
            if key in table:
                raise RuleFileError("duplicate map row", ml.number, ml.offset)
            table[key] = val
        missing = next((c for c in itertools.product(A.points, repeat=k) if c not in table), None)
        if missing is not None:
            where = s.maps[-1].number if s.maps else s.memory.number
            raise RuleFileError("map rows do not cover input " + " ".join(A.fmt(x) for x in missing), where)
        return RegularMap(A, k, table=table)
    if s.maps:
        raise RuleFileError("map lines need a table alphabet", s.maps[0].number)
    if len(s.rules) != A.dim:
        where = s.rules[-1].number if s.rules else s.memory.number
        raise RuleFileError(f"need {A.dim} rule lines (one per coordinate), found {len(s.rules)}", where)
    names = rule_variables(k, A.dim)
    body = [_poly(rl, A.field, names) for rl in s.rules]
    return RegularMap(A, k, body=body)


def parse_rule_file(text: str) -> CellularAutomaton:
    s = _split_sections(text)
    _require(s, "alphabet")
    F = _parse_field(s)
    _require(s, "group", "memory")
    A = _parse_alphabet(s, F)
    G = _parse_group(s)
    memory = _parse_memory(G, s.memory)
    rule = _parse_rule(s, A, len(memory))
    where = (s.rules or s.maps or [s.memory])[0].number
    try:
        rule = check_regular_map(rule)
    except RegularMapError as e:
        raise RuleFileError(str(e), where) from None
    try:
        return make_ca(G, memory, rule)
    except (CAError, GroupError) as e:
        raise RuleFileError(str(e), s.memory.number) from None


def load_rule_file(path) -> CellularAutomaton:
    with open(path, encoding="utf-8") as fh:
        return parse_rule_file(fh.read())


def serialize(ca: CellularAutomaton) -> str:
    """Rule-file text that parses back to the same CA."""
    A, G = ca.alphabet, ca.group
    lines = [f"format {FORMAT_VERSION}"]
    if A.kind == "table":
        p = _projective_prime(A)
        if p is not None:
            lines += [f"field F{p}", "alphabet projective"]
        else:
            lines.append("alphabet table " + " ".join(A.symbols))
    else:
        lines.append("field Q" if not A.is_finite else f"field F{A.field.p}")
        lines.append(f"alphabet affine {A.dim}")
        lines += [f"equation {e}" for e in A.equations]
        lines += [f"sample {A.fmt(pt)}" for pt in getattr(A, "samples", ())]
    if isinstance(G, FreeAbelian):
        lines.append(f"group Z {G.rank}")
    else:
        lines.append("group finite " + " ".join(G.names))
        lines += ["product " + " ".join(G.names[x] for x in row) for row in G.table]
    lines.append("memory " + "; ".join(G.fmt(g) for g in ca.memory))
    if ca.rule.body is not None:
        lines += [f"rule {q}" for q in ca.rule.body]
    else:
        for combo in itertools.product(A.points, repeat=len(ca.memory)):
            lines.append("map " + " ".join(A.fmt(x) for x in combo) + " -> " + A.fmt(ca.rule.table[combo]))
    return "\n".join(lines) + "\n"


def _projective_prime(A):
    syms = A.symbols
    p = len(syms) - 1
    if p >= 2 and is_prime(p) and tuple(syms) == projective_line(p).symbols:
        return p
    return None
