"""Alphabets A = X(K) and regular maps A^M -> A.

Three backends:

* :class:`VarietyAlphabet` -- zero set of polynomials in F_p^n, points
  enumerated; a point is a tuple of residues.
* :class:`TableAlphabet` -- an opaque finite symbol list; a point is the
  symbol's index.  Used for extension fields, projective lines and other
  finite sets that are not affine subsets of F_p^n.
* :class:`RationalAffineAlphabet` -- zero set of polynomials in Q^n; points
  are tuples of Fractions and cannot be enumerated.
"""

from __future__ import annotations

import itertools
from functools import cached_property
from typing import Mapping, Sequence

from .fields import QQ, PrimeField
from .poly import MultiPoly

DEFAULT_ENUMERATION_CAP = 10 ** 6


class AlphabetError(ValueError):
    pass


class RegularMapError(ValueError):
    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


def coordinate_names(n: int) -> tuple:
    return tuple(f"u{i}" for i in range(n))


def var_name(m: int, i: int) -> str:
    return f"x{m}_{i}"


def rule_variables(k: int, n: int) -> tuple:
    return tuple(var_name(m, i) for m in range(k) for i in range(n))


class VarietyAlphabet:
    is_finite = True
    kind = "variety"

    def __init__(self, field: PrimeField, dim: int, equations: Sequence[MultiPoly], points: Sequence[tuple]):
        self.field = field
        self.dim = dim
        self.equations = tuple(equations)
        self.points = tuple(points)
        self._index = {pt: i for i, pt in enumerate(self.points)}
        if len(self._index) != len(self.points):
            raise AlphabetError("duplicate points")
        for pt in self.points:
            if not self.satisfies(pt):
                raise AlphabetError(f"{pt} does not satisfy the defining equations")

    @property
    def size(self):
        return len(self.points)

    def satisfies(self, pt) -> bool:
        return len(pt) == self.dim and all(eq.eval(pt) == 0 for eq in self.equations)

    def contains(self, pt) -> bool:
        return pt in self._index

    def index(self, pt) -> int:
        try:
            return self._index[pt]
        except KeyError:
            raise AlphabetError(f"{pt!r} is not a point of the alphabet") from None

    def is_full_space(self) -> bool:
        return not self.equations

    def fmt(self, pt) -> str:
        return ":".join(str(x) for x in pt)

    def parse(self, text: str):
        pt = tuple(self.field(int(x)) for x in text.split(":"))
        if not self.contains(pt):
            raise AlphabetError(f"{text} is not a point of the alphabet")
        return pt

    def to_json(self, pt):
        return list(pt)

    def from_json(self, obj):
        pt = tuple(self.field(x) for x in obj)
        self.index(pt)
        return pt

    def describe(self) -> str:
        eqs = ", ".join(str(e) for e in self.equations) or "none"
        return f"variety in {self.field}^{self.dim} (equations: {eqs}; {self.size} points)"

    def __eq__(self, other):
        return (isinstance(other, VarietyAlphabet) and other.field == self.field
                and other.dim == self.dim and other.points == self.points)

    def __hash__(self):
        return hash((self.field, self.dim, self.points))


class TableAlphabet:
    is_finite = True
    kind = "table"
    field = None
    dim = None

    def __init__(self, symbols: Sequence[str]):
        self.symbols = tuple(symbols)
        if len(set(self.symbols)) != len(self.symbols):
            raise AlphabetError("table symbols must be distinct")
        self.points = tuple(range(len(self.symbols)))

    @property
    def size(self):
        return len(self.symbols)

    def contains(self, pt) -> bool:
        return isinstance(pt, int) and 0 <= pt < len(self.symbols)

    def index(self, pt) -> int:
        if not self.contains(pt):
            raise AlphabetError(f"{pt!r} is not a symbol index")
        return pt

    def fmt(self, pt) -> str:
        return self.symbols[pt]

    def parse(self, text: str):
        try:
            return self.symbols.index(text)
        except ValueError:
            raise AlphabetError(f"unknown symbol {text!r}") from None

    def to_json(self, pt):
        return self.symbols[pt]

    def from_json(self, obj):
        return self.parse(obj)

    def describe(self) -> str:
        return f"table alphabet {{{', '.join(self.symbols)}}}"

    def __eq__(self, other):
        return isinstance(other, TableAlphabet) and other.symbols == self.symbols

    def __hash__(self):
        return hash(self.symbols)


class RationalAffineAlphabet:
    is_finite = False
    kind = "rational"
    field = QQ

    def __init__(self, dim: int, equations: Sequence[MultiPoly] = (), samples: Sequence[tuple] = ()):
        self.dim = dim
        self.equations = tuple(equations)
        self.samples = tuple(tuple(QQ(x) for x in s) for s in samples)
        for s in self.samples:
            if not self.contains(s):
                raise AlphabetError(f"sample {s} does not satisfy the defining equations")

    def contains(self, pt) -> bool:
        return len(pt) == self.dim and all(eq.eval(pt) == 0 for eq in self.equations)

    def index(self, pt):
        raise AlphabetError("points of a rational alphabet are not indexed")

    def is_full_space(self) -> bool:
        return not self.equations

    def fmt(self, pt) -> str:
        return ":".join(QQ.fmt(x) for x in pt)

    def parse(self, text: str):
        pt = tuple(QQ(x) for x in text.split(":"))
        if not self.contains(pt):
            raise AlphabetError(f"{text} is not a point of the alphabet")
        return pt

    def to_json(self, pt):
        return [QQ.fmt(x) for x in pt]

    def from_json(self, obj):
        return tuple(QQ(x) for x in obj)

    def describe(self) -> str:
        eqs = ", ".join(str(e) for e in self.equations) or "none"
        return f"affine variety in Q^{self.dim} (equations: {eqs})"

    def __eq__(self, other):
        return (isinstance(other, RationalAffineAlphabet) and other.dim == self.dim
                and other.equations == self.equations)

    def __hash__(self):
        return hash(("Q", self.dim, self.equations))


def enumerate_points(p: int, n: int, eqs: Sequence[MultiPoly] = (), cap: int = DEFAULT_ENUMERATION_CAP) -> VarietyAlphabet:
    F = PrimeField(p)
    if p ** n > cap:
        raise AlphabetError(f"{p}^{n} candidate points exceed the enumeration cap {cap}")
    names = coordinate_names(n)
    eqs = tuple(e if e.variables == names else e.rename(dict(zip(e.variables, names)), names) for e in eqs)
    pts = [pt for pt in itertools.product(range(p), repeat=n)
           if all(e.eval(pt) == 0 for e in eqs)]
    return VarietyAlphabet(F, n, eqs, pts)


def affine_line(p: int) -> VarietyAlphabet:
    return enumerate_points(p, 1)


def projective_line(p: int) -> TableAlphabet:
    """P^1(F_p) as a table alphabet; symbol ``"x:1"`` or ``"1:0"``."""
    return TableAlphabet([f"{x}:1" for x in range(p)] + ["1:0"])


def _normalize_projective(p: int, a: int, b: int) -> str:
    a, b = a % p, b % p
    if b:
        return f"{a * pow(b, -1, p) % p}:1"
    if a:
        return "1:0"
    raise RegularMapError("homogeneous body vanishes at a point of P^1")


class RegularMap:
    """Local rule A^k -> A given by n polynomial bodies or by an explicit table.

    Polynomial bodies use variables ``x<m>_<i>`` (memory position m, coordinate
    i).  Table bodies map tuples of points to points.
    """

    def __init__(self, alphabet, arity: int, body=None, table: Mapping | None = None,
                 provenance: str | None = None):
        self.alphabet = alphabet
        self.arity = arity
        if (body is None) == (table is None):
            raise RegularMapError("give exactly one of body or table")
        if body is not None:
            if alphabet.kind == "table":
                raise RegularMapError("table alphabets need table rules")
            body = tuple(body)
            if len(body) != alphabet.dim:
                raise RegularMapError(f"need {alphabet.dim} component polynomials, got {len(body)}")
            names = rule_variables(arity, alphabet.dim)
            for q in body:
                if q.variables != names:
                    raise RegularMapError(f"body variables {q.variables} do not match {names}")
                if q.field != alphabet.field:
                    raise RegularMapError("body coefficients live in the wrong field")
            self.body = body
            self.table = None
        else:
            if not alphabet.is_finite:
                raise RegularMapError("table rules need a finite alphabet")
            self.table = dict(table)
            self.body = None
        self.provenance = provenance or ("exhaustive" if alphabet.is_finite else "unverified")

    @property
    def is_polynomial(self):
        return self.body is not None

    def apply(self, inputs: Sequence):
        if len(inputs) != self.arity:
            raise RegularMapError(f"expected {self.arity} inputs, got {len(inputs)}")
        if self.table is not None:
            try:
                return self.table[tuple(inputs)]
            except KeyError:
                raise RegularMapError(f"table has no entry for {inputs!r}") from None
        flat = [x for pt in inputs for x in pt]
        return tuple(q.eval(flat) for q in self.body)

    @cached_property
    def codes(self) -> list:
        """Output index for every input, inputs coded in base |A| (position 0 most significant)."""
        A = self.alphabet
        out = []
        for combo in itertools.product(A.points, repeat=self.arity):
            out.append(A.index(self.apply(combo)))
        return out

    def describe_body(self) -> list[str]:
        if self.body is not None:
            return [str(q) for q in self.body]
        A = self.alphabet
        rows = []
        for combo in itertools.product(A.points, repeat=self.arity):
            rows.append(" ".join(A.fmt(x) for x in combo) + " -> " + A.fmt(self.table[combo]))
        return rows


def polynomial_rule(alphabet, arity: int, bodies: Sequence, verify: bool = True) -> RegularMap:
    """Build a polynomial rule from bodies given as MultiPoly or grammar strings."""
    from .parsing import parse_polynomial

    names = rule_variables(arity, alphabet.dim)
    polys = []
    for b in bodies:
        if isinstance(b, str):
            b = parse_polynomial(b, alphabet.field, names)
        polys.append(b)
    m = RegularMap(alphabet, arity, body=polys)
    return check_regular_map(m) if verify else m


def table_rule(alphabet, arity: int, fn, verify: bool = True) -> RegularMap:
    table = {combo: fn(*combo) for combo in itertools.product(alphabet.points, repeat=arity)}
    m = RegularMap(alphabet, arity, table=table)
    return check_regular_map(m) if verify else m


def projective_rule(p: int, arity: int, hx: MultiPoly, hy: MultiPoly) -> RegularMap:
    """Rule on P^1(F_p)^arity from homogeneous bodies in x<m>_0, x<m>_1, then normalized."""
    A = projective_line(p)
    coords = []
    for s in A.symbols:
        a, b = s.split(":")
        coords.append((int(a), int(b)))
    table = {}
    for combo in itertools.product(A.points, repeat=arity):
        flat = [c for pt in combo for c in coords[pt]]
        table[combo] = A.parse(_normalize_projective(p, hx.eval(flat), hy.eval(flat)))
    return RegularMap(A, arity, table=table)


def check_regular_map(m: RegularMap, sample_cap: int = 4096) -> RegularMap:
    """Verify that the rule sends valid inputs to points of the alphabet.

    Finite alphabets are checked exhaustively.  Rational alphabets are checked
    on tuples of declared sample points and flagged ``verified-on-samples``.
    """
    A = m.alphabet
    if A.is_finite:
        if m.table is not None:
            for combo in itertools.product(A.points, repeat=m.arity):
                if combo not in m.table:
                    raise RegularMapError(f"table rule undefined at {combo}", witness=combo)
                if not A.contains(m.table[combo]):
                    raise RegularMapError(f"table output {m.table[combo]!r} is not in the alphabet", witness=combo)
        else:
            for combo in itertools.product(A.points, repeat=m.arity):
                out = m.apply(combo)
                if not A.contains(out):
                    raise RegularMapError(
                        f"input {combo} maps to {out}, which violates the codomain equations",
                        witness=combo)
        m.provenance = "exhaustive"
        return m
    samples = A.samples
    if not samples and A.is_full_space():
        samples = ((QQ.zero,) * A.dim, (QQ.one,) * A.dim)
    checked = 0
    for combo in itertools.product(samples, repeat=m.arity):
        out = m.apply(combo)
        if not A.contains(out):
            raise RegularMapError(f"input {combo} maps to {out}, which violates the codomain equations",
                                  witness=combo)
        checked += 1
        if checked >= sample_cap:
            break
    m.provenance = "verified-on-samples"
    m.samples_checked = checked
    return m


def apply_map(m: RegularMap, inputs: Sequence):
    A = m.alphabet
    for x in inputs:
        if not A.contains(x):
            raise AlphabetError(f"{x!r} is not a point of the rule's alphabet")
    out = m.apply(inputs)
    if A.is_finite and not A.contains(out):
        raise RegularMapError(f"output {out!r} left the alphabet", witness=tuple(inputs))
    return out

