"""Sparse multivariate polynomials and dense univariate polynomials over an exact field."""

from __future__ import annotations

import itertools
import math
from fractions import Fraction
from typing import Mapping, Sequence

from .fields import QQ, PrimeField


def _grlex_key(exps):
    return (sum(exps), exps)


class MultiPoly:
    """Polynomial in a fixed, ordered list of named variables.

    ``terms`` maps exponent tuples to nonzero coefficients.  Arithmetic
    between two polynomials requires the same field and variable list.
    """

    __slots__ = ("field", "variables", "terms", "_hash")

    def __init__(self, field, variables: Sequence[str], terms: Mapping[tuple, object] | None = None):
        self.field = field
        self.variables = tuple(variables)
        clean = {}
        n = len(self.variables)
        for exps, c in (terms or {}).items():
            exps = tuple(exps)
            if len(exps) != n:
                raise ValueError(f"exponent vector {exps} does not match {n} variables")
            c = field(c)
            if c != field.zero:
                clean[exps] = c
        self.terms = clean
        self._hash = None

    # -- constructors --------------------------------------------------

    @classmethod
    def constant(cls, field, variables, value):
        return cls(field, variables, {(0,) * len(tuple(variables)): value})

    @classmethod
    def var(cls, field, variables, name):
        variables = tuple(variables)
        i = variables.index(name)
        exps = [0] * len(variables)
        exps[i] = 1
        return cls(field, variables, {tuple(exps): field.one})

    def _new(self, terms):
        p = MultiPoly.__new__(MultiPoly)
        p.field = self.field
        p.variables = self.variables
        p.terms = terms
        p._hash = None
        return p

    def _coerce(self, other):
        if isinstance(other, MultiPoly):
            if other.field != self.field or other.variables != self.variables:
                raise ValueError("polynomials over different rings")
            return other
        return MultiPoly.constant(self.field, self.variables, other)

    # -- arithmetic ----------------------------------------------------

    def __add__(self, other):
        other = self._coerce(other)
        F = self.field
        out = dict(self.terms)
        for e, c in other.terms.items():
            s = F.add(out.get(e, F.zero), c)
            if s == F.zero:
                out.pop(e, None)
            else:
                out[e] = s
        return self._new(out)

    __radd__ = __add__

    def __neg__(self):
        F = self.field
        return self._new({e: F.neg(c) for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        other = self._coerce(other)
        F = self.field
        out = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                s = F.add(out.get(e, F.zero), F.mul(c1, c2))
                if s == F.zero:
                    out.pop(e, None)
                else:
                    out[e] = s
        return self._new(out)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative exponent")
        result = MultiPoly.constant(self.field, self.variables, self.field.one)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def __eq__(self, other):
        if not isinstance(other, MultiPoly):
            if self.is_constant():
                return self.constant_value() == other
            return NotImplemented
        return (self.field == other.field and self.variables == other.variables
                and self.terms == other.terms)

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.field, self.variables, frozenset(self.terms.items())))
        return self._hash

    # -- queries -------------------------------------------------------

    def is_zero(self):
        return not self.terms

    def is_constant(self):
        return all(not any(e) for e in self.terms)

    def constant_value(self):
        return self.terms.get((0,) * len(self.variables), self.field.zero)

    def total_degree(self) -> int:
        return max((sum(e) for e in self.terms), default=-1)

    def used_variables(self) -> set[str]:
        used = set()
        for e in self.terms:
            for name, k in zip(self.variables, e):
                if k:
                    used.add(name)
        return used

    def sorted_terms(self):
        """Terms in descending graded-lex order."""
        return sorted(self.terms.items(), key=lambda t: _grlex_key(t[0]), reverse=True)

    # -- evaluation / substitution -------------------------------------

    def eval(self, point: Sequence):
        if len(point) != len(self.variables):
            raise ValueError(f"expected {len(self.variables)} values, got {len(point)}")
        F = self.field
        total = F.zero
        for exps, c in self.terms.items():
            t = c
            for x, k in zip(point, exps):
                if k:
                    t = F.mul(t, F.pow(x, k))
            total = F.add(total, t)
        return total

    def substitute(self, assignment: Mapping[str, "MultiPoly"]) -> "MultiPoly":
        """Replace every variable by a polynomial; all images share one ring."""
        missing = [v for v in self.variables if v not in assignment]
        if missing:
            raise KeyError(f"no assignment for {missing}")
        images = [assignment[v] for v in self.variables]
        if not images:
            # nullary polynomial: only a constant survives
            raise ValueError("cannot infer target ring from an empty assignment")
        target = images[0]
        for q in images[1:]:
            target._coerce(q)
        cache: dict[tuple[int, int], MultiPoly] = {}

        def power(i, k):
            key = (i, k)
            if key not in cache:
                cache[key] = images[i] if k == 1 else power(i, k - 1) * images[i]
            return cache[key]

        one = MultiPoly.constant(target.field, target.variables, target.field.one)
        out = MultiPoly(target.field, target.variables)
        for exps, c in self.terms.items():
            t = one * c
            for i, k in enumerate(exps):
                if k:
                    t = t * power(i, k)
            out = out + t
        return out

    def rename(self, mapping: Mapping[str, str], variables: Sequence[str]) -> "MultiPoly":
        """Move to a new variable list; ``mapping`` sends old names to new ones."""
        variables = tuple(variables)
        idx = [variables.index(mapping[v]) for v in self.variables]
        F = self.field
        out = {}
        for exps, c in self.terms.items():
            new = [0] * len(variables)
            for i, k in zip(idx, exps):
                new[i] += k
            new = tuple(new)
            s = F.add(out.get(new, F.zero), c)
            if s == F.zero:
                out.pop(new, None)
            else:
                out[new] = s
        return MultiPoly(F, variables, out)

    def reduce_frobenius(self) -> "MultiPoly":
        """Over F_p, replace x^e by x^((e-1) mod (p-1) + 1); same function on F_p^n."""
        if not isinstance(self.field, PrimeField):
            return self
        p = self.field.p
        F = self.field
        out = {}
        for exps, c in self.terms.items():
            e = tuple(0 if k == 0 else (k - 1) % (p - 1) + 1 for k in exps)
            s = F.add(out.get(e, F.zero), c)
            if s == F.zero:
                out.pop(e, None)
            else:
                out[e] = s
        return self._new(out)

    # -- printing ------------------------------------------------------

    def __str__(self):
        if not self.terms:
            return "0"
        F = self.field
        parts = []
        for exps, c in self.sorted_terms():
            mono = "*".join(
                name if k == 1 else f"{name}^{k}"
                for name, k in zip(self.variables, exps) if k
            )
            neg = False
            if F is QQ or not isinstance(F, PrimeField):
                if c < 0:
                    neg, c = True, -c
            cs = F.fmt(c)
            if mono and cs == "1":
                body = mono
            elif mono:
                body = f"{cs}*{mono}"
            else:
                body = cs
            parts.append(("-" if neg else "+", body))
        sign, first = parts[0]
        s = ("-" if sign == "-" else "") + first
        for sign, body in parts[1:]:
            s += f" {sign} {body}"
        return s

    def __repr__(self):
        return f"MultiPoly({self})"


def monomials(nvars: int, max_degree: int):
    """All exponent vectors of total degree <= max_degree, graded-lex ascending."""
    out = []
    for deg in range(max_degree + 1):
        for combo in itertools.combinations_with_replacement(range(nvars), deg):
            e = [0] * nvars
            for i in combo:
                e[i] += 1
            out.append(tuple(e))
    return sorted(set(out), key=_grlex_key)


# -- interpolation over prime fields -----------------------------------

def _delta_coefficients(F: PrimeField):
    """Row a holds the coefficients of 1 - (x - a)^(p-1), the indicator of a."""
    p = F.p
    rows = []
    for a in range(p):
        coeffs = [0] * p
        for j in range(p):
            # (x - a)^(p-1) = sum_j C(p-1, j) x^j (-a)^(p-1-j)
            coeffs[j] = -math.comb(p - 1, j) * pow(-a, p - 1 - j, p) % p
        coeffs[0] = (coeffs[0] + 1) % p
        rows.append(coeffs)
    return rows


def interpolate(table: Mapping[tuple, int], F: PrimeField, variables: Sequence[str]) -> MultiPoly:
    """The unique polynomial with per-variable degree < p matching ``table`` on F_p^k."""
    variables = tuple(variables)
    k = len(variables)
    p = F.p
    size = p ** k
    if len(table) != size:
        raise ValueError(f"table has {len(table)} entries, need all {size} points of F{p}^{k}")
    vals = []
    for pt in itertools.product(range(p), repeat=k):
        if pt not in table:
            raise ValueError(f"table is missing the point {pt}")
        vals.append(F(table[pt]))
    L = _delta_coefficients(F)
    # axis-by-axis change of basis from point values to monomial coefficients
    for axis in range(k):
        stride = p ** (k - 1 - axis)
        new = [0] * size
        for base in range(size):
            if (base // stride) % p:
                continue
            column = [vals[base + a * stride] for a in range(p)]
            for j in range(p):
                s = 0
                for a in range(p):
                    if column[a]:
                        s += column[a] * L[a][j]
                new[base + j * stride] = s % p
        vals = new
    terms = {}
    for idx, exps in enumerate(itertools.product(range(p), repeat=k)):
        if vals[idx]:
            terms[exps] = vals[idx]
    return MultiPoly(F, variables, terms)


# -- univariate --------------------------------------------------------

class UniPoly:
    """Dense univariate polynomial; ``coeffs[i]`` is the coefficient of t^i."""

    def __init__(self, coeffs: Sequence, field=QQ):
        self.field = field
        cs = [field(c) for c in coeffs]
        while cs and cs[-1] == field.zero:
            cs.pop()
        self.coeffs = cs

    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self):
        return not self.coeffs

    def __call__(self, x):
        F = self.field
        acc = F.zero
        for c in reversed(self.coeffs):
            acc = F.add(F.mul(acc, x), c)
        return acc

    def __add__(self, other):
        n = max(len(self.coeffs), len(other.coeffs))
        a = self.coeffs + [self.field.zero] * (n - len(self.coeffs))
        b = other.coeffs + [self.field.zero] * (n - len(other.coeffs))
        return UniPoly([self.field.add(x, y) for x, y in zip(a, b)], self.field)

    def __mul__(self, other):
        if not self.coeffs or not other.coeffs:
            return UniPoly([], self.field)
        F = self.field
        out = [F.zero] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            for j, b in enumerate(other.coeffs):
                out[i + j] = F.add(out[i + j], F.mul(a, b))
        return UniPoly(out, F)

    def __eq__(self, other):
        return isinstance(other, UniPoly) and self.field == other.field and self.coeffs == other.coeffs

    def __repr__(self):
        return f"UniPoly({self.coeffs!r})"


def _divisors(n: int) -> list[int]:
    n = abs(n)
    small, large = [], []
    d = 1
    while d * d <= n:
        if n % d == 0:
            small.append(d)
            if d * d != n:
                large.append(n // d)
        d += 1
    return small + large[::-1]


def rational_roots(p: UniPoly) -> set[Fraction]:
    """All rational roots, by the rational root theorem on the integer-cleared polynomial."""
    if p.is_zero():
        raise ValueError("the zero polynomial has every number as a root")
    coeffs = [Fraction(c) for c in p.coeffs]
    lcm = 1
    for c in coeffs:
        lcm = lcm * c.denominator // math.gcd(lcm, c.denominator)
    ints = [int(c * lcm) for c in coeffs]
    roots = set()
    # factor out t^k
    k = 0
    while ints[k] == 0:
        k += 1
    if k:
        roots.add(Fraction(0))
    ints = ints[k:]
    if len(ints) == 1:
        return roots
    q = UniPoly(ints)
    for num in _divisors(ints[0]):
        for den in _divisors(ints[-1]):
            for cand in (Fraction(num, den), Fraction(-num, den)):
                if q(cand) == 0:
                    roots.add(cand)
    return roots
