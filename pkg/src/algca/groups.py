"""Group universes, finite subsets, finite-index subgroups and coset spaces.

Two kinds of groups are supported: free abelian groups Z^d, whose elements
are integer tuples, and finite groups given by a multiplication table, whose
elements are indices into the element list.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence


class GroupError(ValueError):
    pass


@dataclass(frozen=True)
class FreeAbelian:
    rank: int

    def __post_init__(self):
        if self.rank < 1:
            raise GroupError("Z^d needs d >= 1")

    @property
    def identity(self):
        return (0,) * self.rank

    def check(self, g):
        if not (isinstance(g, tuple) and len(g) == self.rank and all(isinstance(x, int) for x in g)):
            raise GroupError(f"{g!r} is not an element of Z^{self.rank}")
        return g

    def mul(self, a, b):
        return tuple(x + y for x, y in zip(a, b))

    def inv(self, a):
        return tuple(-x for x in a)

    def sort_key(self, g):
        return g

    def fmt(self, g) -> str:
        return ",".join(str(x) for x in g)

    def __str__(self):
        return f"Z^{self.rank}" if self.rank > 1 else "Z"


@dataclass(frozen=True)
class FiniteGroup:
    """Group on ``range(len(names))`` with ``table[a][b] = a*b``."""

    names: tuple
    table: tuple

    def __post_init__(self):
        n = len(self.names)
        if len(set(self.names)) != n:
            raise GroupError("duplicate element names")
        if len(self.table) != n or any(len(row) != n for row in self.table):
            raise GroupError("multiplication table must be square of size |G|")
        for row in self.table:
            for x in row:
                if not 0 <= x < n:
                    raise GroupError("table entry out of range")
        e = self._find_identity()
        if e is None:
            raise GroupError("table has no two-sided identity")
        for a, b, c in itertools.product(range(n), repeat=3):
            if self.table[self.table[a][b]][c] != self.table[a][self.table[b][c]]:
                raise GroupError(f"table is not associative at {a},{b},{c}")
        for a in range(n):
            if e not in self.table[a]:
                raise GroupError(f"element {self.names[a]} has no inverse")

    def _find_identity(self):
        n = len(self.names)
        for e in range(n):
            if all(self.table[e][a] == a and self.table[a][e] == a for a in range(n)):
                return e
        return None

    @cached_property
    def identity(self):
        return self._find_identity()

    @cached_property
    def _inverses(self):
        return tuple(row.index(self.identity) for row in self.table)

    @property
    def order(self):
        return len(self.names)

    def check(self, g):
        if not (isinstance(g, int) and 0 <= g < len(self.names)):
            raise GroupError(f"{g!r} is not an element index")
        return g

    def mul(self, a, b):
        return self.table[a][b]

    def inv(self, a):
        return self._inverses[a]

    def sort_key(self, g):
        return g

    def fmt(self, g) -> str:
        return str(self.names[g])

    def index_of(self, name):
        return self.names.index(name)

    def __str__(self):
        return f"finite group of order {len(self.names)}"

    @classmethod
    def cyclic(cls, n: int):
        return cls(tuple(str(i) for i in range(n)),
                   tuple(tuple((a + b) % n for b in range(n)) for a in range(n)))

    @classmethod
    def symmetric(cls, n: int):
        perms = sorted(itertools.permutations(range(n)))
        index = {p: i for i, p in enumerate(perms)}
        # (a*b)(x) = a(b(x))
        table = tuple(tuple(index[tuple(a[b[x]] for x in range(n))] for b in perms) for a in perms)
        names = tuple("".join(map(str, p)) for p in perms)
        return cls(names, table)


def canonical(g_spec, elements: Iterable) -> tuple:
    """Ordered, duplicate-free finite subset."""
    return tuple(sorted(set(g_spec.check(e) for e in elements), key=g_spec.sort_key))


def product_set(s: Sequence, t: Sequence, g_spec) -> tuple:
    """{a*b : a in s, b in t}."""
    s = [g_spec.check(a) for a in s]
    t = [g_spec.check(b) for b in t]
    return canonical(g_spec, (g_spec.mul(a, b) for a in s for b in t))


def interior(omega: Sequence, m: Sequence, g_spec) -> tuple:
    """{g : gM ⊂ Ω} = ∩_{h∈M} Ω h⁻¹.

    For empty M the true answer is all of G; the result is then truncated
    to Ω, which is what every window computation needs.
    """
    m = [g_spec.check(h) for h in m]
    if not m:
        return canonical(g_spec, omega)
    omega_set = set(canonical(g_spec, omega))
    cands = {g_spec.mul(w, g_spec.inv(m[0])) for w in omega}
    return canonical(g_spec, (g for g in cands
                              if all(g_spec.mul(g, h) in omega_set for h in m)))


def box(lo: Sequence[int], hi: Sequence[int]) -> tuple:
    """All integer vectors with lo <= v <= hi coordinatewise, lexicographic."""
    return tuple(itertools.product(*(range(a, b + 1) for a, b in zip(lo, hi))))


def interval(a: int, b: int) -> tuple:
    return tuple((i,) for i in range(a, b + 1))


# -- Hermite normal form -----------------------------------------------

def hermite_normal_form(basis: Sequence[Sequence[int]]) -> tuple:
    """Column-style HNF of a nonsingular square integer matrix.

    The columns of the result generate the same lattice; the result is upper
    triangular with positive diagonal and 0 <= b[i][j] < b[i][i] for j > i.
    """
    d = len(basis)
    if d == 0 or any(len(row) != d for row in basis):
        raise GroupError("HNF needs a square d x d matrix")
    cols = [[int(basis[i][j]) for i in range(d)] for j in range(d)]
    for i in range(d - 1, -1, -1):
        # gather gcd of row i over columns 0..i into column i
        active = list(range(i + 1))
        while True:
            nz = [j for j in active if cols[j][i] != 0]
            if not nz:
                raise GroupError("matrix is singular")
            piv = min(nz, key=lambda j: abs(cols[j][i]))
            done = True
            for j in nz:
                if j == piv:
                    continue
                q = cols[j][i] // cols[piv][i]
                cols[j] = [a - q * b for a, b in zip(cols[j], cols[piv])]
                if cols[j][i] != 0:
                    done = False
            if done:
                break
        if piv != i:
            cols[piv], cols[i] = cols[i], cols[piv]
        if cols[i][i] < 0:
            cols[i] = [-a for a in cols[i]]
    for i in range(d - 1, -1, -1):
        for j in range(i + 1, d):
            q = cols[j][i] // cols[i][i]
            if q:
                cols[j] = [a - q * b for a, b in zip(cols[j], cols[i])]
    return tuple(tuple(cols[j][i] for j in range(d)) for i in range(d))


def _det(m) -> int:
    d = len(m)
    if d == 1:
        return m[0][0]
    return sum((-1) ** j * m[0][j] * _det([row[:j] + row[j + 1:] for row in m[1:]]) for j in range(d))


@dataclass(frozen=True)
class FiniteIndexSubgroup:
    """Either an HNF sublattice of Z^d (``hnf``) or a subgroup of a finite group (``elements``)."""

    group: object
    hnf: tuple | None = None
    elements: frozenset | None = None

    @property
    def index(self) -> int:
        if self.hnf is not None:
            return math.prod(self.hnf[i][i] for i in range(len(self.hnf)))
        return self.group.order // len(self.elements)

    def contains(self, g) -> bool:
        if self.hnf is not None:
            return all(x == 0 for x in _reduce_hnf(self.hnf, g))
        return g in self.elements

    def is_diagonal(self) -> bool:
        if self.hnf is None:
            return False
        return all(self.hnf[i][j] == 0 for i in range(len(self.hnf)) for j in range(len(self.hnf)) if i != j)

    def describe(self) -> str:
        if self.hnf is not None:
            if len(self.hnf) == 1:
                return f"{self.hnf[0][0]}Z"
            return "HNF" + str([list(r) for r in self.hnf])
        return "{" + ",".join(self.group.fmt(g) for g in sorted(self.elements)) + "}"

    def to_json(self):
        if self.hnf is not None:
            return {"hnf": [list(r) for r in self.hnf], "index": self.index}
        return {"elements": [self.group.fmt(g) for g in sorted(self.elements)], "index": self.index}


def sublattice(basis, g_spec: FreeAbelian) -> FiniteIndexSubgroup:
    hnf = hermite_normal_form(basis)
    if len(hnf) != g_spec.rank:
        raise GroupError("basis dimension does not match the group rank")
    return FiniteIndexSubgroup(g_spec, hnf=hnf)


def diagonal(k: int, g_spec: FreeAbelian) -> FiniteIndexSubgroup:
    if k < 1:
        raise GroupError(f"kZ^d has finite index only for k >= 1, got {k}")
    d = g_spec.rank
    return FiniteIndexSubgroup(g_spec, hnf=tuple(tuple(k if i == j else 0 for j in range(d)) for i in range(d)))


def _reduce_hnf(hnf, g):
    g = list(g)
    d = len(hnf)
    for i in range(d - 1, -1, -1):
        q = g[i] // hnf[i][i]
        if q:
            for r in range(i + 1):
                g[r] -= q * hnf[r][i]
    return tuple(g)


class CosetSpace:
    """Right cosets H\\G with ordered representatives; the identity's coset is index 0."""

    def __init__(self, subgroup: FiniteIndexSubgroup):
        self.subgroup = subgroup
        self.group = subgroup.group
        if subgroup.hnf is not None:
            hnf = subgroup.hnf
            self.representatives = box([0] * len(hnf), [hnf[i][i] - 1 for i in range(len(hnf))])
            self._radix = [hnf[i][i] for i in range(len(hnf))]
        else:
            G = self.group
            H = subgroup.elements
            seen = {}
            reps = []
            for g in sorted(range(G.order), key=lambda x: (x != G.identity, x)):
                if g in seen:
                    continue
                coset = {G.mul(h, g) for h in H}
                for x in coset:
                    seen[x] = len(reps)
                reps.append(g)
            self.representatives = tuple(reps)
            self._lookup = seen

    @property
    def index(self) -> int:
        return len(self.representatives)

    def reduce(self, g) -> int:
        if self.subgroup.hnf is not None:
            r = _reduce_hnf(self.subgroup.hnf, g)
            idx = 0
            for x, b in zip(r, self._radix):
                idx = idx * b + x
            return idx
        return self._lookup[g]

    @cached_property
    def centered_transversal(self) -> tuple:
        """One representative per coset, of least sup-norm (then lexicographic).

        For finite groups this is just ``representatives``.
        """
        if self.subgroup.hnf is None:
            return self.representatives
        best = [None] * self.index
        radius = 0
        d = self.group.rank
        while any(b is None for b in best):
            for v in box([-radius] * d, [radius] * d):
                if max(map(abs, v), default=0) != radius:
                    continue
                i = self.reduce(v)
                if best[i] is None:
                    best[i] = v
            radius += 1
        return tuple(best)

    def __repr__(self):
        return f"CosetSpace({self.subgroup.describe()}, index={self.index})"


def coset_space(h: FiniteIndexSubgroup) -> CosetSpace:
    return CosetSpace(h)


# -- subgroup enumeration ----------------------------------------------

def hnf_lattices_of_index(n: int, d: int):
    """Every HNF sublattice of Z^d with index n, diagonal ones first, then lexicographic."""
    out = []

    def diags(rem, k):
        if k == 1:
            yield (rem,)
            return
        for a in _divisors(rem):
            for rest in diags(rem // a, k - 1):
                yield (a,) + rest

    for dg in diags(n, d):
        slots = [(i, j) for i in range(d) for j in range(i + 1, d)]
        for vals in itertools.product(*(range(dg[i]) for i, _ in slots)):
            m = [[0] * d for _ in range(d)]
            for i in range(d):
                m[i][i] = dg[i]
            for (i, j), v in zip(slots, vals):
                m[i][j] = v
            out.append(tuple(tuple(r) for r in m))
    out.sort(key=lambda m: (any(m[i][j] for i in range(d) for j in range(d) if i != j), m))
    return out


def _divisors(n):
    return [a for a in range(1, n + 1) if n % a == 0]


def finite_subgroups(G: FiniteGroup) -> list[frozenset]:
    """All subgroups, by closing cyclic subgroups under adjoining elements."""
    def close(gens):
        S = {G.identity} | set(gens)
        frontier = list(S)
        while frontier:
            new = []
            for a in frontier:
                for b in list(S):
                    for c in (G.mul(a, b), G.mul(b, a)):
                        if c not in S:
                            S.add(c)
                            new.append(c)
            frontier = new
        return frozenset(S)

    found = {close([g]) for g in range(G.order)}
    frontier = list(found)
    while frontier:
        new = []
        for K in frontier:
            for g in range(G.order):
                if g not in K:
                    L = close(K | {g})
                    if L not in found:
                        found.add(L)
                        new.append(L)
        frontier = new
    return sorted(found, key=lambda K: (-len(K), sorted(K)))


def subgroup_schedule(g_spec, index_bound: int, diagonal_first: bool = True, max_diagonal: int | None = None):
    """Finite-index subgroups to scan, each with index <= index_bound.

    Z^d: diagonal lattices kZ^d (k = 1, 2, ...) first when ``diagonal_first``,
    then every other HNF lattice by increasing index.  Without
    ``diagonal_first`` the order is purely by index (diagonal first within an
    index).  Finite groups: subgroups by increasing index.
    """
    if isinstance(g_spec, FiniteGroup):
        for K in sorted(finite_subgroups(g_spec), key=lambda K: (-len(K), sorted(K))):
            if g_spec.order // len(K) <= index_bound:
                yield FiniteIndexSubgroup(g_spec, elements=K)
        return
    d = g_spec.rank
    seen = set()
    if diagonal_first:
        k = 1
        while k ** d <= index_bound and (max_diagonal is None or k <= max_diagonal):
            h = diagonal(k, g_spec)
            seen.add(h.hnf)
            yield h
            k += 1
    for n in range(1, index_bound + 1):
        for m in hnf_lattices_of_index(n, d):
            if m not in seen:
                seen.add(m)
                yield FiniteIndexSubgroup(g_spec, hnf=m)


def separating_subgroup(n: Sequence, g_spec, index_bound: int = 64) -> FiniteIndexSubgroup:
    """Smallest-index subgroup whose cosets Hg, g ∈ n, are pairwise distinct."""
    if not n:
        raise GroupError("need a nonempty subset")
    for h in subgroup_schedule(g_spec, index_bound, diagonal_first=False):
        cs = CosetSpace(h)
        if len({cs.reduce(g) for g in n}) == len(n):
            return h
    if isinstance(g_spec, FreeAbelian):
        spread = max(max(g[i] for g in n) - min(g[i] for g in n) for i in range(g_spec.rank))
        assert (spread + 1) ** g_spec.rank > index_bound, "separating lattice must exist within bound"
    raise GroupError(f"no separating subgroup of index <= {index_bound}")


def subgroup_basis_coordinates(basis_cols: Sequence[Sequence[int]], g) -> tuple | None:
    """Integer coordinates of g in the lattice spanned by independent columns, or None."""
    from fractions import Fraction
    from .fields import QQ
    from .linalg import solve_linear

    d = len(g)
    k = len(basis_cols)
    if k == 0:
        return () if all(x == 0 for x in g) else None
    A = [[basis_cols[j][i] for j in range(k)] for i in range(d)]
    sol = solve_linear(A, list(g), QQ)
    if sol is None or sol.kernel:
        if sol is not None and sol.kernel:
            raise GroupError("subgroup basis columns are linearly dependent")
        return None
    coords = sol.particular
    if any(Fraction(c).denominator != 1 for c in coords):
        return None
    return tuple(int(c) for c in coords)
