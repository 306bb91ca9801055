"""Inverse sequences of finite sets, window fibers and the closed-image probe.

Also hosts the reproductions of three counter-examples: a quadratic rule over
Q whose image is dense but misses the constant 1, a K[t]-linear rule that is
injective but not surjective, and the cubing map on the projective line.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

from .alphabets import RationalAffineAlphabet, affine_line, polynomial_rule, projective_line, projective_rule
from .ca import CAError, CellularAutomaton, WindowPattern, apply_window, make_ca
from .fields import QQ, PrimeField
from .groups import CosetSpace, FreeAbelian, box, canonical, interior, subgroup_schedule
from .linalg import solve_linear
from .poly import MultiPoly, UniPoly, rational_roots

FIBER_CAP = 10 ** 6


# -- inverse sequences -----------------------------------------------------

@dataclass
class FiniteInverseSequence:
    """Levels Z_0, Z_1, ... with maps ``maps[n]``: Z_{n+1} -> Z_n given as dicts."""

    levels: list
    maps: list

    def __post_init__(self):
        self.levels = [tuple(z) for z in self.levels]
        if len(self.maps) != max(len(self.levels) - 1, 0):
            raise ValueError("need one transition map between consecutive levels")
        for n, phi in enumerate(self.maps):
            for z in self.levels[n + 1]:
                if phi.get(z, _MISSING) not in self.levels[n] and self.levels[n + 1]:
                    raise ValueError(f"map {n + 1}->{n} does not send {z!r} into level {n}")

    @property
    def depth(self):
        return len(self.levels) - 1

    def phi(self, n: int, m: int, z):
        """Composite transition Z_m -> Z_n (n <= m)."""
        if n > m:
            raise ValueError("need n <= m")
        for k in range(m - 1, n - 1, -1):
            z = self.maps[k][z]
        return z

    def image(self, n: int, m: int) -> frozenset:
        s = set(self.levels[m])
        for k in range(m - 1, n - 1, -1):
            s = {self.maps[k][z] for z in s}
        return frozenset(s)


_MISSING = object()


def universal_elements(seq: FiniteInverseSequence, n: int, depth: int) -> frozenset:
    """Z'_n = intersection of phi_{nm}(Z_m) over n <= m <= n + depth."""
    if n + depth > seq.depth:
        raise ValueError(f"levels up to {n + depth} needed, only {seq.depth} available")
    out = frozenset(seq.levels[n])
    for m in range(n + 1, n + depth + 1):
        out &= seq.image(n, m)
    return out


def universal_chain(seq: FiniteInverseSequence, n: int, max_depth: int | None = None):
    """The sets Z'_n at depth 0..max_depth, and the first depth from which they stay constant.

    An equal consecutive pair does not by itself mean the chain has settled,
    so the settling depth is read off the whole computed chain.
    """
    max_depth = seq.depth - n if max_depth is None else max_depth
    chain = [universal_elements(seq, n, k) for k in range(max_depth + 1)]
    settled = max_depth
    while settled and chain[settled - 1] == chain[-1]:
        settled -= 1
    return chain, settled


@dataclass
class ThreadResult:
    status: str  # "thread" | "empty-at-stage"
    thread: tuple = ()
    stage: int | None = None

    def to_json(self, fmt=repr):
        out = {"status": self.status}
        if self.status == "thread":
            out["thread"] = [fmt(z) for z in self.thread]
        else:
            out["stage"] = self.stage
        return out


def limit_thread(seq: FiniteInverseSequence, horizon: int | None = None) -> ThreadResult:
    """A compatible thread (z_0, ..., z_N), built upward through universal elements."""
    N = seq.depth if horizon is None else horizon
    for k in range(N + 1):
        if not seq.levels[k]:
            return ThreadResult("empty-at-stage", stage=k)
    universal = [seq.image(n, N) for n in range(N + 1)]
    # each phi restricted to universal[n+1] maps onto universal[n]
    thread = [min(universal[0], key=_order_key)]
    for n in range(N):
        above = [z for z in universal[n + 1] if seq.maps[n][z] == thread[-1]]
        thread.append(min(above, key=_order_key))
    return ThreadResult("thread", tuple(thread))


def _order_key(z):
    return repr(z)


def verify_thread(seq: FiniteInverseSequence, thread: Sequence) -> bool:
    return (all(z in seq.levels[n] for n, z in enumerate(thread))
            and all(seq.maps[n][thread[n + 1]] == thread[n] for n in range(len(thread) - 1)))


def random_sequence(rng, depth: int, max_size: int = 6) -> FiniteInverseSequence:
    """Random inverse sequence with nonempty levels of size <= max_size."""
    levels = [tuple(range(rng.randint(1, max_size))) for _ in range(depth + 1)]
    maps = [{z: rng.choice(levels[n]) for z in levels[n + 1]} for n in range(depth)]
    return FiniteInverseSequence(levels, maps)


# -- window fibers ------------------------------------------------------------

def window_fibers(ca: CellularAutomaton, target: WindowPattern, window: Sequence,
                  cap: int = FIBER_CAP) -> list[tuple]:
    """All u in A^Ω (values in canonical order of Ω) with tau_Ω(u) = target on the target cells.

    The target may cover any part of Ω′; cells of Ω′ outside it are free.
    Enumeration backtracks cell by cell, checking each target cell as soon
    as its neighbourhood gM is fully assigned.
    """
    A = ca.alphabet
    if not A.is_finite:
        raise CAError("fiber enumeration needs a finite alphabet")
    G = ca.group
    window = canonical(G, window)
    inner = set(interior(window, ca.memory, G))
    for g in target.window:
        if g not in inner:
            raise CAError(f"target cell {G.fmt(g)} is not in the interior of the window")
    pos = {g: i for i, g in enumerate(window)}
    checks = [[] for _ in window]
    for g, want in zip(target.window, target.values):
        if not ca.memory:
            if ca.local(()) != want:
                return []
            continue
        cells = [pos[G.mul(g, h)] for h in ca.memory]
        checks[max(cells)].append((cells, want))
    out = []
    values = [None] * len(window)
    pts = A.points

    def extend(i):
        if i == len(window):
            out.append(tuple(values))
            if len(out) > cap:
                raise CAError(f"fiber exceeds the enumeration cap {cap}")
            return
        for x in pts:
            values[i] = x
            if all(ca.local(tuple(values[c] for c in cells)) == want for cells, want in checks[i]):
                extend(i + 1)
        values[i] = None

    extend(0)
    return out


def default_windows(group, horizon: int):
    """Ω_n = [-n, n]^d for n = 0..horizon; a finite group is its own single window."""
    if not isinstance(group, FreeAbelian):
        return [tuple(range(group.order))]
    d = group.rank
    return [box([-n] * d, [n] * d) for n in range(horizon + 1)]


@dataclass
class WindowSystem:
    ca: CellularAutomaton
    target: Callable
    windows: list

    def target_on(self, n):
        inner = interior(self.windows[n], self.ca.memory, self.ca.group)
        return WindowPattern(inner, tuple(self.target(g) for g in inner))

    def fiber(self, n, cap=FIBER_CAP):
        return window_fibers(self.ca, self.target_on(n), self.windows[n], cap)

    def inverse_sequence(self, horizon=None, cap=FIBER_CAP):
        """Fibers as a FiniteInverseSequence; stops early at the first empty fiber."""
        horizon = len(self.windows) - 1 if horizon is None else horizon
        levels = []
        for n in range(horizon + 1):
            levels.append(self.fiber(n, cap))
            if not levels[-1]:
                break
        maps = []
        for n in range(len(levels) - 1):
            small, big = self.windows[n], self.windows[n + 1]
            where = [big.index(g) for g in small]
            maps.append({u: tuple(u[i] for i in where) for u in levels[n + 1]})
        return FiniteInverseSequence(levels, maps)


@dataclass
class ProbeResult:
    status: str  # "preimage-found" | "empty-at-stage" | "undetermined"
    stage: int | None = None
    window: tuple = ()
    target: WindowPattern | None = None
    preimage: object = None  # PeriodicConfiguration
    thread_length: int = 0
    fiber_sizes: list = field(default_factory=list)
    alphabet: object = None
    group: object = None

    def to_json(self):
        out = {"status": self.status, "fiber_sizes": self.fiber_sizes}
        A, G = self.alphabet, self.group
        if self.status == "empty-at-stage":
            out["stage"] = self.stage
            out["window"] = [G.fmt(g) for g in self.window]
            out["target"] = {G.fmt(g): A.to_json(v) for g, v in zip(self.target.window, self.target.values)}
            out["mode"] = "exhaustive"
        elif self.status == "preimage-found":
            p = self.preimage
            out["preimage"] = {"subgroup": p.cosets.subgroup.to_json(),
                               "representatives": [G.fmt(r) for r in p.cosets.representatives],
                               "values": [A.to_json(v) for v in p.values]}
            out["mode"] = "exhaustive"
        else:
            out["thread_length"] = self.thread_length
            out["mode"] = "inconclusive at bound"
        return out


def closed_image_probe(ca: CellularAutomaton, d, horizon: int = 6, windows=None,
                       preimage_index_bound: int = 16, cap: int = FIBER_CAP) -> ProbeResult:
    """Is the H-periodic configuration ``d`` (a PeriodicConfiguration) in the closure of the image?

    Fibers Z_n over Ω_n are computed in turn; an empty one proves d is not
    in the closure.  If all are nonempty, a compatible thread is built and
    a periodic preimage is searched for among sublattices of d's period.
    """
    from .periodic import PeriodicConfiguration, _tau_on_fix, build_tilde

    A, G = ca.alphabet, ca.group
    windows = windows or default_windows(G, horizon)
    system = WindowSystem(ca, d, windows)
    seq = system.inverse_sequence(cap=cap)
    sizes = [len(z) for z in seq.levels]
    base = dict(alphabet=A, group=G, fiber_sizes=sizes)
    thread = limit_thread(seq)
    if thread.status == "empty-at-stage":
        n = thread.stage
        return ProbeResult("empty-at-stage", stage=n, window=tuple(windows[n]), target=system.target_on(n), **base)
    assert verify_thread(seq, thread.thread)
    if isinstance(d, PeriodicConfiguration):
        H = d.cosets.subgroup
        for K in subgroup_schedule(G, preimage_index_bound):
            if K.hnf is not None and not all(H.contains(col) for col in zip(*K.hnf)):
                continue
            if K.hnf is None and not K.elements <= H.elements:
                continue
            cs = CosetSpace(K)
            if A.size ** cs.index > cap:
                continue
            want = tuple(d(r) for r in cs.representatives)
            tilde = build_tilde(ca, cs)
            want_code = tilde._encode(tuple(A.index(x) for x in want))
            for code, out in enumerate(tilde.table):
                if out == want_code:
                    z = tilde.decode_points(code)
                    if _tau_on_fix(ca, cs, z) != want:
                        raise AssertionError("periodic preimage failed re-verification")
                    return ProbeResult("preimage-found", preimage=PeriodicConfiguration(cs, z), **base)
    return ProbeResult("undetermined", thread_length=len(thread.thread), **base)


# -- counter-example reproductions ----------------------------------------------

def quadratic_rule(alphabet):
    """c(n) -> c(n+1) - c(n)^2 on memory {0, 1}."""
    G = FreeAbelian(1)
    return make_ca(G, [(0,), (1,)], polynomial_rule(alphabet, 2, ["x1_0 - x0_0^2"]))


def quadratic_example_probe(L: int = 10, max_window: int = 64) -> dict:
    """Target d = 1 everywhere over Q.

    The sequence c(0) = 0, c(n+1) = 1 + c(n)^2 satisfies the rule on every
    window [0, l], so each fiber is nonempty and d lies in the closure of the
    image; but a constant preimage t would need t^2 - t + 1 = 0, which has no
    rational root.  Over F_5 the same rule is right-permutive, hence onto.
    """
    if not 1 <= L <= max_window:
        raise ValueError(f"window length must be in [1, {max_window}]")
    from .decide import decide_1d

    ca = quadratic_rule(RationalAffineAlphabet(1))
    c = [Fraction(0)]
    for _ in range(L):
        c.append(1 + c[-1] ** 2)
    windows = []
    for ell in range(1, L + 1):
        u = WindowPattern(tuple((n,) for n in range(ell + 1)), tuple((x,) for x in c[:ell + 1]))
        out = apply_window(ca, u)
        ok = out.window == tuple((n,) for n in range(ell)) and all(v == (1,) for v in out.values)
        windows.append({"window": [0, ell], "fiber_nonempty": ok})
    roots = rational_roots(UniPoly([1, -1, 1], QQ))
    f5 = quadratic_rule(affine_line(5))
    dec = decide_1d(f5)
    return {
        "example": "quadratic",
        "rule": "x1_0 - x0_0^2",
        "target": "d = 1",
        "witness_prefix": [QQ.fmt(x) for x in c],
        "windows": windows,
        "all_fibers_nonempty": all(w["fiber_nonempty"] for w in windows),
        "constant_preimage_polynomial": "t^2 - t + 1",
        "constant_preimage_rational_roots": sorted(QQ.fmt(r) for r in roots),
        "f5_right_permutive": _right_permutive(f5),
        "f5_verdict": "surjective" if dec.surjective else "not surjective",
        "mode": f"exact up to window [0, {L}]; larger windows not checked",
    }


def _right_permutive(ca) -> bool:
    """Rule bijective in its last memory coordinate for every fixed prefix."""
    A = ca.alphabet
    k = len(ca.memory)
    for prefix in itertools.product(A.points, repeat=k - 1):
        if len({ca.local(prefix + (x,)) for x in A.points}) != A.size:
            return False
    return True


def kt_system(D: int, target: int):
    """Linear system for c(n) - t c(n+1) = target, n = 0..D+1, with deg c(n) <= D.

    Unknowns are the coefficients c(n)[j], n = 0..D+2, j = 0..D; one equation
    per power t^0..t^{D+1} per n.
    """
    ncells = D + 3
    def col(n, j):
        return n * (D + 1) + j
    ncols = ncells * (D + 1)
    rows, rhs = [], []
    for n in range(D + 2):
        for e in range(D + 2):
            row = [Fraction(0)] * ncols
            if e <= D:
                row[col(n, e)] += 1
            if e >= 1:
                row[col(n + 1, e - 1)] -= 1
            rows.append(row)
            rhs.append(Fraction(target if e == 0 else 0))
    return rows, rhs, ncols


def kt_example_probe(D: int = 10, max_degree: int = 64) -> dict:
    """tau(c)(n) = c(n) - t c(n+1) over K[t], K = Q, truncated to degree <= D on cells [0, D+2].

    For d = 1 the truncated system is inconsistent at every degree bound
    (no preimage of bounded degree); for d = 0 only c = 0 solves it.
    """
    if not 0 <= D <= max_degree:
        raise ValueError(f"degree bound must be in [0, {max_degree}]")
    per_degree = []
    for deg in range(D + 1):
        rows, rhs, ncols = kt_system(deg, 1)
        sol1 = solve_linear(rows, rhs, QQ, ncols=ncols)
        rows0, rhs0, _ = kt_system(deg, 0)
        sol0 = solve_linear(rows0, rhs0, QQ, ncols=ncols)
        per_degree.append({
            "degree": deg,
            "window": [0, deg + 2],
            "unknowns": ncols,
            "d_one_consistent": sol1 is not None,
            "kernel_dimension": len(sol0.kernel),
            "d_zero_solution_is_zero": all(x == 0 for x in sol0.particular),
        })
    return {
        "example": "kt",
        "rule": "c(n) - t*c(n+1)",
        "degrees": per_degree,
        "inconsistent_for_all": not any(r["d_one_consistent"] for r in per_degree),
        "kernel_zero_for_all": all(r["kernel_dimension"] == 0 for r in per_degree),
        "mode": f"exact up to degree {D}",
    }


def cubing_example_probe(primes: Sequence[int] = (5, 7)) -> dict:
    """(x:y) -> (x^3:y^3) on the projective line.

    Over Q the point (2:1) has no preimage since t^3 - 2 has no rational
    root.  Over F_p the map permutes P^1(F_p) iff gcd(3, p - 1) = 1, and the
    CA with memory {0} is bijective or neither injective nor surjective accordingly.
    """
    from .decide import decide_1d

    roots = rational_roots(UniPoly([-2, 0, 0, 1], QQ))
    # (a:b) with b != 0 maps to (2:1) iff (a/b)^3 = 2; (1:0) maps to itself
    out = {"example": "cubing", "rational_roots_of_t3_minus_2": sorted(QQ.fmt(r) for r in roots),
           "q_point_2_1_in_image": bool(roots), "finite_fields": []}
    for p in primes:
        F = PrimeField(p)
        names = ("x0_0", "x0_1")
        hx = MultiPoly.var(F, names, "x0_0") ** 3
        hy = MultiPoly.var(F, names, "x0_1") ** 3
        rule = projective_rule(p, 1, hx, hy)
        ca = make_ca(FreeAbelian(1), [(0,)], rule)
        dec = decide_1d(ca)
        out["finite_fields"].append({"p": p, "alphabet_size": projective_line(p).size,
                                     "injective": dec.injective, "surjective": dec.surjective})
    return out
