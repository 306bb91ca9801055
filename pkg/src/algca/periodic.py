"""Periodic configurations, the finite conjugate tau~_H, scans and inverse synthesis.

For a finite-index subgroup H, Fix(H) is identified with A^{H\\G} through
rho_H(z) = z ∘ pi_H.  The map tau~_H on A^{H\\G} sends z to the vector whose
coset-gamma coordinate is rule((z(gamma*h))_{h in M}); it is conjugate to tau
restricted to Fix(H).
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

from .alphabets import RegularMap, rule_variables, var_name
from .ca import (CAError, CellularAutomaton, WindowPattern, apply_window, compose,
                 is_projection, make_ca, minimal_memory)
from .groups import CosetSpace, FreeAbelian, box, canonical, product_set, subgroup_schedule
from .linalg import solve_linear
from .poly import MultiPoly, interpolate, monomials

log = logging.getLogger(__name__)

DEFAULT_INDEX_BOUND = 32
DEFAULT_MAX_DIAGONAL = 8
ENUMERATION_CAP = 10 ** 6


def default_schedule(group, index_bound: int = DEFAULT_INDEX_BOUND):
    """kZ^d for k = 1..8, then HNF lattices by index, all with index <= index_bound."""
    return list(subgroup_schedule(group, index_bound, diagonal_first=True, max_diagonal=DEFAULT_MAX_DIAGONAL))


@dataclass(frozen=True)
class PeriodicConfiguration:
    cosets: CosetSpace
    values: tuple

    def __call__(self, g):
        return self.values[self.cosets.reduce(g)]

    def pattern(self, window) -> WindowPattern:
        return WindowPattern(tuple(window), tuple(self(g) for g in window))


def rho(cosets: CosetSpace, z: Sequence) -> PeriodicConfiguration:
    if len(z) != cosets.index:
        raise ValueError(f"need {cosets.index} values, one per coset, got {len(z)}")
    return PeriodicConfiguration(cosets, tuple(z))


def rho_inverse(cosets: CosetSpace, config) -> tuple:
    """Read an H-fixed configuration back on the coset representatives."""
    return tuple(config(r) for r in cosets.representatives)


class FiniteShiftMap:
    """tau~_H.  ``deps[gamma]`` lists the coset of gamma*h for each h in M."""

    def __init__(self, ca: CellularAutomaton, cosets: CosetSpace):
        if cosets.group != ca.group:
            raise CAError("coset space of a different group")
        self.ca = ca
        self.cosets = cosets
        G = ca.group
        self.deps = tuple(tuple(cosets.reduce(G.mul(r, h)) for h in ca.memory)
                          for r in cosets.representatives)
        self._table_override = None

    @property
    def index(self):
        return self.cosets.index

    def apply(self, z: Sequence) -> tuple:
        if self._table_override is not None:
            A = self.ca.alphabet
            code = self._encode(tuple(A.index(x) for x in z))
            return tuple(A.points[i] for i in self._decode(self._table_override[code]))
        return tuple(self.ca.local(tuple(z[j] for j in dep)) for dep in self.deps)

    def _encode(self, idx):
        q = self.ca.alphabet.size
        c = 0
        for i in idx:
            c = c * q + i
        return c

    def _decode(self, code):
        q = self.ca.alphabet.size
        out = [0] * self.index
        for i in range(self.index - 1, -1, -1):
            out[i] = code % q
            code //= q
        return out

    @cached_property
    def table(self) -> list:
        """Output code for every input code (finite alphabets only)."""
        if self._table_override is not None:
            return self._table_override
        A = self.ca.alphabet
        if not A.is_finite:
            raise CAError("tau~_H can only be tabulated over a finite alphabet")
        q, k = A.size, self.index
        if q ** k > ENUMERATION_CAP:
            raise CAError(f"{q}^{k} configurations exceed the enumeration cap")
        codes = self.ca.rule.codes
        deps = self.deps
        out = []
        for z in itertools.product(range(q), repeat=k):
            c = 0
            for dep in deps:
                lc = 0
                for j in dep:
                    lc = lc * q + z[j]
                c = c * q + codes[lc]
            out.append(c)
        return out

    def with_table(self, table) -> "FiniteShiftMap":
        """Copy whose action is given by an explicit code table (fault injection)."""
        other = FiniteShiftMap(self.ca, self.cosets)
        other._table_override = list(table)
        return other

    def polynomials(self) -> list[MultiPoly]:
        """tau~_H as a polynomial self-map; coset gamma's coordinate i is ``x<gamma>_<i>``."""
        A = self.ca.alphabet
        if self.ca.rule.body is None:
            raise CAError("table rules have no polynomial form")
        n, F = A.dim, A.field
        names = rule_variables(self.index, n)
        out = []
        for dep in self.deps:
            assign = {var_name(m, i): MultiPoly.var(F, names, var_name(j, i))
                      for m, j in enumerate(dep) for i in range(n)}
            for q in self.ca.rule.body:
                out.append(q.substitute(assign) if q.variables
                           else MultiPoly.constant(F, names, q.constant_value()))
        return out

    def decode_points(self, code) -> tuple:
        A = self.ca.alphabet
        return tuple(A.points[i] for i in self._decode(code))


def build_tilde(ca: CellularAutomaton, cosets: CosetSpace) -> FiniteShiftMap:
    return FiniteShiftMap(ca, cosets)


def _tau_on_fix(ca: CellularAutomaton, cosets: CosetSpace, z) -> tuple:
    """rho⁻¹(tau(rho(z))), with tau evaluated by window application on R·M."""
    config = rho(cosets, z)
    window = product_set(cosets.representatives, ca.memory, ca.group) if ca.memory else cosets.representatives
    window = tuple(sorted(set(window) | set(cosets.representatives), key=ca.group.sort_key))
    out = apply_window(ca, config.pattern(window))
    return tuple(out[r] for r in cosets.representatives)


def conjugation_check(ca: CellularAutomaton, cosets: CosetSpace, tilde: FiniteShiftMap | None = None,
                      samples: Sequence | None = None):
    """(True, None) iff tau~_H = rho⁻¹ ∘ tau|Fix(H) ∘ rho on every tested z; else (False, z)."""
    tilde = tilde or build_tilde(ca, cosets)
    A = ca.alphabet
    if samples is None:
        if not A.is_finite:
            raise CAError("give sample points for an infinite alphabet")
        samples = itertools.product(A.points, repeat=cosets.index)
    for z in samples:
        z = tuple(z)
        if tilde.apply(z) != _tau_on_fix(ca, cosets, z):
            return False, z
    return True, None


# -- scans ------------------------------------------------------------------

@dataclass
class ScanResult:
    kind: str  # "injectivity" | "surjectivity"
    verdict: str
    conclusive: bool
    certificate: dict | None = None
    checked: list = field(default_factory=list)
    skipped: list = field(default_factory=list)
    notes: list = field(default_factory=list)
    cross_check: dict | None = None

    def to_json(self):
        out = {"kind": self.kind, "verdict": self.verdict,
               "mode": "exhaustive" if self.conclusive else "inconclusive at bound",
               "checked_subgroups": self.checked, "skipped_subgroups": self.skipped}
        if self.certificate:
            out["certificate"] = self.certificate
        if self.notes:
            out["notes"] = self.notes
        if self.cross_check is not None:
            out["decide_1d"] = self.cross_check
        return out


def _fmt_z(A, z):
    return [A.to_json(x) for x in z]


def verify_periodic_collision(ca, cosets, z1, z2) -> bool:
    return tuple(z1) != tuple(z2) and _tau_on_fix(ca, cosets, z1) == _tau_on_fix(ca, cosets, z2)


def _covers_group(H) -> bool:
    """H is the trivial subgroup of a finite group, so tau~_H is tau itself."""
    return H.elements is not None and len(H.elements) == 1


def _cross_check(ca):
    if isinstance(ca.group, FreeAbelian) and ca.group.rank == 1 and ca.alphabet.is_finite:
        from .decide import decide_1d
        return decide_1d(ca).to_json(ca.alphabet)
    return None


def injectivity_scan(ca: CellularAutomaton, index_bound: int = DEFAULT_INDEX_BOUND,
                     schedule=None, cross_check: bool = True) -> ScanResult:
    A = ca.alphabet
    if not A.is_finite:
        raise CAError("injectivity_scan needs a finite alphabet")
    res = ScanResult("injectivity", "no collision up to bound", False)
    full = False
    for H in schedule or default_schedule(ca.group, index_bound):
        cs = CosetSpace(H)
        if A.size ** cs.index > ENUMERATION_CAP:
            res.skipped.append(H.describe())
            continue
        tilde = build_tilde(ca, cs)
        seen = {}
        res.checked.append(H.describe())
        full |= _covers_group(H)
        for code, out in enumerate(tilde.table):
            if out in seen:
                z1, z2 = tilde.decode_points(seen[out]), tilde.decode_points(code)
                if not verify_periodic_collision(ca, cs, z1, z2):
                    raise AssertionError("periodic collision failed re-verification")
                res.verdict, res.conclusive = "not injective", True
                res.certificate = {"subgroup": H.to_json(), "z": _fmt_z(A, z1), "z_prime": _fmt_z(A, z2),
                                   "image": _fmt_z(A, tilde.decode_points(out)),
                                   "representatives": [ca.group.fmt(r) for r in cs.representatives]}
                return res
            seen[out] = code
    if full:
        res.verdict, res.conclusive = "injective", True
    if cross_check:
        res.cross_check = _cross_check(ca)
        if res.cross_check is not None:
            res.conclusive = True
            res.verdict = "injective" if res.cross_check["injective"] else "not injective (non-periodic collision)"
    return res


def surjectivity_scan(ca: CellularAutomaton, index_bound: int = DEFAULT_INDEX_BOUND,
                      schedule=None, probe_horizon: int = 6, probes_per_subgroup: int = 4,
                      cross_check: bool = True) -> ScanResult:
    from .limits import closed_image_probe

    A = ca.alphabet
    if not A.is_finite:
        raise CAError("surjectivity_scan needs a finite alphabet")
    res = ScanResult("surjectivity", "Fix(H) covered for every scanned H", False)
    uncovered = []
    for H in schedule or default_schedule(ca.group, index_bound):
        cs = CosetSpace(H)
        if A.size ** cs.index > ENUMERATION_CAP:
            res.skipped.append(H.describe())
            continue
        res.checked.append(H.describe())
        tilde = build_tilde(ca, cs)
        image = set(tilde.table)
        if len(image) == len(tilde.table):
            if _covers_group(H):
                res.verdict, res.conclusive = "surjective", True
                return res
            continue
        missing = [c for c in range(len(tilde.table)) if c not in image]
        uncovered.append(H.describe())
        for code in missing[:probes_per_subgroup]:
            d = rho(cs, tilde.decode_points(code))
            probe = closed_image_probe(ca, d, horizon=probe_horizon)
            if probe.status == "empty-at-stage":
                res.verdict, res.conclusive = "not surjective", True
                res.certificate = {"subgroup": H.to_json(), "target_on_cosets": _fmt_z(A, d.values),
                                   "orphan": probe.to_json()}
                return res
            res.notes.append({"subgroup": H.describe(), "target_on_cosets": _fmt_z(A, d.values),
                              "probe": probe.status})
    if uncovered:
        res.verdict = "Fix(H) not covered for " + ", ".join(uncovered) + "; no orphan found"
    if cross_check:
        res.cross_check = _cross_check(ca)
        if res.cross_check is not None:
            res.conclusive = True
            res.verdict += "; decide_1d: " + ("surjective" if res.cross_check["surjective"] else "not surjective")
    return res


# -- inverse synthesis -------------------------------------------------------------

@dataclass
class InverseResult:
    success: bool
    inverse: CellularAutomaton | None = None
    subgroup: object = None
    transversal: tuple = ()
    transcript: dict | None = None
    certificate: dict | None = None
    tried: list = field(default_factory=list)
    reason: str = ""
    mode: str = "exhaustive"

    def to_json(self):
        out = {"success": self.success, "mode": self.mode, "tried": self.tried}
        if self.reason:
            out["reason"] = self.reason
        if self.inverse is not None:
            G = self.inverse.group
            out["inverse"] = {"memory": [G.fmt(g) for g in self.inverse.memory],
                              "rule": self.inverse.rule.describe_body()}
        if self.subgroup is not None:
            out["subgroup"] = self.subgroup.to_json()
            out["transversal"] = [self.inverse.group.fmt(g) if self.inverse else str(g) for g in self.transversal]
        if self.transcript:
            out["certification"] = self.transcript
        if self.certificate:
            out["certificate"] = self.certificate
        return out


def certify_inverse(tau: CellularAutomaton, sigma: CellularAutomaton):
    """Decide whether sigma∘tau and tau∘sigma are both the identity.

    Each composite's local rule is compared with the projection onto the
    identity coordinate: on every input for finite alphabets, as polynomials
    over Q.
    """
    transcript = {}
    ok = True
    for name, comp in (("sigma_after_tau", compose(sigma, tau)), ("tau_after_sigma", compose(tau, sigma))):
        good, witness = is_projection(comp)
        G = comp.group
        entry = {"memory": [G.fmt(g) for g in comp.memory], "identity": good,
                 "mode": "exhaustive" if tau.alphabet.is_finite else "symbolic"}
        if tau.alphabet.is_finite:
            entry["inputs_checked"] = tau.alphabet.size ** len(set(comp.memory) | {G.identity})
        if witness is not None:
            A = tau.alphabet
            entry["witness"] = {G.fmt(g): A.to_json(v) for g, v in witness.items()}
        transcript[name] = entry
        ok = ok and good
    return ok, transcript


def _rule_from_function(A, k, fn) -> RegularMap:
    """Polynomial rule by interpolation over F_p, or a table rule for table alphabets."""
    if A.kind == "table":
        return RegularMap(A, k, table={combo: fn(combo) for combo in itertools.product(A.points, repeat=k)})
    F = A.field
    n = A.dim
    names = rule_variables(k, n)
    p = F.p
    if p ** (n * k) > ENUMERATION_CAP:
        raise CAError("interpolation table exceeds the enumeration cap")
    tables = [dict() for _ in range(n)]
    for flat in itertools.product(range(p), repeat=n * k):
        pts = tuple(tuple(flat[m * n:(m + 1) * n]) for m in range(k))
        if all(A.contains(x) for x in pts):
            out = fn(pts)
        else:
            out = (0,) * n  # off the variety any value will do
        for i in range(n):
            tables[i][flat] = out[i]
    body = [interpolate(tables[i], F, names) for i in range(n)]
    return RegularMap(A, k, body=body)


def synthesize_inverse(ca: CellularAutomaton, index_bound: int = DEFAULT_INDEX_BOUND, schedule=None,
                       degree_cap: int = 4, radius_cap: int = 2) -> InverseResult:
    """Look for a CA inverse of ``ca``.

    Finite alphabets: for each H, invert tau~_H by enumeration, read the
    inverse rule off the identity coset over a minimal-norm transversal N of
    H\\G, interpolate, prune and certify.  Over Q, see
    :func:`synthesize_inverse_rational`.
    """
    A = ca.alphabet
    if not A.is_finite:
        return synthesize_inverse_rational(ca, degree_cap=degree_cap, radius_cap=radius_cap)
    q = A.size
    result = InverseResult(False)
    for H in schedule or default_schedule(ca.group, index_bound):
        cs = CosetSpace(H)
        if q ** cs.index > ENUMERATION_CAP:
            result.tried.append({"subgroup": H.describe(), "status": "skipped (enumeration cap)"})
            continue
        tilde = build_tilde(ca, cs)
        table = tilde.table
        inv = {}
        for code, out in enumerate(table):
            if out in inv:
                z1, z2 = tilde.decode_points(inv[out]), tilde.decode_points(code)
                assert verify_periodic_collision(ca, cs, z1, z2)
                result.reason = "tau~_H is not injective, so tau is not injective"
                result.certificate = {"subgroup": H.to_json(), "z": _fmt_z(A, z1), "z_prime": _fmt_z(A, z2)}
                result.tried.append({"subgroup": H.describe(), "status": "collision"})
                return result
            inv[out] = code
        N = cs.centered_transversal
        # u is indexed like N, i.e. by coset; nu(u) = (tau~_H⁻¹ u)(coset of 1_G)
        def nu(u, inv=inv, tilde=tilde):
            code = 0
            for x in u:
                code = code * q + A.index(x)
            return A.points[tilde._decode(inv[code])[0]]

        rule = _rule_from_function(A, len(N), nu)
        sigma = minimal_memory(make_ca(ca.group, list(N), rule))
        ok, transcript = certify_inverse(ca, sigma)
        G = ca.group
        result.tried.append({"subgroup": H.describe(), "status": "certified" if ok else "certification failed",
                             "candidate_memory": [G.fmt(g) for g in sigma.memory]})
        if ok:
            result.success = True
            result.inverse = sigma
            result.subgroup = H
            result.transversal = N
            result.transcript = transcript
            return result
    result.reason = "schedule exhausted without a certified inverse"
    return result


def synthesize_inverse_rational(ca: CellularAutomaton, degree_cap: int = 4, radius_cap: int = 2) -> InverseResult:
    """Bounded-degree ansatz over Q.

    For memory N = centered box of radius R and degree D, the coefficients of
    nu are unknowns; nu(xi(y)) = y(1_G) is linear in them and solved exactly.
    D and R escalate up to their caps; failure at the caps is inconclusive.
    """
    G = ca.group
    if not isinstance(G, FreeAbelian):
        raise CAError("rational synthesis is implemented for Z^d")
    if ca.rule.body is None:
        raise CAError("rational synthesis needs a polynomial rule")
    result = InverseResult(False, mode="symbolic")
    for D in range(1, degree_cap + 1):
        for R in range(radius_cap + 1):
            N = box([-R] * G.rank, [R] * G.rank)
            sigma = _ansatz(ca, N, D)
            status = "inconsistent"
            if sigma is not None:
                ok, transcript = certify_inverse(ca, sigma)
                status = "certified" if ok else "certification failed"
                if ok:
                    sigma = minimal_memory(sigma)
                    result.tried.append({"degree": D, "radius": R, "status": status})
                    result.success, result.inverse, result.transcript = True, sigma, transcript
                    return result
            result.tried.append({"degree": D, "radius": R, "status": status})
    result.mode = "inconclusive at bound"
    result.reason = f"no polynomial inverse of degree <= {degree_cap} on radius <= {radius_cap}"
    return result


def _ansatz(ca: CellularAutomaton, N, D):
    A = ca.alphabet
    G = ca.group
    n, F = A.dim, A.field
    k = len(N)
    memory = canonical(G, list(product_set(N, ca.memory, G)) + [G.identity])
    pos = {g: i for i, g in enumerate(memory)}
    names = rule_variables(len(memory), n)
    inner_names = rule_variables(len(ca.memory), n)
    xi = []  # xi[m*n + j] = tau's coordinate j pulled back to N[m]
    for g in N:
        mapping = {var_name(mi, i): var_name(pos[G.mul(g, h)], i)
                   for mi, h in enumerate(ca.memory) for i in range(n)}
        for q in ca.rule.body:
            xi.append(q.rename(mapping, names) if inner_names else MultiPoly.constant(F, names, q.constant_value()))
    monos = monomials(k * n, D)
    one = MultiPoly.constant(F, names, F.one)
    composite = {}
    for e in monos:
        if not any(e):
            composite[e] = one
            continue
        i = next(j for j, x in enumerate(e) if x)
        prev = list(e)
        prev[i] -= 1
        composite[e] = composite[tuple(prev)] * xi[i]
    rows_index = {}
    for P in composite.values():
        for t in P.terms:
            rows_index.setdefault(t, len(rows_index))
    target_terms = []
    for i in range(n):
        t = [0] * len(names)
        t[names.index(var_name(pos[G.identity], i))] = 1
        t = tuple(t)
        rows_index.setdefault(t, len(rows_index))
        target_terms.append(t)
    nrows = len(rows_index)
    matrix = [[F.zero] * len(monos) for _ in range(nrows)]
    for c, e in enumerate(monos):
        for t, v in composite[e].terms.items():
            matrix[rows_index[t]][c] = v
    vars_ = rule_variables(k, n)
    body = []
    for i in range(n):
        rhs = [F.zero] * nrows
        rhs[rows_index[target_terms[i]]] = F.one
        sol = solve_linear(matrix, rhs, F, ncols=len(monos))
        if sol is None:
            return None
        body.append(MultiPoly(F, vars_, {e: c for e, c in zip(monos, sol.particular)}))
    return make_ca(G, list(N), RegularMap(A, k, body=body, provenance=ca.rule.provenance))
