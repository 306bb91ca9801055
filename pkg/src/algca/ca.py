"""Cellular automata with polynomial or tabulated local rules.

The value of tau(c) at g is ``rule((c(g*h))_{h in M})``: shifting by g⁻¹ and
restricting to the memory set M.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property
from typing import Mapping, Sequence

from .alphabets import AlphabetError, RegularMap, rule_variables, var_name
from .fields import PrimeField
from .groups import (FiniteGroup, FreeAbelian, GroupError, canonical, interior,
                     product_set, subgroup_basis_coordinates)
from .poly import MultiPoly


class CAError(ValueError):
    pass


@dataclass(frozen=True)
class CellularAutomaton:
    group: object
    memory: tuple
    rule: RegularMap
    memory_kind: str = "given"  # "given" | "minimal" | "syntactic-minimal"

    def __post_init__(self):
        if self.rule.arity != len(self.memory):
            raise CAError(f"rule arity {self.rule.arity} != |M| = {len(self.memory)}")
        if canonical(self.group, self.memory) != tuple(self.memory):
            raise CAError("memory set must be canonically ordered and duplicate-free")

    @property
    def alphabet(self):
        return self.rule.alphabet

    @cached_property
    def _use_codes(self):
        A = self.alphabet
        return A.is_finite and A.size ** len(self.memory) <= 1 << 18

    def local(self, inputs: Sequence):
        """Local rule on a tuple of points indexed like ``memory``."""
        if self._use_codes:
            A = self.alphabet
            code = 0
            q = A.size
            for x in inputs:
                code = code * q + A.index(x)
            return A.points[self.rule.codes[code]]
        return self.rule.apply(inputs)

    def at(self, config, g):
        """tau(config)(g) for any config given as a callable or mapping."""
        get = config if callable(config) else config.__getitem__
        G = self.group
        return self.local(tuple(get(G.mul(g, h)) for h in self.memory))

    def describe(self) -> str:
        G = self.group
        mem = "{" + "; ".join(G.fmt(m) for m in self.memory) + "}"
        lines = [f"group: {G}", f"alphabet: {self.alphabet.describe()}", f"memory: {mem} ({self.memory_kind})"]
        lines += ["rule: " + b for b in self.rule.describe_body()]
        return "\n".join(lines)


def make_ca(group, memory: Sequence, rule: RegularMap) -> CellularAutomaton:
    """Build a CA from a memory list in any order, permuting the rule to canonical order."""
    memory = [group.check(g) for g in memory]
    if len(set(memory)) != len(memory):
        raise CAError("memory set has duplicates")
    order = sorted(range(len(memory)), key=lambda i: group.sort_key(memory[i]))
    if order != list(range(len(memory))):
        rule = _reindex_rule(rule, order, len(memory))
    return CellularAutomaton(group, tuple(memory[i] for i in order), rule)


def _reindex_rule(rule: RegularMap, sources: Sequence[int], new_arity: int) -> RegularMap:
    """Rule on new positions where new position j reads old position ``sources[j]``.

    ``sources`` may be shorter than ``new_arity`` only in the sense that
    positions not listed are ignored; every old position must appear.
    """
    A = rule.alphabet
    if rule.body is not None:
        n = A.dim
        new_names = rule_variables(new_arity, n)
        where = {old: new for new, old in enumerate(sources)}
        mapping = {var_name(m, i): var_name(where[m], i) for m in range(rule.arity) for i in range(n)}
        body = [q.rename(mapping, new_names) for q in rule.body]
        return RegularMap(A, new_arity, body=body, provenance=rule.provenance)
    where = {old: new for new, old in enumerate(sources)}
    table = {}
    for combo in itertools.product(A.points, repeat=new_arity):
        old = tuple(combo[where[m]] for m in range(rule.arity))
        table[combo] = rule.table[old]
    return RegularMap(A, new_arity, table=table, provenance=rule.provenance)


def identity_ca(group, alphabet) -> CellularAutomaton:
    return shift_ca(group, alphabet, group.identity)


def shift_ca(group, alphabet, offset) -> CellularAutomaton:
    """tau(c)(g) = c(g*offset)."""
    if alphabet.kind == "table":
        rule = RegularMap(alphabet, 1, table={(a,): a for a in alphabet.points})
    else:
        names = rule_variables(1, alphabet.dim)
        rule = RegularMap(alphabet, 1, body=[MultiPoly.var(alphabet.field, names, v) for v in names])
    return CellularAutomaton(group, (group.check(offset),), rule)


# -- window patterns -----------------------------------------------------

@dataclass(frozen=True)
class WindowPattern:
    window: tuple
    values: tuple

    def __post_init__(self):
        if len(self.window) != len(self.values):
            raise CAError("pattern needs one value per window element")

    @cached_property
    def mapping(self) -> dict:
        return dict(zip(self.window, self.values))

    def __getitem__(self, g):
        return self.mapping[g]

    @classmethod
    def from_mapping(cls, group, mapping: Mapping):
        window = canonical(group, mapping)
        return cls(window, tuple(mapping[g] for g in window))


def apply_window(ca: CellularAutomaton, u: WindowPattern) -> WindowPattern:
    """tau_Ω: A^Ω -> A^Ω′ with Ω′ = {g : gM ⊂ Ω}."""
    A = ca.alphabet
    for x in u.values:
        if not A.contains(x):
            raise AlphabetError(f"{x!r} is not a point of the CA's alphabet")
    target = interior(u.window, ca.memory, ca.group)
    m = u.mapping
    return WindowPattern(target, tuple(ca.at(m, g) for g in target))


# -- composition -----------------------------------------------------------

def _check_compatible(a: CellularAutomaton, b: CellularAutomaton):
    if a.group != b.group:
        raise CAError("cellular automata over different groups")
    if a.alphabet != b.alphabet:
        raise CAError("cellular automata over different alphabets")


def compose(outer: CellularAutomaton, inner: CellularAutomaton) -> CellularAutomaton:
    """outer ∘ inner, with memory M′M.

    Polynomial rules are composed symbolically: for each g′ in M′ the inner
    body is pulled back along h -> g′h, and the outer body is evaluated on
    those pulled-back polynomials.  Table rules are composed by enumeration.
    """
    _check_compatible(outer, inner)
    G = outer.group
    A = outer.alphabet
    memory = product_set(outer.memory, inner.memory, G)
    pos = {g: i for i, g in enumerate(memory)}
    k = len(memory)
    if outer.rule.body is not None and inner.rule.body is not None:
        n = A.dim
        F = A.field
        names = rule_variables(k, n)
        inner_names = rule_variables(len(inner.memory), n)
        assignment = {}
        for j, gp in enumerate(outer.memory):
            mapping = {var_name(m, i): var_name(pos[G.mul(gp, h)], i)
                       for m, h in enumerate(inner.memory) for i in range(n)}
            for i, q in enumerate(inner.rule.body):
                if inner_names:
                    assignment[var_name(j, i)] = q.rename(mapping, names)
                else:
                    assignment[var_name(j, i)] = MultiPoly.constant(F, names, q.constant_value())
        body = []
        for q in outer.rule.body:
            if q.variables:
                r = q.substitute(assignment)
            else:
                r = MultiPoly.constant(F, names, q.constant_value())
            if isinstance(F, PrimeField):
                r = r.reduce_frobenius()
            body.append(r)
        prov = _join_provenance(outer.rule, inner.rule)
        return CellularAutomaton(G, memory, RegularMap(A, k, body=body, provenance=prov))
    if not A.is_finite:
        raise CAError("table composition needs a finite alphabet")
    table = {}
    for combo in itertools.product(A.points, repeat=k):
        y = dict(zip(memory, combo))
        mid = tuple(inner.at(y, gp) for gp in outer.memory)
        table[combo] = outer.local(mid)
    return CellularAutomaton(G, memory, RegularMap(A, k, table=table))


def _join_provenance(a: RegularMap, b: RegularMap) -> str:
    if a.provenance == b.provenance:
        return a.provenance
    return "verified-on-samples" if "verified-on-samples" in (a.provenance, b.provenance) else a.provenance


def compose_brute(outer: CellularAutomaton, inner: CellularAutomaton, combo_memory=None):
    """Local rule of outer ∘ inner by direct evaluation; an oracle for tests."""
    G = outer.group
    memory = combo_memory or product_set(outer.memory, inner.memory, G)

    def rule(values):
        y = dict(zip(memory, values))
        return outer.local(tuple(inner.at(y, gp) for gp in outer.memory))

    return memory, rule


# -- restriction -------------------------------------------------------------

def restrict(ca: CellularAutomaton, subgroup) -> CellularAutomaton:
    """Restriction to a subgroup H ⊃ M.

    For Z^d, ``subgroup`` is a list of linearly independent integer basis
    columns; H is identified with Z^k through that basis (k = 0 gives the
    trivial group).  For finite groups it is a collection of element indices.
    """
    G = ca.group
    if isinstance(G, FreeAbelian):
        cols = [tuple(int(x) for x in c) for c in subgroup]
        if any(len(c) != G.rank for c in cols):
            raise GroupError("basis vectors must have length d")
        coords = []
        for m in ca.memory:
            v = subgroup_basis_coordinates(cols, m)
            if v is None:
                raise CAError(f"memory element {G.fmt(m)} is not in the subgroup")
            coords.append(v)
        if cols:
            H = FreeAbelian(len(cols))
        else:
            H = FiniteGroup(("e",), ((0,),))
            coords = [0 for _ in coords]
        return make_ca(H, coords, ca.rule)
    elems = sorted(set(subgroup))
    if G.identity not in elems:
        raise GroupError("subgroup must contain the identity")
    idx = {g: i for i, g in enumerate(elems)}
    try:
        table = tuple(tuple(idx[G.mul(a, b)] for b in elems) for a in elems)
    except KeyError:
        raise GroupError("subset is not closed under multiplication") from None
    H = FiniteGroup(tuple(G.names[g] for g in elems), table)
    for m in ca.memory:
        if m not in idx:
            raise CAError(f"memory element {G.fmt(m)} is not in the subgroup")
    return make_ca(H, [idx[m] for m in ca.memory], ca.rule)


# -- memory sets -----------------------------------------------------------------

def dependent_positions(ca: CellularAutomaton) -> list[int]:
    """Memory positions on which the (finite-alphabet) rule genuinely depends."""
    A = ca.alphabet
    q = A.size
    k = len(ca.memory)
    codes = ca.rule.codes
    deps = []
    for j in range(k):
        stride = q ** (k - 1 - j)
        for code in range(len(codes)):
            digit = (code // stride) % q
            if digit:
                continue
            base = codes[code]
            if any(codes[code + d * stride] != base for d in range(1, q)):
                deps.append(j)
                break
    return deps


def minimal_memory(ca: CellularAutomaton) -> CellularAutomaton:
    """Shrink M to the positions the rule depends on.

    Finite alphabets: exact (dependence tested by enumeration); dropped
    coordinates of a polynomial body are filled with a fixed point of the
    alphabet.  Rational alphabets: only variables that do not occur are
    dropped, and the result is labelled syntactic.
    """
    A = ca.alphabet
    if A.is_finite:
        keep = dependent_positions(ca)
        kind = "minimal"
    else:
        used = set().union(*(q.used_variables() for q in ca.rule.body))
        keep = [m for m in range(len(ca.memory))
                if any(var_name(m, i) in used for i in range(A.dim))]
        kind = "syntactic-minimal"
    memory = tuple(ca.memory[m] for m in keep)
    rule = _project_rule(ca.rule, keep)
    return CellularAutomaton(ca.group, memory, rule, memory_kind=kind)


def _project_rule(rule: RegularMap, keep: Sequence[int]) -> RegularMap:
    A = rule.alphabet
    k = len(keep)
    if rule.body is not None:
        n = A.dim
        F = A.field
        names = rule_variables(k, n)
        if len(keep) < rule.arity:
            if A.is_finite:
                if not A.points:
                    raise CAError("alphabet has no points; no base point to fill dropped coordinates")
                base = A.points[0]
            else:
                base = (F.zero,) * n
        assignment = {}
        for m in range(rule.arity):
            for i in range(n):
                if m in keep:
                    assignment[var_name(m, i)] = MultiPoly.var(F, names, var_name(keep.index(m), i))
                else:
                    assignment[var_name(m, i)] = MultiPoly.constant(F, names, base[i])
        body = []
        for q in rule.body:
            r = q.substitute(assignment) if q.variables else MultiPoly.constant(F, names, q.constant_value())
            if isinstance(F, PrimeField):
                r = r.reduce_frobenius()
            body.append(r)
        return RegularMap(A, k, body=body, provenance=rule.provenance)
    if not A.points and rule.arity:
        raise CAError("alphabet has no points")
    base = A.points[0] if A.points else None
    table = {}
    for combo in itertools.product(A.points, repeat=k):
        full = [base] * rule.arity
        for j, m in enumerate(keep):
            full[m] = combo[j]
        table[combo] = rule.table[tuple(full)]
    return RegularMap(A, k, table=table, provenance=rule.provenance)


def pad_memory(ca: CellularAutomaton, extra: Sequence) -> CellularAutomaton:
    """Same CA with dummy memory elements added; the rule ignores them."""
    A = ca.alphabet
    if A.is_finite and not A.points:
        raise CAError("refusing to pad memory over an alphabet with no points")
    G = ca.group
    memory = canonical(G, list(ca.memory) + list(extra))
    sources = [ca.memory.index(g) if g in ca.memory else None for g in memory]
    k = len(memory)
    rule = ca.rule
    if rule.body is not None:
        n = A.dim
        names = rule_variables(k, n)
        mapping = {var_name(ca.memory.index(g), i): var_name(j, i)
                   for j, g in enumerate(memory) if g in ca.memory for i in range(n)}
        body = [q.rename(mapping, names) for q in rule.body]
        return CellularAutomaton(G, memory, RegularMap(A, k, body=body, provenance=rule.provenance))
    table = {}
    for combo in itertools.product(A.points, repeat=k):
        table[combo] = rule.table[tuple(combo[j] for j, s in enumerate(sources) if s is not None)]
    return CellularAutomaton(G, memory, RegularMap(A, k, table=table, provenance=rule.provenance))


def local_on(ca: CellularAutomaton, memory: Sequence):
    """The local rule of ``ca`` viewed on a larger memory set."""
    where = [memory.index(g) for g in ca.memory]
    return lambda values: ca.local(tuple(values[i] for i in where))


def same_semantics(a: CellularAutomaton, b: CellularAutomaton):
    """(True, None) if both CAs are the same map; else (False, witness input on M_a ∪ M_b).

    Exhaustive over finite alphabets.  Over Q the two bodies are compared as
    polynomials on the joint memory, which decides equality on the affine
    space and is sufficient on a subvariety.
    """
    _check_compatible(a, b)
    G = a.group
    memory = canonical(G, list(a.memory) + list(b.memory))
    A = a.alphabet
    if A.is_finite:
        fa, fb = local_on(a, memory), local_on(b, memory)
        for combo in itertools.product(A.points, repeat=len(memory)):
            if fa(combo) != fb(combo):
                return False, dict(zip(memory, combo))
        return True, None
    pa = pad_memory(a, memory).rule.body
    pb = pad_memory(b, memory).rule.body
    if pa == pb:
        return True, None
    return False, None


def is_projection(ca: CellularAutomaton):
    """(True, None) iff the local rule returns the value at the identity, on every input."""
    G = ca.group
    A = ca.alphabet
    if G.identity not in ca.memory:
        # a rule that ignores the centre cell can only be the identity on a 1-point alphabet
        memory = canonical(G, list(ca.memory) + [G.identity])
    else:
        memory = ca.memory
    e = memory.index(G.identity)
    if A.is_finite:
        f = local_on(ca, memory)
        for combo in itertools.product(A.points, repeat=len(memory)):
            if f(combo) != combo[e]:
                return False, dict(zip(memory, combo))
        return True, None
    padded = pad_memory(ca, memory)
    names = padded.rule.body[0].variables
    proj = [MultiPoly.var(A.field, names, var_name(e, i)) for i in range(A.dim)]
    return (list(padded.rule.body) == proj), None
