"""Exact injectivity and surjectivity decisions for one-dimensional CAs over finite alphabets.

Injectivity uses the pair graph on (A^r)², surjectivity the subset
construction on the de Bruijn graph of A^r, where r + 1 is the width of the
memory's span.  Memory is translated to {0, ..., r}; a translation composes
the CA with a shift and changes neither property.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from .ca import CAError, CellularAutomaton, WindowPattern, apply_window, minimal_memory
from .groups import FreeAbelian


@dataclass(frozen=True)
class EventuallyPeriodic:
    """Configuration on Z: ``center`` on [0, len(center)), periodic tails on both sides."""

    left: tuple
    center: tuple
    right: tuple

    def __call__(self, n: int):
        if isinstance(n, tuple):
            (n,) = n
        if n < 0:
            return self.left[n % len(self.left)]
        if n < len(self.center):
            return self.center[n]
        return self.right[(n - len(self.center)) % len(self.right)]

    def to_json(self, alphabet):
        return {k: [alphabet.to_json(x) for x in getattr(self, k)] for k in ("left", "center", "right")}


@dataclass
class Decision1D:
    injective: bool
    surjective: bool
    collision: tuple | None = None  # (x, y) with x != y and tau(x) == tau(y)
    orphan: WindowPattern | None = None  # target pattern with an empty fiber
    span: tuple = (0, 0)

    def to_json(self, alphabet):
        out = {"injective": self.injective, "surjective": self.surjective,
               "bijective": self.injective and self.surjective, "memory_span": list(self.span)}
        if self.collision:
            out["collision"] = [c.to_json(alphabet) for c in self.collision]
        if self.orphan is not None:
            out["orphan"] = {"window": [w[0] for w in self.orphan.window],
                             "values": [alphabet.to_json(v) for v in self.orphan.values]}
        return out


class _Local:
    """The rule as a function of the r+1 consecutive cells [a, b] of the memory span."""

    def __init__(self, ca: CellularAutomaton):
        A = ca.alphabet
        self.q = q = A.size
        if ca.memory:
            a, b = ca.memory[0][0], ca.memory[-1][0]
        else:
            a = b = 0
        self.a, self.b = a, b
        self.w = w = b - a + 1
        self.r = w - 1
        offs = [m[0] - a for m in ca.memory]
        codes = ca.rule.codes
        k = len(offs)
        table = []
        for word in range(q ** w):
            digits = _digits(word, q, w)
            code = 0
            for o in offs:
                code = code * q + digits[o]
            table.append(codes[code] if k else codes[0])
        self.table = table


def _digits(x, q, n):
    out = [0] * n
    for i in range(n - 1, -1, -1):
        out[i] = x % q
        x //= q
    return out


def _pair_graph(loc: _Local):
    q, r = loc.q, loc.r
    nv = q ** r
    by_out = [dict() for _ in range(nv)]  # u -> output -> [a]
    for u in range(nv):
        for a in range(q):
            by_out[u].setdefault(loc.table[u * q + a], []).append(a)
    edges = {}
    for u in range(nv):
        for v in range(nv):
            lst = []
            for y, as_ in by_out[u].items():
                bs = by_out[v].get(y)
                if not bs:
                    continue
                for a in as_:
                    for b in bs:
                        lst.append(((u * q + a) % nv if r else 0, (v * q + b) % nv if r else 0, a, b))
            edges[(u, v)] = [((s1, s2), a, b) for s1, s2, a, b in lst]
    return edges


def _infinite(vertices, succ):
    """Vertices from which an infinite walk along ``succ`` exists."""
    alive = set(vertices)
    deg = {v: sum(1 for w in succ[v] if w in alive) for v in alive}
    pred = {v: [] for v in alive}
    for v in alive:
        for w in succ[v]:
            pred[w].append(v)
    queue = deque(v for v in alive if deg[v] == 0)
    while queue:
        v = queue.popleft()
        if v not in alive:
            continue
        alive.discard(v)
        for u in pred[v]:
            if u in alive:
                deg[u] -= 1
                if deg[u] == 0:
                    queue.append(u)
    return alive


def _walk_to_cycle(start, step):
    """Follow ``step`` from start until a vertex repeats; return (transient, cycle) edge lists."""
    seen = {start: 0}
    edges = []
    v = start
    while True:
        e, w = step(v)
        edges.append(e)
        if w in seen:
            i = seen[w]
            return edges[:i], edges[i:]
        seen[w] = len(edges)
        v = w


def _find_collision(loc: _Local):
    edges = _pair_graph(loc)
    succ = {v: [t for t, _, _ in es] for v, es in edges.items()}
    pred = {v: [] for v in edges}
    for v, es in edges.items():
        for t, a, b in es:
            pred[t].append((v, a, b))
    fwd = _infinite(edges, succ)
    bwd = _infinite(edges, {v: [s for s, _, _ in pred[v]] for v in edges})
    for s, es in edges.items():
        if s not in bwd:
            continue
        for t, a, b in es:
            if a != b and t in fwd:
                right_t, right_c = _walk_to_cycle(
                    t, lambda v: next(((a2, b2), t2) for t2, a2, b2 in edges[v] if t2 in fwd))
                left_t, left_c = _walk_to_cycle(
                    s, lambda v: next(((a2, b2), s2) for s2, a2, b2 in pred[v] if s2 in bwd))
                left_t, left_c = left_t[::-1], left_c[::-1]
                middle = left_t + [(a, b)] + right_t
                x = EventuallyPeriodic(tuple(e[0] for e in left_c), tuple(e[0] for e in middle),
                                       tuple(e[0] for e in right_c))
                y = EventuallyPeriodic(tuple(e[1] for e in left_c), tuple(e[1] for e in middle),
                                       tuple(e[1] for e in right_c))
                return x, y
    return None


def _find_orphan(loc: _Local, subset_cap: int):
    q, r = loc.q, loc.r
    nv = q ** r
    start = frozenset(range(nv))
    parent = {start: None}
    queue = deque([start])
    while queue:
        S = queue.popleft()
        nxt = {}
        for u in S:
            for a in range(q):
                y = loc.table[u * q + a]
                nxt.setdefault(y, set()).add((u * q + a) % nv if r else 0)
        for y in range(q):
            T = frozenset(nxt.get(y, ()))
            if T in parent:
                continue
            parent[T] = (S, y)
            if not T:
                word = []
                cur = T
                while parent[cur] is not None:
                    cur, sym = parent[cur]
                    word.append(sym)
                return word[::-1]
            if len(parent) > subset_cap:
                raise CAError(f"subset construction exceeded {subset_cap} states")
            queue.append(T)
    return None


def decide_1d(ca: CellularAutomaton, subset_cap: int = 200_000, verify: bool = True) -> Decision1D:
    if not isinstance(ca.group, FreeAbelian) or ca.group.rank != 1:
        raise CAError("decide_1d needs G = Z")
    if not ca.alphabet.is_finite:
        raise CAError("decide_1d needs a finite alphabet")
    A = ca.alphabet
    small = minimal_memory(ca)
    loc = _Local(small)
    coll = _find_collision(loc)
    orphan_word = _find_orphan(loc, subset_cap)
    collision = None
    if coll is not None:
        x, y = coll
        x = EventuallyPeriodic(*(tuple(A.points[i] for i in part) for part in (x.left, x.center, x.right)))
        y = EventuallyPeriodic(*(tuple(A.points[i] for i in part) for part in (y.left, y.center, y.right)))
        collision = (x, y)
        if verify and not _verify_collision_points(ca, x, y, loc):
            raise AssertionError("collision witness failed re-verification")
    orphan = None
    if orphan_word is not None:
        orphan = WindowPattern(tuple((n,) for n in range(len(orphan_word))),
                               tuple(A.points[i] for i in orphan_word))
        if verify:
            from .limits import window_fibers
            src = tuple((n,) for n in range(min(m[0] for m in ca.memory) if ca.memory else 0,
                                            len(orphan_word) + (max(m[0] for m in ca.memory) if ca.memory else 0)))
            if window_fibers(ca, orphan, src):
                raise AssertionError("orphan witness has a preimage")
    return Decision1D(coll is None, orphan_word is None, collision, orphan, (loc.a, loc.b))


def _verify_collision_points(ca, x, y, loc):
    """Both configurations differ and have equal images on a window reaching one full period past the transients."""
    pad = len(x.left) + len(x.right) + loc.w + 1
    lo = -pad - max(0, loc.b) - 1
    hi = len(x.center) + pad - min(0, loc.a) + 1
    if all(x(n) == y(n) for n in range(lo, hi)):
        return False
    win = tuple((n,) for n in range(lo, hi))
    tx = apply_window(ca, WindowPattern(win, tuple(x(n) for n in range(lo, hi))))
    ty = apply_window(ca, WindowPattern(win, tuple(y(n) for n in range(lo, hi))))
    return tx == ty
