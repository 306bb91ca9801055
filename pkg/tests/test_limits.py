import itertools
import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from algca.alphabets import affine_line, polynomial_rule
from algca.ca import CAError, WindowPattern, make_ca, shift_ca
from algca.groups import CosetSpace, FiniteGroup, diagonal
from algca.limits import (FiniteInverseSequence, WindowSystem, closed_image_probe, cubing_example_probe,
                          default_windows, kt_example_probe, kt_system, limit_thread, quadratic_example_probe,
                          random_sequence, universal_chain, universal_elements, verify_thread, window_fibers)
from algca.periodic import rho

from helpers import Z, Z2, eval_cell, random_ca, random_table_ca

F2, F3 = affine_line(2), affine_line(3)


def ca1(A, memory, *bodies):
    return make_ca(Z, [(m,) for m in memory], polynomial_rule(A, len(memory), list(bodies)))


XOR = ca1(F2, [0, 1], "x0_0 + x1_0")


# -- inverse sequences --------------------------------------------------------------

def test_universal_elements_example():
    # Z_2 = {a}, Z_1 = {x, y}, Z_0 = {0, 1}; only 0 survives from level 2
    seq = FiniteInverseSequence([(0, 1), ("x", "y"), ("a",)], [{"x": 0, "y": 1}, {"a": "x"}])
    assert universal_elements(seq, 0, 0) == {0, 1}
    assert universal_elements(seq, 0, 2) == {0}
    chain, stable = universal_chain(seq, 0)
    assert chain == [{0, 1}, {0, 1}, {0}] and stable == 2
    t = limit_thread(seq)
    assert t.status == "thread" and t.thread == (0, "x", "a")


def test_empty_level_reports_stage():
    seq = FiniteInverseSequence([(0,), ()], [{}])
    t = limit_thread(seq)
    assert t.status == "empty-at-stage" and t.stage == 1


def test_sequence_validation():
    with pytest.raises(ValueError):
        FiniteInverseSequence([(0,), (1,)], [{1: 5}])


def _brute_threads(seq):
    # every compatible tuple, by exhaustive product over levels
    return [t for t in itertools.product(*seq.levels) if verify_thread(seq, t)]


def _brute_universal(seq, n, depth):
    return {t[0] for t in itertools.product(*seq.levels[n:n + depth + 1])
            if all(seq.maps[n + i][t[i + 1]] == t[i] for i in range(depth))}


@given(st.randoms(use_true_random=False))
def test_universal_elements_match_brute_force(r):
    seq = random_sequence(r, r.randint(1, 4), max_size=4)
    for n in range(seq.depth + 1):
        for k in range(seq.depth - n + 1):
            assert universal_elements(seq, n, k) == _brute_universal(seq, n, k)


@given(st.randoms(use_true_random=False))
def test_thread_exists_and_is_compatible(r):
    seq = random_sequence(r, r.randint(0, 5), max_size=4)
    t = limit_thread(seq)
    assert t.status == "thread" and verify_thread(seq, t.thread)
    assert t.thread in _brute_threads(seq)


def _reachable_from_top(seq, n, m):
    # forward search: z at level n survives to level m iff some path climbs from z through preimages
    up = [{} for _ in range(seq.depth)]
    for k, phi in enumerate(seq.maps):
        for z, w in phi.items():
            up[k].setdefault(w, []).append(z)

    def climbs(z, k):
        return k == m or any(climbs(y, k + 1) for y in up[k].get(z, ()))
    return {z for z in seq.levels[n] if climbs(z, n)}


@given(st.randoms(use_true_random=False))
def test_universal_chain_decreases_and_settles(r):
    seq = random_sequence(r, r.randint(1, 6), max_size=4)
    for n in range(seq.depth + 1):
        chain, settled = universal_chain(seq, n)
        assert all(b <= a for a, b in zip(chain, chain[1:]))
        assert all(chain)
        # a weakly decreasing chain of subsets of Z_n takes at most |Z_n| distinct values
        assert len(set(chain)) <= len(seq.levels[n])
        assert all(c == chain[-1] for c in chain[settled:])
        assert settled == 0 or chain[settled - 1] != chain[-1]
        for k, c in enumerate(chain):
            assert c == _reachable_from_top(seq, n, n + k)


# -- window fibers ------------------------------------------------------------------

def test_fiber_examples():
    target = WindowPattern(((0,),), ((0,),))
    assert window_fibers(XOR, target, [(0,), (1,)]) == [((0,), (0,)), ((1,), (1,))]
    ident = ca1(F3, [0], "x0_0")
    t = WindowPattern(((0,), (1,)), ((2,), (1,)))
    assert window_fibers(ident, t, [(0,), (1,)]) == [((2,), (1,))]
    sh = shift_ca(Z, F3, (1,))
    fib = window_fibers(sh, WindowPattern(((0,),), ((1,),)), [(0,), (1,)])
    assert len(fib) == 3 and all(u[1] == (1,) for u in fib)


def test_fiber_rejects_target_outside_interior():
    with pytest.raises(CAError):
        window_fibers(XOR, WindowPattern(((1,),), ((0,),)), [(0,), (1,)])


@given(st.randoms(use_true_random=False))
def test_fibers_match_brute_force(r):
    ca = random_ca(r, 2)
    window = [(i,) for i in range(-2, 3)]
    from algca.groups import interior
    inner = interior(window, ca.memory, Z)
    vals = tuple((r.randrange(2),) for _ in inner)
    target = WindowPattern(inner, vals)
    brute = []
    for u in itertools.product(F2.points, repeat=len(window)):
        conf = dict(zip(window, u))
        if all(eval_cell(ca, conf, g) == v for g, v in zip(inner, vals)):
            brute.append(u)
    assert window_fibers(ca, target, window) == brute


def test_inverse_sequence_maps_are_restrictions():
    d = rho(CosetSpace(diagonal(1, Z)), ((1,),))
    system = WindowSystem(XOR, d, default_windows(Z, 3))
    seq = system.inverse_sequence()
    assert [len(z) for z in seq.levels] == [2, 2, 2, 2]
    for n in range(seq.depth):
        for u in seq.levels[n + 1]:
            assert seq.maps[n][u] in seq.levels[n]


# -- closed-image probe ------------------------------------------------------------------

def test_probe_constant_rule_empty_at_stage_zero():
    const = ca1(F2, [0], "1")
    d = rho(CosetSpace(diagonal(1, Z)), ((0,),))
    res = closed_image_probe(const, d)
    assert res.status == "empty-at-stage" and res.stage == 0
    assert res.to_json()["mode"] == "exhaustive"


def test_probe_xor_all_ones_has_periodic_preimage():
    d = rho(CosetSpace(diagonal(1, Z)), ((1,),))
    res = closed_image_probe(XOR, d)
    assert res.status == "preimage-found"
    p = res.preimage
    assert p.cosets.index == 2
    for n in range(-4, 4):
        assert XOR.local((p((n,)), p((n + 1,)))) == (1,)


def test_probe_majority_on_alternating_target():
    maj = ca1(F2, [-1, 0, 1], "x0_0*x1_0 + x0_0*x2_0 + x1_0*x2_0")
    d = rho(CosetSpace(diagonal(2, Z)), ((0,), (1,)))
    assert closed_image_probe(maj, d).status == "preimage-found"


def test_probe_on_z2():
    ca = make_ca(Z2, [(0, 0), (1, 0)], polynomial_rule(F2, 2, ["x0_0*x1_0"]))
    cs = CosetSpace(diagonal(2, Z2))
    # 1 on even columns, 0 on odd ones: c(x)c(x+1) = 1 forces c(x+1) = c(x+2) = 1 and then 0 at x+1 fails
    stripes = rho(cs, tuple(((1 - r[0] % 2),) for r in cs.representatives))
    res = closed_image_probe(ca, stripes, horizon=2)
    assert res.status == "empty-at-stage"
    rows = rho(cs, tuple(((1 - r[1] % 2),) for r in cs.representatives))
    assert closed_image_probe(ca, rows, horizon=2).status == "preimage-found"


def test_probe_on_finite_group():
    s3 = FiniteGroup.symmetric(3)
    ca = random_table_ca(random.Random(1), 2, [0, 1], group=s3)
    target = lambda g: 0
    res = closed_image_probe(ca, target)
    fib = [c for c in itertools.product(range(2), repeat=6)
           if all(eval_cell(ca, dict(enumerate(c)), g) == 0 for g in range(6))]
    assert (res.status == "empty-at-stage") == (not fib)


# -- worked examples --------------------------------------------------------------------

def test_quadratic_example():
    out = quadratic_example_probe(10)
    c = [0]
    for _ in range(10):
        c.append(1 + c[-1] ** 2)
    assert out["witness_prefix"] == [str(x) for x in c]
    assert out["all_fibers_nonempty"] and len(out["windows"]) == 10
    # a constant preimage t would need t - t^2 = 1
    assert out["constant_preimage_rational_roots"] == []
    assert not any(Fraction(a, b) - Fraction(a, b) ** 2 == 1 for a in range(-20, 21) for b in range(1, 21))
    assert out["f5_right_permutive"] and out["f5_verdict"] == "surjective"


def test_kt_system_rows_encode_the_recurrence():
    D = 3
    rows, rhs, ncols = kt_system(D, 1)
    r = random.Random(0)
    c = [[Fraction(r.randint(-3, 3)) for _ in range(D + 1)] for _ in range(D + 3)]
    flat = [x for cell in c for x in cell]
    residual = [sum(a * x for a, x in zip(row, flat)) - b for row, b in zip(rows, rhs)]
    # direct residual of c(n) - t c(n+1) - 1, coefficient by coefficient
    direct = []
    for n in range(D + 2):
        for e in range(D + 2):
            v = (c[n][e] if e <= D else 0) - (c[n + 1][e - 1] if e >= 1 else 0) - (1 if e == 0 else 0)
            direct.append(v)
    assert residual == direct


def test_kt_example():
    out = kt_example_probe(10)
    assert len(out["degrees"]) == 11
    assert out["inconsistent_for_all"] and out["kernel_zero_for_all"]
    assert all(d["d_zero_solution_is_zero"] for d in out["degrees"])


def test_cubing_example():
    out = cubing_example_probe()
    assert out["rational_roots_of_t3_minus_2"] == [] and not out["q_point_2_1_in_image"]
    f5, f7 = out["finite_fields"]
    assert f5 == {"p": 5, "alphabet_size": 6, "injective": True, "surjective": True}
    assert f7 == {"p": 7, "alphabet_size": 8, "injective": False, "surjective": False}
    # independent: the cube map on F_p is a bijection iff it hits every residue
    assert len({x ** 3 % 5 for x in range(5)}) == 5 and len({x ** 3 % 7 for x in range(7)}) < 7
