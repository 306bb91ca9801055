import itertools

import pytest
from hypothesis import given, strategies as st

from algca.alphabets import (RationalAffineAlphabet, RegularMap, TableAlphabet, affine_line, enumerate_points,
                             polynomial_rule)
from algca.ca import (CAError, WindowPattern, apply_window, compose, compose_brute, identity_ca, make_ca,
                      minimal_memory, pad_memory, restrict, same_semantics, shift_ca)
from algca.fields import PrimeField
from algca.groups import FiniteGroup, finite_subgroups, product_set
from algca.parsing import parse_polynomial

from helpers import Z, Z2, eval_cell, random_ca

F2, F3, F5 = affine_line(2), affine_line(3), affine_line(5)


def ca1(A, memory, *bodies):
    return make_ca(Z, [(m,) for m in memory], polynomial_rule(A, len(memory), list(bodies)))


def pattern(lo, values):
    return WindowPattern(tuple((lo + i,) for i in range(len(values))), tuple((v,) for v in values))


XOR = ca1(F2, [0, 1], "x0_0 + x1_0")


# -- window application ---------------------------------------------------------

def test_apply_window_examples():
    out = apply_window(XOR, pattern(0, [1, 0, 1]))
    assert out.window == ((0,), (1,)) and out.values == ((1,), (1,))
    ident = identity_ca(Z, F3)
    u = pattern(-2, [2, 0, 1])
    assert apply_window(ident, u) == u
    assert apply_window(ca1(F2, [0, 5], "x0_0"), pattern(0, [1, 1])) == WindowPattern((), ())


def test_apply_window_rejects_foreign_points():
    with pytest.raises(Exception):
        apply_window(XOR, pattern(0, [1, 2]))


def test_make_ca_reorders_memory():
    a = ca1(F3, [1, 0], "x0_0 + 2*x1_0")
    b = ca1(F3, [0, 1], "2*x0_0 + x1_0")
    assert a.memory == ((0,), (1,))
    assert a.rule.body == b.rule.body


# -- composition --------------------------------------------------------------------

def test_compose_examples():
    s = shift_ca(Z, F5, (1,))
    ss = compose(s, s)
    assert ss.memory == ((2,),) and [str(q) for q in ss.rule.body] == ["x0_0"]
    xx = compose(XOR, XOR)
    assert xx.memory == ((0,), (1,), (2,))
    assert [str(q) for q in xx.rule.body] == ["x0_0 + x2_0"]
    for combo in itertools.product(F2.points, repeat=3):
        a, b, c = (x[0] for x in combo)
        assert xx.local(combo) == ((a + c) % 2,)


def test_compose_rejects_mismatch():
    with pytest.raises(CAError):
        compose(XOR, ca1(F3, [0], "x0_0"))


def _oracle_equal(ca, outer, inner):
    memory, rule = compose_brute(outer, inner)
    assert ca.memory == memory
    return all(ca.local(c) == rule(c) for c in itertools.product(ca.alphabet.points, repeat=len(memory)))


@pytest.mark.parametrize("p", [2, 3])
@given(st.randoms(use_true_random=False))
def test_compose_matches_brute_force(p, r):
    outer, inner = random_ca(r, p), random_ca(r, p)
    assert _oracle_equal(compose(outer, inner), outer, inner)


@given(st.randoms(use_true_random=False))
def test_compose_associative_with_identity_unit(r):
    a, b, c = (random_ca(r, 2) for _ in range(3))
    left = compose(compose(a, b), c)
    right = compose(a, compose(b, c))
    assert left.memory == right.memory
    assert same_semantics(left, right)[0]
    e = identity_ca(Z, F2)
    assert same_semantics(compose(e, a), a)[0] and same_semantics(compose(a, e), a)[0]


def test_table_composition():
    T = TableAlphabet(["a", "b", "c"])
    rot = make_ca(Z, [(0,), (1,)], RegularMap(T, 2, table={(x, y): (x + 2 * y) % 3
                                                           for x in T.points for y in T.points}))
    comp = compose(rot, rot)
    assert _oracle_equal(comp, rot, rot)


def test_rational_composition_is_symbolic():
    Q1 = RationalAffineAlphabet(1)
    q = make_ca(Z, [(0,), (1,)], polynomial_rule(Q1, 2, ["x1_0 - x0_0^2"]))
    qq = compose(q, q)
    assert qq.rule.provenance == "verified-on-samples"
    names = qq.rule.body[0].variables
    x0, x1, x2 = (parse_polynomial(f"x{i}_0", Q1.field, names) for i in range(3))
    assert qq.rule.body[0] == (x2 - x1 ** 2) - (x1 - x0 ** 2) ** 2


# -- restriction ----------------------------------------------------------------------

def test_restrict_examples():
    ca = ca1(F3, [0, 2], "x0_0 + x1_0")
    r = restrict(ca, [(2,)])
    assert r.memory == ((0,), (1,))
    assert r.rule.body == ca.rule.body
    with pytest.raises(CAError):
        restrict(ca, [(3,)])
    pointwise = restrict(ca1(F3, [0], "x0_0^2"), [])
    assert isinstance(pointwise.group, FiniteGroup) and pointwise.group.order == 1


def test_restrict_z2_to_line():
    A = affine_line(2)
    ca = make_ca(Z2, [(0, 0), (1, 1)], polynomial_rule(A, 2, ["x0_0*x1_0"]))
    r = restrict(ca, [(1, 1)])
    assert r.group == Z and r.memory == ((0,), (1,))


def test_restrict_finite_group():
    s3 = FiniteGroup.symmetric(3)
    T = TableAlphabet(["0", "1"])
    rotations = next(K for K in finite_subgroups(s3) if len(K) == 3)
    ca = make_ca(s3, sorted(rotations)[:2], RegularMap(T, 2, table={(a, b): a ^ b for a in T.points for b in T.points}))
    r = restrict(ca, rotations)
    assert r.group.order == 3


# -- minimal memory ---------------------------------------------------------------------

def test_minimal_memory_examples():
    assert minimal_memory(ca1(F3, [0, 1], "x1_0")).memory == ((1,),)
    assert minimal_memory(XOR).memory == ((0,), (1,))
    const = minimal_memory(ca1(F3, [0, 1], "2"))
    assert const.memory == () and const.local(()) == (2,)


def test_minimal_memory_detects_hidden_independence():
    # x^3 - x vanishes on F_3, so this rule ignores cell 0
    ca = ca1(F3, [0, 1], "x0_0^3 - x0_0 + x1_0")
    m = minimal_memory(ca)
    assert m.memory == ((1,),) and m.memory_kind == "minimal"
    assert same_semantics(m, ca)[0]


def test_minimal_memory_over_q_is_syntactic():
    Q1 = RationalAffineAlphabet(1)
    ca = make_ca(Z, [(0,), (1,)], polynomial_rule(Q1, 2, ["x1_0^2"]))
    m = minimal_memory(ca)
    assert m.memory == ((1,),) and m.memory_kind == "syntactic-minimal"


def test_minimal_memory_on_variety_uses_base_point():
    F = PrimeField(5)
    circle = enumerate_points(5, 2, [parse_polynomial("u0^2 + u1^2 - 1", F, ("u0", "u1"))])
    rule = polynomial_rule(circle, 2, ["x0_0*x1_0 - x0_1*x1_1 + 0*x1_0", "x0_0*x1_1 + x0_1*x1_0"])
    ca = make_ca(Z, [(0,), (1,)], rule)
    m = minimal_memory(ca)
    assert m.memory == ca.memory
    assert same_semantics(m, ca)[0]


def test_pad_refuses_empty_alphabet():
    F = PrimeField(3)
    empty = enumerate_points(3, 1, [parse_polynomial("u0^2 + 1", F, ("u0",))])
    assert empty.size == 0
    ca = make_ca(Z, [(0,)], RegularMap(empty, 1, body=[parse_polynomial("x0_0", F, ("x0_0",))]))
    with pytest.raises(CAError):
        pad_memory(ca, [(1,)])


@given(st.randoms(use_true_random=False))
def test_pad_then_minimize_preserves_semantics(r):
    ca = random_ca(r, 3)
    extra = [(r.randint(3, 6),), (r.randint(-6, -3),)]
    padded = pad_memory(ca, extra)
    assert len(padded.memory) == len(ca.memory) + 2
    m = minimal_memory(padded)
    assert set(m.memory) <= set(ca.memory)
    assert same_semantics(m, ca)[0]


# -- locality and equivariance -----------------------------------------------------------

@given(st.randoms(use_true_random=False))
def test_locality(r):
    ca = random_ca(r, 2)
    omega = [(i,) for i in range(r.randint(-2, 0), r.randint(1, 3))]
    support = product_set(omega, ca.memory, Z)
    big = [(i,) for i in range(support[0][0] - 2, support[-1][0] + 3)]
    u = {g: (r.randrange(2),) for g in big}
    v = {g: u[g] if g in support else (r.randrange(2),) for g in big}
    ou = apply_window(ca, WindowPattern.from_mapping(Z, u))
    ov = apply_window(ca, WindowPattern.from_mapping(Z, v))
    assert all(ou[g] == ov[g] for g in omega)
    assert all(ou[g] == eval_cell(ca, u, g) for g in omega)


@given(st.randoms(use_true_random=False), st.integers(-5, 5))
def test_equivariance(r, t):
    ca = random_ca(r, 3)
    window = [(i,) for i in range(-6, 7)]
    u = {g: (r.randrange(3),) for g in window}
    shifted = {(g[0] + t,): v for g, v in u.items()}
    out = apply_window(ca, WindowPattern.from_mapping(Z, u))
    out_shifted = apply_window(ca, WindowPattern.from_mapping(Z, shifted))
    assert all(out_shifted[(g[0] + t,)] == out[g] for g in out.window)
