import itertools

import pytest
from hypothesis import given, strategies as st

from algca.alphabets import (AlphabetError, RationalAffineAlphabet, RegularMap, RegularMapError, affine_line,
                             apply_map, check_regular_map, enumerate_points, polynomial_rule, projective_line,
                             projective_rule, table_rule, TableAlphabet)
from algca.fields import PrimeField
from algca.parsing import parse_polynomial
from algca.poly import MultiPoly


def eq(text, p, n):
    names = tuple(f"u{i}" for i in range(n))
    return parse_polynomial(text, PrimeField(p), names)


def test_enumerate_points_examples():
    assert affine_line(3).points == ((0,), (1,), (2,))
    assert enumerate_points(5, 1, [eq("u0^2 - 1", 5, 1)]).points == ((1,), (4,))
    assert enumerate_points(2, 2, [eq("u0 + u1", 2, 2)]).points == ((0, 0), (1, 1))


def test_enumeration_cap():
    with pytest.raises(AlphabetError):
        enumerate_points(7, 8, cap=1000)


@pytest.mark.parametrize("p", [3, 5, 7])
def test_variety_points_are_exactly_the_zero_set(p):
    e = eq("u0^2 + u1^2 - 1", p, 2)
    A = enumerate_points(p, 2, [e])
    brute = [pt for pt in itertools.product(range(p), repeat=2) if (pt[0] ** 2 + pt[1] ** 2 - 1) % p == 0]
    assert list(A.points) == brute
    assert all(A.satisfies(pt) for pt in A.points)


def test_check_regular_map_examples():
    F5 = affine_line(5)
    polynomial_rule(F5, 1, ["x0_0^3"])
    locus = enumerate_points(5, 1, [eq("u0^2 - 1", 5, 1)])
    ok = polynomial_rule(locus, 1, ["x0_0^2"])
    assert {ok.apply((x,)) for x in locus.points} == {(1,)}
    with pytest.raises(RegularMapError) as err:
        polynomial_rule(locus, 1, ["x0_0 + 1"])
    assert err.value.witness == ((1,),)


@given(st.integers(0, 2 ** 16 - 1))
def test_check_regular_map_detects_injected_violation(bits):
    # random table rules into the locus {1, 4}; corrupt one entry and expect rejection
    locus = enumerate_points(5, 1, [eq("u0^2 - 1", 5, 1)])
    combos = list(itertools.product(locus.points, repeat=2))
    table = {c: locus.points[(bits >> i) & 1] for i, c in enumerate(combos)}
    check_regular_map(RegularMap(locus, 2, table=table))
    bad = dict(table)
    bad[combos[bits % len(combos)]] = (2,)
    with pytest.raises(RegularMapError):
        check_regular_map(RegularMap(locus, 2, table=bad))


def test_apply_map_examples():
    xor = polynomial_rule(affine_line(2), 2, ["x0_0 + x1_0"])
    assert apply_map(xor, ((1,), (1,))) == (0,)
    cube = polynomial_rule(affine_line(5), 1, ["x0_0^3"])
    assert apply_map(cube, ((2,),)) == (3,)
    T = TableAlphabet(["a", "b"])
    t = table_rule(T, 1, lambda x: 1 - x)
    assert apply_map(t, (0,)) == 1
    with pytest.raises(AlphabetError):
        apply_map(cube, ((7,),))


@pytest.mark.parametrize("p", [2, 3, 5])
def test_apply_map_agrees_with_body_evaluation(p):
    A = affine_line(p)
    m = polynomial_rule(A, 2, ["x0_0^2*x1_0 + 2*x1_0 + 1"])
    for a, b in itertools.product(range(p), repeat=2):
        assert apply_map(m, ((a,), (b,))) == ((a * a * b + 2 * b + 1) % p,)


def test_rational_alphabet_flags_samples():
    Q1 = RationalAffineAlphabet(1)
    m = polynomial_rule(Q1, 2, ["x1_0 - x0_0^2"])
    assert m.provenance == "verified-on-samples"
    assert m.samples_checked == 4


def test_projective_line_and_cubing():
    A = projective_line(5)
    assert A.size == 6 and A.symbols[-1] == "1:0"
    F = PrimeField(5)
    names = ("x0_0", "x0_1")
    rule = projective_rule(5, 1, MultiPoly.var(F, names, "x0_0") ** 3, MultiPoly.var(F, names, "x0_1") ** 3)
    # cubing permutes F_5 since gcd(3, 4) = 1, and fixes the point at infinity
    assert sorted(rule.table.values()) == list(A.points)
    assert rule.table[(A.parse("1:0"),)] == A.parse("1:0")
    assert rule.table[(A.parse("2:1"),)] == A.parse("3:1")


def test_regular_map_validates_shape():
    A = affine_line(3)
    with pytest.raises(RegularMapError):
        RegularMap(A, 1)
    with pytest.raises(RegularMapError):
        polynomial_rule(A, 1, ["x0_0", "x0_0"])
