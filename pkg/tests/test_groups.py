import itertools

import pytest
from hypothesis import given, strategies as st

from algca.groups import (CosetSpace, FiniteGroup, FiniteIndexSubgroup, FreeAbelian, GroupError, box,
                          canonical, diagonal, finite_subgroups, hermite_normal_form, interior,
                          product_set, separating_subgroup, sublattice, subgroup_schedule)

Z, Z2 = FreeAbelian(1), FreeAbelian(2)


def pts(*xs):
    return tuple((x,) for x in xs)


small_sets = st.lists(st.integers(-4, 4), min_size=1, max_size=4, unique=True).map(lambda xs: canonical(Z, [(x,) for x in xs]))


# -- finite subsets -------------------------------------------------------------

def test_product_set_examples():
    assert product_set(pts(0, 1), pts(0, 1), Z) == pts(0, 1, 2)
    omega = box([0, 0], [1, 2])
    assert product_set(((0, 0),), omega, Z2) == omega
    assert product_set(pts(1), pts(1), Z) == pts(2)


def test_product_set_rejects_rank_mismatch():
    with pytest.raises(GroupError):
        product_set(pts(0), ((0, 0),), Z)


def test_interior_examples():
    assert interior(pts(0, 1, 2, 3, 4), pts(0, 1), Z) == pts(0, 1, 2, 3)
    assert interior(pts(0, 1, 2), pts(0, 1), Z) == pts(0, 1)
    assert interior(pts(-3, 5, 7), pts(0), Z) == pts(-3, 5, 7)
    assert interior(pts(0), pts(0, 5), Z) == ()


@given(small_sets, small_sets, small_sets)
def test_product_set_associative(s, t, u):
    assert product_set(product_set(s, t, Z), u, Z) == product_set(s, product_set(t, u, Z), Z)


@given(small_sets, small_sets)
def test_omega_inside_interior_of_its_product(omega, m):
    assert set(omega) <= set(interior(product_set(omega, m, Z), m, Z))


@given(small_sets, small_sets, small_sets)
def test_interior_monotone(omega, extra, m):
    big = canonical(Z, set(omega) | set(extra))
    assert set(interior(omega, m, Z)) <= set(interior(big, m, Z))


# -- finite groups -------------------------------------------------------------

def test_finite_group_validation():
    with pytest.raises(GroupError):
        FiniteGroup(("e", "a"), ((0, 1), (1, 1)))  # no inverse for a
    s3 = FiniteGroup.symmetric(3)
    assert s3.order == 6
    for a, b, c in itertools.product(range(6), repeat=3):
        assert s3.mul(s3.mul(a, b), c) == s3.mul(a, s3.mul(b, c))


def test_subgroups_of_s3():
    subs = finite_subgroups(FiniteGroup.symmetric(3))
    assert sorted(len(K) for K in subs) == [1, 2, 2, 2, 3, 6]


def test_subgroups_of_cyclic_group_match_divisors():
    for n in range(1, 13):
        sizes = sorted(len(K) for K in finite_subgroups(FiniteGroup.cyclic(n)))
        assert sizes == [d for d in range(1, n + 1) if n % d == 0]


def test_finite_coset_space_right_cosets():
    s3 = FiniteGroup.symmetric(3)
    for K in finite_subgroups(s3):
        cs = CosetSpace(FiniteIndexSubgroup(s3, elements=K))
        assert cs.index == 6 // len(K)
        assert cs.representatives[0] == s3.identity
        for g in range(6):
            for h in K:
                assert cs.reduce(s3.mul(h, g)) == cs.reduce(g)


# -- Hermite normal form --------------------------------------------------------------

def test_hnf_examples():
    assert hermite_normal_form([[2, 0], [0, 2]]) == ((2, 0), (0, 2))
    assert hermite_normal_form([[1, 1], [0, 1]]) == ((1, 0), (0, 1))
    h = hermite_normal_form([[2, 1], [0, 1]])
    assert abs(h[0][0] * h[1][1]) == 2
    assert h == ((2, 1), (0, 1))
    with pytest.raises(GroupError):
        hermite_normal_form([[1, 2], [2, 4]])


def _in_lattice(cols, v):
    # brute-force membership: integer combination with small coefficients
    return any(all(sum(c * col[i] for c, col in zip(coefs, cols)) == v[i] for i in range(len(v)))
               for coefs in itertools.product(range(-30, 31), repeat=len(cols)))


matrices = st.lists(st.integers(-5, 5), min_size=4, max_size=4).map(lambda e: [e[:2], e[2:]]).filter(
    lambda m: m[0][0] * m[1][1] - m[0][1] * m[1][0] != 0)


@given(matrices)
def test_hnf_same_lattice_and_canonical(m):
    h = hermite_normal_form(m)
    det = abs(m[0][0] * m[1][1] - m[0][1] * m[1][0])
    assert h[0][0] * h[1][1] == det
    assert h[1][0] == 0 and 0 <= h[0][1] < h[0][0]
    hcols = [(h[0][j], h[1][j]) for j in range(2)]
    mcols = [(m[0][j], m[1][j]) for j in range(2)]
    # same index and each input column lies in the HNF lattice, so the lattices agree
    H = sublattice(m, Z2)
    assert all(H.contains(c) for c in mcols)
    assert all(_in_lattice(mcols, c) for c in hcols)
    # canonical: a different basis of the same lattice gives the same HNF
    u = [[mcols[0][0] + 3 * mcols[1][0], mcols[1][0]], [mcols[0][1] + 3 * mcols[1][1], mcols[1][1]]]
    assert hermite_normal_form(u) == h


# -- coset spaces ---------------------------------------------------------------

def test_coset_examples():
    cs = CosetSpace(diagonal(2, Z))
    assert cs.representatives == pts(0, 1) and cs.reduce((7,)) == 1
    cs = CosetSpace(diagonal(2, Z2))
    assert set(cs.representatives) == {(0, 0), (1, 0), (0, 1), (1, 1)} and cs.index == 4
    assert CosetSpace(diagonal(3, Z)).reduce((-1,)) == 2


@given(matrices)
def test_reduce_constant_exactly_on_cosets(m):
    H = sublattice(m, Z2)
    cs = CosetSpace(H)
    assert cs.index == len(cs.representatives)
    assert cs.reduce((0, 0)) == 0
    assert all(cs.reduce(r) == i for i, r in enumerate(cs.representatives))
    for g, g2 in itertools.product(box([-3, -3], [3, 3]), repeat=2):
        diff = (g[0] - g2[0], g[1] - g2[1])
        assert (cs.reduce(g) == cs.reduce(g2)) == H.contains(diff)


@given(matrices)
def test_centered_transversal_is_a_transversal(m):
    cs = CosetSpace(sublattice(m, Z2))
    N = cs.centered_transversal
    assert [cs.reduce(g) for g in N] == list(range(cs.index))
    assert N[0] == (0, 0)


# -- schedules ---------------------------------------------------------------------

def test_schedule_diagonal_first_then_by_index():
    sched = list(subgroup_schedule(Z2, 4))
    assert [h.hnf for h in sched[:2]] == [((1, 0), (0, 1)), ((2, 0), (0, 2))]
    rest = sched[2:]
    assert [h.index for h in rest] == sorted(h.index for h in rest)
    # number of sublattices of Z^2 of index n is sigma(n)
    for n in range(1, 5):
        assert sum(1 for h in sched if h.index == n) == sum(d for d in range(1, n + 1) if n % d == 0)


def test_separating_subgroup_examples():
    assert separating_subgroup(pts(-1, 0, 1), Z).hnf == ((3,),)
    assert separating_subgroup(pts(0), Z).index == 1
    h = separating_subgroup(((0, 0), (1, 0)), Z2)
    assert h.index == 2 and h.hnf == ((2, 0), (0, 1))


@given(st.lists(st.tuples(st.integers(-2, 2), st.integers(-2, 2)), min_size=1, max_size=4, unique=True))
def test_separating_subgroup_separates(n):
    h = separating_subgroup(n, Z2)
    cs = CosetSpace(h)
    assert len({cs.reduce(g) for g in n}) == len(n)
    # minimal: nothing of smaller index separates
    for k in subgroup_schedule(Z2, h.index - 1):
        c2 = CosetSpace(k)
        assert len({c2.reduce(g) for g in n}) < len(n)
