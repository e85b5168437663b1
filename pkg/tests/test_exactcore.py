from fractions import Fraction

import numpy as np
import pytest
import sympy
from sympy.matrices.normalforms import smith_normal_form as sympy_smith
from hypothesis import given, settings
from hypothesis import strategies as st

from k3aut.exactcore import (
    IntMat,
    RatPoly,
    charpoly,
    cyclotomic,
    cyclotomic_factorization,
    det,
    divisors,
    euler_phi,
    hermite_normal_form,
    hnf_basis,
    integer_kernel,
    pell_fundamental,
    rank,
    rational_inverse,
    smith_invariants,
    smith_normal_form,
    solve_integer,
)
from k3aut.zeta import newton_coefficients

matrices = st.integers(1, 5).flatmap(
    lambda m: st.integers(1, 5).flatmap(
        lambda n: st.lists(st.lists(st.integers(-9, 9), min_size=n, max_size=n), min_size=m, max_size=m)))
square = st.integers(1, 5).flatmap(
    lambda n: st.lists(st.lists(st.integers(-6, 6), min_size=n, max_size=n), min_size=n, max_size=n))


@settings(max_examples=150, deadline=None)
@given(matrices)
def test_smith_identity(rows):
    a = IntMat(rows)
    u, d, v = smith_normal_form(a)
    assert u @ a @ v == d
    assert u.is_unimodular() and v.is_unimodular()
    diag = [d[i, i] for i in range(min(a.shape))]
    assert all(d[i, j] == 0 for i in range(a.shape[0]) for j in range(a.shape[1]) if i != j)
    nz = [x for x in diag if x]
    assert all(x > 0 for x in nz)
    assert all(b % a_ == 0 for a_, b in zip(nz, nz[1:]))
    assert diag[len(nz):] == [0] * (len(diag) - len(nz))


@settings(max_examples=100, deadline=None)
@given(matrices)
def test_smith_against_sympy(rows):
    expected = [abs(int(x)) for x in sympy_smith(sympy.Matrix(rows), domain=sympy.ZZ).diagonal()]
    got = smith_invariants(IntMat(rows))
    assert sorted(x for x in got if x) == sorted(x for x in expected if x)


@settings(max_examples=150, deadline=None)
@given(matrices)
def test_hermite_identity(rows):
    a = IntMat(rows)
    h, u = hermite_normal_form(a)
    assert u @ a == h
    assert u.is_unimodular()
    prev = -1
    for r in h.rows:
        if not any(r):
            continue
        piv = next(j for j, x in enumerate(r) if x)
        assert piv > prev and r[piv] > 0
        prev = piv
    # entries above each pivot are reduced
    for i, r in enumerate(h.rows):
        if any(r):
            piv = next(j for j, x in enumerate(r) if x)
            assert all(0 <= h[k, piv] < r[piv] for k in range(i))


@settings(max_examples=100, deadline=None)
@given(square)
def test_det_matches_sympy(rows):
    assert det(IntMat(rows)) == int(sympy.Matrix(rows).det())


@settings(max_examples=100, deadline=None)
@given(matrices)
def test_integer_kernel_and_solve(rows):
    a = IntMat(rows)
    ker = integer_kernel(a)
    assert len(ker) == a.shape[1] - rank(a)
    for k in ker:
        assert all(x == 0 for x in a @ k)
    x = tuple(range(1, a.shape[1] + 1))
    b = a @ x
    sol = solve_integer(a, b)
    assert sol is not None and a @ sol == b


def test_hnf_basis_of_lattice_span():
    assert [list(r) for r in hnf_basis([[2, 0], [0, 2], [1, 1]])] == [[1, 1], [0, 2]]


def test_rational_inverse():
    inv = rational_inverse([[2, 1], [1, 1]])
    assert inv == [[1, -1], [-1, 2]]
    inv = rational_inverse([[2, 0], [0, 4]])
    assert inv == [[Fraction(1, 2), 0], [0, Fraction(1, 4)]]


@pytest.mark.parametrize("m", range(1, 61))
def test_cyclotomic_product(m):
    prod = RatPoly([1])
    for d in divisors(m):
        prod = prod * cyclotomic(d)
    assert prod == RatPoly.monomial(m) - RatPoly([1])
    t = sympy.Symbol("t")
    ref = sympy.Poly(sympy.cyclotomic_poly(m, t), t).all_coeffs()[::-1]
    assert cyclotomic(m) == RatPoly([int(c) for c in ref])
    assert cyclotomic(m).degree == euler_phi(m)


def test_cyclotomic_factorization():
    f = RatPoly([-1, 1]) ** 2 * (RatPoly.monomial(4) - RatPoly([1])) * RatPoly([1, -1442, 1])
    mult, rest = cyclotomic_factorization(f)
    assert mult == {1: 3, 2: 1, 4: 1}
    assert rest == RatPoly([1, -1442, 1])


@pytest.mark.parametrize("d,expected", [(10, (19, 6)), (2, (3, 2)), (61, (1766319049, 226153980))])
def test_pell(d, expected):
    x, y = pell_fundamental(d)
    assert (x, y) == expected
    assert x * x - d * y * y == 1


def test_pell_rejects_square():
    with pytest.raises(ValueError):
        pell_fundamental(9)


def test_charpoly_matches_sympy():
    a = [[1, 2, 0], [3, -1, 4], [0, 5, 2]]
    t = sympy.Symbol("t")
    ref = sympy.Matrix(a).charpoly(t).all_coeffs()[::-1]
    assert charpoly(IntMat(a)) == RatPoly([int(c) for c in ref])


def test_newton_round_trip_random_matrices():
    """Power sums of random integer matrices (dim <= 8) give back the characteristic polynomial."""
    rng = np.random.default_rng(20240611)
    for _ in range(100):
        n = int(rng.integers(1, 9))
        a = rng.integers(-4, 5, size=(n, n))
        ps, m = [], np.eye(n, dtype=object)
        ao = a.astype(object)
        for _ in range(n):
            m = m.dot(ao)
            ps.append(int(np.trace(m)))
        coeffs = newton_coefficients(ps, n)  # descending, monic
        t = sympy.Symbol("t")
        ref = [int(c) for c in sympy.Matrix(a.tolist()).charpoly(t).all_coeffs()]
        assert coeffs == ref
        assert charpoly(IntMat(a.tolist())) == RatPoly(list(reversed(ref)))
