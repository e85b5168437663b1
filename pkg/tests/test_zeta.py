from fractions import Fraction
from math import gcd

import numpy as np
import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from k3aut.cli import load_constants
from k3aut.exactcore import RatPoly, cyclotomic
from k3aut.zeta import (
    ZetaError,
    complete_functional_equation,
    newton_coefficients,
    newton_half,
    picard_rank_bound,
    power_sums_of,
    predicted_counts,
    quotient_traces,
    reconstruct,
    satisfies_functional_equation,
    subspace_charpoly,
    subspace_traces,
    twisted_h2_traces,
    unit_root_count,
    verify_polynomial,
)

C = load_constants()
U_COUNTS = C["u3_counts"]["value"]
Y_COUNTS = C["y3_counts"]["value"]


def from_scaled(desc, scale):
    return RatPoly([Fraction(c, scale) for c in reversed(desc)])


def negate_variable(f):
    return RatPoly([c * (-1) ** k for k, c in enumerate(f.coeffs)])


def test_twisted_traces():
    assert twisted_h2_traces(U_COUNTS, 3).values[:2] == [2, Fraction(4, 3)]
    assert twisted_h2_traces(Y_COUNTS, 3).values[0] == Fraction(8, 3)


def test_subspace_traces():
    assert subspace_traces([1, 1, 4], 3) == 2
    assert subspace_traces([1, 1, 4], 4) == 6
    assert all(subspace_traces([1, 1, 1, 1], n) == 4 for n in range(1, 10))
    assert subspace_traces([], 5) == 0
    with pytest.raises(ZetaError):
        subspace_traces([0], 1)


def test_newton_small():
    assert newton_coefficients([5], 1) == [1, -5]
    assert newton_coefficients([5, 13], 2) == [1, -5, 6]  # roots 2, 3
    with pytest.raises(ZetaError):
        newton_coefficients([1], 2)
    with pytest.raises(ZetaError):
        newton_half([1, 2], 3)


def test_newton_random_rational_matrix():
    rng = np.random.default_rng(7)
    for _ in range(10):
        a = sympy.Matrix(4, 4, [sympy.Rational(int(x), int(y)) for x, y in
                                zip(rng.integers(-5, 6, 16), rng.integers(1, 4, 16))])
        ps = [Fraction(str((a**k).trace())) for k in range(1, 5)]
        t = sympy.Symbol("t")
        ref = [Fraction(str(c)) for c in a.charpoly(t).all_coeffs()]
        assert newton_coefficients(ps, 4) == ref


def test_palindromic_completion():
    comp = complete_functional_equation([1, 3, 5], 4)
    assert comp.sign == 1 and not comp.ambiguous
    assert comp.poly == RatPoly([1, 3, 5, 3, 1])


def test_ambiguous_completion():
    comp = complete_functional_equation([1, 2, 0], 4)
    assert comp.ambiguous and comp.poly is None
    assert comp.candidates[1] == RatPoly([1, 2, 0, 2, 1])
    assert comp.candidates[-1] == RatPoly([-1, -2, 0, 2, 1])
    assert satisfies_functional_equation(comp.candidates[-1], -1)


def test_unit_root_count():
    assert unit_root_count(RatPoly([1, -1442, 1])) == 0
    assert unit_root_count(cyclotomic(12) * cyclotomic(1) ** 2) == 6


def test_power_sums_round_trip():
    f = RatPoly.from_roots([2, 3, Fraction(1, 2)])
    assert power_sums_of(f, 3) == [Fraction(11, 2), Fraction(53, 4), Fraction(281, 8)]


@settings(max_examples=50, deadline=None)
@given(st.lists(st.integers(-4, 4), min_size=1, max_size=8))
def test_power_sums_inverse_to_newton(roots):
    f = RatPoly.from_roots(roots)
    ps = power_sums_of(f, len(roots))
    assert ps == [sum(Fraction(r) ** k for r in roots) for k in range(1, len(roots) + 1)]
    desc = newton_coefficients(ps, len(roots))
    assert RatPoly(list(reversed(desc))) == f


@pytest.mark.parametrize("counts,orbits,dim,bound", [(U_COUNTS, [1, 1, 4], 16, 6), (Y_COUNTS, [1, 1, 1, 1], 18, 4)])
def test_reconstruction_properties(counts, orbits, dim, bound):
    res = reconstruct(counts, 3, dim, orbits)
    f = res.charpoly
    assert res.sign == 1 and not res.ambiguous
    assert satisfies_functional_equation(f, 1)
    assert res.rank_bound == bound == picard_rank_bound(counts, 3, orbits, dim + sum(orbits))
    # 3 f is integral, primitive and not monic
    scaled = [3 * c for c in f.coeffs]
    assert all(c.denominator == 1 for c in scaled)
    g = 0
    for c in scaled:
        g = gcd(g, int(c))
    assert g == 1
    assert scaled[-1] != 1
    # round trip: f reproduces every supplied count
    ok, ns = verify_polynomial(f, counts, 3, orbits)
    assert ok and ns == list(range(1, len(counts) + 1))
    tr = quotient_traces(twisted_h2_traces(counts, 3), orbits)
    assert power_sums_of(f, len(counts)) == tr.values
    assert res.full_charpoly == f * subspace_charpoly(orbits)


def test_y3_reconstruction_is_printed_polynomial_with_negated_variable():
    exp = C["y3_zeta"]["value"]
    printed = from_scaled(exp["scaled_desc"], exp["scale"])
    res = reconstruct(Y_COUNTS, 3, 18, [1, 1, 1, 1])
    assert res.charpoly == negate_variable(printed)
    assert unit_root_count(negate_variable(printed) * subspace_charpoly([1, 1, 1, 1])) == 4
    assert unit_root_count(printed * subspace_charpoly([1, 1, 1, 1])) == 4


def test_verification_mode_on_partial_counts():
    exp = C["u3_zeta"]["value"]
    f = from_scaled(exp["scaled_desc"], exp["scale"])
    ok, ns = verify_polynomial(f, U_COUNTS[:5], 3, [1, 1, 4])
    assert ok and ns == [1, 2, 3, 4, 5]
    assert predicted_counts(f, 3, [1, 1, 4], 8) == U_COUNTS
    with pytest.raises(ZetaError):
        reconstruct(U_COUNTS[:5], 3, 16, [1, 1, 4])
