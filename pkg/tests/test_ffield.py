import itertools

import numpy as np
import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from k3aut.ffield import FieldError, Fq, count_distinct_roots, eval_poly, fq_make, least_irreducible

FIELDS = [(2, 1), (3, 1), (5, 1), (2, 3), (3, 2), (3, 3), (5, 2), (3, 4), (7, 2)]
x = sympy.Symbol("x")


def digits(e, p, n):
    return [(e // p**i) % p for i in range(n)]


def vec_mul(K, a, b):
    """Product of two vector encodings via sympy polynomial arithmetic mod the modulus."""
    pa = sympy.Poly(list(reversed(digits(a, K.p, K.n))), x, modulus=K.p)
    pb = sympy.Poly(list(reversed(digits(b, K.p, K.n))), x, modulus=K.p)
    m = sympy.Poly(list(reversed(K.modulus)), x, modulus=K.p)
    r = (pa * pb).rem(m)
    coeffs = [int(c) % K.p for c in reversed(r.all_coeffs())] if not r.is_zero else []
    return sum(c * K.p**i for i, c in enumerate(coeffs))


def vec_add(K, a, b):
    return sum(((u + v) % K.p) * K.p**i for i, (u, v) in enumerate(zip(digits(a, K.p, K.n), digits(b, K.p, K.n))))


@pytest.mark.parametrize("p,n", FIELDS)
def test_modulus_is_least_irreducible(p, n):
    m = least_irreducible(p, n)
    assert len(m) == n + 1 and m[-1] == 1
    poly = sympy.Poly(list(reversed(m)), x, modulus=p)
    assert poly.is_irreducible
    code = sum(c * p**i for i, c in enumerate(m[:-1]))
    for smaller in range(code):
        cand = digits(smaller, p, n) + [1]
        if n > 1 and cand[0] == 0:
            continue
        assert not sympy.Poly(list(reversed(cand)), x, modulus=p).is_irreducible


@pytest.mark.parametrize("p,n", FIELDS)
def test_arithmetic_against_polynomial_oracle(p, n):
    K = fq_make(p, n)
    rng = np.random.default_rng(p * 100 + n)
    for _ in range(60):
        a, b = (int(v) for v in rng.integers(0, K.q, 2))
        ca, cb = K.from_vector(a), K.from_vector(b)
        assert K.to_vector(K.mul(ca, cb)) == vec_mul(K, a, b)
        assert K.to_vector(K.add(ca, cb)) == vec_add(K, a, b)


@pytest.mark.parametrize("p,n", FIELDS)
def test_generator_is_primitive(p, n):
    K = fq_make(p, n)
    assert sorted(K.exp.tolist()) == list(range(1, K.q))
    assert K.to_vector(K.one) == 1


@settings(max_examples=200, deadline=None)
@given(st.sampled_from(FIELDS), st.data())
def test_field_axioms(field, data):
    K = fq_make(*field)
    a, b, c = (data.draw(st.integers(0, K.q - 1)) for _ in range(3))
    assert K.add(a, b) == K.add(b, a)
    assert K.add(K.add(a, b), c) == K.add(a, K.add(b, c))
    assert K.mul(a, K.add(b, c)) == K.add(K.mul(a, b), K.mul(a, c))
    assert K.sub(K.add(a, b), b) == a
    if a != K.ZERO:
        assert K.mul(a, K.inv(a)) == K.one
    assert K.frobenius(K.add(a, b)) == K.add(K.frobenius(a), K.frobenius(b))


@pytest.mark.parametrize("p,n", [(3, 2), (5, 2), (2, 4)])
def test_vectorized_matches_scalar(p, n):
    K = fq_make(p, n)
    a = np.arange(K.q)
    A, B = np.meshgrid(a, a, indexing="ij")
    va, vm = K.vadd(A, B), K.vmul(A, B)
    for i, j in itertools.product(range(K.q), repeat=2):
        assert va[i, j] == K.add(i, j) and vm[i, j] == K.mul(i, j)
    assert all(K.vneg(a)[i] == K.neg(i) for i in range(K.q))
    assert all(K.vpow(a, 3)[i] == K.pow(i, 3) for i in range(K.q))


@settings(max_examples=80, deadline=None)
@given(st.sampled_from([(3, 1), (5, 1), (3, 2), (2, 3)]), st.data())
def test_distinct_roots_by_evaluation(field, data):
    K = fq_make(*field)
    deg = data.draw(st.integers(1, 6))
    f = [data.draw(st.integers(0, K.q - 1)) for _ in range(deg)] + [data.draw(st.integers(0, K.q - 2))]
    roots = sum(1 for t in K.elements() if eval_poly(K, f, t) == K.ZERO)
    assert count_distinct_roots(f, K) == roots


def test_rejects_bad_input():
    with pytest.raises(FieldError):
        Fq(4)
    with pytest.raises(FieldError):
        Fq(3, 0)
    K = fq_make(3, 2)
    with pytest.raises(FieldError):
        K.from_vector(9)
    with pytest.raises(ZeroDivisionError):
        K.inv(K.ZERO)
