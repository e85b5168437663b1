import itertools
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from k3aut.exactcore import IntMat, det
from k3aut.groupcert import l_n
from k3aut.lattice import (
    A1,
    U,
    Lattice,
    LatticeError,
    aut_discriminant_form,
    closure,
    definite_isometry_group,
    determinant,
    discriminant_group,
    fixed_sublattice,
    isometry_search,
    lll_reduce,
    orthogonal_complement,
    reflection_matrix,
    saturate_by_halving,
    short_vectors,
    signature,
)

E8 = [[2, -1, 0, 0, 0, 0, 0, 0], [-1, 2, -1, 0, 0, 0, 0, 0], [0, -1, 2, -1, 0, 0, 0, -1],
      [0, 0, -1, 2, -1, 0, 0, 0], [0, 0, 0, -1, 2, -1, 0, 0], [0, 0, 0, 0, -1, 2, -1, 0],
      [0, 0, 0, 0, 0, -1, 2, 0], [0, 0, -1, 0, 0, 0, 0, 2]]
D4 = [[2, -1, 0, 0], [-1, 2, -1, -1], [0, -1, 2, 0], [0, -1, 0, 2]]


def brute_short(gram, target, box=3, shift=None):
    n = len(gram)
    g = np.array(gram, dtype=object)
    s = [Fraction(x) for x in shift] if shift else [Fraction(0)] * n
    out = []
    for x in itertools.product(range(-box, box + 1), repeat=n):
        v = [a + b for a, b in zip(x, s)]
        if sum(v[i] * g[i][j] * v[j] for i in range(n) for j in range(n)) == target:
            out.append(x)
    return sorted(out)


def test_l_n_invariants():
    lat = l_n()
    assert lat.rank == 6
    assert signature(lat) == (1, 5)
    assert determinant(lat) == -16
    assert lat.is_even()
    assert discriminant_group(lat).invariant_factors == [2, 2, 2, 2]


def test_aut_discriminant_order_24():
    order, gens, autos = aut_discriminant_form(discriminant_group(l_n()))
    assert order == 24 == len(autos)


def test_aut_discriminant_brute_force_oracle():
    # q(x) = -|x|/2 mod 2 on (Z/2)^4; count all of GL_4(F_2) preserving it
    vecs = [v for v in itertools.product((0, 1), repeat=4)]
    q = {v: Fraction(-sum(v), 2) % 2 for v in vecs}
    count = 0
    for cols in itertools.product(vecs[1:], repeat=4):
        m = np.array(cols).T
        imgs = {v: tuple(int(x) for x in m.dot(v) % 2) for v in vecs}
        if len(set(imgs.values())) == 16 and all(q[imgs[v]] == q[v] for v in vecs):
            count += 1
    assert count == 24


def test_signature_and_det_of_sums():
    lat = Lattice.direct_sum(U(), A1(), A1())
    assert signature(lat) == (1, 3)
    assert determinant(lat) == -4
    with pytest.raises(LatticeError):
        Lattice([[0, 0], [0, 1]])


def test_saturation_4a1_index_2():
    ov = saturate_by_halving(Lattice.direct_sum(A1(), A1(), A1(), A1()))
    assert ov.index == 2
    assert determinant(ov.lattice) == 4
    assert ov.lattice.is_even()


def test_saturation_leaves_u_alone():
    ov = saturate_by_halving(U())
    assert ov.index == 1
    assert ov.lattice.gram == U().gram


def test_saturation_until_stable():
    lat = Lattice.direct_sum(A1(), A1(), A1(), A1())
    one = saturate_by_halving(lat)
    full = saturate_by_halving(lat, rounds=None)
    assert full.index >= one.index
    for ov in (one, full):
        assert determinant(ov.lattice) * ov.index**2 == determinant(lat)


def test_saturation_rejects_non_integral_halving():
    # in 8A1 the halves of (1,1,1,1,0,0,0,0) and (1,0,0,0,1,1,1,0) pair to -1/2
    with pytest.raises(LatticeError):
        saturate_by_halving(Lattice.direct_sum(*[A1()] * 8))


@pytest.mark.parametrize("gram,target,count", [(E8, 2, 240), (E8, 4, 2160), (D4, 2, 24), (D4, 4, 24)])
def test_short_vectors_root_lattices(gram, target, count):
    vs = short_vectors(Lattice(gram), target)
    assert len(vs) == count
    assert len(set(vs)) == count


@pytest.mark.parametrize("gram", [D4, [[2, 1, 0], [1, 4, 1], [0, 1, 6]], [[4, 1], [1, 2]]])
@pytest.mark.parametrize("target", [2, 4, 6])
def test_short_vectors_against_box(gram, target):
    assert short_vectors(Lattice(gram), target) == brute_short(gram, target)


def test_short_vectors_with_shift():
    gram = [[2, 1, 0], [1, 4, 1], [0, 1, 6]]
    shift = [Fraction(1, 2), 0, Fraction(1, 2)]
    for target in (2, 4, 6):
        assert short_vectors(Lattice(gram), target, shift) == brute_short(gram, target, shift=shift)


def test_short_vectors_negative_definite():
    assert len(short_vectors(Lattice([[-2, 1], [1, -2]]), -2)) == 6


def test_lll_reduce_is_unimodular_change_of_basis():
    gram = IntMat([[10, 7, 3], [7, 6, 2], [3, 2, 5]])
    t = lll_reduce(Lattice(gram))
    assert abs(det(t)) == 1
    red = t @ gram @ t.T
    assert red[0, 0] <= min(gram[i, i] for i in range(3))


def test_fixed_sublattice_of_four_cycle():
    lat = l_n()
    cyc = IntMat.from_columns([tuple(int(i == j) for i in range(6)) for j in [0, 1, 3, 4, 5, 2]])
    sub = fixed_sublattice(lat, [cyc])
    assert sub.rank == 3
    assert det(sub.gram) == 8
    for r in sub.basis.rows:
        assert cyc @ r == r


def test_orthogonal_complement():
    lat = l_n()
    comp = orthogonal_complement(lat, [[1, 1, 0, 0, 0, 0]])
    assert comp.rank == 5
    for r in comp.basis.rows:
        assert lat.pair((1, 1, 0, 0, 0, 0), r) == 0


def test_isometry_search_witness():
    a = Lattice([[0, 1], [1, 0]])
    b = Lattice([[2, 1], [1, 0]])  # even unimodular indefinite rank 2
    m = isometry_search(a, b)
    assert isinstance(m, IntMat)
    assert m.T @ b.gram @ m == a.gram
    assert isometry_search(l_n(), Lattice.direct_sum(U(), A1(), A1(), A1(), A1(-4))) == "non-isometric"


def test_definite_isometry_group_of_a2():
    gens, order, _ = definite_isometry_group(Lattice([[2, -1], [-1, 2]]))
    assert order == 12


@settings(max_examples=60, deadline=None)
@given(st.lists(st.integers(-3, 3), min_size=6, max_size=6).filter(lambda v: any(v)))
def test_reflection_preserves_form(v):
    lat = l_n()
    n = lat.norm(v)
    if n == 0 or any((2 * x) % n for x in lat.gram @ tuple(v)):
        return
    r = reflection_matrix(lat.gram, v)
    assert r @ r == IntMat.identity(6)
    assert r.T @ lat.gram @ r == lat.gram


def test_closure_of_s4():
    cyc = IntMat.from_columns([tuple(int(i == j) for i in range(4)) for j in [1, 2, 3, 0]])
    sw = IntMat.from_columns([tuple(int(i == j) for i in range(4)) for j in [1, 0, 2, 3]])
    assert len(closure([cyc, sw], 4)) == 24
