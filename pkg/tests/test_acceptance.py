"""End-to-end acceptance checks, one group per criterion.

Expected numbers come from the shipped constants file.  Two assertions are
known to fail: the printed polynomial for Y over F_3 (its odd coefficients
have the wrong sign) and the fixed count of 30 stabilizer generators (the
count depends on generator order; ours is 33).  Both are asserted as
stated and left failing.
"""

import time
from fractions import Fraction

import numpy as np
import pytest
import sympy

from k3aut.cli import EXIT_OK, four_a1_report, load_constants, main, two_conics_report
from k3aut.counting import count_direct, count_fibered, load_surface, shipped_surfaces
from k3aut.exactcore import (IntMat, RatPoly, cyclotomic, divisors, hermite_normal_form, smith_normal_form)
from k3aut.groupcert import check_witnesses, l_n, verify_certificate
from k3aut.lattice import aut_discriminant_form, determinant, discriminant_group
from k3aut.reflection import GaloisOrbit, classify_orbit, folded_reflection, reflection_matrix, unfolded_reflection
from k3aut.zeta import newton_coefficients, predicted_counts, reconstruct

C = {k: v["value"] for k, v in load_constants().items()}
criterion = pytest.mark.criterion


def scaled_f(entry):
    return RatPoly([Fraction(c, entry["scale"]) for c in reversed(entry["scaled_desc"])])


def negate_variable(f):
    return RatPoly([c * (-1) ** k for k, c in enumerate(f.coeffs)])


def expect(label, observed, expected):
    ok = observed == expected
    print(f"{label}: {'PASS' if ok else 'FAIL'} observed={observed} expected={expected}")
    assert ok, f"{label}: observed {observed}, expected {expected}"


# ------------------------------------------------------------ 1


@criterion(1, "U counts over F_{3^n}, n <= 5 exact, under 2 minutes")
def test_u3_counts_fibered():
    m = load_surface("U3")
    t = time.perf_counter()
    got = [count_fibered(m, n) for n in range(1, 6)]
    elapsed = time.perf_counter() - t
    expect("U3 fibered n=1..5", got, C["u3_counts"][:5])
    assert elapsed < 120


@criterion(1, "U counts over F_{3^n}, n <= 5 exact, under 2 minutes")
def test_u3_counts_direct():
    m = load_surface("U3")
    t = time.perf_counter()
    got = [count_direct(m, n) for n in range(1, 6)]
    expect("U3 direct n=1..5", got, C["u3_counts"][:5])
    assert time.perf_counter() - t < 120


@criterion(1, "U counts over F_{3^n}, n <= 5 exact, under 2 minutes")
def test_u3_count_n6_optional():
    t = time.perf_counter()
    expect("U3 n=6", count_fibered(load_surface("U3"), 6), C["u3_counts"][5])
    assert time.perf_counter() - t < 900


# ------------------------------------------------------------ 2


@criterion(2, "Y counts over F_{3^n}, n <= 4 exact, under 2 minutes")
def test_y3_counts():
    m = load_surface("Y3")
    t = time.perf_counter()
    got = [count_fibered(m, n) for n in range(1, 5)]
    elapsed = time.perf_counter() - t
    expect("Y3 n=1..4", got, C["y3_counts"][:4])
    assert elapsed < 120


@criterion(2, "Y counts over F_{3^n}, n <= 4 exact, under 2 minutes")
def test_y3_count_n5_optional():
    t = time.perf_counter()
    expect("Y3 n=5", count_fibered(load_surface("Y3"), 5), C["y3_counts"][4])
    assert time.perf_counter() - t < 900


# ------------------------------------------------------------ 3


@criterion(3, "Frobenius polynomial from the full count tables, exact, under 1 s")
def test_u3_zeta_pipeline():
    exp = C["u3_zeta"]
    t = time.perf_counter()
    res = reconstruct(C["u3_counts"], exp["p"], exp["dim"], exp["orbits"])
    elapsed = time.perf_counter() - t
    expect("U3 f", res.charpoly, scaled_f(exp))
    assert res.sign == exp["sign"] == 1
    assert res.rank_bound == exp["rank_bound"] == 6
    assert elapsed < 1


@criterion(3, "Frobenius polynomial from the full count tables, exact, under 1 s")
def test_y3_zeta_pipeline_printed_polynomial():
    exp = C["y3_zeta"]
    t = time.perf_counter()
    res = reconstruct(C["y3_counts"], exp["p"], exp["dim"], exp["orbits"])
    elapsed = time.perf_counter() - t
    assert res.sign == 1 and res.rank_bound == exp["rank_bound"] == 4
    assert elapsed < 1
    # known failure: the printed polynomial is the reconstruction with t -> -t
    expect("Y3 f vs printed", res.charpoly, scaled_f(exp))


@criterion(3, "Frobenius polynomial from the full count tables, exact, under 1 s")
def test_y3_zeta_pipeline_sign_corrected():
    exp = C["y3_zeta"]
    res = reconstruct(C["y3_counts"], exp["p"], exp["dim"], exp["orbits"])
    expect("Y3 f vs printed(-t)", res.charpoly, negate_variable(scaled_f(exp)))
    assert res.rank_bound == 4


# ------------------------------------------------------------ 4


@criterion(4, "printed polynomials reproduce the recomputed counts")
def test_u3_verification_mode():
    exp = C["u3_zeta"]
    recomputed = [count_fibered(load_surface("U3"), n) for n in range(1, 7)]
    expect("U3 predicted", predicted_counts(scaled_f(exp), 3, exp["orbits"], 6), recomputed)


@criterion(4, "printed polynomials reproduce the recomputed counts")
def test_y3_verification_mode():
    exp = C["y3_zeta"]
    recomputed = [count_fibered(load_surface("Y3"), n) for n in range(1, 5)]
    # known failure at odd n, see the module docstring
    expect("Y3 predicted", predicted_counts(scaled_f(exp), 3, exp["orbits"], 4), recomputed)


# ------------------------------------------------------------ 5


@criterion(5, "U + 4A1 scenario, exact, under 10 s")
def test_four_a1():
    t = time.perf_counter()
    rep = four_a1_report()
    elapsed = time.perf_counter() - t
    for c in rep.checks:
        print(f"  {c['name']}: {'PASS' if c['pass'] else 'FAIL'} {c['observed']}")
    names = {c["name"]: c for c in rep.checks}
    assert names["det N"]["observed"] == -16
    assert names["isometric to U + 4A1"]["pass"]
    assert names["fixed Gram"]["observed"] == C["four_a1"]["fixed_gram"]
    assert names["smooth rational curves"]["observed"] == 9
    assert names["min ample H^2"]["observed"] == 16
    assert names["min ample witness"]["observed"] == [3, 3, 1, 1, 1, 1]
    assert rep.passed
    assert elapsed < 10


# ------------------------------------------------------------ 6


@criterion(6, "two conjugate conics scenario, exact, under 1 minute")
def test_two_conics():
    t = time.perf_counter()
    rep = two_conics_report()
    elapsed = time.perf_counter() - t
    for c in rep.checks:
        print(f"  {c['name']}: {'PASS' if c['pass'] else 'FAIL'} {c['observed']}")
    names = {c["name"]: c for c in rep.checks}
    assert names["Pell(10)"]["observed"] == [19, 6]
    assert names["A1"]["observed"] == [[1, 0], [0, -1]]
    assert names["A2"]["observed"] == [[721, 456], [-1140, -721]]
    assert names["F^2"]["observed"] == -2 and names["F.F^sigma"]["observed"] == 0
    assert names["decompositions of F"]["pass"]
    assert names["A1 A2 has infinite order"]["pass"]
    assert names["finite index certificate"]["pass"]
    assert rep.results["certificate_index"] == 4
    assert rep.passed and rep.status == "ok"
    assert elapsed < 60


# ------------------------------------------------------------ 7

DQ = C["diagonal_c3"]


@criterion(7, "diagonal quartic c = 3, full chain under 15 minutes")
def test_diagonal_lattices(diagonal_run):
    from k3aut.exactcore import rank
    run = diagonal_run
    expect("lines", len(run.lines), DQ["lines"])
    expect("gram48 rank", rank(run.picard.gram48.rows), DQ["gram_rank"])
    flat = run.fixed.as_lattice()
    expect("fixed rank", flat.rank, DQ["fixed_rank"])
    expect("fixed det", determinant(flat), DQ["fixed_det"])
    expect("overlattice index", run.overlattice.index, DQ["overlattice_index"])
    expect("overlattice det", determinant(run.overlattice.lattice), DQ["overlattice_det"])
    iso = run.isometry
    assert isinstance(iso, IntMat)
    assert iso.T @ l_n().gram @ iso == run.overlattice.lattice.gram


@criterion(7, "diagonal quartic c = 3, full chain under 15 minutes")
def test_diagonal_orbits_and_walls(diagonal_run):
    run = diagonal_run
    nl = len(run.line_orbits)
    line_finite = sum(classify_orbit(o).is_finite for o in run.orbits[:nl])
    conic_finite = sum(classify_orbit(o).is_finite for o in run.orbits[nl:])
    expect("finite line orbits", line_finite, DQ["finite_line_orbits"])
    expect("finite conic orbits", conic_finite, DQ["finite_conic_orbits"])
    expect("walls", len(run.rx.generators), DQ["walls"])


@criterion(7, "diagonal quartic c = 3, full chain under 15 minutes")
def test_diagonal_sublattice_domain(diagonal_run):
    st = diagonal_run.stabilizer
    print(f"orbit of the sublattice: {len(st.orbit)}")
    expect("sublattice domain", st.domain_size, DQ["domain"])


@criterion(7, "diagonal quartic c = 3, full chain under 15 minutes")
def test_diagonal_stabilizer_generator_count(diagonal_run):
    # known failure: 33 Schreier generators in this generator order
    expect("stabilizer generators", len(diagonal_run.stabilizer.gens), DQ["stabilizer_gens"])


@criterion(7, "diagonal quartic c = 3, full chain under 15 minutes")
def test_diagonal_reduction(diagonal_run):
    run = diagonal_run
    print(f"reduced generators: {len(run.reduced.gens)}")
    assert len(run.reduced.gens) <= DQ["reduced_max"]
    assert check_witnesses(run.stabilizer.gens, run.reduced)
    for w in run.relations:
        assert len(w) <= 5


@criterion(7, "diagonal quartic c = 3, full chain under 15 minutes")
def test_diagonal_certificate(diagonal_run, monkeypatch, capsys):
    cert = diagonal_run.certificate
    assert verify_certificate(cert)
    print(f"certificate index: {cert.index}")
    # CLI verdict on the same run (the chain itself is cached by the fixture)
    import k3aut.diagquartic as dq
    monkeypatch.setattr(dq, "run_diagonal", lambda *a, **k: diagonal_run)
    code = main(["example", "diagonal", "--c", "3"])
    out = capsys.readouterr().out
    assert code == EXIT_OK, out


@criterion(7, "diagonal quartic c = 3, full chain under 15 minutes")
def test_diagonal_runtime():
    from k3aut.diagquartic import run_diagonal
    t = time.perf_counter()
    run = run_diagonal(3)
    elapsed = time.perf_counter() - t
    print(f"full chain: {elapsed:.1f} s")
    assert verify_certificate(run.certificate)
    assert elapsed < 900


# ------------------------------------------------------------ 8


@criterion(8, "property suites")
def test_reflections_and_fold_unfold():
    conics = IntMat([[6, 2, 2], [2, -2, 0], [2, 0, -2]])
    fixed = IntMat([[1, 1, 1], [0, 1, 1]])
    ua2 = IntMat([[0, 1, 0, 0], [1, 0, 0, 0], [0, 0, -2, 1], [0, 0, 1, -2]])
    ua2_fixed = IntMat([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 1]])
    cases = [(GaloisOrbit.from_classes([(0, 1, 0), (0, 0, 1)], conics, [[1, 0]]), fixed, conics, "disjoint"),
             (GaloisOrbit.from_classes([(6, -3, -4), (6, -4, -3)], conics, [[1, 0]]), fixed, conics, "disjoint"),
             (GaloisOrbit.from_classes([(0, 0, 1, 0), (0, 0, 0, 1)], ua2, [[1, 0]]), ua2_fixed, ua2, "paired_a2")]
    for o, b, g, kind in cases:
        assert classify_orbit(o).kind == kind
        f = folded_reflection(o, b, g)
        u = unfolded_reflection(o, g)
        assert u @ b.T == b.T @ f
        assert f @ f == IntMat.identity(f.nrows)
        gf = b @ g @ b.T
        assert f.T @ gf @ f == gf
        for c in o.classes:
            r = reflection_matrix(g, c)
            assert r @ r == IntMat.identity(g.nrows) and r.T @ g @ r == g


@criterion(8, "property suites")
def test_newton_round_trip_100_matrices():
    rng = np.random.default_rng(1)
    t = sympy.Symbol("t")
    for _ in range(100):
        n = int(rng.integers(1, 9))
        a = rng.integers(-5, 6, size=(n, n)).astype(object)
        ps, m = [], np.eye(n, dtype=object)
        for _ in range(n):
            m = m.dot(a)
            ps.append(int(np.trace(m)))
        ref = [int(c) for c in sympy.Matrix(a.tolist()).charpoly(t).all_coeffs()]
        assert newton_coefficients(ps, n) == ref


@criterion(8, "property suites")
def test_direct_equals_fibered_all_models():
    for name in shipped_surfaces():
        m = load_surface(name)
        n = 1
        while m.p**n <= 81:
            assert count_direct(m, n) == count_fibered(m, n), (name, n)
            n += 1


@criterion(8, "property suites")
def test_smith_hermite_identities():
    rng = np.random.default_rng(2)
    for _ in range(100):
        r, c = (int(x) for x in rng.integers(1, 6, 2))
        a = IntMat(rng.integers(-9, 10, size=(r, c)).tolist())
        u, d, v = smith_normal_form(a)
        assert u @ a @ v == d and u.is_unimodular() and v.is_unimodular()
        h, w = hermite_normal_form(a)
        assert w @ a == h and w.is_unimodular()


@criterion(8, "property suites")
def test_discriminant_automorphisms():
    order, _, _ = aut_discriminant_form(discriminant_group(l_n()))
    expect("|Aut A_LN|", order, 24)


@criterion(8, "property suites")
def test_cyclotomic_products():
    for m in range(1, 61):
        prod = RatPoly([1])
        for d in divisors(m):
            prod = prod * cyclotomic(d)
        assert prod == RatPoly.monomial(m) - RatPoly([1]), m
