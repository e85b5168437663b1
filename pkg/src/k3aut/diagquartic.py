"""The 48 lines on x^4 - y^4 = c (z^4 - w^4) and the resulting Picard data.

Field arithmetic happens in Q(zeta, gamma) with zeta^4 = -1 (a primitive 8th
root of unity) and gamma^4 = c, as a 16-dimensional algebra over Q with basis
zeta^i gamma^j (0 <= i, j <= 3).
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from fractions import Fraction
from math import isqrt

from .exactcore import IntMat, rank, rational_solve, smith_normal_form
from .lattice import Lattice, fixed_sublattice, orthogonal_complement, reduce_definite_basis, short_vectors


class DiagonalError(ValueError):
    pass


def _is_rational_square(x: Fraction) -> bool:
    if x < 0:
        return False
    n, d = x.numerator, x.denominator
    return isqrt(n) ** 2 == n and isqrt(d) ** 2 == d


def admissible_c(c) -> bool:
    """True iff |c| is neither a rational square nor twice one."""
    c = Fraction(c)
    if c == 0:
        raise DiagonalError("c must be nonzero")
    a = abs(c)
    return not (_is_rational_square(a) or _is_rational_square(a / 2))


class NFElem:
    """Element of Q(zeta_8, c^(1/4)) as 16 rational coordinates."""

    __slots__ = ("c", "v")

    def __init__(self, c, coords):
        self.c = Fraction(c)
        self.v = tuple(Fraction(x) for x in coords)
        if len(self.v) != 16:
            raise DiagonalError("need 16 coordinates")

    @classmethod
    def zero(cls, c):
        return cls(c, [0] * 16)

    @classmethod
    def scalar(cls, c, a):
        v = [0] * 16
        v[0] = a
        return cls(c, v)

    @classmethod
    def monomial(cls, c, i: int, j: int, coeff=1) -> "NFElem":
        """coeff * zeta^i gamma^j for any integers i, j >= 0."""
        coeff = Fraction(coeff)
        i %= 8
        if i >= 4:
            i -= 4
            coeff = -coeff
        q, j = divmod(j, 4)
        coeff *= Fraction(c) ** q
        v = [0] * 16
        v[4 * i + j] = coeff
        return cls(c, v)

    def __eq__(self, other):
        return isinstance(other, NFElem) and self.c == other.c and self.v == other.v

    def __hash__(self):
        return hash((self.c, self.v))

    def __repr__(self):
        terms = [f"{x}*z^{k // 4}g^{k % 4}" for k, x in enumerate(self.v) if x]
        return "NF(" + (" + ".join(terms) or "0") + ")"

    def is_zero(self):
        return not any(self.v)

    def _coerce(self, other):
        if isinstance(other, NFElem):
            return other
        return NFElem.scalar(self.c, other)

    def __add__(self, other):
        other = self._coerce(other)
        return NFElem(self.c, [a + b for a, b in zip(self.v, other.v)])

    __radd__ = __add__

    def __neg__(self):
        return NFElem(self.c, [-a for a in self.v])

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        other = self._coerce(other)
        out = [Fraction(0)] * 16
        c = self.c
        for k1, a in enumerate(self.v):
            if not a:
                continue
            i1, j1 = divmod(k1, 4)
            for k2, b in enumerate(other.v):
                if not b:
                    continue
                i2, j2 = divmod(k2, 4)
                i, j = i1 + i2, j1 + j2
                coeff = a * b
                if i >= 4:
                    i -= 4
                    coeff = -coeff
                if j >= 4:
                    j -= 4
                    coeff *= c
                out[4 * i + j] += coeff
        return NFElem(c, out)

    __rmul__ = __mul__

    def inverse(self) -> "NFElem":
        nz = [k for k, a in enumerate(self.v) if a]
        if not nz:
            raise ZeroDivisionError("inverse of zero")
        if len(nz) == 1:
            k = nz[0]
            i, j = divmod(k, 4)
            # (a z^i g^j)^-1 = a^-1 z^(8-i) g^(4-j) / c^[j>0]
            inv = NFElem.monomial(self.c, (8 - i) % 8, (4 - j) % 4, 1 / self.v[k])
            if j:
                inv = inv * Fraction(1, 1) * NFElem.scalar(self.c, 1 / self.c)
            assert (inv * self).v == NFElem.scalar(self.c, 1).v
            return inv
        # solve (multiplication by self) x = 1
        cols = []
        for k in range(16):
            e = [0] * 16
            e[k] = 1
            cols.append((self * NFElem(self.c, e)).v)
        mat = [[cols[k][r] for k in range(16)] for r in range(16)]
        x = rational_solve(mat, [1] + [0] * 15)
        if x is None:
            raise DiagonalError("element is not invertible (c inadmissible?)")
        return NFElem(self.c, x)

    def __truediv__(self, other):
        return self * self._coerce(other).inverse()

    def __pow__(self, e: int):
        out = NFElem.scalar(self.c, 1)
        for _ in range(e):
            out = out * self
        return out

    def galois(self, a: int, k: int) -> "NFElem":
        """Image under zeta -> zeta^a, gamma -> zeta^(2k) gamma."""
        out = NFElem.zero(self.c)
        for idx, x in enumerate(self.v):
            if x:
                i, j = divmod(idx, 4)
                out = out + NFElem.monomial(self.c, a * i + 2 * k * j, j, x)
        return out


def zeta(c):
    return NFElem.monomial(c, 1, 0)


def gamma(c):
    return NFElem.monomial(c, 0, 1)


# ------------------------------------------------------------------ lines


@dataclass
class LineP3:
    family: int
    roots: tuple  # (i_alpha, i_beta): exponents of zeta in the root choices
    forms: tuple  # two linear forms, each 4 NFElem
    points: tuple  # two spanning points, each 4 NFElem

    @property
    def label(self) -> str:
        return f"F{self.family}({self.roots[0]},{self.roots[1]})"


def _root(c, family: int, i: int) -> NFElem:
    if family == 1:
        return NFElem.monomial(c, i, 0)  # zeta^i, i even: fourth roots of 1
    return NFElem.monomial(c, i, 1)  # zeta^i gamma: fourth roots of c (i even) or -c (i odd)


def _surface_value(c, pt) -> NFElem:
    x, y, z, w = pt
    return x**4 - y**4 - (z**4 - w**4) * c


def _linear(form, pt) -> NFElem:
    out = NFElem.zero(form[0].c)
    for a, b in zip(form, pt):
        if not a.is_zero() and not b.is_zero():
            out = out + a * b
    return out


def diagonal_lines(c) -> list[LineP3]:
    """The 48 lines, in the order family 1, 2, 3 and then by root exponents."""
    c = Fraction(c)
    if not admissible_c(c):
        raise DiagonalError(f"c = {c} is not admissible")
    one = NFElem.scalar(c, 1)
    zero = NFElem.zero(c)
    lines = []
    exps = {1: [0, 2, 4, 6], 2: [0, 2, 4, 6], 3: [1, 3, 5, 7]}
    for fam in (1, 2, 3):
        for ia, ib in itertools.product(exps[fam], repeat=2):
            a, b = _root(c, fam, ia), _root(c, fam, ib)
            if fam == 1:  # x = a y, z = b w
                forms = ((one, -a, zero, zero), (zero, zero, one, -b))
                pts = ((a, one, zero, zero), (zero, zero, b, one))
            elif fam == 2:  # x = a z, y = b w
                forms = ((one, zero, -a, zero), (zero, one, zero, -b))
                pts = ((a, zero, one, zero), (zero, b, zero, one))
            else:  # x = a w, y = b z
                forms = ((one, zero, zero, -a), (zero, one, -b, zero))
                pts = ((a, zero, zero, one), (zero, b, one, zero))
            line = LineP3(fam, (ia, ib), forms, pts)
            for s, t in ((1, 0), (0, 1), (1, 1), (1, 2), (2, 1)):
                pt = tuple(p * s + q * t for p, q in zip(*pts))
                if not _surface_value(c, pt).is_zero():
                    raise DiagonalError(f"line {line.label} is not on the surface")
            lines.append(line)
    return lines


def _det4(m) -> NFElem:
    total = NFElem.zero(m[0][0].c)
    for perm in itertools.permutations(range(4)):
        prod = None
        for r, col in enumerate(perm):
            e = m[r][col]
            if e.is_zero():
                prod = None
                break
            prod = e if prod is None else prod * e
        if prod is None:
            continue
        inv = sum(1 for i in range(4) for j in range(i + 1, 4) if perm[i] > perm[j])
        total = total + (prod if inv % 2 == 0 else -prod)
    return total


def lines_meet(l1: LineP3, l2: LineP3) -> bool:
    return _det4(list(l1.points) + list(l2.points)).is_zero()


def incidence_gram(lines) -> IntMat:
    n = len(lines)
    keys = {tuple(tuple(p.v for p in pt) for pt in l.points) for l in lines}
    if len(keys) != n:
        raise DiagonalError("duplicate lines")
    g = [[0] * n for _ in range(n)]
    for i in range(n):
        g[i][i] = -2
        for j in range(i + 1, n):
            if lines_meet(lines[i], lines[j]):
                g[i][j] = g[j][i] = 1
    return IntMat(g)


def _contains(line: LineP3, pt) -> bool:
    return all(_linear(f, pt).is_zero() for f in line.forms)


def galois_permutations(lines, c) -> list[tuple]:
    """Permutations of the lines induced by zeta -> zeta^a (a odd), gamma -> zeta^(2k) gamma.

    Ordered by (a, k) in {1,3,5,7} x {0,1,2,3}.
    """
    perms = []
    for a in (1, 3, 5, 7):
        for k in range(4):
            perm = []
            for line in lines:
                img = [tuple(x.galois(a, k) for x in pt) for pt in line.points]
                hits = [j for j, other in enumerate(lines) if all(_contains(other, p) for p in img)]
                if len(hits) != 1:
                    raise DiagonalError("field automorphism does not permute the lines")
                perm.append(hits[0])
            perms.append(tuple(perm))
    return perms


def compose(p, q):
    """(p o q)(i) = p[q[i]]."""
    return tuple(p[i] for i in q)


def permutation_group(perms) -> set:
    n = len(perms[0])
    ident = tuple(range(n))
    seen = {ident}
    frontier = [ident]
    while frontier:
        nxt = []
        for x in frontier:
            for s in perms:
                y = compose(s, x)
                if y not in seen:
                    seen.add(y)
                    nxt.append(y)
        frontier = nxt
    return seen


# ------------------------------------------------------------------ Picard


@dataclass
class PicardData:
    gram48: IntMat
    galois_perms: list
    picard: Lattice  # rank 20, basis = images of basis_in_lines
    basis_in_lines: list  # rows: integer combinations of line classes
    line_images: list  # coordinates of each line class in the rank-20 basis
    galois_mats: list  # action on rank-20 coordinates (columns = images of basis vectors)

    def class_of_lines(self, coeffs) -> tuple:
        """Picard coordinates of sum coeffs[i] * line_i."""
        out = [0] * self.picard.rank
        for a, img in zip(coeffs, self.line_images):
            if a:
                out = [x + a * y for x, y in zip(out, img)]
        return tuple(out)

    def to_json(self) -> str:
        return json.dumps({
            "version": 1,
            "gram48": self.gram48.tolist(),
            "galois_perms": [list(p) for p in self.galois_perms],
            "picard_gram": self.picard.gram.tolist(),
            "basis_in_lines": [list(r) for r in self.basis_in_lines],
            "line_images": [list(r) for r in self.line_images],
        }, separators=(",", ":"))


def _independent_line_basis(gram48: IntMat, r: int):
    """Greedy choice of r lines whose classes form a Z-basis of the Picard lattice, if possible."""
    n = gram48.nrows
    chosen = []
    for i in range(n):
        trial = chosen + [i]
        sub = [[gram48[a, b] for b in trial] for a in trial]
        if rank(sub) == len(trial):
            chosen = trial
        if len(chosen) == r:
            break
    return chosen


def build_picard(gram48: IntMat, perms) -> PicardData:
    """Picard lattice = Z^48 modulo the radical of gram48, with the Galois action transported."""
    n = gram48.nrows
    r = rank(gram48.rows)
    if r != 20:
        raise DiagonalError(f"gram48 has rank {r}, expected 20")
    _, d, v = smith_normal_form(gram48)
    vinv = v.inverse_unimodular()
    proj = IntMat(vinv.rows[:r])  # r x 48: line i -> column i
    basis = [tuple(v[i, k] for i in range(n)) for k in range(r)]
    # prefer a basis made of line classes when they happen to be unimodularly related
    chosen = _independent_line_basis(gram48, r)
    sub = IntMat([[proj[a, i] for i in chosen] for a in range(r)])
    if abs(sub.det()) == 1:
        basis = [tuple(int(j == i) for j in range(n)) for i in chosen]
        change = sub.inverse_unimodular()  # old coords -> new coords
        proj = change @ proj
    bm = IntMat(basis)
    g20 = bm @ gram48 @ bm.T
    line_images = [tuple(proj[a, i] for a in range(r)) for i in range(n)]
    mats = []
    for p in perms:
        cols = []
        for b in basis:
            moved = [0] * n
            for i, x in enumerate(b):
                if x:
                    moved[p[i]] += x
            cols.append(tuple(sum(proj[a, i] * moved[i] for i in range(n) if moved[i]) for a in range(r)))
        m = IntMat.from_columns(cols)
        if m.T @ g20 @ m != g20:
            raise DiagonalError("Galois action does not preserve the Picard form")
        mats.append(m)
    # consistency: pairings of projected lines reproduce gram48
    for i in range(0, n, 7):
        for j in range(n):
            gi = g20 @ line_images[j]
            if sum(a * b for a, b in zip(line_images[i], gi)) != gram48[i, j]:
                raise DiagonalError("projection does not preserve intersection numbers")
    return PicardData(gram48, list(perms), Lattice(g20), basis, line_images, mats)


def fixed_picard(pic: PicardData):
    return fixed_sublattice(pic.picard, pic.galois_mats)


def hyperplane_class(pic: PicardData, lines) -> tuple:
    """H = sum of the four lines x = y, z = beta w (the plane section x = y)."""
    idx = [i for i, l in enumerate(lines) if l.family == 1 and l.roots[0] == 0]
    if len(idx) != 4:
        raise DiagonalError("plane section x = y should consist of four lines")
    coeffs = [int(i in idx) for i in range(len(lines))]
    h = pic.class_of_lines(coeffs)
    g = pic.picard.gram
    if sum(a * b for a, b in zip(h, g @ h)) != 4:
        raise DiagonalError("hyperplane class does not have square 4")
    for img in pic.line_images:
        if sum(a * b for a, b in zip(img, g @ h)) != 1:
            raise DiagonalError("hyperplane class does not have degree 1 on every line")
    return h


@dataclass
class ConicSearch:
    conics: list  # Picard coordinates of conic classes
    line_pairs: int  # number of (D^2 = -2, D.H = 2) classes that are sums of two lines


def conic_classes(pic: PicardData, H) -> ConicSearch:
    """All classes D with D.H = 2, D^2 = -2 that are not a sum of two line classes."""
    g = pic.picard.gram
    n = pic.picard.rank
    H = tuple(H)
    comp = orthogonal_complement(pic.picard, [H])  # H-perp, negative definite
    lat = Lattice(comp.gram)
    t = reduce_definite_basis(lat)
    red_basis = t @ comp.basis  # rows in Picard coordinates
    red = Lattice(t @ comp.gram @ t.T)
    # base point: two meeting lines give a degree-2 class
    i0, j0 = next((i, j) for i in range(48) for j in range(i + 1, 48) if pic.gram48[i, j] == 1)
    d0 = tuple(a + b for a, b in zip(pic.line_images[i0], pic.line_images[j0]))
    # shift s = d0 - H/2 lies in H-perp tensor Q; coordinates in the reduced basis
    s = [Fraction(a) - Fraction(b, 2) for a, b in zip(d0, H)]
    coords = rational_solve(red_basis.T.rows, s)
    if coords is None:
        raise DiagonalError("shift vector not in the span of H-perp")
    sols = short_vectors(red, -3, shift=coords)
    pair_sums = set()
    for i in range(48):
        for j in range(i + 1, 48):
            if pic.gram48[i, j] == 1:
                pair_sums.add(tuple(a + b for a, b in zip(pic.line_images[i], pic.line_images[j])))
    conics, npairs = [], 0
    for u in sols:
        dvec = tuple(d0[k] + sum(u[a] * red_basis[a, k] for a in range(len(u))) for k in range(n))
        if sum(a * b for a, b in zip(dvec, g @ dvec)) != -2 or sum(a * b for a, b in zip(dvec, g @ H)) != 2:
            raise DiagonalError("enumerated class has wrong invariants")
        if dvec in pair_sums:
            npairs += 1
        else:
            conics.append(dvec)
    conics.sort()
    return ConicSearch(conics, npairs)


def class_orbits(vectors, mats) -> list[list[int]]:
    """Orbits of a finite set of vectors under matrices acting on columns."""
    index = {tuple(v): i for i, v in enumerate(vectors)}
    seen = set()
    orbits = []
    for i, v in enumerate(vectors):
        if i in seen:
            continue
        orb = [i]
        seen.add(i)
        frontier = [tuple(v)]
        while frontier:
            x = frontier.pop()
            for m in mats:
                y = m @ x
                j = index.get(y)
                if j is None:
                    raise DiagonalError("vector set is not Galois stable")
                if j not in seen:
                    seen.add(j)
                    orb.append(j)
                    frontier.append(y)
        orbits.append(sorted(orb))
    return orbits


def perm_orbits(perms, n) -> list[list[int]]:
    seen = set()
    out = []
    for i in range(n):
        if i in seen:
            continue
        orb = {i}
        frontier = [i]
        while frontier:
            x = frontier.pop()
            for p in perms:
                if p[x] not in orb:
                    orb.add(p[x])
                    frontier.append(p[x])
        seen |= orb
        out.append(sorted(orb))
    return out


def picard_from_json(text: str) -> PicardData:
    o = json.loads(text)
    if o.get("version") != 1:
        raise DiagonalError("unsupported Picard data version")
    gram48 = IntMat(o["gram48"])
    perms = [tuple(p) for p in o["galois_perms"]]
    pic = build_picard(gram48, perms)
    if pic.picard.gram.tolist() != o["picard_gram"]:
        raise DiagonalError("cached Picard data does not match its recomputation")
    return pic


# ------------------------------------------------------------ full chain


@dataclass
class DiagonalRun:
    c: Fraction
    lines: list
    picard: PicardData
    hyperplane: tuple
    fixed: object  # Sublattice of the Picard lattice
    overlattice: object  # Overlattice of the fixed lattice
    isometry: object  # IntMat (fixed overlattice coords -> L_N coords) or a failure string
    embedding: IntMat | None  # fixed-lattice coords -> L_N coords
    line_orbits: list
    conic_search: ConicSearch
    conic_orbits: list
    orbits: list  # GaloisOrbit, lines first
    rx: object  # RXData in fixed-lattice coordinates
    ample: tuple  # hyperplane class in fixed-lattice coordinates
    stabilizer: object = None
    reduced: object = None
    stabilizer_fixed: list = field(default_factory=list)  # reduced gens in fixed-lattice coords
    relations: list = field(default_factory=list)
    certificate: object = None


def run_diagonal(c, stages: str = "certificate", cap: int = 10**4, log=None) -> DiagonalRun:
    """Lines -> Picard data -> fixed lattice -> walls -> O(L_N) stabilizer -> coset certificate.

    ``stages`` stops early: "picard", "orbits", "stabilizer", "relations" or "certificate".
    """
    from .groupcert import (GenSet, certify_finite_quotient, discover_relations, l_n, o_ln_generators,
                            reduce_generators, sublattice_stabilizer)
    from .lattice import isometry_search, saturate_by_halving
    from .reflection import GaloisOrbit, fixed_coordinates, rx_generators
    from .exactcore import rational_inverse

    say = log or (lambda msg: None)
    c = Fraction(c)
    lines = diagonal_lines(c)
    gram48 = incidence_gram(lines)
    perms = galois_permutations(lines, c)
    pic = build_picard(gram48, perms)
    say(f"lines: {len(lines)}, Picard rank {pic.picard.rank}")
    H = hyperplane_class(pic, lines)
    fixed = fixed_picard(pic)
    flat = fixed.as_lattice()
    over = saturate_by_halving(flat)
    iso = isometry_search(over.lattice, l_n())
    emb = None
    if isinstance(iso, IntMat):
        # fixed coords z -> overlattice coords S^-T z -> L_N coords
        sinv = rational_inverse(over.basis)
        e = [[sum(iso[i, k] * sinv[j][k] for k in range(6)) for j in range(6)] for i in range(6)]
        if any(Fraction(x).denominator != 1 for r in e for x in r):
            raise DiagonalError("fixed lattice does not embed integrally in L_N")
        emb = IntMat([[int(x) for x in r] for r in e])
        if emb.T @ l_n().gram @ emb != flat.gram:
            raise DiagonalError("embedding into L_N is not isometric")
    run = DiagonalRun(c, lines, pic, H, fixed, over, iso, emb, [], None, [], [], None, ())
    if stages == "picard":
        return run
    g = pic.picard.gram
    run.line_orbits = perm_orbits(perms, len(lines))
    run.conic_search = conic_classes(pic, H)
    run.conic_orbits = class_orbits(run.conic_search.conics, pic.galois_mats)
    run.orbits = ([GaloisOrbit.from_classes([pic.line_images[i] for i in o], g) for o in run.line_orbits]
                  + [GaloisOrbit.from_classes([run.conic_search.conics[i] for i in o], g) for o in run.conic_orbits])
    run.rx = rx_generators(run.orbits, fixed.basis, g)
    run.ample = fixed_coordinates(fixed.basis, H)
    say(f"walls: {len(run.rx.walls)}")
    if stages == "orbits" or emb is None:
        return run
    target = [tuple(emb[i, j] for i in range(6)) for j in range(6)]
    run.stabilizer = sublattice_stabilizer(o_ln_generators(), target)
    run.reduced = reduce_generators(run.stabilizer.gens)
    einv = rational_inverse(emb.rows)

    def to_fixed(m):
        prod = [[sum(m[k, l] * emb[l, j] for l in range(6)) for j in range(6)] for k in range(6)]
        out = [[sum(einv[i][k] * prod[k][j] for k in range(6)) for j in range(6)] for i in range(6)]
        if any(x.denominator != 1 for r in out for x in r):
            raise DiagonalError("stabilizer element is not integral on the fixed lattice")
        return IntMat([[int(x) for x in r] for r in out])

    run.stabilizer_fixed = [to_fixed(m) for m in run.reduced.gens]
    say(f"stabilizer: {len(run.stabilizer.gens)} generators, reduced to {len(run.reduced.gens)}")
    if stages == "stabilizer":
        return run
    run.relations = discover_relations(GenSet(flat, run.stabilizer_fixed), 5, run.rx.generators, 4)
    say(f"relations: {len(run.relations)}")
    if stages == "relations":
        return run
    run.certificate = certify_finite_quotient(run.stabilizer_fixed, run.rx.walls, flat.gram, run.ample, cap=cap)
    return run
