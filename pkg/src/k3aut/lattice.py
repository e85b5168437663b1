"""Integral lattices given by Gram matrices.

A sublattice is always an embedding matrix whose rows are basis vectors in
the coordinates of a fixed ambient basis; isometries act on column
coordinate vectors, so ``g`` preserves ``G`` when ``g.T @ G @ g == G``.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from fractions import Fraction
from math import isqrt
from typing import Sequence

import numpy as np

from .exactcore import (
    IntMat,
    as_intmat,
    det,
    hnf_basis,
    integer_kernel,
    rational_inverse,
    rational_solve,
    smith_normal_form,
    solve_integer,
)


class LatticeError(ValueError):
    pass


class Lattice:
    """Nondegenerate integral lattice with an optional basis labelling."""

    def __init__(self, gram, labels: Sequence[str] | None = None):
        gram = as_intmat(gram)
        if not gram.is_symmetric():
            raise LatticeError("Gram matrix must be square and symmetric")
        if det(gram) == 0:
            raise LatticeError("degenerate Gram matrix")
        if labels is not None and len(labels) != gram.nrows:
            raise LatticeError("label count does not match rank")
        self.gram = gram
        self.labels = list(labels) if labels is not None else None

    @property
    def rank(self) -> int:
        return self.gram.nrows

    def __repr__(self):
        return f"Lattice({self.gram.tolist()})"

    def __eq__(self, other):
        return isinstance(other, Lattice) and self.gram == other.gram

    def __hash__(self):
        return hash(self.gram)

    def pair(self, u, v):
        g = self.gram.rows
        return sum(u[i] * sum(g[i][j] * v[j] for j in range(len(v))) for i in range(len(u)) if u[i])

    def norm(self, v):
        return self.pair(v, v)

    def is_even(self) -> bool:
        return all(self.gram[i, i] % 2 == 0 for i in range(self.rank))

    def to_json(self) -> str:
        obj = {"gram": self.gram.tolist()}
        if self.labels is not None:
            obj["labels"] = self.labels
        return json.dumps(obj, separators=(",", ":"), sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "Lattice":
        obj = json.loads(text)
        if "gram" not in obj:
            raise LatticeError("lattice JSON needs a 'gram' entry")
        return cls(obj["gram"], obj.get("labels"))

    @classmethod
    def direct_sum(cls, *parts: "Lattice") -> "Lattice":
        n = sum(p.rank for p in parts)
        g = [[0] * n for _ in range(n)]
        k = 0
        for p in parts:
            for i in range(p.rank):
                for j in range(p.rank):
                    g[k + i][k + j] = p.gram[i, j]
            k += p.rank
        return cls(g)


def U() -> Lattice:
    return Lattice([[0, 1], [1, 0]], ["e", "f"])


def A1(scale: int = -1) -> Lattice:
    return Lattice([[2 * scale]])


def restricted_gram(gram, basis) -> IntMat:
    b = as_intmat(basis)
    return b @ as_intmat(gram) @ b.T


@dataclass
class Isometry:
    mat: IntMat
    lattice: Lattice

    def __post_init__(self):
        self.mat = as_intmat(self.mat)
        g = self.lattice.gram
        if self.mat.T @ g @ self.mat != g:
            raise LatticeError("matrix does not preserve the Gram matrix")
        if not self.mat.is_unimodular():
            raise LatticeError("isometry matrix is not unimodular")

    def __matmul__(self, other):
        if isinstance(other, Isometry):
            return Isometry(self.mat @ other.mat, self.lattice)
        return self.mat @ other

    def inverse(self) -> "Isometry":
        return Isometry(isometry_inverse(self.mat, self.lattice.gram), self.lattice)


def isometry_inverse(g: IntMat, gram: IntMat) -> IntMat:
    """g^{-1} = G^{-1} g^T G, computed exactly."""
    ginv = rational_inverse(gram.rows)
    m = g.T @ gram
    n = gram.nrows
    out = [[sum(ginv[i][k] * m[k, j] for k in range(n)) for j in range(n)] for i in range(n)]
    return IntMat([[int(x) for x in r] for r in out])


@dataclass
class GroupAction:
    generators: list
    labels: list = field(default_factory=list)

    def mats(self) -> list[IntMat]:
        return [g.mat if isinstance(g, Isometry) else as_intmat(g) for g in self.generators]


# ------------------------------------------------------------------ invariants


def symmetric_diagonalization(gram) -> list[Fraction]:
    """Diagonal of a rational congruence diagonalization (P G P^T = diag)."""
    m = [[Fraction(x) for x in r] for r in as_intmat(gram).rows]
    n = len(m)
    diag = []
    for k in range(n):
        if m[k][k] == 0:
            j = next((j for j in range(k + 1, n) if m[j][j] != 0), None)
            if j is not None:
                m[k], m[j] = m[j], m[k]
                for r in m:
                    r[k], r[j] = r[j], r[k]
            else:
                j = next((j for j in range(k + 1, n) if m[k][j] != 0), None)
                if j is not None:
                    # e_k <- e_k + e_j makes the diagonal 2 m_kj != 0
                    m[k] = [a + b for a, b in zip(m[k], m[j])]
                    for r in m:
                        r[k] += r[j]
        p = m[k][k]
        diag.append(p)
        if p == 0:
            continue
        for i in range(k + 1, n):
            f = m[i][k] / p
            if f:
                m[i] = [a - f * b for a, b in zip(m[i], m[k])]
                for r in m:
                    r[i] -= f * r[k]
    return diag


def signature(lat: Lattice) -> tuple[int, int]:
    d = symmetric_diagonalization(lat.gram)
    return sum(1 for x in d if x > 0), sum(1 for x in d if x < 0)


def determinant(lat: Lattice) -> int:
    return det(lat.gram)


def is_definite(lat: Lattice) -> bool:
    p, q = signature(lat)
    return p == 0 or q == 0


# --------------------------------------------------------- discriminant forms


def _mod2(x: Fraction) -> Fraction:
    return x - 2 * (x.numerator // (2 * x.denominator))


def _mod1(x: Fraction) -> Fraction:
    return x - (x.numerator // x.denominator)


@dataclass
class DiscriminantData:
    """Finite group L^*/L with its discriminant quadratic form.

    ``generator_lifts`` are rational vectors in the lattice basis; entry
    (i, i) of ``form_values`` is q(g_i) in [0, 2) and entry (i, j) is
    b(g_i, g_j) in [0, 1).
    """

    invariant_factors: list[int]
    generator_lifts: list[list[Fraction]]
    form_values: list[list[Fraction]]
    gram: IntMat

    @property
    def order(self) -> int:
        out = 1
        for d in self.invariant_factors:
            out *= d
        return out

    def lift(self, coords) -> list[Fraction]:
        n = self.gram.nrows
        v = [Fraction(0)] * n
        for a, g in zip(coords, self.generator_lifts):
            if a:
                v = [x + a * y for x, y in zip(v, g)]
        return v

    def q(self, vec) -> Fraction:
        """Discriminant quadratic form of a dual vector (lattice coordinates), in [0, 2)."""
        g = self.gram.rows
        n = len(vec)
        val = sum(Fraction(vec[i]) * g[i][j] * vec[j] for i in range(n) for j in range(n))
        return _mod2(val)

    def b(self, u, v) -> Fraction:
        g = self.gram.rows
        n = len(u)
        return _mod1(sum(Fraction(u[i]) * g[i][j] * v[j] for i in range(n) for j in range(n)))

    def elements(self):
        return itertools.product(*(range(d) for d in self.invariant_factors))


def discriminant_group(lat: Lattice) -> DiscriminantData:
    g = lat.gram
    u, d, _ = smith_normal_form(g)
    uinv = rational_inverse(u.rows)
    ginv = rational_inverse(g.rows)
    n = lat.rank
    factors, lifts = [], []
    for i in range(n):
        di = d[i, i]
        if abs(di) > 1:
            col = [uinv[k][i] for k in range(n)]
            lift = [sum(ginv[r][k] * col[k] for k in range(n)) for r in range(n)]
            # reduce lift modulo L to keep coordinates in [0, 1)
            lift = [_mod1(x) for x in lift]
            factors.append(abs(di))
            lifts.append(lift)
    data = DiscriminantData(factors, lifts, [], g)
    k = len(factors)
    fv = [[Fraction(0)] * k for _ in range(k)]
    for i in range(k):
        for j in range(k):
            fv[i][j] = data.q(lifts[i]) if i == j else data.b(lifts[i], lifts[j])
    data.form_values = fv
    return data


def aut_discriminant_form(data: DiscriminantData, cap: int = 2**16):
    """All automorphisms of the finite quadratic form, by exhaustive search.

    Returns (order, generators, automorphisms); each automorphism is a tuple
    of generator images in coordinate form.
    """
    if data.order > cap:
        raise LatticeError(f"discriminant group of order {data.order} exceeds cap {cap}")
    fac = data.invariant_factors
    k = len(fac)
    if k == 0:
        return 1, [], [()]
    elems = list(data.elements())
    lifts = {e: data.lift(e) for e in elems}
    qv = {e: data.q(lifts[e]) for e in elems}

    def order_of(e):
        o = 1
        for a, d in zip(e, fac):
            m = d // _gcd(a, d)
            o = o * m // _gcd(o, m)
        return o

    orders = {e: order_of(e) for e in elems}
    cands = []
    for i in range(k):
        cands.append([e for e in elems if qv[e] == data.form_values[i][i] and fac[i] % orders[e] == 0])

    autos = []

    def extend(imgs):
        i = len(imgs)
        if i == k:
            autos.append(tuple(imgs))
            return
        for e in cands[i]:
            if all(data.b(lifts[e], lifts[imgs[j]]) == data.form_values[i][j] for j in range(i)):
                extend(imgs + [e])

    extend([])
    # keep only bijective ones (a form-preserving hom of a nondegenerate form is injective)
    def image_set(a):
        out = set()
        for e in elems:
            img = [0] * k
            for c, im in zip(e, a):
                if c:
                    img = [(x + c * y) % d for x, y, d in zip(img, im, fac)]
            out.add(tuple(img))
        return out

    autos = [a for a in autos if len(image_set(a)) == len(elems)]
    gens = _greedy_generators(autos, fac)
    return len(autos), gens, autos


def _gcd(a, b):
    from math import gcd
    return gcd(a, b)


def _compose_auto(a, b, fac):
    """(a o b) on generator images."""
    out = []
    for im in b:
        img = [0] * len(fac)
        for c, ai in zip(im, a):
            if c:
                img = [(x + c * y) % d for x, y, d in zip(img, ai, fac)]
        out.append(tuple(img))
    return tuple(out)


def _greedy_generators(autos, fac):
    ident = tuple(tuple(int(i == j) for j in range(len(fac))) for i in range(len(fac)))
    gens, closure = [], {ident}
    for a in autos:
        if a in closure:
            continue
        gens.append(a)
        frontier = list(closure)
        closure = set(closure)
        while frontier:
            nxt = []
            for x in frontier:
                for g in gens:
                    y = _compose_auto(g, x, fac)
                    if y not in closure:
                        closure.add(y)
                        nxt.append(y)
            frontier = nxt
    return gens


# ------------------------------------------------------------------ sublattices


@dataclass
class Sublattice:
    """Subgroup of an ambient lattice with basis rows ``basis`` (ambient coordinates)."""

    ambient: Lattice
    basis: IntMat
    gram: IntMat

    @property
    def rank(self) -> int:
        return self.basis.nrows

    @property
    def is_degenerate(self) -> bool:
        return det(self.gram) == 0

    def as_lattice(self) -> Lattice:
        if self.is_degenerate:
            raise LatticeError("restricted form is degenerate")
        return Lattice(self.gram)

    def coordinates(self, v) -> tuple[int, ...]:
        """Coordinates of an ambient vector v in this basis (must lie in the sublattice)."""
        x = solve_integer(self.basis.T, v)
        if x is None:
            raise LatticeError("vector not in sublattice")
        return x


def sublattice(lat: Lattice, basis) -> Sublattice:
    b = IntMat(hnf_basis(as_intmat(basis).rows)) if basis else None
    if b is None:
        raise LatticeError("empty sublattice")
    return Sublattice(lat, b, restricted_gram(lat.gram, b))


def fixed_sublattice(lat: Lattice, action) -> Sublattice:
    """Subgroup fixed by every generator (exact kernel of the stacked g - 1)."""
    mats = action.mats() if isinstance(action, GroupAction) else [as_intmat(g) for g in action]
    n = lat.rank
    for g in mats:
        if g.T @ lat.gram @ g != lat.gram:
            raise LatticeError("generator does not preserve the Gram matrix")
    if not mats:
        basis = IntMat.identity(n)
    else:
        stacked = []
        for g in mats:
            stacked.extend((g - IntMat.identity(n)).rows)
        ker = integer_kernel(stacked)
        if not ker:
            raise LatticeError("fixed subgroup is zero")
        basis = IntMat(ker)
    return Sublattice(lat, basis, restricted_gram(lat.gram, basis))


def orthogonal_complement(lat: Lattice, basis) -> Sublattice:
    b = as_intmat(basis)
    if det(restricted_gram(lat.gram, b)) == 0:
        raise LatticeError("sublattice is degenerate")
    ker = integer_kernel(b @ lat.gram)
    if not ker:
        raise LatticeError("orthogonal complement is zero")
    basis_c = IntMat(ker)
    return Sublattice(lat, basis_c, restricted_gram(lat.gram, basis_c))


def is_divisible(lat: Lattice, v, k: int, basis=None) -> bool:
    """Whether v = k x for some x in the lattice.

    Without ``basis`` v is in lattice coordinates; with it, v is an ambient
    vector and the lattice is the row span of ``basis``.
    """
    if k == 0:
        raise LatticeError("division by zero")
    b = as_intmat(basis) if basis is not None else IntMat.identity(lat.rank)
    if solve_integer(b.T, v) is None:
        raise LatticeError("vector not in lattice")
    if any(x % k for x in v):
        return False
    return solve_integer(b.T, [x // k for x in v]) is not None


@dataclass
class Overlattice:
    lattice: Lattice
    index: int
    basis: list[list[Fraction]]  # rows, in coordinates of the original lattice


def _f2_kernel(mat) -> list[tuple[int, ...]]:
    """Basis of the right kernel of an integer matrix over F_2."""
    rows = [[x % 2 for x in r] for r in mat]
    n = len(rows[0])
    piv_cols = []
    r = 0
    for c in range(n):
        p = next((i for i in range(r, len(rows)) if rows[i][c]), None)
        if p is None:
            continue
        rows[r], rows[p] = rows[p], rows[r]
        for i in range(len(rows)):
            if i != r and rows[i][c]:
                rows[i] = [(a + b) % 2 for a, b in zip(rows[i], rows[r])]
        piv_cols.append(c)
        r += 1
    free = [c for c in range(n) if c not in piv_cols]
    basis = []
    for f in free:
        v = [0] * n
        v[f] = 1
        for i, c in enumerate(piv_cols):
            v[c] = rows[i][f]
        basis.append(tuple(v))
    return basis


def saturate_by_halving(lat: Lattice, rounds: int | None = 1, max_rounds: int = 64) -> Overlattice:
    """Adjoin v/2 for every v with 8 | v.v and 2 | v.w for all w.

    ``rounds`` halving steps are applied (None: repeat until stable, at most
    ``max_rounds``).  Repetition can go further than one step: the rank-6
    fixed lattice of the diagonal quartic goes index 4 then 8.
    """
    if rounds is not None:
        max_rounds = rounds
    basis = [[Fraction(int(i == j)) for j in range(lat.rank)] for i in range(lat.rank)]
    cur = lat
    index = 1
    for _ in range(max_rounds):
        g = cur.gram
        ker = _f2_kernel(g.rows)
        halves = []
        for coeffs in itertools.product((0, 1), repeat=len(ker)):
            if not any(coeffs):
                continue
            v = [sum(c * k[i] for c, k in zip(coeffs, ker)) % 2 for i in range(cur.rank)]
            if any(sum(g[i, j] * v[j] for j in range(cur.rank)) % 2 for i in range(cur.rank)):
                continue
            if cur.norm(v) % 8 == 0:
                halves.append(v)
        if not halves:
            break
        # new lattice spanned by 2 e_i and v, divided by 2
        gens = [[2 * int(i == j) for j in range(cur.rank)] for i in range(cur.rank)] + halves
        hb = hnf_basis(gens)
        step = abs(det(hb))
        step = (2 ** cur.rank) // step
        if step == 1:
            break
        new_gram = [[Fraction(cur.pair(a, b), 4) for b in hb] for a in hb]
        if any(x.denominator != 1 for r in new_gram for x in r):
            raise LatticeError("halving produced a non-integral lattice")
        basis = [
            [sum(Fraction(a[k], 2) * basis[k][j] for k in range(cur.rank)) for j in range(lat.rank)]
            for a in hb
        ]
        cur = Lattice([[int(x) for x in r] for r in new_gram])
        index *= step
    return Overlattice(cur, index, basis)


# ------------------------------------------------------------- short vectors


def _rational_cholesky(gram):
    """Q(x) = sum_i q_ii (x_i + sum_{j>i} q_ij x_j)^2 for a positive definite Gram."""
    n = gram.nrows
    q = [[Fraction(gram[i, j]) for j in range(n)] for i in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            q[j][i] = q[i][j]
            q[i][j] = q[i][j] / q[i][i]
        for k in range(i + 1, n):
            for l in range(k, n):
                q[k][l] -= q[k][i] * q[i][l]
        if q[i][i] <= 0:
            raise LatticeError("form is not positive definite")
    return q


def _int_range(center: Fraction, radius_sq: Fraction):
    """Integers x with (x - center)^2 <= radius_sq."""
    if radius_sq < 0:
        return range(0)
    s = isqrt(radius_sq.numerator // radius_sq.denominator)  # s <= sqrt(r) < s + 1
    lo = (center - s - 1).__ceil__()
    while lo <= center and (lo - center) ** 2 > radius_sq:
        lo += 1
    hi = (center + s + 1).__floor__()
    while hi >= center and (hi - center) ** 2 > radius_sq:
        hi -= 1
    if lo > hi or (lo - center) ** 2 > radius_sq:
        return range(0)
    return range(lo, hi + 1)


def _positive_gram(lat: Lattice) -> IntMat:
    p, q = signature(lat)
    if p and q:
        raise LatticeError("lattice is indefinite")
    return lat.gram if q == 0 else -lat.gram


def short_vectors(lat: Lattice, target: int, shift=None, reduce: bool = True) -> list[tuple[int, ...]]:
    """All x with (x + shift)^2 == target in a definite lattice, lexicographically sorted.

    Fincke-Pohst enumeration with an exact rational Cholesky decomposition,
    run in an LLL-reduced basis (``reduce``) and mapped back.  ``shift`` is an
    optional rational vector (for cosets / affine searches).
    """
    n = lat.rank
    c0 = [Fraction(s) for s in shift] if shift is not None else [Fraction(0)] * n
    if reduce and n > 2:
        t = lll_reduce(lat)  # rows: new basis in old coordinates; x_old = t^T y
        red = Lattice(t @ lat.gram @ t.T)
        tinv = rational_inverse(t.rows)  # shift_new = t^-T shift_old
        c_new = [sum(tinv[j][i] * c0[j] for j in range(n)) for i in range(n)]
        ys = short_vectors(red, target, c_new, reduce=False)
        out = [tuple(sum(t[k, i] * y[k] for k in range(n)) for i in range(n)) for y in ys]
        out.sort()
        return out
    g = _positive_gram(lat)
    sign = 1 if g == lat.gram else -1
    bound = Fraction(target * sign)
    if bound < 0:
        return []
    q = _rational_cholesky(g)
    out = []
    x = [0] * n

    def rec(i, remaining):
        # center for coordinate i given x_{i+1..n-1}
        c = -c0[i] - sum(q[i][j] * (x[j] + c0[j]) for j in range(i + 1, n))
        for xi in _int_range(c, remaining / q[i][i]):
            x[i] = xi
            used = q[i][i] * (xi - c) ** 2
            rest = remaining - used
            if i == 0:
                if rest == 0:
                    out.append(tuple(x))
            else:
                rec(i - 1, rest)
        x[i] = 0

    rec(n - 1, bound)
    out.sort()
    return out


def lll_reduce(lat: Lattice, delta: Fraction = Fraction(3, 4)) -> IntMat:
    """Unimodular T (rows = new basis) making the basis LLL-reduced; exact, Gram-based."""
    g = _positive_gram(lat)
    n = lat.rank
    t = [[int(i == j) for j in range(n)] for i in range(n)]
    mu = [[Fraction(0)] * n for _ in range(n)]
    B = [Fraction(0)] * n
    for i in range(n):
        for j in range(i):
            mu[i][j] = (g[i, j] - sum(mu[j][l] * mu[i][l] * B[l] for l in range(j))) / B[j]
        B[i] = g[i, i] - sum(mu[i][l] ** 2 * B[l] for l in range(i))
        if B[i] <= 0:
            raise LatticeError("form is not positive definite")

    def size_reduce(k, l):
        r = round(mu[k][l])
        if r:
            t[k] = [a - r * b for a, b in zip(t[k], t[l])]
            for j in range(l):
                mu[k][j] -= r * mu[l][j]
            mu[k][l] -= r

    k = 1
    while k < n:
        size_reduce(k, k - 1)
        if B[k] < (delta - mu[k][k - 1] ** 2) * B[k - 1]:
            m = mu[k][k - 1]
            bn = B[k] + m * m * B[k - 1]
            mu[k][k - 1] = m * B[k - 1] / bn
            B[k] = B[k - 1] * B[k] / bn
            B[k - 1] = bn
            t[k], t[k - 1] = t[k - 1], t[k]
            for j in range(k - 1):
                mu[k][j], mu[k - 1][j] = mu[k - 1][j], mu[k][j]
            for i in range(k + 1, n):
                x = mu[i][k]
                mu[i][k] = mu[i][k - 1] - m * x
                mu[i][k - 1] = x + mu[k][k - 1] * mu[i][k]
            k = max(k - 1, 1)
        else:
            for l in range(k - 2, -1, -1):
                size_reduce(k, l)
            k += 1
    return IntMat(t)


def reduce_definite_basis(lat: Lattice, max_passes: int = 1000) -> IntMat:
    """Unimodular T (rows = new basis) from greedy pairwise norm reduction.

    Repeatedly replaces b_i by b_i - k b_j when that lowers |b_i.b_i|; used
    only to shrink Fincke-Pohst search trees.
    """
    g = [list(r) for r in _positive_gram(lat).rows]
    n = len(g)
    t = [[int(i == j) for j in range(n)] for i in range(n)]
    for _ in range(max_passes):
        changed = False
        for i in range(n):
            for j in range(n):
                if i == j:
                    continue
                k = _round_div(g[i][j], g[j][j])
                if k == 0:
                    continue
                new_norm = g[i][i] - 2 * k * g[i][j] + k * k * g[j][j]
                if new_norm >= g[i][i]:
                    continue
                # b_i <- b_i - k b_j
                t[i] = [a - k * b for a, b in zip(t[i], t[j])]
                for l in range(n):
                    g[i][l] -= k * g[j][l]
                for l in range(n):
                    g[l][i] = g[i][l] if l != i else g[l][i]
                g[i][i] = new_norm
                for l in range(n):
                    if l != i:
                        g[l][i] = g[i][l]
                changed = True
        if not changed:
            break
    order = sorted(range(n), key=lambda i: g[i][i])
    return IntMat([t[i] for i in order])


def _round_div(a: int, b: int) -> int:
    return (2 * a + b) // (2 * b)


# ------------------------------------------------------------- isometries


def _parity(lat: Lattice) -> str:
    return "even" if lat.is_even() else "odd"


def isometry_search(l1: Lattice, l2: Lattice, coeff_bound: int = 5):
    """Search for an isometry l1 -> l2 with bounded image coefficients.

    Returns an IntMat ``m`` (columns = images of the l1 basis in l2
    coordinates) satisfying m^T G2 m = G1 and |det m| = 1, or the string
    "inconclusive"; cheap invariants that differ give "non-isometric".
    """
    if l1.rank != l2.rank or determinant(l1) != determinant(l2):
        return "non-isometric"
    if signature(l1) != signature(l2) or _parity(l1) != _parity(l2):
        return "non-isometric"
    n = l1.rank
    g1 = l1.gram
    g2 = np.array(l2.gram.tolist(), dtype=np.int64)
    rng = np.arange(-coeff_bound, coeff_bound + 1, dtype=np.int64)
    box = np.array(np.meshgrid(*([rng] * n), indexing="ij")).reshape(n, -1).T
    # small coefficients first, so near-trivial isometries are found first
    box = box[np.lexsort((-box.T[::-1]).tolist() + [np.abs(box).sum(axis=1)])]
    norms = np.einsum("ki,ij,kj->k", box, g2, box)
    by_norm = {}
    for i in range(n):
        want = g1[i, i]
        if want not in by_norm:
            by_norm[want] = box[norms == want]
    chosen: list[np.ndarray] = []

    def rec(i):
        if i == n:
            m = IntMat(np.array(chosen).T.tolist())
            if abs(m.det()) == 1:
                return m
            return None
        cands = by_norm[g1[i, i]]
        for j, v in enumerate(chosen):
            vg = v @ g2
            cands = cands[cands @ vg == g1[j, i]]
            if len(cands) == 0:
                return None
        for c in cands:
            chosen.append(c)
            res = rec(i + 1)
            if res is not None:
                return res
            chosen.pop()
        return None

    m = rec(0)
    if m is None:
        return "inconclusive"
    assert m.T @ l2.gram @ m == g1
    return m


def definite_isometry_group(lat: Lattice, max_rank: int = 8):
    """All isometries of a definite lattice; returns (generators, order, elements)."""
    if lat.rank > max_rank:
        raise LatticeError(f"rank {lat.rank} exceeds cap {max_rank}")
    g = lat.gram
    n = lat.rank
    pools = {}
    for i in range(n):
        t = g[i, i]
        if t not in pools:
            pools[t] = short_vectors(lat, t)
    elements = []
    chosen = []

    def rec(i):
        if i == n:
            m = IntMat(list(zip(*chosen)))
            if abs(m.det()) == 1:
                elements.append(m)
            return
        for c in pools[g[i, i]]:
            if all(lat.pair(chosen[j], c) == g[j, i] for j in range(i)):
                chosen.append(c)
                rec(i + 1)
                chosen.pop()

    rec(0)
    elements.sort(key=lambda m: m.rows)
    gens = _greedy_matrix_generators(elements)
    order = len(closure(gens, n))
    if order != len(elements):
        raise AssertionError("closure enumeration disagrees with backtracking")
    return gens, order, elements


def closure(gens: Sequence[IntMat], n: int, cap: int = 10**6) -> set[IntMat]:
    """Finite group generated by ``gens`` (BFS); raises if larger than ``cap``."""
    ident = IntMat.identity(n)
    seen = {ident}
    frontier = [ident]
    while frontier:
        nxt = []
        for x in frontier:
            for s in gens:
                y = s @ x
                if y not in seen:
                    seen.add(y)
                    nxt.append(y)
                    if len(seen) > cap:
                        raise LatticeError("group closure exceeded cap")
        frontier = nxt
    return seen


def _greedy_matrix_generators(elements: Sequence[IntMat]) -> list[IntMat]:
    if not elements:
        return []
    n = elements[0].nrows
    gens: list[IntMat] = []
    span = {IntMat.identity(n)}
    for e in elements:
        if e in span:
            continue
        gens.append(e)
        span = closure(gens, n)
    return gens


def reflection_matrix(gram, v) -> IntMat:
    """Matrix of x -> x - 2 (x.v)/(v.v) v; must be integral."""
    g = as_intmat(gram)
    gv = g @ tuple(v)
    vv = sum(a * b for a, b in zip(v, gv))
    if vv == 0:
        raise LatticeError("cannot reflect in an isotropic vector")
    n = g.nrows
    cols = []
    for j in range(n):
        xv = gv[j]  # e_j . v
        num = 2 * xv
        if num % vv:
            raise LatticeError("reflection is not integral on this lattice")
        k = num // vv
        cols.append([int(i == j) - k * v[i] for i in range(n)])
    return IntMat.from_columns(cols)


def coset_representatives(lat_basis, sub_basis) -> list[tuple[int, ...]]:
    """Representatives of L / M where both are given as row bases in common coordinates."""
    sub = as_intmat(sub_basis)
    amb = as_intmat(lat_basis)
    # coordinates of M's basis in L's basis
    coords = []
    for r in sub.rows:
        x = rational_solve(amb.T.rows, list(r))
        if x is None or any(v.denominator != 1 for v in x):
            raise LatticeError("sublattice is not contained in the lattice")
        coords.append([int(v) for v in x])
    u, d, v = smith_normal_form(coords)
    # L/M = Z^n / (rows of coords) ~ sum Z/d_i in the basis given by V^{-1}
    n = amb.nrows
    facs = [abs(d[i, i]) for i in range(min(d.shape))] + [0] * max(0, n - min(d.shape))
    if 0 in facs:
        raise LatticeError("sublattice has infinite index")
    vinv = IntMat(v.rows).inverse_unimodular()
    reps = []
    for a in itertools.product(*(range(f) for f in facs)):
        # element sum a_i (row i of V^{-1}) in L coordinates
        x = [sum(a[i] * vinv[i, j] for i in range(n)) for j in range(n)]
        reps.append(tuple(sum(x[k] * amb[k, j] for k in range(n)) for j in range(amb.ncols)))
    return reps
