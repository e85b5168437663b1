"""Exact integer matrices, normal forms and rational polynomials.

Nothing in this module touches floating point.  Matrices are immutable
row-major tuples of Python ints; polynomials carry ``Fraction`` coefficients
in ascending degree.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import gcd, isqrt
from typing import Iterable, Sequence


class IntMat:
    """Immutable integer matrix."""

    __slots__ = ("rows", "nrows", "ncols", "_hash")

    def __init__(self, rows: Iterable[Iterable[int]]):
        rows = tuple(tuple(int(x) for x in r) for r in rows)
        if not rows or not rows[0]:
            raise ValueError("matrix dimensions must be positive")
        ncols = len(rows[0])
        if any(len(r) != ncols for r in rows):
            raise ValueError("ragged matrix")
        self.rows = rows
        self.nrows = len(rows)
        self.ncols = ncols
        self._hash = None

    @classmethod
    def identity(cls, n: int) -> "IntMat":
        return cls([[int(i == j) for j in range(n)] for i in range(n)])

    @classmethod
    def diag(cls, entries: Sequence[int]) -> "IntMat":
        n = len(entries)
        return cls([[entries[i] if i == j else 0 for j in range(n)] for i in range(n)])

    @classmethod
    def from_columns(cls, cols: Sequence[Sequence[int]]) -> "IntMat":
        return cls(zip(*cols))

    @property
    def shape(self):
        return (self.nrows, self.ncols)

    @property
    def T(self) -> "IntMat":
        return IntMat(zip(*self.rows))

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def row(self, i):
        return self.rows[i]

    def col(self, j):
        return tuple(r[j] for r in self.rows)

    def columns(self):
        return list(zip(*self.rows))

    def tolist(self):
        return [list(r) for r in self.rows]

    def __eq__(self, other):
        if not isinstance(other, IntMat):
            return NotImplemented
        return self.rows == other.rows

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(self.rows)
        return self._hash

    def __repr__(self):
        return f"IntMat({self.tolist()})"

    def __neg__(self):
        return IntMat([[-x for x in r] for r in self.rows])

    def __add__(self, other: "IntMat"):
        return IntMat([[a + b for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows)])

    def __sub__(self, other: "IntMat"):
        return IntMat([[a - b for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows)])

    def __mul__(self, k: int):
        return IntMat([[k * x for x in r] for r in self.rows])

    __rmul__ = __mul__

    def __matmul__(self, other):
        if isinstance(other, IntMat):
            if self.ncols != other.nrows:
                raise ValueError("shape mismatch")
            cols = list(zip(*other.rows))
            return IntMat([[sum(a * b for a, b in zip(r, c)) for c in cols] for r in self.rows])
        # vector
        if len(other) != self.ncols:
            raise ValueError("shape mismatch")
        return tuple(sum(a * b for a, b in zip(r, other)) for r in self.rows)

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse_unimodular() ** (-k)
        result = IntMat.identity(self.nrows)
        base = self
        while k:
            if k & 1:
                result = result @ base
            base = base @ base
            k >>= 1
        return result

    def is_square(self):
        return self.nrows == self.ncols

    def is_symmetric(self):
        return self.is_square() and all(
            self.rows[i][j] == self.rows[j][i] for i in range(self.nrows) for j in range(i)
        )

    def is_identity(self):
        return self.is_square() and all(
            x == (i == j) for i, r in enumerate(self.rows) for j, x in enumerate(r)
        )

    def det(self) -> int:
        return det(self)

    def rank(self) -> int:
        return rank(self.rows)

    def is_unimodular(self) -> bool:
        return self.is_square() and abs(self.det()) == 1

    def inverse_unimodular(self) -> "IntMat":
        inv = rational_inverse(self.rows)
        if any(x.denominator != 1 for r in inv for x in r):
            raise ValueError("matrix is not unimodular")
        return IntMat([[int(x) for x in r] for r in inv])


def as_intmat(a) -> IntMat:
    return a if isinstance(a, IntMat) else IntMat(a)


def det(a) -> int:
    """Determinant by fraction-free Bareiss elimination."""
    rows = [list(r) for r in (a.rows if isinstance(a, IntMat) else a)]
    n = len(rows)
    if any(len(r) != n for r in rows):
        raise ValueError("determinant of non-square matrix")
    sign = 1
    prev = 1
    for k in range(n - 1):
        if rows[k][k] == 0:
            for i in range(k + 1, n):
                if rows[i][k] != 0:
                    rows[k], rows[i] = rows[i], rows[k]
                    sign = -sign
                    break
            else:
                return 0
        pivot = rows[k][k]
        for i in range(k + 1, n):
            ri = rows[i]
            rik = ri[k]
            rk = rows[k]
            for j in range(k + 1, n):
                ri[j] = (ri[j] * pivot - rik * rk[j]) // prev
            ri[k] = 0
        prev = pivot
    return sign * rows[n - 1][n - 1]


def _frac_rows(a):
    rows = a.rows if isinstance(a, IntMat) else a
    return [[Fraction(x) for x in r] for r in rows]


def row_echelon(a) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form over Q; returns (rref rows, pivot columns)."""
    m = _frac_rows(a)
    if not m:
        return m, []
    nr, nc = len(m), len(m[0])
    pivots = []
    r = 0
    for c in range(nc):
        p = next((i for i in range(r, nr) if m[i][c] != 0), None)
        if p is None:
            continue
        m[r], m[p] = m[p], m[r]
        pv = m[r][c]
        m[r] = [x / pv for x in m[r]]
        for i in range(nr):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [x - f * y for x, y in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == nr:
            break
    return m, pivots


def rank(a) -> int:
    return len(row_echelon(a)[1])


def rational_inverse(a) -> list[list[Fraction]]:
    n = len(a)
    aug = [list(r) + [int(i == j) for j in range(n)] for i, r in enumerate(a)]
    m, piv = row_echelon(aug)
    if piv[:n] != list(range(n)):
        raise ZeroDivisionError("singular matrix")
    return [r[n:] for r in m[:n]]


def rational_solve(a, b) -> list[Fraction] | None:
    """Solve a x = b over Q; None if inconsistent.  Free variables are set to 0."""
    aug = [list(r) + [bi] for r, bi in zip(a, b)]
    m, piv = row_echelon(aug)
    n = len(a[0])
    if n in piv:
        return None
    x = [Fraction(0)] * n
    for r, c in zip(m, piv):
        x[c] = r[n]
    return x


def rational_kernel(a) -> list[list[Fraction]]:
    """Basis of the right kernel of ``a`` over Q."""
    m, piv = row_echelon(a)
    n = len(a[0])
    free = [c for c in range(n) if c not in piv]
    basis = []
    for f in free:
        v = [Fraction(0)] * n
        v[f] = Fraction(1)
        for r, c in zip(m, piv):
            v[c] = -r[f]
        basis.append(v)
    return basis


def _swap_rows(m, i, j):
    m[i], m[j] = m[j], m[i]


def _swap_cols(m, i, j):
    for r in m:
        r[i], r[j] = r[j], r[i]


def smith_normal_form(a) -> tuple[IntMat, IntMat, IntMat]:
    """Return (U, D, V) with U a V = D, D diagonal with d_i | d_{i+1}, d_i >= 0.

    Pivots are chosen as the nonzero entry of smallest absolute value in the
    remaining block, ties broken by lowest row and then lowest column, so the
    transforms are reproducible.
    """
    a = as_intmat(a)
    m, n = a.shape
    d = [list(r) for r in a.rows]
    u = [[int(i == j) for j in range(m)] for i in range(m)]
    v = [[int(i == j) for j in range(n)] for i in range(n)]

    def row_add(dst, src, k):  # row dst += k * row src, on d and u
        d[dst] = [x + k * y for x, y in zip(d[dst], d[src])]
        u[dst] = [x + k * y for x, y in zip(u[dst], u[src])]

    def col_add(dst, src, k):  # col dst += k * col src, on d and v
        for r in d:
            r[dst] += k * r[src]
        for r in v:
            r[dst] += k * r[src]

    t = 0
    while t < min(m, n):
        best = None
        for i in range(t, m):
            for j in range(t, n):
                x = d[i][j]
                if x and (best is None or abs(x) < best[0]):
                    best = (abs(x), i, j)
        if best is None:
            break
        _, pi, pj = best
        _swap_rows(d, t, pi)
        _swap_rows(u, t, pi)
        _swap_cols(d, t, pj)
        _swap_cols(v, t, pj)
        while True:
            p = d[t][t]
            dirty = False
            for i in range(t + 1, m):
                if d[i][t]:
                    q = d[i][t] // p
                    row_add(i, t, -q)
                    if d[i][t]:
                        dirty = True
            for j in range(t + 1, n):
                if d[t][j]:
                    q = d[t][j] // p
                    col_add(j, t, -q)
                    if d[t][j]:
                        dirty = True
            if dirty:
                # a smaller remainder exists in row/col t: move it to the pivot
                best = None
                for i in range(t, m):
                    x = d[i][t]
                    if x and (best is None or abs(x) < best[0]):
                        best = (abs(x), i, t)
                for j in range(t, n):
                    x = d[t][j]
                    if x and (best is None or abs(x) < best[0]):
                        best = (abs(x), t, j)
                _, pi, pj = best
                _swap_rows(d, t, pi)
                _swap_rows(u, t, pi)
                _swap_cols(d, t, pj)
                _swap_cols(v, t, pj)
                continue
            # divisibility of the remaining block
            bad = next(
                ((i, j) for i in range(t + 1, m) for j in range(t + 1, n) if d[i][j] % p),
                None,
            )
            if bad is None:
                break
            row_add(t, bad[0], 1)
        if d[t][t] < 0:
            d[t] = [-x for x in d[t]]
            u[t] = [-x for x in u[t]]
        t += 1
    return IntMat(u), IntMat(d), IntMat(v)


def smith_invariants(a) -> list[int]:
    _, d, _ = smith_normal_form(a)
    return [d[i, i] for i in range(min(d.shape))]


def hermite_normal_form(a) -> tuple[IntMat, IntMat]:
    """Row-style Hermite form: returns (H, U) with U a = H, U unimodular.

    H is upper echelon with positive pivots, entries above each pivot reduced
    into [0, pivot); zero rows are moved to the bottom.
    """
    a = as_intmat(a)
    m, n = a.shape
    h = [list(r) for r in a.rows]
    u = [[int(i == j) for j in range(m)] for i in range(m)]
    r = 0
    for c in range(n):
        if r == m:
            break
        while True:
            nz = [i for i in range(r, m) if h[i][c]]
            if not nz:
                break
            p = min(nz, key=lambda i: (abs(h[i][c]), i))
            h[r], h[p] = h[p], h[r]
            u[r], u[p] = u[p], u[r]
            done = True
            for i in range(r + 1, m):
                if h[i][c]:
                    q = h[i][c] // h[r][c]
                    h[i] = [x - q * y for x, y in zip(h[i], h[r])]
                    u[i] = [x - q * y for x, y in zip(u[i], u[r])]
                    if h[i][c]:
                        done = False
            if done:
                break
        if r < m and h[r][c]:
            if h[r][c] < 0:
                h[r] = [-x for x in h[r]]
                u[r] = [-x for x in u[r]]
            for i in range(r):
                q = h[i][c] // h[r][c]
                if q:
                    h[i] = [x - q * y for x, y in zip(h[i], h[r])]
                    u[i] = [x - q * y for x, y in zip(u[i], u[r])]
            r += 1
    return IntMat(h), IntMat(u)


def hnf_basis(vectors: Sequence[Sequence[int]]) -> list[tuple[int, ...]]:
    """Canonical Z-basis (nonzero HNF rows) of the lattice spanned by ``vectors``."""
    if not vectors:
        return []
    h, _ = hermite_normal_form(vectors)
    return [r for r in h.rows if any(r)]


def integer_kernel(a) -> list[tuple[int, ...]]:
    """HNF-reduced Z-basis of {x in Z^n : a x = 0}."""
    a = as_intmat(a)
    _, d, v = smith_normal_form(a)
    r = sum(1 for i in range(min(d.shape)) if d[i, i])
    cols = [v.col(j) for j in range(r, a.ncols)]
    return hnf_basis(cols)


def solve_integer(a, b) -> tuple[int, ...] | None:
    """Some x in Z^n with a x = b, or None."""
    a = as_intmat(a)
    u, d, v = smith_normal_form(a)
    ub = u @ tuple(b)
    y = [0] * a.ncols
    for i, val in enumerate(ub):
        di = d[i, i] if i < min(d.shape) else 0
        if di == 0:
            if val:
                return None
        else:
            if val % di:
                return None
            y[i] = val // di
    return v @ tuple(y)


# ---------------------------------------------------------------- polynomials


class RatPoly:
    """Univariate polynomial with exact rational coefficients (ascending)."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable = ()):
        c = [Fraction(x) for x in coeffs]
        while c and c[-1] == 0:
            c.pop()
        self.coeffs = tuple(c)

    @classmethod
    def monomial(cls, k: int, c=1) -> "RatPoly":
        return cls([0] * k + [c])

    @classmethod
    def from_roots(cls, roots) -> "RatPoly":
        p = cls([1])
        for r in roots:
            p = p * cls([-r, 1])
        return p

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self):
        return not self.coeffs

    def lead(self) -> Fraction:
        return self.coeffs[-1]

    def __eq__(self, other):
        if isinstance(other, RatPoly):
            return self.coeffs == other.coeffs
        return NotImplemented

    def __hash__(self):
        return hash(self.coeffs)

    def __repr__(self):
        return f"RatPoly({[str(c) for c in self.coeffs]})"

    def __str__(self):
        if not self.coeffs:
            return "0"
        terms = []
        for k in range(self.degree, -1, -1):
            c = self.coeffs[k]
            if c == 0:
                continue
            mono = "" if k == 0 else ("t" if k == 1 else f"t^{k}")
            if mono and abs(c) == 1:
                s = mono
            else:
                s = f"{abs(c)}" + (f"*{mono}" if mono else "")
            terms.append(("-" if c < 0 else "+", s))
        out = terms[0][1] if terms[0][0] == "+" else "-" + terms[0][1]
        for sign, s in terms[1:]:
            out += f" {sign} {s}"
        return out

    def __add__(self, other):
        other = _as_poly(other)
        n = max(len(self.coeffs), len(other.coeffs))
        a = self.coeffs + (0,) * (n - len(self.coeffs))
        b = other.coeffs + (0,) * (n - len(other.coeffs))
        return RatPoly(x + y for x, y in zip(a, b))

    __radd__ = __add__

    def __neg__(self):
        return RatPoly(-x for x in self.coeffs)

    def __sub__(self, other):
        return self + (-_as_poly(other))

    def __rsub__(self, other):
        return _as_poly(other) - self

    def __mul__(self, other):
        other = _as_poly(other)
        if not self.coeffs or not other.coeffs:
            return RatPoly()
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, x in enumerate(self.coeffs):
            if x:
                for j, y in enumerate(other.coeffs):
                    out[i + j] += x * y
        return RatPoly(out)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        out = RatPoly([1])
        for _ in range(k):
            out = out * self
        return out

    def __divmod__(self, other):
        other = _as_poly(other)
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.coeffs)
        q = [Fraction(0)] * max(0, len(rem) - len(other.coeffs) + 1)
        lead = other.coeffs[-1]
        dd = other.degree
        for k in range(len(rem) - 1, dd - 1, -1):
            c = rem[k]
            if c:
                f = c / lead
                q[k - dd] = f
                for j, y in enumerate(other.coeffs):
                    rem[k - dd + j] -= f * y
        return RatPoly(q), RatPoly(rem[:dd] if dd > 0 else [])

    def __floordiv__(self, other):
        return divmod(self, other)[0]

    def __mod__(self, other):
        return divmod(self, other)[1]

    def __call__(self, x):
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def reverse(self, degree: int | None = None) -> "RatPoly":
        """t^d f(1/t) with d = ``degree`` (default the degree of f)."""
        d = self.degree if degree is None else degree
        c = list(self.coeffs) + [0] * (d + 1 - len(self.coeffs))
        return RatPoly(reversed(c[: d + 1]))

    def denominator_lcm(self) -> int:
        out = 1
        for c in self.coeffs:
            out = out * c.denominator // gcd(out, c.denominator)
        return out

    def integer_coeffs(self) -> list[int]:
        if any(c.denominator != 1 for c in self.coeffs):
            raise ValueError("non-integral coefficients")
        return [int(c) for c in self.coeffs]


def _as_poly(x) -> RatPoly:
    return x if isinstance(x, RatPoly) else RatPoly([x])


def divisors(m: int) -> list[int]:
    small = [d for d in range(1, isqrt(m) + 1) if m % d == 0]
    return sorted(set(small + [m // d for d in small]))


def euler_phi(m: int) -> int:
    out, k, p = m, m, 2
    while p * p <= k:
        if k % p == 0:
            while k % p == 0:
                k //= p
            out -= out // p
        p += 1
    if k > 1:
        out -= out // k
    return out


@lru_cache(maxsize=None)
def cyclotomic(m: int) -> RatPoly:
    """m-th cyclotomic polynomial, by dividing t^m - 1 by Phi_d for d | m, d < m."""
    if m < 1:
        raise ValueError("cyclotomic index must be positive")
    p = RatPoly.monomial(m) - 1
    for d in divisors(m)[:-1]:
        q, r = divmod(p, cyclotomic(d))
        assert r.is_zero()
        p = q
    return p


def cyclotomic_indices_up_to_degree(n: int) -> list[int]:
    """All m with phi(m) <= n (phi(m) >= sqrt(m/2) bounds the search)."""
    return [m for m in range(1, 2 * n * n + 3) if euler_phi(m) <= n]


def cyclotomic_factorization(f: RatPoly) -> tuple[dict[int, int], RatPoly]:
    """Strip all cyclotomic factors of f by repeated exact division.

    Returns ({m: multiplicity}, cofactor).
    """
    if f.is_zero():
        raise ValueError("zero polynomial")
    mult = {}
    rest = f
    for m in cyclotomic_indices_up_to_degree(max(f.degree, 1)):
        phi = cyclotomic(m)
        while rest.degree >= phi.degree:
            q, r = divmod(rest, phi)
            if not r.is_zero():
                break
            mult[m] = mult.get(m, 0) + 1
            rest = q
    return mult, rest


def poly_is_finite_order_root_spectrum(f: RatPoly) -> bool:
    """True iff every root of f is a root of unity (f a product of cyclotomics)."""
    _, rest = cyclotomic_factorization(f)
    return rest.degree == 0


def charpoly(a) -> RatPoly:
    """Characteristic polynomial det(t I - a), via Faddeev-LeVerrier over Q."""
    rows = [[Fraction(x) for x in r] for r in (a.rows if isinstance(a, IntMat) else a)]
    n = len(rows)
    coeffs = [Fraction(0)] * (n + 1)
    coeffs[n] = Fraction(1)
    m = [[Fraction(0)] * n for _ in range(n)]
    for k in range(1, n + 1):
        # M_k = A M_{k-1} + c_{n-k+1} I
        prev = m
        m = [[sum(rows[i][l] * prev[l][j] for l in range(n)) for j in range(n)] for i in range(n)]
        for i in range(n):
            m[i][i] += coeffs[n - k + 1]
        am = [[sum(rows[i][l] * m[l][j] for l in range(n)) for j in range(n)] for i in range(n)]
        coeffs[n - k] = -sum(am[i][i] for i in range(n)) / k
    return RatPoly(coeffs)


def pell_fundamental(d: int, max_iter: int = 10**6) -> tuple[int, int]:
    """Smallest positive solution of x^2 - d y^2 = 1, via the continued fraction of sqrt(d)."""
    if d <= 1 or isqrt(d) ** 2 == d:
        raise ValueError("d must be a positive non-square integer")
    a0 = isqrt(d)
    m, q, a = 0, 1, a0
    p_prev, p = 1, a0
    r_prev, r = 0, 1
    for _ in range(max_iter):
        if p * p - d * r * r == 1:
            return p, r
        m = a * q - m
        q = (d - m * m) // q
        a = (a0 + m) // q
        p_prev, p = p, a * p + p_prev
        r_prev, r = r, a * r + r_prev
    raise RuntimeError(f"continued fraction for sqrt({d}) exceeded {max_iter} steps")
