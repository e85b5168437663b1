"""Point counting and line search on projective varieties over F_{p^n}.

Points are enumerated as canonical representatives (first nonzero coordinate
equal to 1).  Both counting strategies fiber over all coordinates but the
last: ``count_direct`` evaluates every fiber at every value of the last
coordinate, ``count_fibered`` counts the distinct roots of each fiber
polynomial with a batched gcd-degree computation.
"""

from __future__ import annotations

import hashlib
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from importlib import resources

import numpy as np

from .ffield import Fq, count_distinct_roots, fq_make, poly_gcd, poly_trim

DIRECT_BUDGET = 10**9
LINE_PAIR_BUDGET = 10**7
CHUNK_CELLS = 1 << 21  # fibers x values evaluated per numpy pass


class CountingError(ValueError):
    pass


@dataclass
class SurfaceModel:
    """Homogeneous polynomials over F_p; each poly is a list of (coeff, exponents)."""

    name: str
    p: int
    ambient_dim: int
    polys: list
    texts: list = field(default_factory=list)

    def __post_init__(self):
        nv = self.ambient_dim + 1
        clean = []
        for poly in self.polys:
            terms = {}
            for c, e in poly:
                e = tuple(int(x) for x in e)
                if len(e) != nv:
                    raise CountingError("exponent vector length does not match ambient dimension")
                terms[e] = (terms.get(e, 0) + int(c)) % self.p
            terms = [(c, e) for e, c in sorted(terms.items()) if c]
            degs = {sum(e) for _, e in terms}
            if len(degs) > 1:
                raise CountingError("polynomial is not homogeneous")
            clean.append(terms)
        self.polys = clean

    @property
    def nvars(self) -> int:
        return self.ambient_dim + 1

    def degrees(self) -> list[int]:
        return [sum(poly[0][1]) if poly else 0 for poly in self.polys]

    def to_json(self) -> str:
        obj = {
            "p": self.p,
            "ambient_dim": self.ambient_dim,
            "polys": [[[c, list(e)] for c, e in poly] for poly in self.polys],
        }
        return json.dumps(obj, separators=(",", ":"), sort_keys=True)

    @classmethod
    def from_json(cls, text: str, name: str = "surface") -> "SurfaceModel":
        obj = json.loads(text)
        try:
            return cls(name, int(obj["p"]), int(obj["ambient_dim"]), obj["polys"])
        except (KeyError, TypeError) as exc:
            raise CountingError(f"malformed surface JSON: {exc}") from exc


def _data_file():
    return json.loads(resources.files("k3aut").joinpath("data/surfaces.json").read_text())


def shipped_surfaces() -> list[str]:
    return sorted(_data_file())


def load_surface(name: str) -> SurfaceModel:
    data = _data_file()
    if name not in data:
        raise CountingError(f"unknown surface {name!r}; known: {sorted(data)}")
    d = data[name]
    digest = hashlib.sha256("\n".join(d["texts"]).encode()).hexdigest()
    if digest != d["sha256"]:
        raise CountingError(f"checksum mismatch for surface {name}")
    return SurfaceModel(name, d["p"], d["ambient_dim"], d["polys"], d["texts"])


@dataclass
class PointCountSeries:
    p: int
    counts: list

    def check_inclusions(self) -> bool:
        """N_d <= N_n whenever d | n."""
        for n in range(1, len(self.counts) + 1):
            for d in range(1, n):
                if n % d == 0 and self.counts[d - 1] > self.counts[n - 1]:
                    return False
        return True

    def to_json(self) -> str:
        return json.dumps({"p": self.p, "counts": self.counts}, separators=(",", ":"))


# ----------------------------------------------------------------- compilation


class _Compiled:
    """Polynomials split by the degree of the last variable, with coefficients as codes."""

    def __init__(self, model: SurfaceModel, K: Fq):
        self.K = K
        self.m = model.nvars - 1
        self.parts = []
        for poly in model.polys:
            by_deg = {}
            for c, e in poly:
                by_deg.setdefault(e[-1], []).append((K.from_int(c), np.array(e[:-1], dtype=np.int64)))
            d = max(by_deg) if by_deg else 0
            self.parts.append([by_deg.get(k, []) for k in range(d + 1)])

    def coefficient_arrays(self, pts: np.ndarray) -> list[list[np.ndarray]]:
        """Per poly, codes of the last-variable coefficients at each fiber point."""
        K = self.K
        Z = K.ZERO
        pts64 = pts.astype(np.int64)
        is_zero = pts64 == Z
        out = []
        for coeffs in self.parts:
            arrs = []
            for terms in coeffs:
                acc = np.full(len(pts), Z, dtype=K.dtype)
                for c, e in terms:
                    logs = (pts64 * e).sum(axis=1) + c
                    vanish = (is_zero & (e > 0)).any(axis=1)
                    val = np.where(vanish, Z, logs % K.order).astype(K.dtype)
                    acc = K.vadd(acc, val)
                arrs.append(acc)
            out.append(arrs)
        return out

    def on_last_axis_point(self) -> bool:
        """Whether (0:...:0:1) lies on the variety."""
        K = self.K
        for coeffs in self.parts:
            for c, e in coeffs[-1]:
                if not e.any():
                    return False
        return True


def projective_reps(K: Fq, m: int, start: int, stop: int) -> np.ndarray:
    """Canonical representatives of P^{m-1}(F_q), rows start..stop-1 of the fixed ordering.

    Ordering: by position of the leading 1 (from the left), then by the
    remaining coordinates as base-q digits.
    """
    q = K.q
    rows = []
    offset = 0
    for lead in range(m):
        free = m - 1 - lead
        size = q**free
        lo, hi = max(start - offset, 0), min(stop - offset, size)
        if lo < hi:
            idx = np.arange(lo, hi, dtype=np.int64)
            block = np.full((hi - lo, m), K.ZERO, dtype=K.dtype)
            block[:, lead] = 0  # log code of 1
            for j in range(free):
                block[:, m - 1 - j] = (idx // q**j) % q
            rows.append(block)
        offset += size
    if not rows:
        return np.zeros((0, m), dtype=K.dtype)
    return np.concatenate(rows)


def projective_size(q: int, m: int) -> int:
    return (q**m - 1) // (q - 1)


def _chunks(total: int, size: int):
    return [(s, min(s + size, total)) for s in range(0, total, size)]


def _run_chunks(fn, chunks, threads: int):
    if threads <= 1:
        return [fn(c) for c in chunks]
    with ThreadPoolExecutor(max_workers=threads) as ex:
        return list(ex.map(fn, chunks))


# ------------------------------------------------------------------ direct


def count_direct(model: SurfaceModel, n: int, threads: int = 1, budget: int | None = DIRECT_BUDGET) -> int:
    """Number of F_{p^n}-points, by evaluating every fiber at every value of the last coordinate."""
    K = fq_make(model.p, n)
    q = K.q
    if budget is not None and q**model.ambient_dim > budget:
        raise CountingError(f"q^{model.ambient_dim} = {q ** model.ambient_dim} exceeds direct budget {budget}")
    comp = _Compiled(model, K)
    m = comp.m
    values = np.arange(q, dtype=K.dtype)[None, :]
    nfib = projective_size(q, m)
    chunk = max(1, CHUNK_CELLS // q)

    def work(rng):
        pts = projective_reps(K, m, *rng)
        ok = np.ones((len(pts), q), dtype=bool)
        for arrs in comp.coefficient_arrays(pts):
            val = np.broadcast_to(arrs[-1][:, None], (len(pts), q))
            for c in reversed(arrs[:-1]):
                val = K.vadd(K.vmul(val, values), c[:, None])
            ok &= val == K.ZERO
        return int(ok.sum())

    total = sum(_run_chunks(work, _chunks(nfib, chunk), threads))
    return total + int(comp.on_last_axis_point())


# ------------------------------------------------------------------ fibered


class _BatchPoly:
    """Arithmetic on batches of polynomials over Fq modulo monic batches f."""

    def __init__(self, K: Fq, low: np.ndarray):
        # f = x^d + sum_j low[:, j] x^j
        self.K = K
        self.low = low
        self.neg_low = K.vneg(low)
        self.d = low.shape[1]

    def reduce(self, a: np.ndarray) -> np.ndarray:
        K, d = self.K, self.d
        a = a.copy()
        for k in range(a.shape[1] - 1, d - 1, -1):
            c = a[:, k][:, None]
            a[:, k - d : k] = K.vadd(a[:, k - d : k], K.vmul(c, self.neg_low))
        if a.shape[1] < d:
            pad = np.full((a.shape[0], d - a.shape[1]), K.ZERO, dtype=K.dtype)
            a = np.concatenate([a, pad], axis=1)
        return a[:, :d]

    def mul(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        K, d = self.K, self.d
        prod = np.full((a.shape[0], 2 * d - 1), K.ZERO, dtype=K.dtype)
        for i in range(d):
            prod[:, i : i + d] = K.vadd(prod[:, i : i + d], K.vmul(a[:, i][:, None], b))
        return self.reduce(prod)

    def times_x(self, a: np.ndarray) -> np.ndarray:
        K = self.K
        top = a[:, -1][:, None]
        shifted = np.concatenate([np.full((a.shape[0], 1), K.ZERO, dtype=K.dtype), a[:, :-1]], axis=1)
        return K.vadd(shifted, K.vmul(top, self.neg_low))

    def x_power(self, e: int) -> np.ndarray:
        K, d = self.K, self.d
        m = self.low.shape[0]
        x = np.full((m, max(d, 2)), K.ZERO, dtype=K.dtype)
        x[:, 1] = 0
        x = self.reduce(x)
        result = np.full((m, d), K.ZERO, dtype=K.dtype)
        result[:, 0] = 0
        while e:
            if e & 1:
                result = self.mul(result, x)
            x = self.mul(x, x)
            e >>= 1
        return result

    def mult_matrix(self, h: np.ndarray) -> np.ndarray:
        """(batch, d, d): column j holds h * x^j mod f."""
        cols = [h]
        for _ in range(self.d - 1):
            cols.append(self.times_x(cols[-1]))
        return np.stack(cols, axis=2)


def batched_rank(K: Fq, A: np.ndarray) -> np.ndarray:
    """Rank over Fq of each matrix in a (batch, rows, cols) array of codes."""
    Z = K.ZERO
    A = A.copy()
    b, r, c = A.shape
    used = np.zeros((b, r), dtype=bool)
    rank = np.zeros(b, dtype=np.int64)
    ar = np.arange(b)
    for col in range(c):
        cand = (A[:, :, col] != Z) & ~used
        has = cand.any(axis=1)
        if not has.any():
            continue
        piv = np.argmax(cand, axis=1)
        rank += has
        used[ar[has], piv[has]] = True
        prow = A[ar, piv]  # (b, c)
        inv = K.vinv(prow[:, col])
        factor = K.vmul(A[:, :, col], inv[:, None])  # (b, r)
        sub = K.vneg(K.vmul(factor[:, :, None], prow[:, None, :]))
        mask = (~used) & has[:, None]
        A = np.where(mask[:, :, None], K.vadd(A, sub), A)
    return rank


def _fiber_root_counts(K: Fq, polys_coeffs: list[list[np.ndarray]]) -> np.ndarray:
    """Common roots in Fq of the fiber polynomials (the first poly must not vanish identically)."""
    Z = K.ZERO
    first = np.stack(polys_coeffs[0], axis=1)  # (m, d0+1)
    nfib = first.shape[0]
    nonzero = first != Z
    deg = np.where(nonzero.any(axis=1), first.shape[1] - 1 - np.argmax(nonzero[:, ::-1], axis=1), -1)
    out = np.zeros(nfib, dtype=np.int64)
    others = [np.stack(pc, axis=1) for pc in polys_coeffs[1:]]
    for d in range(1, first.shape[1]):
        sel = np.nonzero(deg == d)[0]
        if len(sel) == 0:
            continue
        f = first[sel, : d + 1]
        inv_lead = K.vinv(f[:, d])
        low = K.vmul(f[:, :d], inv_lead[:, None])
        bp = _BatchPoly(K, low)
        x = np.full((len(sel), 2), Z, dtype=K.dtype)
        x[:, 1] = 0
        h = K.vadd(bp.x_power(K.q), K.vneg(bp.reduce(x)))  # x^q - x mod f
        mats = [bp.mult_matrix(h)]
        for g in others:
            mats.append(bp.mult_matrix(bp.reduce(g[sel])))
        rank = batched_rank(K, np.concatenate(mats, axis=1))
        out[sel] = d - rank
    return out


def _scalar_fiber_count(K: Fq, polys: list[list[int]]) -> int:
    """Common roots in Fq of univariate polys (lists of codes); all-zero gives q."""
    polys = [poly_trim(K, f) for f in polys]
    polys = [f for f in polys if f]
    if not polys:
        return K.q
    g = polys[0]
    for f in polys[1:]:
        g = poly_gcd(K, g, f)
    if len(g) <= 1:
        return 0
    return count_distinct_roots(g, K)


def count_fibered(model: SurfaceModel, n: int, threads: int = 1, max_last_degree: int = 4) -> int:
    """Number of F_{p^n}-points, summing distinct-root counts over fibers of the last coordinate."""
    K = fq_make(model.p, n)
    comp = _Compiled(model, K)
    for coeffs in comp.parts:
        if len(coeffs) - 1 > max_last_degree:
            raise CountingError(f"last variable has degree {len(coeffs) - 1} > {max_last_degree}")
    m = comp.m
    Z = K.ZERO
    nfib = projective_size(K.q, m)
    chunk = 1 << 16

    def work(rng):
        pts = projective_reps(K, m, *rng)
        arrs = comp.coefficient_arrays(pts)
        if not arrs:
            return len(pts) * K.q
        first_zero = np.all(np.stack(arrs[0], axis=1) == Z, axis=1)
        total = 0
        good = ~first_zero
        if good.any():
            total += int(_fiber_root_counts(K, [[a[good] for a in pc] for pc in arrs]).sum())
        for i in np.nonzero(first_zero)[0]:
            total += _scalar_fiber_count(K, [[int(a[i]) for a in pc] for pc in arrs[1:]])
        return total

    total = sum(_run_chunks(work, _chunks(nfib, chunk), threads))
    return total + int(comp.on_last_axis_point())


def count_series(model: SurfaceModel, n_max: int, method: str = "fibered", threads: int = 1) -> PointCountSeries:
    fn = {"fibered": count_fibered, "direct": count_direct}[method]
    return PointCountSeries(model.p, [fn(model, n, threads=threads) for n in range(1, n_max + 1)])


# ------------------------------------------------------------------ lines


@dataclass(frozen=True)
class Line:
    """Line in projective space, stored as the reduced row echelon form of two spanning points.

    Coordinates are vector encodings of field elements (plain residues over F_p).
    """

    rows: tuple
    q: int

    def __repr__(self):
        return f"Line({self.rows[0]}, {self.rows[1]})"


def _rref2(K: Fq, a, b):
    rows = [list(a), list(b)]
    n = len(a)
    r = 0
    for c in range(n):
        piv = next((i for i in range(r, 2) if rows[i][c] != K.ZERO), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        inv = K.inv(rows[r][c])
        rows[r] = [K.mul(x, inv) for x in rows[r]]
        for i in range(2):
            if i != r and rows[i][c] != K.ZERO:
                f = rows[i][c]
                rows[i] = [K.sub(x, K.mul(f, y)) for x, y in zip(rows[i], rows[r])]
        r += 1
        if r == 2:
            break
    if r < 2:
        return None
    return tuple(tuple(x) for x in rows)


def _restrict(K: Fq, poly, a, b):
    """Binary form poly(s*a + t*b) as a list of codes: index j is the coefficient of s^j t^(deg-j)."""
    deg = sum(poly[0][1]) if poly else 0
    out = [K.ZERO] * (deg + 1)
    for c, e in poly:
        term = [K.from_int(c)]
        for i, k in enumerate(e):
            for _ in range(k):
                # multiply by (a_i s + b_i t): index shift for s
                new = [K.ZERO] * (len(term) + 1)
                for j, x in enumerate(term):
                    if x == K.ZERO:
                        continue
                    new[j] = K.add(new[j], K.mul(x, b[i]))
                    new[j + 1] = K.add(new[j + 1], K.mul(x, a[i]))
                term = new
        for j, x in enumerate(term):
            out[j] = K.add(out[j], x)
    return out


def _forms_share_root(K: Fq, forms) -> bool:
    """Whether binary forms (coefficient lists) have a common zero over the algebraic closure."""
    forms = [f for f in forms if any(x != K.ZERO for x in f)]
    if not forms:
        return True
    if all(f[-1] == K.ZERO for f in forms):
        return True  # common zero at s:t = 1:0
    g = poly_trim(K, forms[0])
    for f in forms[1:]:
        g = poly_gcd(K, g, poly_trim(K, f))
    return len(g) > 1


def surface_points(model: SurfaceModel, n: int = 1) -> list[tuple[int, ...]]:
    """All F_{p^n}-points as canonical code tuples (scalar enumeration)."""
    K = fq_make(model.p, n)
    nv = model.nvars
    out = []
    for s, e in _chunks(projective_size(K.q, nv), 1 << 16):
        pts = projective_reps(K, nv, s, e)
        ok = np.ones(len(pts), dtype=bool)
        for poly in model.polys:
            acc = np.full(len(pts), K.ZERO, dtype=K.dtype)
            p64 = pts.astype(np.int64)
            for c, ex in poly:
                ex = np.array(ex)
                logs = (p64 * ex).sum(axis=1) + K.from_int(c)
                vanish = ((p64 == K.ZERO) & (ex > 0)).any(axis=1)
                acc = K.vadd(acc, np.where(vanish, K.ZERO, logs % K.order).astype(K.dtype))
            ok &= acc == K.ZERO
        out.extend(tuple(int(x) for x in r) for r in pts[ok])
    return out


def find_lines(model: SurfaceModel, n: int = 1, avoid=None, budget: int = LINE_PAIR_BUDGET) -> list[Line]:
    """All F_{p^n}-rational lines on the variety.

    ``avoid`` is a list of curves, each a list of polynomials (same format as
    the model); lines meeting any of them over the algebraic closure are
    dropped.
    """
    K = fq_make(model.p, n)
    pts = surface_points(model, n)
    if len(pts) * (len(pts) - 1) // 2 > budget:
        raise CountingError("too many point pairs for line search")
    seen = set()
    lines = []
    for i in range(len(pts)):
        for j in range(i + 1, len(pts)):
            key = _rref2(K, pts[i], pts[j])
            if key is None or key in seen:
                continue
            seen.add(key)
            a, b = key
            if any(any(x != K.ZERO for x in _restrict(K, poly, a, b)) for poly in model.polys):
                continue
            if avoid:
                hit = False
                for curve in avoid:
                    curve = SurfaceModel("avoid", model.p, model.ambient_dim, curve).polys
                    if _forms_share_root(K, [_restrict(K, poly, a, b) for poly in curve]):
                        hit = True
                        break
                if hit:
                    continue
            lines.append(Line(tuple(tuple(K.to_vector(x) for x in r) for r in key), K.q))
    lines.sort(key=lambda l: l.rows)
    return lines


def line_through(p: int, n: int, a, b) -> Line:
    """Canonical Line through two points given in vector encoding."""
    K = fq_make(p, n)
    key = _rref2(K, [K.from_vector(x) for x in a], [K.from_vector(x) for x in b])
    if key is None:
        raise CountingError("points coincide")
    return Line(tuple(tuple(K.to_vector(x) for x in r) for r in key), K.q)


def line_points(line: Line, p: int, n: int = 1) -> list[tuple[int, ...]]:
    """The q+1 rational points of a line (vector encoding)."""
    K = fq_make(p, n)
    a = [K.from_vector(x) for x in line.rows[0]]
    b = [K.from_vector(x) for x in line.rows[1]]
    pts = [tuple(line.rows[1])]
    for t in range(K.q):
        pts.append(tuple(K.to_vector(K.add(x, K.mul(t, y))) for x, y in zip(a, b)))
    return pts


def vanishes_at(model: SurfaceModel, point, n: int = 1) -> bool:
    """Whether all polynomials vanish at a point given in vector encoding."""
    K = fq_make(model.p, n)
    codes = [K.from_vector(x) for x in point]
    for poly in model.polys:
        acc = K.ZERO
        for c, e in poly:
            term = K.from_int(c)
            for x, k in zip(codes, e):
                term = K.mul(term, K.pow(x, k))
            acc = K.add(acc, term)
        if acc != K.ZERO:
            return False
    return True
