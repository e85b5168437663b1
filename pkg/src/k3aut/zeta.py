"""Frobenius characteristic polynomials on H^2 from point counts.

Recipe: Lefschetz traces on the Tate-twisted H^2, minus the traces on a
subspace spanned by known divisor classes (a permutation representation),
Newton identities for the first half of the quotient polynomial, and the
functional equation for the rest.  Everything is exact rational arithmetic.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .exactcore import RatPoly, cyclotomic_factorization, euler_phi


class ZetaError(ValueError):
    pass


@dataclass
class TraceSeries:
    p: int
    values: list  # t_1, t_2, ... as Fractions

    def __len__(self):
        return len(self.values)


def _counts_list(counts) -> list[int]:
    return list(counts.counts) if hasattr(counts, "counts") else list(counts)


def twisted_h2_traces(counts, p: int | None = None) -> TraceSeries:
    """t_n = N_n / p^n - p^n - p^-n for a surface with H^1 = H^3 = 0."""
    if p is None:
        p = counts.p
    vals = []
    for n, N in enumerate(_counts_list(counts), start=1):
        t = Fraction(N, p**n) - p**n - Fraction(1, p**n)
        d = t.denominator
        while d % p == 0:
            d //= p
        if d != 1:
            raise ZetaError("trace denominator is not a power of p")
        vals.append(t)
    return TraceSeries(p, vals)


def subspace_traces(orbit_sizes: Sequence[int], n: int) -> int:
    """Trace of the n-th power of a permutation with the given cycle lengths."""
    if any(s < 1 for s in orbit_sizes):
        raise ZetaError("orbit sizes must be positive")
    return sum(s for s in orbit_sizes if n % s == 0)


def subspace_charpoly(orbit_sizes: Sequence[int]) -> RatPoly:
    """prod (t^s - 1), the characteristic polynomial of that permutation."""
    out = RatPoly([1])
    for s in orbit_sizes:
        out = out * (RatPoly.monomial(s) - RatPoly([1]))
    return out


def quotient_traces(traces: TraceSeries, orbit_sizes: Sequence[int]) -> TraceSeries:
    return TraceSeries(traces.p, [t - subspace_traces(orbit_sizes, n) for n, t in enumerate(traces.values, 1)])


def newton_coefficients(power_sums: Sequence, k_max: int) -> list[Fraction]:
    """c_0..c_kmax of the monic polynomial prod (t - a_i) from p_i = sum a_i^i.

    Uses k e_k = sum_{i=1..k} (-1)^{i-1} e_{k-i} p_i and c_k = (-1)^k e_k.
    """
    if len(power_sums) < k_max:
        raise ZetaError(f"need {k_max} power sums, have {len(power_sums)}")
    e = [Fraction(1)]
    for k in range(1, k_max + 1):
        s = sum((-1) ** (i - 1) * e[k - i] * Fraction(power_sums[i - 1]) for i in range(1, k + 1))
        e.append(s / k)
    return [(-1) ** k * ek for k, ek in enumerate(e)]


def newton_half(traces, dim: int) -> list[Fraction]:
    """First dim/2 + 1 coefficients c_0..c_{dim/2} (c_0 = 1) of the quotient polynomial."""
    if dim % 2:
        raise ZetaError("dimension must be even")
    vals = traces.values if isinstance(traces, TraceSeries) else list(traces)
    return newton_coefficients(vals, dim // 2)


@dataclass
class Completion:
    poly: RatPoly | None
    sign: int | None
    ambiguous: bool
    candidates: dict  # sign -> RatPoly


def _from_descending(coeffs: Sequence[Fraction], dim: int) -> RatPoly:
    # coeffs[k] is the coefficient of t^(dim - k)
    return RatPoly([coeffs[dim - j] for j in range(dim + 1)])


def complete_functional_equation(half: Sequence, dim: int) -> Completion:
    """Fill in c_k for k > dim/2 from t^dim f(1/t) = sign f(t)."""
    h = dim // 2
    if dim % 2 or len(half) < h + 1:
        raise ZetaError("need c_0..c_{dim/2} for even dim")
    half = [Fraction(x) for x in half[: h + 1]]
    cands = {}
    for sign in (1, -1):
        if sign == -1 and half[h] != 0:
            continue
        full = half + [sign * half[dim - k] for k in range(h + 1, dim + 1)]
        cands[sign] = _from_descending(full, dim)
    if half[h] != 0:
        return Completion(cands[1], 1, False, cands)
    return Completion(None, None, True, cands)


def satisfies_functional_equation(f: RatPoly, sign: int) -> bool:
    d = f.degree
    return f.reverse(d) == f * sign


def unit_root_count(f: RatPoly) -> int:
    """Number of roots (with multiplicity) that are roots of unity."""
    mult, _ = cyclotomic_factorization(f)
    return sum(euler_phi(m) * k for m, k in mult.items())


def power_sums_of(f: RatPoly, n_max: int) -> list[Fraction]:
    """p_1..p_nmax of the roots of f (made monic), via Newton identities."""
    d = f.degree
    lead = f.lead()
    c = [f.coeffs[d - k] / lead for k in range(d + 1)]  # descending, monic
    e = [(-1) ** k * ck for k, ck in enumerate(c)]
    p = []
    for k in range(1, n_max + 1):
        s = Fraction(0)
        for i in range(1, min(k, d + 1)):
            s += (-1) ** (i - 1) * e[i] * p[k - i - 1]
        if k <= d:
            s += (-1) ** (k - 1) * k * e[k]
        p.append(s)
    return p


@dataclass
class ZetaResult:
    charpoly: RatPoly
    sign: int | None
    ambiguous: bool
    unit_roots: int
    rank_bound: int
    full_charpoly: RatPoly


def reconstruct(counts, p: int, dim: int, orbit_sizes: Sequence[int]) -> ZetaResult:
    """Counts -> quotient polynomial f (degree dim), sign, unit-root bound on the full H^2."""
    tr = quotient_traces(twisted_h2_traces(counts, p), orbit_sizes)
    if len(tr) < dim // 2:
        raise ZetaError(f"need {dim // 2} counts, have {len(tr)}; use verification mode")
    comp = complete_functional_equation(newton_half(tr, dim), dim)
    if comp.ambiguous:
        bounds = {s: unit_root_count(f * subspace_charpoly(orbit_sizes)) for s, f in comp.candidates.items()}
        f = comp.candidates[1]
        full = f * subspace_charpoly(orbit_sizes)
        return ZetaResult(f, None, True, max(bounds.values()), max(bounds.values()), full)
    full = comp.poly * subspace_charpoly(orbit_sizes)
    u = unit_root_count(full)
    return ZetaResult(comp.poly, comp.sign, False, u, u, full)


def picard_rank_bound(counts, p: int, orbit_sizes: Sequence[int], dim_total: int) -> int:
    dim = dim_total - sum(orbit_sizes)
    return reconstruct(counts, p, dim, orbit_sizes).rank_bound


def predicted_counts(f: RatPoly, p: int, orbit_sizes: Sequence[int], n_max: int) -> list[int]:
    """Point counts implied by a quotient polynomial f and the known subspace."""
    ps = power_sums_of(f, n_max)
    out = []
    for n in range(1, n_max + 1):
        t = ps[n - 1] + subspace_traces(orbit_sizes, n)
        N = (t + p**n + Fraction(1, p**n)) * p**n
        if N.denominator != 1:
            raise ZetaError(f"non-integral predicted count at n={n}")
        out.append(int(N))
    return out


def verify_polynomial(f: RatPoly, counts, p: int, orbit_sizes: Sequence[int]) -> tuple[bool, list[int]]:
    """Check that f reproduces every supplied count; returns (ok, checked n values)."""
    counts = _counts_list(counts)
    pred = predicted_counts(f, p, orbit_sizes, len(counts))
    return pred == counts, list(range(1, len(counts) + 1))
