"""Small finite fields F_{p^n} in Zech-logarithm form.

An element is encoded by its discrete logarithm k (meaning g^k) for
0 <= k < q-1, and zero by the sentinel ``q - 1``.  The "vector" encoding of
an element is the integer sum c_i p^i of its coordinates in the power basis
of F_p[x]/(modulus).
"""

from __future__ import annotations

import random
from functools import lru_cache

import numpy as np

TABLE_BUDGET = 2**24
FULL_TABLE_LIMIT = 2**12  # q up to this also gets q x q add/mul tables


class FieldError(ValueError):
    pass


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    i = 2
    while i * i <= p:
        if p % i == 0:
            return False
        i += 1
    return True


# --- F_p[x] helpers on coefficient lists (ascending) --------------------------


def _trim(a):
    while a and a[-1] == 0:
        a.pop()
    return a


def _pmod(a, m, p):
    a = list(a)
    inv = pow(m[-1], p - 2, p)
    dm = len(m) - 1
    while len(_trim(a)) - 1 >= dm:
        c = a[-1] * inv % p
        s = len(a) - 1 - dm
        for i, mi in enumerate(m):
            a[s + i] = (a[s + i] - c * mi) % p
    return a


def _pmulmod(a, b, m, p):
    out = [0] * (len(a) + len(b) - 1) if a and b else []
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] = (out[i + j] + x * y) % p
    return _pmod(out, m, p)


def _decode(e, p, n):
    out = []
    for _ in range(n):
        e, r = divmod(e, p)
        out.append(r)
    return out


def _is_irreducible(m, p) -> bool:
    """Rabin irreducibility test for a monic m over F_p."""
    n = len(m) - 1
    if n == 1:
        return True
    # x^{p^n} = x mod m, and gcd(x^{p^{n/r}} - x, m) = 1 for primes r | n
    def xpow_pk(k):
        r = [0, 1]
        for _ in range(k):
            r = _ppow(r, p, m, p)
        return r

    def gcd(a, b):
        a, b = _trim(list(a)), _trim(list(b))
        while b:
            a, b = b, _trim(_pmod(a, b, p))
        return a

    xn = xpow_pk(n)
    if _trim(list(xn)) != [0, 1]:
        return False
    for r in {d for d in range(2, n + 1) if n % d == 0 and is_prime(d)}:
        h = list(xpow_pk(n // r)) + [0, 0]
        h[1] = (h[1] - 1) % p
        g = gcd(m, _trim(h))
        if len(g) > 1:
            return False
    return True


def _ppow(a, e, m, p):
    r = [1]
    base = _pmod(a, m, p)
    while e:
        if e & 1:
            r = _pmulmod(r, base, m, p)
        base = _pmulmod(base, base, m, p)
        e >>= 1
    return r


def least_irreducible(p: int, n: int) -> list[int]:
    """Monic irreducible of degree n over F_p with the smallest integer encoding sum c_i p^i."""
    for low in range(p**n):
        m = _decode(low, p, n) + [1]
        if n > 1 and m[0] == 0:
            continue
        if _is_irreducible(m, p):
            return m
    raise FieldError("no irreducible polynomial found")


class Fq:
    """The field with q = p^n elements; all tables immutable after construction."""

    def __init__(self, p: int, n: int = 1):
        if not is_prime(p):
            raise FieldError(f"{p} is not prime")
        if n < 1:
            raise FieldError("degree must be positive")
        q = p**n
        if q > TABLE_BUDGET:
            raise FieldError(f"field size {q} exceeds table budget {TABLE_BUDGET}")
        self.p, self.n, self.q = p, n, q
        self.order = q - 1
        self.ZERO = q - 1
        self.modulus = least_irreducible(p, n)
        if n > 1 and not _is_irreducible(self.modulus, p):
            raise FieldError("modulus is reducible")
        self.exp, self.generator = self._build_exp()
        log = np.full(q, -1, dtype=np.int64)
        log[self.exp] = np.arange(q - 1)
        log[0] = self.ZERO
        self.log = log
        self.zech = self._build_zech()
        self.dtype = np.int16 if q <= 2**15 else np.int32
        self.add_table = self.mul_table = None
        if q <= FULL_TABLE_LIMIT:
            a = np.arange(q, dtype=np.int64)
            self.add_table = self._vadd_zech(a[:, None], a[None, :]).astype(self.dtype)
            self.mul_table = self._vmul_logs(a[:, None], a[None, :]).astype(self.dtype)
        self.one = 0
        self.neg_one = self.order // 2 if p != 2 else 0
        self._spot_check()

    def __repr__(self):
        return f"Fq({self.p}^{self.n})"

    # -- construction
    def _build_exp(self):
        p, n, q, m = self.p, self.n, self.q, self.modulus
        order = q - 1
        primes = [r for r in range(2, order + 1) if order % r == 0 and is_prime(r)]
        for cand in range(1, q):
            g = _decode(cand, p, n)
            gpoly = _trim(list(g))
            ok = True
            for r in primes:
                if _trim(_ppow(gpoly, order // r, m, p)) == [1]:
                    ok = False
                    break
            if not ok:
                continue
            exp = np.zeros(order, dtype=np.int64)
            cur = [1]
            weights = [p**i for i in range(n)]
            for k in range(order):
                exp[k] = sum(c * w for c, w in zip(cur, weights))
                cur = _pmulmod(cur, gpoly, m, p)
            if len(set(exp.tolist())) != order:
                raise FieldError("generator search failed")
            return exp, cand
        raise FieldError("no primitive element")

    def _build_zech(self):
        p, n, q = self.p, self.n, self.q
        digits = np.array([(self.exp // p**i) % p for i in range(n)])
        digits[0] = (digits[0] + 1) % p
        enc = sum(digits[i] * p**i for i in range(n))
        return self.log[enc]

    def _spot_check(self, trials=64):
        rng = random.Random(self.q)
        for _ in range(trials):
            a, b, c = (rng.randrange(self.q) for _ in range(3))
            if self.mul(a, self.add(b, c)) != self.add(self.mul(a, b), self.mul(a, c)):
                raise FieldError("distributivity spot check failed")
            if self.add(a, self.neg(a)) != self.ZERO:
                raise FieldError("negation spot check failed")

    # -- encodings
    def from_vector(self, e: int) -> int:
        return int(self.log[e % self.q]) if 0 <= e < self.q else self._bad(e)

    def to_vector(self, a: int) -> int:
        return 0 if a == self.ZERO else int(self.exp[a])

    def from_int(self, c: int) -> int:
        """Image of an integer under Z -> F_p -> F_q."""
        return int(self.log[c % self.p])

    def _bad(self, e):
        raise FieldError(f"{e} is not a field element encoding")

    def elements(self):
        return range(self.q)

    # -- scalar arithmetic
    def add(self, a: int, b: int) -> int:
        Z = self.ZERO
        if a == Z:
            return b
        if b == Z:
            return a
        z = int(self.zech[(b - a) % self.order])
        return Z if z == Z else (a + z) % self.order

    def neg(self, a: int) -> int:
        if a == self.ZERO or self.p == 2:
            return a
        return (a + self.order // 2) % self.order

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    def mul(self, a: int, b: int) -> int:
        if a == self.ZERO or b == self.ZERO:
            return self.ZERO
        return (a + b) % self.order

    def inv(self, a: int) -> int:
        if a == self.ZERO:
            raise ZeroDivisionError("inverse of zero")
        return (-a) % self.order

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def pow(self, a: int, e: int) -> int:
        if a == self.ZERO:
            if e < 0:
                raise ZeroDivisionError("negative power of zero")
            return self.ZERO if e else 0
        return (a * e) % self.order

    def frobenius(self, a: int) -> int:
        return self.pow(a, self.p)

    # -- vectorized arithmetic on numpy arrays of codes
    def _vmul_logs(self, a, b):
        Z = self.ZERO
        r = (a + b) % self.order
        return np.where((a == Z) | (b == Z), Z, r)

    def _vadd_zech(self, a, b):
        Z = self.ZERO
        a, b = np.broadcast_arrays(a, b)
        d = (b - a) % self.order
        z = self.zech[d]
        r = np.where(z == Z, Z, (a + z) % self.order)
        r = np.where(a == Z, b, r)
        return np.where(b == Z, a, r)

    def vadd(self, a, b):
        if self.add_table is not None:
            return self.add_table[a, b]
        return self._vadd_zech(np.asarray(a, dtype=np.int64), np.asarray(b, dtype=np.int64))

    def vmul(self, a, b):
        if self.mul_table is not None:
            return self.mul_table[a, b]
        return self._vmul_logs(np.asarray(a, dtype=np.int64), np.asarray(b, dtype=np.int64))

    def vneg(self, a):
        if self.p == 2:
            return a
        a = np.asarray(a)
        return np.where(a == self.ZERO, a, (a + self.order // 2) % self.order).astype(a.dtype)

    def vinv(self, a):
        a = np.asarray(a)
        return np.where(a == self.ZERO, a, (-a) % self.order).astype(a.dtype)

    def vpow(self, a, e: int):
        a = np.asarray(a)
        if e == 0:
            return np.zeros_like(a)
        return np.where(a == self.ZERO, a, (a.astype(np.int64) * e) % self.order).astype(a.dtype)


@lru_cache(maxsize=None)
def fq_make(p: int, n: int = 1) -> Fq:
    return Fq(p, n)


# --- univariate polynomials over Fq as lists of codes (ascending degree) -----


def poly_trim(K: Fq, f):
    f = list(f)
    while f and f[-1] == K.ZERO:
        f.pop()
    return f


def poly_mod(K: Fq, a, m):
    a = poly_trim(K, a)
    m = poly_trim(K, m)
    if not m:
        raise ZeroDivisionError("polynomial modulo zero")
    dm = len(m) - 1
    inv_lead = K.inv(m[-1])
    while len(a) - 1 >= dm:
        c = K.mul(a[-1], inv_lead)
        s = len(a) - 1 - dm
        for i, mi in enumerate(m):
            a[s + i] = K.sub(a[s + i], K.mul(c, mi))
        a = poly_trim(K, a)
    return a


def poly_mulmod(K: Fq, a, b, m):
    if not a or not b:
        return []
    out = [K.ZERO] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x == K.ZERO:
            continue
        for j, y in enumerate(b):
            out[i + j] = K.add(out[i + j], K.mul(x, y))
    return poly_mod(K, out, m)


def poly_gcd(K: Fq, a, b):
    a, b = poly_trim(K, a), poly_trim(K, b)
    while b:
        a, b = b, poly_mod(K, a, b)
    return a


def x_power_mod(K: Fq, e: int, m):
    result = [0]
    base = poly_mod(K, [K.ZERO, 0], m)
    while e:
        if e & 1:
            result = poly_mulmod(K, result, base, m)
        base = poly_mulmod(K, base, base, m)
        e >>= 1
    return poly_mod(K, result, m)


def count_distinct_roots(f, K: Fq) -> int:
    """Number of distinct roots in K of a nonzero polynomial f (list of codes, ascending)."""
    f = poly_trim(K, f)
    if not f:
        raise ValueError("zero polynomial has every element as a root")
    if len(f) == 1:
        return 0
    h = x_power_mod(K, K.q, f)
    h = h + [K.ZERO] * max(0, 2 - len(h))
    h[1] = K.sub(h[1], 0)  # x^q - x
    g = poly_gcd(K, f, h)
    return len(g) - 1 if g else len(f) - 1


def eval_poly(K: Fq, f, x: int) -> int:
    acc = K.ZERO
    for c in reversed(f):
        acc = K.add(K.mul(acc, x), c)
    return acc
