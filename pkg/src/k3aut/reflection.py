"""Reflections in (-2)-classes folded over Galois orbits, and chamber descent.

Vectors are integer coordinate tuples.  An orbit lives in an ambient lattice
(Gram ``gram``); folded reflections act on a sublattice of invariant vectors
given by basis rows in ambient coordinates.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import lru_cache
from math import lcm
from typing import Sequence

from .exactcore import IntMat, as_intmat, charpoly, cyclotomic_factorization, solve_integer


class ReflectionError(ValueError):
    pass


def pair(gram, u, v) -> int:
    g = as_intmat(gram)
    gv = g @ tuple(v)
    return sum(a * b for a, b in zip(u, gv))


def reflect(gram, c, x):
    """x - 2 (x.c)/(c.c) c, exact; raises if not integral."""
    cc = pair(gram, c, c)
    if cc == 0:
        raise ReflectionError("isotropic reflection vector")
    num = 2 * pair(gram, x, c)
    if num % cc:
        raise ReflectionError("reflection is not integral at this vector")
    k = num // cc
    return tuple(a - k * b for a, b in zip(x, c))


def reflection_matrix(gram, c) -> IntMat:
    n = len(c)
    cols = [reflect(gram, c, tuple(int(i == j) for i in range(n))) for j in range(n)]
    return IntMat.from_columns(cols)


# ---------------------------------------------------------------- orbits


@dataclass(frozen=True)
class OrbitType:
    kind: str  # "disjoint" | "paired_a2" | "infinite"
    r: int = 0

    @property
    def is_finite(self) -> bool:
        return self.kind != "infinite"

    def __str__(self):
        return {"disjoint": f"Disjoint({self.r})", "paired_a2": f"PairedA2({self.r})"}.get(self.kind, "Infinite")


def Disjoint(r: int) -> OrbitType:
    return OrbitType("disjoint", r)


def PairedA2(r: int) -> OrbitType:
    return OrbitType("paired_a2", r)


INFINITE = OrbitType("infinite")


@dataclass
class GaloisOrbit:
    """(-2)-classes permuted transitively by the listed permutations."""

    classes: list
    incidence: list
    perms: list = field(default_factory=list)

    def __post_init__(self):
        self.classes = [tuple(int(x) for x in c) for c in self.classes]
        k = len(self.classes)
        if k == 0:
            raise ReflectionError("empty orbit")
        if len(self.incidence) != k or any(len(r) != k for r in self.incidence):
            raise ReflectionError("incidence matrix has wrong shape")
        for i in range(k):
            if self.incidence[i][i] != -2:
                raise ReflectionError("orbit classes must have self-intersection -2")
            for j in range(k):
                if self.incidence[i][j] != self.incidence[j][i]:
                    raise ReflectionError("incidence matrix is not symmetric")
        if self.perms:
            reach = {0}
            frontier = [0]
            while frontier:
                i = frontier.pop()
                for p in self.perms:
                    if p[i] not in reach:
                        reach.add(p[i])
                        frontier.append(p[i])
            if len(reach) != k:
                raise ReflectionError("permutations are not transitive on the orbit")

    @classmethod
    def from_classes(cls, classes, gram, perms=()) -> "GaloisOrbit":
        inc = [[pair(gram, a, b) for b in classes] for a in classes]
        return cls(list(classes), inc, [list(p) for p in perms])

    def check_against(self, gram) -> bool:
        return all(pair(gram, a, b) == self.incidence[i][j]
                   for i, a in enumerate(self.classes) for j, b in enumerate(self.classes))

    def to_json(self) -> str:
        return json.dumps({"classes": [list(c) for c in self.classes], "incidence": self.incidence,
                           "perms": self.perms}, separators=(",", ":"))

    @classmethod
    def from_json(cls, text: str) -> "GaloisOrbit":
        obj = json.loads(text)
        return cls(obj["classes"], obj["incidence"], obj.get("perms", []))


def classify_orbit(o: GaloisOrbit) -> OrbitType:
    k = len(o.classes)
    inc = o.incidence
    off = [[inc[i][j] for j in range(k) if j != i] for i in range(k)]
    if all(x == 0 for row in off for x in row):
        return Disjoint(k)
    partner = []
    for i in range(k):
        ones = [j for j in range(k) if j != i and inc[i][j] == 1]
        others = [j for j in range(k) if j != i and inc[i][j] not in (0, 1)]
        if len(ones) != 1 or others:
            return INFINITE
        partner.append(ones[0])
    if any(partner[partner[i]] != i for i in range(k)):
        return INFINITE
    return PairedA2(k // 2)


def folded_class(o: GaloisOrbit, t: OrbitType | None = None):
    t = t or classify_orbit(o)
    if not t.is_finite:
        raise ReflectionError("orbit of infinite type has no folded class")
    return tuple(sum(c[i] for c in o.classes) for i in range(len(o.classes[0])))


def folded_norm(o: GaloisOrbit) -> int:
    k = len(o.classes)
    return sum(o.incidence[i][j] for i in range(k) for j in range(k))


def fixed_coordinates(fixed_basis, v) -> tuple[int, ...]:
    x = solve_integer(as_intmat(fixed_basis).T, v)
    if x is None:
        raise ReflectionError("vector does not lie in the fixed lattice")
    return x


def folded_reflection(o: GaloisOrbit, fixed_basis, gram) -> IntMat:
    """Reflection in the folded class, as a matrix on fixed-lattice coordinates."""
    c = folded_class(o)
    b = as_intmat(fixed_basis)
    gf = b @ as_intmat(gram) @ b.T
    cf = fixed_coordinates(b, c)
    m = reflection_matrix(gf, cf)
    if m @ m != IntMat.identity(m.nrows) or m.T @ gf @ m != gf:
        raise ReflectionError("folded reflection is not an isometric involution")
    return m


def unfolded_reflection(o: GaloisOrbit, gram) -> IntMat:
    """Ambient composite of single-class reflections realizing the folded one."""
    t = classify_orbit(o)
    n = len(o.classes[0])
    out = IntMat.identity(n)
    if t.kind == "disjoint":
        for c in o.classes:
            out = reflection_matrix(gram, c) @ out
    elif t.kind == "paired_a2":
        done = set()
        for i in range(len(o.classes)):
            if i in done:
                continue
            j = next(j for j in range(len(o.classes)) if j != i and o.incidence[i][j] == 1)
            done |= {i, j}
            s = tuple(a + b for a, b in zip(o.classes[i], o.classes[j]))
            out = reflection_matrix(gram, s) @ out
    else:
        raise ReflectionError("orbit of infinite type")
    return out


@dataclass
class RXData:
    generators: list  # IntMat on fixed coordinates
    walls: list  # folded classes in fixed coordinates
    types: list  # OrbitType per finite orbit
    infinite: list  # indices of infinite-type orbits


def rx_generators(orbits: Sequence[GaloisOrbit], fixed_basis, gram) -> RXData:
    gens, walls, types, inf = [], [], [], []
    for k, o in enumerate(orbits):
        t = classify_orbit(o)
        if not t.is_finite:
            inf.append(k)
            continue
        gens.append(folded_reflection(o, fixed_basis, gram))
        walls.append(fixed_coordinates(fixed_basis, folded_class(o, t)))
        types.append(t)
    return RXData(gens, walls, types, inf)


# ------------------------------------------------------------ descent


@dataclass
class AmpleVector:
    vector: tuple
    gram: IntMat
    walls: list = field(default_factory=list)

    def __post_init__(self):
        self.vector = tuple(self.vector)
        self.gram = as_intmat(self.gram)
        if pair(self.gram, self.vector, self.vector) <= 0:
            raise ReflectionError("ample vector must have positive square")
        for w in self.walls:
            if pair(self.gram, self.vector, w) <= 0:
                raise ReflectionError("ample vector is not strictly inside the chamber")


@dataclass
class Member:
    word: list  # g = r_{word[0]} r_{word[1]} ...


@dataclass
class NonMember:
    reason: str


@dataclass
class Stuck:
    x: tuple


class DescentCapExceeded(RuntimeError):
    pass


@lru_cache(maxsize=64)
def _wall_data(gram_rows: tuple, walls: tuple):
    gram = IntMat([list(r) for r in gram_rows])
    refl = [reflection_matrix(gram, w) for w in walls]
    gw = [gram @ w for w in walls]
    return refl, gw


def wall_data(gram, walls):
    """Reflection matrices and Gram-transformed walls, cached per (gram, walls)."""
    gram = as_intmat(gram)
    return _wall_data(tuple(map(tuple, gram.tolist())), tuple(tuple(int(a) for a in w) for w in walls))


def descend(x, walls, gram, cap: int = 10**6):
    """Reflect x across the first wall it violates until none is violated.

    Returns (end point, word) where the end point is r_{word[-1]} ... r_{word[0]} x.
    """
    refl, gw = wall_data(gram, walls)
    x = tuple(x)
    word = []
    while True:
        hit = -1
        for i, v in enumerate(gw):
            if sum(a * b for a, b in zip(x, v)) < 0:
                hit = i
                break
        if hit < 0:
            return x, word
        x = refl[hit] @ x
        word.append(hit)
        if len(word) > cap:
            raise DescentCapExceeded(f"chamber descent exceeded {cap} steps")


def chamber_descent(g, y: AmpleVector | Sequence[int], walls, gram=None, cap: int = 10**6):
    """Decide (semi-)membership of g in the group generated by reflections in ``walls``."""
    if isinstance(y, AmpleVector):
        gram = y.gram
        yv = y.vector
    else:
        yv = tuple(y)
        gram = as_intmat(gram)
    g = as_intmat(g)
    x = g @ yv
    if pair(gram, x, yv) <= 0:
        return NonMember("g moves y out of the positive cone component")
    x, word = descend(x, walls, gram, cap)
    if x != yv:
        return Stuck(x)
    refl, _ = wall_data(gram, walls)
    w = IntMat.identity(g.nrows)
    for i in word:
        w = refl[i] @ w
    if w @ g == IntMat.identity(g.nrows):
        return Member(list(word))
    return NonMember("g fixes the chamber but is not the identity modulo the reflections")


def evaluate_word(word, gens, n) -> IntMat:
    out = IntMat.identity(n)
    for i in word:
        out = out @ gens[i]
    return out


def sterk_domain_contains(x, y, gammas, gram) -> bool:
    xy = pair(gram, x, y)
    return all(pair(gram, as_intmat(g) @ tuple(x), y) >= xy for g in gammas)


# ------------------------------------------------------------ orders


def matrix_order(g) -> int | None:
    """Order of an integer matrix, or None if infinite.

    Finite order forces a cyclotomic characteristic polynomial and g^k = 1
    for k the lcm of the cyclotomic indices; a non-semisimple g fails the
    second test.
    """
    g = as_intmat(g)
    mult, rest = cyclotomic_factorization(charpoly(g))
    if rest.degree > 0:
        return None
    k = 1
    for m in mult:
        k = lcm(k, m)
    ident = IntMat.identity(g.nrows)
    if g**k != ident:
        return None
    return min(d for d in range(1, k + 1) if k % d == 0 and g**d == ident)


def is_infinite_order(g) -> bool:
    return matrix_order(g) is None
