"""Generators, sublattice stabilizers, relations and finite-index certificates
for groups of lattice isometries.

Matrices act on column vectors of lattice coordinates.
"""

from __future__ import annotations

import hashlib
import itertools
import json
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .exactcore import IntMat, as_intmat, hnf_basis
from .lattice import A1, U, Lattice
from .reflection import Member, Stuck, chamber_descent, descend, pair, reflection_matrix


class GroupCertError(ValueError):
    pass


@dataclass
class GenSet:
    lattice: Lattice
    gens: list
    labels: list = field(default_factory=list)
    witnesses: dict = field(default_factory=dict)  # dropped label -> word over kept labels

    def __post_init__(self):
        self.gens = [as_intmat(g) for g in self.gens]
        if not self.labels:
            self.labels = [f"g{i}" for i in range(len(self.gens))]
        if len(self.labels) != len(self.gens):
            raise GroupCertError("one label per generator")
        gram = self.lattice.gram
        for g, lab in zip(self.gens, self.labels):
            if g.T @ gram @ g != gram:
                raise GroupCertError(f"generator {lab} does not preserve the form")

    def __len__(self):
        return len(self.gens)

    def to_json(self) -> str:
        return json.dumps({"gram": self.lattice.gram.tolist(), "labels": self.labels,
                           "gens": [g.tolist() for g in self.gens], "witnesses": self.witnesses})

    @classmethod
    def from_json(cls, text: str) -> "GenSet":
        obj = json.loads(text)
        return cls(Lattice(obj["gram"]), [IntMat(g) for g in obj["gens"]], obj["labels"], obj.get("witnesses", {}))


def l_n() -> Lattice:
    """U + 4 A1 in the basis E, E+O, C1..C4."""
    return Lattice.direct_sum(U(), A1(), A1(), A1(), A1())


def _perm_matrix(images, n=6) -> IntMat:
    # e_i -> e_images[i]
    cols = [tuple(int(images[j] == i) for i in range(n)) for j in range(n)]
    return IntMat.from_columns(cols)


def o_ln_generators() -> GenSet:
    """Two permutations of C1..C4 generating S4, reflections in one curve of each orbit, and -1."""
    lat = l_n()
    g = lat.gram
    cyc = _perm_matrix([0, 1, 3, 4, 5, 2])
    swap = _perm_matrix([0, 1, 3, 2, 4, 5])
    section = (-1, 1, 0, 0, 0, 0)  # O = (E+O) - E
    comp = (0, 0, 1, 0, 0, 0)  # C1
    other = (1, 0, -1, 0, 0, 0)  # E - C1, the other component of that fibre
    gens = [cyc, swap, reflection_matrix(g, section), reflection_matrix(g, comp), reflection_matrix(g, other),
            -IntMat.identity(6)]
    return GenSet(lat, gens, ["perm4", "perm2", "refl_O", "refl_C", "refl_EC", "minus1"])


# ------------------------------------------------------------ F_2 subspaces


def f2_rref(rows) -> tuple:
    """Reduced row echelon form over F_2, zero rows dropped, as a tuple of tuples."""
    rows = [[x % 2 for x in r] for r in rows]
    if not rows:
        return ()
    n = len(rows[0])
    r = 0
    for c in range(n):
        p = next((i for i in range(r, len(rows)) if rows[i][c]), None)
        if p is None:
            continue
        rows[r], rows[p] = rows[p], rows[r]
        for i in range(len(rows)):
            if i != r and rows[i][c]:
                rows[i] = [(a + b) % 2 for a, b in zip(rows[i], rows[r])]
        r += 1
    return tuple(tuple(x) for x in rows[:r])


def _f2_kernel(rows, n) -> list:
    red = f2_rref(rows)
    pivots = [next(c for c in range(n) if r[c]) for r in red]
    free = [c for c in range(n) if c not in pivots]
    out = []
    for f in free:
        v = [0] * n
        v[f] = 1
        for r, pc in zip(red, pivots):
            v[pc] = r[f]
        out.append(v)
    return out


def quotient_sublattices(n: int) -> list[tuple]:
    """All sublattices M with 2L <= M and L/M = (Z/2)^2, keyed by the F_2-RREF of M/2L.

    Enumerated as kernels of the surjections L -> (Z/2)^2 (2-dim subspaces of the dual).
    """
    vecs = [v for v in itertools.product((0, 1), repeat=n) if any(v)]
    planes = set()
    for a, b in itertools.combinations(vecs, 2):
        planes.add(f2_rref([a, b]))
    return sorted({f2_rref(_f2_kernel(p, n)) for p in planes})


def sublattice_key(basis_rows) -> tuple:
    return f2_rref(basis_rows)


def _act_key(g: IntMat, key) -> tuple:
    return f2_rref([g @ tuple(r) for r in key])


def _lift_sublattice(key, n) -> list:
    """Integer basis of the sublattice with F_2 image ``key`` (contains 2L)."""
    gens = [list(r) for r in key] + [[2 * int(i == j) for j in range(n)] for i in range(n)]
    return [list(r) for r in hnf_basis(gens)]


def stabilizes(g: IntMat, basis_rows) -> bool:
    """Whether g maps the row-span of ``basis_rows`` onto itself (HNF comparison)."""
    img = [list(g @ tuple(r)) for r in basis_rows]
    a = [list(r) for r in hnf_basis([list(r) for r in basis_rows])]
    b = [list(r) for r in hnf_basis(img)]
    return a == b


@dataclass
class StabilizerResult:
    gens: GenSet
    orbit: list  # keys, in BFS order
    domain_size: int


def sublattice_stabilizer(G: GenSet, target_rows, cap: int = 10**5) -> StabilizerResult:
    """Schreier generators for the stabilizer of a sublattice with quotient (Z/2)^2."""
    n = G.lattice.rank
    target_rows = [tuple(int(x) for x in r) for r in target_rows]
    lifted = _lift_sublattice(f2_rref(target_rows), n)
    if [list(r) for r in hnf_basis([list(r) for r in target_rows])] != lifted or len(f2_rref(target_rows)) != n - 2:
        raise GroupCertError("target is not a sublattice with quotient (Z/2)^2")
    domain = quotient_sublattices(n)
    start = f2_rref(target_rows)
    trans = {start: IntMat.identity(n)}
    orbit = [start]
    i = 0
    while i < len(orbit):
        x = orbit[i]
        i += 1
        for s in G.gens:
            y = _act_key(s, x)
            if y not in trans:
                trans[y] = s @ trans[x]
                orbit.append(y)
                if len(orbit) > cap:
                    raise GroupCertError(f"orbit exceeds cap {cap}")
    ident = IntMat.identity(n)
    schreier, labels, seen = [], [], set()
    for k, x in enumerate(orbit):
        for s, lab in zip(G.gens, G.labels):
            y = _act_key(s, x)
            h = trans[y].inverse_unimodular() @ s @ trans[x]
            key = tuple(map(tuple, h.tolist()))
            if h == ident or key in seen:
                continue
            seen.add(key)
            if not stabilizes(h, target_rows):
                raise GroupCertError("Schreier generator does not stabilize the target")
            schreier.append(h)
            labels.append(f"s{k}_{lab}")
    return StabilizerResult(GenSet(G.lattice, schreier, labels), orbit, len(domain))


# ------------------------------------------------------------ words


def _to_np(mats) -> np.ndarray:
    return np.array([m.tolist() for m in mats], dtype=np.int64)


def _ball(letters: np.ndarray, radius: int, limit: int = 2**62) -> dict:
    """Matrix bytes -> shortest word (tuple of letter indices), over words of length <= radius."""
    n = letters.shape[1]
    ident = np.eye(n, dtype=np.int64)
    found = {ident.tobytes(): ()}
    frontier_m = ident[None]
    frontier_w = [()]
    for _ in range(radius):
        prods = np.einsum("aij,bjk->abik", frontier_m, letters)
        if np.abs(prods).max(initial=0) > limit:
            raise GroupCertError("entries too large for the word search")
        new_m, new_w = [], []
        for a in range(prods.shape[0]):
            for b in range(prods.shape[1]):
                key = prods[a, b].tobytes()
                if key not in found:
                    w = frontier_w[a] + (b,)
                    found[key] = w
                    new_m.append(prods[a, b])
                    new_w.append(w)
        if not new_m:
            break
        frontier_m = np.array(new_m)
        frontier_w = new_w
    return found


def express(target: IntMat, gens: Sequence[IntMat], word_cap: int, use_inverses: bool = True):
    """A word (list of (index, +1/-1)) of length <= word_cap in gens equal to target, or None."""
    gens = [as_intmat(g) for g in gens]
    if not gens:
        return [] if target == IntMat.identity(target.nrows) else None
    letters = [(i, 1) for i in range(len(gens))]
    mats = list(gens)
    if use_inverses:
        for i, g in enumerate(gens):
            inv = g.inverse_unimodular()
            if inv != g:
                letters.append((i, -1))
                mats.append(inv)
    arr = _to_np(mats)
    left = _ball(arr, (word_cap + 1) // 2)
    right = _ball(arr, word_cap // 2)
    t = np.array(target.tolist(), dtype=np.int64)
    for key, w2 in sorted(right.items(), key=lambda kv: len(kv[1])):
        m2 = np.frombuffer(key, dtype=np.int64).reshape(t.shape)
        # target = A * M2 with A in the left ball; A = target * M2^-1
        m2inv = np.array(IntMat(m2.tolist()).inverse_unimodular().tolist(), dtype=np.int64)
        w1 = left.get((t @ m2inv).tobytes())
        if w1 is not None and len(w1) + len(w2) <= word_cap:
            word = [letters[i] for i in w1 + w2]
            if evaluate_signed_word(word, gens) != target:
                raise GroupCertError("word search produced a wrong witness")
            return word
    return None


def evaluate_signed_word(word, gens) -> IntMat:
    n = gens[0].nrows
    out = IntMat.identity(n)
    for i, e in word:
        out = out @ (gens[i] if e == 1 else gens[i].inverse_unimodular())
    return out


def reduce_generators(G: GenSet, word_cap: int = 5) -> GenSet:
    """Greedily drop generators that are words of length <= word_cap in the remaining ones."""
    n = G.lattice.rank
    ident = IntMat.identity(n)
    gens, labels = [], []
    seen = set()
    witnesses = dict(G.witnesses)
    for g, lab in zip(G.gens, G.labels):
        key = tuple(map(tuple, g.tolist()))
        if g == ident:
            witnesses[lab] = []
            continue
        if key in seen:
            witnesses[lab] = [[labels[[tuple(map(tuple, x.tolist())) for x in gens].index(key)], 1]]
            continue
        seen.add(key)
        gens.append(g)
        labels.append(lab)
    # try dropping the later generators first
    k = len(gens) - 1
    while k >= 0:
        rest = gens[:k] + gens[k + 1:]
        rest_labels = labels[:k] + labels[k + 1:]
        word = express(gens[k], rest, word_cap) if rest else None
        if word is not None:
            witnesses[labels[k]] = [[rest_labels[i], e] for i, e in word]
            gens, labels = rest, rest_labels
        k -= 1
    return GenSet(G.lattice, gens, labels, witnesses)


def check_witnesses(original: GenSet, reduced: GenSet) -> bool:
    """Every dropped generator equals its witness word over the kept ones."""
    by_label = dict(zip(reduced.labels, reduced.gens))
    orig = dict(zip(original.labels, original.gens))
    for lab, word in reduced.witnesses.items():
        if lab not in orig:
            continue
        n = original.lattice.rank
        m = IntMat.identity(n)
        for l2, e in word:
            g = by_label.get(l2, orig.get(l2))
            m = m @ (g if e == 1 else g.inverse_unimodular())
        if m != orig[lab]:
            return False
    return all(lab in by_label or lab in reduced.witnesses for lab in original.labels)


def _canonical_cyclic(word) -> tuple:
    rots = [tuple(word[i:] + word[:i]) for i in range(len(word))]
    return min(rots)


def _contains_relation(word, rels) -> bool:
    w = tuple(word)
    L = len(w)
    doubled = w + w
    for r in rels:
        k = len(r)
        if k >= L:
            continue
        for i in range(L):
            if doubled[i:i + k] == r:
                return True
    return False


def discover_relations(G: GenSet, maxlen: int = 5, extra: Sequence = (), extlen: int = 4,
                       cap: int = 5 * 10**6) -> list[tuple]:
    """Words equal to the identity; letters 0..len(G)-1 are G, later ones the extra matrices.

    Pure-G words up to ``maxlen``; words up to ``extlen`` using both kinds of
    letters.  Rotations and words containing a shorter relation are dropped.
    """
    gens = list(G.gens) + [as_intmat(e) for e in extra]
    ng = len(G.gens)
    arr = _to_np(gens)
    n = arr.shape[1]
    ident = np.eye(n, dtype=np.int64)
    rels: list[tuple] = []
    keys: set = set()

    def search(alphabet, length_cap, need_mixed, chunk=4096):
        sub = arr[alphabet]
        frontier_m = ident[None]
        frontier_w = [()]
        for length in range(1, length_cap + 1):
            if len(frontier_w) * len(alphabet) > cap:
                raise GroupCertError("relation search exceeds its cap")
            last = length == length_cap
            next_m, next_w = [], []
            for start in range(0, len(frontier_w), chunk):
                block = frontier_m[start:start + chunk]
                prods = np.einsum("aij,bjk->abik", block, sub)
                if np.abs(prods).max(initial=0) > 2**40:
                    raise GroupCertError("entries too large for the relation search")
                hit = np.all(prods == ident, axis=(2, 3))
                for a, b in zip(*np.nonzero(hit)):
                    w = frontier_w[start + a] + (alphabet[b],)
                    if need_mixed and not (any(x < ng for x in w) and any(x >= ng for x in w)):
                        continue
                    c = _canonical_cyclic(list(w))
                    if c in keys or _contains_relation(w, rels):
                        continue
                    keys.add(c)
                    rels.append(w)
                if last:
                    continue
                a_idx, b_idx = np.nonzero(~hit)
                next_m.append(prods[a_idx, b_idx])
                next_w.extend(frontier_w[start + a] + (alphabet[b],) for a, b in zip(a_idx, b_idx))
            if last or not next_w:
                break
            frontier_m = np.concatenate(next_m)
            frontier_w = next_w

    search(list(range(ng)), maxlen, False)
    if extra:
        search(list(range(len(gens))), extlen, True)
    for w in rels:
        m = IntMat.identity(n)
        for i in w:
            m = m @ gens[i]
        if m != IntMat.identity(n):
            raise GroupCertError("relation does not evaluate to the identity")
    return rels


# ------------------------------------------------------------ certificates


@dataclass
class FiniteIndexCertificate:
    index: int
    representatives: list  # IntMat, representatives[0] = identity
    action: list  # action[r][s] = index of the coset of reps[r] * gens[s]
    witnesses: list  # witnesses[r][s] = word w with reps[r]*gens[s]*reps[action]^-1 = prod r_w
    transcript: list  # sha256 of each oracle query and answer
    gens: list
    walls: list
    gram: IntMat
    y: tuple

    def to_json(self) -> str:
        return json.dumps({
            "index": self.index,
            "representatives": [m.tolist() for m in self.representatives],
            "action": self.action,
            "witnesses": self.witnesses,
            "transcript": self.transcript,
            "gens": [g.tolist() for g in self.gens],
            "walls": [list(w) for w in self.walls],
            "gram": self.gram.tolist(),
            "y": list(self.y),
        })

    @classmethod
    def from_json(cls, text: str) -> "FiniteIndexCertificate":
        o = json.loads(text)
        return cls(o["index"], [IntMat(m) for m in o["representatives"]], o["action"], o["witnesses"],
                   o["transcript"], [IntMat(g) for g in o["gens"]], [tuple(w) for w in o["walls"]],
                   IntMat(o["gram"]), tuple(o["y"]))


@dataclass
class Inconclusive:
    reason: str
    representatives: int = 0


def _hash(*parts) -> str:
    return hashlib.sha256(json.dumps(parts, default=str).encode()).hexdigest()


def certify_finite_quotient(gens: Sequence, walls, gram, y, cap: int = 10**4,
                            oracle: Callable | None = None):
    """Show that the reflection group R generated by ``walls`` has finite index in <gens, R>.

    Breadth-first search on right cosets R g.  Two elements are placed in the
    same coset only when the oracle returns a verified Member for g h^-1.
    Elements are bucketed by the end point of chamber descent applied to
    g y.  That key is constant on cosets when the walls bound a fundamental
    domain; otherwise a coset may be split over several buckets, which only
    adds representatives.  Stuck answers likewise open a new representative
    rather than abort.  Closure of the representative set
    under right multiplication by all generators (and the wall reflections)
    proves the index is at most the number of representatives.
    """
    gram = as_intmat(gram)
    y = tuple(y)
    walls = [tuple(w) for w in walls]
    refl = [reflection_matrix(gram, w) for w in walls]
    all_gens = [as_intmat(g) for g in gens] + refl
    for g in all_gens:
        if g.T @ gram @ g != gram:
            raise GroupCertError("generator does not preserve the form")
    n = gram.nrows
    if oracle is None:
        def oracle(g):
            return chamber_descent(g, y, walls, gram)

    transcript = []

    def key_of(g):
        x = g @ y
        sign = 1 if pair(gram, x, y) > 0 else -1
        if sign < 0:
            x = tuple(-a for a in x)
        end, _ = descend(x, walls, gram)
        return (sign, end)

    reps = [IntMat.identity(n)]
    inv = [IntMat.identity(n)]
    buckets = {key_of(reps[0]): [0]}
    action, wit = [], []
    stuck = 0
    i = 0
    while i < len(reps):
        row, wrow = [], []
        for s in all_gens:
            h = reps[i] @ s
            k = key_of(h)
            target = None
            for j in buckets.get(k, []):
                q = h @ inv[j]
                res = oracle(q)
                transcript.append(_hash(q.tolist(), type(res).__name__, getattr(res, "word", None)))
                if isinstance(res, Member):
                    target = j
                    wrow.append(res.word)
                    break
                if isinstance(res, Stuck):
                    stuck += 1
            if target is None:
                if len(reps) >= cap:
                    return Inconclusive(f"more than {cap} coset representatives", len(reps))
                target = len(reps)
                reps.append(h)
                inv.append(h.inverse_unimodular())
                buckets.setdefault(k, []).append(target)
                wrow.append(None)
            row.append(target)
        action.append(row)
        wit.append(wrow)
        i += 1
    # tree edges carry no witness: they define the representatives themselves
    cert = FiniteIndexCertificate(len(reps), reps, action, wit, transcript, [as_intmat(g) for g in gens],
                                  walls, gram, y)
    return cert


def verify_certificate(cert: FiniteIndexCertificate) -> bool:
    """Replay: every reps[r] * gen[s] equals (word in wall reflections) * reps[action[r][s]]."""
    gram = cert.gram
    refl = [reflection_matrix(gram, w) for w in cert.walls]
    all_gens = list(cert.gens) + refl
    n = gram.nrows
    reps = cert.representatives
    if reps[0] != IntMat.identity(n) or len(reps) != cert.index:
        return False
    for r, row in enumerate(cert.action):
        for s, t in enumerate(row):
            h = reps[r] @ all_gens[s]
            word = cert.witnesses[r][s]
            if word is None:
                if reps[t] != h:
                    return False
                continue
            m = IntMat.identity(n)
            for k in word:
                m = m @ refl[k]
            if m @ reps[t] != h:
                return False
    return len(cert.action) == len(reps)
