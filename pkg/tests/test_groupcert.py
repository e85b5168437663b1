
import pytest

from k3aut.exactcore import IntMat
from k3aut.groupcert import (
    FiniteIndexCertificate,
    GenSet,
    GroupCertError,
    Inconclusive,
    certify_finite_quotient,
    check_witnesses,
    discover_relations,
    evaluate_signed_word,
    express,
    f2_rref,
    l_n,
    o_ln_generators,
    quotient_sublattices,
    reduce_generators,
    stabilizes,
    sublattice_stabilizer,
    verify_certificate,
)
from k3aut.lattice import Lattice, closure
from k3aut.reflection import reflection_matrix

FG = IntMat([[10, 0], [0, -4]])
WALLS = [(0, 1), (12, -19)]
SIGNS = [IntMat([[1, 0], [0, -1]]), IntMat([[-1, 0], [0, 1]])]
PELL = IntMat([[19, 12], [30, 19]])


def gaussian_binomial(n, k, q=2):
    num = den = 1
    for i in range(k):
        num *= q ** (n - i) - 1
        den *= q ** (i + 1) - 1
    return num // den


def test_o_ln_generators_preserve_form():
    G = o_ln_generators()
    assert len(G) == 6
    assert G.labels == ["perm4", "perm2", "refl_O", "refl_C", "refl_EC", "minus1"]
    assert len(closure(G.gens[:2], 6)) == 24


def test_genset_validation_and_json():
    with pytest.raises(GroupCertError):
        GenSet(l_n(), [IntMat.diag([2, 1, 1, 1, 1, 1])])
    G = o_ln_generators()
    back = GenSet.from_json(G.to_json())
    assert back.gens == G.gens and back.labels == G.labels


@pytest.mark.parametrize("n", [2, 3, 4, 6])
def test_quotient_sublattice_count(n):
    assert len(quotient_sublattices(n)) == gaussian_binomial(n, 2)


def test_quotient_sublattice_count_rank_6_is_651():
    assert len(quotient_sublattices(6)) == 651


def test_f2_rref():
    assert f2_rref([[1, 1, 0], [1, 0, 1], [0, 1, 1]]) == ((1, 0, 1), (0, 1, 1))
    assert f2_rref([]) == ()


def test_stabilizer_of_small_sublattice():
    # U + 2A1; the index-4 sublattice spanned by 2e1, e2, 2e3, e4 mod 2
    lat = Lattice([[0, 1, 0, 0], [1, 0, 0, 0], [0, 0, -2, 0], [0, 0, 0, -2]])
    swap = IntMat.from_columns([(1, 0, 0, 0), (0, 1, 0, 0), (0, 0, 0, 1), (0, 0, 1, 0)])
    G = GenSet(lat, [swap, -IntMat.identity(4), reflection_matrix(lat.gram, (0, 0, 1, 0))])
    target = [(2, 0, 0, 0), (0, 1, 0, 0), (0, 0, 2, 0), (0, 0, 0, 1)]
    res = sublattice_stabilizer(G, target)
    assert res.domain_size == gaussian_binomial(4, 2)
    assert len(res.orbit) == 2
    for h in res.gens.gens:
        assert stabilizes(h, target)
    with pytest.raises(GroupCertError):
        sublattice_stabilizer(G, [(1, 0, 0, 0), (0, 1, 0, 0), (0, 0, 1, 0), (0, 0, 0, 2)])


def test_express_and_reduce():
    lat = Lattice(FG)
    g = SIGNS[0]
    G = GenSet(lat, [g, PELL, PELL @ PELL, g @ PELL, IntMat.identity(2)], ["a", "p", "p2", "ap", "one"])
    red = reduce_generators(G, word_cap=3)
    assert set(red.labels) == {"a", "p"}
    assert check_witnesses(G, red)
    word = express(PELL @ PELL @ g, [g, PELL], 4)
    assert evaluate_signed_word(word, [g, PELL]) == PELL @ PELL @ g
    assert express(SIGNS[1], [PELL], 4) is None


def test_discover_relations():
    lat = Lattice(FG)
    G = GenSet(lat, SIGNS)
    rels = discover_relations(G, maxlen=4)
    assert (0, 0) in rels and (1, 1) in rels and (0, 1, 0, 1) in rels
    rels2 = discover_relations(GenSet(lat, [SIGNS[0]]), maxlen=3, extra=[PELL, SIGNS[1]], extlen=3)
    for w in rels2:
        m = IntMat.identity(2)
        for i in w:
            m = m @ [SIGNS[0], PELL, SIGNS[1]][i]
        assert m == IntMat.identity(2)


def test_two_conics_certificate():
    cert = certify_finite_quotient(SIGNS + [PELL], WALLS, FG, (1, -1))
    assert isinstance(cert, FiniteIndexCertificate)
    assert cert.index == 4
    assert verify_certificate(cert)
    back = FiniteIndexCertificate.from_json(cert.to_json())
    assert verify_certificate(back)


def test_certificate_tampering_detected():
    cert = certify_finite_quotient(SIGNS + [PELL], WALLS, FG, (1, -1))
    for r, row in enumerate(cert.witnesses):
        for s, w in enumerate(row):
            if w:
                cert.witnesses[r][s] = list(w) + [0]
                assert not verify_certificate(cert)
                return
    pytest.fail("no witness word to tamper with")


def test_certificate_cap_is_inconclusive():
    res = certify_finite_quotient(SIGNS + [PELL], WALLS, FG, (1, -1), cap=2)
    assert isinstance(res, Inconclusive) and res.representatives == 2


def test_certificate_rejects_non_isometry():
    with pytest.raises(GroupCertError):
        certify_finite_quotient([IntMat([[1, 1], [0, 1]])], WALLS, FG, (1, -1))


def test_stabilizer_of_whole_lattice_is_everything():
    """The full lattice's sublattice with quotient (Z/2)^2 containing 2L: stabilizer of a fixed one under S4."""
    G = o_ln_generators()
    perms = GenSet(G.lattice, G.gens[:2], G.labels[:2])
    target = [(1, 0, 0, 0, 0, 0), (0, 1, 0, 0, 0, 0), (0, 0, 1, 1, 0, 0), (0, 0, 0, 1, 1, 0),
              (0, 0, 0, 0, 2, 0), (0, 0, 0, 0, 0, 2)]
    res = sublattice_stabilizer(perms, target)
    # orbit-stabilizer inside S4
    stab = closure(res.gens.gens, 6) if res.gens.gens else {IntMat.identity(6)}
    assert len(res.orbit) * len(stab) == 24
