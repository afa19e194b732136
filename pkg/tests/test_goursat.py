import numpy as np
import pytest

from gl2cond.corpus import goursat_corpus
from gl2cond.goursat import (
    INDEX2_MOD8,
    character_fibered_product,
    character_table_mod8,
    chi4,
    chi8,
    decompose,
    det_legendre,
    eps,
    fibered_product,
    identify_index2_mod8,
    legendre,
    mod8_kernel,
    mod8_profile,
    recompose,
)
from gl2cond.residue import DomainError, GL2Mat, crt_join_tuples
from gl2cond.subgroups import full_group, image_mod, index2_subgroups, sl2


def brute_fibered(G1, G2, chi1, chi2):
    m1, m2 = G1.level, G2.level
    return {
        crt_join_tuples([(x, m1), (y, m2)])[0]
        for x in G1.elements()
        for y in G2.elements()
        if chi1(x) == chi2(y)
    }


def test_corpus_round_trip():
    corpus = goursat_corpus()
    assert len(corpus) >= 100
    for H, m1, m2 in corpus:
        dec = decompose(H, m1, m2)
        assert recompose(dec) == H
        assert dec.g1.order // dec.n1.order == dec.gamma_order == dec.g2.order // dec.n2.order
        full = H.order == dec.g1.order * dec.g2.order
        assert (dec.gamma_order == 1) == full


def test_eps_pairs_level6():
    H = character_fibered_product(2, eps, 3, det_legendre(3))
    assert H.order == 6 * 48 // 2
    assert H.element_set == brute_fibered(full_group(2), full_group(3), eps, det_legendre(3))
    dec = decompose(H, 2, 3)
    assert dec.gamma_order == 2 and dec.n1.order == 3


def test_legendre_level10():
    H = character_fibered_product(2, eps, 5, det_legendre(5))
    assert H.index_in_full() == 2
    assert decompose(H, 2, 5).gamma_order == 2
    assert H.element_set == brute_fibered(full_group(2), full_group(5), eps, det_legendre(5))


def test_fibered_product_validation():
    G1, G2 = full_group(2), full_group(3)
    with pytest.raises(DomainError):
        fibered_product(G1, full_group(4), np.zeros(6), np.zeros(96))
    with pytest.raises(DomainError):
        fibered_product(G1, G2, np.zeros(5), np.zeros(48))
    # labels of different quotients
    with pytest.raises(DomainError):
        fibered_product(G1, G2, np.zeros(6), np.arange(48) % 2)
    H = fibered_product(G1, G2, np.zeros(6, dtype=int), np.zeros(48, dtype=int))
    assert H == full_group(6)


def test_decompose_errors():
    H = full_group(12)
    with pytest.raises(DomainError):
        decompose(H, 2, 6)
    with pytest.raises(DomainError):
        decompose(H, 4, 3, G1=sl2(4))


def test_legendre():
    assert [legendre(a, 5) for a in range(5)] == [0, 1, -1, -1, 1]


def test_mod8_profiles():
    assert mod8_profile(GL2Mat.identity(8)) == (1, 1, 1)
    assert mod8_profile((5, 0, 0, 1)) == (-1, 1, 1)
    assert mod8_profile((1, 1, 0, 1))[2] == -1
    assert mod8_profile((3, 0, 0, 1)) == (-1, -1, 1)
    with pytest.raises(DomainError):
        mod8_profile(GL2Mat.identity(4))


def test_characters_are_homomorphisms():
    tab, vals = character_table_mod8()
    rng = np.random.default_rng(0)
    idx = rng.integers(0, tab.n, size=(400, 2))
    for i, j in idx:
        k = tab.table[i, j]
        assert (vals[i] * vals[j] == vals[k]).all()
    # each of the three characters is onto {+1, -1}
    assert all(set(vals[:, c].tolist()) == {1, -1} for c in range(3))


def test_four_kernels():
    kernels = {name: mod8_kernel(name) for name in INDEX2_MOD8}
    assert len({frozenset(K.element_set) for K in kernels.values()}) == 4
    for name, K in kernels.items():
        assert K.index_in_full() == 2
        assert image_mod(K, 4) == full_group(4)
        assert identify_index2_mod8(K) == (name, INDEX2_MOD8[name][1])


def test_kernels_exhaust_index2_onto_mod4():
    ours = {frozenset(mod8_kernel(n).element_set) for n in INDEX2_MOD8}
    found = {frozenset(H.element_set) for H in index2_subgroups(full_group(8)) if image_mod(H, 4) == full_group(4)}
    assert ours == found


def test_identify_rejects():
    with pytest.raises(DomainError):
        identify_index2_mod8(full_group(8))
    with pytest.raises(DomainError):
        identify_index2_mod8(full_group(4))


def test_character_product_errors():
    with pytest.raises(DomainError):
        character_fibered_product(2, eps, 4, chi4)
    with pytest.raises(DomainError):
        character_fibered_product(2, lambda g: 1, 3, det_legendre(3))


def test_chi8_chi4_values():
    for u, (a, b) in zip((1, 3, 5, 7), [(1, 1), (-1, -1), (-1, 1), (1, -1)]):
        assert chi8((u, 0, 0, 1)) == a and chi4((u, 0, 0, 1)) == b
