import random

import numpy as np
import pytest

from gl2cond.residue import DomainError, GL2Mat, gl2_order, kernel_generators, mat_mul, random_gl2
from gl2cond.subgroups import (
    FiniteSubgroup,
    closure,
    commutator_subgroup,
    composition_factors,
    conjugate,
    contains,
    full_group,
    image_mod,
    index,
    index2_subgroups,
    intersection,
    is_conjugate,
    is_normal_in,
    join,
    kernel_subgroup,
    normal_subgroups,
    preimage_to,
    quotient,
    scalars,
    sl2,
    subgroups_up_to_conjugacy,
    trivial,
)
from gl2cond.tables import gl2_table
from gl2cond.taxonomy import borel, split_normalizer


def test_closure_examples(brute):
    assert closure([], 5).order == 1
    S = closure([(1, 1, 0, 1), (1, 0, 1, 1)], 3)
    assert S.order == 24 == sum(1 for x in brute.units(3) if brute.det(x, 3) == 1)
    assert full_group(9).order == 3888 == len(brute.units(9))


def test_elements_are_canonical():
    H = sl2(3)
    els = H.elements()
    assert els == sorted(els) and len(els) == 24
    assert all(g in H.element_set for g in H.generators)


def test_image_and_preimage():
    assert image_mod(full_group(8), 2).order == 6
    P = preimage_to(trivial(2), 8)
    assert P.order == 256 and P == kernel_subgroup(8, 2)
    with pytest.raises(DomainError):
        image_mod(full_group(8), 3)
    with pytest.raises(DomainError):
        preimage_to(full_group(4), 6)


def test_preimage_round_trip():
    rng = random.Random(11)
    for _ in range(50):
        H = FiniteSubgroup(4, [random_gl2(4, rng) for _ in range(rng.choice((1, 2)))])
        P = preimage_to(H, 8)
        assert image_mod(P, 4) == H
        assert gl2_order(8) // P.order == gl2_order(4) // H.order


def test_containment_and_index():
    G, S = full_group(5), sl2(5)
    assert contains(G, S) and index(G, S) == 4
    assert is_normal_in(scalars(5), G)
    assert index(G, borel(5)) == 6
    assert not is_normal_in(borel(5), G)
    with pytest.raises(DomainError):
        index(S, G)
    with pytest.raises(DomainError):
        contains(G, sl2(3))


def test_is_conjugate():
    N = split_normalizer(5)
    assert is_conjugate(N, N) is not None
    g = GL2Mat.from_rows([[1, 1], [0, 1]], 5)
    K = conjugate(N, g)
    assert K != N
    c = is_conjugate(N, K)
    assert c is not None and conjugate(N, c) == K
    reps = subgroups_up_to_conjugacy(full_group(9), {"surjects_mod": 3, "not_contains": "SL2"})
    assert is_conjugate(reps[0], reps[1]) is None


def test_commutators():
    assert commutator_subgroup(full_group(3)) == sl2(3)
    assert commutator_subgroup(sl2(5)) == sl2(5)
    assert commutator_subgroup(scalars(7)).order == 1


def test_join():
    H = borel(5)
    assert join(H, trivial(5)) == H
    assert join(sl2(9), full_group(9)) == full_group(9)
    J = join(sl2(9), scalars(9))
    squares = {u * u % 9 for u in range(9) if u % 3}
    direct = [x for x in gl2_table(9).elements if (x[0] * x[3] - x[1] * x[2]) % 9 in squares]
    assert J.order == len(direct) == 3888 // 2
    assert all(J.contains_element(x) for x in direct[::37])


def test_intersection():
    assert intersection(sl2(12), scalars(12)).order == 4
    assert intersection(borel(5), split_normalizer(5)).order == 16


def test_quotients():
    assert quotient(full_group(2), trivial(2)).order == 6
    Q = quotient(full_group(5), sl2(5))
    assert Q.order == 4 and Q.is_cyclic() and Q.is_latin_square()
    assert quotient(full_group(3), sl2(3)).order == 2
    with pytest.raises(DomainError):
        quotient(full_group(5), borel(5))


def test_normal_subgroups():
    orders = [N.order for N in normal_subgroups(full_group(5))]
    assert orders == [1, 2, 4, 120, 240, 480]
    Z = scalars(5)
    assert all(Z.contains(N) for N in normal_subgroups(full_group(5)) if (480 // N.order) % 60 == 0)


def test_index2_subgroups_gl28():
    subs = index2_subgroups(full_group(8))
    assert all(H.index_in_full() == 2 for H in subs)
    assert len({frozenset(H.element_set) for H in subs}) == len(subs) == 7
    onto4 = [H for H in subs if image_mod(H, 4) == full_group(4)]
    assert len(onto4) == 4


def test_index2_against_table_scan():
    tab = gl2_table(8)
    ours = {frozenset(H.element_set) for H in index2_subgroups(full_group(8))}
    scan = {frozenset(tab.tuples(n)) for n in tab.normal_subgroups(tab.all) if len(n) == tab.n // 2}
    assert ours == scan


def test_extension_route_matches_lattice_level4():
    fast = subgroups_up_to_conjugacy(full_group(4), {"surjects_mod": 2})
    tab = gl2_table(4)
    slow = [FiniteSubgroup(4, tab.tuples(tab.small_generators(s))) for s in tab.subgroup_classes()]
    slow = [H for H in slow if image_mod(H, 2) == full_group(2)]
    assert sorted(H.order for H in fast) == sorted(H.order for H in slow)
    for H in fast:
        assert sum(1 for K in slow if is_conjugate(H, K) is not None) == 1


def test_mod9_classes_against_full_lattice():
    """The extension route against the unstructured lattice scan of GL2(Z/9)."""
    fast = subgroups_up_to_conjugacy(full_group(9), {"surjects_mod": 3, "not_contains": "SL2"})
    tab = gl2_table(9)
    S9 = sl2(9)
    slow = [FiniteSubgroup(9, tab.tuples(tab.small_generators(s))) for s in tab.subgroup_classes()]
    slow = [H for H in slow if image_mod(H, 3) == full_group(3) and not H.contains(S9)]
    assert sorted(H.order for H in fast) == sorted(H.order for H in slow) == [48, 144]
    assert fast[1].contains(fast[0])
    assert fast[1].index_in_full() == 27


def test_filter_vocabulary():
    G = full_group(3)
    assert [H.order for H in subgroups_up_to_conjugacy(G, {"normal": True})] == [1, 2, 8, 24, 48]
    assert all(H.order == 24 for H in subgroups_up_to_conjugacy(G, {"index": 2}))
    with pytest.raises(DomainError):
        subgroups_up_to_conjugacy(G, {"bogus": 1})


def test_composition_factors():
    f = composition_factors(full_group(5))
    assert f.count("A5") == 1 and f.count("C2") == 3 and len(f) == 4
    assert composition_factors(sl2(5)) == ["A5", "C2"]
    assert composition_factors(scalars(7)) == ["C2", "C3"]
    assert composition_factors(full_group(3)) == ["C2", "C2", "C2", "C2", "C3"]


def test_composition_factors_conjugation_invariant():
    rng = random.Random(2)
    H = FiniteSubgroup(5, [random_gl2(5, rng), random_gl2(5, rng)])
    g = GL2Mat.from_tuple(random_gl2(5, rng), 5)
    assert composition_factors(H) == composition_factors(conjugate(H, g))


def test_abstract_group_lemma():
    """pi: GL2(Z/36) -> GL2(Z/18), N1 = ker(9 -> 3) x {1} (order 81), so
    ker pi (order 16) has coprime order and commutes with N1.  Then
    N1 inside H1 iff pi(N1) inside pi(H1).

    H1 is built from N1's generators each twisted by a random element of
    ker pi, which puts pi(N1) inside pi(H1) without obviously putting N1
    inside H1; the lemma says it must be.
    """
    rng = random.Random(17)
    m, d = 36, 18
    n1 = kernel_generators(m, 12)
    kp = FiniteSubgroup(m, kernel_generators(m, d)).elements()
    N1 = FiniteSubgroup(m, n1)
    N2 = image_mod(N1, d)
    assert N1.order == 81 and len(kp) == 16
    hits = 0
    for trial in range(30):
        gens = [random_gl2(m, rng) for _ in range(rng.choice((0, 1)))]
        if trial % 2:
            gens += [mat_mul(g, rng.choice(kp), m) for g in n1]
        H1 = FiniteSubgroup(m, gens)
        inside = H1.contains(N1)
        assert inside == image_mod(H1, d).contains(N2)
        hits += inside
    assert hits >= 15


def test_json_round_trip():
    H = borel(5)
    assert FiniteSubgroup.from_json(H.to_json()) == H
    with pytest.raises(DomainError):
        FiniteSubgroup.from_json({"level": 4, "generators": [[[2, 0], [0, 1]]]})
    with pytest.raises(DomainError):
        FiniteSubgroup.from_json({"generators": []})


def test_table_indices():
    tab, idx = borel(5).table()
    assert len(idx) == 80 and isinstance(idx, np.ndarray)
