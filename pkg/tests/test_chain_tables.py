import random

import numpy as np
import pytest

from gl2cond.chain import ReductionChain, default_steps, split_steps
from gl2cond.residue import ResourceGuardError, gl2_generators, gl2_order, kernel_generators, random_gl2
from gl2cond.tables import MatrixTable, gl2_table


@pytest.mark.parametrize("m", [2, 3, 4, 5, 8, 9, 12, 13, 24, 36, 37, 72, 148])
def test_full_group_orders(m):
    assert ReductionChain(m, gl2_generators(m)).order() == gl2_order(m)


def test_steps():
    assert default_steps(72) == [2, 3, 2, 2, 3]
    assert split_steps(8, 9) == [2, 2, 2, 3, 3]
    with pytest.raises(ValueError):
        ReductionChain(12, [], steps=[2, 2])


@pytest.mark.parametrize("m", [6, 8, 9, 10, 12])
def test_random_subgroups_match_closure(m, brute):
    rng = random.Random(m)
    for _ in range(6):
        gens = [random_gl2(m, rng) for _ in range(rng.choice((1, 2)))]
        want = brute.closure(gens, m)
        ch = ReductionChain(m, gens)
        assert ch.order() == len(want)
        assert set(ch.iter_elements()) == want
        others = [x for x in brute.units(m) if x not in want][:50]
        assert all(ch.contains(x) for x in list(want)[:50])
        assert not any(ch.contains(x) for x in others)


def test_step_order_does_not_matter():
    rng = random.Random(9)
    gens = [random_gl2(72, rng) for _ in range(2)]
    a = ReductionChain(72, gens)
    b = ReductionChain(72, gens, steps=split_steps(9, 8))
    assert a.order() == b.order()


def test_kernel_generators_from_chain(brute):
    gens = gl2_generators(12)
    ch = ReductionChain(12, gens, steps=split_steps(4, 3))
    ker = brute.closure(ch.kernel_generators(4), 12)
    assert len(ker) == gl2_order(3)
    assert all(tuple(v % 4 for v in x) == (1, 0, 0, 1) for x in ker)


def test_layer_orders():
    ch = ReductionChain(8, kernel_generators(8, 2))
    assert ch.layer_orders() == [1, 16, 16]


def test_guard():
    with pytest.raises(ResourceGuardError):
        ReductionChain(72, gl2_generators(72)).iter_elements(guard=1000)


def test_table_is_group(brute):
    tab = gl2_table(4)
    assert tab.n == 96
    e = tab.e
    assert (tab.table[e] == np.arange(96)).all()
    assert (tab.table[np.arange(96), tab.inv] == e).all()
    x, y = tab.elements[5], tab.elements[17]
    assert tab.elements[tab.table[5, 17]] == brute.mul(x, y, 4)


def test_matrix_table_rejects_open_sets():
    with pytest.raises(ValueError):
        MatrixTable(3, [(1, 0, 0, 1), (1, 1, 0, 1)])


def test_subgroup_class_counts():
    # classical counts: S3 has 4 classes of subgroups, GL(2,3) has 16
    assert len(gl2_table(2).subgroup_classes()) == 4
    assert len(gl2_table(3).subgroup_classes()) == 16


def test_all_subgroups_of_gl23_by_brute_force(brute):
    """Classes times class sizes against closures of all pairs.

    All subgroups of GL(2,3) are 2-generated, so the pair closures list
    every one of them.
    """
    els = brute.units(3)
    every = {frozenset(brute.closure([x, y], 3)) for x in els for y in els}
    tab = gl2_table(3)
    total = sum(tab.n // len(tab.normalizer(rep, tab.all)) for rep in tab.subgroup_classes())
    assert total == len(every) == 55


def test_normal_subgroups_gl25():
    tab = gl2_table(5)
    assert [len(n) for n in tab.normal_subgroups(tab.all)] == [1, 2, 4, 120, 240, 480]
