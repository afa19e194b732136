import random

import pytest

from gl2cond.residue import (
    DomainError,
    GL2Mat,
    Modulus,
    crt_join,
    crt_split,
    det_inverse,
    gl2_order,
    iter_gl2,
    kernel_elements,
    kernel_generators,
    parse_matrix,
    prime_to_part,
    rad,
    rad_prime,
    random_gl2,
    reduce,
)


def test_modulus_fields():
    M = Modulus(72)
    assert M.factors == ((2, 3), (3, 2))
    assert int(M.rad()) == 6 and int(M.rad_prime()) == 12
    assert int(M.prime_to_part(8)) == 9
    with pytest.raises(DomainError):
        Modulus(0)


# 4 | 12, so the doubling rule applies: rad'(12) = 2 * 6
@pytest.mark.parametrize("m,want", [(12, 12), (6, 6), (8, 4), (40, 20), (1, 1), (2, 2), (9, 3), (148, 148)])
def test_rad_prime(m, want):
    assert rad_prime(m) == want


@pytest.mark.parametrize("m,d,want", [(72, 8, 9), (72, 72, 1), (7, 1, 7)])
def test_prime_to_part(m, d, want):
    assert prime_to_part(m, d) == want


def test_prime_to_part_needs_divisor():
    with pytest.raises(DomainError):
        prime_to_part(72, 5)


def test_det_inverse():
    g = GL2Mat.identity(12)
    assert det_inverse(g) == (1, g)
    u = GL2Mat.from_rows([[1, 1], [0, 1]], 9)
    det, inv = det_inverse(u)
    assert det == 1 and inv.rows() == [[1, 8], [0, 1]]
    w = GL2Mat.from_rows([[0, 1], [2, 0]], 5)
    det, inv = det_inverse(w)
    assert det == 3
    assert w * inv == GL2Mat.identity(5) == inv * w
    assert inv.det * det % 5 == 1


def test_non_unit_rejected():
    with pytest.raises(DomainError):
        GL2Mat.from_rows([[2, 0], [0, 1]], 4)
    with pytest.raises(DomainError):
        parse_matrix([[5, 0], [0, 1]], 5)


def test_reduce():
    assert reduce(GL2Mat.from_rows([[5, 0], [0, 5]], 8), 4) == GL2Mat.identity(4)
    g = GL2Mat.from_rows([[3, 1], [2, 7]], 8)
    assert reduce(g, 8) == g
    with pytest.raises(DomainError):
        reduce(g, 3)


def test_reduce_is_homomorphism():
    rng = random.Random(3)
    for _ in range(100):
        g = GL2Mat.from_tuple(random_gl2(24, rng), 24)
        h = GL2Mat.from_tuple(random_gl2(24, rng), 24)
        assert reduce(g * h, 6) == reduce(g, 6) * reduce(h, 6)


def test_crt_split_scalar():
    parts = crt_split(GL2Mat.from_rows([[7, 0], [0, 7]], 12))
    assert [p.level for p in parts] == [4, 3]
    assert parts[0].rows() == [[3, 0], [0, 3]] and parts[1].rows() == [[1, 0], [0, 1]]
    assert len(crt_split(GL2Mat.identity(27))) == 1


def test_crt_round_trip():
    rng = random.Random(5)
    for _ in range(100):
        g = GL2Mat.from_tuple(random_gl2(72, rng), 72)
        assert crt_join(crt_split(g)) == g


def test_crt_join_rejects_shared_primes():
    with pytest.raises(DomainError):
        crt_join([GL2Mat.identity(4), GL2Mat.identity(6)])


@pytest.mark.parametrize("m,order", [(2, 6), (3, 48), (4, 96), (5, 480), (8, 1536), (9, 3888)])
def test_gl2_order_against_count(m, order, brute):
    assert len(brute.units(m)) == order == gl2_order(m)
    assert sum(1 for _ in iter_gl2(m)) == order


def test_kernel_elements(brute):
    ker = kernel_elements(9, 3)
    assert len(ker) == 81 and all(g.det % 3 for g in ker)
    assert kernel_elements(7, 7) == [GL2Mat.identity(7)]
    ker8 = {g.t for g in kernel_elements(8, 2)}
    direct = {x for x in brute.units(8) if tuple(v % 2 for v in x) == (1, 0, 0, 1)}
    assert ker8 == direct and len(ker8) == 256 == gl2_order(8) // gl2_order(2)


def test_kernel_elements_needs_radical():
    with pytest.raises(DomainError):
        kernel_elements(12, 2)


def test_kernel_generators_span_kernel(brute):
    for m, d in [(8, 2), (12, 6), (12, 1), (9, 3)]:
        got = brute.closure(kernel_generators(m, d), m)
        want = {x for x in brute.units(m) if tuple(v % d for v in x) == (1 % d, 0, 0, 1 % d)}
        assert got == want


def test_rad():
    assert rad(72) == 6 and rad(1) == 1 and rad(148) == 74
