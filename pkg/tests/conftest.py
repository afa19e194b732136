"""Brute-force oracles shared by the tests; deliberately naive and independent
of the chain and table code in the package."""
from itertools import product
from math import gcd

import pytest


def bf_mul(x, y, m):
    a, b, c, d = x
    e, f, g, h = y
    return ((a * e + b * g) % m, (a * f + b * h) % m, (c * e + d * g) % m, (c * f + d * h) % m)


def bf_units(m):
    return [x for x in product(range(m), repeat=4) if gcd(x[0] * x[3] - x[1] * x[2], m) == 1]


def bf_closure(gens, m):
    one = (1 % m, 0, 0, 1 % m)
    seen = {one}
    frontier = [one]
    while frontier:
        nxt = []
        for x in frontier:
            for g in gens:
                y = bf_mul(x, g, m)
                if y not in seen:
                    seen.add(y)
                    nxt.append(y)
        frontier = nxt
    return seen


def bf_det(x, m):
    return (x[0] * x[3] - x[1] * x[2]) % m


@pytest.fixture
def brute():
    class B:
        mul = staticmethod(bf_mul)
        units = staticmethod(bf_units)
        closure = staticmethod(bf_closure)
        det = staticmethod(bf_det)

    return B
