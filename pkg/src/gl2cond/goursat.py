"""Fibered products over coprime levels and the quadratic characters at level 8."""
from __future__ import annotations

from dataclasses import dataclass
from math import gcd

import numpy as np

from .chain import split_steps
from .residue import DomainError, GL2Mat, crt_join_tuples, identity, mat_det, mat_inv, mat_mul, mat_reduce
from .subgroups import FiniteSubgroup, QuotientGroup, full_group, image_mod, quotient
from .tables import gl2_table


def _join(x, m1, y, m2):
    return crt_join_tuples([(x, m1), (y, m2)])[0]


@dataclass
class GoursatDecomposition:
    m1: int
    m2: int
    g1: FiniteSubgroup
    g2: FiniteSubgroup
    n1: FiniteSubgroup
    n2: FiniteSubgroup
    gamma: QuotientGroup
    psi1: np.ndarray  # coset index of each element of g1, in g1.elements() order
    psi2: np.ndarray

    @property
    def gamma_order(self) -> int:
        return self.gamma.order

    def to_json(self) -> dict:
        return {
            "gamma_order": self.gamma_order,
            "n1": self.n1.to_json(),
            "n2": self.n2.to_json(),
            "psi1": self.psi1.tolist(),
            "psi2": self.psi2.tolist(),
        }


def fiber_kernels(H: FiniteSubgroup, m1: int, m2: int) -> tuple[FiniteSubgroup, FiniteSubgroup]:
    """N1 = {g1 : (g1, 1) in H} at level m1, and N2 symmetrically."""
    n1 = H.with_steps(split_steps(m2, m1)).chain.kernel_generators(m2)
    n2 = H.with_steps(split_steps(m1, m2)).chain.kernel_generators(m1)
    return (
        FiniteSubgroup(m1, [mat_reduce(x, m1) for x in n1]),
        FiniteSubgroup(m2, [mat_reduce(x, m2) for x in n2]),
    )


def decompose(H: FiniteSubgroup, m1: int, m2: int, G1=None, G2=None) -> GoursatDecomposition:
    if gcd(m1, m2) != 1 or m1 * m2 != H.level:
        raise DomainError(f"({m1}, {m2}) is not a coprime split of {H.level}")
    P1, P2 = image_mod(H, m1), image_mod(H, m2)
    if G1 is not None and P1 != G1:
        raise DomainError("projection to the first factor is not onto G1")
    if G2 is not None and P2 != G2:
        raise DomainError("projection to the second factor is not onto G2")
    N1, N2 = fiber_kernels(H, m1, m2)
    gamma = quotient(P1, N1)
    e1 = P1.elements()
    psi1 = np.array([gamma.project(x) for x in e1], dtype=np.int64)
    # psi2 is forced on generators: (h mod m1, h mod m2) lies in H for each generator h
    e2 = P2.elements()
    pos2 = {x: i for i, x in enumerate(e2)}
    psi2 = np.full(len(e2), -1, dtype=np.int64)
    psi2[pos2[identity(m2)]] = gamma.identity_index()
    steps = [(mat_reduce(h, m2), gamma.project(mat_reduce(h, m1))) for h in H.generators]
    frontier = [identity(m2)]
    while frontier:
        nxt = []
        for x in frontier:
            px = psi2[pos2[x]]
            for y, c in steps:
                z = mat_mul(x, y, m2)
                i = pos2[z]
                if psi2[i] < 0:
                    psi2[i] = gamma.table[px, c]
                    nxt.append(z)
        frontier = nxt
    return GoursatDecomposition(m1, m2, P1, P2, N1, N2, gamma, psi1, psi2)


def fibered_product(G1: FiniteSubgroup, G2: FiniteSubgroup, psi1, psi2) -> FiniteSubgroup:
    """{(g1, g2) : psi1(g1) = psi2(g2)} at level m1*m2.

    psi1, psi2 index the elements of G1, G2 in canonical order; the values
    are labels in a common quotient, whose identity is psi1(1).
    """
    m1, m2 = G1.level, G2.level
    if gcd(m1, m2) != 1:
        raise DomainError(f"levels {m1}, {m2} are not coprime")
    e1, e2 = G1.elements(), G2.elements()
    psi1, psi2 = np.asarray(psi1), np.asarray(psi2)
    if len(psi1) != len(e1) or len(psi2) != len(e2):
        raise DomainError("psi arrays do not match the element counts")
    if set(psi1.tolist()) != set(psi2.tolist()):
        raise DomainError("psi maps do not land on the same quotient")
    one = psi1[e1.index(identity(m1))]
    if psi2[e2.index(identity(m2))] != one:
        raise DomainError("psi maps disagree on the identity")
    k = len(set(psi1.tolist()))
    if len(e1) % k or np.count_nonzero(psi1 == one) * k != len(e1) or np.count_nonzero(psi2 == one) * k != len(e2):
        raise DomainError("psi maps are not surjective homomorphisms onto a common quotient")
    m = m1 * m2
    id1, id2 = identity(m1), identity(m2)
    gens = [_join(x, m1, id2, m2) for x, v in zip(e1, psi1) if v == one]
    gens += [_join(id1, m1, y, m2) for y, v in zip(e2, psi2) if v == one]
    first = {}
    for y, v in zip(e2, psi2):
        first.setdefault(int(v), y)
    gens += [_join(x, m1, first[int(psi1[e1.index(x)])], m2) for x in G1.generators]
    return FiniteSubgroup(m, _thin(gens, m))


def _thin(gens, m):
    """Drop generators already in the span of the earlier ones."""
    from .chain import ReductionChain

    kept = []
    chain = ReductionChain(m, [])
    for g in gens:
        if not chain.contains(g):
            kept.append(g)
            chain = ReductionChain(m, kept)
    return kept


def recompose(dec: GoursatDecomposition) -> FiniteSubgroup:
    return fibered_product(dec.g1, dec.g2, dec.psi1, dec.psi2)


# --------------------------------------------------------------------------
# characters of order 2 and fibered products built from them


def kernel_of_character(G: FiniteSubgroup, chi) -> FiniteSubgroup:
    """ker(chi) for a homomorphism chi: G -> {+1, -1}, via Schreier generators."""
    m = G.level
    odd = [s for s in G.generators if chi(s) == -1]
    if not odd:
        return G
    t = odd[0]
    ti = mat_inv(t, m)
    gens = []
    for s in G.generators:
        if chi(s) == 1:
            gens += [s, mat_mul(mat_mul(t, s, m), ti, m)]
        else:
            gens += [mat_mul(s, ti, m), mat_mul(t, s, m)]
    return FiniteSubgroup(m, gens)


def character_fibered_product(m1, chi1, m2, chi2, G1=None, G2=None) -> FiniteSubgroup:
    """{(g1, g2) : chi1(g1) = chi2(g2)} for surjective characters to {+1, -1}."""
    if gcd(m1, m2) != 1:
        raise DomainError(f"levels {m1}, {m2} are not coprime")
    G1 = G1 or full_group(m1)
    G2 = G2 or full_group(m2)
    t1 = next((g for g in G1.generators if chi1(g) == -1), None)
    t2 = next((g for g in G2.generators if chi2(g) == -1), None)
    if t1 is None or t2 is None:
        raise DomainError("both characters must be nontrivial")
    K1, K2 = kernel_of_character(G1, chi1), kernel_of_character(G2, chi2)
    id1, id2 = identity(m1), identity(m2)
    gens = [_join(x, m1, id2, m2) for x in K1.generators]
    gens += [_join(id1, m1, y, m2) for y in K2.generators]
    gens.append(_join(t1, m1, t2, m2))
    return FiniteSubgroup(m1 * m2, gens)


def legendre(a, p) -> int:
    a %= p
    if a == 0:
        return 0
    return 1 if pow(a, (p - 1) // 2, p) == 1 else -1


def det_legendre(p):
    """g -> (det g / p) on GL2(Z/p)."""
    return lambda g: legendre(mat_det(g, p), p)


def eps(g) -> int:
    """Sign of g mod 2 acting on the three nonzero vectors of F_2^2."""
    a, b, c, d = (v % 2 for v in g)
    vecs = [(1, 0), (0, 1), (1, 1)]
    images = [((a * x + b * y) % 2, (c * x + d * y) % 2) for x, y in vecs]
    perm = [vecs.index(v) for v in images]
    inversions = sum(1 for i in range(3) for j in range(i + 1, 3) if perm[i] > perm[j])
    return -1 if inversions % 2 else 1


_CHI8 = {1: 1, 3: -1, 5: -1, 7: 1}
_CHI4 = {1: 1, 3: -1}


def chi8(g) -> int:
    return _CHI8[(g[0] * g[3] - g[1] * g[2]) % 8]


def chi4(g) -> int:
    return _CHI4[(g[0] * g[3] - g[1] * g[2]) % 4]


def mod8_profile(g) -> tuple[int, int, int]:
    if isinstance(g, GL2Mat):
        if g.level != 8:
            raise DomainError(f"mod8_profile needs level 8, got {g.level}")
        g = g.t
    return chi8(g), chi4(g), eps(g)


INDEX2_MOD8 = {
    "ker(chi8)": ((1, 0, 0), "sqrt2"),
    "ker(chi8*chi4)": ((1, 1, 0), "sqrt-2"),
    "ker(chi8*eps)": ((1, 0, 1), "sqrt(2D)"),
    "ker(chi8*chi4*eps)": ((1, 1, 1), "sqrt(-2D)"),
}


def _combined(mask):
    def chi(g):
        v = 1
        for use, val in zip(mask, mod8_profile(g)):
            if use:
                v *= val
        return v

    return chi


def mod8_kernel(name) -> FiniteSubgroup:
    mask, _ = INDEX2_MOD8[name]
    H = kernel_of_character(full_group(8), _combined(mask))
    H.name = name
    return H


def identify_index2_mod8(H: FiniteSubgroup) -> tuple[str, str]:
    """(kernel name, quadratic field tag) for one of the four index-2 subgroups."""
    if H.level != 8:
        raise DomainError(f"level 8 expected, got {H.level}")
    if H.index_in_full() != 2 or image_mod(H, 4) != full_group(4):
        raise DomainError("not an index-2 subgroup surjecting mod 4")
    for name, (mask, tag) in INDEX2_MOD8.items():
        chi = _combined(mask)
        if all(chi(g) == 1 for g in H.generators):
            return name, tag
    raise DomainError("index-2 subgroup outside the four character kernels")


def character_table_mod8():
    """The three characters evaluated on all of GL2(Z/8), for homomorphism checks."""
    tab = gl2_table(8)
    vals = np.array([mod8_profile(x) for x in tab.elements], dtype=np.int64)
    return tab, vals
