"""Generator-defined subgroups of GL2(Z/mZ) and the lattice operations on them."""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from itertools import product

import numpy as np

from .chain import ReductionChain
from .residue import (
    MAX_GROUP_ORDER,
    DomainError,
    GL2Mat,
    ResourceGuardError,
    as_level,
    factorize,
    gl2_generators,
    gl2_order,
    identity,
    kernel_generators,
    mat_inv,
    mat_mul,
    mat_reduce,
    parse_matrix,
    sl2_generators,
    unit_group_generators,
)
from .tables import LATTICE_GUARD, MatrixTable, TableGroup, gl2_table


def _as_tuple(g, m):
    if isinstance(g, GL2Mat):
        if g.level != m:
            raise DomainError(f"generator at level {g.level}, expected {m}")
        return g.t
    if isinstance(g, tuple) and len(g) == 4 and all(isinstance(v, int) for v in g):
        return mat_reduce(g, m)
    return parse_matrix(g, m).t


class FiniteSubgroup:
    """The subgroup of GL2(Z/mZ) generated by ``generators``.

    Read as the level-m shadow of its full preimage in GL2(Zhat).  Elements
    are only materialized on request; orders and membership go through a
    reduction-tower stabilizer chain.
    """

    def __init__(self, level, generators=(), *, steps=None, name=None):
        self.level = as_level(level)
        if self.level < 1:
            raise DomainError(f"bad level {level!r}")
        self.generators = tuple(dict.fromkeys(_as_tuple(g, self.level) for g in generators))
        self._steps = steps
        self.name = name
        self._images = {}

    def __repr__(self):
        label = f" {self.name}" if self.name else ""
        return f"<FiniteSubgroup{label} level={self.level} order={self.order}>"

    @cached_property
    def chain(self) -> ReductionChain:
        return ReductionChain(self.level, self.generators, steps=self._steps)

    def with_steps(self, steps) -> "FiniteSubgroup":
        return FiniteSubgroup(self.level, self.generators, steps=steps, name=self.name)

    @property
    def order(self) -> int:
        return self.chain.order()

    def __len__(self):
        return self.order

    def contains_element(self, g) -> bool:
        return self.chain.contains(_as_tuple(g, self.level))

    def __contains__(self, g):
        return self.contains_element(g)

    def contains(self, other: "FiniteSubgroup") -> bool:
        _same_level(self, other)
        return all(self.chain.contains(g) for g in other.generators)

    def __eq__(self, other):
        if not isinstance(other, FiniteSubgroup):
            return NotImplemented
        return self.level == other.level and self.order == other.order and self.contains(other)

    def __hash__(self):
        return hash((self.level, self.order))

    def elements(self, guard=MAX_GROUP_ORDER) -> list[tuple]:
        """All elements as (a, b, c, d) tuples in lexicographic order."""
        if self.order > guard:
            raise ResourceGuardError(f"order {self.order} exceeds the materialization guard {guard}")
        return sorted(self.chain.iter_elements(guard))

    @cached_property
    def element_set(self) -> frozenset:
        return frozenset(self.chain.iter_elements())

    def matrices(self) -> list[GL2Mat]:
        return [GL2Mat.from_tuple(x, self.level) for x in self.elements()]

    def index_in_full(self) -> int:
        return gl2_order(self.level) // self.order

    def image_mod(self, d) -> "FiniteSubgroup":
        return image_mod(self, d)

    def preimage_to(self, n) -> "FiniteSubgroup":
        return preimage_to(self, n)

    def dets(self) -> set[int]:
        m = self.level
        seen = {1 % m}
        gens = [(g[0] * g[3] - g[1] * g[2]) % m for g in self.generators]
        frontier = list(seen)
        while frontier:
            nxt = []
            for x in frontier:
                for g in gens:
                    y = x * g % m
                    if y not in seen:
                        seen.add(y)
                        nxt.append(y)
            frontier = nxt
        return seen

    # -- table access ---------------------------------------------------

    def table(self) -> tuple[TableGroup, np.ndarray]:
        """(ambient table, element indices): GL2(Z/m) when small, else H itself."""
        if gl2_order(self.level) <= LATTICE_GUARD:
            tab = gl2_table(self.level)
            return tab, tab.closure(tab.indices(self.generators))
        if self.order > LATTICE_GUARD:
            raise ResourceGuardError(f"order {self.order} exceeds the lattice guard {LATTICE_GUARD}")
        tab = MatrixTable(self.level, self.chain.iter_elements())
        return tab, tab.all

    # -- serialization --------------------------------------------------

    def to_json(self) -> dict:
        return {"level": self.level, "generators": [[[a, b], [c, d]] for a, b, c, d in self.generators]}

    @classmethod
    def from_json(cls, obj) -> "FiniteSubgroup":
        try:
            level = obj["level"]
            gens = obj.get("generators", [])
        except (TypeError, KeyError, AttributeError):
            raise DomainError("subgroup JSON needs 'level' and 'generators'") from None
        if not isinstance(level, int) or isinstance(level, bool) or level < 1:
            raise DomainError(f"level must be a positive integer, got {level!r}")
        return cls(level, [parse_matrix(g, level).t for g in gens])


def _same_level(a, b):
    if a.level != b.level:
        raise DomainError(f"levels differ: {a.level} vs {b.level}")


# --------------------------------------------------------------------------
# standard groups


def full_group(m) -> FiniteSubgroup:
    return FiniteSubgroup(m, gl2_generators(as_level(m)), name=f"GL2(Z/{as_level(m)})")


def sl2(m) -> FiniteSubgroup:
    return FiniteSubgroup(m, sl2_generators(as_level(m)), name=f"SL2(Z/{as_level(m)})")


def scalars(m) -> FiniteSubgroup:
    m = as_level(m)
    return FiniteSubgroup(m, [(u, 0, 0, u) for u in unit_group_generators(m)], name="scalars")


def trivial(m) -> FiniteSubgroup:
    return FiniteSubgroup(m, [], name="trivial")


def kernel_subgroup(m, d) -> FiniteSubgroup:
    """ker(GL2(Z/m) -> GL2(Z/d))."""
    return FiniteSubgroup(m, kernel_generators(m, d), name=f"ker({m}->{d})")


# --------------------------------------------------------------------------
# operations


def closure(generators, m) -> FiniteSubgroup:
    return FiniteSubgroup(m, generators)


def image_mod(H: FiniteSubgroup, d) -> FiniteSubgroup:
    d = as_level(d)
    if H.level % d:
        raise DomainError(f"{d} does not divide the level {H.level}")
    if d == H.level:
        return H
    if d not in H._images:
        H._images[d] = FiniteSubgroup(d, [mat_reduce(g, d) for g in H.generators])
    return H._images[d]


def _lift(x, d, n):
    """Some lift of x in GL2(Z/d) to GL2(Z/n), d | n."""
    a, b, c, e = x
    for t in range(n // d):
        y = (a + d * t, b, c, e)
        if np.gcd((y[0] * y[3] - y[1] * y[2]) % n, n) == 1:
            return tuple(v % n for v in y)
    # every unit mod d lifts to a unit mod n; adjust the other diagonal entry
    for s, t in product(range(n // d), repeat=2):
        y = (a + d * s, b, c, e + d * t)
        if np.gcd((y[0] * y[3] - y[1] * y[2]) % n, n) == 1:
            return tuple(v % n for v in y)
    raise DomainError(f"no lift of {x} from {d} to {n}")


def preimage_to(H: FiniteSubgroup, n) -> FiniteSubgroup:
    n = as_level(n)
    if n % H.level:
        raise DomainError(f"level {H.level} does not divide {n}")
    gens = [_lift(g, H.level, n) for g in H.generators] + kernel_generators(n, H.level)
    return FiniteSubgroup(n, gens)


def contains(H: FiniteSubgroup, K: FiniteSubgroup) -> bool:
    return H.contains(K)


def is_normal_in(K: FiniteSubgroup, H: FiniteSubgroup) -> bool:
    """Is K a normal subgroup of H?"""
    _same_level(K, H)
    if not H.contains(K):
        return False
    m = H.level
    return all(
        K.chain.contains(mat_mul(mat_mul(h, k, m), mat_inv(h, m), m)) for h in H.generators for k in K.generators
    )


def index(H: FiniteSubgroup, K: FiniteSubgroup) -> int:
    _same_level(H, K)
    if not H.contains(K):
        raise DomainError("index of a non-subgroup")
    return H.order // K.order


def join(A: FiniteSubgroup, B: FiniteSubgroup) -> FiniteSubgroup:
    _same_level(A, B)
    return FiniteSubgroup(A.level, A.generators + B.generators)


def intersection(A: FiniteSubgroup, B: FiniteSubgroup, guard=MAX_GROUP_ORDER) -> FiniteSubgroup:
    _same_level(A, B)
    small, big = (A, B) if A.order <= B.order else (B, A)
    common = [x for x in small.chain.iter_elements(guard) if big.chain.contains(x)]
    return FiniteSubgroup(A.level, _prune_generators(common, A.level))


def _prune_generators(elements, m):
    gens = []
    chain = ReductionChain(m, [])
    for x in sorted(elements):
        if not chain.contains(x):
            gens.append(x)
            chain = ReductionChain(m, gens)
    return gens


def normal_closure(S, H: FiniteSubgroup) -> FiniteSubgroup:
    """Smallest normal subgroup of H containing the elements S."""
    m = H.level
    gens = [mat_reduce(tuple(s), m) for s in S]
    while True:
        K = FiniteSubgroup(m, gens)
        extra = []
        for h in H.generators:
            for k in K.chain.strong_generators() or K.generators:
                c = mat_mul(mat_mul(h, k, m), mat_inv(h, m), m)
                if not K.chain.contains(c) and c not in extra:
                    extra.append(c)
        if not extra:
            return K
        gens = list(K.generators) + extra


def commutator(g, h, m):
    return mat_mul(mat_mul(g, h, m), mat_inv(mat_mul(h, g, m), m), m)


def commutator_subgroup(H: FiniteSubgroup) -> FiniteSubgroup:
    m = H.level
    gens = H.generators
    comms = [commutator(a, b, m) for i, a in enumerate(gens) for b in gens[i + 1 :]]
    return normal_closure(comms, H)


def is_conjugate(H: FiniteSubgroup, K: FiniteSubgroup, guard=MAX_GROUP_ORDER, into=False):
    """A conjugator g with g H g^-1 = K (⊆ K when into=True) as GL2Mat, else None."""
    _same_level(H, K)
    m = H.level
    if not into and H.order != K.order:
        return None
    if into and K.order % H.order:
        return None
    if gl2_order(m) <= LATTICE_GUARD:
        tab = gl2_table(m)
        h = tab.closure(tab.indices(H.generators))
        k = tab.closure(tab.indices(K.generators))
        if not into and tab.fingerprint(h) != tab.fingerprint(k):
            return None
        g = tab.find_conjugator(h, k, tab.all, into=into)
        return None if g is None else GL2Mat.from_tuple(tab.elements[g], m)
    if gl2_order(m) > guard:
        raise ResourceGuardError(f"conjugator search over |GL2(Z/{m})| = {gl2_order(m)} exceeds guard")
    for g in full_group(m).chain.iter_elements(guard):
        gi = mat_inv(g, m)
        if all(K.chain.contains(mat_mul(mat_mul(g, x, m), gi, m)) for x in H.generators):
            return GL2Mat.from_tuple(g, m)
    return None


def conjugate(H: FiniteSubgroup, g) -> FiniteSubgroup:
    """g H g^-1."""
    m = H.level
    g = _as_tuple(g, m)
    gi = mat_inv(g, m)
    return FiniteSubgroup(m, [mat_mul(mat_mul(g, x, m), gi, m) for x in H.generators])


# --------------------------------------------------------------------------
# quotients


@dataclass
class QuotientGroup:
    parent: FiniteSubgroup
    normal: FiniteSubgroup
    cosets: list  # coset representatives (tuples), sorted
    table: np.ndarray  # multiplication on coset indices
    _label: dict

    @property
    def order(self) -> int:
        return len(self.cosets)

    def project(self, g) -> int:
        """Coset index of an element of the parent group."""
        return self._label[_as_tuple(g, self.parent.level)]

    def identity_index(self) -> int:
        return self._label[identity(self.parent.level)]

    def is_latin_square(self) -> bool:
        n = self.order
        full = np.arange(n)
        return all((np.sort(self.table[i]) == full).all() and (np.sort(self.table[:, i]) == full).all() for i in range(n))

    def is_cyclic(self) -> bool:
        n = self.order
        e = self.identity_index()
        for x in range(n):
            y, k = x, 1
            while y != e:
                y = self.table[y, x]
                k += 1
            if k == n:
                return True
        return n == 1

    def as_table_group(self) -> TableGroup:
        return TableGroup(self.table, identity=self.identity_index())


def quotient(G: FiniteSubgroup, N: FiniteSubgroup, guard=10**6) -> QuotientGroup:
    if not is_normal_in(N, G):
        raise DomainError("quotient by a subgroup that is not normal")
    m = G.level
    elems = G.chain.iter_elements(guard)
    nelems = N.chain.iter_elements(guard)
    label_of = {}
    reps = []
    for x in sorted(elems):
        if x in label_of:
            continue
        # x is the lexicographic minimum of its coset since cosets are met in sorted order
        reps.append(x)
        for n_ in nelems:
            label_of[mat_mul(x, n_, m)] = len(reps) - 1
    size = len(reps)
    table = np.empty((size, size), dtype=np.int64)
    for i, a in enumerate(reps):
        for j, b in enumerate(reps):
            table[i, j] = label_of[mat_mul(a, b, m)]
    return QuotientGroup(G, N, reps, table, label_of)


# --------------------------------------------------------------------------
# lattice enumeration


def _from_indices(tab, idx, m) -> FiniteSubgroup:
    return FiniteSubgroup(m, tab.tuples(tab.small_generators(idx)))


def normal_subgroups(G: FiniteSubgroup) -> list[FiniteSubgroup]:
    tab, idx = G.table()
    return [_from_indices(tab, n, G.level) for n in tab.normal_subgroups(idx)]


def index2_subgroups(G: FiniteSubgroup) -> list[FiniteSubgroup]:
    """Kernels of the surjections G -> C2, via G / G^2[G,G]."""
    m = G.level
    gens = G.generators
    seeds = [mat_mul(g, g, m) for g in gens] + [commutator(a, b, m) for i, a in enumerate(gens) for b in gens[i + 1 :]]
    N0 = normal_closure(seeds, G)
    rank = (G.order // N0.order).bit_length() - 1
    # coordinates of each generator in G / N0 = F_2^rank
    basis: list[tuple] = []
    coords = {}
    span = N0
    for g in gens:
        if span.contains_element(g):
            continue
        basis.append(g)
        span = FiniteSubgroup(m, N0.generators + tuple(basis))
    assert len(basis) == rank
    out = []
    for f in range(1, 2**rank):
        # kernel of the functional sending basis[i] to bit i of f
        kgens = list(N0.generators)
        kgens += [b for i, b in enumerate(basis) if not (f >> i) & 1]
        odd = [b for i, b in enumerate(basis) if (f >> i) & 1]
        kgens += [mat_mul(odd[0], b, m) for b in odd[1:]]
        kgens += [mat_mul(odd[0], odd[0], m)]
        out.append(FiniteSubgroup(m, kgens))
    del coords
    return out


def _subspaces_stable(p, act_mats):
    """All subspaces of F_p^4 stable under the given 4x4 matrices (row vectors)."""
    vectors = list(product(range(p), repeat=4))

    def apply(M, v):
        return tuple(sum(v[i] * M[i][j] for i in range(4)) % p for j in range(4))

    def stable_span(seed):
        span = {(0, 0, 0, 0)}
        frontier = list(seed)
        while frontier:
            v = frontier.pop()
            if v in span:
                continue
            new = {tuple((s[i] + c * v[i]) % p for i in range(4)) for s in span for c in range(p)}
            span |= new
            for M in act_mats:
                w = apply(M, v)
                if w not in span:
                    frontier.append(w)
        return frozenset(span)

    found = {frozenset({(0, 0, 0, 0)})}
    queue = list(found)
    while queue:
        U = queue.pop()
        for v in vectors:
            if v in U:
                continue
            W = stable_span(list(U) + [v])
            if W not in found:
                found.add(W)
                queue.append(W)
    return sorted(found, key=lambda U: (len(U), sorted(U)))


def lifts_surjecting(G_level, target: FiniteSubgroup):
    """All subgroups H of GL2(Z/q), q = p * level(target) with p | level(target),
    such that H maps onto ``target``.

    The kernel K = {I + dX} of reduction to d = level(target) is elementary
    abelian, K ≅ M2(F_p), and target acts on it by conjugation.  H ∩ K is a
    target-stable subspace U and H/U is a complement to K/U; it is fixed by a
    choice of lift for each generator of target, modulo U.
    """
    q = G_level
    d = target.level
    p = q // d
    if q % d or d % p or len(factorize(p)) != 1 or factorize(p)[0][1] != 1:
        raise DomainError(f"level {q} is not a prime step above {d}")
    tab = gl2_table(d) if gl2_order(d) <= LATTICE_GUARD else MatrixTable(d, target.chain.iter_elements())
    t_idx = tab.closure(tab.indices(target.generators))
    t_gens = tab.small_generators(t_idx)
    gen_tuples = [tab.elements[i] for i in t_gens]
    lifts = [_lift(g, d, q) for g in gen_tuples]

    def adjoint(g):
        # X -> g X g^-1 on M2(F_p) in the basis E11, E12, E21, E22 (row-vector convention)
        gp = mat_reduce(g, p)
        gi = mat_inv(gp, p)
        rows = []
        for v in ((1, 0, 0, 0), (0, 1, 0, 0), (0, 0, 1, 0), (0, 0, 0, 1)):
            a = _mat_mul_plain(_mat_mul_plain(gp, v, p), gi, p)
            rows.append(a)
        return rows

    acts = [adjoint(g) for g in gen_tuples]
    subspaces = _subspaces_stable(p, acts)

    # BFS tree of target over its generators
    order = [t_idx[0] if tab.elements[t_idx[0]] == identity(d) else tab.e]
    order = [tab.e]
    parent = {tab.e: None}
    edges = []
    for x in order:
        for i, g in enumerate(t_gens):
            y = int(tab.table[x, g])
            if y not in parent:
                parent[y] = (x, i)
                order.append(y)
            else:
                edges.append((x, i, y))

    def to_vec(k):
        # k = I + dX mod q
        return ((k[0] - 1) // d % p, k[1] // d % p, k[2] // d % p, (k[3] - 1) // d % p)

    def from_vec(v):
        return ((1 + d * v[0]) % q, d * v[1] % q, d * v[2] % q, (1 + d * v[3]) % q)

    results = {}
    for U in subspaces:
        reps = sorted({min(tuple((v[i] + u[i]) % p for i in range(4)) for u in U) for v in product(range(p), repeat=4)})
        for choice in product(reps, repeat=len(t_gens)):
            L = [mat_mul(lifts[i], from_vec(choice[i]), q) for i in range(len(t_gens))]
            phi = {tab.e: identity(q)}
            for x in order[1:]:
                px, i = parent[x]
                phi[x] = mat_mul(phi[px], L[i], q)
            ok = True
            for x, i, y in edges:
                diff = mat_mul(mat_inv(phi[y], q), mat_mul(phi[x], L[i], q), q)
                if to_vec(diff) not in U:
                    ok = False
                    break
            if not ok:
                continue
            gens = L + [from_vec(u) for u in _basis(U, p)]
            H = FiniteSubgroup(q, gens)
            key = frozenset(mat_mul(phi[x], from_vec(u), q) for x in order for u in U)
            results.setdefault(key, H)
    return list(results.values()), list(results.keys())


def _mat_mul_plain(x, y, m):
    return mat_mul(x, y, m)


def _basis(U, p):
    basis = []
    span = {(0, 0, 0, 0)}
    for v in sorted(U):
        if v in span:
            continue
        basis.append(v)
        span = {tuple((s[i] + c * v[i]) % p for i in range(4)) for s in span for c in range(p)}
    return basis


def _conjugacy_reps(m, subgroups, keys, ambient_gens):
    """Group subgroups (with element-set keys) into GL2(Z/m)-conjugacy classes."""
    index_of = {k: i for i, k in enumerate(keys)}
    parent = list(range(len(keys)))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i, k in enumerate(keys):
        for g in ambient_gens:
            gi = mat_inv(g, m)
            c = frozenset(mat_mul(mat_mul(g, x, m), gi, m) for x in k)
            j = index_of.get(c)
            if j is None:
                raise DomainError("candidate family is not closed under conjugation")
            a, b = find(i), find(j)
            if a != b:
                parent[max(a, b)] = min(a, b)
    classes = {}
    for i in range(len(keys)):
        classes.setdefault(find(i), []).append(i)
    reps = []
    for members in classes.values():
        best = min(members, key=lambda i: (len(keys[i]), sorted(keys[i])))
        reps.append(subgroups[best])
    return sorted(reps, key=lambda H: (H.order, sorted(H.element_set)))


def _matches(H: FiniteSubgroup, G: FiniteSubgroup, flt: dict) -> bool:
    for key, val in flt.items():
        if key == "index":
            if G.order != val * H.order:
                return False
        elif key == "surjects_mod":
            if image_mod(H, val) != image_mod(G, val):
                return False
        elif key == "not_contains":
            if val != "SL2":
                raise DomainError(f"unknown not_contains target {val!r}")
            if H.contains(sl2(H.level)):
                return False
        elif key == "contains":
            if val != "SL2":
                raise DomainError(f"unknown contains target {val!r}")
            if not H.contains(sl2(H.level)):
                return False
        elif key == "normal":
            if is_normal_in(H, G) != bool(val):
                return False
        else:
            raise DomainError(f"unknown filter key {key!r}")
    return True


def subgroups_up_to_conjugacy(G: FiniteSubgroup, flt=None, guard=LATTICE_GUARD) -> list[FiniteSubgroup]:
    """One representative per G-conjugacy class of subgroups passing ``flt``.

    ``flt`` uses the JSON vocabulary {"index": k}, {"surjects_mod": d},
    {"not_contains": "SL2"}, {"normal": true}; keys combine conjunctively.
    """
    flt = dict(flt or {})
    m = G.level
    is_full = G.order == gl2_order(m)
    d = flt.get("surjects_mod")
    if flt.get("normal"):
        cands = normal_subgroups(G)
    elif flt.get("index") == 2:
        cands = index2_subgroups(G)
    elif d and is_full and d != m and m % d == 0 and _prime_step(m, d):
        subs, keys = lifts_surjecting(m, full_group(d))
        cands = _conjugacy_reps(m, subs, keys, gl2_generators(m))
    else:
        if G.order > guard:
            raise ResourceGuardError(f"subgroup lattice of a group of order {G.order} exceeds guard {guard}")
        tab, idx = G.table()
        cands = [_from_indices(tab, s, m) for s in tab.subgroup_classes(idx, guard=guard)]
    return [H for H in cands if _matches(H, G, flt)]


def _prime_step(m, d):
    p = m // d
    return len(factorize(p)) == 1 and factorize(p)[0][1] == 1 and d % p == 0


# --------------------------------------------------------------------------
# composition factors

SIMPLE_BY_ORDER = {60: "A5", 168: "PSL(2,7)", 360: "A6", 504: "PSL(2,8)", 660: "PSL(2,11)", 1092: "PSL(2,13)", 2448: "PSL(2,17)"}


def simple_label(order: int) -> str:
    fac = factorize(order)
    if len(fac) == 1 and fac[0][1] == 1:
        return f"C{order}"
    return SIMPLE_BY_ORDER.get(order, f"Simple({order})")


def composition_factors(H: FiniteSubgroup) -> list[str]:
    """Jordan-Hölder factors of H as a sorted list of labels (C_p, A5, ...)."""
    tab, idx = H.table()
    return sorted(_factors(tab, idx))


def _factors(tab: TableGroup, idx) -> list[str]:
    out = []
    while len(idx) > 1:
        gens = tab.small_generators(idx)
        der = tab.commutator_subgroup(idx, gens)
        if len(der) < len(idx):
            for p, e in factorize(len(idx) // len(der)):
                out += [f"C{p}"] * e
            idx = der
            continue
        # perfect: a largest proper normal subgroup is maximal normal
        normals = [n for n in tab.normal_subgroups(idx, gens) if len(n) < len(idx)]
        top = max(normals, key=len)
        out.append(simple_label(len(idx) // len(top)))
        idx = top
    return out
