"""Cayley-table groups for lattice computations on small groups.

Subgroups are sorted ``numpy`` index arrays into the ambient table.  All
routines are exact; numpy is only used to vectorize table lookups.
"""
from __future__ import annotations

from functools import lru_cache

import numpy as np

from .residue import ResourceGuardError, encode, gl2_order, iter_gl2, mat_det

LATTICE_GUARD = 10**4


def as_key(idx: np.ndarray, n: int) -> bytes:
    mask = np.zeros(n, dtype=bool)
    mask[idx] = True
    return np.packbits(mask).tobytes()


class TableGroup:
    """A finite group given by its multiplication table; element 0 need not be 1."""

    def __init__(self, table: np.ndarray, identity: int = 0, labels=None):
        self.table = table
        self.n = table.shape[0]
        self.e = identity
        self.labels = labels
        self.inv = np.empty(self.n, dtype=np.int64)
        rows, cols = np.nonzero(table == identity)
        self.inv[rows] = cols
        self.all = np.arange(self.n)
        self._orders = None

    # -- basics ---------------------------------------------------------

    def mul(self, x, y):
        return self.table[x, y]

    def element_orders(self) -> np.ndarray:
        if self._orders is None:
            orders = np.ones(self.n, dtype=np.int64)
            power = self.all.copy()
            done = power == self.e
            k = 1
            while not done.all():
                power = self.table[power, self.all]
                k += 1
                newly = (power == self.e) & ~done
                orders[newly] = k
                done |= newly
            self._orders = orders
        return self._orders

    def mask(self, idx) -> np.ndarray:
        out = np.zeros(self.n, dtype=bool)
        out[idx] = True
        return out

    def key(self, idx) -> bytes:
        return as_key(idx, self.n)

    def closure(self, gens) -> np.ndarray:
        gens = np.unique(np.asarray(list(gens), dtype=np.int64))
        seen = np.zeros(self.n, dtype=bool)
        seen[self.e] = True
        if gens.size == 0:
            return np.array([self.e])
        frontier = np.array([self.e])
        while frontier.size:
            prod = np.unique(self.table[frontier[:, None], gens[None, :]].ravel())
            new = prod[~seen[prod]]
            seen[new] = True
            frontier = new
        return np.flatnonzero(seen)

    def small_generators(self, idx) -> list[int]:
        """Greedy generating set for the subgroup with elements idx."""
        idx = np.asarray(idx)
        gens: list[int] = []
        current = np.array([self.e])
        cur_mask = self.mask(current)
        # prefer high-order elements: they tend to cover the group fastest
        order = np.argsort(-self.element_orders()[idx], kind="stable")
        for x in idx[order]:
            if cur_mask[x]:
                continue
            gens.append(int(x))
            current = self.closure(gens)
            cur_mask = self.mask(current)
            if current.size == idx.size:
                break
        return gens

    def conj(self, g, idx):
        """g idx g^-1 (g scalar or array broadcast against idx)."""
        return self.table[self.table[g, idx], self.inv[g]]

    def is_subset(self, a, b_mask) -> bool:
        return bool(b_mask[a].all())

    # -- structure ------------------------------------------------------

    def normal_closure(self, idx, ambient_gens) -> np.ndarray:
        current = self.closure(idx)
        while True:
            mask = self.mask(current)
            extra = []
            for g in ambient_gens:
                c = self.conj(g, current)
                bad = c[~mask[c]]
                if bad.size:
                    extra.append(bad)
            if not extra:
                return current
            current = self.closure(np.concatenate([current] + extra))

    def is_normal(self, sub, ambient_gens) -> bool:
        mask = self.mask(sub)
        return all(mask[self.conj(g, sub)].all() for g in ambient_gens)

    def commutator_subgroup(self, idx, gens=None) -> np.ndarray:
        gens = self.small_generators(idx) if gens is None else list(gens)
        comms = [
            self.table[self.table[a, b], self.inv[self.table[b, a]]]
            for i, a in enumerate(gens)
            for b in gens[i + 1 :]
        ]
        return self.normal_closure(comms, gens) if comms else np.array([self.e])

    def conjugacy_classes(self, idx, gens=None) -> list[np.ndarray]:
        gens = self.small_generators(idx) if gens is None else list(gens)
        label = np.full(self.n, -1, dtype=np.int64)
        classes = []
        for x in idx:
            if label[x] >= 0:
                continue
            cls = np.array([x])
            seen = self.mask(cls)
            frontier = cls
            while frontier.size:
                new = np.unique(np.concatenate([self.conj(g, frontier) for g in gens])) if gens else frontier[:0]
                new = new[~seen[new]]
                seen[new] = True
                frontier = new
            cls = np.flatnonzero(seen)
            label[cls] = len(classes)
            classes.append(cls)
        return classes

    def centralizes(self, a, b) -> bool:
        a = np.asarray(a)
        b = np.asarray(b)
        return bool((self.table[a[:, None], b[None, :]] == self.table[b[None, :], a[:, None]]).all())

    def normalizer(self, sub, ambient) -> np.ndarray:
        mask = self.mask(sub)
        gens = self.small_generators(sub)
        ok = np.ones(len(ambient), dtype=bool)
        ambient = np.asarray(ambient)
        for h in gens:
            ok &= mask[self.conj(ambient, np.full(len(ambient), h))]
        return ambient[ok]

    def find_conjugator(self, h, k, ambient, into=False):
        """g in ambient with g H g^-1 = K (or ⊆ K when into=True), else None."""
        if not into and len(h) != len(k):
            return None
        kmask = self.mask(k)
        ambient = np.asarray(ambient)
        ok = np.ones(len(ambient), dtype=bool)
        for x in self.small_generators(h):
            ok &= kmask[self.conj(ambient, np.full(len(ambient), x))]
            if not ok.any():
                return None
        return int(ambient[np.argmax(ok)])

    def quotient_labels(self, group, normal) -> tuple[np.ndarray, np.ndarray]:
        """Coset label (min element of each coset) for every element of group."""
        group = np.asarray(group)
        normal = np.asarray(normal)
        labels = self.table[group[:, None], normal[None, :]].min(axis=1)
        reps = np.unique(labels)
        return labels, reps

    def quotient_table(self, group, normal):
        labels, reps = self.quotient_labels(group, normal)
        pos = np.full(self.n, -1, dtype=np.int64)
        pos[group] = np.searchsorted(reps, labels)
        q = pos[self.table[reps[:, None], reps[None, :]]]
        return reps, q, pos

    def normal_subgroups(self, group, gens=None) -> list[np.ndarray]:
        group = np.asarray(group)
        if group.size > LATTICE_GUARD:
            raise ResourceGuardError(f"normal subgroup search on order {group.size} exceeds guard")
        gens = self.small_generators(group) if gens is None else list(gens)
        closures = {}
        for cls in self.conjugacy_classes(group, gens):
            ncl = self.normal_closure(cls, gens)
            closures.setdefault(self.key(ncl), ncl)
        atoms = [(c, self.small_generators(c)) for c in closures.values()]
        triv = np.array([self.e])
        found = {self.key(triv): (triv, [])}
        queue = [self.key(triv)]
        while queue:
            key = queue.pop()
            sub, sgens = found[key]
            mask = self.mask(sub)
            for atom, agens in atoms:
                if mask[atom].all():
                    continue
                joined = self.closure(sgens + agens)
                jk = self.key(joined)
                if jk not in found:
                    found[jk] = (joined, self.small_generators(joined))
                    queue.append(jk)
        return sorted((v[0] for v in found.values()), key=lambda s: (s.size, s.tolist()))

    def fingerprint(self, sub, class_ids=None):
        orders = np.bincount(self.element_orders()[sub])
        fp = (len(sub), tuple(orders.tolist()))
        if class_ids is not None:
            fp += (tuple(np.bincount(class_ids[sub]).tolist()),)
        return fp

    def subgroup_classes(self, group=None, guard=LATTICE_GUARD, predicate=None):
        """Representatives of all conjugacy classes of subgroups of ``group``.

        Every subgroup K != 1 is <M, x> for a maximal subgroup M of K, so
        joining class representatives with single elements reaches every
        class.  Elements are pruned modulo right H-cosets and N(H)-conjugacy.
        """
        group = self.all if group is None else np.asarray(group)
        if group.size > guard:
            raise ResourceGuardError(f"subgroup lattice of order {group.size} exceeds guard {guard}")
        ggens = self.small_generators(group)
        class_ids = np.full(self.n, -1, dtype=np.int64)
        for i, cls in enumerate(self.conjugacy_classes(group, ggens)):
            class_ids[cls] = i
        triv = np.array([self.e])
        reps = [triv]
        rep_gens = [[]]
        buckets = {self.fingerprint(triv, class_ids): [0]}
        queue = [0]
        while queue:
            i = queue.pop(0)
            h, hgens = reps[i], rep_gens[i]
            norm = self.normalizer(h, group)
            done = self.mask(h)
            for x in group:
                if done[x]:
                    continue
                coset = self.table[x, h]
                orb = self.table[self.table[norm[:, None], coset[None, :]], self.inv[norm][:, None]]
                done[orb.ravel()] = True
                kgens = hgens + [int(x)]
                k = self.closure(kgens)
                fp = self.fingerprint(k, class_ids)
                bucket = buckets.setdefault(fp, [])
                if any(self.find_conjugator(k, reps[j], group) is not None for j in bucket):
                    continue
                bucket.append(len(reps))
                reps.append(k)
                rep_gens.append(self.small_generators(k) if len(kgens) > 3 else kgens)
                queue.append(len(reps) - 1)
        out = reps if predicate is None else [r for r in reps if predicate(r)]
        return sorted(out, key=lambda s: (s.size, s.tolist()))


class MatrixTable(TableGroup):
    """A closed set of matrices at level m, indexed in lexicographic order."""

    def __init__(self, m: int, elements):
        elems = np.array(sorted(set(elements)), dtype=np.int64).reshape(-1, 4)
        if len(elems) > LATTICE_GUARD:
            raise ResourceGuardError(f"table of {len(elems)} elements exceeds the guard {LATTICE_GUARD}")
        self.m = m
        self.elements = [tuple(int(v) for v in row) for row in elems]
        self.codes = self._codes(elems)
        n = len(elems)
        table = np.empty((n, n), dtype=np.int16 if n < 32000 else np.int32)
        a, b, c, d = (elems[:, i] for i in range(4))
        chunk = 256
        for s in range(0, n, chunk):
            A, B, C, D = (v[s : s + chunk, None] for v in (a, b, c, d))
            prod = np.stack([(A * a + B * c) % m, (A * b + B * d) % m, (C * a + D * c) % m, (C * b + D * d) % m], axis=-1)
            table[s : s + chunk] = self._lookup(self._codes(prod))
        super().__init__(table, identity=self.index_of((1 % m, 0, 0, 1 % m)))
        self.dets = np.array([mat_det(x, m) for x in self.elements], dtype=np.int64)

    def _codes(self, arr):
        m = self.m
        return ((arr[..., 0] * m + arr[..., 1]) * m + arr[..., 2]) * m + arr[..., 3]

    def _lookup(self, codes):
        pos = np.searchsorted(self.codes, codes)
        pos = np.minimum(pos, len(self.codes) - 1)
        if not (self.codes[pos] == codes).all():
            raise ValueError("element set is not closed under multiplication")
        return pos

    def index_of(self, x) -> int:
        return int(self._lookup(np.array([encode(x, self.m)]))[0])

    def indices(self, xs) -> np.ndarray:
        xs = list(xs)
        if not xs:
            return np.zeros(0, dtype=np.int64)
        return self._lookup(self._codes(np.array(xs, dtype=np.int64).reshape(-1, 4)))

    def tuples(self, idx) -> list[tuple]:
        return [self.elements[i] for i in idx]


@lru_cache(maxsize=16)
def gl2_table(m: int) -> MatrixTable:
    if gl2_order(m) > LATTICE_GUARD:
        raise ResourceGuardError(f"|GL2(Z/{m}Z)| = {gl2_order(m)} exceeds the table guard {LATTICE_GUARD}")
    return MatrixTable(m, iter_gl2(m))
