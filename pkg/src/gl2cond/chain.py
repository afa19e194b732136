"""Schreier-Sims over the reduction tower of GL2(Z/mZ).

The role of a base is played by a chain of levels 1 = d_0 | d_1 | ... | d_k = m
where each d_j / d_{j-1} is prime.  For a subgroup H of GL2(Z/m) set
N_j = H ∩ ker(GL2(Z/m) -> GL2(Z/d_j)).  The quotient N_{j-1}/N_j embeds in
ker(GL2(Z/d_j) -> GL2(Z/d_{j-1})) by reduction, which is elementary abelian
of order p^4 once p | d_{j-1}, and a copy of GL2(F_p) otherwise.  In the
second case the step is split once more through the stabilizer of the first
row mod p, so no orbit is larger than p^2 - 1.  Orders, membership tests and
element enumeration of large subgroups (|GL2(Z/72)| ~ 6e6, or a GL2(F_37)
factor) stay cheap.
"""
from __future__ import annotations

from .residue import (
    MAX_GROUP_ORDER,
    ResourceGuardError,
    factorize,
    identity,
    mat_inv,
    mat_mul,
    mat_reduce,
)


def default_steps(m: int) -> list[int]:
    """Primes to multiply in, radical first, then prime by prime."""
    fac = factorize(m)
    steps = [p for p, _ in fac]
    for p, e in fac:
        steps += [p] * (e - 1)
    return steps


def split_steps(first: int, second: int) -> list[int]:
    """Steps that climb through the whole of ``first`` before touching ``second``."""
    return default_steps(first) + default_steps(second)


class _Stage:
    """One stabilizer step: ``row`` keys on the first row mod p, ``mat`` on g mod d."""

    __slots__ = ("kind", "d", "p", "id")

    def __init__(self, kind, d, p):
        self.kind, self.d, self.p = kind, d, p
        self.id = (1 % p, 0) if kind == "row" else identity(d)

    def key(self, g):
        if self.kind == "row":
            return (g[0] % self.p, g[1] % self.p)
        return mat_reduce(g, self.d)

    def act(self, key, s):
        if self.kind == "row":
            p = self.p
            return ((key[0] * s[0] + key[1] * s[2]) % p, (key[0] * s[1] + key[1] * s[3]) % p)
        return mat_mul(key, mat_reduce(s, self.d), self.d)


class ReductionChain:
    def __init__(self, level: int, gens, steps=None):
        m = level
        self.level = m
        self.steps = list(steps) if steps is not None else default_steps(m)
        divs = [1]
        for p in self.steps:
            divs.append(divs[-1] * p)
        if divs[-1] != m:
            raise ValueError(f"steps {self.steps} do not multiply to {m}")
        self.divs = divs
        # stages[1..k]; ends[j] = index of the last stage of reduction step j
        self.stages = [None]
        self.ends = [0]
        for j, p in enumerate(self.steps, start=1):
            if divs[j - 1] % p:
                self.stages.append(_Stage("row", divs[j], p))
            self.stages.append(_Stage("mat", divs[j], p))
            self.ends.append(len(self.stages) - 1)
        self.k = len(self.stages) - 1
        self.strong = [[] for _ in range(self.k + 2)]
        self.orbits = [None] * (self.k + 2)
        for g in gens:
            g = mat_reduce(tuple(g), m)
            j = self.first_level(g)
            if j is not None and g not in self.strong[j]:
                self.strong[j].append(g)
        self._build()

    def first_level(self, g):
        for j in range(1, self.k + 1):
            st = self.stages[j]
            if st.key(g) != st.id:
                return j
        return None

    def gens_from(self, j):
        return [s for i in range(j, self.k + 1) for s in self.strong[i]]

    def _orbit(self, j, gens):
        st, m = self.stages[j], self.level
        orbit = {st.id: identity(m)}
        frontier = [st.id]
        while frontier:
            nxt = []
            for key in frontier:
                u = orbit[key]
                for s in gens:
                    y = st.act(key, s)
                    if y not in orbit:
                        orbit[y] = mat_mul(u, s, m)
                        nxt.append(y)
            frontier = nxt
        return orbit

    def sift(self, g, start=1):
        """Return (residue, stage) where stage is None when g sifts through."""
        m = self.level
        for j in range(start, self.k + 1):
            st = self.stages[j]
            key = st.key(g)
            orbit = self.orbits[j]
            if key not in orbit:
                return g, j
            if key != st.id:
                g = mat_mul(g, mat_inv(orbit[key], m), m)
        return g, None

    def _build(self):
        m = self.level
        j = self.k
        while j >= 1:
            gens = self.gens_from(j)
            orbit = self._orbit(j, gens)
            self.orbits[j] = orbit
            found = None
            if j < self.k:
                st = self.stages[j]
                seen = set()
                for key, u in orbit.items():
                    for s in gens:
                        target = orbit[st.act(key, s)]
                        y = mat_mul(mat_mul(u, s, m), mat_inv(target, m), m)
                        if y in seen:
                            continue
                        seen.add(y)
                        r, lev = self.sift(y, j + 1)
                        if lev is not None:
                            found = (r, lev)
                            break
                    if found:
                        break
            if found:
                r, lev = found
                self.strong[lev].append(r)
                j = lev
            else:
                j -= 1

    # ------------------------------------------------------------------

    def order(self) -> int:
        n = 1
        for j in range(1, self.k + 1):
            n *= len(self.orbits[j])
        return n

    def layer_orders(self) -> list[int]:
        """|N_{j-1} / N_j| for each reduction step j."""
        out = []
        for j in range(1, len(self.ends)):
            n = 1
            for i in range(self.ends[j - 1] + 1, self.ends[j] + 1):
                n *= len(self.orbits[i])
            out.append(n)
        return out

    def contains(self, g) -> bool:
        return self.sift(mat_reduce(tuple(g), self.level))[1] is None

    def strong_generators(self):
        return self.gens_from(1)

    def kernel_generators(self, d):
        """Generators of H ∩ ker(-> GL2(Z/d)); d must be one of the chain levels."""
        j = self.divs.index(d)
        return self.gens_from(self.ends[j] + 1)

    def iter_elements(self, guard=MAX_GROUP_ORDER):
        if self.order() > guard:
            raise ResourceGuardError(f"subgroup of order {self.order()} exceeds guard {guard}")
        m = self.level
        elems = [identity(m)]
        # every element is u_k ... u_1 with u_j running over the stage-j transversal
        for j in range(self.k, 0, -1):
            lifts = list(self.orbits[j].values())
            elems = [mat_mul(x, u, m) for x in elems for u in lifts]
        return elems
