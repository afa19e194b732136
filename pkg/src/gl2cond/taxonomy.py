"""Borel, Cartan-normalizer and exceptional subgroups of GL2(Z/ell)."""
from __future__ import annotations

from dataclasses import dataclass, field

from .residue import DomainError, GL2Mat, factorize, is_prime, iter_gl2, mat_inv, mat_mul
from .subgroups import FiniteSubgroup, commutator_subgroup, full_group, scalars, sl2
from .tables import TableGroup, gl2_table

EXCEPTIONAL_ORDERS = {"A4": 12, "S4": 24, "A5": 60}
_DERIVED = {12: (4, "A4"), 24: (12, "S4"), 60: (60, "A5")}


def _check_prime(ell):
    if not isinstance(ell, int) or not is_prime(ell):
        raise DomainError(f"{ell!r} is not prime")


def least_nonsquare(ell: int) -> int:
    squares = {x * x % ell for x in range(ell)}
    return next(x for x in range(1, ell) if x not in squares)


def _unit_gen(ell):
    for g in range(1, ell):
        if len({pow(g, k, ell) for k in range(ell - 1)}) == ell - 1:
            return g
    raise DomainError(f"no primitive root mod {ell}")


def borel(ell) -> FiniteSubgroup:
    _check_prime(ell)
    g = _unit_gen(ell)
    return FiniteSubgroup(ell, [(g, 0, 0, 1), (1, 0, 0, g), (1, 1, 0, 1)], name=f"B({ell})")


def split_cartan(ell) -> FiniteSubgroup:
    g = _unit_gen(ell)
    return FiniteSubgroup(ell, [(g, 0, 0, 1), (1, 0, 0, g)], name=f"C_s({ell})")


def split_normalizer(ell) -> FiniteSubgroup:
    _check_prime(ell)
    g = _unit_gen(ell)
    return FiniteSubgroup(ell, [(g, 0, 0, 1), (1, 0, 0, g), (0, 1, 1, 0)], name=f"N_s({ell})")


def nonsplit_cartan(ell, eps=None) -> FiniteSubgroup:
    eps = least_nonsquare(ell) if eps is None else eps
    # {[[x, eps y], [y, x]]} is F_ell(sqrt eps)^x; take a generator of that cyclic group
    n = ell * ell - 1
    for x in range(ell):
        for y in range(1, ell):
            gen = (x, eps * y % ell, y, x)
            if _order(gen, ell) == n:
                return FiniteSubgroup(ell, [gen], name=f"C_ns({ell})")
    raise DomainError(f"no generator of the nonsplit Cartan mod {ell}")


def nonsplit_normalizer(ell, eps=None) -> FiniteSubgroup:
    _check_prime(ell)
    if ell == 2:
        return full_group(2)
    C = nonsplit_cartan(ell, eps)
    return FiniteSubgroup(ell, C.generators + ((1, 0, 0, ell - 1),), name=f"N_ns({ell})")


def _order(x, m):
    y, k = x, 1
    one = (1, 0, 0, 1)
    while y != one:
        y = mat_mul(y, x, m)
        k += 1
    return k


def standard_subgroups(ell) -> dict:
    _check_prime(ell)
    return {
        "borel": borel(ell),
        "split_normalizer": split_normalizer(ell),
        "nonsplit_normalizer": nonsplit_normalizer(ell),
        "sl2": sl2(ell),
        "scalars": scalars(ell),
    }


def index_table(ell) -> dict:
    """Computed and expected indices of the standard subgroups."""
    std = standard_subgroups(ell)
    out = {
        "borel": (std["borel"].index_in_full(), ell + 1),
        "split_normalizer": (std["split_normalizer"].index_in_full(), ell * (ell + 1) // 2),
    }
    if ell > 2:
        out["nonsplit_normalizer"] = (std["nonsplit_normalizer"].index_in_full(), ell * (ell - 1) // 2)
    return out


# --------------------------------------------------------------------------
# classification


@dataclass
class TaxonomyVerdict:
    level: int
    flags: list
    witnesses: dict = field(default_factory=dict)

    def to_json(self):
        return {"level": self.level, "flags": list(self.flags), "witnesses": self.witnesses}


def _points(ell):
    """P^1(F_ell) as normalized column vectors."""
    return [(1, t) for t in range(ell)] + [(0, 1)]


def _apply(g, v, ell):
    return ((g[0] * v[0] + g[1] * v[1]) % ell, (g[2] * v[0] + g[3] * v[1]) % ell)


def _normalize(v, ell):
    if v[0] % ell:
        inv = pow(v[0], -1, ell)
        return (1, v[1] * inv % ell)
    return (0, 1)


def _perm(g, ell):
    pts = _points(ell)
    pos = {p: i for i, p in enumerate(pts)}
    return tuple(pos[_normalize(_apply(g, p, ell), ell)] for p in pts)


def _conjugator(cols, ell):
    """P^-1 for P = [v | w]: conjugating by it moves the lines of v, w to the axes."""
    (a, c), (b, d) = cols
    P = (a, b, c, d)
    return GL2Mat.from_tuple(mat_inv(P, ell), ell)


def _complement(v, ell):
    return (0, 1) if v[0] % ell else (1, 0)


def classify_mod_ell(H: FiniteSubgroup) -> TaxonomyVerdict:
    """Every case of the mod-ell classification that applies to H, with witnesses.

    Witnesses are elements g with g H g^-1 inside the standard copy, or the
    projective-image data for the exceptional case.
    """
    ell = H.level
    _check_prime(ell)
    gens = H.generators
    flags, wit = [], {}
    if H.contains(sl2(ell)):
        flags.append("contains_sl2")

    perms = [_perm(g, ell) for g in gens]
    fixed = [i for i in range(ell + 1) if all(p[i] == i for p in perms)]
    pts = _points(ell)
    if fixed:
        v = pts[fixed[0]]
        flags.append("borel")
        wit["borel"] = _conjugator((v, _complement(v, ell)), ell).rows()

    pair = None
    for i in range(ell + 1):
        for j in range(i + 1, ell + 1):
            if all({p[i], p[j]} == {i, j} for p in perms):
                pair = (i, j)
                break
        if pair:
            break
    if pair:
        flags.append("split_normalizer")
        wit["split_normalizer"] = _conjugator((pts[pair[0]], pts[pair[1]]), ell).rows()

    g = _nonsplit_conjugator(H)
    if g is not None:
        flags.append("nonsplit_normalizer")
        wit["nonsplit_normalizer"] = g.rows()

    kind, data = projective_type(H)
    if kind in EXCEPTIONAL_ORDERS:
        flags.append(f"exceptional_{kind}")
        wit[f"exceptional_{kind}"] = data
    return TaxonomyVerdict(ell, flags, wit)


def _in_nonsplit_normalizer(x, ell, eps):
    a, b, c, d = x
    return (a == d and b == eps * c % ell) or (a == (-d) % ell and b == (-eps * c) % ell)


def _nonsplit_conjugator(H):
    ell = H.level
    if ell == 2:
        return GL2Mat.identity(2)
    eps = least_nonsquare(ell)
    for g in iter_gl2(ell):
        gi = mat_inv(g, ell)
        if all(_in_nonsplit_normalizer(mat_mul(mat_mul(g, h, ell), gi, ell), ell, eps) for h in H.generators):
            return GL2Mat.from_tuple(g, ell)
    return None


def projective_type(H: FiniteSubgroup):
    """Order and derived-subgroup order of the image of H in PGL2(F_ell)."""
    n = H.order // _scalar_count(H)
    D = commutator_subgroup(H)
    dn = D.order // _scalar_count(D)
    data = {"pgl2_order": n, "derived_order": dn}
    if n in _DERIVED and _DERIVED[n][0] == dn:
        return _DERIVED[n][1], data
    return None, data


def _scalar_count(H):
    ell = H.level
    return sum(1 for u in range(1, ell) if H.contains_element((u, 0, 0, u)))


def lemma_sl2_index(H: FiniteSubgroup) -> bool:
    """SL2 not inside H implies ell <= [GL2(Z/ell) : H]."""
    ell = H.level
    _check_prime(ell)
    return H.contains(sl2(ell)) or ell <= H.index_in_full()


def det_image_full(H: FiniteSubgroup) -> bool:
    m = H.level
    fac = factorize(m)
    if len(fac) != 1:
        raise DomainError(f"level {m} is not a prime power")
    p = fac[0][0]
    units = m - m // p
    return len(H.dets()) == units


# --------------------------------------------------------------------------
# exceptional images occurring in PGL2(F_ell)


def pgl2_table(ell) -> TableGroup:
    tab = gl2_table(ell)
    z = tab.closure(tab.indices([(u, 0, 0, u) for u in range(1, ell)]))
    reps, q, pos = tab.quotient_table(tab.all, z)
    return TableGroup(q, identity=int(pos[tab.e]))


def exceptional_occurrences(ell) -> dict:
    """Which of A4, S4, A5 occur as subgroups of PGL2(F_ell), by lattice scan."""
    _check_prime(ell)
    P = pgl2_table(ell)
    found = {k: False for k in EXCEPTIONAL_ORDERS}
    for sub in P.subgroup_classes():
        n = len(sub)
        if n not in _DERIVED:
            continue
        d = len(P.commutator_subgroup(sub))
        if d == _DERIVED[n][0]:
            found[_DERIVED[n][1]] = True
    return found


def exceptional_index(ell, kind) -> tuple[int, bool]:
    """(ell(ell^2-1) // k, integrality) for the exceptional kind with |image| = k."""
    k = EXCEPTIONAL_ORDERS[kind]
    n = ell * (ell * ell - 1)
    return n // k, n % k == 0
