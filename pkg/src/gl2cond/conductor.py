"""The conductor of an open subgroup of GL2(Zhat) given by a finite shadow.

A subgroup H at level m stands for its full preimage G in GL2(Zhat).  Two
independent computations are provided: a scan over the divisors of m, and a
prime-by-prime kernel-lifting test whose depth window is fixed in advance
(three levels at 2, two at odd primes).
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .residue import (
    DomainError,
    divisors,
    embed_local,
    factorize,
    kernel_generators,
    prime_to_part,
    rad_prime,
    valuation,
)
from .subgroups import FiniteSubgroup, full_group, image_mod, preimage_to, sl2


class LevelInsufficientError(DomainError):
    def __init__(self, needed, ell, gamma):
        super().__init__(f"level {needed} is needed to test the depth-{gamma} kernel at {ell}")
        self.needed = needed
        self.ell = ell
        self.gamma = gamma


def alpha(ell: int) -> int:
    return 2 if ell == 2 else 1


def conductor_oracle(H: FiniteSubgroup) -> int:
    """Smallest d | m such that H contains ker(GL2(Z/m) -> GL2(Z/d))."""
    m = H.level
    for d in divisors(m):
        if all(H.contains_element(k) for k in kernel_generators(m, d)):
            return d
    return m  # unreachable: d = m always qualifies


def kernel_step_contained(H: FiniteSubgroup, ell: int, gamma: int) -> bool:
    """Is ker(GL2(Z/ell^(gamma+1)) -> GL2(Z/ell^gamma)) x {1} inside the image of H?

    The image is taken at level ell^(gamma+1) times the prime-to-ell part of
    the level.  Depths beyond the level hold automatically for a
    preimage-closed H.
    """
    m = H.level
    e = valuation(m, ell)
    if gamma + 1 > e:
        return True
    rest = prime_to_part(m, ell**e)
    q = ell ** (gamma + 1)
    img = image_mod(H, q * rest)
    return all(img.contains_element(embed_local(k, q, q * rest)) for k in kernel_generators(q, q // ell))


def local_exponent(H: FiniteSubgroup, ell: int, strict=False, witness=None) -> int:
    """beta_ell: least beta with every depth gamma in [beta, max(beta, alpha)] passing.

    With ``strict`` a depth beyond the declared level is an error instead of
    being granted by preimage closure.  ``witness`` (a dict) receives the
    failing depth that rules out each smaller beta.
    """
    m = H.level
    e = valuation(m, ell) if m % ell == 0 else 0
    if e == 0:
        return 0
    a = alpha(ell)
    for beta in range(e + 1):
        failed = None
        for gamma in range(beta, max(beta, a) + 1):
            if gamma + 1 > e:
                if strict:
                    raise LevelInsufficientError(ell ** (gamma + 1) * prime_to_part(m, ell**e), ell, gamma)
                continue
            if not kernel_step_contained(H, ell, gamma):
                failed = gamma
                break
        if failed is None:
            return beta
        if witness is not None:
            witness[beta] = failed
    return e  # unreachable for preimage-closed H


@dataclass
class ConductorReport:
    level: int
    conductor: int
    local_exponents: dict
    alpha_used: dict
    condition_1_8: bool
    witnesses: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "level": self.level,
            "conductor": self.conductor,
            "local_exponents": {str(p): b for p, b in sorted(self.local_exponents.items())},
            "alpha_used": {str(p): a for p, a in sorted(self.alpha_used.items())},
            "condition_1_8": self.condition_1_8,
            "witnesses": self.witnesses,
        }


def conductor(H: FiniteSubgroup, strict=False) -> ConductorReport:
    m = H.level
    exps, alphas, witnesses = {}, {}, {}
    cond = 1
    for ell, _ in factorize(m):
        w = {}
        beta = local_exponent(H, ell, strict=strict, witness=w)
        alphas[ell] = alpha(ell)
        if beta:
            exps[ell] = beta
            cond *= ell**beta
        wit = {"failing_depth": {str(b): g for b, g in w.items()}}
        if beta == 0 or 0 in w:
            # the depth-0 clause is the surjectivity of H mod ell
            wit["depth0_is_surjectivity_mod_ell"] = True
        witnesses[str(ell)] = wit
    report = ConductorReport(m, cond, exps, alphas, False, witnesses)
    report.condition_1_8 = condition_at_3(H, report)
    return report


def condition_at_3(H: FiniteSubgroup, report: ConductorReport) -> bool:
    """9 | m_G, G(3) = GL2(Z/3) and SL2(Z_3) not inside G_3."""
    mg = report.conductor
    if mg % 9:
        return False
    k = valuation(H.level, 3)
    if k < 2:
        raise DomainError(f"conductor {mg} is divisible by 9 but the level {H.level} is not")
    if image_mod(H, 3) != full_group(3):
        return False
    q = 3**k
    return not image_mod(H, q).contains(sl2(q))


def prop15_check(H: FiniteSubgroup, report: ConductorReport) -> dict:
    """m_G/rad'(m_G) (times 9 under the mod-9 condition) divides [preimage of G(rad'): G(m_G)]."""
    mg = report.conductor
    if H.level % mg:
        raise DomainError(f"conductor {mg} does not divide the level {H.level}")
    rp = rad_prime(mg)
    divisor = mg // rp * (9 if report.condition_1_8 else 1)
    top = preimage_to(image_mod(H, rp), mg)
    idx = top.order // image_mod(H, mg).order
    return {"divisor": divisor, "index": idx, "pass": idx % divisor == 0}


def lemma37_check(H: FiniteSubgroup, ell: int, d: int, report: ConductorReport | None = None) -> bool:
    """ell divides [preimage of G(d) at level ell*d : G(ell*d)] when rad'(m_G) | d and d*ell | m_G."""
    report = report or conductor(H)
    mg = report.conductor
    if d % rad_prime(mg) or mg % (d * ell) or H.level % (d * ell):
        raise DomainError(f"need rad'({mg}) | {d} and {d}*{ell} | {mg}")
    top = preimage_to(image_mod(H, d), d * ell)
    idx = top.order // image_mod(H, d * ell).order
    return idx % ell == 0
