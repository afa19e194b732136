"""Seeded random subgroup corpora for the property checks."""
from __future__ import annotations

import random

from .residue import divisors, kernel_generators, rad, random_gl2
from .subgroups import FiniteSubgroup, preimage_to

CONDUCTOR_LEVELS = (4, 8, 9, 12, 16, 24, 27, 36, 72)
GOURSAT_SPLITS = ((4, 3), (4, 9), (8, 3), (4, 5), (8, 9))

DEFAULT_SEED = 20240229


def random_subgroup(m, rng: random.Random) -> tuple[FiniteSubgroup, str]:
    """A random subgroup at level m together with a short recipe tag.

    Three recipes, picked uniformly: a few random elements at level m; the
    preimage of a random subgroup at a divisor; random elements plus a
    congruence kernel.  The mix keeps the conductors spread over divisors.
    """
    kind = rng.choice(("elements", "preimage", "kernel"))
    ngens = rng.choice((1, 2, 2, 3))
    if kind == "elements":
        return FiniteSubgroup(m, [random_gl2(m, rng) for _ in range(ngens)]), kind
    if kind == "preimage":
        d = rng.choice([x for x in divisors(m) if x > 1])
        return preimage_to(FiniteSubgroup(d, [random_gl2(d, rng) for _ in range(ngens)]), m), f"{kind}:{d}"
    d = rng.choice([x for x in divisors(m) if x % rad(m) == 0])
    gens = [random_gl2(m, rng) for _ in range(ngens)] + kernel_generators(m, d)
    return FiniteSubgroup(m, gens), f"{kind}:{d}"


def conductor_corpus(seed=DEFAULT_SEED, per_level=24, levels=CONDUCTOR_LEVELS):
    rng = random.Random(seed)
    out = []
    for m in levels:
        for _ in range(per_level):
            H, tag = random_subgroup(m, rng)
            out.append((H, tag))
    return out


def goursat_corpus(seed=DEFAULT_SEED, per_split=24, splits=GOURSAT_SPLITS):
    """(H, m1, m2) triples with H at level m1*m2."""
    rng = random.Random(seed + 1)
    out = []
    for m1, m2 in splits:
        for _ in range(per_split):
            H, _ = random_subgroup(m1 * m2, rng)
            out.append((H, m1, m2))
    return out
