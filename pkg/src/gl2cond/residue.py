"""Exact arithmetic for 2x2 matrices over Z/mZ.

Matrices are handled in two forms.  ``GL2Mat`` is the public, validated
value type.  Internally the hot loops work on plain 4-tuples ``(a, b, c, d)``
together with the level ``m``; the ``mat_*`` helpers below operate on those.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from itertools import product
from math import gcd, prod

MAX_LEVEL = 10**6
MAX_GROUP_ORDER = 10**7


class DomainError(ValueError):
    """Raised when an operation is applied outside its mathematical domain."""


class ResourceGuardError(RuntimeError):
    """Raised instead of materializing something larger than the guard."""


# --------------------------------------------------------------------------
# integers


@lru_cache(maxsize=4096)
def factorize(n: int) -> tuple[tuple[int, int], ...]:
    if n < 1:
        raise DomainError(f"cannot factor {n}")
    out = []
    p = 2
    while p * p <= n:
        if n % p == 0:
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            out.append((p, e))
        p += 1 if p == 2 else 2
    if n > 1:
        out.append((n, 1))
    return tuple(out)


def is_prime(n: int) -> bool:
    return n >= 2 and factorize(n) == ((n, 1),)


def valuation(n: int, p: int) -> int:
    if n == 0:
        raise DomainError("valuation of 0")
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def divisors(n: int) -> list[int]:
    divs = [1]
    for p, e in factorize(n):
        divs = [d * p**k for d in divs for k in range(e + 1)]
    return sorted(divs)


def rad(n: int) -> int:
    return prod(p for p, _ in factorize(abs(n))) if n else 0


def rad_prime(n: int) -> int:
    """rad(n), doubled when 4 | n."""
    r = rad(n)
    return 2 * r if n % 4 == 0 else r


def prime_to_part(m: int, d: int) -> int:
    """Strip from m every prime dividing d (d must divide m)."""
    if m % d:
        raise DomainError(f"{d} does not divide {m}")
    for p, _ in factorize(d):
        while m % p == 0:
            m //= p
    return m


def crt_pair(r1: int, m1: int, r2: int, m2: int) -> int:
    if gcd(m1, m2) != 1:
        raise DomainError(f"moduli {m1} and {m2} are not coprime")
    return (r1 + m1 * ((r2 - r1) * pow(m1, -1, m2) % m2)) % (m1 * m2) if m2 > 1 else r1 % m1


def unit_group_generators(m: int) -> list[int]:
    """A small generating set of (Z/mZ)^x, found greedily."""
    if m <= 2:
        return [] if m == 1 else [1]
    units = [u for u in range(1, m) if gcd(u, m) == 1]
    seen = {1}
    gens = []
    for u in units:
        if u in seen:
            continue
        gens.append(u)
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
        if len(seen) == len(units):
            break
    return gens


@dataclass(frozen=True)
class Modulus:
    value: int
    factors: tuple[tuple[int, int], ...] = field(default=(), compare=False)

    def __post_init__(self):
        if not isinstance(self.value, int) or self.value < 1:
            raise DomainError(f"level must be a positive integer, got {self.value!r}")
        if self.value > MAX_LEVEL:
            raise ResourceGuardError(f"level {self.value} exceeds the cap {MAX_LEVEL}")
        object.__setattr__(self, "factors", factorize(self.value))

    def __int__(self):
        return self.value

    @property
    def primes(self) -> list[int]:
        return [p for p, _ in self.factors]

    def rad(self) -> "Modulus":
        return Modulus(rad(self.value))

    def rad_prime(self) -> "Modulus":
        return Modulus(rad_prime(self.value))

    def prime_to_part(self, d: int | "Modulus") -> "Modulus":
        return Modulus(prime_to_part(self.value, int(d)))


def as_level(m) -> int:
    return int(m.value if isinstance(m, Modulus) else m)


# --------------------------------------------------------------------------
# tuple-level matrix arithmetic


def mat_mul(x, y, m):
    a, b, c, d = x
    e, f, g, h = y
    return ((a * e + b * g) % m, (a * f + b * h) % m, (c * e + d * g) % m, (c * f + d * h) % m)


def mat_det(x, m):
    return (x[0] * x[3] - x[1] * x[2]) % m


def mat_inv(x, m):
    a, b, c, d = x
    di = pow((a * d - b * c) % m, -1, m) if m > 1 else 0
    return (d * di % m, -b * di % m, -c * di % m, a * di % m)


def mat_pow(x, k, m):
    result = identity(m)
    base = x
    while k:
        if k & 1:
            result = mat_mul(result, base, m)
        base = mat_mul(base, base, m)
        k >>= 1
    return result


def mat_reduce(x, d):
    return (x[0] % d, x[1] % d, x[2] % d, x[3] % d)


def identity(m):
    one = 1 % m
    return (one, 0, 0, one)


def mat_conj(g, x, m):
    """g x g^-1."""
    return mat_mul(mat_mul(g, x, m), mat_inv(g, m), m)


def mat_order(x, m):
    e = identity(m)
    y = x
    k = 1
    while y != e:
        y = mat_mul(y, x, m)
        k += 1
    return k


def encode(x, m):
    return ((x[0] * m + x[1]) * m + x[2]) * m + x[3]


def decode(code, m):
    code, d = divmod(code, m)
    code, c = divmod(code, m)
    a, b = divmod(code, m)
    return (a, b, c, d)


def crt_join_tuples(parts) -> tuple[tuple[int, int, int, int], int]:
    """parts: iterable of (matrix tuple, level) at pairwise coprime levels."""
    acc, lvl = (0, 0, 0, 0), 1
    for x, m in parts:
        acc = tuple(crt_pair(r, lvl, s, m) for r, s in zip(acc, x))
        lvl *= m
    return acc, lvl


def embed_local(x, q, m):
    """Lift x at prime-power level q | m to level m, identity at the prime-to-q part."""
    rest = m // q
    if gcd(q, rest) != 1:
        raise DomainError(f"{q} is not a unitary divisor of {m}")
    return crt_join_tuples([(x, q), (identity(rest), rest)])[0]


# --------------------------------------------------------------------------
# GL2Mat


@dataclass(frozen=True, order=True)
class GL2Mat:
    level: int
    a: int
    b: int
    c: int
    d: int

    def __post_init__(self):
        m = as_level(self.level)
        if m < 1:
            raise DomainError(f"bad level {m}")
        object.__setattr__(self, "level", m)
        for name in "abcd":
            object.__setattr__(self, name, int(getattr(self, name)) % m)
        if gcd(self.det, m) != 1:
            raise DomainError(f"{self.rows()} has non-unit determinant mod {m}")

    @classmethod
    def from_tuple(cls, x, m) -> "GL2Mat":
        return cls(m, *x)

    @classmethod
    def from_rows(cls, rows, m) -> "GL2Mat":
        (a, b), (c, d) = rows
        return cls(m, a, b, c, d)

    @classmethod
    def identity(cls, m) -> "GL2Mat":
        return cls.from_tuple(identity(as_level(m)), m)

    @property
    def t(self):
        return (self.a, self.b, self.c, self.d)

    @property
    def modulus(self) -> Modulus:
        return Modulus(self.level)

    @property
    def det(self) -> int:
        return mat_det(self.t, self.level)

    @property
    def trace(self) -> int:
        return (self.a + self.d) % self.level

    def rows(self):
        return [[self.a, self.b], [self.c, self.d]]

    def __mul__(self, other: "GL2Mat") -> "GL2Mat":
        if self.level != other.level:
            raise DomainError(f"levels differ: {self.level} vs {other.level}")
        return GL2Mat.from_tuple(mat_mul(self.t, other.t, self.level), self.level)

    def inverse(self) -> "GL2Mat":
        return GL2Mat.from_tuple(mat_inv(self.t, self.level), self.level)

    def __pow__(self, k: int) -> "GL2Mat":
        x = self.t if k >= 0 else mat_inv(self.t, self.level)
        return GL2Mat.from_tuple(mat_pow(x, abs(k), self.level), self.level)

    def order(self) -> int:
        return mat_order(self.t, self.level)

    def __repr__(self):
        return f"GL2Mat({self.rows()} mod {self.level})"


def det_inverse(g: GL2Mat) -> tuple[int, GL2Mat]:
    return g.det, g.inverse()


def reduce(g: GL2Mat, d) -> GL2Mat:
    d = as_level(d)
    if g.level % d:
        raise DomainError(f"{d} does not divide the level {g.level}")
    return GL2Mat.from_tuple(mat_reduce(g.t, d), d)


def crt_split(g: GL2Mat) -> list[GL2Mat]:
    return [GL2Mat.from_tuple(mat_reduce(g.t, p**e), p**e) for p, e in factorize(g.level)]


def crt_join(components) -> GL2Mat:
    components = list(components)
    if not components:
        raise DomainError("nothing to join")
    x, m = crt_join_tuples((c.t, c.level) for c in components)
    return GL2Mat.from_tuple(x, m)


def gl2_order(m) -> int:
    m = as_level(m)
    return prod(p ** (4 * (e - 1)) * (p * p - 1) * (p * p - p) for p, e in factorize(m))


def iter_gl2(m):
    """All of GL2(Z/mZ) as tuples, in lexicographic order."""
    m = as_level(m)
    if gl2_order(m) > MAX_GROUP_ORDER:
        raise ResourceGuardError(f"|GL2(Z/{m}Z)| = {gl2_order(m)} exceeds the guard")
    if m == 1:
        yield (0, 0, 0, 0)
        return
    for x in product(range(m), repeat=4):
        if gcd(x[0] * x[3] - x[1] * x[2], m) == 1:
            yield x


def random_gl2(m, rng) -> tuple:
    """A uniformly random element of GL2(Z/mZ) as a tuple; ``rng`` is a random.Random."""
    while True:
        x = tuple(rng.randrange(m) for _ in range(4))
        if gcd(x[0] * x[3] - x[1] * x[2], m) == 1:
            return x


def kernel_elements(m, d) -> list[GL2Mat]:
    """ker(GL2(Z/m) -> GL2(Z/d)) as {I + dX}, valid when rad(m) | d | m."""
    m, d = as_level(m), as_level(d)
    if m % d:
        raise DomainError(f"{d} does not divide {m}")
    if d % rad(m):
        raise DomainError(f"rad({m}) does not divide {d}; kernel is not of the form I + dX")
    q = m // d
    out = []
    for a, b, c, e in product(range(q), repeat=4):
        out.append(GL2Mat(m, 1 + d * a, d * b, d * c, 1 + d * e))
    return sorted(out)


def gl2_generators(m) -> list[tuple]:
    """Generators of GL2(Z/m): two transvections (generating SL2) and diag(u, 1)."""
    m = as_level(m)
    if m == 1:
        return []
    gens = [(1, 1, 0, 1), (1, 0, 1, 1)]
    gens += [(u, 0, 0, 1) for u in unit_group_generators(m) if u != 1]
    return [mat_reduce(g, m) for g in gens]


def sl2_generators(m) -> list[tuple]:
    m = as_level(m)
    return [] if m == 1 else [mat_reduce((1, 1, 0, 1), m), mat_reduce((1, 0, 1, 1), m)]


def kernel_generators(m, d) -> list[tuple]:
    """Generators of ker(GL2(Z/m) -> GL2(Z/d)) for any d | m."""
    m, d = as_level(m), as_level(d)
    if m % d:
        raise DomainError(f"{d} does not divide {m}")
    gens = []
    for p, e in factorize(m):
        q = p**e
        v = valuation(d, p) if d % p == 0 else 0
        if v == 0:
            local = gl2_generators(q)
        else:
            local = []
            for t in range(v, e):
                s = p**t
                local += [(1 + s, 0, 0, 1), (1, s, 0, 1), (1, 0, s, 1), (1, 0, 0, 1 + s)]
        gens += [embed_local(mat_reduce(x, q), q, m) for x in local]
    return gens


def parse_matrix(obj, m) -> GL2Mat:
    """[[a, b], [c, d]] (or flat [a, b, c, d]) with entries in [0, m)."""
    if isinstance(obj, GL2Mat):
        if obj.level != m:
            raise DomainError(f"matrix at level {obj.level}, expected {m}")
        return obj
    try:
        if len(obj) == 2:
            (a, b), (c, d) = obj
        else:
            a, b, c, d = obj
    except (TypeError, ValueError):
        raise DomainError(f"malformed matrix {obj!r}") from None
    entries = (a, b, c, d)
    if not all(isinstance(x, int) and not isinstance(x, bool) for x in entries):
        raise DomainError(f"matrix entries must be integers: {obj!r}")
    if not all(0 <= x < m for x in entries):
        raise DomainError(f"matrix entries of {obj!r} must lie in [0, {m})")
    return GL2Mat(m, a, b, c, d)
