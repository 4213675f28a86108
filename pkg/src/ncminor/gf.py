"""Small finite fields GF(p^m) with table arithmetic, and the projective vector set in GF(q)^2.

Elements are the integers ``0..q-1``; for ``m > 1`` an element packs the
coefficients of a polynomial over GF(p) in base ``p`` (constant term first).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import NamedTuple

from .errors import PreconditionError

MAX_ORDER = 256


def _factor_prime_power(q: int) -> tuple[int, int] | None:
    if q < 2:
        return None
    p = next(d for d in range(2, q + 1) if q % d == 0)
    m = 0
    while q % p == 0:
        q //= p
        m += 1
    return (p, m) if q == 1 else None


def is_prime_power(q: int) -> bool:
    return _factor_prime_power(q) is not None


def prime_powers(limit: int = MAX_ORDER) -> list[int]:
    return [q for q in range(2, limit + 1) if is_prime_power(q)]


def smallest_prime_power_at_least(n: int) -> int:
    q = max(n, 2)
    while not is_prime_power(q):
        q += 1
    return q


def _digits(x: int, p: int, m: int) -> list[int]:
    out = []
    for _ in range(m):
        out.append(x % p)
        x //= p
    return out


def _pack(coeffs: list[int], p: int) -> int:
    x = 0
    for c in reversed(coeffs):
        x = x * p + c
    return x


def _poly_mod(a: list[int], mod: list[int], p: int) -> list[int]:
    a = a[:]
    deg = len(mod) - 1
    inv_lead = pow(mod[-1], p - 2, p)
    while len(a) - 1 >= deg:
        lead = a[-1] % p
        if lead:
            factor = lead * inv_lead % p
            shift = len(a) - 1 - deg
            for i, c in enumerate(mod):
                a[shift + i] = (a[shift + i] - factor * c) % p
        a.pop()
    return a


def _is_irreducible(poly: list[int], p: int) -> bool:
    m = len(poly) - 1
    for d in range(1, m // 2 + 1):
        # every monic polynomial of degree d as a potential factor
        for low in range(p ** d):
            divisor = _digits(low, p, d) + [1]
            rem = _poly_mod(poly, divisor, p)
            if not any(rem):
                return False
    return True


def irreducible_polynomial(p: int, m: int) -> list[int]:
    """Smallest monic irreducible of degree m (coefficients low to high, packed order)."""
    for low in range(p ** m):
        poly = _digits(low, p, m) + [1]
        if _is_irreducible(poly, p):
            return poly
    raise AssertionError("no irreducible polynomial found")


class Vec2(NamedTuple):
    a: int
    b: int


@dataclass(frozen=True, eq=False)
class Field:
    q: int
    p: int
    m: int
    modulus: tuple[int, ...]
    add_table: tuple[tuple[int, ...], ...] = field(repr=False)
    mul_table: tuple[tuple[int, ...], ...] = field(repr=False)
    alpha: int = 0

    def __eq__(self, other):
        return isinstance(other, Field) and other.q == self.q

    def __hash__(self):
        return hash(self.q)

    @property
    def elements(self) -> range:
        return range(self.q)

    def add(self, x: int, y: int) -> int:
        return self.add_table[x][y]

    def mul(self, x: int, y: int) -> int:
        return self.mul_table[x][y]

    def neg(self, x: int) -> int:
        return self.add_table[x].index(0)

    def sub(self, x: int, y: int) -> int:
        return self.add(x, self.neg(y))

    def inv(self, x: int) -> int:
        if x == 0:
            raise ZeroDivisionError("0 has no inverse")
        return self.mul_table[x].index(1)

    def pow(self, x: int, k: int) -> int:
        out = 1
        for _ in range(k):
            out = self.mul(out, x)
        return out

    def order(self, x: int) -> int:
        """Multiplicative order of a nonzero element."""
        k, y = 1, x
        while y != 1:
            y = self.mul(y, x)
            k += 1
        return k

    def det(self, u: Vec2, v: Vec2) -> int:
        return self.sub(self.mul(u[0], v[1]), self.mul(u[1], v[0]))


@lru_cache(maxsize=None)
def field(q: int) -> Field:
    """GF(q) for a prime power q <= 256."""
    pm = _factor_prime_power(q) if isinstance(q, int) else None
    if pm is None:
        raise PreconditionError(f"{q!r} is not a prime power")
    if q > MAX_ORDER:
        raise PreconditionError(f"field order {q} exceeds the supported maximum {MAX_ORDER}")
    p, m = pm
    modulus = irreducible_polynomial(p, m) if m > 1 else [0, 1]
    digits = [_digits(x, p, m) for x in range(q)]
    add = tuple(
        tuple(_pack([(a + b) % p for a, b in zip(digits[x], digits[y])], p) for y in range(q))
        for x in range(q)
    )
    if m == 1:
        mul = tuple(tuple(x * y % p for y in range(q)) for x in range(q))
    else:
        rows = []
        for x in range(q):
            row = []
            for y in range(q):
                prod = [0] * (2 * m - 1)
                for i, a in enumerate(digits[x]):
                    if a:
                        for j, b in enumerate(digits[y]):
                            prod[i + j] = (prod[i + j] + a * b) % p
                rem = _poly_mod(prod, modulus, p)
                row.append(_pack(rem + [0] * (m - len(rem)), p))
            rows.append(tuple(row))
        mul = tuple(rows)
    f = Field(q, p, m, tuple(modulus), add, mul)
    alpha = next(x for x in range(1, q) if f.order(x) == q - 1)
    object.__setattr__(f, "alpha", alpha)
    return f


def standard_vectors(f: Field) -> list[Vec2]:
    """(0,1), (1,0), (1,1), (1,α), ..., (1,α^(q-2)): one vector per projective point."""
    out = [Vec2(0, 1), Vec2(1, 0)]
    power = 1
    for _ in range(f.q - 1):
        out.append(Vec2(1, power))
        power = f.mul(power, f.alpha)
    return out


def linearly_independent(u: Vec2, v: Vec2, f: Field) -> bool:
    return f.det(u, v) != 0


def rank(vectors, f: Field) -> int:
    """Rank (0, 1 or 2) of a collection of vectors in GF(q)^2."""
    nonzero = [v for v in vectors if v[0] or v[1]]
    if not nonzero:
        return 0
    first = nonzero[0]
    return 2 if any(f.det(first, v) for v in nonzero[1:]) else 1


def projective_class(v: Vec2, f: Field) -> Vec2:
    """Scale a nonzero vector to its representative in :func:`standard_vectors`."""
    if v[0] == 0:
        if v[1] == 0:
            raise ValueError("zero vector has no projective class")
        return Vec2(0, 1)
    inv = f.inv(v[0])
    return Vec2(1, f.mul(v[1], inv)) if v[1] else Vec2(1, 0)
