"""Division-ring plugins: finite fields, the rationals, rational quaternions.

Elements are plain Python values (``int`` / ``tuple`` for finite fields,
``Fraction`` for the rationals, :class:`Quaternion` for quaternions); all
arithmetic goes through the plugin so the linear algebra is written once.
"""
from __future__ import annotations

import itertools
import random
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Iterator

from .errors import ShapeError


def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    return all(p % d for d in range(2, int(p**0.5) + 1))


class DivisionRing:
    """Base class. Subclasses define arithmetic on raw values."""

    name: str
    is_finite: bool
    is_commutative: bool

    @property
    def cardinality(self) -> int | None:
        """Number of elements, ``None`` when countably infinite."""
        return None

    # arithmetic -------------------------------------------------------
    zero: Any
    one: Any

    def add(self, a, b):
        raise NotImplementedError

    def neg(self, a):
        raise NotImplementedError

    def mul(self, a, b):
        raise NotImplementedError

    def inv(self, a):
        raise NotImplementedError

    def sub(self, a, b):
        return self.add(a, self.neg(b))

    def is_zero(self, a) -> bool:
        return a == self.zero

    def from_int(self, n: int):
        raise NotImplementedError

    # unit classes in R^x / [R^x, R^x] --------------------------------
    def unit_class(self, a):
        """Normal form of the class of the unit ``a`` in the abelianized unit group."""
        return a

    def class_mul(self, u, v):
        return self.mul(u, v)

    def class_inv(self, u):
        return self.inv(u)

    @property
    def class_one(self):
        return self.one

    def format_class(self, u) -> str:
        return self.format(u)

    # io / enumeration -------------------------------------------------
    def parse(self, text: str):
        raise NotImplementedError

    def format(self, a) -> str:
        raise NotImplementedError

    def elements(self) -> Iterator:
        """Deterministic enumeration of the elements, starting with 0, 1."""
        raise NotImplementedError

    def random(self, rng: random.Random, nonzero: bool = False):
        raise NotImplementedError

    def to_json(self, a):
        return self.format(a)

    def __repr__(self) -> str:
        return self.name


class GF(DivisionRing):
    """The finite field with ``p**e`` elements.

    For ``e > 1`` elements are coefficient tuples (constant term first) modulo
    the lexicographically least monic irreducible polynomial of degree ``e``.
    """

    is_finite = True
    is_commutative = True

    def __init__(self, p: int, e: int = 1):
        if not _is_prime(p):
            raise ShapeError(f"GF: {p} is not prime")
        if e < 1:
            raise ShapeError("GF: exponent must be >= 1")
        self.p = p
        self.e = e
        self.name = f"GF({p})" if e == 1 else f"GF({p}^{e})"
        if e == 1:
            self.zero, self.one = 0, 1
        else:
            self.zero = (0,) * e
            self.one = (1,) + (0,) * (e - 1)
            self.modulus = self._least_irreducible()

    def __eq__(self, other):
        return isinstance(other, GF) and (self.p, self.e) == (other.p, other.e)

    def __hash__(self):
        return hash(("GF", self.p, self.e))

    def __reduce__(self):
        return (GF, (self.p, self.e))

    @property
    def cardinality(self) -> int:
        return self.p**self.e

    # polynomial helpers (e > 1) ---------------------------------------
    def _least_irreducible(self) -> tuple[int, ...]:
        p, e = self.p, self.e
        for high_first in itertools.product(range(p), repeat=e):
            coeffs = tuple(reversed(high_first)) + (1,)
            if self._irreducible(coeffs):
                return coeffs
        raise AssertionError("no irreducible polynomial found")

    def _irreducible(self, f: tuple[int, ...]) -> bool:
        deg = len(f) - 1
        p = self.p
        for d in range(1, deg // 2 + 1):
            for low in itertools.product(range(p), repeat=d):
                g = tuple(low) + (1,)
                if not any(self._poly_mod(f, g)):
                    return False
        return True

    def _poly_mod(self, f, g):
        p = self.p
        r = list(f)
        dg = len(g) - 1
        for i in range(len(r) - 1, dg - 1, -1):
            c = r[i] % p
            if c:
                for j in range(dg + 1):
                    r[i - dg + j] = (r[i - dg + j] - c * g[j]) % p
        return [x % p for x in r[:dg]]

    # arithmetic -------------------------------------------------------
    def add(self, a, b):
        if self.e == 1:
            return (a + b) % self.p
        return tuple((x + y) % self.p for x, y in zip(a, b))

    def neg(self, a):
        if self.e == 1:
            return -a % self.p
        return tuple(-x % self.p for x in a)

    def mul(self, a, b):
        if self.e == 1:
            return a * b % self.p
        prod = [0] * (2 * self.e - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    prod[i + j] += x * y
        return tuple(self._poly_mod(prod, self.modulus))

    def inv(self, a):
        if self.is_zero(a):
            raise ZeroDivisionError("inverse of zero")
        if self.e == 1:
            return pow(a, self.p - 2, self.p)
        result, base, k = self.one, a, self.cardinality - 2
        while k:
            if k & 1:
                result = self.mul(result, base)
            base = self.mul(base, base)
            k >>= 1
        return result

    def from_int(self, n: int):
        if self.e == 1:
            return n % self.p
        digits = []
        n %= self.cardinality
        for _ in range(self.e):
            digits.append(n % self.p)
            n //= self.p
        return tuple(digits)

    def to_int(self, a) -> int:
        if self.e == 1:
            return a
        return sum(c * self.p**i for i, c in enumerate(a))

    def quadratic_character(self, a) -> int:
        """+1 on nonzero squares, -1 on non-squares (odd characteristic)."""
        if self.p == 2:
            return 1
        x = self.one
        base, k = a, (self.cardinality - 1) // 2
        while k:
            if k & 1:
                x = self.mul(x, base)
            base = self.mul(base, base)
            k >>= 1
        return 1 if x == self.one else -1

    def parse(self, text: str):
        text = text.strip().replace("−", "-")
        if not re.fullmatch(r"-?\d+", text):
            raise ShapeError(f"{self.name}: bad literal {text!r}")
        return self.from_int(int(text))

    def format(self, a) -> str:
        return str(self.to_int(a))

    def to_json(self, a):
        return self.to_int(a)

    def elements(self):
        return (self.from_int(i) for i in range(self.cardinality))

    def random(self, rng, nonzero=False):
        lo = 1 if nonzero else 0
        return self.from_int(rng.randrange(lo, self.cardinality))


def stern_brocot_positive() -> Iterator[Fraction]:
    """Positive rationals, breadth-first through the Stern-Brocot tree."""
    # each node is an interval (a/b, c/d); its label is the mediant
    frontier = [((0, 1), (1, 0))]
    while True:
        nxt = []
        for (a, b), (c, d) in frontier:
            m = (a + c, b + d)
            yield Fraction(*m)
            nxt.append(((a, b), m))
            nxt.append((m, (c, d)))
        frontier = nxt


class Rationals(DivisionRing):
    name = "QQ"
    is_finite = False
    is_commutative = True
    zero = Fraction(0)
    one = Fraction(1)

    def __eq__(self, other):
        return isinstance(other, Rationals)

    def __hash__(self):
        return hash("QQ")

    def add(self, a, b):
        return a + b

    def neg(self, a):
        return -a

    def sub(self, a, b):
        return a - b

    def mul(self, a, b):
        return a * b

    def inv(self, a):
        if a == 0:
            raise ZeroDivisionError("inverse of zero")
        return 1 / a

    def from_int(self, n):
        return Fraction(n)

    def parse(self, text):
        text = text.strip().replace("−", "-")
        if not re.fullmatch(r"-?\d+(/\d+)?", text):
            raise ShapeError(f"QQ: bad literal {text!r}")
        return Fraction(text)

    def format(self, a):
        return str(a)

    def elements(self):
        yield Fraction(0)
        for x in stern_brocot_positive():
            yield x
            yield -x

    def random(self, rng, nonzero=False):
        while True:
            x = Fraction(rng.randint(-6, 6), rng.randint(1, 4))
            if x or not nonzero:
                return x


@dataclass(frozen=True)
class Quaternion:
    """Hamilton quaternion a + bi + cj + dk with rational coefficients."""

    a: Fraction
    b: Fraction
    c: Fraction
    d: Fraction

    def __add__(self, o):
        return Quaternion(self.a + o.a, self.b + o.b, self.c + o.c, self.d + o.d)

    def __neg__(self):
        return Quaternion(-self.a, -self.b, -self.c, -self.d)

    def __sub__(self, o):
        return self + (-o)

    def __mul__(self, o):
        a1, b1, c1, d1 = self.a, self.b, self.c, self.d
        a2, b2, c2, d2 = o.a, o.b, o.c, o.d
        return Quaternion(
            a1 * a2 - b1 * b2 - c1 * c2 - d1 * d2,
            a1 * b2 + b1 * a2 + c1 * d2 - d1 * c2,
            a1 * c2 - b1 * d2 + c1 * a2 + d1 * b2,
            a1 * d2 + b1 * c2 - c1 * b2 + d1 * a2,
        )

    def conj(self):
        return Quaternion(self.a, -self.b, -self.c, -self.d)

    def norm(self) -> Fraction:
        return self.a**2 + self.b**2 + self.c**2 + self.d**2

    def __bool__(self):
        return bool(self.a or self.b or self.c or self.d)


def quat(a=0, b=0, c=0, d=0) -> Quaternion:
    return Quaternion(Fraction(a), Fraction(b), Fraction(c), Fraction(d))


class RationalQuaternions(DivisionRing):
    """Hamilton's quaternions (-1, -1) over QQ.

    The class of a unit in the abelianized unit group is its reduced norm.
    """

    name = "HQ"
    is_finite = False
    is_commutative = False
    zero = quat()
    one = quat(1)

    def __eq__(self, other):
        return isinstance(other, RationalQuaternions)

    def __hash__(self):
        return hash("HQ")

    def add(self, a, b):
        return a + b

    def neg(self, a):
        return -a

    def sub(self, a, b):
        return a - b

    def mul(self, a, b):
        return a * b

    def inv(self, a):
        n = a.norm()
        if n == 0:
            raise ZeroDivisionError("inverse of zero")
        c = a.conj()
        return Quaternion(c.a / n, c.b / n, c.c / n, c.d / n)

    def from_int(self, n):
        return quat(n)

    def unit_class(self, a):
        return a.norm()

    def class_mul(self, u, v):
        return u * v

    def class_inv(self, u):
        return 1 / u

    @property
    def class_one(self):
        return Fraction(1)

    def format_class(self, u):
        return f"nrd={u}"

    def parse(self, text):
        text = text.strip().replace("−", "-")
        m = re.fullmatch(r"\(([^()]*)\)", text)
        if m:
            parts = [s.strip() for s in m.group(1).split(",")]
            if len(parts) != 4:
                raise ShapeError(f"HQ: expected 4 coefficients in {text!r}")
            return Quaternion(*(Rationals().parse(s) for s in parts))
        return quat(Rationals().parse(text))

    def format(self, a):
        return f"({a.a}, {a.b}, {a.c}, {a.d})"

    def to_json(self, a):
        return [str(a.a), str(a.b), str(a.c), str(a.d)]

    def elements(self):
        # all 4-tuples drawn from the first N rationals, N growing
        seen = []
        source = Rationals().elements()
        yielded = set()
        while True:
            seen.append(next(source))
            for t in itertools.product(seen, repeat=4):
                if t not in yielded:
                    yielded.add(t)
                    yield Quaternion(*t)

    def random(self, rng, nonzero=False):
        while True:
            x = Quaternion(*(Fraction(rng.randint(-3, 3), rng.randint(1, 2)) for _ in range(4)))
            if x or not nonzero:
                return x


QQ = Rationals()
HQ = RationalQuaternions()


def parse_field(text: str) -> DivisionRing:
    """Parse ``GF(p)``, ``GF(p^e)``, ``QQ`` or ``HQ``."""
    text = text.strip()
    if text == "QQ":
        return QQ
    if text == "HQ":
        return HQ
    m = re.fullmatch(r"GF\(\s*(\d+)\s*(?:\^\s*(\d+)\s*)?\)", text)
    if m:
        p, e = int(m.group(1)), int(m.group(2) or 1)
        if m.group(2) is None and p > 1 and not _is_prime(p):
            # GF(q) with q a prime power
            for b in range(2, p):
                if p % b == 0:
                    break
            while p % b == 0:
                p //= b
                e += 1
            if p != 1:
                raise ShapeError(f"GF: {int(m.group(1))} is not a prime power")
            p, e = b, e - 1
        return GF(p, e)
    raise ShapeError(f"unknown division ring {text!r}")
