"""Base coefficient fields: exact rationals and odd prime fields.

Scalars are plain value objects: ``gmpy2.mpq`` for the rationals, ``ModP``
for a prime field. Both support the arithmetic operators, equality and
hashing, so the tower and algebra layers above never branch on the field
kind; they go through a ``BaseField`` object only for construction,
parsing, square testing and random draws.

No floats anywhere. Parsing accepts integer and "p/q" strings only.
"""

from __future__ import annotations

import re

import gmpy2
from gmpy2 import mpq, mpz

from .errors import FormatError, NotUnit

_RAT_RE = re.compile(r"^-?\d+(/-?\d+)?$")


def parse_rational(text: str) -> mpq:
    """Parse an exact rational from an integer or 'p/q' string."""
    if isinstance(text, int):
        return mpq(text)
    s = str(text).strip()
    if not _RAT_RE.match(s):
        raise FormatError(f"not an exact rational literal: {text!r}")
    q = mpq(s)
    return q


def format_rational(x: mpq) -> str:
    """Inverse of parse_rational; denominator omitted when 1."""
    return str(x)


class ModP:
    """An element of F_p, p an odd prime. Immutable, operator-complete."""

    __slots__ = ("v", "p")

    def __init__(self, v: int, p: int):
        self.v = int(v) % p
        self.p = p

    def _lift(self, other) -> "ModP":
        if isinstance(other, ModP):
            if other.p != self.p:
                raise ValueError("mixed prime fields")
            return other
        if isinstance(other, (int, mpz)):
            return ModP(int(other), self.p)
        if isinstance(other, mpq):
            den = int(other.denominator) % self.p
            if den == 0:
                raise NotUnit("denominator divisible by p")
            return ModP(int(other.numerator) * pow(den, -1, self.p), self.p)
        return NotImplemented

    def __add__(self, other):
        o = self._lift(other)
        return o if o is NotImplemented else ModP(self.v + o.v, self.p)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._lift(other)
        return o if o is NotImplemented else ModP(self.v - o.v, self.p)

    def __rsub__(self, other):
        o = self._lift(other)
        return o if o is NotImplemented else ModP(o.v - self.v, self.p)

    def __mul__(self, other):
        o = self._lift(other)
        return o if o is NotImplemented else ModP(self.v * o.v, self.p)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        if o.v == 0:
            raise NotUnit("division by zero in F_p")
        return ModP(self.v * pow(o.v, -1, self.p), self.p)

    def __rtruediv__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        return o.__truediv__(self)

    def __neg__(self):
        return ModP(-self.v, self.p)

    def __pow__(self, e: int):
        if e < 0:
            if self.v == 0:
                raise NotUnit("inverting zero in F_p")
            return ModP(pow(self.v, e, self.p), self.p)
        return ModP(pow(self.v, e, self.p), self.p)

    def __eq__(self, other):
        if isinstance(other, ModP):
            return self.p == other.p and self.v == other.v
        if isinstance(other, (int, mpz)):
            return self.v == int(other) % self.p
        return NotImplemented

    def __hash__(self):
        return hash((self.v, self.p))

    def __bool__(self):
        return self.v != 0

    def __repr__(self):
        return f"{self.v}"


class BaseField:
    """Common interface for the two coefficient fields."""

    def coerce(self, x):
        raise NotImplementedError

    def parse(self, text: str):
        raise NotImplementedError

    def fmt(self, x) -> str:
        raise NotImplementedError

    def is_square(self, x) -> bool:
        raise NotImplementedError

    def sqrt(self, x):
        raise NotImplementedError

    def random_scalar(self, rng, height: int, nonzero: bool = False):
        raise NotImplementedError


class Rationals(BaseField):
    """The field of exact rationals; scalars are gmpy2.mpq."""

    char = 0

    def __init__(self):
        self.zero = mpq(0)
        self.one = mpq(1)

    def coerce(self, x) -> mpq:
        if isinstance(x, mpq):
            return x
        if isinstance(x, (int, mpz)):
            return mpq(x)
        if isinstance(x, str):
            return parse_rational(x)
        # fractions.Fraction and anything mpq understands exactly
        num = getattr(x, "numerator", None)
        den = getattr(x, "denominator", None)
        if num is not None and den is not None:
            return mpq(num, den)
        raise TypeError(f"cannot coerce {x!r} to an exact rational")

    def parse(self, text: str) -> mpq:
        return parse_rational(text)

    def fmt(self, x) -> str:
        return format_rational(x)

    def is_square(self, x) -> bool:
        x = self.coerce(x)
        if x < 0:
            return False
        return bool(gmpy2.is_square(x.numerator)) and bool(gmpy2.is_square(x.denominator))

    def sqrt(self, x) -> mpq:
        x = self.coerce(x)
        if not self.is_square(x):
            raise ValueError(f"{x} is not a rational square")
        return mpq(gmpy2.isqrt(x.numerator), gmpy2.isqrt(x.denominator))

    def random_scalar(self, rng, height: int, nonzero: bool = False) -> mpq:
        v = rng.randint(-height, height)
        while nonzero and v == 0:
            v = rng.randint(-height, height)
        return mpq(v)

    def __eq__(self, other):
        return isinstance(other, Rationals)

    def __hash__(self):
        return hash("Q")

    def __repr__(self):
        return "Q"


class PrimeField(BaseField):
    """F_p for an odd prime p; scalars are ModP."""

    def __init__(self, p: int):
        if p < 3 or p % 2 == 0:
            raise ValueError("prime field base must be an odd prime")
        # cheap deterministic primality check is enough at smoke-test sizes
        from sympy import isprime

        if not isprime(p):
            raise ValueError(f"{p} is not prime")
        self.p = p
        self.char = p
        self.zero = ModP(0, p)
        self.one = ModP(1, p)

    def coerce(self, x) -> ModP:
        if isinstance(x, ModP):
            if x.p != self.p:
                raise ValueError("mixed prime fields")
            return x
        if isinstance(x, (int, mpz)):
            return ModP(int(x), self.p)
        if isinstance(x, mpq):
            return ModP(0, self.p)._lift(x)
        if isinstance(x, str):
            return self.parse(x)
        raise TypeError(f"cannot coerce {x!r} into F_{self.p}")

    def parse(self, text: str) -> ModP:
        q = parse_rational(text)
        den = int(q.denominator) % self.p
        if den == 0:
            raise FormatError("denominator divisible by p")
        return ModP(int(q.numerator) * pow(den, -1, self.p), self.p)

    def fmt(self, x) -> str:
        return str(self.coerce(x).v)

    def is_square(self, x) -> bool:
        x = self.coerce(x)
        if x.v == 0:
            return True
        return pow(x.v, (self.p - 1) // 2, self.p) == 1

    def sqrt(self, x) -> ModP:
        x = self.coerce(x)
        if x.v == 0:
            return self.zero
        from sympy.ntheory.residue_ntheory import sqrt_mod

        r = sqrt_mod(x.v, self.p)
        if r is None:
            raise ValueError(f"{x.v} is not a square mod {self.p}")
        # sqrt_mod returns the smaller root; deterministic
        return ModP(int(r), self.p)

    def random_scalar(self, rng, height: int, nonzero: bool = False) -> ModP:
        v = rng.randint(-height, height)
        while nonzero and v % self.p == 0:
            v = rng.randint(-height, height)
        return ModP(v, self.p)

    def __eq__(self, other):
        return isinstance(other, PrimeField) and other.p == self.p

    def __hash__(self):
        return hash(("Fp", self.p))

    def __repr__(self):
        return f"F{self.p}"


QQ = Rationals()
