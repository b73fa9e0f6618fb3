"""Quaternion symbols over Q: Hilbert symbols, ramification, norm equations.

A symbol (a, b) denotes the rational quaternion algebra with i^2 = a,
j^2 = b, ij = -ji. Slots are kept as canonical square classes: nonzero
squarefree integers, computed by factoring numerator times denominator.
Brauer classes of tensor products of such symbols are represented by their
ramification sets (finite even sets of places); two symbols are isomorphic
exactly when those sets agree, and a product of symbols is split exactly
when the xor of the sets is empty.

Places are wrapped ints: -1 for the real place, 2 or an odd prime
otherwise. All arithmetic is exact; every computed solution of a norm
equation is verified by substitution before it is returned.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import gmpy2
from gmpy2 import mpq, mpz
from sympy import factorint, isprime, legendre_symbol, nextprime
from sympy.solvers.diophantine.diophantine import ldescent

from .errors import PreconditionViolated, SearchExhausted, SlotNotInBase
from .linalg import solve_f2
from .rings import MultiQuadExt, RingElement
from .scalars import Rationals

_CLASS_BOUND = 1 << 63


@dataclass(frozen=True, order=True)
class Place:
    """A place of Q: v == -1 for the real place, a prime otherwise."""

    v: int

    def __post_init__(self):
        if self.v == -1 or self.v == 2:
            return
        if self.v < 3 or not isprime(self.v):
            raise ValueError(f"not a place: {self.v}")

    @classmethod
    def real(cls) -> "Place":
        return cls(-1)

    @classmethod
    def finite(cls, p: int) -> "Place":
        return cls(int(p))

    @property
    def is_real(self) -> bool:
        return self.v == -1

    def fmt(self) -> str:
        return "oo" if self.v == -1 else str(self.v)

    @classmethod
    def parse(cls, s) -> "Place":
        if s == "oo" or s == "inf":
            return cls(-1)
        return cls(int(s))

    def __repr__(self):
        return f"Place({self.fmt()})"


def square_class(q) -> int:
    """Canonical square class of a nonzero rational: its squarefree part.

    Numerator and denominator are bounded by 2^63 so factoring stays cheap.
    """
    q = mpq(q)
    if q == 0:
        raise PreconditionViolated("zero has no square class")
    num, den = q.numerator, q.denominator
    if abs(num) > _CLASS_BOUND or den > _CLASS_BOUND:
        raise PreconditionViolated("square class input exceeds the 2^63 factoring bound")
    n = int(num * den)
    sf = 1
    for p, e in factorint(abs(n)).items():
        if e & 1:
            sf *= p
    return -sf if n < 0 else sf


def _val_unit(q: mpq, p: int):
    """p-adic valuation and unit part of a nonzero rational."""
    un, kn = gmpy2.remove(mpz(q.numerator), p)
    ud, kd = gmpy2.remove(mpz(q.denominator), p)
    return kn - kd, mpq(un, ud)


def _legendre_unit(u: mpq, p: int) -> int:
    """Legendre symbol of a p-adic unit written as a rational."""
    r = (int(u.numerator) * pow(int(u.denominator), -1, p)) % p
    return legendre_symbol(r, p)


def _mod8_unit(u: mpq) -> int:
    # den odd, so den^-1 == den mod 8
    return (int(u.numerator) * int(u.denominator)) % 8


def hilbert_symbol(a, b, place: Place) -> int:
    """Hilbert symbol (a, b) at a place of Q; +1 or -1."""
    a, b = mpq(a), mpq(b)
    if a == 0 or b == 0:
        raise PreconditionViolated("Hilbert symbol needs nonzero entries")
    if place.is_real:
        return -1 if a < 0 and b < 0 else 1
    p = place.v
    alpha, u = _val_unit(a, p)
    beta, w = _val_unit(b, p)
    if p != 2:
        e = 1
        if (alpha * beta) & 1:
            e *= legendre_symbol(p - 1, p)
        if beta & 1:
            e *= _legendre_unit(u, p)
        if alpha & 1:
            e *= _legendre_unit(w, p)
        return int(e)
    u8, w8 = _mod8_unit(u), _mod8_unit(w)
    eps_u, eps_w = (u8 - 1) // 2 % 2, (w8 - 1) // 2 % 2
    om_u, om_w = (u8 * u8 - 1) // 8 % 2, (w8 * w8 - 1) // 8 % 2
    e = eps_u * eps_w + alpha * om_w + beta * om_u
    return -1 if e & 1 else 1


def _odd_prime_divisors(n: int):
    return [p for p in factorint(abs(n)) if p != 2]


def ramification_set(a, b) -> frozenset:
    """Places where (a, b) is nonsplit; always a finite set of even size."""
    ca, cb = square_class(a), square_class(b)
    candidates = {Place.real(), Place.finite(2)}
    for p in _odd_prime_divisors(ca) + _odd_prime_divisors(cb):
        candidates.add(Place.finite(p))
    ram = frozenset(v for v in candidates if hilbert_symbol(ca, cb, v) == -1)
    assert len(ram) % 2 == 0, "product formula violated"
    return ram


@dataclass(frozen=True)
class SymbolPair:
    """A quaternion symbol (a, b) with slots stored as square classes."""

    a: int
    b: int

    @classmethod
    def make(cls, a, b) -> "SymbolPair":
        return cls(square_class(a), square_class(b))

    def __post_init__(self):
        if square_class(self.a) != self.a or square_class(self.b) != self.b:
            raise PreconditionViolated("SymbolPair slots must be canonical square classes")

    def hilbert(self, place: Place) -> int:
        return hilbert_symbol(self.a, self.b, place)

    @property
    def ram(self) -> frozenset:
        return _ram_cached(self.a, self.b)

    @property
    def is_split(self) -> bool:
        return not self.ram

    def fmt(self) -> str:
        return f"({self.a}, {self.b})"


@lru_cache(maxsize=4096)
def _ram_cached(a: int, b: int) -> frozenset:
    return ramification_set(a, b)


@dataclass(frozen=True)
class SymbolClass:
    """An order-2 Brauer class over Q: a symbol list plus its ram set.

    Equality and hashing use only the ramification set; the pairs are the
    presentation the class was built from. Addition is xor of ram sets, so
    every class is its own inverse.
    """

    pairs: tuple
    ram: frozenset

    def __eq__(self, other):
        if isinstance(other, SymbolClass):
            return self.ram == other.ram
        return NotImplemented

    def __hash__(self):
        return hash(self.ram)

    def __add__(self, other: "SymbolClass") -> "SymbolClass":
        return SymbolClass(self.pairs + other.pairs, self.ram ^ other.ram)

    @property
    def is_split(self) -> bool:
        return not self.ram

    def fmt(self) -> str:
        if not self.ram:
            return "trivial"
        return "{" + ", ".join(v.fmt() for v in sorted(self.ram)) + "}"


TRIVIAL_CLASS = SymbolClass((), frozenset())


def class_of(pairs) -> SymbolClass:
    """Brauer class of a tensor product of symbols."""
    pairs = tuple(p if isinstance(p, SymbolPair) else SymbolPair.make(*p) for p in pairs)
    ram = frozenset()
    for p in pairs:
        ram = ram ^ p.ram
    return SymbolClass(pairs, ram)


def is_split(c) -> bool:
    if isinstance(c, SymbolClass):
        return c.is_split
    return class_of(c).is_split


def symbols_isomorphic(p1: SymbolPair, p2: SymbolPair) -> bool:
    """Quaternion algebras over Q are isomorphic iff their ram sets agree."""
    return p1.ram == p2.ram


def local_is_square(q, place: Place) -> bool:
    """Whether a nonzero rational is a square in the completion at place."""
    q = mpq(q)
    if q == 0:
        raise PreconditionViolated("zero is not classified")
    if place.is_real:
        return q > 0
    p = place.v
    val, u = _val_unit(q, p)
    if val & 1:
        return False
    if p == 2:
        return _mod8_unit(u) == 1
    return _legendre_unit(u, p) == 1


def _rational_sqrt(q: mpq):
    """Exact square root of a rational square, None otherwise."""
    if q < 0:
        return None
    num, den = mpz(q.numerator), mpz(q.denominator)
    if not (gmpy2.is_square(num) and gmpy2.is_square(den)):
        return None
    return mpq(gmpy2.isqrt(num), gmpy2.isqrt(den))


def solve_norm(n, t, brute_bound: int = 10**4):
    """Solve u^2 - n v^2 = t over Q.

    Returns an exact pair (u, v) of rationals, or None when the equation has
    no rational solution (decided by the Hilbert criterion: t is a norm from
    Q(sqrt n) iff the symbol (n, t) is split; checked both ways). A returned
    solution is always verified by substitution. The descent does the real
    work; the height-ordered brute fallback up to ``brute_bound`` exists only
    for descent failures, and SearchExhausted past it signals a defect in the
    solver, never a solvability verdict.
    """
    n, t = mpq(n), mpq(t)
    if n == 0 or t == 0:
        raise PreconditionViolated("solve_norm needs nonzero n and t")
    n_sf, t_sf = square_class(n), square_class(t)
    if ramification_set(n_sf, t_sf):
        return None
    r = _rational_sqrt(n / n_sf)
    s = _rational_sqrt(t / t_sf)
    if n_sf == 1:
        # u^2 - v^2 factor trick after descaling the square
        u0, v0 = (t + 1) / 2, (t - 1) / (2 * r)
        assert u0 * u0 - n * v0 * v0 == t
        return u0, v0
    if t_sf == 1:
        u0 = s
        assert u0 * u0 == t
        return u0, mpq(0)
    sol = None
    try:
        got = ldescent(int(t_sf), int(n_sf))
    except (ValueError, TypeError, NotImplementedError):
        got = None
    if got is not None:
        w, x, y = (mpq(str(v)) for v in got)
        if x != 0 and w * w == t_sf * x * x + n_sf * y * y:
            u_sf, v_sf = w / x, y / x
            u0, v0 = u_sf * s, v_sf * s / r
            if u0 * u0 - n * v0 * v0 == t:
                sol = (u0, v0)
    if sol is None:
        sol = _solve_norm_brute(n, t, brute_bound)
    if sol is None:
        raise SearchExhausted(f"norm equation u^2 - {n} v^2 = {t} is solvable but descent failed")
    return sol


def _solve_norm_brute(n: mpq, t: mpq, bound: int):
    for h in range(1, bound + 1):
        # candidates v = num/den with max(|num|, den) == h, in lowest terms
        cands = [(h, den) for den in range(1, h + 1)] + [(num, h) for num in range(0, h)]
        for num, den in cands:
            if gmpy2.gcd(mpz(num), mpz(den)) != 1:
                continue
            for sgn in ((1,) if num == 0 else (1, -1)):
                v = mpq(sgn * num, den)
                u2 = t + n * v * v
                u = _rational_sqrt(u2)
                if u is not None:
                    assert u * u - n * v * v == t
                    return u, v
    return None


def cor_rewrite(a, b):
    """Corestriction of a quadratic-slot symbol: (a, b) over S becomes
    (a, N_S(b)) over the base ring R of S.

    a must live in R (SlotNotInBase otherwise; an S element with zero root
    coordinate counts). Returns the formal pair (a, N_S(b)) as R elements
    together with its residue SymbolPair when the base field is Q (None for
    prime fields, where every symbol splits anyway).
    """
    if not isinstance(b, RingElement) or not isinstance(b.ring, MultiQuadExt) or b.ring.s != 1:
        raise PreconditionViolated("cor_rewrite needs b in a quadratic layer")
    S = b.ring
    R = S.base
    if isinstance(a, RingElement):
        if a.ring == R:
            a_coords = a.coords
        elif a.ring == S:
            if not R.is_zero(a.coords[1]):
                raise SlotNotInBase("first slot has a nonzero root coordinate")
            a_coords = a.coords[0]
        else:
            raise SlotNotInBase(f"first slot lives in {a.ring}, not in {R}")
    else:
        a_coords = R.coerce(a)
    if not R.is_unit(a_coords) or not S.is_unit(b.coords):
        raise PreconditionViolated("cor_rewrite needs unit slots")
    nb = S.norm(b.coords)
    formal = (RingElement(R, a_coords), RingElement(R, nb))
    residue_pair = None
    if isinstance(R.field, Rationals):
        a_res = R.residue(a_coords)[0]
        nb_res = R.residue(nb)[0]
        residue_pair = SymbolPair.make(a_res, nb_res)
    return formal, residue_pair


def _local_square_gens(place: Place):
    """Generators of the square class group of the completion at place."""
    if place.is_real:
        return [-1]
    p = place.v
    if p == 2:
        return [-1, 2, 5]
    u = 2
    while legendre_symbol(u, p) != -1:
        u += 1
    return [p, u]


def _local_slot_obstruction(pairs):
    """First place where the slot system is locally unsolvable, else None.

    At each place the conditions on y are linear over the local square class
    group; inconsistency there rules out a global solution. Conversely, places
    outside the support impose nothing, so local solvability everywhere means
    a global y exists and the lattice search below will find one.
    """
    support = {Place.real(), Place.finite(2)}
    for pair in pairs:
        for p in _odd_prime_divisors(pair.a) + _odd_prime_divisors(pair.b):
            support.add(Place.finite(p))
    for v in sorted(support):
        gens = _local_square_gens(v)
        rows = []
        rhs = []
        for pair in pairs:
            mask = 0
            for j, g in enumerate(gens):
                if hilbert_symbol(pair.a, g, v) == -1:
                    mask |= 1 << j
            rows.append(mask)
            rhs.append(1 if pair.hilbert(v) == -1 else 0)
        if solve_f2(rows, rhs) is None:
            return v
    return None


def _minimize_over_coset(basis, x0, null_masks):
    """Smallest |value| (ties: positive first) of prod basis[j]^x_j over a coset."""
    if len(null_masks) > 18:
        null_masks = null_masks[:18]
    best = None
    seen = set()
    for combo in range(1 << len(null_masks)):
        x = x0
        c = combo
        k = 0
        while c:
            if c & 1:
                x ^= null_masks[k]
            c >>= 1
            k += 1
        if x in seen:
            continue
        seen.add(x)
        y = 1
        for j, g in enumerate(basis):
            if (x >> j) & 1:
                y *= g
        key = (abs(y), 0 if y > 0 else 1)
        if best is None or key < best[0]:
            best = (key, y)
    return best[1]


def _slot_lattice(base_odd, n_aux, aux):
    basis = [-1, 2] + sorted(base_odd) + aux[:n_aux]
    odd_places = sorted(set(p for p in basis if p > 2))
    places = [Place.real(), Place.finite(2)] + [Place.finite(p) for p in odd_places]
    return basis, places


def _aux_primes(base_odd, max_aux):
    aux = []
    q = 2
    while len(aux) < max_aux:
        q = int(nextprime(q))
        if q not in base_odd:
            aux.append(q)
    return aux


def _find_common_slot_multi(pairs, max_aux: int = 30):
    """Find a square class y with (n_i, a_i * y) split for every pair (n_i, a_i).

    Equivalently each symbol (n_i, a_i) is isomorphic to (n_i, y) after the
    slot change, so y serves as a shared second slot. Returns None when no
    such y exists (decided place by place on the local square class groups).
    Otherwise solves the F2-linear system on exponents of y over the lattice
    spanned by -1, 2 and the odd primes in play, extending the lattice with
    auxiliary primes while the system is inconsistent, and minimizes |y| over
    the solution coset.
    """
    pairs = [p if isinstance(p, SymbolPair) else SymbolPair.make(*p) for p in pairs]
    if not pairs:
        return 1
    if _local_slot_obstruction(pairs) is not None:
        return None
    base_odd = set()
    for p in pairs:
        base_odd.update(_odd_prime_divisors(p.a))
        base_odd.update(_odd_prime_divisors(p.b))
    aux = _aux_primes(base_odd, max_aux)
    for n_aux in range(max_aux + 1):
        basis, places = _slot_lattice(base_odd, n_aux, aux)
        rows = []
        rhs = []
        for pair in pairs:
            for v in places:
                mask = 0
                for j, g in enumerate(basis):
                    if hilbert_symbol(pair.a, g, v) == -1:
                        mask |= 1 << j
                rows.append(mask)
                rhs.append(1 if pair.hilbert(v) == -1 else 0)
        sol = solve_f2(rows, rhs)
        if sol is None:
            continue
        y = _minimize_over_coset(basis, *sol)
        for pair in pairs:
            assert not ramification_set(pair.a, pair.b * y), "slot postcondition failed"
        return y
    raise SearchExhausted("no common slot over the extended square-class lattice")


def find_common_slot(a2, n2, a3, n3):
    """A single y with (y, n2) isomorphic to (a2, n2) and (y, n3) to (a3, n3).

    The input symbols must themselves be isomorphic (PreconditionViolated
    otherwise). Under that hypothesis the slot change is never locally
    obstructed, so a y always exists; the returned value is the square class
    of smallest |y| found over the search lattice, and both isomorphisms are
    re-verified before returning.
    """
    p2 = SymbolPair.make(a2, n2)
    p3 = SymbolPair.make(a3, n3)
    if not symbols_isomorphic(p2, p3):
        raise PreconditionViolated(
            f"common slot needs isomorphic symbols, got {p2.fmt()} and {p3.fmt()}"
        )
    y = _find_common_slot_multi([(p2.b, p2.a), (p3.b, p3.a)])
    assert y is not None, "isomorphic symbols admit a common slot"
    assert symbols_isomorphic(SymbolPair.make(y, n2), p2)
    assert symbols_isomorphic(SymbolPair.make(y, n3), p3)
    return y


def find_slot_value(n, cls: SymbolClass, max_aux: int = 30):
    """A square class y with ram(y, n) equal to cls.ram, or None.

    None certifies that no such y exists: a place in cls.ram where n is a
    local square kills every candidate, and that is the only obstruction.
    Used to decide membership of cls in the kernel of restriction to
    Q(sqrt n), since that kernel is exactly the classes of symbols with one
    slot n.
    """
    n_sf = square_class(n)
    ram = cls.ram
    for v in ram:
        if local_is_square(n_sf, v):
            return None
    if n_sf == 1:
        return 1 if not ram else None
    base_odd = set(_odd_prime_divisors(n_sf))
    for v in ram:
        if not v.is_real and v.v != 2:
            base_odd.add(v.v)
    aux = _aux_primes(base_odd, max_aux)
    for n_aux in range(max_aux + 1):
        basis, places = _slot_lattice(base_odd, n_aux, aux)
        rows = []
        rhs = []
        for v in places:
            mask = 0
            for j, g in enumerate(basis):
                if hilbert_symbol(n_sf, g, v) == -1:
                    mask |= 1 << j
            rows.append(mask)
            rhs.append(1 if v in ram else 0)
        sol = solve_f2(rows, rhs)
        if sol is None:
            continue
        y = _minimize_over_coset(basis, *sol)
        assert ramification_set(y, n_sf) == ram, "slot value postcondition failed"
        return y
    raise SearchExhausted("no slot value over the extended square-class lattice")


__all__ = [
    "Place",
    "SymbolPair",
    "SymbolClass",
    "TRIVIAL_CLASS",
    "square_class",
    "hilbert_symbol",
    "ramification_set",
    "class_of",
    "is_split",
    "symbols_isomorphic",
    "local_is_square",
    "solve_norm",
    "cor_rewrite",
    "find_common_slot",
    "find_slot_value",
]
