"""Ring towers: truncated local rings and multiquadratic extensions.

Representation conventions, used everywhere above this module:

- ``TruncatedLocalRing(field, trunc)`` models K[eps]/(eps^trunc). An element
  is a tuple of ``trunc`` field scalars, coefficients of eps^0..eps^(trunc-1).
  trunc == 1 is K itself (eps == 0), and every tower is built over a
  TruncatedLocalRing so there is a single code path for both cases.
- ``MultiQuadExt(base, radicands)`` models base[x_1..x_s]/(x_i^2 - b_i),
  free of rank 2^s. An element is a tuple of 2^s base elements indexed by
  generator subsets in bitmask order; x_A * x_B picks up the product of the
  radicands on A & B and lands on A ^ B.

Raw nested tuples are the working representation in hot paths; RingElement
is a thin operator wrapper for API boundaries and tests. Units are detected
at the residue level (the radical is generated by eps, so an element is
invertible exactly when its residue is), and inversion lifts the residue
inverse through a geometric series on the nilpotent part.
"""

from __future__ import annotations

import random

from .errors import Degenerate, NotUnit, PreconditionViolated
from .linalg import det_is_nonzero, solve_right
from .scalars import BaseField, PrimeField, QQ, Rationals


class TruncatedLocalRing:
    """K[eps]/(eps^trunc); local with maximal ideal (eps), residue field K."""

    def __init__(self, field: BaseField, trunc: int):
        if trunc < 1:
            raise ValueError("truncation order must be at least 1")
        self.field = field
        self.trunc = trunc
        self.kdim = trunc
        self.zero = (field.zero,) * trunc
        self.one = (field.one,) + (field.zero,) * (trunc - 1)
        self._residue_ring = None

    # -- structural ----------------------------------------------------------

    def __eq__(self, other):
        return (
            isinstance(other, TruncatedLocalRing)
            and other.field == self.field
            and other.trunc == self.trunc
        )

    def __hash__(self):
        return hash(("T", self.field, self.trunc))

    def __repr__(self):
        if self.trunc == 1:
            return f"{self.field!r}"
        return f"{self.field!r}[eps]/(eps^{self.trunc})"

    @property
    def base_field(self) -> BaseField:
        return self.field

    def is_residue_level(self) -> bool:
        return self.trunc == 1

    def residue_ring(self) -> "TruncatedLocalRing":
        if self._residue_ring is None:
            self._residue_ring = self if self.trunc == 1 else TruncatedLocalRing(self.field, 1)
        return self._residue_ring

    # -- coordinates ---------------------------------------------------------

    def coerce(self, x):
        if isinstance(x, RingElement):
            if x.ring == self:
                return x.coords
            if isinstance(x.ring, TruncatedLocalRing) and x.ring.field == self.field:
                if x.ring.trunc <= self.trunc:
                    return x.coords + (self.field.zero,) * (self.trunc - x.ring.trunc)
            raise TypeError(f"cannot coerce element of {x.ring} into {self}")
        if isinstance(x, (tuple, list)):
            if len(x) > self.trunc:
                raise ValueError("too many coefficients for this truncation")
            cs = [self.field.coerce(c) for c in x]
            return tuple(cs) + (self.field.zero,) * (self.trunc - len(cs))
        return self.from_scalar(self.field.coerce(x))

    def from_scalar(self, c):
        return (c,) + (self.field.zero,) * (self.trunc - 1)

    def eps(self):
        if self.trunc < 2:
            return self.zero
        return (self.field.zero, self.field.one) + (self.field.zero,) * (self.trunc - 2)

    def is_zero(self, x) -> bool:
        return not any(x)

    # -- arithmetic ----------------------------------------------------------

    def add(self, x, y):
        return tuple(a + b for a, b in zip(x, y))

    def sub(self, x, y):
        return tuple(a - b for a, b in zip(x, y))

    def neg(self, x):
        return tuple(-a for a in x)

    def scalar_mul(self, c, x):
        return tuple(c * a for a in x)

    def mul(self, x, y):
        n = self.trunc
        if n == 1:
            return (x[0] * y[0],)
        out = [self.field.zero] * n
        for i, xi in enumerate(x):
            if not xi:
                continue
            for j in range(n - i):
                yj = y[j]
                if yj:
                    out[i + j] += xi * yj
        return tuple(out)

    # -- residue and units ---------------------------------------------------

    def residue(self, x):
        return (x[0],)

    def lift(self, xbar):
        return (xbar[0],) + (self.field.zero,) * (self.trunc - 1)

    def is_unit(self, x) -> bool:
        return bool(x[0])

    def invert(self, x):
        if not x[0]:
            raise NotUnit(f"residue of {x} is zero")
        inv0 = 1 / x[0]
        if self.trunc == 1:
            return (inv0,)
        z = self.from_scalar(inv0)
        n = self.sub(self.one, self.mul(x, z))
        acc = self.one
        term = n
        while any(term):
            acc = self.add(acc, term)
            term = self.mul(term, n)
        return self.mul(z, acc)

    # -- K-linear views ------------------------------------------------------

    def to_kvec(self, x):
        return list(x)

    def from_kvec(self, vec):
        return tuple(vec)

    def mult_matrix_k(self, x):
        """K-matrix of left multiplication by x (columns are x*basis_j)."""
        n = self.trunc
        cols = []
        for j in range(n):
            col = [self.field.zero] * n
            for i, xi in enumerate(x):
                if xi and i + j < n:
                    col[i + j] = xi
            cols.append(col)
        return [[cols[j][i] for j in range(n)] for i in range(n)]

    # -- misc ----------------------------------------------------------------

    def random_coords(self, rng, height: int, full: bool = False, unit: bool = False):
        while True:
            if full:
                coords = tuple(self.field.random_scalar(rng, height) for _ in range(self.trunc))
            else:
                coords = self.from_scalar(self.field.random_scalar(rng, height))
            if not unit or self.is_unit(coords):
                return coords

    def serial(self, x):
        return [self.field.fmt(c) for c in x]

    def from_serial(self, data):
        if not isinstance(data, list) or len(data) != self.trunc:
            raise ValueError(f"expected {self.trunc} coefficients")
        return tuple(self.field.parse(c) for c in data)

    def fmt_elem(self, x) -> str:
        terms = []
        for i, c in enumerate(x):
            if not c:
                continue
            cs = self.field.fmt(c)
            if i == 0:
                terms.append(cs)
            else:
                p = "eps" if i == 1 else f"eps^{i}"
                terms.append(p if cs == "1" else f"-{p}" if cs == "-1" else f"{cs}*{p}")
        return " + ".join(terms).replace("+ -", "- ") if terms else "0"

    def element(self, x) -> "RingElement":
        return RingElement(self, self.coerce(x))


class MultiQuadExt:
    """base[x_1..x_s]/(x_i^2 - b_i); free rank 2^s, Galois group (Z/2)^s."""

    def __init__(self, base: TruncatedLocalRing, radicands):
        if not isinstance(base, TruncatedLocalRing):
            raise TypeError("multiquadratic layers sit over a truncated local ring")
        rads = tuple(base.coerce(b) for b in radicands)
        for b in rads:
            if not base.is_unit(b):
                raise NotUnit("radicands must be units of the base ring")
        self.base = base
        self.radicands = rads
        self.s = len(rads)
        self.rank = 1 << self.s
        self.kdim = base.kdim * self.rank
        self.zero = (base.zero,) * self.rank
        one = [base.zero] * self.rank
        one[0] = base.one
        self.one = tuple(one)
        self._residue_ring = None
        # pairwise radicand factors for subset products, cached lazily
        self._subset_factor = {0: base.one}

    # -- structural ----------------------------------------------------------

    def __eq__(self, other):
        return (
            isinstance(other, MultiQuadExt)
            and other.base == self.base
            and other.radicands == self.radicands
        )

    def __hash__(self):
        return hash(("MQE", self.base, self.radicands))

    def __repr__(self):
        rads = ", ".join(self.base.fmt_elem(b) for b in self.radicands)
        return f"{self.base!r}[sqrt({rads})]"

    @property
    def base_field(self) -> BaseField:
        return self.base.field

    @property
    def field(self) -> BaseField:
        return self.base.field

    def is_residue_level(self) -> bool:
        return self.base.trunc == 1

    def residue_ring(self) -> "MultiQuadExt":
        if self._residue_ring is None:
            if self.is_residue_level():
                self._residue_ring = self
            else:
                rbase = self.base.residue_ring()
                self._residue_ring = MultiQuadExt(
                    rbase, [self.base.residue(b) for b in self.radicands]
                )
        return self._residue_ring

    # -- coordinates ---------------------------------------------------------

    def coerce(self, x):
        if isinstance(x, RingElement):
            if x.ring == self:
                return x.coords
            return self.embed_base(self.base.coerce(x))
        if isinstance(x, (tuple, list)) and len(x) == self.rank:
            return tuple(self.base.coerce(c) for c in x)
        return self.embed_base(self.base.coerce(x))

    def embed_base(self, b):
        out = [self.base.zero] * self.rank
        out[0] = b
        return tuple(out)

    def from_scalar(self, c):
        return self.embed_base(self.base.from_scalar(c))

    def gen(self, i: int):
        out = [self.base.zero] * self.rank
        out[1 << i] = self.base.one
        return tuple(out)

    def is_zero(self, x) -> bool:
        return all(self.base.is_zero(c) for c in x)

    # -- arithmetic ----------------------------------------------------------

    def _factor(self, mask: int):
        f = self._subset_factor.get(mask)
        if f is None:
            f = self.base.one
            m = mask
            i = 0
            while m:
                if m & 1:
                    f = self.base.mul(f, self.radicands[i])
                m >>= 1
                i += 1
            self._subset_factor[mask] = f
        return f

    def add(self, x, y):
        badd = self.base.add
        return tuple(badd(a, b) for a, b in zip(x, y))

    def sub(self, x, y):
        bsub = self.base.sub
        return tuple(bsub(a, b) for a, b in zip(x, y))

    def neg(self, x):
        bneg = self.base.neg
        return tuple(bneg(a) for a in x)

    def scalar_mul(self, c, x):
        bsm = self.base.scalar_mul
        return tuple(bsm(c, a) for a in x)

    def base_mul(self, b, x):
        bmul = self.base.mul
        return tuple(bmul(b, a) for a in x)

    def mul(self, x, y):
        base = self.base
        bmul = base.mul
        badd = base.add
        bz = base.is_zero
        out = [base.zero] * self.rank
        for A, xa in enumerate(x):
            if bz(xa):
                continue
            for B, yb in enumerate(y):
                if bz(yb):
                    continue
                c = bmul(xa, yb)
                m = A & B
                if m:
                    c = bmul(c, self._factor(m))
                t = A ^ B
                out[t] = badd(out[t], c)
        return tuple(out)

    # -- Galois action, norms ------------------------------------------------

    def galois(self, x, signs: int):
        """Apply the automorphism sending x_i -> -x_i for each bit of signs."""
        out = []
        for A, c in enumerate(x):
            if (A & signs).bit_count() & 1:
                out.append(self.base.neg(c))
            else:
                out.append(c)
        return tuple(out)

    def sigma(self, x):
        """The nontrivial automorphism of a quadratic layer (s == 1)."""
        if self.s != 1:
            raise PreconditionViolated("sigma shorthand needs a quadratic layer")
        return (x[0], self.base.neg(x[1]))

    def norm(self, x):
        """Norm to the base of a quadratic layer: u^2 - b v^2 for u + v x_1."""
        if self.s != 1:
            raise PreconditionViolated("norm is defined for quadratic layers")
        u, v = x
        b = self.radicands[0]
        bm = self.base.mul
        return self.base.sub(bm(u, u), bm(b, bm(v, v)))

    # -- residue and units ---------------------------------------------------

    def residue(self, x):
        rr = self.residue_ring()
        if rr is self:
            return x
        br = self.base.residue
        return tuple(br(c) for c in x)

    def lift(self, xbar):
        bl = self.base.lift
        return tuple(bl(c) for c in xbar)

    def mult_matrix_k(self, x):
        """K-matrix of left multiplication by x on the 2^s * kdim(base) space."""
        n = self.kdim
        cols = []
        for B in range(self.rank):
            for j in range(self.base.kdim):
                ej = self.base.from_kvec(
                    [self.base.field.one if t == j else self.base.field.zero
                     for t in range(self.base.kdim)]
                )
                vec = [self.base.zero] * self.rank
                vec[B] = ej
                prod = self.mul(x, tuple(vec))
                cols.append(self.to_kvec(prod))
        return [[cols[j][i] for j in range(n)] for i in range(n)]

    def is_unit(self, x) -> bool:
        rr = self.residue_ring()
        xbar = self.residue(x)
        if rr.s == 1:
            return rr.base.is_unit(rr.norm(xbar))
        return det_is_nonzero(rr.mult_matrix_k(xbar))

    def invert(self, x):
        rr = self.residue_ring()
        if rr is self:
            return self._invert_residue_level(x)
        zbar = rr.invert(self.residue(x))
        z = self.lift(zbar)
        n = self.sub(self.one, self.mul(x, z))
        acc = self.one
        term = n
        while not self.is_zero(term):
            acc = self.add(acc, term)
            term = self.mul(term, n)
        return self.mul(z, acc)

    def _invert_residue_level(self, x):
        if self.s == 1:
            # u + v r inverted through the norm when it is a unit
            nrm = self.norm(x)
            if not self.base.is_unit(nrm):
                raise NotUnit("zero norm at residue level")
            ninv = self.base.invert(nrm)
            u, v = x
            return (self.base.mul(u, ninv), self.base.mul(self.base.neg(v), ninv))
        M = self.mult_matrix_k(x)
        onevec = [self.field.one] + [self.field.zero] * (self.kdim - 1)
        sol = solve_right(M, onevec)
        if sol is None or not det_is_nonzero(M):
            raise NotUnit("multiplication matrix is singular")
        return self.from_kvec(sol)

    # -- K-linear views ------------------------------------------------------

    def to_kvec(self, x):
        out = []
        for c in x:
            out.extend(self.base.to_kvec(c))
        return out

    def from_kvec(self, vec):
        k = self.base.kdim
        return tuple(self.base.from_kvec(vec[i * k : (i + 1) * k]) for i in range(self.rank))

    # -- misc ----------------------------------------------------------------

    def random_coords(self, rng, height: int, full: bool = False, unit: bool = False):
        while True:
            coords = tuple(
                self.base.random_coords(rng, height, full=full) for _ in range(self.rank)
            )
            if not unit or self.is_unit(coords):
                return coords

    def serial(self, x):
        return [self.base.serial(c) for c in x]

    def from_serial(self, data):
        if not isinstance(data, list) or len(data) != self.rank:
            raise ValueError(f"expected {self.rank} coordinates")
        return tuple(self.base.from_serial(c) for c in data)

    def fmt_elem(self, x) -> str:
        names = {0: ""}
        for i in range(self.s):
            names[1 << i] = f"r{i}" if self.s > 1 else "r"
        terms = []
        for A, c in enumerate(x):
            if self.base.is_zero(c):
                continue
            cs = self.base.fmt_elem(c)
            if A == 0:
                terms.append(cs)
                continue
            label = "*".join(names[1 << i] for i in range(self.s) if A & (1 << i))
            terms.append(f"({cs})*{label}")
        return " + ".join(terms) if terms else "0"

    def element(self, x) -> "RingElement":
        return RingElement(self, self.coerce(x))


class RingElement:
    """Operator wrapper over (ring, coords); immutable, exact."""

    __slots__ = ("ring", "coords")

    def __init__(self, ring, coords):
        object.__setattr__(self, "ring", ring)
        object.__setattr__(self, "coords", coords)

    def __setattr__(self, *a):
        raise AttributeError("RingElement is immutable")

    def _co(self, other):
        if isinstance(other, RingElement) and other.ring == self.ring:
            return other.coords
        return self.ring.coerce(other)

    def __add__(self, other):
        return RingElement(self.ring, self.ring.add(self.coords, self._co(other)))

    __radd__ = __add__

    def __sub__(self, other):
        return RingElement(self.ring, self.ring.sub(self.coords, self._co(other)))

    def __rsub__(self, other):
        return RingElement(self.ring, self.ring.sub(self._co(other), self.coords))

    def __mul__(self, other):
        return RingElement(self.ring, self.ring.mul(self.coords, self._co(other)))

    __rmul__ = __mul__

    def __neg__(self):
        return RingElement(self.ring, self.ring.neg(self.coords))

    def __truediv__(self, other):
        o = self._co(other)
        return RingElement(self.ring, self.ring.mul(self.coords, self.ring.invert(o)))

    def __rtruediv__(self, other):
        o = self._co(other)
        return RingElement(self.ring, self.ring.mul(o, self.ring.invert(self.coords)))

    def __pow__(self, e: int):
        if e < 0:
            return (1 / self) ** (-e)
        acc = RingElement(self.ring, self.ring.one)
        b = self
        while e:
            if e & 1:
                acc = acc * b
            b = b * b
            e >>= 1
        return acc

    def __eq__(self, other):
        if isinstance(other, RingElement):
            return other.ring == self.ring and other.coords == self.coords
        try:
            return self.coords == self._co(other)
        except (TypeError, ValueError):
            return NotImplemented

    def __hash__(self):
        return hash((self.ring, self.coords))

    def __bool__(self):
        return not self.ring.is_zero(self.coords)

    def __repr__(self):
        return self.ring.fmt_elem(self.coords)

    @property
    def is_unit(self) -> bool:
        return self.ring.is_unit(self.coords)


# -- module-level operations (public API) ------------------------------------


def make_truncated(field: BaseField, trunc: int) -> TruncatedLocalRing:
    """K[eps]/(eps^trunc); trunc == 1 gives a copy of K itself."""
    return TruncatedLocalRing(field, trunc)


def adjoin_sqrts(ring: TruncatedLocalRing, radicands) -> MultiQuadExt:
    """Adjoin square roots of unit radicands to a truncated local ring."""
    return MultiQuadExt(ring, [ring.coerce(b) for b in radicands])


def residue(x: RingElement) -> RingElement:
    rr = x.ring.residue_ring()
    return RingElement(rr, x.ring.residue(x.coords))


def invert(x: RingElement) -> RingElement:
    return RingElement(x.ring, x.ring.invert(x.coords))


def galois_apply(signs: int, x: RingElement) -> RingElement:
    """Apply the Galois character given by a sign bitmask to a layer element.

    Bit i of ``signs`` set means the i-th adjoined root is negated.
    """
    if not isinstance(x.ring, MultiQuadExt):
        raise PreconditionViolated("galois action lives on multiquadratic layers")
    return RingElement(x.ring, x.ring.galois(x.coords, signs))


def norm(x: RingElement) -> RingElement:
    if not isinstance(x.ring, MultiQuadExt):
        raise PreconditionViolated("norm lives on multiquadratic layers")
    return RingElement(x.ring.base, x.ring.norm(x.coords))


def hilbert90(z: RingElement, rng=None, max_draws: int = 32) -> RingElement:
    """Write a norm-one unit z of a quadratic layer as s / sigma(s).

    Constructive Hilbert 90: s = w + z sigma(w) satisfies z sigma(s) = s
    whenever it is a unit; w = 1 is tried first, then random draws with
    growing height, Degenerate after ``max_draws`` failures.
    """
    S = z.ring
    if not isinstance(S, MultiQuadExt) or S.s != 1:
        raise PreconditionViolated("hilbert90 needs a quadratic layer")
    if S.norm(z.coords) != S.base.one:
        raise PreconditionViolated("hilbert90 needs an exact norm-one input")
    if rng is None:
        rng = random.Random(0)
    zc = z.coords
    draws = 0
    w = S.one
    while True:
        s = S.add(w, S.mul(zc, S.sigma(w)))
        if S.is_unit(s):
            assert S.mul(zc, S.sigma(s)) == s
            return RingElement(S, s)
        draws += 1
        if draws >= max_draws:
            raise Degenerate("no unit s = w + z sigma(w) found")
        height = 1 + draws // 8
        w = S.random_coords(rng, height)


# -- matrix work over a tower -------------------------------------------------


def tower_solve_columns(ring, M, rhs_cols):
    """Solve M X = RHS over the ring, pivoting on unit entries.

    M is square with rows over the ring and must be invertible (over a local
    ring this means every pivot step finds a unit; NotUnit otherwise). rhs_cols
    is a list of columns. Returns the list of solution columns. Pivot rows are
    chosen sparsest-first among unit candidates to limit fill-in.
    """
    n = len(M)
    A = [list(row) for row in M]
    R = [list(col) for col in rhs_cols]
    ncols = len(R)
    iz = ring.is_zero
    perm = list(range(n))
    for col in range(n):
        best = None
        best_nnz = None
        for r in range(col, n):
            e = A[r][col]
            if not iz(e) and ring.is_unit(e):
                nnz = sum(1 for v in A[r] if not iz(v))
                if best_nnz is None or nnz < best_nnz:
                    best, best_nnz = r, nnz
                    if nnz <= 2:
                        break
        if best is None:
            raise NotUnit(f"no unit pivot in column {col}")
        A[col], A[best] = A[best], A[col]
        perm[col], perm[best] = perm[best], perm[col]
        for c in range(ncols):
            R[c][col], R[c][best] = R[c][best], R[c][col]
        pinv = ring.invert(A[col][col])
        A[col] = [ring.mul(pinv, v) for v in A[col]]
        for c in range(ncols):
            R[c][col] = ring.mul(pinv, R[c][col])
        for r in range(n):
            if r == col:
                continue
            f = A[r][col]
            if iz(f):
                continue
            A[r] = [ring.sub(A[r][j], ring.mul(f, A[col][j])) for j in range(n)]
            for c in range(ncols):
                R[c][r] = ring.sub(R[c][r], ring.mul(f, R[c][col]))
    return R


def tower_invert_matrix(ring, M):
    """Inverse of a square matrix over the ring (NotUnit if not invertible)."""
    n = len(M)
    eye = [
        [ring.one if i == j else ring.zero for i in range(n)]
        for j in range(n)
    ]
    cols = tower_solve_columns(ring, M, eye)
    return [[cols[j][i] for j in range(n)] for i in range(n)]


def tower_matrix_is_invertible(ring, M) -> bool:
    """Invertibility over the tower, decided at the residue via K-flattening."""
    rr = ring.residue_ring()
    n = len(M)
    k = rr.kdim
    flat = [[rr.field.zero] * (n * k) for _ in range(n * k)]
    for i in range(n):
        for j in range(n):
            e = ring.residue(M[i][j])
            if rr.is_zero(e):
                continue
            block = rr.mult_matrix_k(e)
            for a in range(k):
                row = flat[i * k + a]
                brow = block[a]
                for b in range(k):
                    row[j * k + b] = brow[b]
    return det_is_nonzero(flat)


__all__ = [
    "TruncatedLocalRing",
    "MultiQuadExt",
    "RingElement",
    "make_truncated",
    "adjoin_sqrts",
    "residue",
    "invert",
    "galois_apply",
    "norm",
    "hilbert90",
    "QQ",
    "Rationals",
    "PrimeField",
]
