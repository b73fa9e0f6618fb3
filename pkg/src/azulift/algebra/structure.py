"""Structure-constant algebras over the coefficient towers.

An algebra here is a free module of finite rank over one ring of a tower
(T = K[eps]/(eps^N) or a quadratic layer S over it) with multiplication
stored per basis pair as a sparse row of structure constants: sc(i, j) is a
tuple of (k, coeff) with e_i e_j = sum coeff * e_k. Small algebras hold the
whole table; large tensor products (dim 256 in the pipeline) compute rows on
demand and cache them, since most rows of such a table are never touched.

Exactness policy: constructions with dim <= 16 get a full associativity
sweep over all basis triples on construction. Larger algebras arise only
through operations that provably preserve associativity (tensor product,
opposite, Galois twist, residue, corner inside a verified parent, crossed
product with exactly checked cocycle data); those get seeded random triple
checks as a guard against implementation faults, and the reductions are
recorded in each constructor's docstring.
"""

from __future__ import annotations

import random

from ..errors import (
    AssociativityFailure,
    BaseMismatch,
    NotFree,
    NotUnit,
    PreconditionViolated,
)
from ..linalg import nullspace
from ..rings import (
    MultiQuadExt,
    RingElement,
    TruncatedLocalRing,
    tower_invert_matrix,
    tower_matrix_is_invertible,
)

_SPOT_TRIPLES = 200


def _clean_row(R, entries):
    return tuple((k, c) for k, c in entries if not R.is_zero(c))


class StructAlgebra:
    """Associative unital algebra, free of finite rank over a tower ring.

    rows maps (i, j) to the sparse structure row of e_i e_j; row_fn computes
    rows lazily for big constructions. one is the coordinate vector of the
    unit (checked to be a two-sided unit on construction). gens names a few
    distinguished basis indices; provenance records how the algebra was
    built, which later routines use to pick generating sets and fast paths.
    """

    def __init__(self, base, dim, rows=None, row_fn=None, one=None, gens=None,
                 provenance=("generic",), assoc="auto", spot_seed=0):
        if rows is None and row_fn is None:
            raise PreconditionViolated("an algebra needs structure constants")
        self.base = base
        self.dim = dim
        self.kdim = dim * base.kdim
        self._rows = {} if rows is None else {k: _clean_row(base, v) for k, v in rows.items()}
        self._row_fn = row_fn
        self.one = tuple(one) if one is not None else self.basis_coords(0)
        self.gens = dict(gens) if gens else {}
        self.provenance = provenance
        self._residue_alg = None
        self._check_unit()
        if assoc == "auto":
            assoc = "full" if dim <= 16 else "spot"
        if assoc == "full":
            self.check_associative()
        elif assoc == "spot":
            self.spot_check_associative(seed=spot_seed)
        elif assoc != "none":
            raise PreconditionViolated(f"unknown associativity mode {assoc!r}")

    # -- rows ----------------------------------------------------------------

    def sc(self, i, j):
        row = self._rows.get((i, j))
        if row is None:
            row = _clean_row(self.base, self._row_fn(i, j))
            self._rows[(i, j)] = row
        return row

    def row_uncached(self, i, j):
        """Row without touching the cache; lets serialization stream a big table."""
        row = self._rows.get((i, j))
        if row is not None:
            return row
        return _clean_row(self.base, self._row_fn(i, j))

    @property
    def mul(self):
        """Dense view of the structure-constant table; materializes all rows."""
        return [[self.sc(i, j) for j in range(self.dim)] for i in range(self.dim)]

    # -- coordinates ---------------------------------------------------------

    def basis_coords(self, k):
        R = self.base
        return tuple(R.one if i == k else R.zero for i in range(self.dim))

    def zero_coords(self):
        return (self.base.zero,) * self.dim

    def add_coords(self, x, y):
        add = self.base.add
        return tuple(add(a, b) for a, b in zip(x, y))

    def sub_coords(self, x, y):
        sub = self.base.sub
        return tuple(sub(a, b) for a, b in zip(x, y))

    def neg_coords(self, x):
        neg = self.base.neg
        return tuple(neg(a) for a in x)

    def smul_coords(self, c, x):
        mul = self.base.mul
        return tuple(mul(c, a) for a in x)

    def mul_coords(self, x, y):
        R = self.base
        iz, mul, add = R.is_zero, R.mul, R.add
        out = [R.zero] * self.dim
        for i, xi in enumerate(x):
            if iz(xi):
                continue
            for j, yj in enumerate(y):
                if iz(yj):
                    continue
                c = mul(xi, yj)
                for k, s in self.sc(i, j):
                    out[k] = add(out[k], mul(c, s))
        return tuple(out)

    def is_zero_coords(self, x):
        iz = self.base.is_zero
        return all(iz(c) for c in x)

    def coerce(self, x):
        if isinstance(x, AlgElem):
            if x.algebra is not self and x.algebra != self:
                raise BaseMismatch("element belongs to a different algebra")
            return x.coords
        if isinstance(x, (list, tuple)) and len(x) == self.dim:
            return tuple(self.base.coerce(c) for c in x)
        # scalars land on the unit
        c = self.base.coerce(x)
        return self.smul_coords(c, self.one)

    def element(self, x) -> "AlgElem":
        return AlgElem(self, self.coerce(x))

    def basis_elem(self, k) -> "AlgElem":
        return AlgElem(self, self.basis_coords(k))

    @property
    def one_elem(self) -> "AlgElem":
        return AlgElem(self, self.one)

    @property
    def zero_elem(self) -> "AlgElem":
        return AlgElem(self, self.zero_coords())

    def random_element(self, rng, height=20) -> "AlgElem":
        """Random element with residue-level coordinates, embedded upward.

        Drawing at the residue keeps the stream identical across truncation
        orders, which the zero-seed functoriality check relies on.
        """
        R = self.base
        return AlgElem(self, tuple(R.random_coords(rng, height) for _ in range(self.dim)))

    # -- K-linear views ------------------------------------------------------

    def to_kvec(self, coords):
        out = []
        for c in coords:
            out.extend(self.base.to_kvec(c))
        return out

    def from_kvec(self, vec):
        k = self.base.kdim
        return tuple(self.base.from_kvec(vec[i * k:(i + 1) * k]) for i in range(self.dim))

    def residue_coords(self, coords):
        res = self.base.residue
        return tuple(res(c) for c in coords)

    # -- exact checks --------------------------------------------------------

    def _check_unit(self):
        for k in range(self.dim):
            ek = self.basis_coords(k)
            if self.mul_coords(self.one, ek) != ek or self.mul_coords(ek, self.one) != ek:
                raise AssociativityFailure(f"declared unit fails on basis element {k}")

    def _assoc_triple(self, i, j, k):
        R = self.base
        left = {}
        for m, c in self.sc(i, j):
            for t, s in self.sc(m, k):
                left[t] = R.add(left.get(t, R.zero), R.mul(c, s))
        right = {}
        for n, d in self.sc(j, k):
            for t, s in self.sc(i, n):
                right[t] = R.add(right.get(t, R.zero), R.mul(d, s))
        for t in set(left) | set(right):
            if not R.is_zero(R.sub(left.get(t, R.zero), right.get(t, R.zero))):
                raise AssociativityFailure(
                    f"(e{i} e{j}) e{k} != e{i} (e{j} e{k})"
                )

    def check_associative(self):
        """Exact sweep over all basis triples."""
        for i in range(self.dim):
            for j in range(self.dim):
                for k in range(self.dim):
                    self._assoc_triple(i, j, k)

    def spot_check_associative(self, seed=0, count=_SPOT_TRIPLES):
        rng = random.Random(seed)
        for _ in range(count):
            i = rng.randrange(self.dim)
            j = rng.randrange(self.dim)
            k = rng.randrange(self.dim)
            self._assoc_triple(i, j, k)

    # -- misc ----------------------------------------------------------------

    def residue_algebra(self) -> "StructAlgebra":
        if self._residue_alg is None:
            self._residue_alg = residue_algebra(self)
        return self._residue_alg

    def fmt_coords(self, coords) -> str:
        terms = []
        for k, c in enumerate(coords):
            if self.base.is_zero(c):
                continue
            terms.append(f"({self.base.fmt_elem(c)})*e{k}")
        return " + ".join(terms) if terms else "0"

    def __repr__(self):
        return f"StructAlgebra(dim={self.dim}, base={self.base!r}, via={self.provenance[0]})"


class AlgElem:
    """Operator wrapper over (algebra, coords); immutable, exact."""

    __slots__ = ("algebra", "coords")

    def __init__(self, algebra, coords):
        object.__setattr__(self, "algebra", algebra)
        object.__setattr__(self, "coords", tuple(coords))

    def __setattr__(self, name, value):
        raise AttributeError("AlgElem is immutable")

    def _peer(self, other):
        if isinstance(other, AlgElem):
            if other.algebra is not self.algebra and other.algebra != self.algebra:
                raise BaseMismatch("elements of different algebras")
            return other.coords
        return self.algebra.coerce(other)

    def __add__(self, other):
        return AlgElem(self.algebra, self.algebra.add_coords(self.coords, self._peer(other)))

    __radd__ = __add__

    def __sub__(self, other):
        return AlgElem(self.algebra, self.algebra.sub_coords(self.coords, self._peer(other)))

    def __rsub__(self, other):
        return AlgElem(self.algebra, self.algebra.sub_coords(self._peer(other), self.coords))

    def __neg__(self):
        return AlgElem(self.algebra, self.algebra.neg_coords(self.coords))

    def __mul__(self, other):
        A = self.algebra
        if isinstance(other, AlgElem):
            return AlgElem(A, A.mul_coords(self.coords, self._peer(other)))
        if isinstance(other, RingElement) and other.ring == A.base:
            return AlgElem(A, A.smul_coords(other.coords, self.coords))
        if isinstance(other, (int, str)) or type(other).__name__ in ("mpq", "mpz"):
            return AlgElem(A, A.smul_coords(A.base.coerce(other), self.coords))
        return NotImplemented

    def __rmul__(self, other):
        # scalars commute; algebra elements handled by __mul__ on the left copy
        if isinstance(other, AlgElem):
            return AlgElem(self.algebra, self.algebra.mul_coords(self._peer(other), self.coords))
        return self.__mul__(other)

    def __pow__(self, n):
        if not isinstance(n, int) or n < 0:
            raise PreconditionViolated("powers are nonnegative integers")
        out = AlgElem(self.algebra, self.algebra.one)
        acc = self
        while n:
            if n & 1:
                out = out * acc
            n >>= 1
            if n:
                acc = acc * acc
        return out

    def __eq__(self, other):
        if isinstance(other, AlgElem):
            return self.algebra == other.algebra and self.coords == other.coords
        return NotImplemented

    def __hash__(self):
        return hash((id(self.algebra), self.coords))

    def __bool__(self):
        return not self.algebra.is_zero_coords(self.coords)

    def residue(self) -> "AlgElem":
        Abar = self.algebra.residue_algebra()
        return AlgElem(Abar, self.algebra.residue_coords(self.coords))

    def __repr__(self):
        return self.algebra.fmt_coords(self.coords)


class Idempotent:
    """An exactly idempotent element: e * e == e, checked on construction."""

    __slots__ = ("element",)

    def __init__(self, element: AlgElem):
        if element * element != element:
            raise PreconditionViolated("element is not idempotent")
        object.__setattr__(self, "element", element)

    def __setattr__(self, name, value):
        raise AttributeError("Idempotent is immutable")

    @property
    def algebra(self):
        return self.element.algebra

    @property
    def coords(self):
        return self.element.coords

    def complement(self) -> "Idempotent":
        return Idempotent(self.algebra.one_elem - self.element)

    def __repr__(self):
        return f"Idempotent({self.element!r})"


class AlgebraMap:
    """A base-linear or sigma-semilinear map, stored by columns.

    columns[j] holds the target coordinates of f(e_j). With twist set to a
    Galois sign mask, f(x) = sum sigma(x_j) f(e_j), so semilinearity is
    structural and only multiplicativity needs checking.
    """

    def __init__(self, source: StructAlgebra, target: StructAlgebra, columns, twist=None):
        if len(columns) != source.dim:
            raise PreconditionViolated("need one column per source basis vector")
        if twist is not None and not isinstance(source.base, MultiQuadExt):
            raise PreconditionViolated("a twist needs a multiquadratic base")
        self.source = source
        self.target = target
        self.columns = tuple(tuple(col) for col in columns)
        self.twist = twist

    @classmethod
    def identity(cls, A: StructAlgebra) -> "AlgebraMap":
        return cls(A, A, [A.basis_coords(k) for k in range(A.dim)])

    def apply_coords(self, coords):
        S = self.source.base
        T = self.target
        if self.twist is not None:
            coords = tuple(S.galois(c, self.twist) for c in coords)
        out = T.zero_coords()
        for j, c in enumerate(coords):
            if S.is_zero(c):
                continue
            out = T.add_coords(out, T.smul_coords(c, self.columns[j]))
        return out

    def apply(self, x) -> AlgElem:
        coords = x.coords if isinstance(x, AlgElem) else self.source.coerce(x)
        return AlgElem(self.target, self.apply_coords(coords))

    def __call__(self, x) -> AlgElem:
        return self.apply(x)

    def matrix(self):
        """dim_target x dim_source matrix over the base, columns = images."""
        return [
            [self.columns[j][i] for j in range(self.source.dim)]
            for i in range(self.target.dim)
        ]

    def compose(self, other: "AlgebraMap") -> "AlgebraMap":
        """self after other; twists compose by xor of sign masks."""
        if other.target is not self.source and other.target != self.source:
            raise BaseMismatch("maps do not compose")
        cols = [self.apply_coords(col) for col in other.columns]
        tw = (self.twist or 0) ^ (other.twist or 0)
        return AlgebraMap(other.source, self.target, cols, twist=tw or None)

    def inverse(self) -> "AlgebraMap":
        inv = tower_invert_matrix(self.source.base, self.matrix())
        if self.twist is not None:
            S = self.source.base
            inv = [[S.galois(e, self.twist) for e in row] for row in inv]
        cols = [[inv[i][j] for i in range(len(inv))] for j in range(len(inv))]
        return AlgebraMap(self.target, self.source, cols, twist=self.twist)

    def is_invertible(self) -> bool:
        return tower_matrix_is_invertible(self.source.base, self.matrix())

    def verify(self):
        """Exact unital + multiplicative check on all basis pairs."""
        S, T = self.source, self.target
        if self.apply_coords(S.one) != T.one:
            raise AssociativityFailure("map does not send 1 to 1")
        images = [AlgElem(T, col) for col in self.columns]
        for i in range(S.dim):
            ei = S.basis_coords(i)
            for j in range(S.dim):
                lhs = self.apply_coords(S.mul_coords(ei, S.basis_coords(j)))
                rhs = (images[i] * images[j]).coords
                if lhs != rhs:
                    raise AssociativityFailure(f"map fails on basis pair ({i}, {j})")


# -- constructors -------------------------------------------------------------


def quaternion_algebra(R, a, b, assoc="full") -> StructAlgebra:
    """The quaternion algebra (a, b)_R: i^2 = a, j^2 = b, ij = -ji.

    Basis indexed by bitmasks m = m1 + 2*m2 meaning i^m1 j^m2, so the table
    is monomial: e_m e_n = (-1)^(m2 n1) a^(m1 n1) b^(m2 n2) e_(m xor n).
    """
    a = R.coerce(a.coords if isinstance(a, RingElement) else a)
    b = R.coerce(b.coords if isinstance(b, RingElement) else b)
    if not R.is_unit(a) or not R.is_unit(b):
        raise NotUnit("quaternion slots must be units")
    rows = {}
    for m in range(4):
        m1, m2 = m & 1, m >> 1
        for n in range(4):
            n1, n2 = n & 1, n >> 1
            c = R.one
            if m2 & n1:
                c = R.neg(c)
            if m1 & n1:
                c = R.mul(c, a)
            if m2 & n2:
                c = R.mul(c, b)
            rows[(m, n)] = ((m ^ n, c),)
    return StructAlgebra(
        R, 4, rows=rows, gens={"i": 1, "j": 2},
        provenance=("quaternion", a, b), assoc=assoc,
    )


def layer_algebra(S: MultiQuadExt) -> StructAlgebra:
    """A multiquadratic layer S regarded as an algebra over its base ring."""
    if not isinstance(S, MultiQuadExt):
        raise PreconditionViolated("layer_algebra needs a multiquadratic layer")
    R = S.base
    rows = {}
    for A in range(S.rank):
        for B in range(S.rank):
            rows[(A, B)] = ((A ^ B, S._factor(A & B)),)
    gens = {f"r{t}" if S.s > 1 else "r": 1 << t for t in range(S.s)}
    return StructAlgebra(R, S.rank, rows=rows, gens=gens,
                         provenance=("layer", S), assoc="full")


def tensor(A: StructAlgebra, B: StructAlgebra, assoc=None) -> StructAlgebra:
    """Tensor product over the shared base; index m = i*dim(B) + j.

    The product of associative algebras is associative, so big tensors only
    get seeded spot checks; small ones still run the full sweep.
    """
    if A.base != B.base:
        raise BaseMismatch("tensor factors must share their base ring")
    R = A.base
    dB = B.dim

    def row_fn(i, j):
        ia, ib = divmod(i, dB)
        ja, jb = divmod(j, dB)
        out = []
        for ka, ca in A.sc(ia, ja):
            for kb, cb in B.sc(ib, jb):
                out.append((ka * dB + kb, R.mul(ca, cb)))
        return out

    dim = A.dim * B.dim
    one = [R.zero] * dim
    for i, ca in enumerate(A.one):
        if R.is_zero(ca):
            continue
        for j, cb in enumerate(B.one):
            if not R.is_zero(cb):
                one[i * dB + j] = R.mul(ca, cb)
    gens = {}
    for name, idx in A.gens.items():
        gens[name + "(x)1"] = idx * dB
    for name, idx in B.gens.items():
        gens["1(x)" + name] = idx
    if assoc is None:
        assoc = "full" if dim <= 16 else "spot"
    alg = StructAlgebra(R, dim, row_fn=row_fn, one=one, gens=gens,
                        provenance=("tensor", A, B), assoc=assoc)
    if dim <= 64:
        # small enough to hold the whole table
        for i in range(dim):
            for j in range(dim):
                alg.sc(i, j)
    return alg


def opposite(A: StructAlgebra) -> StructAlgebra:
    """Same module, reversed multiplication; involutive on the table."""
    if A.provenance[0] == "opposite":
        return A.provenance[1]
    return StructAlgebra(
        A.base, A.dim, row_fn=lambda i, j: A.sc(j, i), one=A.one,
        gens=dict(A.gens), provenance=("opposite", A), assoc="spot",
    )


def galois_twist(A: StructAlgebra, signs: int) -> StructAlgebra:
    """Structure constants pushed through the Galois character of the base."""
    S = A.base
    if not isinstance(S, MultiQuadExt):
        raise PreconditionViolated("galois_twist needs a multiquadratic base")
    if signs == 0:
        return A

    def row_fn(i, j):
        return tuple((k, S.galois(c, signs)) for k, c in A.sc(i, j))

    return StructAlgebra(
        S, A.dim, row_fn=row_fn, one=tuple(S.galois(c, signs) for c in A.one),
        gens=dict(A.gens), provenance=("twist", signs, A), assoc="spot",
    )


def residue_algebra(A: StructAlgebra) -> StructAlgebra:
    """The same presentation over the residue ring of the base."""
    R = A.base
    rr = R.residue_ring()
    if rr is R:
        return A

    def row_fn(i, j):
        return tuple((k, R.residue(c)) for k, c in A.sc(i, j))

    return StructAlgebra(
        rr, A.dim, row_fn=row_fn, one=tuple(R.residue(c) for c in A.one),
        gens=dict(A.gens), provenance=("residue", A), assoc="spot",
    )


def same_structure(A: StructAlgebra, B: StructAlgebra) -> bool:
    """Exact equality of base, dimension, unit, and every structure row."""
    if A.base != B.base or A.dim != B.dim or A.one != B.one:
        return False
    for i in range(A.dim):
        for j in range(A.dim):
            if A.row_uncached(i, j) != B.row_uncached(i, j):
                return False
    return True


# -- generating sets ----------------------------------------------------------


def generating_indices(A: StructAlgebra):
    """Basis indices that generate A as a unital algebra, or None if unknown.

    Walks the provenance: constructors that preserve basis positions keep
    the generating set of what they were built from.
    """
    tag = A.provenance[0]
    if tag == "quaternion":
        return [1, 2]
    if tag == "layer":
        return [1 << t for t in range(A.provenance[1].s)]
    if tag == "tensor":
        fa, fb = A.provenance[1], A.provenance[2]
        ga, gb = generating_indices(fa), generating_indices(fb)
        if ga is None or gb is None:
            return None
        return [i * fb.dim for i in ga] + list(gb)
    if tag in ("opposite", "residue"):
        return generating_indices(A.provenance[1])
    if tag == "twist":
        return generating_indices(A.provenance[2])
    if tag == "crossed":
        inner = A.provenance[1]
        gi = generating_indices(inner)
        if gi is None:
            return None
        dB = inner.dim
        return list(gi) + [dB, 2 * dB]
    return None


def _gen_elements(A: StructAlgebra):
    idx = generating_indices(A)
    if idx is None:
        idx = range(A.dim)
    return [A.basis_coords(i) for i in idx]


# -- linear algebra over the base ---------------------------------------------


def express_in_basis(R, basis, targets):
    """Coefficients of targets in a free family over R, with exact residuals.

    basis is a list of r coordinate tuples over R spanning a free module;
    targets a list of coordinate tuples lying in that span. Returns a list
    of length-r coefficient lists. NotFree if pivoting fails or a target
    leaves the span.
    """
    r = len(basis)
    n = len(basis[0]) if r else 0
    iz = R.is_zero

    # fast path: each basis vector owns a pivot position no other one touches
    supports = [frozenset(p for p in range(n) if not iz(b[p])) for b in basis]
    owners = {}
    for s, sup in enumerate(supports):
        for p in sup:
            owners.setdefault(p, []).append(s)
    pivots = []
    ok = True
    for s in range(r):
        pos = next(
            (p for p in sorted(supports[s])
             if len(owners[p]) == 1 and R.is_unit(basis[s][p])),
            None,
        )
        if pos is None:
            ok = False
            break
        pivots.append(pos)
    if ok:
        invs = [R.invert(basis[s][pivots[s]]) for s in range(r)]
        out = []
        for t in targets:
            coeffs = [R.mul(invs[s], t[pivots[s]]) for s in range(r)]
            resid = list(t)
            for s, c in enumerate(coeffs):
                if iz(c):
                    continue
                for p in supports[s]:
                    resid[p] = R.sub(resid[p], R.mul(c, basis[s][p]))
            if all(iz(v) for v in resid):
                out.append(coeffs)
            else:
                ok = False
                break
        if ok:
            return out

    # general path: column reduction with change-of-basis bookkeeping
    cols = [list(b) for b in basis]
    U = [[R.one if i == j else R.zero for j in range(r)] for i in range(r)]
    used = []
    for s in range(r):
        rho = None
        for s2 in range(s, r):
            rho = next(
                (i for i in range(n) if i not in used and R.is_unit(cols[s2][i])),
                None,
            )
            if rho is not None:
                if s2 != s:
                    cols[s], cols[s2] = cols[s2], cols[s]
                    U[s], U[s2] = U[s2], U[s]
                break
        if rho is None:
            raise NotFree("no unit pivot while reducing a module basis")
        used.append(rho)
        inv = R.invert(cols[s][rho])
        cols[s] = [R.mul(inv, v) for v in cols[s]]
        U[s] = [R.mul(inv, v) for v in U[s]]
        for s2 in range(r):
            if s2 == s:
                continue
            f = cols[s2][rho]
            if iz(f):
                continue
            cols[s2] = [R.sub(a, R.mul(f, b)) for a, b in zip(cols[s2], cols[s])]
            U[s2] = [R.sub(a, R.mul(f, b)) for a, b in zip(U[s2], U[s])]
    out = []
    for t in targets:
        lam = [t[rho] for rho in used]
        resid = list(t)
        for s, c in enumerate(lam):
            if iz(c):
                continue
            for p in range(n):
                resid[p] = R.sub(resid[p], R.mul(c, cols[s][p]))
        if not all(iz(v) for v in resid):
            raise NotFree("target leaves the span of the declared basis")
        # coefficients w.r.t. the original basis: original * (U^T lam)
        out.append([
            _dot(R, [U[s][q] for s in range(r)], lam) for q in range(r)
        ])
    return out


def _dot(R, vec, lam):
    acc = R.zero
    for a, b in zip(vec, lam):
        acc = R.add(acc, R.mul(a, b))
    return acc


class RingSpan:
    """Incremental echelon span over a ring whose residue is a field.

    Pivots are leading coordinates, which keeps stored rows zero before
    their pivot; a leading non-unit (possible only over an etale residue)
    makes independence undecidable by unit pivoting, so it raises.
    """

    def __init__(self, ring):
        self.ring = ring
        self.pivrows = {}

    def add(self, vec) -> bool:
        R = self.ring
        v = list(vec)
        for c in sorted(self.pivrows):
            f = v[c]
            if not R.is_zero(f):
                row = self.pivrows[c]
                v = [R.sub(a, R.mul(f, b)) for a, b in zip(v, row)]
        for c, x in enumerate(v):
            if R.is_zero(x):
                continue
            if not R.is_unit(x):
                raise NotFree("leading entry is a zero divisor; selection undecidable")
            inv = R.invert(x)
            self.pivrows[c] = [R.mul(inv, a) for a in v]
            return True
        return False

    @property
    def dim(self) -> int:
        return len(self.pivrows)


def _select_residue_basis(A: StructAlgebra, candidates):
    """Indices of candidates whose residues are independent over the residue ring."""
    span = RingSpan(A.base.residue_ring())
    picked = []
    for pos, coords in enumerate(candidates):
        if span.add(A.residue_coords(coords)):
            picked.append(pos)
    return picked


# -- the Azumaya test ---------------------------------------------------------


def _is_field(ring) -> bool:
    """Whether a residue-level tower ring is a field."""
    if isinstance(ring, TruncatedLocalRing):
        return ring.trunc == 1
    if ring.base.trunc != 1 or ring.s != 1:
        return False
    return not ring.field.is_square(ring.radicands[0][0])


def _canonical_map_matrix(A: StructAlgebra):
    """Matrix of A tensor A^op -> End(A) in the basis e_i tensor e_j."""
    R = A.base
    d = A.dim
    M = [[R.zero] * (d * d) for _ in range(d * d)]
    for i in range(d):
        for l in range(d):
            w = A.sc(i, l)
            for j in range(d):
                # column (i, j), input basis l: e_i e_l e_j expanded
                col = i * d + j
                for m, c in w:
                    for t, s in A.sc(m, j):
                        M[l * d + t][col] = R.add(M[l * d + t][col], R.mul(c, s))
    return M


def _regular_trace_vector(A: StructAlgebra):
    """t[m] = trace of left multiplication by e_m, over the base ring."""
    R = A.base
    out = []
    for m in range(A.dim):
        acc = R.zero
        for l in range(A.dim):
            for k, c in A.sc(m, l):
                if k == l:
                    acc = R.add(acc, c)
        out.append(acc)
    return out


def _trace_gram(A: StructAlgebra):
    t = _regular_trace_vector(A)
    R = A.base
    G = [[R.zero] * A.dim for _ in range(A.dim)]
    for i in range(A.dim):
        for j in range(A.dim):
            acc = R.zero
            for k, c in A.sc(i, j):
                acc = R.add(acc, R.mul(c, t[k]))
            G[i][j] = acc
    return G


def _center_is_base(A: StructAlgebra) -> bool:
    """Whether the center of a residue-level algebra is exactly base * 1.

    Tensor provenance factorizes: for finite-dimensional algebras over a
    field the center of a tensor product is the tensor product of the
    centers, so both factors being central is equivalent. Otherwise the
    center is cut out by intersecting ad-kernels of a generating set.
    """
    tag = A.provenance[0]
    if tag == "tensor":
        return _center_is_base(A.provenance[1]) and _center_is_base(A.provenance[2])
    if tag == "residue":
        inner = A.provenance[1]
        if inner.provenance[0] == "tensor":
            fa = residue_algebra(inner.provenance[1])
            fb = residue_algebra(inner.provenance[2])
            return _center_is_base(fa) and _center_is_base(fb)
    if tag == "opposite":
        return _center_is_base(A.provenance[1])
    if tag == "twist":
        return _center_is_base(A.provenance[2])

    K = A.base.field
    gens = _gen_elements(A)
    # V holds K-flattened coordinates of the current candidate subspace
    V = [
        [K.one if t == k else K.zero for t in range(A.kdim)]
        for k in range(A.kdim)
    ]
    for g in gens:
        images = []
        for vec in V:
            v = A.from_kvec(vec)
            w = A.sub_coords(A.mul_coords(v, g), A.mul_coords(g, v))
            images.append(A.to_kvec(w))
        rows = [[images[c][r] for c in range(len(images))] for r in range(A.kdim)]
        rows = [row for row in rows if any(row)]
        if not rows:
            continue
        kern = nullspace(rows, n=len(images))
        newV = []
        for coeffs in kern:
            vec = [K.zero] * A.kdim
            for c, f in enumerate(coeffs):
                if f:
                    for t in range(A.kdim):
                        vec[t] = vec[t] + f * V[c][t]
            newV.append(vec)
        V = newV
        if len(V) == A.base.kdim:
            break
    return len(V) == A.base.kdim


def is_azumaya(A: StructAlgebra) -> bool:
    """Whether A is Azumaya over its base ring; exact either way.

    Small algebras go through the canonical map A tensor A^op -> End(A),
    whose matrix must have unit determinant; over a local (or layered
    local) base that is decided at the residue, where the K-flattened
    determinant is the norm of the determinant over the residue ring, so
    the test is also correct for split quadratic layers. Larger algebras
    use the residue criterion: the residue algebra must be central over
    its base field with nondegenerate regular trace form. That is
    equivalent there (char 0 or odd p with 2-power degrees), and a unit
    canonical determinant lifts from the residue since the base is local.
    """
    base = A.base
    rbar = base.residue_ring()
    if A.dim <= 16 or not _is_field(rbar):
        M = _canonical_map_matrix(A)
        return tower_matrix_is_invertible(base, M)
    Abar = A.residue_algebra()
    if not _center_is_base(Abar):
        return False
    G = _trace_gram(Abar)
    return tower_matrix_is_invertible(rbar, G)


# -- centralizer, corner, split idempotent ------------------------------------


def centralizer(A: StructAlgebra, gens):
    """The subalgebra commuting with gens, plus its inclusion map.

    Solved as exact K-linear algebra after flattening; freeness over the
    base is certified by comparing the K-dimension against the residue
    rank (NotFree on mismatch, which cannot happen for the pipeline's
    inputs).
    """
    R = A.base
    K = R.field
    gcoords = [g.coords if isinstance(g, AlgElem) else A.coerce(g) for g in gens]
    flat_basis = []
    for k in range(A.kdim):
        flat_basis.append(A.from_kvec([K.one if t == k else K.zero for t in range(A.kdim)]))
    rows = []
    for g in gcoords:
        cols = []
        for v in flat_basis:
            w = A.sub_coords(A.mul_coords(v, g), A.mul_coords(g, v))
            cols.append(A.to_kvec(w))
        for r in range(A.kdim):
            row = [cols[c][r] for c in range(A.kdim)]
            if any(row):
                rows.append(row)
    if rows:
        # kernel coefficients over the standard flat basis are K-vectors of A
        members = [A.from_kvec(list(coeffs)) for coeffs in nullspace(rows, n=A.kdim)]
    else:
        members = list(flat_basis)
    # residue rank fixes the free rank
    rr = R.residue_ring()
    span = RingSpan(rr)
    picked = []
    for pos, m in enumerate(members):
        if span.add(A.residue_coords(m)):
            picked.append(pos)
    r = len(picked)
    expected = r * (R.kdim // rr.kdim)
    if len(members) != expected:
        raise NotFree(
            f"centralizer has K-dimension {len(members)}, expected {expected}"
        )
    basis = [members[p] for p in picked]
    prods = []
    pairs = []
    for i in range(r):
        for j in range(r):
            prods.append(A.mul_coords(basis[i], basis[j]))
            pairs.append((i, j))
    coeffs = express_in_basis(R, basis, prods)
    crows = {}
    for (i, j), lam in zip(pairs, coeffs):
        crows[(i, j)] = tuple((k, lam[k]) for k in range(r))
    one_lam = express_in_basis(R, basis, [A.one])[0]
    C = StructAlgebra(
        R, r, rows=crows, one=tuple(one_lam),
        provenance=("centralizer", A), assoc="full" if r <= 16 else "spot",
    )
    incl = AlgebraMap(C, A, [tuple(b) for b in basis])
    return C, incl


def corner(A: StructAlgebra, e) -> StructAlgebra:
    """The corner algebra eAe with unit e.

    The corner of a free algebra over a local base is a direct summand,
    hence free; its rank equals the residue rank, and a basis is selected
    by residue independence among the compressed basis images e e_i e.
    The corner of an associative algebra is associative (products are
    computed inside A and expansions in a free basis are unique), so only
    spot checks run here.
    """
    if isinstance(e, Idempotent):
        ec = e.coords
    else:
        ec = e.coords if isinstance(e, AlgElem) else A.coerce(e)
        if A.mul_coords(ec, ec) != ec:
            raise PreconditionViolated("corner needs an exact idempotent")
    R = A.base
    compressed = []
    for i in range(A.dim):
        f = A.mul_coords(A.mul_coords(ec, A.basis_coords(i)), ec)
        compressed.append(f)
    nonzero = [(i, f) for i, f in enumerate(compressed) if not A.is_zero_coords(f)]
    picked = _select_residue_basis(A, [f for _, f in nonzero])
    basis = [nonzero[p][1] for p in picked]
    r = len(basis)
    prods = []
    pairs = []
    for i in range(r):
        for j in range(r):
            prods.append(A.mul_coords(basis[i], basis[j]))
            pairs.append((i, j))
    lam = express_in_basis(R, basis, prods + [ec])
    crows = {}
    for (i, j), coeffs in zip(pairs, lam[:-1]):
        crows[(i, j)] = tuple(enumerate(coeffs))
    one = tuple(lam[-1])
    C = StructAlgebra(
        R, r, rows=crows, one=one,
        provenance=("corner", A), assoc="spot",
    )
    C.inclusion = AlgebraMap(C, A, [tuple(b) for b in basis])
    return C


def double_layer(S: MultiQuadExt) -> StructAlgebra:
    """S tensor_T S as an algebra over T, basis 1, r(x)1, 1(x)r, r(x)r."""
    L = layer_algebra(S)
    return tensor(L, L)


def galois_split_idempotent(A2: StructAlgebra) -> Idempotent:
    """The splitting idempotent (1 + (r tensor r)/a) / 2 of S tensor_T S.

    A2 must look like the double layer of a quadratic S: basis index 3
    squares to a^2 times the unit. The construction is verified by the
    exact idempotency check in the wrapper.
    """
    R = A2.base
    if A2.dim != 4:
        raise PreconditionViolated("galois_split_idempotent needs a rank-4 double layer")
    rr_row = A2.sc(3, 3)
    if len(rr_row) != 1 or rr_row[0][0] != 0:
        raise PreconditionViolated("basis element 3 does not square into the unit line")
    asq = rr_row[0][1]
    if not R.is_unit(asq):
        raise NotUnit("the layer radicand must be a unit")
    half = R.invert(R.coerce(2))
    # a itself: e1^2 = a * 1 in the double layer
    a_row = A2.sc(1, 1)
    if len(a_row) != 1 or a_row[0][0] != 0:
        raise PreconditionViolated("basis element 1 does not square into the unit line")
    a = a_row[0][1]
    coeff = R.mul(half, R.invert(a))
    coords = [R.zero] * 4
    coords[0] = half
    coords[3] = coeff
    return Idempotent(AlgElem(A2, tuple(coords)))


__all__ = [
    "StructAlgebra",
    "AlgElem",
    "AlgebraMap",
    "Idempotent",
    "quaternion_algebra",
    "layer_algebra",
    "tensor",
    "opposite",
    "galois_twist",
    "residue_algebra",
    "same_structure",
    "generating_indices",
    "express_in_basis",
    "is_azumaya",
    "centralizer",
    "corner",
    "double_layer",
    "galois_split_idempotent",
]
