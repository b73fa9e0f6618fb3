"""Finding and lifting idempotents.

rank_one_idempotent splits a residue-level algebra down to a rank-one
idempotent; hensel_lift_idempotent carries a residue idempotent up the
eps-adic tower by the cubic Newton step. Split certification is exact:
quaternions over the rationals are decided by their ramification set
before any search runs, and an etale quadratic base is decomposed into
its two field summands so each inherits the certified routes.
"""

from __future__ import annotations

import random

from ..errors import (
    NotIdempotentResidue,
    NotSplit,
    NotUnit,
    PreconditionViolated,
    SearchExhausted,
)
from ..linalg import solve_right
from ..rings import MultiQuadExt, TruncatedLocalRing
from ..scalars import PrimeField, Rationals
from ..symbols import ramification_set, solve_norm
from .structure import (
    AlgElem,
    Idempotent,
    RingSpan,
    StructAlgebra,
    corner,
    quaternion_algebra,
)

_DRAWS = 1000


def hensel_lift_idempotent(A: StructAlgebra, e0) -> Idempotent:
    """Lift a residue idempotent to an exact one over the truncated base.

    e0 may live in A (any lift of the residue candidate) or in the residue
    algebra of A. The Newton step e <- 3e^2 - 2e^3 squares the defect
    ideal, so ceil(log2 N) rounds reach exactness at truncation order N.
    """
    if isinstance(e0, Idempotent):
        e0 = e0.element
    if isinstance(e0, AlgElem):
        if e0.algebra is A or e0.algebra == A:
            coords = e0.coords
        elif e0.algebra == A.residue_algebra():
            lift = A.base.lift
            coords = tuple(lift(c) for c in e0.coords)
        else:
            raise PreconditionViolated("idempotent candidate from an unrelated algebra")
    else:
        coords = A.coerce(e0)
    Abar = A.residue_algebra()
    rbar = A.residue_coords(coords)
    if Abar.mul_coords(rbar, rbar) != rbar:
        raise NotIdempotentResidue("candidate is not idempotent at the residue")
    base = A.base
    trunc = base.trunc if isinstance(base, TruncatedLocalRing) else base.base.trunc
    three = base.coerce(3)
    two = base.coerce(2)
    e = coords
    for _ in range((trunc - 1).bit_length()):
        e2 = A.mul_coords(e, e)
        e3 = A.mul_coords(e2, e)
        e = A.sub_coords(A.smul_coords(three, e2), A.smul_coords(two, e3))
    out = Idempotent(AlgElem(A, e))
    assert A.residue_coords(e) == rbar, "lift moved the residue"
    return out


# -- rank-one search ----------------------------------------------------------


def rank_one_idempotent(A: StructAlgebra, seed: int = 0) -> Idempotent:
    """An idempotent e with eAe of rank one over the base field.

    The base must be residue-level: the field itself or an etale quadratic
    layer over it (handled through its two summands). Quaternion algebras
    over the rationals are certified first: NotSplit exactly when the
    ramification set of the slot pair is nonempty, otherwise a zero
    divisor comes from a binary norm equation. Prime fields always split.
    The general route draws random elements, factors their minimal
    polynomial over the prime field, converts a coprime factorization
    into an idempotent, and recurses into the corner.
    """
    base = A.base
    if isinstance(base, TruncatedLocalRing):
        if base.trunc != 1:
            raise PreconditionViolated("rank_one_idempotent works at the residue level")
    elif isinstance(base, MultiQuadExt):
        if base.base.trunc != 1:
            raise PreconditionViolated("rank_one_idempotent works at the residue level")
    else:
        raise PreconditionViolated("unsupported base ring")
    if A.dim == 1:
        return Idempotent(A.one_elem)
    if isinstance(base, MultiQuadExt):
        g = _etale_sqrt(base)
        if g is not None:
            return _rank_one_etale(A, base, g, seed)
        # quadratic field base: only the generic route applies
        return _rank_one_generic(A, seed)
    field = base.field
    if A.provenance[0] == "quaternion":
        a, b = A.provenance[1], A.provenance[2]
        if isinstance(field, Rationals):
            return _rank_one_quaternion_q(A, a[0], b[0])
        if isinstance(field, PrimeField):
            return _rank_one_quaternion_p(A, field.p, a[0].v, b[0].v)
    return _rank_one_generic(A, seed)


def _corner_dim(A: StructAlgebra, ecoords) -> int:
    span = RingSpan(A.base.residue_ring())
    count = 0
    for i in range(A.dim):
        f = A.mul_coords(A.mul_coords(ecoords, A.basis_coords(i)), ecoords)
        if span.add(A.residue_coords(f)):
            count += 1
    return count


def _rank_one_quaternion_q(A, a, b) -> Idempotent:
    if ramification_set(a, b):
        raise NotSplit(f"({a}, {b}) is ramified")
    sol = solve_norm(a, b)
    if sol is None:
        raise NotSplit(f"({a}, {b}) admits no norm representation")
    u, v = sol
    return _idempotent_from_norm_zero(A, u, v)


def _rank_one_quaternion_p(A, p, a, b) -> Idempotent:
    from sympy.ntheory.residue_ntheory import sqrt_mod

    for v in range(p):
        u = sqrt_mod((b + a * v * v) % p, p)
        if u is not None:
            return _idempotent_from_norm_zero(A, u, v)
    raise SearchExhausted("no norm representation modulo p")  # unreachable for odd p


def _idempotent_from_norm_zero(A, u, v) -> Idempotent:
    """From u^2 - a v^2 = b: z = u + v i + j has reduced norm zero."""
    R = A.base
    z = A.element([u, v, 1, 0])
    uc = R.coerce(u)
    tr = R.add(uc, uc)
    if R.is_unit(tr):
        e = z * R.element(R.invert(tr))
    else:
        # trace zero: z is nilpotent; i z has trace 2 v a, a unit here
        w = A.basis_elem(1) * z
        t = w.coords[0]
        e = w * R.element(R.invert(R.add(t, t)))
    out = Idempotent(e)
    assert _corner_dim(A, out.coords) == 1, "norm-zero element gave the wrong rank"
    return out


def _etale_sqrt(S: MultiQuadExt):
    """A scalar square root of the radicand of a quadratic layer, or None."""
    if S.s != 1:
        raise PreconditionViolated("expected a quadratic layer")
    rad = S.radicands[0][0]
    if not S.field.is_square(rad):
        return None
    return S.field.sqrt(rad)


def _rank_one_etale(A, S: MultiQuadExt, g, seed) -> Idempotent:
    """Split the base into its two summands, solve each, recombine."""
    Tf = S.base
    half = Tf.invert(Tf.coerce(2))
    ginv2 = Tf.invert(Tf.scalar_mul(Tf.field.coerce(2), Tf.coerce(g)))
    eps = [
        (half, ginv2),
        (half, Tf.neg(ginv2)),
    ]

    def at_point(x, sgn):
        # evaluate an S-element at r = +g or r = -g
        val = x[0]
        shift = Tf.mul(Tf.coerce(g), x[1])
        return Tf.add(val, shift) if sgn > 0 else Tf.sub(val, shift)

    parts = []
    for sgn in (1, -1):
        if A.provenance[0] == "quaternion":
            a = at_point(A.provenance[1], sgn)
            b = at_point(A.provenance[2], sgn)
            if not Tf.is_unit(a) or not Tf.is_unit(b):
                raise NotUnit("summand slot degenerates")
            Apt = quaternion_algebra(Tf, a, b)
        else:
            rows = {}
            for i in range(A.dim):
                for j in range(A.dim):
                    rows[(i, j)] = tuple((k, at_point(c, sgn)) for k, c in A.sc(i, j))
            Apt = StructAlgebra(
                Tf, A.dim, rows=rows, one=tuple(at_point(c, sgn) for c in A.one),
                provenance=("generic",),
                assoc="full" if A.dim <= 16 else "spot",
            )
        parts.append(rank_one_idempotent(Apt, seed).coords)
    coords = []
    for i in range(A.dim):
        cp = tuple(Tf.mul(parts[0][i], e) for e in eps[0])
        cm = tuple(Tf.mul(parts[1][i], e) for e in eps[1])
        coords.append(S.add(cp, cm))
    return Idempotent(AlgElem(A, tuple(coords)))


def _min_poly_prime(A, zcoords, max_deg=None):
    """Monic minimal polynomial of z over the prime field, low to high."""
    if max_deg is None:
        max_deg = A.kdim
    K = A.base.field
    vecs = [A.to_kvec(A.one)]
    cur = zcoords
    for d in range(1, max_deg + 2):
        target = A.to_kvec(cur)
        M = [[vecs[c][r] for c in range(d)] for r in range(len(target))]
        sol = solve_right(M, target)
        if sol is not None:
            return [*(-c for c in sol), K.one]
        vecs.append(target)
        cur = A.mul_coords(cur, zcoords)
    raise SearchExhausted("minimal polynomial exceeded the dimension bound")


def _factor_prime(coeffs, field):
    """Irreducible factors with multiplicity of a monic polynomial."""
    from sympy import Poly, QQ, Rational, Symbol

    x = Symbol("x")
    if isinstance(field, Rationals):
        poly = Poly([Rational(str(c)) for c in reversed(coeffs)], x, domain=QQ)
    else:
        poly = Poly([int(c.v) for c in reversed(coeffs)], x, modulus=field.p)
    _, factors = poly.factor_list()
    return poly, factors


def _eval_poly(A, poly, field):
    """Evaluate a sympy Poly at... returns a closure taking z."""
    coeffs = poly.all_coeffs()

    def ev(zcoords):
        R = A.base
        acc = A.zero_coords()
        for c in coeffs:
            acc = A.mul_coords(acc, zcoords)
            cc = _scalar_from_sympy(c, field)
            acc = A.add_coords(acc, A.smul_coords(R.coerce(cc), A.one))
        return acc

    return ev


def _scalar_from_sympy(c, field):
    from gmpy2 import mpq

    if isinstance(field, Rationals):
        return mpq(str(c))
    return field.coerce(int(c))


def _rank_one_generic(A, seed) -> Idempotent:
    """Randomized minimal-polynomial splitting with corner recursion."""
    rng = random.Random(seed)
    field = A.base.field
    attempts = 0
    # basis elements first: explicit matrix patterns split immediately
    candidates = [A.basis_coords(i) for i in range(A.dim)]
    while attempts < _DRAWS:
        if candidates:
            z = candidates.pop(0)
        else:
            z = A.random_element(rng, height=8).coords
        attempts += 1
        e = _split_from_element(A, z, field)
        if e is None:
            continue
        d = _corner_dim(A, e)
        if d == 1:
            return Idempotent(AlgElem(A, e))
        C = corner(A, AlgElem(A, e))
        inner = rank_one_idempotent(C, seed=rng.randrange(1 << 30))
        return Idempotent(C.inclusion(inner.element))
    raise SearchExhausted(f"no splitting element in {_DRAWS} draws")


def _split_from_element(A, zcoords, field):
    """A nontrivial idempotent in the prime-field subalgebra K[z], or None."""
    coeffs = _min_poly_prime(A, zcoords)
    if len(coeffs) <= 2:
        return None
    poly, factors = _factor_prime(coeffs, field)
    if len(factors) < 2:
        return None
    for split in range(1, len(factors)):
        g = factors[0][0] ** factors[0][1]
        for f, m in factors[1:split]:
            g = g * f ** m
        h = poly.quo(g)
        s, t, d = g.gcdex(h)
        if not d.is_one:
            continue
        eproj = (t * h) % poly
        e = _eval_poly(A, eproj, field)(zcoords)
        if A.is_zero_coords(e) or e == A.one:
            continue
        if A.mul_coords(e, e) == e:
            return e
    return None


__all__ = ["hensel_lift_idempotent", "rank_one_idempotent"]
