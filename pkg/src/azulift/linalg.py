"""Exact linear algebra over the coefficient fields.

Matrices are lists of lists of field scalars (mpq or ModP); all arithmetic
goes through the scalar operators so the same code serves both fields.
Determinant nonzero-ness over the rationals is certified mod a few fixed
~2^25 primes first (a nonzero residue proves a nonzero determinant) with an
exact integer Bareiss fallback, so no answer ever depends on a probabilistic
step alone.
"""

from __future__ import annotations

import math

from gmpy2 import mpq, mpz

import numpy as np

# fixed certification primes just above 2^25 so int64 products cannot overflow
_CERT_PRIMES = (33554467, 33554473, 33554477)


def row_echelon(rows):
    """Reduce a copy of ``rows`` in place; return (echelon, pivots).

    pivots is a list of (row_index, col_index) in elimination order.
    Rows are lists of field scalars; zero test is scalar truthiness.
    """
    m = [list(r) for r in rows]
    nrows = len(m)
    ncols = len(m[0]) if nrows else 0
    pivots = []
    r = 0
    for c in range(ncols):
        pr = None
        for i in range(r, nrows):
            if m[i][c]:
                pr = i
                break
        if pr is None:
            continue
        m[r], m[pr] = m[pr], m[r]
        piv = m[r][c]
        inv = 1 / piv
        m[r] = [x * inv for x in m[r]]
        for i in range(nrows):
            if i != r and m[i][c]:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append((r, c))
        r += 1
        if r == nrows:
            break
    return m, pivots


def rank(rows) -> int:
    if not rows:
        return 0
    _, pivots = row_echelon(rows)
    return len(pivots)


def solve_right(A, b):
    """Solve A x = b exactly; return x or None if inconsistent.

    A is m x n, b a length-m vector. When the solution is not unique the
    free variables are set to zero, so the answer is deterministic.
    """
    m = len(A)
    n = len(A[0]) if m else 0
    aug = [list(A[i]) + [b[i]] for i in range(m)]
    ech, pivots = row_echelon(aug)
    piv_cols = [c for _, c in pivots]
    if n in piv_cols:
        return None
    zero = A[0][0] - A[0][0] if m else 0
    x = [zero] * n
    for r, c in pivots:
        x[c] = ech[r][n]
    return x


def nullspace(A, n=None):
    """Basis of the right kernel of A (m x n); deterministic ordering."""
    m = len(A)
    if n is None:
        n = len(A[0]) if m else 0
    if m == 0:
        raise ValueError("nullspace needs the column count for an empty system")
    ech, pivots = row_echelon(A)
    piv_cols = {c: r for r, c in pivots}
    one = None
    for row in A:
        for x in row:
            one = x / x if x else None
            if one is not None:
                break
        if one is not None:
            break
    if one is None:
        # zero matrix: kernel is everything; caller supplies scalars via A
        raise ValueError("cannot infer scalar one from a zero matrix")
    zero = one - one
    basis = []
    for c in range(n):
        if c in piv_cols:
            continue
        v = [zero] * n
        v[c] = one
        for pc, pr in piv_cols.items():
            v[pc] = -ech[pr][c]
        basis.append(v)
    return basis


class SpanTracker:
    """Incremental echelon span: feed vectors, learn which are independent."""

    def __init__(self):
        self.pivrows = {}  # pivot column -> reduced row

    def reduce(self, vec):
        v = list(vec)
        for c in sorted(self.pivrows):
            if c < len(v) and v[c]:
                f = v[c]
                row = self.pivrows[c]
                v = [a - f * b for a, b in zip(v, row)]
        return v

    def add(self, vec) -> bool:
        """Add vec to the span; True if it was independent of the span."""
        v = self.reduce(vec)
        for c, x in enumerate(v):
            if x:
                inv = 1 / x
                self.pivrows[c] = [a * inv for a in v]
                return True
        return False

    @property
    def dim(self) -> int:
        return len(self.pivrows)


def bareiss_det(M) -> mpz:
    """Exact determinant of a square integer (mpz) matrix, fraction-free."""
    a = [[mpz(x) for x in row] for row in M]
    n = len(a)
    sign = 1
    prev = mpz(1)
    for k in range(n - 1):
        if not a[k][k]:
            sw = None
            for i in range(k + 1, n):
                if a[i][k]:
                    sw = i
                    break
            if sw is None:
                return mpz(0)
            a[k], a[sw] = a[sw], a[k]
            sign = -sign
        akk = a[k][k]
        for i in range(k + 1, n):
            aik = a[i][k]
            ri = a[i]
            rk = a[k]
            for j in range(k + 1, n):
                ri[j] = (akk * ri[j] - aik * rk[j]) // prev
            ri[k] = mpz(0)
        prev = akk
    return sign * a[n - 1][n - 1]


def _to_int_matrix(A):
    """Clear denominators row by row; determinant zero-ness is preserved."""
    out = []
    for row in A:
        l = mpz(1)
        for x in row:
            l = l * x.denominator // math.gcd(int(l), int(x.denominator))
        out.append([mpz(x.numerator) * (l // x.denominator) for x in row])
    return out


def _det_nonzero_mod_p(intM, p) -> bool:
    n = len(intM)
    a = np.array([[int(x) % p for x in row] for row in intM], dtype=np.int64)
    for c in range(n):
        pr = None
        for i in range(c, n):
            if a[i, c] % p:
                pr = i
                break
        if pr is None:
            return False
        if pr != c:
            a[[c, pr]] = a[[pr, c]]
        inv = pow(int(a[c, c]), -1, p)
        a[c] = (a[c] * inv) % p
        if c + 1 < n:
            f = a[c + 1 :, c].copy()
            a[c + 1 :] = (a[c + 1 :] - np.outer(f, a[c])) % p
    return True


def det_is_nonzero(A) -> bool:
    """Exact nonzero test for the determinant of a square scalar matrix.

    Over Q: certify nonzero mod fixed primes (sound), exact Bareiss only if
    every certification prime says zero. Over F_p: plain elimination.
    """
    n = len(A)
    if n == 0:
        return True
    x00 = A[0][0]
    if isinstance(x00, (mpq, int, mpz)):
        intM = _to_int_matrix([[mpq(x) for x in row] for row in A])
        for p in _CERT_PRIMES:
            if _det_nonzero_mod_p(intM, p):
                return True
        return bareiss_det(intM) != 0
    # prime field scalars: eliminate directly
    _, pivots = row_echelon(A)
    return len(pivots) == n


def solve_f2(rows, rhs):
    """Solve a linear system over F_2 given as bitmask rows.

    rows: list of int bitmasks (bit j = coefficient of variable j),
    rhs: list of 0/1. Returns (solution_mask, nullspace_masks) or None when
    inconsistent. Free variables are zero in the particular solution.
    """
    aug = [(rows[i] << 1) | (rhs[i] & 1) for i in range(len(rows))]
    nvars = max((r.bit_length() for r in rows), default=0)
    piv = {}  # var -> row value
    for r in aug:
        for v in sorted(piv, reverse=True):
            if (r >> (v + 1)) & 1:
                r ^= piv[v]
        top = r >> 1
        if top == 0:
            if r & 1:
                return None
            continue
        v = top.bit_length() - 1
        piv[v] = r
        # back-substitute into existing rows to keep them reduced
        for w in list(piv):
            if w != v and (piv[w] >> (v + 1)) & 1:
                piv[w] ^= r
    sol = 0
    for v, r in piv.items():
        if r & 1:
            sol |= 1 << v
    null = []
    for v in range(nvars):
        if v in piv:
            continue
        mask = 1 << v
        for w, r in piv.items():
            if (r >> (v + 1)) & 1:
                mask |= 1 << w
        null.append(mask)
    return sol, null
