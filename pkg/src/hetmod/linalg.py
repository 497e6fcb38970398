"""Exact linear algebra over the Gaussian rationals.

Two engines:

* ``rref`` / ``kernel_basis`` / ``solve``: plain Gaussian elimination on
  GaussRat entries (Fraction-backed, exact), used wherever an explicit basis
  is needed.
* ``rank``: fraction-free Bareiss elimination on Gaussian integers after
  clearing denominators.  This is the hot path for the principal-symbol scan,
  where hundreds of small matrices get rank-checked.
"""

from __future__ import annotations

from fractions import Fraction
from typing import List, Sequence, Tuple

from .scalars import GR_ONE, GR_ZERO, GaussRat

Matrix = List[List[GaussRat]]


def zeros(rows: int, cols: int) -> Matrix:
    return [[GR_ZERO for _ in range(cols)] for _ in range(rows)]


def identity(k: int) -> Matrix:
    m = zeros(k, k)
    for i in range(k):
        m[i][i] = GR_ONE
    return m


def mat_mul(a: Matrix, b: Matrix) -> Matrix:
    rows, mid, cols = len(a), len(b), len(b[0]) if b else 0
    out = zeros(rows, cols)
    for i in range(rows):
        ai = a[i]
        for k in range(mid):
            c = ai[k]
            if not c:
                continue
            bk = b[k]
            oi = out[i]
            for j in range(cols):
                if bk[j]:
                    oi[j] = oi[j] + c * bk[j]
    return out


def mat_vec(a: Matrix, v: Sequence[GaussRat]) -> List[GaussRat]:
    return [sum((row[j] * v[j] for j in range(len(v)) if v[j]),
                start=GR_ZERO) for row in a]


def conj_transpose(a: Matrix) -> Matrix:
    if not a:
        return []
    return [[a[i][j].conjugate() for i in range(len(a))]
            for j in range(len(a[0]))]


def transpose(a: Matrix) -> Matrix:
    if not a:
        return []
    return [[a[i][j] for i in range(len(a))] for j in range(len(a[0]))]


def rref(a: Matrix) -> Tuple[Matrix, List[int]]:
    """Reduced row echelon form (copy) and the list of pivot columns."""
    m = [row[:] for row in a]
    rows = len(m)
    cols = len(m[0]) if rows else 0
    pivots: List[int] = []
    r = 0
    for c in range(cols):
        pr = next((i for i in range(r, rows) if m[i][c]), None)
        if pr is None:
            continue
        m[r], m[pr] = m[pr], m[r]
        inv = m[r][c]
        m[r] = [x / inv for x in m[r]]
        for i in range(rows):
            if i != r and m[i][c]:
                f = m[i][c]
                m[i] = [x - f * y for x, y in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    return m, pivots


def kernel_basis(a: Matrix, cols: int = None) -> List[List[GaussRat]]:
    """Basis of the right null space, one vector per free column."""
    if cols is None:
        cols = len(a[0]) if a else 0
    if not a:
        return [[GR_ONE if i == j else GR_ZERO for i in range(cols)]
                for j in range(cols)]
    red, pivots = rref(a)
    pivot_set = set(pivots)
    free = [c for c in range(cols) if c not in pivot_set]
    basis = []
    for fc in free:
        v = [GR_ZERO] * cols
        v[fc] = GR_ONE
        for r, pc in enumerate(pivots):
            v[pc] = -red[r][fc]
        basis.append(v)
    return basis


def inverse(a: Matrix) -> Matrix:
    k = len(a)
    aug = [row[:] + identity(k)[i] for i, row in enumerate(a)]
    red, pivots = rref(aug)
    if pivots != list(range(k)):
        raise ValueError("matrix is singular")
    return [row[k:] for row in red]


def solve(a: Matrix, b: Sequence[GaussRat]):
    """One solution of a x = b, or None if inconsistent."""
    cols = len(a[0]) if a else 0
    aug = [row[:] + [b[i]] for i, row in enumerate(a)]
    red, pivots = rref(aug)
    if cols in pivots:
        return None
    x = [GR_ZERO] * cols
    for r, pc in enumerate(pivots):
        x[pc] = red[r][cols]
    return x


def _to_gauss_int(a: Matrix):
    """Scale a GaussRat matrix to Gaussian integers, as (re, im) int pairs."""
    denom = 1
    for row in a:
        for x in row:
            for f in (x.re, x.im):
                d = f.denominator
                g = _gcd(denom, d)
                denom = denom // g * d
    out = []
    for row in a:
        out.append([
            (int(x.re * denom), int(x.im * denom)) for x in row
        ])
    return out


def _gcd(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return a


def rank(a: Matrix) -> int:
    """Rank via fraction-free Bareiss elimination over Gaussian integers."""
    if not a or not a[0]:
        return 0
    m = _to_gauss_int(a)
    rows, cols = len(m), len(m[0])
    rk = 0
    prev_re, prev_im = 1, 0  # previous pivot (starts at 1)
    r = 0
    for c in range(cols):
        pr = next((i for i in range(r, rows) if m[i][c] != (0, 0)), None)
        if pr is None:
            continue
        m[r], m[pr] = m[pr], m[r]
        pre, pim = m[r][c]
        # Bareiss step: new = (pivot*old - rowval*pivcolval) / prev_pivot
        pn = prev_re * prev_re + prev_im * prev_im
        for i in range(r + 1, rows):
            fre, fim = m[i][c]
            mi = m[i]
            mr = m[r]
            for j in range(c, cols):
                xre, xim = mi[j]
                yre, yim = mr[j]
                nre = pre * xre - pim * xim - (fre * yre - fim * yim)
                nim = pre * xim + pim * xre - (fre * yim + fim * yre)
                # exact division by previous pivot (conjugate trick)
                dre = (nre * prev_re + nim * prev_im) // pn
                dim = (nim * prev_re - nre * prev_im) // pn
                mi[j] = (dre, dim)
        prev_re, prev_im = pre, pim
        rk += 1
        r += 1
        if r == rows:
            break
    return rk
