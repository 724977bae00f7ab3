"""Exact Gaussian-rational scalars and exact linear algebra.

All symbolic modules (Weil algebra, simplicial forms, filtration calculus)
compute over QC, a complex number with ``fractions.Fraction`` real and
imaginary parts.  Residuals asserted to be *identically zero* elsewhere in
the library rely on this module never touching floats.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Sequence, Union

Rational = Union[int, Fraction]


class QC:
    """A complex number with exact rational real and imaginary parts."""

    __slots__ = ("re", "im")

    def __init__(self, re: Rational = 0, im: Rational = 0):
        self.re = Fraction(re)
        self.im = Fraction(im)

    @staticmethod
    def coerce(x) -> "QC":
        if isinstance(x, QC):
            return x
        if isinstance(x, (int, Fraction)):
            return QC(x)
        if isinstance(x, complex):
            raise TypeError("refusing to coerce float complex into exact QC")
        raise TypeError(f"cannot coerce {type(x).__name__} to QC")

    def __add__(self, other):
        other = QC.coerce(other)
        return QC(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __neg__(self):
        return QC(-self.re, -self.im)

    def __sub__(self, other):
        return self + (-QC.coerce(other))

    def __rsub__(self, other):
        return QC.coerce(other) + (-self)

    def __mul__(self, other):
        other = QC.coerce(other)
        return QC(
            self.re * other.re - self.im * other.im,
            self.re * other.im + self.im * other.re,
        )

    __rmul__ = __mul__

    def inverse(self) -> "QC":
        n = self.re * self.re + self.im * self.im
        if n == 0:
            raise ZeroDivisionError("division by zero QC")
        return QC(self.re / n, -self.im / n)

    def __truediv__(self, other):
        return self * QC.coerce(other).inverse()

    def __rtruediv__(self, other):
        return QC.coerce(other) * self.inverse()

    def conj(self) -> "QC":
        return QC(self.re, -self.im)

    def __eq__(self, other):
        try:
            other = QC.coerce(other)
        except TypeError:
            return NotImplemented
        return self.re == other.re and self.im == other.im

    def __hash__(self):
        return hash((self.re, self.im))

    def __bool__(self):
        return self.re != 0 or self.im != 0

    def __repr__(self):
        if self.im == 0:
            return f"QC({self.re})"
        return f"QC({self.re}, {self.im})"

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def norm2(self) -> Fraction:
        """Squared modulus, exact."""
        return self.re * self.re + self.im * self.im


QC_ZERO = QC(0)
QC_ONE = QC(1)
QC_I = QC(0, 1)


def qc_pow_i(k: int) -> QC:
    """i**k, exact."""
    return (QC_ONE, QC_I, QC(-1), QC(0, -1))[k % 4]


# ---------------------------------------------------------------------------
# Exact dense linear algebra over QC.  Matrices are lists of lists of QC.


def zeros(rows: int, cols: int):
    return [[QC_ZERO for _ in range(cols)] for _ in range(rows)]


def mat_mul(a, b):
    rows, inner, cols = len(a), len(b), len(b[0])
    out = zeros(rows, cols)
    for i in range(rows):
        ai = a[i]
        for k in range(inner):
            x = ai[k]
            if not x:
                continue
            bk = b[k]
            oi = out[i]
            for j in range(cols):
                if bk[j]:
                    oi[j] = oi[j] + x * bk[j]
    return out


def mat_vec(a, v):
    return [sum((a[i][j] * v[j] for j in range(len(v)) if v[j]), QC_ZERO)
            for i in range(len(a))]


def conj_transpose(a):
    rows, cols = len(a), len(a[0])
    return [[a[i][j].conj() for i in range(rows)] for j in range(cols)]


def rref(mat, rhs=None):
    """Reduced row echelon form by exact Gauss-Jordan elimination.

    Returns (rref_matrix, rref_rhs, pivot_columns).  ``rhs`` may be a list
    of column vectors (a matrix) carried along, or None.
    """
    m = [row[:] for row in mat]
    r = [row[:] for row in rhs] if rhs is not None else None
    rows = len(m)
    cols = len(m[0]) if rows else 0
    pivots = []
    pr = 0
    for pc in range(cols):
        pivot_row = None
        for i in range(pr, rows):
            if m[i][pc]:
                pivot_row = i
                break
        if pivot_row is None:
            continue
        m[pr], m[pivot_row] = m[pivot_row], m[pr]
        if r is not None:
            r[pr], r[pivot_row] = r[pivot_row], r[pr]
        inv = m[pr][pc].inverse()
        m[pr] = [x * inv for x in m[pr]]
        if r is not None:
            r[pr] = [x * inv for x in r[pr]]
        for i in range(rows):
            if i != pr and m[i][pc]:
                f = m[i][pc]
                m[i] = [a - f * b for a, b in zip(m[i], m[pr])]
                if r is not None:
                    r[i] = [a - f * b for a, b in zip(r[i], r[pr])]
        pivots.append(pc)
        pr += 1
        if pr == rows:
            break
    return m, r, pivots


def nullspace(mat):
    """Basis (list of column vectors) of the exact right null space."""
    rows = len(mat)
    cols = len(mat[0]) if rows else 0
    if rows == 0:
        return [[QC_ONE if i == j else QC_ZERO for i in range(cols)]
                for j in range(cols)]
    m, _, pivots = rref(mat)
    free = [j for j in range(cols) if j not in pivots]
    basis = []
    for f in free:
        v = [QC_ZERO] * cols
        v[f] = QC_ONE
        for r_i, p in enumerate(pivots):
            v[p] = -m[r_i][f]
        basis.append(v)
    return basis


def solve(mat, b):
    """One exact solution x of mat @ x = b (free variables set to zero).

    Raises ValueError when the system is inconsistent.
    """
    rows = len(mat)
    cols = len(mat[0]) if rows else 0
    m, r, pivots = rref(mat, [[x] for x in b])
    rank = len(pivots)
    for i in range(rank, rows):
        if r[i][0]:
            raise ValueError("inconsistent linear system")
    x = [QC_ZERO] * cols
    for r_i, p in enumerate(pivots):
        x[p] = r[r_i][0]
    return x


def solve_min_norm(mat, b):
    """The minimum-coordinate-norm exact solution of mat @ x = b.

    Among x0 + ker(mat), minimizes sum |x_j|^2 by the exact normal-equation
    projection onto the kernel.
    """
    x0 = solve(mat, b)
    kernel = nullspace(mat)
    if not kernel:
        return x0
    # columns of N are the kernel basis
    n_cols = len(kernel)
    dim = len(x0)
    gram = [[sum((kernel[a][i].conj() * kernel[c][i] for i in range(dim)),
                 QC_ZERO) for c in range(n_cols)] for a in range(n_cols)]
    rhs = [sum((kernel[a][i].conj() * x0[i] for i in range(dim)), QC_ZERO)
           for a in range(n_cols)]
    z = solve(gram, rhs)
    return [x0[i] - sum((z[a] * kernel[a][i] for a in range(n_cols)), QC_ZERO)
            for i in range(dim)]


def det(mat) -> QC:
    """Exact determinant by fraction-free-ish Gaussian elimination."""
    n = len(mat)
    m = [row[:] for row in mat]
    sign = QC_ONE
    result = QC_ONE
    for c in range(n):
        pivot = None
        for r in range(c, n):
            if m[r][c]:
                pivot = r
                break
        if pivot is None:
            return QC_ZERO
        if pivot != c:
            m[c], m[pivot] = m[pivot], m[c]
            sign = -sign
        result = result * m[c][c]
        inv = m[c][c].inverse()
        for r in range(c + 1, n):
            if m[r][c]:
                f = m[r][c] * inv
                m[r] = [a - f * b for a, b in zip(m[r], m[c])]
    return sign * result


def qc_from_pair(pair) -> QC:
    """Decode [[num,den],[num,den]] or [re, im] rational pairs."""
    re, im = pair
    def dec(x):
        if isinstance(x, (list, tuple)):
            return Fraction(int(x[0]), int(x[1]))
        return Fraction(x)
    return QC(dec(re), dec(im))


def qc_to_pair(x: QC):
    return [[x.re.numerator, x.re.denominator],
            [x.im.numerator, x.im.denominator]]
