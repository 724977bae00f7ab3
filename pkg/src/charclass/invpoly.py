"""Invariant polynomials C_k on gl_n(C), their polarizations, and the P/Q split.

C_k(A) is the coefficient of t^{n-k} in det(tI - A), i.e. (-1)^k times the
sum of the k x k principal minors.  Every function runs on either float
complex numpy matrices or exact matrices (nested lists of QC); the exact
path never touches floats.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .exact import QC, QC_ZERO, QC_ONE, det as qc_det


def _is_exact(a) -> bool:
    return isinstance(a, (list, tuple))


def mat_dim(a) -> int:
    return len(a) if _is_exact(a) else np.asarray(a).shape[-1]


def _zero_like(a):
    return QC_ZERO if _is_exact(a) else complex(0)


def _principal_minor(a, idx):
    if _is_exact(a):
        return qc_det([[a[i][j] for j in idx] for i in idx])
    sub = np.asarray(a, dtype=complex)[np.ix_(idx, idx)]
    return complex(np.linalg.det(sub))


def _add(a, b):
    if _is_exact(a):
        n = len(a)
        return [[a[i][j] + b[i][j] for j in range(n)] for i in range(n)]
    return np.asarray(a, dtype=complex) + np.asarray(b, dtype=complex)


def _conj_mat(a):
    if _is_exact(a):
        return [[x.conj() for x in row] for row in a]
    return np.conjugate(np.asarray(a, dtype=complex))


def chern_poly(n: int, k: int, a):
    """C_k(A) = (-1)^k tr wedge^k A, from the characteristic polynomial."""
    if not 0 <= k <= n:
        raise ValueError(f"k={k} outside 0..{n}")
    if mat_dim(a) != n:
        raise ValueError("matrix size does not match n")
    if k == 0:
        return QC_ONE if _is_exact(a) else complex(1)
    total = _zero_like(a)
    for idx in itertools.combinations(range(n), k):
        total = total + _principal_minor(a, idx)
    sign = 1 if k % 2 == 0 else -1
    return sign * total


def polarize(n: int, p: int, mats):
    """The symmetric p-linear form with mu(X,...,X) = C_p(X).

    Inclusion-exclusion polarization:
    mu(X_1..X_p) = (1/p!) sum_{0 != S <= {1..p}} (-1)^{p-|S|} C_p(sum_S X_i).
    Exact when given exact matrices.
    """
    mats = list(mats)
    if len(mats) != p:
        raise ValueError(f"polarize needs exactly p={p} arguments")
    exact = _is_exact(mats[0])
    total = QC_ZERO if exact else complex(0)
    for r in range(1, p + 1):
        sign = 1 if (p - r) % 2 == 0 else -1
        for subset in itertools.combinations(range(p), r):
            s = mats[subset[0]]
            for i in subset[1:]:
                s = _add(s, mats[i])
            total = total + sign * chern_poly(n, p, s)
    if exact:
        return total * QC(Fraction(1, math.factorial(p)))
    return total / math.factorial(p)


def pq_split(n: int, p: int, x):
    """(P_p(X), Q_p(X)): the halves of C_p under X -> (-1)^p C_p(conj X)."""
    cp = chern_poly(n, p, x)
    cpc = chern_poly(n, p, _conj_mat(x))
    sign = 1 if p % 2 == 0 else -1
    if _is_exact(x):
        half = QC(Fraction(1, 2))
        return half * (cp + sign * cpc), half * (cp - sign * cpc)
    return (cp + sign * cpc) / 2, (cp - sign * cpc) / 2


def qp_pair(n: int, p: int, x, y):
    """Complexified Q_p on pairs: (1/2)[C_p(X) - (-1)^p C_p(Y)]."""
    cx = chern_poly(n, p, x)
    cy = chern_poly(n, p, y)
    sign = 1 if p % 2 == 0 else -1
    if _is_exact(x):
        return QC(Fraction(1, 2)) * (cx - sign * cy)
    return (cx - sign * cy) / 2


@dataclass(frozen=True)
class InvariantPolynomial:
    """One of the conjugation-invariant polynomials C_p, P_p, Q_p on gl_n(C).

    P and Q are the even/odd halves of C_p under X -> (-1)^p C_p(conj X),
    so C_p = P_p + Q_p with P real-valued and Q imaginary-valued on
    Hermitian matrices.
    """

    n: int
    p: int
    kind: str = "C"

    def __post_init__(self):
        if self.kind not in ("C", "P", "Q"):
            raise ValueError(f"unknown kind {self.kind!r}")
        if not 1 <= self.p <= self.n:
            raise ValueError(f"p={self.p} outside 1..{self.n}")

    def value(self, x):
        if self.kind == "C":
            return chern_poly(self.n, self.p, x)
        pp, qq = pq_split(self.n, self.p, x)
        return pp if self.kind == "P" else qq

    def polarization(self, mats):
        """The symmetric p-linear form restoring this polynomial on the
        diagonal, via inclusion-exclusion."""
        mu = polarize(self.n, self.p, mats)
        if self.kind == "C":
            return mu
        muc = polarize(self.n, self.p, [_conj_mat(m) for m in mats])
        sign = 1 if self.p % 2 == 0 else -1
        if _is_exact(mats[0]):
            half = QC(Fraction(1, 2))
            return half * (mu + sign * muc) if self.kind == "P" \
                else half * (mu - sign * muc)
        return (mu + sign * muc) / 2 if self.kind == "P" \
            else (mu - sign * muc) / 2
