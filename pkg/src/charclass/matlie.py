"""Matrix and symmetric-space primitives for GL_n(C)/U(n).

The homogeneous space is modelled on the positive-definite cone.  The coset
of g is represented by the polar part (g g*)^{1/2}; tangent vectors at a
point Y are Hermitian matrices.  All functions accept batched arrays
(leading dimensions are broadcast), which the regulator quadrature relies
on heavily.
"""

from __future__ import annotations

import numpy as np

HERM_TOL = 1e-10


class DomainError(ValueError):
    """Input outside the mathematical domain of an operation."""


def as_matrix(a) -> np.ndarray:
    m = np.asarray(a, dtype=complex)
    if m.ndim < 2 or m.shape[-1] != m.shape[-2]:
        raise DomainError(f"expected square matrices, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise DomainError("matrix entries must be finite")
    return m


def conj_t(a: np.ndarray) -> np.ndarray:
    return np.conjugate(np.swapaxes(a, -1, -2))


def is_hermitian(a, tol: float = HERM_TOL) -> bool:
    a = as_matrix(a)
    return bool(np.max(np.abs(a - conj_t(a))) <= tol)


def cartan_split(x):
    """Split X into (skew-Hermitian, Hermitian) parts: X = k + p."""
    x = as_matrix(x)
    xh = conj_t(x)
    return (x - xh) / 2, (x + xh) / 2


def _herm_fn(y, fn, tol=HERM_TOL, require_pd=False, label=""):
    y = as_matrix(y)
    if not is_hermitian(y, tol):
        raise DomainError(f"{label}: argument is not Hermitian within {tol}")
    w, v = np.linalg.eigh(y)
    if require_pd and np.min(w) <= 0:
        raise DomainError(f"{label}: matrix is not positive definite "
                          f"(min eigenvalue {np.min(w):.3e})")
    fw = fn(w)
    return np.einsum("...ij,...j,...kj->...ik", v, fw, np.conjugate(v))


def pd_exp(h, tol: float = HERM_TOL) -> np.ndarray:
    """exp of a Hermitian matrix; lands in the positive-definite cone."""
    return _herm_fn(h, np.exp, tol, label="pd_exp")


def pd_log(y, tol: float = HERM_TOL) -> np.ndarray:
    """Principal log of a positive-definite matrix; Hermitian output."""
    return _herm_fn(y, np.log, tol, require_pd=True, label="pd_log")


def pd_sqrt(y, tol: float = HERM_TOL) -> np.ndarray:
    return _herm_fn(y, np.sqrt, tol, require_pd=True, label="pd_sqrt")


def pd_inv_sqrt(y, tol: float = HERM_TOL) -> np.ndarray:
    return _herm_fn(y, lambda w: 1.0 / np.sqrt(w), tol, require_pd=True,
                    label="pd_inv_sqrt")


def geodesic(a, b, t):
    """Affine-invariant geodesic A^{1/2} exp(t log(A^{-1/2} B A^{-1/2})) A^{1/2}.

    Endpoints are exact up to matrix-function round-off; the curve is
    equivariant under Y -> gYg*.  ``t`` may be a scalar or an array
    broadcasting against the batch shape of a and b.
    """
    a = as_matrix(a)
    b = as_matrix(b)
    t = np.asarray(t)
    rs = pd_sqrt(a)
    ris = pd_inv_sqrt(a)
    mid = pd_log(ris @ b @ ris)
    scaled = t[..., None, None] * mid if t.ndim else t * mid
    return rs @ pd_exp(scaled) @ rs


def to_base_point(g) -> np.ndarray:
    """Image of the coset gK: the polar part (g g*)^{1/2}."""
    g = as_matrix(g)
    det = np.linalg.det(g)
    if np.any(np.abs(det) < 1e-300):
        raise DomainError("to_base_point: singular matrix")
    return pd_sqrt(g @ conj_t(g))


def tangent_to_p(y, v, tol: float = HERM_TOL) -> np.ndarray:
    """Translate a Hermitian tangent vector at Y back to the base point."""
    v = as_matrix(v)
    if not is_hermitian(v, max(tol, 1e-6 * np.max(np.abs(v)) * 0 + tol)):
        raise DomainError("tangent_to_p: tangent vector is not Hermitian")
    ris = pd_inv_sqrt(y, tol)
    return ris @ v @ ris


def random_gl(n: int, rng: np.random.Generator, scale: float = 1.0) -> np.ndarray:
    """A random invertible complex matrix (a.s. invertible; retried if not)."""
    for _ in range(16):
        g = scale * (rng.standard_normal((n, n)) +
                     1j * rng.standard_normal((n, n)))
        if abs(np.linalg.det(g)) > 1e-8:
            return g
    raise RuntimeError("failed to draw an invertible matrix")


def random_hermitian(n: int, rng: np.random.Generator, scale: float = 1.0) -> np.ndarray:
    x = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return scale * (x + conj_t(x)) / 2


# ---------------------------------------------------------------------------
# JSON matrix encoding used library-wide:
# {"n": int, "entries": [[[re,im], ...], ...]} row-major.


def mat_to_json(m) -> dict:
    m = as_matrix(m)
    n = m.shape[-1]
    return {
        "n": int(n),
        "entries": [[[float(m[i, j].real), float(m[i, j].imag)]
                     for j in range(n)] for i in range(n)],
    }


def mat_from_json(obj) -> np.ndarray:
    n = int(obj["n"])
    entries = obj["entries"]
    m = np.empty((n, n), dtype=complex)
    for i in range(n):
        for j in range(n):
            re, im = entries[i][j]
            m[i, j] = complex(re, im)
    return m
