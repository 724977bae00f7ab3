"""The Weil algebra W(g), its K-basic subcomplex, and the transgression solver.

Elements live in the free graded-commutative algebra on odd generators
theta^a (degree 1) and even generators Omega^a (degree 2), one pair per
basis vector of a real Lie algebra given by exact structure constants.
The differential is the Cartan one:

    d theta^a = Omega^a - (1/2) c^a_{bc} theta^b theta^c
    d Omega^a = - c^a_{bc} theta^b Omega^c

Contraction uses the connection-element convention iota_xi theta^a =
theta^a(xi), iota_xi Omega^a = 0, so that "K-basic" is literally
"no k-direction thetas and infinitesimally K-invariant".

Everything here is exact (QC coefficients); the transgression residual
d T_p - Q_p is required to be identically zero.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .exact import (QC, QC_ZERO, QC_ONE, QC_I, nullspace, rref,
                    solve_min_norm, qc_to_pair, qc_from_pair)
from .invpoly import InvariantPolynomial


class TransgressionError(ValueError):
    """The right-hand side is not exact in the K-basic subcomplex."""


# ---------------------------------------------------------------------------
# Lie data


@dataclass
class LieData:
    """A real Lie algebra with a distinguished compact subalgebra.

    structure_constants[(b, c)] for b < c maps a -> Fraction coefficient of
    e_a in [e_b, e_c]; antisymmetry fills in the rest.  ``basis_mats`` (exact
    QC matrices) is optional and enables the invariant-polynomial embedding
    and the complexified restriction maps.
    """

    dim: int
    structure_constants: dict
    k_indices: frozenset
    basis_labels: list
    n: int = 0
    basis_mats: list = None  # exact QC matrices, optional
    _float_mats: np.ndarray = field(default=None, repr=False)
    _coord_dual: np.ndarray = field(default=None, repr=False)

    def bracket_coeffs(self, b: int, c: int) -> dict:
        if b == c:
            return {}
        if b < c:
            return self.structure_constants.get((b, c), {})
        return {a: -v for a, v in self.structure_constants.get((c, b), {}).items()}

    @property
    def p_indices(self):
        return [i for i in range(self.dim) if i not in self.k_indices]

    def validate(self):
        # Jacobi identity, exact, on all triples.
        for a, b, c in itertools.combinations(range(self.dim), 3):
            acc = {}
            for (x, y, z) in ((a, b, c), (b, c, a), (c, a, b)):
                for m, v in self.bracket_coeffs(y, z).items():
                    for r, w in self.bracket_coeffs(x, m).items():
                        acc[r] = acc.get(r, Fraction(0)) + v * w
            if any(acc.values()):
                raise ValueError(f"Jacobi identity fails on triple {(a, b, c)}")
        # k closed under bracket.
        for b, c in itertools.combinations(sorted(self.k_indices), 2):
            for a, v in self.bracket_coeffs(b, c).items():
                if v and a not in self.k_indices:
                    raise ValueError("k is not closed under the bracket")

    # -- float coordinates for the regulator -------------------------------

    def float_basis(self) -> np.ndarray:
        if self._float_mats is None:
            if self.basis_mats is None:
                raise ValueError("LieData has no matrix realization")
            self._float_mats = np.array(
                [[[complex(x) for x in row] for row in m]
                 for m in self.basis_mats])
        return self._float_mats

    def coords(self, v: np.ndarray) -> np.ndarray:
        """Real coordinates of matrices v (batched) in this basis."""
        if self._coord_dual is None:
            mats = self.float_basis()
            flat = np.concatenate(
                [mats.reshape(self.dim, -1).real, mats.reshape(self.dim, -1).imag],
                axis=1)
            self._coord_dual = np.linalg.pinv(flat)
        v = np.asarray(v, dtype=complex)
        batch = v.shape[:-2]
        vf = np.concatenate([v.reshape(*batch, -1).real,
                             v.reshape(*batch, -1).imag], axis=-1)
        return vf @ self._coord_dual


def _std_basis_mats(n: int):
    """Exact matrices of the adapted basis of gl_n(C) as a real algebra.

    k = u(n) first:  E_jk - E_kj,  i(E_jk + E_kj)  (j<k),  i E_jj;
    p = Hermitian:   E_jk + E_kj,  i(E_jk - E_kj)  (j<k),  E_jj.
    """
    def mat(entries):
        m = [[QC_ZERO for _ in range(n)] for _ in range(n)]
        for (i, j), v in entries.items():
            m[i][j] = v
        return m

    k_mats, k_labels, p_mats, p_labels = [], [], [], []
    for j in range(n):
        for k in range(j + 1, n):
            k_mats.append(mat({(j, k): QC_ONE, (k, j): QC(-1)}))
            k_labels.append(f"A{j}{k}")
            k_mats.append(mat({(j, k): QC_I, (k, j): QC_I}))
            k_labels.append(f"S{j}{k}")
            p_mats.append(mat({(j, k): QC_ONE, (k, j): QC_ONE}))
            p_labels.append(f"H{j}{k}")
            p_mats.append(mat({(j, k): QC_I, (k, j): QC(0, -1)}))
            p_labels.append(f"K{j}{k}")
    for j in range(n):
        k_mats.append(mat({(j, j): QC_I}))
        k_labels.append(f"D{j}")
        p_mats.append(mat({(j, j): QC_ONE}))
        p_labels.append(f"E{j}")
    return k_mats, k_labels, p_mats, p_labels


def _expand_real(basis_mats, mat) -> list:
    """Coordinates over R of a matrix in a real matrix basis, exact.

    Each complex entry contributes a real and an imaginary equation, so
    the coefficients come out real even though the basis matrices span
    only a real subspace (or a complex space seen as real)."""
    from .exact import solve
    dim = len(basis_mats)
    n = len(mat)
    rows, target = [], []
    for i in range(n):
        for j in range(n):
            rows.append([QC(basis_mats[a][i][j].re) for a in range(dim)])
            target.append(QC(mat[i][j].re))
            rows.append([QC(basis_mats[a][i][j].im) for a in range(dim)])
            target.append(QC(mat[i][j].im))
    return solve(rows, target)


def _exact_structure_constants(mats):
    """Structure constants of a list of exact matrices, exact."""
    dim = len(mats)
    n = len(mats[0])

    def expand(m):
        return _expand_real(mats, m)

    sc = {}
    for b in range(dim):
        for c in range(b + 1, dim):
            comm = [[QC_ZERO for _ in range(n)] for _ in range(n)]
            for i in range(n):
                for j in range(n):
                    s = QC_ZERO
                    for l in range(n):
                        s = s + mats[b][i][l] * mats[c][l][j]
                        s = s - mats[c][i][l] * mats[b][l][j]
                    comm[i][j] = s
            coeffs = expand(comm)
            entry = {}
            for a, v in enumerate(coeffs):
                if v:
                    if v.im != 0:
                        raise ValueError("structure constants must be real")
                    entry[a] = v.re
            if entry:
                sc[(b, c)] = entry
    return sc


def gl_nc_real(n: int) -> LieData:
    """gl_n(C) viewed as a real Lie algebra, with k = u(n)."""
    k_mats, k_labels, p_mats, p_labels = _std_basis_mats(n)
    mats = k_mats + p_mats
    labels = k_labels + p_labels
    L = LieData(dim=2 * n * n,
                structure_constants=_exact_structure_constants(mats),
                k_indices=frozenset(range(len(k_mats))),
                basis_labels=labels, n=n, basis_mats=mats)
    L.validate()
    return L


def u_n_lie(n: int) -> LieData:
    """u(n) with trivial distinguished subalgebra."""
    k_mats, k_labels, _, _ = _std_basis_mats(n)
    L = LieData(dim=n * n,
                structure_constants=_exact_structure_constants(k_mats),
                k_indices=frozenset(),
                basis_labels=k_labels, n=n, basis_mats=k_mats)
    L.validate()
    return L


# ---------------------------------------------------------------------------
# Weil elements


def _merge_theta(t1, t2):
    """Concatenate two sorted theta index tuples; (sign, sorted) or None."""
    if set(t1) & set(t2):
        return None
    inv = 0
    for x in t1:
        for y in t2:
            if x > y:
                inv += 1
    merged = tuple(sorted(t1 + t2))
    return (-1 if inv % 2 else 1), merged


class WeilElement:
    """An element of W(g): mapping (thetas, omegas) -> QC coefficient."""

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        self.terms = {}
        if terms:
            for key, coeff in terms.items():
                if coeff:
                    self.terms[key] = coeff

    @staticmethod
    def monomial(thetas=(), omegas=(), coeff=QC_ONE) -> "WeilElement":
        thetas = tuple(thetas)
        omegas = tuple(sorted(omegas))
        if len(set(thetas)) != len(thetas):
            return WeilElement()
        sign, sorted_t = _sort_sign(thetas)
        return WeilElement({(sorted_t, omegas): sign * QC.coerce(coeff)})

    def is_zero(self) -> bool:
        return not self.terms

    def degree(self):
        degs = {len(t) + 2 * len(o) for t, o in self.terms}
        return degs.pop() if len(degs) == 1 else None

    def __add__(self, other):
        out = dict(self.terms)
        for k, v in other.terms.items():
            s = out.get(k, QC_ZERO) + v
            if s:
                out[k] = s
            elif k in out:
                del out[k]
        return WeilElement(out)

    def __neg__(self):
        return WeilElement({k: -v for k, v in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c) -> "WeilElement":
        c = QC.coerce(c)
        if not c:
            return WeilElement()
        return WeilElement({k: c * v for k, v in self.terms.items()})

    def __mul__(self, other):
        out = {}
        for (t1, o1), v1 in self.terms.items():
            for (t2, o2), v2 in other.terms.items():
                m = _merge_theta(t1, t2)
                if m is None:
                    continue
                sign, tm = m
                key = (tm, tuple(sorted(o1 + o2)))
                c = out.get(key, QC_ZERO) + sign * v1 * v2
                if c:
                    out[key] = c
                elif key in out:
                    del out[key]
        return WeilElement(out)

    def __eq__(self, other):
        return isinstance(other, WeilElement) and self.terms == other.terms

    def __repr__(self):
        if not self.terms:
            return "WeilElement(0)"
        bits = []
        for (t, o), v in sorted(self.terms.items()):
            mono = "".join(f"t{i}" for i in t) + "".join(f"W{i}" for i in o)
            bits.append(f"{v!r}*{mono or '1'}")
        return " + ".join(bits)

    def theta_only(self) -> dict:
        """The Omega-free part: thetas tuple -> coefficient."""
        return {t: v for (t, o), v in self.terms.items() if not o}


def _sort_sign(thetas):
    lst = list(thetas)
    sign = 1
    for i in range(1, len(lst)):
        j = i
        while j > 0 and lst[j - 1] > lst[j]:
            lst[j - 1], lst[j] = lst[j], lst[j - 1]
            sign = -sign
            j -= 1
    return sign, tuple(lst)


def _d_theta(L: LieData, a: int) -> WeilElement:
    out = WeilElement.monomial((), (a,))
    for (b, c), entry in L.structure_constants.items():
        v = entry.get(a)
        if v:
            out = out + WeilElement.monomial((b, c), (), QC(-v))
    return out


def _d_omega(L: LieData, a: int) -> WeilElement:
    out = WeilElement()
    for b in range(L.dim):
        for c in range(L.dim):
            if b == c:
                continue
            v = L.bracket_coeffs(b, c).get(a)
            if v:
                out = out + WeilElement.monomial((b,), (c,), QC(-v))
    return out


def weil_d(w: WeilElement, L: LieData) -> WeilElement:
    """The Weil differential, a degree +1 graded derivation."""
    out = WeilElement()
    for (thetas, omegas), coeff in w.terms.items():
        for m, a in enumerate(thetas):
            rest_t = thetas[:m] + thetas[m + 1:]
            sign = -1 if m % 2 else 1
            piece = WeilElement.monomial(rest_t, omegas, sign * coeff)
            out = out + _d_theta(L, a) * piece
        # d Omega^a is odd; commuting it to the front past the theta prefix
        # exactly cancels the Koszul sign of the derivation, so no sign here.
        for m, a in enumerate(omegas):
            rest_o = omegas[:m] + omegas[m + 1:]
            piece = WeilElement.monomial(thetas, rest_o, coeff)
            out = out + _d_omega(L, a) * piece
    return out


def contract(w: WeilElement, xi: int, L: LieData = None) -> WeilElement:
    """Interior product iota_xi: kills theta^xi, annihilates every Omega."""
    if L is not None and not 0 <= xi < L.dim:
        raise IndexError(f"basis index {xi} out of range")
    out = WeilElement()
    for (thetas, omegas), coeff in w.terms.items():
        for m, a in enumerate(thetas):
            if a == xi:
                sign = -1 if m % 2 else 1
                out = out + WeilElement.monomial(
                    thetas[:m] + thetas[m + 1:], omegas, sign * coeff)
    return out


def coadjoint(w: WeilElement, xi: int, L: LieData) -> WeilElement:
    """Lie derivative L_xi = d iota_xi + iota_xi d (Cartan homotopy)."""
    return weil_d(contract(w, xi, L), L) + contract(weil_d(w, L), xi, L)


def random_element(L: LieData, max_degree: int, rng, n_terms: int = 6) -> WeilElement:
    """A random exact element with small integer coefficients (test aid)."""
    out = WeilElement()
    for _ in range(n_terms):
        deg = int(rng.integers(0, max_degree + 1))
        n_theta = int(rng.integers(0, min(deg, L.dim) + 1))
        if (deg - n_theta) % 2:
            n_theta = n_theta + 1 if n_theta + 1 <= min(deg, L.dim) else n_theta - 1
        if n_theta < 0 or (deg - n_theta) % 2:
            continue
        n_omega = (deg - n_theta) // 2
        thetas = tuple(sorted(rng.choice(L.dim, size=n_theta, replace=False))) \
            if n_theta else ()
        omegas = tuple(sorted(int(rng.integers(0, L.dim)) for _ in range(n_omega)))
        c = QC(int(rng.integers(-3, 4)), int(rng.integers(-3, 4)))
        out = out + WeilElement.monomial(thetas, omegas, c)
    return out


# ---------------------------------------------------------------------------
# K-basic subcomplex


def _horizontal_monomials(L: LieData, degree: int):
    """Monomial keys of the given degree with thetas only in p-directions."""
    p_idx = L.p_indices
    keys = []
    for n_theta in range(min(degree, len(p_idx)) + 1):
        if (degree - n_theta) % 2:
            continue
        n_omega = (degree - n_theta) // 2
        for thetas in itertools.combinations(p_idx, n_theta):
            for omegas in itertools.combinations_with_replacement(
                    range(L.dim), n_omega):
                keys.append((thetas, omegas))
    return keys


def basic_basis(L: LieData, degree: int):
    """An exact basis of the K-basic subspace in the given degree."""
    if degree < 0:
        return []
    keys = _horizontal_monomials(L, degree)
    index = {k: i for i, k in enumerate(keys)}
    if not keys:
        return []
    rows = []
    for xi in sorted(L.k_indices):
        outputs = [coadjoint(WeilElement({k: QC_ONE}), xi, L) for k in keys]
        out_keys = sorted({kk for o in outputs for kk in o.terms})
        for kk in out_keys:
            if kk not in index and any(o.terms.get(kk) for o in outputs):
                # k acts within the horizontal subspace for reductive pairs;
                # anything else indicates corrupted structure constants.
                raise ValueError("coadjoint action left the horizontal subspace")
        for kk in out_keys:
            rows.append([o.terms.get(kk, QC_ZERO) for o in outputs])
    if not rows:
        vecs = [[QC_ONE if i == j else QC_ZERO for i in range(len(keys))]
                for j in range(len(keys))]
    else:
        vecs = nullspace(rows)
    return [WeilElement({keys[i]: v[i] for i in range(len(keys)) if v[i]})
            for v in vecs]


def is_basic(w: WeilElement, L: LieData) -> bool:
    for xi in sorted(L.k_indices):
        if not contract(w, xi, L).is_zero():
            return False
        if not coadjoint(w, xi, L).is_zero():
            return False
    return True


def embed_invariant(L: LieData, phi: InvariantPolynomial) -> WeilElement:
    """The theta-free Weil element realizing an invariant polynomial.

    For Phi of degree p returns sum over index tuples of
    mu_Phi(e_{a_1},...,e_{a_p}) Omega^{a_1}...Omega^{a_p}, so the Chern-Weil
    map sends it to Phi(curvature).
    """
    if L.basis_mats is None:
        raise ValueError("LieData has no matrix realization")
    p = phi.p
    out = {}
    for omegas in itertools.combinations_with_replacement(range(L.dim), p):
        mats = [L.basis_mats[a] for a in omegas]
        mu = phi.polarization(mats)
        if not mu:
            continue
        counts = {}
        for a in omegas:
            counts[a] = counts.get(a, 0) + 1
        mult = math.factorial(p)
        for c in counts.values():
            mult //= math.factorial(c)
        out[((), omegas)] = QC.coerce(mult) * mu
    return WeilElement(out)


# ---------------------------------------------------------------------------
# Transgression


@dataclass
class TransgressionForm:
    """A solution T of dT = Q in the K-basic subcomplex."""

    n: int
    p: int
    lie: LieData
    element: WeilElement
    lattice: str = ""

    def __post_init__(self):
        if not self.lattice:
            self.lattice = empirical_lattice(self.element)

    def theta_part(self) -> dict:
        """The Omega-free component: an alternating form on g/k."""
        return self.element.theta_only()

    def to_json(self) -> list:
        return [
            {"theta_indices": list(t), "omega_indices": list(o),
             "coeff": qc_to_pair(v)}
            for (t, o), v in sorted(self.element.terms.items())
        ]

    @staticmethod
    def element_from_json(data) -> WeilElement:
        terms = {}
        for item in data:
            key = (tuple(item["theta_indices"]), tuple(item["omega_indices"]))
            terms[key] = qc_from_pair(item["coeff"])
        return WeilElement(terms)


def empirical_lattice(w: WeilElement) -> str:
    """Classify the coefficient lattice of an element: R, iR, mixed, zero."""
    if w.is_zero():
        return "zero"
    has_re = any(v.re for v in w.terms.values())
    has_im = any(v.im for v in w.terms.values())
    if has_re and has_im:
        return "mixed"
    return "R" if has_re else "iR"


def transgress(L: LieData, p: int, Q: WeilElement, n: int = 0) -> TransgressionForm:
    """Solve dT = Q exactly within the K-basic subcomplex.

    Q must be K-basic, closed, of degree 2p, with zero image in I(K).
    The minimum-coordinate-norm solution is returned; the residual
    dT - Q is verified to be identically zero.
    """
    if not Q.is_zero():
        if Q.degree() != 2 * p:
            raise TransgressionError(f"Q has degree {Q.degree()}, wanted {2 * p}")
        if not is_basic(Q, L):
            raise TransgressionError("Q is not K-basic")
        if not weil_d(Q, L).is_zero():
            raise TransgressionError("Q is not closed")
        for (thetas, omegas), v in Q.terms.items():
            if not thetas and all(a in L.k_indices for a in omegas):
                raise TransgressionError("Q has nonzero image in I(K)")

    basis = basic_basis(L, 2 * p - 1)
    target_keys = _horizontal_monomials(L, 2 * p)
    index = {k: i for i, k in enumerate(target_keys)}
    cols = [weil_d(b, L) for b in basis]
    mat = [[c.terms.get(k, QC_ZERO) for c in cols] for k in target_keys]
    rhs = [Q.terms.get(k, QC_ZERO) for k in target_keys]
    for k in Q.terms:
        if k not in index:
            raise TransgressionError("Q is not horizontal")
    try:
        x = solve_min_norm(mat, rhs)
    except ValueError as exc:
        raise TransgressionError(
            "dT = Q is not exact in the basic subcomplex") from exc
    T = WeilElement()
    for xi, b in zip(x, basis):
        if xi:
            T = T + b.scale(xi)
    assert (weil_d(T, L) - Q).is_zero(), "exact residual must vanish"
    return TransgressionForm(n=n or L.n, p=p, lie=L, element=T)


def closed_basic_elements(L: LieData, degree: int):
    """Basis of the closed K-basic elements in the given degree."""
    basis = basic_basis(L, degree)
    if not basis:
        return []
    images = [weil_d(b, L) for b in basis]
    keys = sorted({k for im in images for k in im.terms})
    if not keys:
        return basis
    mat = [[im.terms.get(k, QC_ZERO) for im in images] for k in keys]
    combos = nullspace(mat)
    out = []
    for v in combos:
        w = WeilElement()
        for c, b in zip(v, basis):
            if c:
                w = w + b.scale(c)
        out.append(w)
    return out


def transgress_qp(n: int, p: int):
    """Convenience: T_p with dT_p = Q_p for (gl_n(C), U(n))."""
    L = gl_nc_real(n)
    Q = embed_invariant(L, InvariantPolynomial(n=n, p=p, kind="Q"))
    return transgress(L, p, Q, n=n), L, Q


# ---------------------------------------------------------------------------
# Restriction to the complex Weil algebra of u(n)


def _exact_expand(L: LieData, mat) -> list:
    """Exact real coordinates of a QC matrix in L's matrix basis.

    The basis is a basis over R only, so the system is solved over the
    reals: each complex entry contributes two equations.
    """
    return _expand_real(L.basis_mats, mat)


def un_substitution(gl: LieData, un: LieData):
    """The generator substitution matrix of the first-factor restriction.

    A basis vector f_b of u(n) corresponds, inside the complexification of
    gl_n(C) as a real algebra, to (f_b/2) x 1 + (-i f_b/2) x i; evaluating
    the complex-linear extension of theta^a gives the matrix
    S[a][b] = (B_{ab} + i C_{ab})/2 with B, C the real-basis coordinates of
    f_b and -i f_b.
    """
    half = QC(Fraction(1, 2))
    S = [[QC_ZERO for _ in range(un.dim)] for _ in range(gl.dim)]
    for b in range(un.dim):
        f = un.basis_mats[b]
        minus_i_f = [[QC(0, -1) * x for x in row] for row in f]
        B = _exact_expand(gl, f)
        C = _exact_expand(gl, minus_i_f)
        for a in range(gl.dim):
            S[a][b] = half * (B[a] + QC_I * C[a])
    return S


def restrict_to_un(T: WeilElement, gl: LieData, un: LieData) -> WeilElement:
    """Image of T under the complexified substitution onto W_C(u_n)."""
    S = un_substitution(gl, un)

    def gen_theta(a):
        return WeilElement({((b,), ()): S[a][b] for b in range(un.dim)
                            if S[a][b]})

    def gen_omega(a):
        return WeilElement({((), (b,)): S[a][b] for b in range(un.dim)
                            if S[a][b]})

    out = WeilElement()
    for (thetas, omegas), coeff in T.terms.items():
        acc = WeilElement.monomial((), (), coeff)
        for a in thetas:
            acc = acc * gen_theta(a)
        for a in omegas:
            acc = acc * gen_omega(a)
        out = out + acc
    return out
