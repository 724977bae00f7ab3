"""Chern-Weil calculus on simplicial bundles given by local connection data.

Connections are gl_n-valued compatible 1-forms on an SSet; curvature,
Chern forms C_k(Theta), the comparison form eta_p with
d eta_p = c_p(nabla_1) - c_p(nabla_0), character representatives
(top form, cochain) and their behaviour under connection change all live
here.  Determinants of form-valued matrices are expanded row-ordered, so
mixed even/odd entries have a fixed sign convention.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .exact import QC, QC_ZERO, QC_ONE, qc_to_pair
from .simforms import (Cochain, MonoForm, PolyForm, SSet, face_pullback,
                       random_compatible_form, vertex_interpolation)

TWO_PI_I = 2j * np.pi


# ---------------------------------------------------------------------------
# Matrix-valued forms (lists of lists of MonoForm on a fixed patch)


def mat_zero(n: int, nvars: int):
    return [[MonoForm(nvars) for _ in range(n)] for _ in range(n)]


def mat_add(a, b):
    return [[x + y for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


def mat_sub(a, b):
    return [[x - y for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


def mat_scale(a, c):
    return [[x.scale(c) for x in row] for row in a]


def mat_d(a, active=None):
    return [[x.d(active) for x in row] for row in a]


def mat_wedge(a, b):
    n = len(a)
    out = mat_zero(n, a[0][0].nvars)
    for i in range(n):
        for j in range(n):
            acc = out[i][j]
            for k in range(n):
                if a[i][k].is_zero() or b[k][j].is_zero():
                    continue
                acc = acc + a[i][k] * b[k][j]
            out[i][j] = acc
    return out


def mat_is_zero(a) -> bool:
    return all(x.is_zero() for row in a for x in row)


def mat_map(a, fn):
    return [[fn(x) for x in row] for row in a]


def form_det(a) -> MonoForm:
    """Row-ordered Leibniz determinant of a matrix of forms."""
    n = len(a)
    nvars = a[0][0].nvars
    out = MonoForm(nvars)
    for perm in itertools.permutations(range(n)):
        sign = _perm_sign(perm)
        acc = MonoForm.constant(QC(sign), nvars)
        ok = True
        for i in range(n):
            entry = a[i][perm[i]]
            if entry.is_zero():
                ok = False
                break
            acc = acc * entry
        if ok:
            out = out + acc
    return out


def _perm_sign(perm) -> int:
    inv = sum(1 for i in range(len(perm)) for j in range(i + 1, len(perm))
              if perm[i] > perm[j])
    return -1 if inv % 2 else 1


def form_chern(n: int, k: int, a) -> MonoForm:
    """C_k of a form-valued matrix: (-1)^k times the sum of k x k principal
    minors, expanded row-ordered."""
    nvars = a[0][0].nvars
    if k == 0:
        return MonoForm.constant(QC_ONE, nvars)
    out = MonoForm(nvars)
    for idx in itertools.combinations(range(n), k):
        sub = [[a[i][j] for j in idx] for i in idx]
        out = out + form_det(sub)
    return out if k % 2 == 0 else -out


def form_polarize(n: int, p: int, mats) -> MonoForm:
    """Inclusion-exclusion polarization of C_p on form-valued matrices.

    Well-defined provided at most one argument has odd-degree entries
    (odd-odd cross terms would not commute)."""
    nvars = mats[0][0][0].nvars
    total = MonoForm(nvars)
    for r in range(1, p + 1):
        sign = 1 if (p - r) % 2 == 0 else -1
        for subset in itertools.combinations(range(p), r):
            s = mats[subset[0]]
            for i in subset[1:]:
                s = mat_add(s, mats[i])
            c = form_chern(n, p, s)
            total = total + (c if sign > 0 else -c)
    return total.scale(QC(Fraction(1, math.factorial(p))))


def integrate_parameter(phi: MonoForm) -> MonoForm:
    """Integrate the last variable (a dt-free parameter) from 0 to 1."""
    var = phi.nvars - 1
    out = {}
    for (e, dv), v in phi.terms.items():
        if var in dv:
            raise ValueError("parameter variable carries a differential")
        c = v * Fraction(1, e[var] + 1)
        key = (e[:var], dv)
        acc = out.get(key, 0) + c
        if acc:
            out[key] = acc
        elif key in out:
            del out[key]
    return MonoForm(phi.nvars - 1, out)


def _lift_with_parameter(a):
    """Append a fresh parameter variable to every entry of a matrix form."""
    nvars = a[0][0].nvars
    var_map = list(range(nvars))
    return mat_map(a, lambda x: x.map_vars(nvars + 1, var_map))


# ---------------------------------------------------------------------------
# Simplicial connections


@dataclass
class SimpConnection:
    """gl_n-valued compatible 1-form on an SSet (local connection data)."""

    sset: SSet
    n: int
    data: dict = field(default_factory=dict)  # cell -> n x n MonoForm matrix

    def on_cell(self, c):
        m = self.data.get(c)
        if m is None:
            return mat_zero(self.n, self.sset.dim_of[c])
        return m

    def check_compatible(self) -> bool:
        for c, dim in self.sset.dim_of.items():
            if dim == 0:
                continue
            mat = self.on_cell(c)
            for i in range(dim + 1):
                target = self.on_cell(self.sset.face(c, i))
                for r in range(self.n):
                    for s in range(self.n):
                        if face_pullback(mat[r][s], dim, i) != target[r][s]:
                            return False
        return True

    def __sub__(self, other):
        if other.sset is not self.sset or other.n != self.n:
            raise ValueError("connections live on different bundles")
        out = {c: mat_sub(self.on_cell(c), other.on_cell(c))
               for c in set(self.data) | set(other.data)}
        return SimpConnection(self.sset, self.n, out)


def random_connection(sset: SSet, n: int, rng) -> SimpConnection:
    """A random compatible polynomial connection (exact coefficients)."""
    data = {}
    entries = [[random_compatible_form(sset, 1, rng, n_terms=1)
                for _ in range(n)] for _ in range(n)]
    for c, dim in sset.dim_of.items():
        data[c] = [[entries[i][j].form_on(c) for j in range(n)]
                   for i in range(n)]
    return SimpConnection(sset, n, data)


@dataclass
class MatrixPolyForm:
    """A compatible family of matrix-valued forms (e.g. a curvature)."""

    sset: SSet
    n: int
    degree: int
    data: dict = field(default_factory=dict)

    def on_cell(self, c):
        m = self.data.get(c)
        if m is None:
            return mat_zero(self.n, self.sset.dim_of[c])
        return m

    def is_zero(self) -> bool:
        return all(mat_is_zero(m) for m in self.data.values())


def curvature(conn: SimpConnection) -> MatrixPolyForm:
    """Theta = d omega + (1/2)[omega, omega] = d omega + omega ^ omega."""
    data = {}
    for c in conn.sset.dim_of:
        w = conn.on_cell(c)
        data[c] = mat_add(mat_d(w), mat_wedge(w, w))
    return MatrixPolyForm(conn.sset, conn.n, 2, data)


def bianchi_residual(conn: SimpConnection) -> bool:
    """d Theta = [Theta, omega]; True when the residual vanishes exactly."""
    theta = curvature(conn)
    for c in conn.sset.dim_of:
        w = conn.on_cell(c)
        th = theta.on_cell(c)
        lhs = mat_d(th)
        rhs = mat_sub(mat_wedge(th, w), mat_wedge(w, th))
        if not mat_is_zero(mat_sub(lhs, rhs)):
            return False
    return True


def chern_form(conn: SimpConnection, k: int) -> PolyForm:
    """c_k(nabla) = C_k(Theta) as a scalar PolyForm of degree 2k."""
    if k > conn.n:
        raise ValueError(f"k={k} exceeds matrix size n={conn.n}")
    theta = curvature(conn)
    data = {}
    for c in conn.sset.dim_of:
        f = form_chern(conn.n, k, theta.on_cell(c))
        if not f.is_zero():
            data[c] = f
    return PolyForm(conn.sset, 2 * k, data)


def eta_p(conn0: SimpConnection, conn1: SimpConnection, p: int) -> PolyForm:
    """The comparison form with d eta_p = c_p(nabla_1) - c_p(nabla_0).

    eta_p = p * int_0^1 mu(omega, Theta_t, ..., Theta_t) dt with
    omega = nabla_1 - nabla_0 and Theta_t the curvature of nabla_0 + t omega;
    the integrand is polynomial in t, integrated exactly.
    """
    if conn1.sset is not conn0.sset or conn1.n != conn0.n:
        raise ValueError("connections live on different bundles")
    n = conn0.n
    data = {}
    for c in conn0.sset.dim_of:
        m = conn0.sset.dim_of[c]
        w0 = _lift_with_parameter(conn0.on_cell(c))
        w = _lift_with_parameter(mat_sub(conn1.on_cell(c),
                                         conn0.on_cell(c)))
        t = MonoForm.var(m, m + 1)
        wt = mat_add(w0, mat_map(w, lambda x: t * x))
        theta_t = mat_add(mat_d(wt, active=range(m)), mat_wedge(wt, wt))
        integrand = form_polarize(n, p, [w] + [theta_t] * (p - 1))
        f = integrate_parameter(integrand).scale(QC(p))
        if not f.is_zero():
            data[c] = f
    return PolyForm(conn0.sset, 2 * p - 1, data)


def curvature_splitting_check(conn0: SimpConnection,
                              conn1: SimpConnection) -> dict:
    """Verify that the curvature of d_t + nabla_t on I x patch decomposes as
    Theta_t + dt ^ omega; exact, per cell."""
    worst = 0.0
    for c in conn0.sset.dim_of:
        m = conn0.sset.dim_of[c]
        # variable 0 is the interval coordinate t, then the patch variables
        shift = [k + 1 for k in range(m)]
        w0 = mat_map(conn0.on_cell(c), lambda x: x.map_vars(m + 1, shift))
        w = mat_map(mat_sub(conn1.on_cell(c), conn0.on_cell(c)),
                    lambda x: x.map_vars(m + 1, shift))
        t = MonoForm.var(0, m + 1)
        dt = MonoForm.dvar(0, m + 1)
        wt = mat_add(w0, mat_map(w, lambda x: t * x))
        full = mat_add(mat_d(wt), mat_wedge(wt, wt))
        theta_t = mat_add(mat_d(wt, active=range(1, m + 1)),
                          mat_wedge(wt, wt))
        dt_w = mat_map(w, lambda x: dt * x)
        resid = mat_sub(full, mat_add(theta_t, dt_w))
        for row in resid:
            for x in row:
                for v in x.terms.values():
                    worst = max(worst, abs(complex(v)))
    return {"residual_zero": worst == 0.0, "max_residual": worst}


# ---------------------------------------------------------------------------
# Character representatives


def _lattice_gen(p: int) -> complex:
    return TWO_PI_I ** p


def mod_lattice_zero(value: complex, p: int, tol: float = 1e-9) -> bool:
    """Is value in (2 pi i)^p Z (up to tol)?"""
    q = complex(value) / _lattice_gen(p)
    return abs(q.imag) < tol and abs(q.real - round(q.real)) < tol


@dataclass
class CSRep:
    """A character representative: a closed 2p-form and a (2p-1)-cochain y
    with delta y = int(alpha) mod (2 pi i)^p Z."""

    p: int
    top_form: PolyForm
    cochain: Cochain
    lattice: str = ""
    f_flag: bool = False

    def __post_init__(self):
        if not self.lattice:
            self.lattice = f"Z({self.p})"

    def check(self, tol: float = 1e-9) -> bool:
        delta = self.cochain.coboundary()
        integ = self.top_form.integrate_to_cochain()
        for c in self.top_form.sset.cells.get(2 * self.p, []):
            v = complex(delta.value(c)) - complex(integ.value(c))
            if not mod_lattice_zero(v, self.p, tol):
                return False
        return True

    def to_json(self) -> dict:
        return {
            "p": self.p,
            "lattice": self.lattice,
            "form": _polyform_json(self.top_form),
            "cochain": {repr(c): [complex(v).real, complex(v).imag]
                        for c, v in self.cochain.values.items()},
        }


@dataclass
class DBRep:
    """A cone-style cocycle representative (form part, cochain part)."""

    p: int
    form_part: PolyForm
    cochain_part: Cochain
    lattice: str = ""

    def __post_init__(self):
        if not self.lattice:
            self.lattice = f"Z({self.p})"

    def cocycle_components(self):
        """The two components of D(alpha, f) = (-d alpha, delta f + int alpha);
        both must vanish (the second mod the lattice)."""
        d_alpha = self.form_part.d()
        delta_f = self.cochain_part.coboundary()
        integ = self.form_part.integrate_to_cochain()
        return -d_alpha, delta_f + integ

    def check(self, tol: float = 1e-9) -> bool:
        c1, c2 = self.cocycle_components()
        if not c1.is_zero():
            return False
        return all(mod_lattice_zero(complex(v), self.p, tol)
                   for v in c2.values.values())

    def to_json(self) -> dict:
        return {
            "p": self.p,
            "lattice": self.lattice,
            "form": _polyform_json(self.form_part),
            "cochain": {repr(c): [complex(v).real, complex(v).imag]
                        for c, v in self.cochain_part.values.items()},
        }


def _polyform_json(phi: PolyForm) -> dict:
    out = {}
    for c, f in phi.data.items():
        out[repr(c)] = [
            {"exponents": list(e), "dvars": list(dv),
             "coeff": [complex(v).real, complex(v).imag]}
            for (e, dv), v in sorted(f.terms.items())
        ]
    return {"degree": phi.degree, "cells": out}


def connection_change(rep: CSRep, conn0: SimpConnection,
                      conn1: SimpConnection) -> CSRep:
    """Transport a representative of the character of nabla_0 to nabla_1:
    (c_p(nabla_1), y + int(eta_p)).  The cone-complex difference of the two
    representatives is D(eta_p, 0)."""
    if conn0.sset is not rep.top_form.sset or conn1.sset is not conn0.sset:
        raise ValueError("mismatched complexes")
    p = rep.p
    eta = eta_p(conn0, conn1, p)
    new_form = chern_form(conn1, p)
    new_cochain = rep.cochain + eta.integrate_to_cochain()
    return CSRep(p, new_form, new_cochain, rep.lattice, rep.f_flag)


def cs_rep_for(conn: SimpConnection, p: int, cochain: Cochain,
               f_flag: bool = False) -> CSRep:
    return CSRep(p, chern_form(conn, p), cochain, f_flag=f_flag)


def db_image(rep: CSRep) -> DBRep:
    """Repackage (alpha, y) as the cone cocycle (alpha, -y), checking the
    degree-type flag and the cocycle condition."""
    if not rep.f_flag:
        raise ValueError("top form lacks the F^p subcomplex flag")
    db = DBRep(rep.p, rep.top_form, -rep.cochain, rep.lattice)
    return db


# ---------------------------------------------------------------------------
# Universal (bisimplicial) connection data


def universal_connection_eval(patch_forms: dict, simplex: tuple):
    """omega_U = sum_j t_j pi_j* omega on a cell of the patch-tuple model.

    patch_forms maps patch identifiers to n x n matrices of MonoForms in q
    shared base variables; simplex is the tuple of patch identifiers at the
    cell's vertices.  The result lives in m + q variables with the m
    barycentric coordinates t_1..t_m first (t_0 = 1 - sum eliminated).
    """
    missing = [s for s in simplex if s not in patch_forms]
    if missing:
        raise KeyError(f"no connection data for patch labels {missing}")
    m = len(simplex) - 1
    if m < 0:
        raise ValueError("simplex must have at least one vertex")
    mats = [patch_forms[s] for s in simplex]
    n = len(mats[0])
    q = mats[0][0][0].nvars
    shift = [m + k for k in range(q)]
    lifted = [mat_map(a, lambda x: x.map_vars(m + q, shift)) for a in mats]
    if m == 0:
        return lifted[0]
    out = mat_zero(n, m + q)
    t0 = MonoForm.constant(QC_ONE, m + q)
    for j in range(1, m + 1):
        t0 = t0 - MonoForm.var(j - 1, m + q)
    for j, a in enumerate(lifted):
        tj = t0 if j == 0 else MonoForm.var(j - 1, m + q)
        out = mat_add(out, mat_map(a, lambda x: tj * x))
    return out
