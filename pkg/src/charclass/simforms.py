"""Finite semi-simplicial sets and compatible polynomial differential forms.

A form on an m-cell is a polynomial differential form in the barycentric
coordinates t_1..t_m (t_0 = 1 - sum t_i is eliminated); a PolyForm is a
compatible family of such forms across the face maps.  Integration over the
standard simplex uses the Dirichlet formula, normalized so that
int_{Delta^m} dt_1 ... dt_m = 1/m!.

Coefficients are generic: exact QC for identity-grade work, complex floats
for connection data.  Fiber integration over the interval (variable 0 by
convention) and the prism-complex cochain homotopy are also provided.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .exact import QC, QC_ZERO, QC_ONE


# ---------------------------------------------------------------------------
# Monomial polynomial forms on a coordinate patch


class MonoForm:
    """A polynomial differential form in nvars coordinates.

    terms maps (exponent tuple, strictly increasing d-variable tuple) to a
    scalar coefficient (QC or complex; don't mix within one computation).
    """

    __slots__ = ("nvars", "terms")

    def __init__(self, nvars: int, terms=None):
        self.nvars = nvars
        self.terms = {}
        if terms:
            for key, coeff in terms.items():
                if coeff:
                    self.terms[key] = coeff

    # -- constructors -------------------------------------------------------

    @staticmethod
    def constant(c, nvars: int) -> "MonoForm":
        return MonoForm(nvars, {((0,) * nvars, ()): c})

    @staticmethod
    def var(j: int, nvars: int, one=QC_ONE) -> "MonoForm":
        e = [0] * nvars
        e[j] = 1
        return MonoForm(nvars, {(tuple(e), ()): one})

    @staticmethod
    def dvar(j: int, nvars: int, one=QC_ONE) -> "MonoForm":
        return MonoForm(nvars, {((0,) * nvars, (j,)): one})

    # -- structure ----------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def degree(self):
        degs = {len(dv) for _, dv in self.terms}
        return degs.pop() if len(degs) == 1 else (0 if not degs else None)

    def __add__(self, other):
        if self.nvars != other.nvars:
            raise ValueError("variable count mismatch")
        out = dict(self.terms)
        for k, v in other.terms.items():
            s = out.get(k, 0) + v
            if s:
                out[k] = s
            elif k in out:
                del out[k]
        return MonoForm(self.nvars, out)

    def __neg__(self):
        return MonoForm(self.nvars, {k: -v for k, v in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c) -> "MonoForm":
        if not c:
            return MonoForm(self.nvars)
        return MonoForm(self.nvars, {k: c * v for k, v in self.terms.items()})

    def __mul__(self, other):
        """Wedge product."""
        if self.nvars != other.nvars:
            raise ValueError("variable count mismatch")
        out = {}
        for (e1, d1), v1 in self.terms.items():
            for (e2, d2), v2 in other.terms.items():
                if set(d1) & set(d2):
                    continue
                inv = sum(1 for x in d1 for y in d2 if x > y)
                sign = -1 if inv % 2 else 1
                key = (tuple(a + b for a, b in zip(e1, e2)),
                       tuple(sorted(d1 + d2)))
                c = out.get(key, 0) + sign * v1 * v2
                if c:
                    out[key] = c
                elif key in out:
                    del out[key]
        return MonoForm(self.nvars, out)

    def __eq__(self, other):
        return (isinstance(other, MonoForm) and self.nvars == other.nvars
                and self.terms == other.terms)

    def __repr__(self):
        if not self.terms:
            return f"MonoForm({self.nvars}, 0)"
        bits = []
        for (e, dv), v in sorted(self.terms.items()):
            mono = "".join(f"x{i}^{p}" for i, p in enumerate(e) if p)
            mono += "".join(f" dx{i}" for i in dv)
            bits.append(f"({v!r}){mono}")
        return " + ".join(bits)

    # -- calculus ------------------------------------------------------------

    def d(self, active=None) -> "MonoForm":
        """Exterior derivative; ``active`` restricts which variables
        contribute (used when a trailing variable is a parameter)."""
        if active is None:
            active = range(self.nvars)
        out = MonoForm(self.nvars)
        for (e, dv), v in self.terms.items():
            for j in active:
                if e[j] and j not in dv:
                    e2 = list(e)
                    e2[j] -= 1
                    rest = MonoForm(self.nvars, {(tuple(e2), dv): e[j] * v})
                    out = out + MonoForm.dvar(j, self.nvars) * rest
        return out

    def substitute(self, affines, new_nvars: int) -> "MonoForm":
        """Pullback along the affine map x_j = c_j + sum_k a_{jk} s_k.

        affines[j] = (const, coefficient tuple of length new_nvars), with
        scalars of the same kind as the form's coefficients.
        """
        if len(affines) != self.nvars:
            raise ValueError("need one affine expression per variable")
        images = []
        d_images = []
        for c0, coeffs in affines:
            img = MonoForm.constant(c0, new_nvars) if c0 else MonoForm(new_nvars)
            dimg = MonoForm(new_nvars)
            for k, a in enumerate(coeffs):
                if a:
                    img = img + MonoForm.var(k, new_nvars).scale(a)
                    dimg = dimg + MonoForm.dvar(k, new_nvars).scale(a)
            images.append(img)
            d_images.append(dimg)
        out = MonoForm(new_nvars)
        for (e, dv), v in self.terms.items():
            acc = MonoForm(new_nvars, {((0,) * new_nvars, ()): v})
            for j, p in enumerate(e):
                for _ in range(p):
                    acc = acc * images[j]
            for j in dv:
                acc = acc * d_images[j]
            out = out + acc
        return out

    def map_vars(self, new_nvars: int, var_map) -> "MonoForm":
        """Reindex variables; var_map[old_index] = new_index."""
        out = {}
        for (e, dv), v in self.terms.items():
            e2 = [0] * new_nvars
            for j, p in enumerate(e):
                if p:
                    e2[var_map[j]] += p
            dv2 = tuple(var_map[j] for j in dv)
            sign, dv2s = _sort_sign(dv2)
            if len(set(dv2s)) != len(dv2s):
                continue
            key = (tuple(e2), dv2s)
            c = out.get(key, 0) + sign * v
            if c:
                out[key] = c
            elif key in out:
                del out[key]
        return MonoForm(new_nvars, out)

    def integrate_simplex(self):
        """Exact integral over the standard simplex in these coordinates.

        Only top-degree terms dt_1 ^ ... ^ dt_m contribute; the Dirichlet
        formula gives int t_1^{a_1}..t_m^{a_m} dt = prod a_i! / (m+sum a)!.
        """
        m = self.nvars
        full = tuple(range(m))
        total = 0
        for (e, dv), v in self.terms.items():
            if dv != full:
                continue
            num = 1
            for a in e:
                num *= math.factorial(a)
            total = total + v * Fraction(num, math.factorial(m + sum(e)))
        return total

    def at_parameter(self, value, var: int = 0) -> "MonoForm":
        """Restrict to {x_var = value}: terms with dx_var die, the variable
        is substituted and removed."""
        out = {}
        for (e, dv), v in self.terms.items():
            if var in dv:
                continue
            c = v
            if e[var]:
                if not value:
                    continue
                for _ in range(e[var]):
                    c = c * value
            e2 = tuple(p for j, p in enumerate(e) if j != var)
            dv2 = tuple(j - 1 if j > var else j for j in dv)
            acc = out.get((e2, dv2), 0) + c
            if acc:
                out[(e2, dv2)] = acc
            elif (e2, dv2) in out:
                del out[(e2, dv2)]
        return MonoForm(self.nvars - 1, out)


def _sort_sign(idx):
    lst = list(idx)
    sign = 1
    for i in range(1, len(lst)):
        j = i
        while j > 0 and lst[j - 1] > lst[j]:
            lst[j - 1], lst[j] = lst[j], lst[j - 1]
            sign = -sign
            j -= 1
    return sign, tuple(lst)


def fiber_integrate_B(phi: MonoForm, one=QC_ONE) -> MonoForm:
    """Fiber integration over the interval coordinate (variable 0).

    B(phi) = int_0^1 (d/dt contracted into phi) dt; terms without dt are
    annihilated.  Satisfies B(d phi) + d(B phi) = phi|_{t=1} - phi|_{t=0}.
    """
    out = {}
    for (e, dv), v in phi.terms.items():
        if 0 not in dv:
            continue
        pos = dv.index(0)
        sign = -1 if pos % 2 else 1
        c = sign * v * Fraction(1, e[0] + 1)
        e2 = tuple(e[1:])
        dv2 = tuple(j - 1 for j in dv if j != 0)
        acc = out.get((e2, dv2), 0) + c
        if acc:
            out[(e2, dv2)] = acc
        elif (e2, dv2) in out:
            del out[(e2, dv2)]
    return MonoForm(phi.nvars - 1, out)


# ---------------------------------------------------------------------------
# Semi-simplicial sets


class SSet:
    """A finite semi-simplicial set: cells by dimension, face maps only.

    ``faces[c]`` lists (d_0 c, ..., d_m c) for an m-cell c; simplicial
    identities d_i d_j = d_{j-1} d_i (i < j) are checked at construction.
    """

    def __init__(self, cells: dict, faces: dict, labels: dict = None,
                 check: bool = True):
        self.cells = {int(k): list(v) for k, v in cells.items() if v}
        self.faces = faces
        self.labels = labels or {}
        self.dim_of = {}
        for d, ids in self.cells.items():
            for c in ids:
                self.dim_of[c] = d
        if check:
            self.validate()

    @property
    def top_dim(self) -> int:
        return max(self.cells) if self.cells else -1

    def face(self, c, i):
        return self.faces[c][i]

    def validate(self):
        for c, d in self.dim_of.items():
            if d == 0:
                continue
            fs = self.faces.get(c)
            if fs is None or len(fs) != d + 1:
                raise ValueError(f"cell {c!r} needs {d + 1} faces")
            for f in fs:
                if self.dim_of.get(f) != d - 1:
                    raise ValueError(f"face of {c!r} has wrong dimension")
            if d >= 2:
                for i in range(d + 1):
                    for j in range(i + 1, d + 1):
                        if self.face(self.face(c, j), i) != \
                                self.face(self.face(c, i), j - 1):
                            raise ValueError(
                                f"simplicial identity fails at {c!r} "
                                f"(i={i}, j={j})")

    def vertices(self, c) -> list:
        """The ordered vertex 0-cells of a cell, via iterated face maps."""
        m = self.dim_of[c]
        out = []
        for j in range(m + 1):
            x = c
            for i in range(m, j, -1):
                x = self.face(x, i)
            for _ in range(j):
                x = self.face(x, 0)
            out.append(x)
        return out

    def to_json(self) -> dict:
        return {
            "cells": {str(d): [repr(c) for c in ids]
                      for d, ids in self.cells.items()},
            "faces": {repr(c): [repr(f) for f in fs]
                      for c, fs in self.faces.items()},
            "labels": {repr(c): v for c, v in self.labels.items()
                       if _json_safe(v)},
        }

    @staticmethod
    def from_json(data) -> "SSet":
        cells = {int(d): list(ids) for d, ids in data["cells"].items()}
        faces = {c: list(fs) for c, fs in data.get("faces", {}).items()}
        return SSet(cells, faces, labels=data.get("labels", {}))


def _json_safe(v):
    return isinstance(v, (str, int, float, list, tuple, dict, type(None)))


def simplex_sset(m: int) -> SSet:
    """The standard m-simplex with all its faces; cells are vertex tuples."""
    cells = {d: [tuple(s) for s in itertools.combinations(range(m + 1), d + 1)]
             for d in range(m + 1)}
    faces = {}
    for d in range(1, m + 1):
        for c in cells[d]:
            faces[c] = [c[:i] + c[i + 1:] for i in range(d + 1)]
    return SSet(cells, faces)


def boundary_sset(m: int) -> SSet:
    """The boundary of the standard m-simplex (an (m-1)-sphere)."""
    full = simplex_sset(m)
    cells = {d: ids for d, ids in full.cells.items() if d < m}
    faces = {c: fs for c, fs in full.faces.items() if full.dim_of[c] < m}
    return SSet(cells, faces)


# ---------------------------------------------------------------------------
# Compatible polynomial forms


def face_pullback(mono: MonoForm, m: int, i: int, zero=QC_ZERO, one=QC_ONE):
    """Pullback of a form on Delta^m to Delta^{m-1} along the i-th face.

    In eliminated coordinates (t_1..t_m independent), inserting a zero at
    barycentric position i gives t_j = s_j (j < i), t_i = 0, t_j = s_{j-1}
    (j > i); for i = 0, t_1 = 1 - s_1 - ... - s_{m-1}.
    """
    affines = []
    nz = [zero] * (m - 1)
    for j in range(1, m + 1):
        if i == 0:
            if j == 1:
                affines.append((one, tuple(-one for _ in range(m - 1))))
            else:
                cf = list(nz)
                cf[j - 2] = one
                affines.append((zero, tuple(cf)))
        else:
            if j < i:
                cf = list(nz)
                cf[j - 1] = one
                affines.append((zero, tuple(cf)))
            elif j == i:
                affines.append((zero, tuple(nz)))
            else:
                cf = list(nz)
                cf[j - 2] = one
                affines.append((zero, tuple(cf)))
    return mono.substitute(affines, m - 1)


@dataclass
class PolyForm:
    """A compatible family of polynomial forms on the cells of an SSet."""

    sset: SSet
    degree: int
    data: dict = field(default_factory=dict)

    def form_on(self, c) -> MonoForm:
        f = self.data.get(c)
        return f if f is not None else MonoForm(self.sset.dim_of[c])

    def _map(self, fn, degree) -> "PolyForm":
        out = {}
        for c, f in self.data.items():
            g = fn(c, f)
            if not g.is_zero():
                out[c] = g
        return PolyForm(self.sset, degree, out)

    def d(self) -> "PolyForm":
        return self._map(lambda c, f: f.d(), self.degree + 1)

    def wedge(self, other: "PolyForm") -> "PolyForm":
        if other.sset is not self.sset:
            raise ValueError("forms live on different complexes")
        out = {}
        for c in set(self.data) & set(other.data):
            g = self.data[c] * other.data[c]
            if not g.is_zero():
                out[c] = g
        return PolyForm(self.sset, self.degree + other.degree, out)

    def __add__(self, other):
        out = dict(self.data)
        for c, f in other.data.items():
            g = out[c] + f if c in out else f
            if g.is_zero():
                out.pop(c, None)
            else:
                out[c] = g
        return PolyForm(self.sset, self.degree, out)

    def __neg__(self):
        return self._map(lambda c, f: -f, self.degree)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, a) -> "PolyForm":
        return self._map(lambda c, f: f.scale(a), self.degree)

    def is_zero(self) -> bool:
        return all(f.is_zero() for f in self.data.values())

    def check_compatible(self) -> bool:
        """Exact face-compatibility of the family."""
        for c, dim in self.sset.dim_of.items():
            if dim == 0:
                continue
            f = self.form_on(c)
            for i in range(dim + 1):
                pb = face_pullback(f, dim, i)
                if pb != self.form_on(self.sset.face(c, i)):
                    return False
        return True

    def integrate_to_cochain(self) -> "Cochain":
        values = {}
        for c in self.sset.cells.get(self.degree, []):
            values[c] = self.form_on(c).integrate_simplex()
        return Cochain(self.sset, self.degree, values)


@dataclass
class Cochain:
    """A cochain on an SSet with values in C (optionally tagged mod a
    lattice Z(p) or R(p); the tag is bookkeeping, values stay in C)."""

    sset: SSet
    degree: int
    values: dict = field(default_factory=dict)
    lattice: str = "C"
    p: int = 0

    def value(self, c):
        return self.values.get(c, 0)

    def coboundary(self) -> "Cochain":
        out = {}
        for c in self.sset.cells.get(self.degree + 1, []):
            acc = 0
            for i in range(self.degree + 2):
                v = self.value(self.sset.face(c, i))
                acc = acc + (v if i % 2 == 0 else -v)
            out[c] = acc
        return Cochain(self.sset, self.degree + 1, out, self.lattice, self.p)

    def __add__(self, other):
        out = dict(self.values)
        for c, v in other.values.items():
            out[c] = out.get(c, 0) + v
        return Cochain(self.sset, self.degree, out, self.lattice, self.p)

    def __neg__(self):
        return Cochain(self.sset, self.degree,
                       {c: -v for c, v in self.values.items()},
                       self.lattice, self.p)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, a) -> "Cochain":
        return Cochain(self.sset, self.degree,
                       {c: a * v for c, v in self.values.items()},
                       self.lattice, self.p)


def vertex_interpolation(sset: SSet, values: dict) -> PolyForm:
    """The compatible 0-form interpolating prescribed vertex values:
    on a cell with vertices (v_0..v_m) it equals sum values[v_j] t_j."""
    data = {}
    for c, m in sset.dim_of.items():
        vs = sset.vertices(c) if m else [c]
        f = MonoForm.constant(values[vs[0]], m)  # t_0 = 1 - sum t_j
        for j in range(1, m + 1):
            coeff = values[vs[j]] - values[vs[0]]
            if coeff:
                f = f + MonoForm.var(j - 1, m).scale(coeff)
        data[c] = f
    return PolyForm(sset, 0, data)


def random_compatible_form(sset: SSet, degree: int, rng,
                           n_terms: int = 2) -> PolyForm:
    """A random compatible form with exact coefficients, generated from
    products f_0 df_1 ^ ... ^ df_s of vertex interpolations."""
    verts = sset.cells.get(0, [])

    def rand_vertex_form():
        vals = {v: QC(int(rng.integers(-3, 4)), int(rng.integers(-3, 4)))
                for v in verts}
        return vertex_interpolation(sset, vals)

    total = PolyForm(sset, degree, {})
    for _ in range(n_terms):
        term = rand_vertex_form()
        for _ in range(degree):
            term = term.wedge(rand_vertex_form().d())
        total = total + term
    return total


# ---------------------------------------------------------------------------
# Prism complexes I x M and the cochain homotopy


class PrismSSet(SSet):
    """The triangulated product I x M of an SSet M.

    Cells over an m-cell sigma of the base are strict chains in the poset
    {0..m} x {0,1} whose positions cover 0..m; chains missing positions are
    identified with cells over the corresponding face of the base.  The
    maximal chains are the prisms P_{sigma,j} = [b_0..b_j, t_j..t_m]
    (bottom vertices before top vertices).
    """

    def __init__(self, base: SSet):
        self.base = base
        cells = {}
        faces = {}
        for sigma, m in base.dim_of.items():
            for chain in _covering_chains(m):
                cid = ("pr", sigma, chain)
                cells.setdefault(len(chain) - 1, []).append(cid)
                if len(chain) > 1:
                    faces[cid] = [self._normalize(sigma, m,
                                                  chain[:k] + chain[k + 1:])
                                  for k in range(len(chain))]
        super().__init__(cells, faces)

    def _normalize(self, sigma, m, chain):
        positions = {p for p, _ in chain}
        while len(positions) < m + 1:
            missing = max(set(range(m + 1)) - positions)
            sigma = self.base.face(sigma, missing)
            chain = tuple((p - 1 if p > missing else p, lv)
                          for p, lv in chain)
            m -= 1
            positions = {p for p, _ in chain}
        return ("pr", sigma, chain)

    def bottom(self, sigma):
        m = self.base.dim_of[sigma]
        return ("pr", sigma, tuple((i, 0) for i in range(m + 1)))

    def top(self, sigma):
        m = self.base.dim_of[sigma]
        return ("pr", sigma, tuple((i, 1) for i in range(m + 1)))

    def prisms(self, sigma) -> list:
        m = self.base.dim_of[sigma]
        return [("pr", sigma,
                 tuple((i, 0) for i in range(j + 1))
                 + tuple((i, 1) for i in range(j, m + 1)))
                for j in range(m + 1)]


def _covering_chains(m: int):
    """Strict chains in {0..m} x {0,1} whose positions cover 0..m.

    They are exactly: [0..a at level 0, a..m at level 1] (the prisms) and
    [0..a at level 0, a+1..m at level 1] for a = -1..m."""
    out = []
    for a in range(m + 1):
        out.append(tuple((i, 0) for i in range(a + 1))
                   + tuple((i, 1) for i in range(a, m + 1)))
    for a in range(-1, m + 1):
        out.append(tuple((i, 0) for i in range(a + 1))
                   + tuple((i, 1) for i in range(a + 1, m + 1)))
    return out


def prism_complex(base: SSet) -> PrismSSet:
    return PrismSSet(base)


def restrict_cochain(f: Cochain, prism: PrismSSet, level: int) -> Cochain:
    """Pullback of a prism-complex cochain along the bottom (level 0) or
    top (level 1) inclusion of the base."""
    pick = prism.bottom if level == 0 else prism.top
    values = {sigma: f.value(pick(sigma))
              for sigma in prism.base.cells.get(f.degree, [])}
    return Cochain(prism.base, f.degree, values, f.lattice, f.p)


def cochain_B(f: Cochain) -> Cochain:
    """The prism-complex cochain homotopy: (Bf)(sigma) is the signed sum of
    f over the standard triangulation of I x sigma.  Satisfies
    B(delta f) + delta(B f) = top*f - bottom*f."""
    prism = f.sset
    if not isinstance(prism, PrismSSet):
        raise TypeError("cochain_B needs a cochain on a prism complex")
    out = {}
    for sigma in prism.base.cells.get(f.degree - 1, []):
        acc = 0
        for j, cid in enumerate(prism.prisms(sigma)):
            v = f.value(cid)
            acc = acc + (v if j % 2 == 0 else -v)
        out[sigma] = acc
    return Cochain(prism.base, f.degree - 1, out, f.lattice, f.p)


# ---------------------------------------------------------------------------
# Bar construction


def _mat_key(g: np.ndarray):
    return tuple(complex(np.round(x, 9)) for x in np.asarray(g).ravel())


def bar_sset(generators, depth: int) -> SSet:
    """The finite piece of the bar construction spanned by tuples of the
    given group elements up to the given dimension.

    Cells in dimension m are tuples (g_1,...,g_m); faces drop the first or
    last entry or merge adjacent entries (d_i gives g_{i+1} g_i), matching
    the inhomogeneous coordinates of group cycles.  The cell set is closed
    under faces, so products of generators appear as new cells.
    """
    if depth < 0:
        raise ValueError("depth must be nonnegative")
    gens = [np.asarray(g, dtype=complex) for g in generators]
    for g in gens:
        if abs(np.linalg.det(g)) < 1e-12:
            raise ValueError("singular generator")

    labels = {}

    def cid(tup):
        key = ("bar", len(tup), tuple(_mat_key(g) for g in tup))
        labels[key] = tuple(np.asarray(g) for g in tup)
        return key

    cells = {0: [cid(())]}
    faces = {}
    frontier = [tuple(t) for m in range(1, depth + 1)
                for t in itertools.product(gens, repeat=m)]
    seen = {cid(t) for t in frontier} | {cid(())}
    while frontier:
        tup = frontier.pop()
        m = len(tup)
        c = cid(tup)
        cells.setdefault(m, [])
        if c not in cells[m]:
            cells[m].append(c)
        if m == 0:
            continue
        fs = []
        for i in range(m + 1):
            if i == 0:
                ft = tup[1:]
            elif i == m:
                ft = tup[:-1]
            else:
                ft = tup[:i - 1] + (tup[i] @ tup[i - 1],) + tup[i + 1:]
            fc = cid(ft)
            fs.append(fc)
            if fc not in seen:
                seen.add(fc)
                frontier.append(ft)
        faces[c] = fs
    for m in cells:
        cells[m] = sorted(set(cells[m]), key=repr)
    return SSet(cells, faces, labels=labels)
