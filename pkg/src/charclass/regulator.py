"""Numerical evaluation of transgression forms over geodesic simplices.

The symmetric space GL_n(C)/U(n) is modelled internally by the positive
Hermitian matrices Z = g g* with the affine-invariant geodesics
Z_0^{1/2} (Z_0^{-1/2} Z_1 Z_0^{-1/2})^t Z_0^{1/2}; the group acts by
congruence Z -> h Z h*, which is an isometry, so cocycle values are
left-invariant by construction.  Publicly a point is reported as
Y = Z^{1/2} = to_base_point(g).

Tangent vectors of the simplex parametrization are translated to the
Cartan complement p at the base point by V -> (1/2) Z^{-1/2} V Z^{-1/2}
(the 1/2 because the orbit map g = exp(sX) moves Z = exp(2sX)), and the
theta-part of T_p is evaluated as an alternating form there.

Cocycle values follow the sign convention fixed in SIGN_LEDGER.md:
cs_cocycle = -integral of T_p over the geodesic simplex, and the mod-i^p R
reduction reports the coefficient of i^{p-1}.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import matlie
from .exact import QC
from .weil import transgress_qp, closed_basic_elements


@dataclass
class QuadratureConfig:
    """Gauss-Legendre tensor quadrature and finite-difference settings."""

    order: int = 16
    diff_step: float = 1e-6
    max_m: int = 4

    def __post_init__(self):
        if self.order < 2:
            raise ValueError("quadrature order must be at least 2")


@dataclass
class GeodesicSimplexSpec:
    """A geodesic simplex: the iterated cone over the points g_i e."""

    n: int
    vertices: list

    def __post_init__(self):
        self.vertices = [np.asarray(g, dtype=complex) for g in self.vertices]
        for g in self.vertices:
            if g.shape != (self.n, self.n):
                raise ValueError("vertex size does not match n")
            if abs(np.linalg.det(g)) < 1e-300:
                raise matlie.DomainError("singular simplex vertex")

    @property
    def m(self) -> int:
        return len(self.vertices) - 1


@dataclass
class RegulatorValue:
    """A cocycle value with its reduction mod i^p R.

    ``reduced`` is the coefficient of i^{p-1} in ``raw`` (the component
    complementary to i^p R), which is the part that survives in C/R(p).
    """

    raw: complex
    p: int
    reduced: float = field(init=False)

    def __post_init__(self):
        self.raw = complex(self.raw)
        self.reduced = reduce_mod_rp(self.raw, self.p)


def reduce_mod_rp(value: complex, p: int) -> float:
    """The coefficient of i^{p-1} in value; kills the i^p R component."""
    return (complex(value) / 1j ** (p - 1)).real


# ---------------------------------------------------------------------------
# Geodesic simplices


def _cone_z(z_verts, coords):
    """Iterated geodesic cone in the Z = g g* model, batched.

    coords has shape (batch, m); the first coordinate is the cone parameter
    toward the first vertex, the rest parametrize the opposite face.
    """
    if not z_verts[1:]:
        batch = coords.shape[:-1]
        return np.broadcast_to(z_verts[0], batch + z_verts[0].shape).copy()
    inner = _cone_z(z_verts[1:], coords[..., 1:])
    t = coords[..., 0]
    return matlie.geodesic(z_verts[0], inner, t)


def geodesic_simplex_point(spec: GeodesicSimplexSpec, coords,
                           cfg: QuadratureConfig = None) -> np.ndarray:
    """The point of the simplex at the given cone coordinates, reported in
    the Y = (g g*)^{1/2} model (so m = 0 gives to_base_point(g_0))."""
    cfg = cfg or QuadratureConfig()
    if spec.m > cfg.max_m:
        raise ValueError(f"simplex dimension {spec.m} exceeds cap {cfg.max_m}")
    coords = np.atleast_1d(np.asarray(coords, dtype=float))
    if coords.shape[-1] != spec.m and spec.m > 0:
        raise ValueError("coordinate count does not match dimension")
    z_verts = [g @ g.conj().T for g in spec.vertices]
    if spec.m == 0:
        return matlie.pd_sqrt(z_verts[0])
    z = _cone_z(z_verts, coords)
    return matlie.pd_sqrt(z)


class ThetaEvaluator:
    """Evaluates the Omega-free part of a Weil element as an alternating
    form on batched p-tangent coordinate vectors."""

    def __init__(self, lie, theta_terms: dict):
        self.lie = lie
        self.terms = [(np.array(idx, dtype=int), complex(v))
                      for idx, v in theta_terms.items()]
        self.m = len(self.terms[0][0]) if self.terms else 0

    def __call__(self, coord_stack: np.ndarray) -> np.ndarray:
        """coord_stack: (batch, m, dim) coordinates of the m tangent
        vectors; returns the (batch,) complex values."""
        batch = coord_stack.shape[0]
        out = np.zeros(batch, dtype=complex)
        for idx, coeff in self.terms:
            sub = coord_stack[:, :, idx]          # (batch, m, m)
            out += coeff * np.linalg.det(sub)
        return out


def integrate_invariant_form(evaluator, spec: GeodesicSimplexSpec,
                             cfg: QuadratureConfig = None) -> complex:
    """Tensor Gauss-Legendre integral of an alternating-form evaluator over
    the geodesic simplex in cone coordinates.

    evaluator is a ThetaEvaluator (or anything mapping (batch, m, dim)
    tangent-coordinate stacks to (batch,) values); its degree must equal
    the simplex dimension.
    """
    cfg = cfg or QuadratureConfig()
    m = spec.m
    if m > cfg.max_m:
        raise ValueError(f"simplex dimension {m} exceeds cap {cfg.max_m}")
    if getattr(evaluator, "m", m) != m:
        raise ValueError("form degree does not match simplex dimension")
    if m == 0:
        raise ValueError("cannot integrate a form over a point")
    nodes1, weights1 = np.polynomial.legendre.leggauss(cfg.order)
    nodes1 = 0.5 * (nodes1 + 1.0)
    weights1 = 0.5 * weights1
    grids = np.meshgrid(*([nodes1] * m), indexing="ij")
    coords = np.stack([g.ravel() for g in grids], axis=-1)  # (N, m)
    wgrids = np.meshgrid(*([weights1] * m), indexing="ij")
    weights = np.prod(np.stack([w.ravel() for w in wgrids], axis=-1), axis=-1)

    z_verts = [g @ g.conj().T for g in spec.vertices]
    h = cfg.diff_step
    z0 = _cone_z(z_verts, coords)
    inv_sqrt = matlie.pd_inv_sqrt(z0)
    tangents = []
    for j in range(m):
        shift = np.zeros(m)
        shift[j] = h
        zp = _cone_z(z_verts, coords + shift)
        zm = _cone_z(z_verts, coords - shift)
        dz = (zp - zm) / (2.0 * h)
        v = 0.5 * (inv_sqrt @ dz @ inv_sqrt)
        tangents.append(evaluator.lie.coords(v))
    stack = np.stack(tangents, axis=1)            # (N, m, dim)
    vals = evaluator(stack)
    return complex(np.sum(vals * weights))


# ---------------------------------------------------------------------------
# Cocycles


_TP_CACHE: dict = {}


def transgression_evaluator(n: int, p: int,
                            extra_element=None) -> ThetaEvaluator:
    """The cached theta-part evaluator for T_p over gl_n(C)/u(n); an
    optional closed basic element can be added to audit solution
    independence."""
    key = (n, p)
    if key not in _TP_CACHE:
        T, L, _ = transgress_qp(n, p)
        _TP_CACHE[key] = (T, L)
    T, L = _TP_CACHE[key]
    element = T.element
    if extra_element is not None:
        element = element + extra_element
    return ThetaEvaluator(L, element.theta_only())


def cs_cocycle(n: int, p: int, tup, cfg: QuadratureConfig = None,
               evaluator: ThetaEvaluator = None) -> RegulatorValue:
    """The group-cocycle value -int_{simplex(g_0..g_{2p-1})} T_p."""
    tup = list(tup)
    if len(tup) != 2 * p:
        raise ValueError(f"need a {2 * p}-tuple for p={p}")
    cfg = cfg or QuadratureConfig()
    ev = evaluator or transgression_evaluator(n, p)
    spec = GeodesicSimplexSpec(n, tup)
    raw = -integrate_invariant_form(ev, spec, cfg)
    return RegulatorValue(raw, p)


def borel_cocycle(n: int, p: int, tup,
                  cfg: QuadratureConfig = None,
                  evaluator: ThetaEvaluator = None) -> RegulatorValue:
    """Twice the cs value: the representative is -2 T_p."""
    cs = cs_cocycle(n, p, tup, cfg, evaluator)
    return RegulatorValue(2.0 * cs.raw, p)


def coboundary_residual(n: int, p: int, tup, cfg: QuadratureConfig = None,
                        evaluator: ThetaEvaluator = None) -> complex:
    """(delta c)(g_0..g_{2p}) = sum_i (-1)^i c(..skip g_i..); should vanish
    up to quadrature error for the cocycle c = cs_cocycle."""
    tup = list(tup)
    acc = 0.0 + 0.0j
    for i in range(len(tup)):
        sub = tup[:i] + tup[i + 1:]
        v = cs_cocycle(n, p, sub, cfg, evaluator).raw
        acc += v if i % 2 == 0 else -v
    return acc


# ---------------------------------------------------------------------------
# van Est chain-map audit


def vanest_dform(L, theta_terms: dict) -> dict:
    """The differential induced on Omega-free horizontal elements by the
    Weil differential: apply d, keep the theta-only part with indices in p.

    For the symmetric pair (gl_n, u_n) the bracket of two p-directions lies
    in k, so this differential vanishes identically; it is computed rather
    than assumed."""
    from fractions import Fraction

    from .weil import WeilElement, weil_d

    def as_qc(v):
        if isinstance(v, QC):
            return v
        c = complex(v)
        return QC(Fraction(c.real).limit_denominator(10**12),
                  Fraction(c.imag).limit_denominator(10**12))

    w = WeilElement({(tuple(t), ()): as_qc(v)
                     for t, v in theta_terms.items()})
    dw = weil_d(w, L)
    p_set = set(L.p_indices)
    return {t: v for (t, o), v in dw.terms.items()
            if not o and set(t) <= p_set}


def vanest_chainmap_check(n: int, theta_terms: dict, tuples,
                          cfg: QuadratureConfig = None) -> float:
    """Residual of delta f_omega = f_{d omega} on the supplied tuples,
    where f_omega(g_0..g_m) integrates omega over the geodesic simplex."""
    cfg = cfg or QuadratureConfig()
    key = ("lie", n)
    if key not in _TP_CACHE:
        from .weil import gl_nc_real
        _TP_CACHE[key] = gl_nc_real(n)
    L = _TP_CACHE[key]
    ev = ThetaEvaluator(L, theta_terms)
    m = ev.m
    d_terms = vanest_dform(L, theta_terms)
    d_ev = ThetaEvaluator(L, d_terms) if d_terms else None
    worst = 0.0
    for tup in tuples:
        tup = list(tup)
        if m == 0:
            raise ValueError("form degree must be at least 1")
        if len(tup) != m + 2:
            raise ValueError(f"need ({m + 2})-tuples for a degree-{m} form")
        acc = 0.0 + 0.0j
        for i in range(m + 2):
            sub = tup[:i] + tup[i + 1:]
            v = integrate_invariant_form(
                ev, GeodesicSimplexSpec(n, sub), cfg)
            acc += v if i % 2 == 0 else -v
        if d_ev is not None:
            acc -= integrate_invariant_form(
                d_ev, GeodesicSimplexSpec(n, tup), cfg)
        worst = max(worst, abs(acc))
    return worst


# ---------------------------------------------------------------------------
# Bar cycles


def _mat_key(g: np.ndarray):
    return tuple(complex(np.round(x, 9)) for x in np.asarray(g).ravel())


@dataclass
class BarCycle:
    """An integer combination of inhomogeneous tuples (h_1..h_m) of group
    elements, required to be a cycle for the bar-complex boundary."""

    terms: list  # list of (int coefficient, tuple of matrices)

    def boundary(self) -> list:
        """Nonzero boundary cells as (tuple of matrices, coefficient)."""
        out = {}
        reps = {}
        for coeff, tup in self.terms:
            tup = tuple(np.asarray(h, dtype=complex) for h in tup)
            mlen = len(tup)
            for i in range(mlen + 1):
                if i == 0:
                    ft = tup[1:]
                elif i == mlen:
                    ft = tup[:-1]
                else:
                    ft = tup[:i - 1] + (tup[i] @ tup[i - 1],) + tup[i + 1:]
                sign = 1 if i % 2 == 0 else -1
                key = tuple(_mat_key(h) for h in ft)
                reps[key] = ft
                out[key] = out.get(key, 0) + sign * coeff
        return [(reps[k], v) for k, v in out.items()
                if v != 0 and len(k) > 0]

    def check_cycle(self):
        bad = self.boundary()
        if bad:
            cells = "; ".join(
                f"coeff {v} on ({', '.join(np.array2string(np.asarray(h), precision=4) for h in tup)})"
                for tup, v in bad)
            raise ValueError(
                f"chain is not a cycle; nonzero boundary on {len(bad)} "
                f"cells: {cells}")


def evaluate_on_cycle(cycle: BarCycle, n: int, p: int,
                      cfg: QuadratureConfig = None) -> RegulatorValue:
    """Sum of cs_cocycle over the cycle, after converting each
    inhomogeneous tuple (h_1..h_{2p-1}) to the homogeneous
    (e, h_1, h_2 h_1, ...)."""
    cfg = cfg or QuadratureConfig()
    cycle.check_cycle()
    total = 0.0 + 0.0j
    for coeff, tup in cycle.terms:
        if len(tup) != 2 * p - 1:
            raise ValueError(f"cycle tuples must have length {2 * p - 1}")
        hom = [np.eye(n, dtype=complex)]
        for h in tup:
            hom.append(np.asarray(h, dtype=complex) @ hom[-1])
        total += coeff * cs_cocycle(n, p, hom, cfg).raw
    return RegulatorValue(total, p)


def solution_audit(n: int, p: int, tup, cfg: QuadratureConfig = None):
    """Reduced cs values across distinct transgression solutions (min-norm
    plus each closed basic element); returns the list of reduced values."""
    from .weil import gl_nc_real
    key = (n, p)
    if key not in _TP_CACHE:
        T, L, _ = transgress_qp(n, p)
        _TP_CACHE[key] = (T, L)
    _, L = _TP_CACHE[key]
    extras = [None] + closed_basic_elements(L, 2 * p - 1)
    vals = []
    for extra in extras:
        ev = transgression_evaluator(n, p, extra_element=extra)
        vals.append(cs_cocycle(n, p, tup, cfg, evaluator=ev).reduced)
    return vals
