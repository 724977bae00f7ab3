import itertools

import numpy as np
import pytest

from charclass import matlie
from charclass import regulator as reg
from charclass.weil import gl_nc_real


def rand_unitary(n, rng):
    q, r = np.linalg.qr(matlie.random_gl(n, rng))
    return q * (np.diag(r) / np.abs(np.diag(r)))


FAST = reg.QuadratureConfig(order=8)


# ---------------------------------------------------------------------------
# configuration objects


def test_quadrature_config_defaults():
    cfg = reg.QuadratureConfig()
    assert cfg.order == 16
    assert cfg.diff_step == 1e-6
    assert cfg.max_m == 4


def test_quadrature_config_rejects_tiny_order():
    with pytest.raises(ValueError):
        reg.QuadratureConfig(order=1)


def test_simplex_spec_rejects_singular_vertex():
    with pytest.raises(matlie.DomainError):
        reg.GeodesicSimplexSpec(2, [np.eye(2), np.zeros((2, 2))])


def test_simplex_spec_rejects_wrong_size():
    with pytest.raises(ValueError):
        reg.GeodesicSimplexSpec(2, [np.eye(3)])


def test_regulator_value_reduction():
    # reduced = coefficient of i^{p-1}
    v1 = reg.RegulatorValue(2.5 + 7.0j, 1)
    assert v1.reduced == 2.5
    v2 = reg.RegulatorValue(2.5 + 7.0j, 2)
    assert v2.reduced == 7.0
    v3 = reg.RegulatorValue(2.5 + 7.0j, 3)
    assert v3.reduced == -2.5


# ---------------------------------------------------------------------------
# geodesic simplices


def test_point_simplex_is_base_point():
    rng = np.random.default_rng(0)
    g = matlie.random_gl(2, rng)
    spec = reg.GeodesicSimplexSpec(2, [g])
    pt = reg.geodesic_simplex_point(spec, [])
    assert np.allclose(pt, matlie.to_base_point(g))


def test_edge_midpoint_closed_form():
    spec = reg.GeodesicSimplexSpec(2, [np.eye(2), np.diag([2.0, 1.0])])
    mid = reg.geodesic_simplex_point(spec, [0.5])
    expected = matlie.geodesic(np.eye(2),
                               matlie.to_base_point(np.diag([2.0, 1.0])), 0.5)
    assert np.allclose(mid, expected)
    assert np.allclose(np.diag(mid), [np.sqrt(2.0), 1.0])


def test_vertices_at_cube_corners():
    rng = np.random.default_rng(0)
    vs = [matlie.random_gl(2, rng) for _ in range(3)]
    spec = reg.GeodesicSimplexSpec(2, vs)
    corners = {0: [0.0, 0.0], 1: [1.0, 0.0], 2: [1.0, 1.0]}
    for i, c in corners.items():
        pt = reg.geodesic_simplex_point(spec, c)
        assert np.max(np.abs(pt - matlie.to_base_point(vs[i]))) < 1e-12


def test_dimension_cap():
    rng = np.random.default_rng(1)
    vs = [matlie.random_gl(1, rng) for _ in range(7)]
    spec = reg.GeodesicSimplexSpec(1, vs)
    with pytest.raises(ValueError):
        reg.geodesic_simplex_point(spec, [0.5] * 6)


# ---------------------------------------------------------------------------
# the p = 1 anchor: cs_cocycle(1, g) = log|g|


def test_p1_anchor_log_abs():
    rng = np.random.default_rng(42)
    worst = 0.0
    for _ in range(20):
        z = rng.standard_normal() + 1j * rng.standard_normal()
        if abs(z) < 0.05:
            z += 1.0
        v = reg.cs_cocycle(1, 1, [np.eye(1), np.array([[z]])])
        worst = max(worst, abs(v.reduced - np.log(abs(z))))
    assert worst < 1e-8


def test_borel_is_twice_cs():
    rng = np.random.default_rng(3)
    g = matlie.random_gl(2, rng)
    tup = [np.eye(2), g]
    cs = reg.cs_cocycle(2, 1, tup)
    b = reg.borel_cocycle(2, 1, tup)
    assert b.raw == 2.0 * cs.raw
    assert b.p == cs.p


def test_block_stability():
    g = np.array([[3.0 + 4.0j]])
    v1 = reg.cs_cocycle(1, 1, [np.eye(1), g])
    g2 = np.diag([3.0 + 4.0j, 1.0])
    v2 = reg.cs_cocycle(2, 1, [np.eye(2), g2])
    assert abs(v2.raw - v1.raw) < 1e-7


def test_tuple_length_enforced():
    with pytest.raises(ValueError):
        reg.cs_cocycle(1, 1, [np.eye(1)])


# ---------------------------------------------------------------------------
# invariance and cocycle identities


def test_left_invariance_p2():
    rng = np.random.default_rng(7)
    tup = [matlie.random_gl(2, rng) for _ in range(4)]
    h = matlie.random_gl(2, rng)
    v = reg.cs_cocycle(2, 2, tup)
    vh = reg.cs_cocycle(2, 2, [h @ g for g in tup])
    assert abs(v.raw - vh.raw) < 1e-6


def test_unitary_tuple_vanishes():
    rng = np.random.default_rng(8)
    tup = [rand_unitary(2, rng) for _ in range(4)]
    v = reg.cs_cocycle(2, 2, tup)
    assert abs(v.raw) < 1e-8


def test_cocycle_identity_n2_p1():
    rng = np.random.default_rng(9)
    tup = [matlie.random_gl(2, rng) for _ in range(3)]
    res = reg.coboundary_residual(2, 1, tup, FAST)
    assert abs(res) < 5e-5


def test_cocycle_identity_n2_p2():
    rng = np.random.default_rng(10)
    tup = [matlie.random_gl(2, rng) for _ in range(5)]
    res = reg.coboundary_residual(2, 2, tup, FAST)
    assert abs(res) < 5e-4


def test_cocycle_residual_improves_with_order():
    rng = np.random.default_rng(11)
    tup = [1.5 * matlie.random_gl(2, rng) for _ in range(5)]
    r4 = abs(reg.coboundary_residual(2, 2, tup, reg.QuadratureConfig(order=4)))
    r8 = abs(reg.coboundary_residual(2, 2, tup, reg.QuadratureConfig(order=8)))
    assert r8 <= r4 / 2 or r8 < 1e-8


def test_p2_raw_value_in_expected_lattice_direction():
    # T_2 has purely imaginary coefficients, so raw lies in iR up to
    # quadrature error and the reduction keeps everything.
    rng = np.random.default_rng(12)
    tup = [matlie.random_gl(2, rng) for _ in range(4)]
    v = reg.cs_cocycle(2, 2, tup)
    assert abs(v.raw.real) < 1e-9
    assert abs(v.raw.imag - v.reduced) < 1e-12


def test_solution_independence_is_uniqueness():
    # the closed basic subspace in the transgression degree is trivial, so
    # the min-norm solution is the only one; the audit returns one value.
    rng = np.random.default_rng(13)
    tup = [matlie.random_gl(2, rng) for _ in range(4)]
    vals = reg.solution_audit(2, 2, tup, FAST)
    assert len(vals) == 1
    spread = max(vals) - min(vals)
    assert spread < 2e-6


# ---------------------------------------------------------------------------
# van Est chain map


def test_vanest_invariant_form_residual_small():
    rng = np.random.default_rng(14)
    ev = reg.transgression_evaluator(2, 1)
    theta = {tuple(idx): c for idx, c in ev.terms}
    tuples = [[matlie.random_gl(2, rng) for _ in range(3)] for _ in range(2)]
    res = reg.vanest_chainmap_check(2, theta, tuples, FAST)
    assert res < 1e-8


def test_vanest_residual_decreases_with_order():
    rng = np.random.default_rng(15)
    ev = reg.transgression_evaluator(2, 1)
    theta = {tuple(idx): c for idx, c in ev.terms}
    tuples = [[matlie.random_gl(2, rng) for _ in range(3)]]
    r4 = reg.vanest_chainmap_check(2, theta, tuples,
                                   reg.QuadratureConfig(order=4))
    r16 = reg.vanest_chainmap_check(2, theta, tuples,
                                    reg.QuadratureConfig(order=16))
    # order 4 already resolves this smooth integrand; both residuals sit at
    # the finite-difference noise floor, so only require no regression
    # beyond it
    assert r16 <= max(r4, 1e-9)


def test_vanest_algebraic_differential_vanishes_on_p_forms():
    # [p, p] lands in k for this symmetric pair, so the induced
    # differential of any horizontal form is zero.
    L = gl_nc_real(2)
    pidx = sorted(L.p_indices)
    for picks in itertools.combinations(pidx, 2):
        d = reg.vanest_dform(L, {picks: 1.0})
        assert d == {}


def test_vanest_noninvariant_form_fails_cocycle():
    # a single covector is not Ad(K)-invariant; the integral functional is
    # not a cocycle even though the algebraic differential vanishes.
    rng = np.random.default_rng(16)
    L = gl_nc_real(2)
    pidx = sorted(L.p_indices)
    tuples = [[matlie.random_gl(2, rng) for _ in range(3)]]
    res = reg.vanest_chainmap_check(2, {(pidx[0],): 1.0}, tuples, FAST)
    assert res > 1e-4


@pytest.mark.xfail(reason="termwise algebraic differential vanishes for a "
                          "symmetric pair, so non-invariant inputs cannot "
                          "satisfy the chain-map identity", strict=True)
def test_vanest_noninvariant_form_small_residual():
    rng = np.random.default_rng(16)
    L = gl_nc_real(2)
    pidx = sorted(L.p_indices)
    tuples = [[matlie.random_gl(2, rng) for _ in range(3)]]
    res = reg.vanest_chainmap_check(2, {(pidx[0],): 1.0}, tuples, FAST)
    assert res < 1e-5


# ---------------------------------------------------------------------------
# bar cycles


def test_single_tuples_are_cycles():
    g = np.array([[2.0]])
    cyc = reg.BarCycle([(1, (g,))])
    assert cyc.boundary() == []
    v = reg.evaluate_on_cycle(cyc, 1, 1)
    assert abs(v.reduced - np.log(2.0)) < 1e-8


def test_cycle_evaluation_is_linear():
    g = np.array([[3.0 + 4.0j]])
    cyc = reg.BarCycle([(2, (g,))])
    v = reg.evaluate_on_cycle(cyc, 1, 1)
    assert abs(v.reduced - 2.0 * np.log(5.0)) < 1e-8


def test_non_cycle_rejected_with_boundary_cells():
    rng = np.random.default_rng(17)
    tup = tuple(matlie.random_gl(1, rng) for _ in range(3))
    bad = reg.BarCycle([(1, tup)])
    with pytest.raises(ValueError, match="nonzero boundary"):
        bad.check_cycle()


def test_cycle_tuple_degree_enforced():
    g = np.array([[2.0]])
    cyc = reg.BarCycle([(1, (g, g, g))])
    # boundary cancels pairwise for commuting entries? verify first
    with pytest.raises(ValueError):
        reg.evaluate_on_cycle(cyc, 1, 1)


def test_antisymmetrized_commuting_cycle():
    mats = [np.diag([2.0, 1.0 + 1.0j]), np.diag([1.0 + 2.0j, 3.0]),
            np.diag([0.5 - 0.5j, 2.0j])]
    terms = []
    for perm in itertools.permutations(range(3)):
        sgn = 1
        for i in range(3):
            for j in range(i + 1, 3):
                if perm[i] > perm[j]:
                    sgn = -sgn
        terms.append((sgn, tuple(mats[i] for i in perm)))
    cyc = reg.BarCycle(terms)
    cyc.check_cycle()  # commuting entries make the alternation a cycle
    v = reg.evaluate_on_cycle(cyc, 2, 2, FAST)
    # simultaneously diagonal vertices span a 2-flat, so a 3-form integrates
    # to zero over the degenerate simplices
    assert abs(v.raw) < 1e-10


def test_zero_chain():
    v = reg.evaluate_on_cycle(reg.BarCycle([]), 1, 1)
    assert v.raw == 0.0
