"""Acceptance gate: one test per criterion, each printing one PASS/FAIL
line.  Tolerances are pinned here and must not be loosened."""

import itertools
import json
import time
from fractions import Fraction

import numpy as np

from charclass import matlie
from charclass import regulator as reg
from charclass.cli import main as cli_main
from charclass.exact import QC
from charclass.invpoly import (InvariantPolynomial, chern_poly, pq_split,
                               qp_pair)
from charclass.weil import (embed_invariant, gl_nc_real, is_basic,
                            random_element, restrict_to_un, transgress_qp,
                            u_n_lie, weil_d)


def report(num, name, ok, detail):
    print(f"ACCEPTANCE {num} ({name}): {'PASS' if ok else 'FAIL'} — {detail}")
    assert ok, f"criterion {num} failed: {detail}"


PAIRS = [(1, 1), (2, 1), (2, 2)]


def test_criterion_1_exact_weil_suite():
    t0 = time.time()
    ok = True
    rng = np.random.default_rng(1)
    L2 = gl_nc_real(2)
    for _ in range(10):
        w = random_element(L2, 2, rng)
        ok = ok and weil_d(weil_d(w, L2), L2).is_zero()
    for n, p in PAIRS:
        T, L, Q = transgress_qp(n, p)
        ok = ok and (weil_d(T.element, L) - Q).is_zero()
        ok = ok and is_basic(T.element, L)
        un = u_n_lie(n)
        r = restrict_to_un(T.element, L, un)
        c_emb = embed_invariant(un, InvariantPolynomial(n=n, p=p, kind="C"))
        ok = ok and (weil_d(r, un).scale(QC(2)) - c_emb).is_zero()
    dt = time.time() - t0
    report(1, "exact Weil suite", ok and dt < 10.0,
           f"d2=0, dT=Q, basic, 2dT=C for {PAIRS}; exact; {dt:.2f}s")


def test_criterion_2_invariant_polynomials():
    t0 = time.time()
    rng = np.random.default_rng(2)
    worst = 0.0
    for n in (1, 2, 3):
        zero = np.zeros((n, n), dtype=complex)
        for p in range(1, n + 1):
            for _ in range(100):
                h = matlie.random_hermitian(n, rng)
                anti = 1j * h
                worst = max(worst, abs(qp_pair(n, p, anti, anti.conj())))
                x = matlie.random_gl(n, rng)
                worst = max(worst, abs(chern_poly(n, p, x)
                                       - 2.0 * qp_pair(n, p, x, zero)))
                pp, qq = pq_split(n, p, h)
                worst = max(worst, abs((pp / 1j ** p).imag))
                worst = max(worst, abs((qq / 1j ** (p - 1)).imag))
    dt = time.time() - t0
    report(2, "invariant polynomial suite", worst < 1e-12 and dt < 5.0,
           f"Q|u_n=0, C=2Q(.,0), lattices; worst {worst:.2e}; {dt:.2f}s")


def test_criterion_3_regulator_anchor():
    t0 = time.time()
    rng = np.random.default_rng(3)
    worst = 0.0
    borel_exact = True
    for _ in range(100):
        z = rng.standard_normal() + 1j * rng.standard_normal()
        if abs(z) < 0.05:
            z += 1.0
        tup = [np.eye(1), np.array([[z]])]
        cs = reg.cs_cocycle(1, 1, tup)
        b = reg.borel_cocycle(1, 1, tup)
        worst = max(worst, abs(cs.reduced - np.log(abs(z))))
        borel_exact = borel_exact and (b.raw == 2.0 * cs.raw)
    g = np.array([[3.0 + 4.0j]])
    v1 = reg.cs_cocycle(1, 1, [np.eye(1), g])
    v2 = reg.cs_cocycle(2, 1, [np.eye(2), np.diag([3.0 + 4.0j, 1.0])])
    block = abs(v2.raw - v1.raw)
    dt = time.time() - t0
    ok = worst < 1e-8 and borel_exact and block < 1e-7 and dt < 30.0
    report(3, "regulator anchor", ok,
           f"anchor worst {worst:.2e}, borel=2cs {borel_exact}, "
           f"block {block:.2e}; {dt:.2f}s")


def test_criterion_4_cocycle_and_invariance():
    t0 = time.time()
    rng = np.random.default_rng(4)
    cfg16 = reg.QuadratureConfig(order=16)
    cfg8 = reg.QuadratureConfig(order=8)
    details = []
    ok = True

    for n, p, tol in ((1, 1, 5e-5), (2, 1, 5e-5)):
        tup = [matlie.random_gl(n, rng) for _ in range(2 * p + 1)]
        r = abs(reg.coboundary_residual(n, p, tup, cfg16))
        ok = ok and r < tol
        details.append(f"delta({n},{p})={r:.2e}")

    batch = [[1.5 * matlie.random_gl(2, rng) for _ in range(5)]
             for _ in range(5)]
    worst16 = max(abs(reg.coboundary_residual(2, 2, t, cfg16))
                  for t in batch)
    ok = ok and worst16 < 5e-4
    details.append(f"delta(2,2) worst={worst16:.2e}")

    r8 = abs(reg.coboundary_residual(2, 2, batch[0], cfg8))
    r16 = abs(reg.coboundary_residual(2, 2, batch[0], cfg16))
    halves = r16 <= r8 / 2 or r16 < 1e-8
    ok = ok and halves
    details.append(f"halving {r8:.2e}->{r16:.2e}")

    tup = [matlie.random_gl(2, rng) for _ in range(4)]
    h = matlie.random_gl(2, rng)
    inv = abs(reg.cs_cocycle(2, 2, tup, cfg16).raw
              - reg.cs_cocycle(2, 2, [h @ g for g in tup], cfg16).raw)
    ok = ok and inv < 1e-6
    details.append(f"left-inv {inv:.2e}")

    vals = reg.solution_audit(2, 2, tup, cfg16)
    spread = max(vals) - min(vals)
    ok = ok and spread < 2e-6
    details.append(f"solution spread {spread:.2e} over {len(vals)}")

    dt = time.time() - t0
    ok = ok and dt < 600.0
    report(4, "cocycle and invariance", ok,
           "; ".join(details) + f"; {dt:.1f}s")


def test_criterion_5_exact_forms_suite():
    t0 = time.time()
    from charclass.cwchar import (chern_form, connection_change, cs_rep_for,
                                  curvature_splitting_check, eta_p,
                                  random_connection)
    from charclass.simforms import (Cochain, MonoForm, boundary_sset,
                                    cochain_B, fiber_integrate_B,
                                    prism_complex, random_compatible_form,
                                    restrict_cochain, simplex_sset)
    ok = True
    rng = np.random.default_rng(5)

    # Eq. 3.A.7: B d + d B = restriction difference, on random monomials
    def rand_mono(nv):
        terms = {}
        for _ in range(3):
            e = tuple(int(rng.integers(0, 3)) for _ in range(nv))
            dv = tuple(sorted(rng.choice(nv, size=rng.integers(0, nv),
                                         replace=False).tolist()))
            terms[(e, dv)] = QC(Fraction(int(rng.integers(-4, 5)), 3))
        return MonoForm(nv, terms)

    for _ in range(20):
        w = rand_mono(3)
        lhs = fiber_integrate_B(w.d()) + fiber_integrate_B(w).d()
        rhs = w.at_parameter(QC(1), 0) - w.at_parameter(QC(0), 0)
        ok = ok and (lhs - rhs).is_zero()

    # Eq. 3.A.13: cochain homotopy on prism complexes
    for base in (simplex_sset(2), boundary_sset(2)):
        pc = prism_complex(base)
        for deg in (1, 2):
            vals = {c: int(rng.integers(-5, 6))
                    for c in pc.cells.get(deg, [])}
            tau = Cochain(pc, deg, vals)
            lhs = cochain_B(tau.coboundary()) + cochain_B(tau).coboundary()
            rhs = restrict_cochain(tau, pc, 1) - restrict_cochain(tau, pc, 0)
            for c in base.cells.get(deg, []):
                ok = ok and lhs.value(c) == rhs.value(c)

    # Prop. A.3.3: integration is a chain map
    ss = simplex_sset(2)
    phi = random_compatible_form(ss, 1, rng)
    diff = (phi.d().integrate_to_cochain()
            - phi.integrate_to_cochain().coboundary())
    ok = ok and all(v == QC(0) for v in diff.values.values())

    # Thm. A.4.4(i) and Eq. 3.5.4 and Obs. 3.5.7
    for n, p in ((1, 1), (2, 2)):
        sset = simplex_sset(2 * p)
        c0 = random_connection(sset, n, rng)
        c1 = random_connection(sset, n, rng)
        ok = ok and chern_form(c0, p).d().is_zero()
        eta = eta_p(c0, c1, p)
        ok = ok and (eta.d()
                     - (chern_form(c1, p) - chern_form(c0, p))).is_zero()
        split = curvature_splitting_check(c0, c1)
        ok = ok and split["residual_zero"]

    # 6.1.4: connection change is the cone difference D(eta_p, 0)
    for n, p in ((1, 1), (2, 2)):
        sset = simplex_sset(2 * p - 1)
        c0 = random_connection(sset, n, rng)
        c1 = random_connection(sset, n, rng)
        vals = {c: QC(0) for c in sset.cells[2 * p - 1]}
        rep0 = cs_rep_for(c0, p, Cochain(sset, 2 * p - 1, vals, p=p))
        rep1 = connection_change(rep0, c0, c1)
        eta = eta_p(c0, c1, p)
        ok = ok and ((rep0.top_form - rep1.top_form) - (-eta.d())).is_zero()
        eta_int = eta.integrate_to_cochain()
        for c in sset.cells[2 * p - 1]:
            ok = ok and ((rep1.cochain - rep0.cochain).value(c)
                         == eta_int.value(c))

    dt = time.time() - t0
    report(5, "exact simplicial-forms suite", ok and dt < 60.0,
           f"3.A.7, 3.A.13, chain map, closed c_k, d eta, splitting, "
           f"cone identity; exact; {dt:.1f}s")


def test_criterion_6_filtration_corpus():
    t0 = time.time()
    from charclass.filtration import (CoordSystem, LogMeroForm, parse_form)
    cs = CoordSystem(("z", "w"), ())
    ok = True
    f = parse_form("dz/w^2", cs)
    ok = ok and f.q_level() == 1
    ok = ok and f.restrict_diagonal("z", "w", "t").q_level() == 0
    ok = ok and parse_form("dw^dz/w^2", cs).q_level() == 1
    ok = ok and parse_form("dw", cs).q_level() == 1
    g = parse_form("dz/z", cs)
    ok = ok and g.is_log() and g.q_level() == 1 and g.f_level() == 1

    cs3 = CoordSystem(("z", "w"), ("u",))
    for ez, ew, eu in itertools.product(range(-3, 4), range(-3, 4),
                                        range(0, 4)):
        for r in range(4):
            for wedge in itertools.combinations(range(3), r):
                frm = LogMeroForm(cs3, {((ez, ew, eu), wedge): QC(1)})
                d = frm.d()
                if not d.is_zero():
                    ok = ok and d.q_level() >= frm.q_level()
    dt = time.time() - t0
    report(6, "filtration corpus", ok and dt < 5.0,
           f"6.3.6 classifications and exhaustive d-preserves-Q; {dt:.2f}s")


def test_criterion_7_determinism(tmp_path):
    a = tmp_path / "a.json"
    b = tmp_path / "b.json"
    ra = cli_main(["verify", "--suite", "all", "--seed", "7",
                   "--out", str(a)])
    rb = cli_main(["verify", "--suite", "all", "--seed", "7",
                   "--out", str(b)])
    identical = a.read_bytes() == b.read_bytes()
    report(7, "determinism", ra == 0 and rb == 0 and identical,
           f"verify --suite all --seed 7 byte-identical: {identical}")
