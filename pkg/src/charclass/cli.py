"""Command-line front end.

Commands: transgress, cocycle, cs-flat, verify, filt.  Every command is a
thin shell over a library call; randomized suites are seeded and
reproducible.  Exit codes: 0 success, 1 verification failure, 2 usage
error, 3 I/O error.  The env var CHARCLASS_THREADS caps the worker count
for per-row cocycle evaluation.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import matlie
from .filtration import CoordSystem, FormSyntaxError, classify, parse_form
from .regulator import (BarCycle, QuadratureConfig, cs_cocycle,
                        evaluate_on_cycle)


@dataclass
class RunConfig:
    command: str
    n: int = 1
    p: int = 1
    input_path: str = ""
    output_path: str = ""
    quadrature: QuadratureConfig = field(default_factory=QuadratureConfig)
    arithmetic: str = "exact"
    seed: int = 7

    def __post_init__(self):
        if not (1 <= self.p <= self.n <= 4):
            raise ValueError("need 1 <= p <= n <= 4")
        if not (2 <= self.quadrature.order <= 64):
            raise ValueError("quadrature order must lie in [2, 64]")


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("CHARCLASS_THREADS", "1")))
    except ValueError:
        return 1


def _fmt(x: float) -> str:
    return f"{x:.15g}"


# ---------------------------------------------------------------------------
# transgress


def cmd_transgress(args) -> int:
    from .weil import embed_invariant, restrict_to_un, transgress_qp, weil_d
    cfg = RunConfig("transgress", n=args.n, p=args.p)
    T, L, Q = transgress_qp(cfg.n, cfg.p)
    residual = weil_d(T.element, L) - Q
    res_line = "exact zero" if residual.is_zero() else "NONZERO"
    report = {
        "n": cfg.n,
        "p": cfg.p,
        "lattice": T.lattice,
        "terms": T.to_json(),
        "residual_dT_minus_Q": res_line,
    }
    text = json.dumps(report, indent=2, sort_keys=True)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    print(f"transgression T_{cfg.p} over gl_{cfg.n}: "
          f"{len(T.element.terms)} terms, residual {res_line}",
          file=sys.stderr)
    return 0 if residual.is_zero() else 1


# ---------------------------------------------------------------------------
# cocycle


def _load_tuples(path):
    with open(path) as fh:
        data = json.load(fh)
    out = []
    for row in data:
        tid = row.get("id", len(out))
        mats = [matlie.mat_from_json(m) for m in row["matrices"]]
        out.append((tid, mats))
    return out


def cmd_cocycle(args) -> int:
    cfg = RunConfig("cocycle", n=args.n, p=args.p,
                    quadrature=QuadratureConfig(order=args.order))
    half = QuadratureConfig(order=max(2, cfg.quadrature.order // 2))
    rows = _load_tuples(args.tuples)
    failures = 0

    def one(item):
        tid, mats = item
        v = cs_cocycle(cfg.n, cfg.p, mats, cfg.quadrature)
        v2 = cs_cocycle(cfg.n, cfg.p, mats, half)
        return (tid, v, abs(v.raw - v2.raw))

    results = []
    with ThreadPoolExecutor(max_workers=_threads()) as ex:
        futures = [(tid, ex.submit(one, (tid, mats))) for tid, mats in rows]
        for tid, fut in futures:
            try:
                results.append(fut.result())
            except (ValueError, matlie.DomainError) as exc:
                print(f"row {tid}: {exc}", file=sys.stderr)
                failures += 1

    out = open(args.out, "w", newline="") if args.out else sys.stdout
    try:
        w = csv.writer(out)
        w.writerow(["tuple_id", "p", "n", "raw_re", "raw_im",
                    "reduced", "est_error"])
        for tid, v, err in results:
            w.writerow([tid, cfg.p, cfg.n, _fmt(v.raw.real),
                        _fmt(v.raw.imag), _fmt(v.reduced), _fmt(err)])
    finally:
        if args.out:
            out.close()
    return 1 if failures else 0


# ---------------------------------------------------------------------------
# cs-flat


def cmd_cs_flat(args) -> int:
    cfg = RunConfig("cs-flat", n=args.n, p=args.p,
                    quadrature=QuadratureConfig(order=args.order))
    with open(args.cycle) as fh:
        data = json.load(fh)
    terms = [(int(t["coeff"]),
              tuple(matlie.mat_from_json(m) for m in t["matrices"]))
             for t in data["terms"]]
    cycle = BarCycle(terms)
    v = evaluate_on_cycle(cycle, cfg.n, cfg.p, cfg.quadrature)
    print(json.dumps({
        "n": cfg.n, "p": cfg.p,
        "raw": [v.raw.real, v.raw.imag],
        "reduced": v.reduced,
    }, sort_keys=True))
    return 0


# ---------------------------------------------------------------------------
# filt


def cmd_filt(args) -> int:
    boundary = [s for s in args.boundary.split(",") if s]
    interior = [s for s in args.interior.split(",") if s]
    coords = CoordSystem(tuple(boundary), tuple(interior))
    try:
        form = parse_form(args.expr, coords)
    except FormSyntaxError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return 2
    print(classify(form))
    return 0


# ---------------------------------------------------------------------------
# verify


def _suite_weil(seed):
    from .exact import QC
    from .invpoly import InvariantPolynomial
    from .weil import (embed_invariant, gl_nc_real, random_element,
                       restrict_to_un, transgress_qp, un_substitution,
                       weil_d)
    checks = []
    rng = np.random.default_rng(seed)
    L2 = gl_nc_real(2)
    ok = True
    for _ in range(10):
        w = random_element(L2, 2, rng)
        ok = ok and weil_d(weil_d(w, L2), L2).is_zero()
    checks.append(("d_squared_zero_gl2", ok, "exact"))
    for (n, p) in [(1, 1), (2, 1), (2, 2)]:
        T, L, Q = transgress_qp(n, p)
        res = weil_d(T.element, L) - Q
        checks.append((f"dT_eq_Q_n{n}_p{p}", res.is_zero(), "exact"))
        from .weil import u_n_lie
        Ln = u_n_lie(n)
        r = restrict_to_un(T.element, L, Ln)
        c_emb = embed_invariant(Ln, InvariantPolynomial(n=n, p=p, kind="C"))
        two_dr = weil_d(r, Ln).scale(QC(2)) - c_emb
        checks.append((f"two_dT_eq_C_n{n}_p{p}", two_dr.is_zero(), "exact"))
    return checks


def _suite_forms(seed):
    from .simforms import (cochain_B, prism_complex, random_compatible_form,
                           restrict_cochain, simplex_sset)
    checks = []
    rng = np.random.default_rng(seed)
    ss = simplex_sset(2)
    phi = random_compatible_form(ss, 1, rng)
    lhs = phi.d().integrate_to_cochain()
    rhs = phi.integrate_to_cochain().coboundary()
    diff = lhs - rhs
    from .exact import QC
    checks.append(("chain_map_delta_int",
                   all(v == QC(0) for v in diff.values.values()), "exact"))
    return checks


def _suite_cwchar(seed):
    from .cwchar import (bianchi_residual, chern_form, curvature,
                         eta_p, random_connection)
    from .simforms import simplex_sset
    checks = []
    rng = np.random.default_rng(seed)
    ss = simplex_sset(2)
    conn = random_connection(ss, 2, rng)
    theta = curvature(conn)
    checks.append(("bianchi", bianchi_residual(conn), "exact"))
    c2 = chern_form(conn, 2)
    checks.append(("chern_closed", c2.d().is_zero(), "exact"))
    conn2 = random_connection(ss, 2, rng)
    eta = eta_p(conn, conn2, 2)
    diff = eta.d() - (chern_form(conn2, 2) - chern_form(conn, 2))
    checks.append(("transgression_d_eta", diff.is_zero(), "exact"))
    return checks


def _suite_regulator(seed):
    checks = []
    rng = np.random.default_rng(seed)
    cfg = QuadratureConfig(order=8)
    ok = True
    worst = 0.0
    for _ in range(5):
        z = rng.standard_normal() + 1j * rng.standard_normal()
        if abs(z) < 0.1:
            z += 1.0
        v = cs_cocycle(1, 1, [np.eye(1), np.array([[z]])], cfg)
        worst = max(worst, abs(v.reduced - np.log(abs(z))))
    checks.append(("p1_anchor_log_abs", worst < 1e-8, f"worst {worst:.3e}"))
    from .regulator import coboundary_residual
    tup = [matlie.random_gl(2, rng) for _ in range(3)]
    res = abs(coboundary_residual(2, 1, tup, cfg))
    checks.append(("cocycle_identity_n2_p1", res < 5e-5, f"{res:.3e}"))
    utup = []
    for _ in range(2):
        q, r = np.linalg.qr(matlie.random_gl(1, rng))
        utup.append(q * (np.diag(r) / np.abs(np.diag(r))))
    v = cs_cocycle(1, 1, utup, cfg)
    checks.append(("unitary_vanishing", abs(v.raw) < 1e-8,
                   f"{abs(v.raw):.3e}"))
    return checks


def _suite_filtration(seed):
    cs = CoordSystem(("z", "w"), ())
    checks = []
    f = parse_form("dz/w^2", cs)
    checks.append(("q1_dz_over_w2", f.q_level() == 1, str(f.q_level())))
    r = f.restrict_diagonal("z", "w", "t")
    checks.append(("diagonal_drops_q", r.q_level() == 0, str(r.q_level())))
    g = parse_form("dw^dz/w^2", cs)
    checks.append(("q1_not_q2_2form", g.q_level() == 1, str(g.q_level())))
    h = parse_form("dz/z", cs)
    checks.append(("disc_log_f1_q1",
                   h.is_log() and h.f_level() == 1 and h.q_level() == 1,
                   classify(h)))
    import itertools
    ok = True
    cs3 = CoordSystem(("z", "w"), ("u",))
    from .exact import QC
    from .filtration import LogMeroForm
    for ez in range(-3, 4):
        for ew in range(-3, 4):
            for eu in range(0, 4):
                for r_ in range(4):
                    for wg in itertools.combinations(range(3), r_):
                        frm = LogMeroForm(cs3, {((ez, ew, eu), wg): QC(1)})
                        d = frm.d()
                        if not d.is_zero() and d.q_level() < frm.q_level():
                            ok = False
    checks.append(("d_preserves_q_corpus", ok, "exhaustive [-3,3]^2 x [0,3]"))
    return checks


_SUITES = {
    "weil": _suite_weil,
    "forms": _suite_forms,
    "cwchar": _suite_cwchar,
    "regulator": _suite_regulator,
    "filtration": _suite_filtration,
}


def cmd_verify(args) -> int:
    names = list(_SUITES) if args.suite == "all" else [args.suite]
    if any(nm not in _SUITES for nm in names):
        print(f"unknown suite {args.suite!r}; choose from "
              f"{sorted(_SUITES)} or 'all'", file=sys.stderr)
        return 2
    report = {"seed": args.seed, "suites": {}}
    all_ok = True
    for nm in names:
        checks = _SUITES[nm](args.seed)
        report["suites"][nm] = [
            {"check": c, "pass": bool(ok), "detail": detail}
            for c, ok, detail in checks
        ]
        all_ok = all_ok and all(ok for _, ok, _ in checks)
    text = json.dumps(report, indent=2, sort_keys=True)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    print(f"verify: seed {args.seed}, "
          f"{'all checks passed' if all_ok else 'FAILURES present'}",
          file=sys.stderr)
    return 0 if all_ok else 1


# ---------------------------------------------------------------------------
# entry point


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="charclass",
        description="Transgression forms, regulator cocycles, and "
                    "logarithmic-form filtrations.")
    sub = ap.add_subparsers(dest="command", required=True)

    t = sub.add_parser("transgress", help="solve dT_p = Q_p exactly")
    t.add_argument("--n", type=int, required=True)
    t.add_argument("--p", type=int, required=True)
    t.add_argument("--out", default="")
    t.set_defaults(func=cmd_transgress)

    c = sub.add_parser("cocycle", help="evaluate cs_cocycle on tuples")
    c.add_argument("--n", type=int, required=True)
    c.add_argument("--p", type=int, required=True)
    c.add_argument("--tuples", required=True,
                   help="JSON list of {id, matrices}")
    c.add_argument("--order", type=int, default=16)
    c.add_argument("--out", default="")
    c.set_defaults(func=cmd_cocycle)

    f = sub.add_parser("cs-flat", help="evaluate on a bar cycle")
    f.add_argument("--n", type=int, required=True)
    f.add_argument("--p", type=int, required=True)
    f.add_argument("--cycle", required=True,
                   help="JSON {terms: [{coeff, matrices}]}")
    f.add_argument("--order", type=int, default=16)
    f.set_defaults(func=cmd_cs_flat)

    v = sub.add_parser("verify", help="run a named verification suite")
    v.add_argument("--suite", default="all")
    v.add_argument("--seed", type=int, default=7)
    v.add_argument("--out", default="")
    v.set_defaults(func=cmd_verify)

    g = sub.add_parser("filt", help="classify a logarithmic/meromorphic form")
    g.add_argument("expr")
    g.add_argument("--boundary", default="z,w",
                   help="comma-separated boundary variables")
    g.add_argument("--interior", default="",
                   help="comma-separated interior variables")
    g.set_defaults(func=cmd_filt)

    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    try:
        return args.func(args)
    except (FileNotFoundError, IsADirectoryError, PermissionError,
            json.JSONDecodeError) as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return 3
    except ValueError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
