#!/usr/bin/env python3
"""Exact transgression report.

For each (n, p) in {(1,1), (2,1), (2,2)} solve dT_p = Q_p in the basic
subcomplex, and print: term count, coefficient lattice, residual status,
the dimension of the closed basic subspace in the same degree (solution
ambiguity), and the unitary-restriction identity 2 dT_p = C_p.

Usage: python scripts/transgression_report.py
"""

from charclass.exact import QC
from charclass.invpoly import InvariantPolynomial
from charclass.weil import (basic_basis, closed_basic_elements,
                            embed_invariant, restrict_to_un, transgress_qp,
                            u_n_lie, weil_d)


def main():
    for n, p in [(1, 1), (2, 1), (2, 2)]:
        T, L, Q = transgress_qp(n, p)
        residual = weil_d(T.element, L) - Q
        ambient = basic_basis(L, 2 * p - 1)
        closed = closed_basic_elements(L, 2 * p - 1)
        un = u_n_lie(n)
        r = restrict_to_un(T.element, L, un)
        c_emb = embed_invariant(un, InvariantPolynomial(n=n, p=p, kind="C"))
        ident = (weil_d(r, un).scale(QC(2)) - c_emb).is_zero()
        print(f"(n, p) = ({n}, {p})")
        print(f"  terms in T_p:            {len(T.element.terms)}")
        print(f"  coefficient lattice:     {T.lattice}")
        print(f"  dT_p - Q_p:              "
              f"{'exact zero' if residual.is_zero() else 'NONZERO'}")
        print(f"  basic basis, deg 2p-1:   dim {len(ambient)}")
        print(f"  closed basic subspace:   dim {len(closed)} "
              f"(solution is {'unique' if not closed else 'NOT unique'})")
        print(f"  2 d(T_p|u_n) = C_p:      {'holds exactly' if ident else 'FAILS'}")
        print()


if __name__ == "__main__":
    main()
