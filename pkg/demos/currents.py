"""Heisenberg and Kac-Moody type current algebras over Q[t, 1/t][th]."""
from hcd.corpus import heisenberg, quadratic_lie_n2, standard_n2
from hcd.courant_dorfman import to_theta
from hcd.current_algebra import (
    DGCA,
    bfv_differential,
    lie_quotient,
    poisson_tensor,
    tensor_lca,
    zero_locus_physical_report,
)
from hcd.graded_algebra import monomial_poly
from hcd.lambda_bracket import pva_from_cd


def t(tt, k):
    return monomial_poly(tt.table, ((tt.even[0], k),) if k else ())


def main():
    W = tensor_lca(pva_from_cd(heisenberg()), DGCA.laurent(1, 6))
    L = lie_quotient(W)
    tt = W.tensor
    e = tt.table.gen("e")
    for m, k in [(1, -1), (2, -2), (2, 1)]:
        v = L.bracket(e * t(tt, m), e * t(tt, k))
        print(f"[e t^{m}, e t^{k}] = {v}   class: {L.normal_form(v)}")

    W = tensor_lca(pva_from_cd(quadratic_lie_n2()), DGCA.laurent(1, 6))
    L = lie_quotient(W)
    tt = W.tensor
    e1, e2 = tt.table.gen("e1"), tt.table.gen("e2")
    print("[e1 t^2, e2 t^-1] =", L.bracket(e1 * t(tt, 2), e2 * t(tt, -1)))
    print("[e1 t^2, e1 t^-2] =", L.bracket(e1 * t(tt, 2), e1 * t(tt, -2)))

    chart, theta = to_theta(standard_n2())
    P, tt = poisson_tensor(chart, DGCA.laurent(1, 6))
    Z = bfv_differential(P, theta)
    for name in ("x", "psi", "t"):
        print(f"Z({name}) =", Z(tt.table.gen(tt.rename.get(name, name))))
    print(zero_locus_physical_report(standard_n2()))


if __name__ == "__main__":
    main()
