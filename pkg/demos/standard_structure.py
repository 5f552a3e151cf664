"""Check the standard n=2 structure, build its Hamiltonian and rebuild it from the chart."""
from hcd.corpus import standard_n2, twisted_nonclosed_n2
from hcd.courant_dorfman import check_axioms, from_symplectic, roundtrip_report, to_theta
from hcd.lambda_bracket import pva_from_cd


def main():
    cd = standard_n2()
    print(check_axioms(cd, samples=50))

    chart, theta = to_theta(cd)
    print("Theta =", theta)
    back = from_symplectic(chart, theta)
    g = back.gen
    print("[psi, x] =", back.bracket(g("psi"), g("x")), " <theta, psi> =", back.pair(g("theta"), g("psi")))
    print(roundtrip_report(cd))

    W = pva_from_cd(cd)
    x, th, ps = W.table.gens()
    print("{x*psi _L theta} =", W.lambda_bracket(x * ps, th))

    # a non-closed twist breaks Jacobi, and the checker names the triple
    rep = check_axioms(twisted_nonclosed_n2(), samples=20)
    w = rep["jacobi bracket"].witness
    print("twisted: jacobi fails at", w.inputs, "residual", w.residual)


if __name__ == "__main__":
    main()
