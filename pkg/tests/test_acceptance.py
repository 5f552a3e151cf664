"""Acceptance suite: one test per criterion, each printing a single PASS/FAIL line.

All arithmetic is exact (int/Fraction); a criterion passes only if every
check holds with zero residual inside its time limit.
"""
import json
import time
from contextlib import contextmanager

from hcd.cli import main
from hcd.corpus import (
    CD_EXAMPLES,
    PASSING,
    bad_pairing_n2,
    bad_theta_n2,
    corrupted_d_pva,
    curved_connection_m2,
    example_data,
    flat_connection_m2,
    heisenberg,
    higher_lambda_n3,
    non_lie_lca,
    non_metric_connection_m2,
    quadratic_lie_n2,
    standard_n2,
    twisted_nonclosed_n2,
)
from hcd.courant_dorfman import (
    check_courant_algebroid,
    check_courant_dorfman_n2,
    compare_n2_checkers,
    constants_equal,
    nondegeneracy_check,
    roundtrip_report,
)
from hcd.current_algebra import (
    DGCA,
    ZeroLocus,
    bfv_differential,
    check_differential,
    check_lie_quotient,
    check_poisson_quotient,
    check_zero_locus,
    formal_bracket_identity,
    hp_sign_table,
    lie_quotient,
    physical_subalgebra_report,
    poisson_quotient,
    poisson_tensor,
    tensor_lca,
    tensor_sampler,
)
from hcd.courant_dorfman import CDStructure, check_axioms, to_theta
from hcd.graded_algebra import Derivation, GeneratorTable, check_square_zero
from hcd.lambda_bracket import (
    cd_from_pva,
    check_lca,
    check_pva,
    lambda_tables_equal,
    pva_from_cd,
    weak_cd_from_lca,
)
from hcd.rothstein import (
    FreeModule,
    Connection,
    RothsteinAlgebra,
    check_bianchi,
    check_rothstein,
    compare_with_darboux,
    metric_report,
)
from hcd.structfile import dumps, loads, to_cd, to_connection
from hcd.symplectic import check_master_equation
from hcd.structfile import to_chart

N2_CORPUS = [name for name, f in CD_EXAMPLES.items() if f().n == 2]


@contextmanager
def criterion(capsys, number, title, limit):
    """Time the block, print one line and fail the test on a miss or overrun."""
    state = {"ok": True, "detail": ""}
    start = time.perf_counter()
    try:
        yield state
    except AssertionError as exc:
        state["ok"] = False
        state["detail"] = str(exc).splitlines()[0] if str(exc) else "assertion failed"
    elapsed = time.perf_counter() - start
    in_time = elapsed < limit
    ok = state["ok"] and in_time
    line = f"criterion {number:2d}: {'PASS' if ok else 'FAIL'} {title} ({elapsed:.2f}s, limit {limit}s)"
    if not in_time:
        line += " [over time]"
    if state["detail"]:
        line += f" [{state['detail']}]"
    with capsys.disabled():
        print("\n" + line)
    assert state["ok"], state["detail"]
    assert in_time, f"took {elapsed:.2f}s, limit {limit}s"


def write(tmp_path, name, data):
    path = tmp_path / f"{name}.json"
    path.write_text(dumps(data))
    return str(path)


def test_criterion_01_axiom_suite(tmp_path, capsys):
    with criterion(capsys, 1, "higher CD axioms on the corpus, Jacobi witness on the non-closed twist", 10 * 5):
        for name in ("standard-n2", "quadratic-lie-n2", "higher-dorfman-n3"):
            start = time.perf_counter()
            assert main(["check", "cd", write(tmp_path, name, example_data(name))]) == 0, name
            assert time.perf_counter() - start < 10, f"{name} over 10s"
        capsys.readouterr()
        start = time.perf_counter()
        path = write(tmp_path, "twisted", example_data("twisted-nonclosed-n2"))
        assert main(["check", "cd", path, "--machine"]) == 1
        assert time.perf_counter() - start < 10
        block = json.loads(capsys.readouterr().out)
        checks = {c["name"]: c for c in block["reports"][0]["checks"]}
        assert checks["jacobi bracket"]["status"] == "fail"
        assert checks["jacobi bracket"]["witnesses"][0]["inputs"] == ["v1", "v2", "v3"]
        assert checks["jacobi bracket"]["witnesses"][0]["residual"] == "dx4"
        failing = [name for name, c in checks.items() if c["status"] == "fail"]
        assert failing == ["jacobi bracket"]


def test_criterion_02_degree_two_reduction(capsys):
    with criterion(capsys, 2, "graded and ungraded checkers agree on every n=2 structure", 5):
        assert set(N2_CORPUS) == {"standard-n2", "quadratic-lie-n2", "twisted-nonclosed-n2", "heisenberg-current"}
        reports = {}
        for name in N2_CORPUS + ["bad-pairing-n2"]:
            cd = bad_pairing_n2() if name == "bad-pairing-n2" else CD_EXAMPLES[name]()
            rep = reports[name] = compare_n2_checkers(cd, samples=10)
            assert rep.passed, f"{name}: {rep.failed()[0].witness}"
        # agreement is meaningful: both sides fail on the broken inputs
        for name in ("twisted-nonclosed-n2", "bad-pairing-n2"):
            assert not reports[name].data["graded_passed"] and not reports[name].data["ungraded_passed"]
        for name in ("standard-n2", "quadratic-lie-n2", "heisenberg-current"):
            assert reports[name].data["graded_passed"] and reports[name].data["ungraded_passed"]


def test_criterion_03_master_equation_round_trip(tmp_path, capsys):
    with criterion(capsys, 3, "build theta solves {Theta,Theta}=0 and from-theta round-trips", 10):
        for name in PASSING:
            cd = CD_EXAMPLES[name]()
            assert nondegeneracy_check(cd).passed
            src = write(tmp_path, name, example_data(name))
            chart_file = str(tmp_path / f"{name}.chart.json")
            cd_file = str(tmp_path / f"{name}.back.json")
            assert main(["build", "theta", src, "-o", chart_file]) == 0, name
            chart, theta = to_chart(loads(open(chart_file).read()))
            assert chart.bracket(theta, theta) == 0
            assert main(["from-theta", chart_file, "-o", cd_file, "--roundtrip"]) == 0, name
            back = to_cd(loads(open(cd_file).read()))
            assert constants_equal(cd.structure_constants(), back.structure_constants()) == [], name
        # the non-closed twist has a non-degenerate pairing but is no CD algebra: its Theta fails
        assert not roundtrip_report(twisted_nonclosed_n2()).passed
        capsys.readouterr()


def test_criterion_04_rothstein(capsys):
    with criterion(capsys, 4, "Rothstein bracket for flat and curved metric connections on m=2", 30):
        for data in (flat_connection_m2(), curved_connection_m2()):
            conn = to_connection(data)
            assert metric_report(conn).passed
            ra = RothsteinAlgebra(conn)
            rep = check_rothstein(ra, samples=200, seed=0)
            assert rep.passed, data["name"]
            assert rep["jacobi"].instances >= 200
            bianchi = check_bianchi(ra, samples=20)
            assert bianchi.passed
            assert all(c.failures == 0 for c in bianchi.checks)
        flat = RothsteinAlgebra(to_connection(flat_connection_m2()))
        cmp = compare_with_darboux(flat, samples=50)
        assert cmp.passed
        assert cmp["generator brackets agree"].instances == len(flat.table) ** 2
        curved = RothsteinAlgebra(to_connection(curved_connection_m2()))
        assert str(curved.r[(0, 1)]) == "2*x2*theta*psi"


def test_criterion_05_pva_bijection(capsys):
    with criterion(capsys, 5, "cd_from_pva and pva_from_cd are inverse; check pva passes", 10):
        for name in PASSING:
            cd = CD_EXAMPLES[name]()
            W = pva_from_cd(cd)
            assert constants_equal(cd.structure_constants(), cd_from_pva(W).structure_constants()) == [], name
            assert lambda_tables_equal(W, pva_from_cd(cd_from_pva(W))) == [], name
            assert check_pva(W, samples=30).passed, name
        # the Lambda-bracket file of the abelian example, read directly
        from hcd.structfile import to_lca

        W = to_lca({"n": 2, "generators": [{"name": "e", "degree": 1}], "lambda": {"e,e": ["0", "1"]}})
        assert lambda_tables_equal(W, pva_from_cd(cd_from_pva(W))) == []


def test_criterion_06_weak_cd(capsys):
    with criterion(capsys, 6, "weak CD axioms on every corpus LCA and on tensor products", 10):
        for name in PASSING:
            assert weak_cd_from_lca(pva_from_cd(CD_EXAMPLES[name]()), samples=30).passed, name
        for factory in (heisenberg, quadratic_lie_n2):
            W = tensor_lca(pva_from_cd(factory()), DGCA.laurent(1, 6))
            rep = weak_cd_from_lca(W, samples=30, sampler=tensor_sampler(W), admissible=W.tensor.admissible)
            assert rep.passed, W.name
            assert rep["jacobi [a,[b,c]] = [[a,b],c] + e[b,[a,c]]"].instances > 0


def test_criterion_07_tensor_lemma(capsys):
    with criterion(capsys, 7, "tensor_lca(C, laurent(1,6)) passes check_lca for two corpus C", 60):
        for factory in (heisenberg, quadratic_lie_n2, standard_n2):
            W = tensor_lca(pva_from_cd(factory()), DGCA.laurent(1, 6))
            rep = check_lca(W, samples=200, sampler=tensor_sampler(W), admissible=W.tensor.admissible)
            assert rep.passed, W.name
            assert rep["jacobi"].instances >= 100


def test_criterion_08_poisson_quotient_and_physical_subalgebra(capsys):
    with criterion(capsys, 8, "P(C,E) axioms and the degree-0 current bracket table", 60):
        for factory in (heisenberg, quadratic_lie_n2):
            Pq = poisson_quotient(tensor_lca(pva_from_cd(factory()), DGCA.laurent(1, 6)))
            rep = check_poisson_quotient(Pq, samples=100)
            assert rep.passed
            assert rep["leibniz mod I"].instances > 0 and rep["jacobi mod I"].instances > 0
        for factory in (quadratic_lie_n2, standard_n2, heisenberg):
            rep = physical_subalgebra_report(factory(), N=6)
            assert rep.passed, factory.__name__
            assert rep["bracket of classes matches modulo the ideal"].instances > 0


def test_criterion_09_formal_distributions(capsys):
    with criterion(capsys, 9, "formal distribution identity, N=5, k=1", 60):
        for factory in (heisenberg, quadratic_lie_n2):
            rep = formal_bracket_identity(pva_from_cd(factory()), N=5, k=1)
            assert rep.passed, factory.__name__
            assert rep.data["coefficients"] == len(factory().table) ** 2 * 81


def test_criterion_10_zero_locus(capsys):
    with criterion(capsys, 10, "zero-locus bracket of degree -n+1 reproduces the physical table", 60):
        from hcd.current_algebra import zero_locus_physical_report, zero_locus_reduce

        for factory in (standard_n2, heisenberg, quadratic_lie_n2):
            cd = factory()
            chart, theta = to_theta(cd)
            P, tt = poisson_tensor(chart, DGCA.laurent(1, 6))
            Zl = zero_locus_reduce(P, bfv_differential(P, theta))
            rep = check_zero_locus(Zl, samples=200, seed=0)
            assert rep.passed, cd.name
            assert rep["reduced bracket has degree -n+1"].instances == 200
            assert zero_locus_physical_report(cd).passed, cd.name
        assert zero_locus_physical_report(quadratic_lie_n2()).data["nonzero classes"] == 486


def _corrupted_bfv():
    cd = standard_n2()
    chart, theta = to_theta(cd)
    P, tt = poisson_tensor(chart, DGCA.laurent(1, 6))
    Z = bfv_differential(P, theta)
    images = dict(Z.images)
    i = tt.table["psi"].id
    images[i] = images[i].scale(2)
    return P, Derivation(tt.table, 1, images)


def _corrupted_curvature_m3():
    M = FreeModule(2, ["x1", "x2", "x3"], [("theta", 1), ("psi", 1)], {("theta", "psi"): 1})
    x1, x2, x3, th, ps = M.table.gens()
    grad = {}
    for x, f in (("x1", x2 * x3), ("x2", x1 * x1), ("x3", x1)):
        grad[(x, "theta")] = f * th
        grad[(x, "psi")] = -(f * ps)
    return RothsteinAlgebra(Connection(M, grad), r_override={(0, 1): (x2 - x1.scale(2)) * th * ps})


def negative_controls():
    """(checker, failing report) for an engineered input per checker."""
    bad_cd = bad_pairing_n2()
    non_lie = non_lie_lca()
    W_non_lie = tensor_lca(non_lie, DGCA.laurent(1, 6))
    P, Zbad = _corrupted_bfv()
    q = quadratic_lie_n2()
    chq, thq = to_theta(q)
    bad_chart, bad_theta = to_chart(bad_theta_n2())
    T = GeneratorTable([("x", 0), ("theta", 1), ("psi", 1)])
    curved = RothsteinAlgebra(to_connection(curved_connection_m2()))
    x2, th, ps = (curved.M.table.gen(v) for v in ("x2", "theta", "psi"))
    return [
        ("check_axioms", check_axioms(twisted_nonclosed_n2(), samples=10)),
        ("check_axioms (sesquilinearity)", check_axioms(bad_cd, samples=10)),
        ("check_courant_dorfman_n2", check_courant_dorfman_n2(bad_cd, samples=10)),
        ("check_courant_algebroid", check_courant_algebroid(bad_cd, samples=10)),
        ("nondegeneracy_check", nondegeneracy_check(CDStructure(2, T, {}, {}, {}))),
        ("check_master_equation", check_master_equation(bad_chart, bad_theta)),
        ("roundtrip_report", roundtrip_report(twisted_nonclosed_n2())),
        ("check_pva (corrupted d)", check_pva(corrupted_d_pva(), samples=10)),
        ("check_lca (Lambda^2 coefficient)", check_lca(higher_lambda_n3(), samples=5)),
        ("check_lca (Jacobi)", check_lca(non_lie, samples=5)),
        ("weak_cd_from_lca", weak_cd_from_lca(non_lie, samples=5)),
        ("check_lie_quotient", check_lie_quotient(lie_quotient(W_non_lie), samples=20)),
        ("check_poisson_quotient", check_poisson_quotient(poisson_quotient(W_non_lie), samples=20)),
        ("physical_subalgebra_report", physical_subalgebra_report(bad_cd, N=4)),
        ("formal_bracket_identity", formal_bracket_identity(non_lie, N=3)),
        ("check_differential (corrupted Z)", check_differential(P, Zbad, samples=10)),
        ("check_zero_locus (corrupted Z)", check_zero_locus(ZeroLocus(P, Zbad), samples=30)),
        ("hp_sign_table (wrong Theta)", hp_sign_table(q, chq, thq.scale(2), DGCA.laurent(1, 6), samples=20)),
        ("square-zero", _report(check_square_zero(Derivation(T, 1, {"x": T.gen("theta"), "theta": T.gen("x") * T.gen("theta")})))),
        ("metric_report (non-metric connection)", metric_report(to_connection(non_metric_connection_m2()))),
        ("check_rothstein (corrupted r)", check_rothstein(RothsteinAlgebra(curved.conn, {(0, 1): (x2 * th * ps).scale(3)}), samples=20)),
        ("check_bianchi (corrupted r)", check_bianchi(_corrupted_curvature_m3(), samples=5)),
        ("compare_with_darboux (curved)", compare_with_darboux(curved, samples=10)),
    ]


def _report(check):
    from hcd.report import Report

    rep = Report(check.name)
    rep.add(check)
    return rep


def test_criterion_11_negative_controls(capsys):
    with criterion(capsys, 11, "every checker fails with a witness on an engineered input", 30):
        controls = negative_controls()
        for name, rep in controls:
            assert not rep.passed, f"{name} did not fail"
            for c in rep.failed():
                assert c.witness is not None, f"{name}: {c.name} has no witness"
        names = {name.split(" ")[0] for name, _ in controls}
        assert len(names) >= 20
