import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hcd.corpus import CD_EXAMPLES, PASSING, corrupted_d_pva, quadratic_lie_n2, standard_n2
from hcd.courant_dorfman import constants_equal
from hcd.graded_algebra import GeneratorTable, koszul
from hcd.lambda_bracket import (
    LambdaAlgebra,
    LambdaPolynomial,
    cd_from_pva,
    check_lca,
    check_pva,
    lambda_tables_equal,
    pva_from_cd,
    weak_cd_from_lca,
)
from oracles import coefficients


@pytest.fixture(scope="module")
def quad():
    return pva_from_cd(quadratic_lie_n2())


@pytest.fixture(scope="module")
def std():
    return pva_from_cd(standard_n2())


def test_quadratic_lie_brackets(quad):
    e1, e2, e3 = quad.table.gens()
    assert str(quad.lambda_bracket(e1, e2)) == "e3"
    assert str(quad.lambda_bracket(e2, e1)) == "- e3"
    assert str(quad.lambda_bracket(e1, e1)) == "Lambda*1"
    assert quad.lambda_bracket(e1, e1) == LambdaPolynomial([quad.table.zero(), quad.table.one()])


def test_standard_brackets(std):
    x, th, ps = std.table.gens()
    # the pairing enters with sign (-1)^{|a|+1-n}, which is +1 for |theta| = 1, n = 2
    assert str(std.lambda_bracket(th, ps)) == "Lambda*1"
    assert str(std.lambda_bracket(ps, x)) == "1"
    assert str(std.lambda_bracket(ps, x * x)) == "2*x"
    assert str(std.lambda_bracket(x * ps, th)) == "theta + Lambda*x"
    assert std.lam(th, ps) == std.L


def test_leibniz_on_products(std):
    x, th, ps = std.table.gens()
    lhs = std.lam(ps, x * th)
    up = lambda f: f.lift(std.plus)
    rhs = std.lam(ps, x) * up(th) + up(x) * std.lam(ps, th)
    assert lhs == up(th) + std.L * up(x)
    assert lhs == rhs


@pytest.mark.parametrize("name", PASSING)
def test_corpus_passes_pva_axioms(name):
    assert check_pva(pva_from_cd(CD_EXAMPLES[name]()), samples=30).passed


def test_non_lie_bracket_fails():
    T = GeneratorTable([("e", 1)])
    rep = check_lca(LambdaAlgebra(T, 2, {}, {("e", "e"): [T.gen("e")]}), samples=10)
    assert rep.status_of("jacobi") == "fail"
    assert rep["jacobi"].witness.inputs == ("e", "e", "e")


def test_corrupted_differential_fails():
    W = corrupted_d_pva()
    x, th = W.gen("x"), W.gen("theta")
    assert W.d(x) == th
    assert W.d(x * x) == 0
    rep = check_pva(W, samples=10)
    assert rep.status_of("d is a derivation") == "fail"
    w = rep["d is a derivation"].witness
    assert w.inputs == ("x", "x")
    assert w.residual == -(x * th).scale(2)


def test_higher_lambda_power_fails():
    T = GeneratorTable([("x", 0), ("a", 1), ("b", 2)])
    W = LambdaAlgebra(T, 3, {}, {("b", "b"): [0, 0, 1]})
    rep = check_lca(W, samples=5)
    assert [c.name for c in rep.failed()] == ["two-term Lambda-brackets"]
    assert rep["two-term Lambda-brackets"].witness.inputs == ("b", "b")
    with pytest.raises(ValueError):
        cd_from_pva(W)


def test_coefficient_degree_rejected():
    T = GeneratorTable([("e", 1)])
    with pytest.raises(ValueError):
        LambdaAlgebra(T, 2, {}, {("e", "e"): [1]})


@pytest.mark.parametrize("name", PASSING)
def test_round_trip_through_cd(name):
    cd = CD_EXAMPLES[name]()
    W = pva_from_cd(cd)
    back = cd_from_pva(W)
    assert constants_equal(cd.structure_constants(), back.structure_constants()) == []
    assert lambda_tables_equal(W, pva_from_cd(back)) == []


@pytest.mark.parametrize("name", PASSING)
def test_weak_structure_from_lca(name):
    assert weak_cd_from_lca(pva_from_cd(CD_EXAMPLES[name]()), samples=20).passed


def test_weak_structure_table(quad):
    rep = weak_cd_from_lca(quad, samples=5)
    assert rep.data["structure"]["e1,e2"] == {"bracket": "e3", "pairing": "0"}
    assert rep.data["structure"]["e3,e3"] == {"bracket": "0", "pairing": "1"}


@settings(max_examples=40, deadline=None)
@given(st.lists(coefficients, min_size=3, max_size=3), st.lists(coefficients, min_size=3, max_size=3))
def test_constant_sections_match_cd_data(ca, cb):
    cd = quadratic_lie_n2()
    W = pva_from_cd(cd)
    gens = cd.table.gens()
    a = sum((g.scale(c) for g, c in zip(gens, ca)), cd.table.zero())
    b = sum((g.scale(c) for g, c in zip(gens, cb)), cd.table.zero())
    lp = W.lambda_bracket(a, b)
    assert lp.coefficient(0, cd.table) == cd.bracket(a, b)
    assert lp.coefficient(1, cd.table) == cd.pair(a, b).scale(koszul(1 + 1 - 2))


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10_000))
def test_standard_axioms_on_random_elements(seed):
    W = pva_from_cd(standard_n2())
    assert check_lca(W, samples=5, seed=seed).passed


def test_unit_brackets_vanish(std):
    x, th, ps = std.table.gens()
    one = std.table.one()
    for b in (x, th, ps, x * ps):
        assert not std.lambda_bracket(one, b)
        assert not std.lambda_bracket(b, one)
