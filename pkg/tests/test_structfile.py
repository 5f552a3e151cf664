from fractions import Fraction

import pytest
from hypothesis import given, settings

from hcd.corpus import CD_EXAMPLES, example_data, example_names
from hcd.courant_dorfman import constants_equal
from hcd.graded_algebra import GeneratorTable
from hcd.structfile import (
    ParseError,
    dumps,
    format_expression,
    loads,
    parse_expression,
    table_of,
    to_cd,
    to_chart,
    to_connection,
    to_lca,
)
from oracles import TABLE, polynomials

T = GeneratorTable([("x", 0), ("theta", 1), ("psi", 1), ("t", 0, True)])


def test_parse_examples():
    x, th, ps, t = T.gens()
    f = parse_expression("3/2*x^2*theta", T)
    assert f.terms == {((0, 2), (1, 1)): Fraction(3, 2)}
    assert parse_expression("theta*psi + psi*theta", T) == 0
    assert parse_expression("x*(x+1)", T) == x * x + x
    assert parse_expression("(x - 1)^3", T) == (x - 1) * (x - 1) * (x - 1)
    assert parse_expression("psi*theta", T) == -(th * ps)
    assert parse_expression("-x^0 + 2", T) == 1
    assert str(parse_expression("t^-2*x", T)) == "x*t^-2"
    assert parse_expression(Fraction(1, 3), T) == T.const(Fraction(1, 3))


@pytest.mark.parametrize(
    ("src", "pos", "fragment"),
    [
        ("2x", 1, "implicit multiplication"),
        ("y", 0, "unknown generator"),
        ("theta^2", 5, "odd generator"),
        ("1/0", 2, "zero denominator"),
        ("1/", 2, "malformed rational"),
        ("x^-1", 1, "negative power"),
        ("", 0, "empty expression"),
        ("x +", 3, "unexpected token"),
        ("x $ 1", 2, "unexpected character"),
        ("(x", 2, "expected ')'"),
    ],
)
def test_parse_errors_report_position(src, pos, fragment):
    with pytest.raises(ParseError) as err:
        parse_expression(src, T)
    assert err.value.pos == pos
    assert fragment in str(err.value)
    assert f"at position {pos}" in str(err.value)


@settings(max_examples=60, deadline=None)
@given(polynomials())
def test_format_reparses(f):
    assert parse_expression(format_expression(f), TABLE) == f


def test_unknown_field_rejected():
    with pytest.raises(ValueError):
        loads('{"n": 2, "colour": "red"}')
    with pytest.raises(ValueError):
        loads('{"base": []}')


@pytest.mark.parametrize("name", example_names())
def test_corpus_files_round_trip(name):
    data = example_data(name)
    again = loads(dumps(data))
    assert again == data
    table = table_of(again)
    for section in ("d", "pairing", "bracket"):
        for key, expr in again.get(section, {}).items():
            f = parse_expression(expr, table)
            assert parse_expression(format_expression(f), table) == f


@pytest.mark.parametrize("name", list(CD_EXAMPLES))
def test_cd_files_rebuild_the_structure(name):
    cd = CD_EXAMPLES[name]()
    back = to_cd(example_data(name))
    assert constants_equal(cd.structure_constants(), back.structure_constants()) == []
    assert back.name == name


def test_lambda_field():
    data = {
        "n": 2,
        "generators": [{"name": "e", "degree": 1}],
        "lambda": {"e,e": ["0", "1"]},
    }
    W = to_lca(data)
    assert str(W.lambda_bracket(W.gen("e"), W.gen("e"))) == "Lambda*1"


def test_chart_and_connection_builders():
    data = {
        "n": 2,
        "base": ["x"],
        "generators": [{"name": "theta", "degree": 1}, {"name": "psi", "degree": 1}, {"name": "p", "degree": 2}],
        "pairing": {"x,p": "1", "theta,psi": "1"},
        "theta": "-p*theta",
    }
    chart, theta = to_chart(data)
    assert str(theta) == "- theta*p"
    assert chart.bracket(chart.table.gen("x"), chart.table.gen("p")) == 1
    conn = to_connection(example_data("curved-connection-m2"))
    assert str(conn.grad[(0, "theta")]) == "x2^2*theta"
