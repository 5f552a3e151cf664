"""Structure files (JSON with an embedded expression grammar).

Expressions use rationals ``p/q``, generator names, ``+ - *``, integer
exponents ``^k`` and parentheses.  Multiplication must be written
explicitly.  A file describes one of

* a Courant-Dorfman presentation: ``n``, ``base``, ``generators``, ``d``,
  ``pairing``, ``bracket`` (optionally ``lambda`` for a Lambda-bracket table);
* a Darboux chart with a Hamiltonian: the same fields plus ``theta``;
* a module with a connection: ``connection`` maps ``"x,a"`` to ``{b: expr}``
  meaning nabla_x e_a = sum_b expr e_b.
"""
from __future__ import annotations

import json
import re
from fractions import Fraction

from .graded_algebra import GeneratorTable, Polynomial, monomial_poly

FIELDS = {
    "name",
    "n",
    "base",
    "generators",
    "d",
    "pairing",
    "bracket",
    "lambda",
    "connection",
    "theta",
    "dgca",
    "extended",
    "seed",
    "samples",
}


class ParseError(ValueError):
    def __init__(self, message: str, src: str = "", pos: int | None = None):
        self.pos = pos
        where = f" at position {pos}" if pos is not None else ""
        text = f"{message}{where}"
        if src and pos is not None:
            text += f"\n  {src}\n  {' ' * pos}^"
        super().__init__(text)


_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z_0-9]*)|(.))")


def _tokenize(src: str):
    out = []
    pos = 0
    while pos < len(src):
        m = _TOKEN.match(src, pos)
        if not m or m.end() == pos:
            break
        start = m.start(m.lastindex) if m.lastindex else m.start()
        if m.group(1) is not None:
            out.append(("num", m.group(1), start))
        elif m.group(2) is not None:
            out.append(("name", m.group(2), start))
        elif m.group(3) is not None and not m.group(3).isspace():
            ch = m.group(3)
            if ch not in "+-*/^()":
                raise ParseError(f"unexpected character {ch!r}", src, start)
            out.append(("op", ch, start))
        pos = m.end()
    out.append(("end", "", len(src)))
    return out


class _Parser:
    def __init__(self, src: str, table: GeneratorTable):
        self.src = src
        self.table = table
        self.toks = _tokenize(src)
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def take(self):
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def error(self, msg, tok=None):
        tok = tok or self.peek()
        raise ParseError(msg, self.src, tok[2])

    def expect(self, value):
        tok = self.take()
        if tok[1] != value:
            self.error(f"expected {value!r}", tok)
        return tok

    def parse(self) -> Polynomial:
        if self.peek()[0] == "end":
            self.error("empty expression")
        out = self.expr()
        if self.peek()[0] != "end":
            self.error("unexpected token (implicit multiplication is not allowed)")
        return out

    def expr(self) -> Polynomial:
        acc = self.term()
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            op = self.take()[1]
            t = self.term()
            acc = acc + t if op == "+" else acc - t
        return acc

    def term(self) -> Polynomial:
        acc = self.unary()
        while self.peek() == ("op", "*", self.peek()[2]):
            self.take()
            acc = acc * self.unary()
        nxt = self.peek()
        if nxt[0] in ("num", "name") or nxt[1] == "(":
            self.error("implicit multiplication is not allowed")
        return acc

    def unary(self) -> Polynomial:
        tok = self.peek()
        if tok[0] == "op" and tok[1] in "+-":
            self.take()
            v = self.unary()
            return -v if tok[1] == "-" else v
        return self.power()

    def power(self) -> Polynomial:
        base, gen = self.atom()
        if self.peek()[0] == "op" and self.peek()[1] == "^":
            hat = self.take()
            sign = 1
            if self.peek()[0] == "op" and self.peek()[1] == "-":
                self.take()
                sign = -1
            num = self.take()
            if num[0] != "num":
                self.error("exponent must be an integer", num)
            k = sign * int(num[1])
            if gen is None:
                if k < 0:
                    self.error("negative exponent of a non-generator", hat)
                return base ** k
            if gen.odd and k >= 2:
                self.error(f"odd generator {gen.name} raised to the power {k}", hat)
            if k < 0 and not gen.invertible:
                self.error(f"negative power of the non-invertible generator {gen.name}", hat)
            if k == 0:
                return self.table.one()
            if gen.odd and k == 1:
                return base
            return monomial_poly(self.table, ((gen.id, k),))
        return base

    def atom(self):
        tok = self.take()
        kind, val, pos = tok
        if kind == "num":
            if self.peek()[0] == "op" and self.peek()[1] == "/":
                self.take()
                den = self.take()
                if den[0] != "num":
                    self.error("malformed rational", den)
                if int(den[1]) == 0:
                    self.error("zero denominator", den)
                return self.table.const(Fraction(int(val), int(den[1]))), None
            return self.table.const(int(val)), None
        if kind == "name":
            if val not in self.table:
                self.error(f"unknown generator {val!r}", tok)
            return self.table.gen(val), self.table[val]
        if val == "(":
            inner = self.expr()
            self.expect(")")
            return inner, None
        self.error("unexpected token", tok)


def parse_expression(src, table: GeneratorTable) -> Polynomial:
    if isinstance(src, (int, Fraction)):
        return table.const(src)
    if not isinstance(src, str):
        raise ParseError(f"expression must be a string or number, got {type(src).__name__}")
    return _Parser(src, table).parse()


def format_expression(f: Polynomial) -> str:
    """Re-parseable text for a polynomial."""
    return str(f)


# ---------------------------------------------------------------------------
# files


def loads(text: str) -> dict:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(f"invalid JSON: {e.msg}", pos=e.pos) from None
    if not isinstance(data, dict):
        raise ParseError("a structure file must be a JSON object")
    unknown = sorted(set(data) - FIELDS)
    if unknown:
        raise ParseError(f"unknown field(s): {', '.join(unknown)}")
    if "n" not in data:
        raise ParseError("missing field 'n'")
    return data


def load(path: str) -> dict:
    import sys

    if path == "-":
        return loads(sys.stdin.read())
    with open(path) as fh:
        return loads(fh.read())


def dumps(data: dict) -> str:
    return json.dumps(data, indent=2, sort_keys=True) + "\n"


def _pair_key(key: str, where: str):
    parts = [p.strip() for p in key.split(",")]
    if len(parts) != 2 or not all(parts):
        raise ParseError(f"{where} key {key!r} must have the form 'a,b'")
    return tuple(parts)


def table_of(data: dict) -> GeneratorTable:
    gens = [(x, 0) for x in data.get("base", [])]
    for g in data.get("generators", []):
        if not isinstance(g, dict) or set(g) - {"name", "degree"} or "name" not in g:
            raise ParseError(f"generator entries need 'name' and 'degree': {g!r}")
        gens.append((g["name"], int(g.get("degree", 0))))
    try:
        return GeneratorTable(gens)
    except ValueError as e:
        raise ParseError(str(e)) from None


def _expr(src, table, where):
    try:
        return parse_expression(src, table)
    except ParseError as e:
        raise ParseError(f"{where}: {e}") from None


def _maps(data: dict, table: GeneratorTable):
    d = {k: _expr(v, table, f"d[{k}]") for k, v in data.get("d", {}).items()}
    pairing = {_pair_key(k, "pairing"): _expr(v, table, f"pairing[{k}]") for k, v in data.get("pairing", {}).items()}
    bracket = {_pair_key(k, "bracket"): _expr(v, table, f"bracket[{k}]") for k, v in data.get("bracket", {}).items()}
    for key in list(d) + [x for k in list(pairing) + list(bracket) for x in k]:
        if key not in table:
            raise ParseError(f"unknown generator {key!r}")
    return d, pairing, bracket


def to_cd(data: dict):
    from .courant_dorfman import CDStructure

    table = table_of(data)
    d, pairing, bracket = _maps(data, table)
    return CDStructure(
        int(data["n"]), table, d, pairing, bracket, extended=bool(data.get("extended", False)), name=data.get("name", "")
    )


def to_lca(data: dict, check: bool = False):
    """The Lambda-bracket algebra of a file: the ``lambda`` table if given, else built from the CD data."""
    from .lambda_bracket import LambdaAlgebra, pva_from_cd

    if "lambda" not in data:
        return pva_from_cd(to_cd(data), check=check)
    table = table_of(data)
    d, _, _ = _maps(data, table)
    values = {}
    for k, v in data["lambda"].items():
        if not isinstance(v, list):
            raise ParseError(f"lambda[{k}] must be a list of coefficients")
        values[_pair_key(k, "lambda")] = [_expr(c, table, f"lambda[{k}]") for c in v]
    return LambdaAlgebra(table, int(data["n"]), d, values, name=data.get("name", ""))


def to_chart(data: dict):
    """Darboux chart and Hamiltonian from a file with a ``theta`` field."""
    from .symplectic import DarbouxChart

    table = table_of(data)
    _, pairing, _ = _maps(data, table)
    pairs, gram = [], {}
    for (a, b), v in pairing.items():
        if not v.is_constant():
            raise ParseError(f"chart pairing {a},{b} must be constant")
        if a == b:
            gram[(a, b)] = v.constant_term()
        else:
            pairs.append((a, b, v.constant_term()))
    chart = DarbouxChart(table, int(data["n"]), pairs, gram)
    theta = _expr(data.get("theta", "0"), table, "theta")
    return chart, theta


def to_connection(data: dict):
    from .rothstein import Connection, FreeModule

    table = table_of(data)
    _, pairing, _ = _maps(data, table)
    module = [(g.name, g.degree) for g in table if g.degree > 0]
    M = FreeModule(int(data["n"]), list(data.get("base", [])), module, pairing)
    grad = {}
    for key, row in data.get("connection", {}).items():
        x, a = _pair_key(key, "connection")
        if x not in M.base or a not in M.module:
            raise ParseError(f"connection key {key!r} must be 'base,module'")
        acc = M.table.zero()
        for b, expr in row.items():
            if b not in M.module:
                raise ParseError(f"connection[{key}] names unknown module generator {b!r}")
            acc = acc + _expr(expr, M.table, f"connection[{key}][{b}]") * M.gen(b)
        grad[(x, a)] = acc
    return Connection(M, grad)


def from_cd(cd, **extra) -> dict:
    """File data for a Courant-Dorfman presentation (given data only; completions are recomputed on load)."""
    t = cd.table
    name = lambda i: t.generators[i].name
    data = {
        "n": cd.n,
        "base": list(cd.base),
        "generators": [{"name": g.name, "degree": g.degree} for g in t if g.degree > 0],
        "d": {name(i): format_expression(v) for i, v in cd.d_images.items()},
        "pairing": {f"{name(i)},{name(j)}": format_expression(v) for (i, j), v in cd.pairing_values.items()},
        "bracket": {f"{name(i)},{name(j)}": format_expression(v) for (i, j), v in cd.given_brackets.items()},
    }
    if cd.extended:
        data["extended"] = True
    if cd.name:
        data["name"] = cd.name
    data.update(extra)
    return data


def from_chart(chart, theta: Polynomial, name: str = "") -> dict:
    t = chart.table
    pairing = {}
    for (i, j), v in chart.values.items():
        if i <= j:
            pairing[f"{t.generators[i].name},{t.generators[j].name}"] = format_expression(v)
    data = {
        "n": chart.n,
        "base": [g.name for g in t if g.degree == 0],
        "generators": [{"name": g.name, "degree": g.degree} for g in t if g.degree > 0],
        "pairing": pairing,
        "theta": format_expression(theta),
    }
    if name:
        data["name"] = name
    return data
