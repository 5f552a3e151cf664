"""Metric connections, curvature and the Rothstein-type graded Poisson algebra.

The setting is a free module over a polynomial base: base coordinates x_i
(degree 0), module generators e_a of degrees 1..n-1 with a constant
non-degenerate pairing, and coordinate derivations D_i (degree n).  A
connection is stored by its values on frames, ``grad[i][a] = nabla_i e_a``.

With the pairing written as the degree -n Poisson bracket {e_a, e_b}, the
Rothstein bracket is generated by

    {D_i, f}   = -d_i f          (f in the base)
    {D_i, e}   = -nabla_i e
    {D_i, D_j} = -r(D_i, D_j)
    {e_a, e_b} = <e_a, e_b>

where r(D_i, D_j) is the quadratic element with {x, r} = R(D_i, D_j) x.
"""
from __future__ import annotations

import itertools
import random
from fractions import Fraction

from .graded_algebra import Derivation, GeneratorTable, Polynomial, monomial_poly, partial
from .linalg import inverse, solve
from .report import Report
from .symplectic import DarbouxChart, PoissonAlgebra


class FreeModule:
    """Polynomial base ring with module generators and a constant pairing."""

    def __init__(self, n: int, base: list[str], module: list[tuple[str, int]], pairing: dict):
        self.n = n
        self.base = list(base)
        self.module = [name for name, _ in module]
        for name, k in module:
            if not 1 <= k <= n - 1:
                raise ValueError(f"module generator {name} has degree {k}, outside 1..{n - 1}")
        self.table = GeneratorTable([(x, 0) for x in base] + list(module))
        self.pairing = PoissonAlgebra(
            self.table, n, {k: v for k, v in pairing.items()}, check_degrees=True, strict_skew=False
        )
        self.gram = [[self.pair(self.gen(a), self.gen(b)).constant_term() for b in self.module] for a in self.module]
        try:
            self.gram_inverse = inverse(self.gram)
        except ValueError:
            raise ValueError("the pairing is degenerate") from None
        for a in self.module:
            for b in self.module:
                v = self.pair(self.gen(a), self.gen(b))
                if not v.is_constant():
                    raise ValueError("the pairing must be constant")

    def gen(self, name: str) -> Polynomial:
        return self.table.gen(name)

    def degree(self, name: str) -> int:
        return self.table[name].degree

    def pair(self, x: Polynomial, y: Polynomial) -> Polynomial:
        return self.pairing.bracket(x, y)

    def components(self, x: Polynomial) -> dict:
        """Module element -> {generator name: base coefficient}."""
        out: dict = {}
        mids = {self.table[a].id: a for a in self.module}
        for m, c in x.terms.items():
            mod = [(i, e) for i, e in m if i in mids]
            if len(mod) != 1 or mod[0][1] != 1:
                raise ValueError(f"{x} is not linear in the module generators")
            base = tuple((i, e) for i, e in m if i not in mids)
            a = mids[mod[0][0]]
            out[a] = out.get(a, self.table.zero()) + monomial_poly(self.table, base, c)
        return out


class Connection:
    """nabla_{d_i} e_a = grad[i][a]; extended by the Leibniz rule and base-linearity in D."""

    def __init__(self, M: FreeModule, grad: dict | None = None):
        self.M = M
        grad = grad or {}
        self.grad = {}
        for i, x in enumerate(M.base):
            for a in M.module:
                v = grad.get((x, a), grad.get((i, a), M.table.zero()))
                v = v if isinstance(v, Polynomial) else M.table.const(v)
                if v:
                    M.components(v)
                    if v.degrees() != {M.degree(a)}:
                        raise ValueError(f"nabla_{x} {a} must have degree {M.degree(a)}")
                self.grad[(i, a)] = v
        self._derivations = {}

    def derivation(self, i: int) -> Derivation:
        """nabla_{d_i} as a degree-0 derivation of the symmetric algebra."""
        X = self._derivations.get(i)
        if X is None:
            M = self.M
            images = {M.table[M.base[i]].id: M.table.one()}
            for a in M.module:
                if self.grad[(i, a)]:
                    images[M.table[a].id] = self.grad[(i, a)]
            X = Derivation(M.table, 0, images)
            self._derivations[i] = X
        return X

    def covariant(self, D: dict, x: Polynomial) -> Polynomial:
        """nabla_D x for D = sum_i D[i] d_i with base coefficients D[i]."""
        acc = self.M.table.zero()
        for i, coeff in D.items():
            acc = acc + coeff * self.derivation(i)(x)
        return acc

    def __call__(self, i: int, x: Polynomial) -> Polynomial:
        return self.derivation(i)(x)


def metric_report(conn: Connection) -> Report:
    """d_i <x,y> = <nabla_i x, y> + <x, nabla_i y> on all generator pairs."""
    M = conn.M
    rep = Report("metric connection")
    chk = rep.new("d<x,y> = <nabla x,y> + <x,nabla y>")
    for i, xi in enumerate(M.base):
        d = partial(M.table, xi)
        for a in M.module:
            for b in M.module:
                x, y = M.gen(a), M.gen(b)
                res = d(M.pair(x, y)) - M.pair(conn(i, x), y) - M.pair(x, conn(i, y))
                chk.record((xi, a, b), res)
    return rep


def metricize(conn: Connection) -> Connection:
    """<nabla x, y> = 1/2 (<nabla~ x, y> - <x, nabla~ y> + d<x,y>), solved with the inverse Gram matrix."""
    M = conn.M
    G_inv = M.gram_inverse
    grad = {}
    for i, xi in enumerate(M.base):
        d = partial(M.table, xi)
        for ai, a in enumerate(M.module):
            x = M.gen(a)
            rhs = []
            for b in M.module:
                y = M.gen(b)
                rhs.append((M.pair(conn(i, x), y) - M.pair(x, conn(i, y)) + d(M.pair(x, y))).scale(Fraction(1, 2)))
            # <nabla x, e_c> = sum_b c_b G_bc, so c = rhs G^{-1}
            acc = M.table.zero()
            for bi, b in enumerate(M.module):
                coeff = M.table.zero()
                for ci in range(len(M.module)):
                    if G_inv[ci][bi]:
                        coeff = coeff + rhs[ci].scale(G_inv[ci][bi])
                acc = acc + coeff * M.gen(b)
            grad[(xi, a)] = acc
    return Connection(M, grad)


def curvature_operator(conn: Connection, i: int, j: int, x: Polynomial) -> Polynomial:
    """R(d_i, d_j) x; coordinate derivations commute, so no third term."""
    return conn(i, conn(j, x)) - conn(j, conn(i, x))


def _quadratic_basis(M: FreeModule) -> list[tuple[str, str]]:
    out = []
    for a, b in itertools.combinations_with_replacement(M.module, 2):
        if M.degree(a) + M.degree(b) != M.n:
            continue
        if a == b and M.table[a].odd:
            continue
        out.append((a, b))
    return out


def curvature(conn: Connection, i: int, j: int) -> Polynomial:
    """The quadratic r(d_i, d_j) of degree n with {x, r} = R(d_i, d_j) x on every generator."""
    M = conn.M
    basis = _quadratic_basis(M)
    # Q-linear map c -> ({e_c, q})_c on quadratic monomials; solved per base monomial
    def comps(v):
        return M.components(v) if v else {}

    cols = []
    for a, b in basis:
        q = M.gen(a) * M.gen(b)
        cols.append({c: comps(M.pair(M.gen(c), q)) for c in M.module})
    targets = {c: comps(curvature_operator(conn, i, j, M.gen(c))) for c in M.module}
    base_monos = set()
    for comp in targets.values():
        for v in comp.values():
            base_monos |= set(v.terms)
    rows_keys = [(c, b) for c in M.module for b in M.module]
    r = M.table.zero()
    for bm in sorted(base_monos):
        A = [[col[c].get(b, M.table.zero()).coefficient(()) for col in cols] for c, b in rows_keys]
        rhs = [targets[c].get(b, M.table.zero()).coefficient(bm) for c, b in rows_keys]
        sol = solve(A, rhs)
        if sol is None:
            raise ValueError(f"R(d_{i}, d_{j}) is not of the form {{-, r}}: the connection is not metric")
        for (a, b), s in zip(basis, sol):
            if s:
                r = r + monomial_poly(M.table, bm, s) * M.gen(a) * M.gen(b)
    return r


def curvature_report(conn: Connection) -> Report:
    M = conn.M
    rep = Report("curvature")
    rep_chk = rep.new("{x, r(D_i,D_j)} = R(D_i,D_j) x")
    skew = rep.new("<R x, y> + <x, R y> = 0")
    pairs = list(itertools.combinations(range(len(M.base)), 2))
    if not pairs:
        rep_chk.note("one-dimensional base: no curvature directions")
        skew.note("one-dimensional base: no curvature directions")
    for i, j in pairs:
        r = curvature(conn, i, j)
        for a in M.module:
            x = M.gen(a)
            rep_chk.record((M.base[i], M.base[j], a), M.pair(x, r) - curvature_operator(conn, i, j, x))
            for b in M.module:
                y = M.gen(b)
                skew.record(
                    (M.base[i], M.base[j], a, b),
                    M.pair(curvature_operator(conn, i, j, x), y) + M.pair(x, curvature_operator(conn, i, j, y)),
                )
    return rep


class RothsteinAlgebra(PoissonAlgebra):
    """Base, module generators and D_i with the bracket table of a metric connection."""

    def __init__(self, conn: Connection, r_override: dict | None = None):
        M = conn.M
        n = M.n
        names = [f"D{i + 1}" if len(M.base) > 1 else "D" for i in range(len(M.base))]
        taken = set(M.table.names())
        names = [x if x not in taken else x + "_" for x in names]
        table = M.table.extended([(x, n) for x in names])
        self.M, self.conn, self.D_names = M, conn, names
        lift = lambda f: f.lift(table)
        values = {}
        for (a, b), v in M.pairing.values.items():
            values[(a, b)] = lift(v)
        for i, D in enumerate(names):
            values[(D, M.base[i])] = table.const(-1)
            for a in M.module:
                g = conn.grad[(i, a)]
                if g:
                    values[(D, a)] = -lift(g)
        self.r = {}
        for i, j in itertools.combinations(range(len(M.base)), 2):
            r = curvature(conn, i, j)
            if r_override and (i, j) in r_override:
                r = r_override[(i, j)]
            self.r[(i, j)] = r
            if r:
                values[(names[i], names[j])] = -lift(r)
        super().__init__(table, n, values)

    def D(self, i: int) -> Polynomial:
        return self.table.gen(self.D_names[i])


def rothstein_bracket(ra: RothsteinAlgebra, f: Polynomial, g: Polynomial) -> Polynomial:
    return ra.bracket(f, g)


def _random_monomial(rng: random.Random, table: GeneratorTable, factors: int = 2) -> Polynomial:
    m = {}
    for _ in range(rng.randint(1, factors)):
        g = rng.choice(list(table))
        if g.odd and g.id in m:
            continue
        m[g.id] = m.get(g.id, 0) + 1
    return monomial_poly(table, tuple(sorted(m.items())), rng.choice([1, -1, 2, Fraction(1, 3)]))


def check_rothstein(ra: RothsteinAlgebra, samples: int = 200, seed: int = 0) -> Report:
    """Graded skew-symmetry and Jacobi on all generator triples and on sampled monomial triples."""
    rng = random.Random(seed)
    triples = [tuple(_random_monomial(rng, ra.table) for _ in range(3)) for _ in range(samples)]
    rep = ra.check_poisson(triples)
    rep.title = f"Rothstein bracket (n={ra.n})"
    return rep


def check_bianchi(ra: RothsteinAlgebra, samples: int = 20, seed: int = 0) -> Report:
    """nabla_{D1} r(D2,D3) + r(D1,[D2,D3]) + cyclic = 0.

    Checked on all coordinate triples (where the bracket terms vanish) and
    on sampled triples of polynomial vector fields, with r extended
    base-linearly in both slots.
    """
    M, conn = ra.M, ra.conn
    table = M.table
    m = len(M.base)
    rep = Report("Bianchi identity")
    coord = rep.new("nabla_1 r(D2,D3) + cyclic = 0 on coordinate fields")
    fields = rep.new("nabla_D1 r(D2,D3) + r(D1,[D2,D3]) + cyclic = 0 on polynomial fields")

    def r_ij(i, j):
        if i == j:
            return table.zero()
        return ra.r[(i, j)] if i < j else -ra.r[(j, i)]

    def r(U, V):
        acc = table.zero()
        for i, a in U.items():
            for j, b in V.items():
                acc = acc + a * b * r_ij(i, j)
        return acc

    def act(U, f):
        acc = table.zero()
        for i, a in U.items():
            acc = acc + a * partial(table, M.base[i])(f)
        return acc

    def lie(U, V):
        out = {}
        for i in range(m):
            v = act(U, V.get(i, table.zero())) - act(V, U.get(i, table.zero()))
            if v:
                out[i] = v
        return out

    def residual(A, B, C):
        total = table.zero()
        for X, Y, Z in ((A, B, C), (B, C, A), (C, A, B)):
            total = total + conn.covariant(X, r(Y, Z)) + r(X, lie(Y, Z))
        return total

    if m < 3:
        coord.note(f"base of dimension {m}: no coordinate triples")
    for i, j, k in itertools.combinations(range(m), 3):
        e = lambda t: {t: table.one()}
        coord.record((ra.D_names[i], ra.D_names[j], ra.D_names[k]), residual(e(i), e(j), e(k)))
    rng = random.Random(seed)
    base = [table.gen(x) for x in M.base]
    for _ in range(samples):
        triple = []
        for _ in range(3):
            U = {}
            for i in range(m):
                c = table.const(rng.randint(-2, 2))
                if base:
                    c = c + base[rng.randrange(m)].scale(rng.randint(-1, 1)) * base[rng.randrange(m)]
                if c:
                    U[i] = c
            triple.append(U)
        fields.record(tuple(str(U) for U in triple), residual(*triple))
    return rep


def compare_with_darboux(ra: RothsteinAlgebra, samples: int = 200, seed: int = 0) -> Report:
    """Flat case: the Rothstein bracket equals the Darboux bracket under x -> x, e -> e, D_i -> p_i."""
    M = ra.M
    rep = Report("flat Rothstein bracket vs Darboux chart")
    flat = rep.new("connection is flat (Gamma = 0)")
    for key, v in ra.conn.grad.items():
        flat.record(key, v)
    pairs = [(x, D, 1) for x, D in zip(M.base, ra.D_names)]
    chart = DarbouxChart(ra.table, M.n, pairs, gram=_gram_entries(M))
    gens = rep.new("generator brackets agree")
    names = ra.table.names()
    for a in names:
        for b in names:
            x, y = ra.table.gen(a), ra.table.gen(b)
            gens.record((a, b), ra.bracket(x, y) - chart.bracket(x, y))
    sampled = rep.new("sampled polynomial brackets agree")
    rng = random.Random(seed)
    for _ in range(samples):
        f = _random_monomial(rng, ra.table, 3) + _random_monomial(rng, ra.table, 2)
        g = _random_monomial(rng, ra.table, 3)
        if not f.is_homogeneous():
            f = _random_monomial(rng, ra.table, 3)
        sampled.record((f, g), ra.bracket(f, g) - chart.bracket(f, g))
    return rep


def _gram_entries(M: FreeModule) -> dict:
    """Pairing entries in the DarbouxChart format (one orientation per unordered pair)."""
    out = {}
    for i, a in enumerate(M.module):
        for b in M.module[i:]:
            v = M.pair(M.gen(a), M.gen(b)).constant_term()
            if v:
                out[(a, b)] = v
    return out
