"""Higher Courant-Dorfman algebras on free graded modules.

A structure of degree n lives on the free graded-commutative algebra over
a table of generators of degrees 0..n-1 (degree 0 = base ring R), truncated
to degrees <= n-1.  It is fixed by generator data:

* ``d``: images of generators of degree <= n-2 (degree +1);
* ``pairing``: values <a, b> of degree |a|+|b|-n, extended as a biderivation;
* ``bracket``: values [a, b] of degree |a|+|b|+1-n.

The bracket is extended by the right Leibniz rule
``[a, bc] = [a, b] c + (-1)^{(|a|+1-n)|b|} b [a, c]`` and, in the left slot,
by skew-symmetry ``[a, b] = -e [b, a] - (-1)^{|a|-n} d<a, b>`` with
``e = (-1)^{(|a|+1-n)(|b|+1-n)}``.
"""
from __future__ import annotations

import math
import random
from fractions import Fraction
from typing import Iterable, Mapping

from .graded_algebra import (
    Derivation,
    GeneratorTable,
    Polynomial,
    koszul,
    monomial_poly,
    poly_sum,
)
from .linalg import Subspace, inverse, rank
from .report import FAIL, VACUOUS, Report
from .symplectic import DarbouxChart, MasterEquationError, PoissonAlgebra, check_master_equation


class StructuralError(ValueError):
    """Data that does not fit the truncated degree window."""


class TruncationError(StructuralError):
    pass


def _key(table: GeneratorTable, k) -> int:
    return table[k].id if isinstance(k, str) else int(k)


def _as_poly(table, v) -> Polynomial:
    return v if isinstance(v, Polynomial) else table.const(v)


def transfer(f: Polynomial, table: GeneratorTable) -> Polynomial:
    """Rewrite a polynomial over another table that has the needed names."""
    if f.table == table:
        return f
    src = f.table
    idmap = {}
    for i in f.support_ids():
        name = src.generators[i].name
        if name not in table:
            raise StructuralError(f"generator {name} is not available in the target algebra")
        idmap[i] = table[name].id
    terms = {}
    for m, c in f.terms.items():
        s, mm = table.normalize_word([idmap[i] for i, e in m for _ in range(e)]) if all(
            e > 0 for _, e in m
        ) else (1, tuple(sorted((idmap[i], e) for i, e in m)))
        if s:
            terms[mm] = terms.get(mm, 0) + s * c
    return Polynomial(table, terms)


class CDStructure:
    def __init__(
        self,
        n: int,
        table: GeneratorTable,
        d: Mapping | None = None,
        pairing: Mapping | None = None,
        bracket: Mapping | None = None,
        extended: bool = False,
        name: str = "",
    ):
        if n < 2:
            raise ValueError("degree n must be at least 2")
        self.n = n = int(n)
        self.table = table
        self.extended = bool(extended)
        self.name = name
        self.issues: list[str] = []
        for g in table:
            if not 0 <= g.degree <= n - 1:
                raise ValueError(f"generator {g.name} has degree {g.degree}, outside 0..{n - 1}")
            if g.invertible:
                raise ValueError("invertible generators are not allowed in a Courant-Dorfman presentation")
        deg = [g.degree for g in table]
        self.base = [g.name for g in table if g.degree == 0]
        self.module = [g.name for g in table if g.degree > 0]

        # differential
        d_images = {}
        for k, v in dict(d or {}).items():
            i = _key(table, k)
            v = _as_poly(table, v)
            if deg[i] >= n - 1:
                raise ValueError(f"d({table.generators[i].name}) would leave the truncation window")
            if v and v.degrees() != {deg[i] + 1}:
                raise ValueError(f"d({table.generators[i].name}) must have degree {deg[i] + 1}")
            if v:
                d_images[i] = v
        self.d_images = d_images
        self._d = Derivation(table, 1, d_images)

        # pairing
        pvals = {}
        for (a, b), v in dict(pairing or {}).items():
            i, j = _key(table, a), _key(table, b)
            v = _as_poly(table, v)
            target = deg[i] + deg[j] - n
            if not v:
                continue
            if target < 0:
                raise ValueError(f"<{a},{b}> must vanish (negative degree {target})")
            if v.degrees() != {target}:
                raise ValueError(f"<{a},{b}> must have degree {target}")
            if target > 0 and not self.extended:
                self.issues.append(
                    f"pairing <{table.generators[i].name},{table.generators[j].name}> = {v} lands in degree "
                    f"{target} > 0 (overflow of a non-extended structure)"
                )
            pvals[(i, j)] = v
        self.pairing_values = pvals
        self._pair = PoissonAlgebra(table, n, pvals, strict_skew=False)

        # bracket: explicit data, completed by skew-symmetry and the anchor rule
        given = {}
        for (a, b), v in dict(bracket or {}).items():
            i, j = _key(table, a), _key(table, b)
            v = _as_poly(table, v)
            target = deg[i] + deg[j] + 1 - n
            if v and target < 0:
                raise ValueError(f"[{a},{b}] must vanish (negative degree {target})")
            if v and v.degrees() != {target}:
                raise ValueError(f"[{a},{b}] must have degree {target}")
            given[(i, j)] = v
        self.given_brackets = {k: v for k, v in given.items() if v}
        full = {}
        k = len(table)
        for i in range(k):
            for j in range(k):
                if deg[i] + deg[j] + 1 - n < 0:
                    continue
                if (i, j) in given:
                    v = given[(i, j)]
                elif (j, i) in given:
                    v = self._skew_from(j, i, given[(j, i)])
                elif deg[i] == 0 and deg[j] == n - 1:
                    # [x, e] = -(-1)^{n} <dx, e>
                    v = self.pair(self._d(table.gen(table.generators[i].name)), table.gen(table.generators[j].name))
                    v = v.scale(-koszul(n))
                elif deg[j] == 0 and deg[i] == n - 1:
                    # anchor: [e, x] = <e, dx>
                    v = self.pair(table.gen(table.generators[i].name), self._d(table.gen(table.generators[j].name)))
                else:
                    v = table.zero()
                if v:
                    full[(i, j)] = v
        self.bracket_values = full
        self._rows: dict[int, Derivation] = {}
        self._left_cache: dict = {}

    # -- helpers -------------------------------------------------------------
    def _skew_from(self, j, i, value_ji) -> Polynomial:
        """[g_i, g_j] from [g_j, g_i] by skew-symmetry."""
        n = self.n
        table = self.table
        di, dj = table.generators[i].degree, table.generators[j].degree
        gi, gj = table.gen(table.generators[i].name), table.gen(table.generators[j].name)
        eps = koszul((di + 1 - n) * (dj + 1 - n))
        out = value_ji.scale(-eps)
        p = self.pair(gi, gj)
        if p:
            out = out - self.d(p).scale(koszul(di - n))
        return out

    def _row(self, i: int) -> Derivation:
        X = self._rows.get(i)
        if X is None:
            imgs = {j: v for (a, j), v in self.bracket_values.items() if a == i}
            X = Derivation(self.table, self.table.generators[i].degree + 1 - self.n, imgs)
            self._rows[i] = X
        return X

    def _check_range(self, f: Polynomial, what: str) -> Polynomial:
        for m in f.terms:
            if self.table.monomial_degree(m) > self.n - 1:
                raise TruncationError(f"{what} leaves degrees 0..{self.n - 1}: {f}")
        return f

    @staticmethod
    def _deg(f: Polynomial) -> int:
        return f.degree if f else 0

    # -- structure maps --------------------------------------------------------
    def gen(self, name: str) -> Polynomial:
        return self.table.gen(name)

    def d(self, a: Polynomial) -> Polynomial:
        for m in a.terms:
            if self.table.monomial_degree(m) > self.n - 2:
                raise TruncationError(f"d is not defined on degree {self.table.monomial_degree(m)}: {a}")
        return self._d(a)

    def pair(self, a: Polynomial, b: Polynomial) -> Polynomial:
        return self._pair.bracket(a, b)

    def _left(self, m) -> Derivation:
        """The derivation [m, -] for a normal-form monomial m."""
        hit = self._left_cache.get(m)
        if hit is not None:
            return hit
        table = self.table
        n = self.n
        if len(m) == 1 and m[0][1] == 1:
            X = self._row(m[0][0])
        else:
            mp = monomial_poly(table, m)
            dm = table.monomial_degree(m)
            imgs = {}
            for g in table:
                target = dm + g.degree + 1 - n
                if target < 0 or target > n - 1:
                    continue
                gp = table.gen(g.name)
                v = self._row(g.id)(mp).scale(-koszul((dm + 1 - n) * (g.degree + 1 - n)))
                p = self.pair(mp, gp)
                if p:
                    v = v - self.d(p).scale(koszul(dm - n))
                if v:
                    imgs[g.id] = v
            X = Derivation(table, dm + 1 - n, imgs)
        if len(self._left_cache) < 50_000:
            self._left_cache[m] = X
        return X

    def bracket(self, a: Polynomial, b: Polynomial) -> Polynomial:
        if not a or not b:
            return self.table.zero()
        out = poly_sum(self.table, (self._left(m)(b).scale(c) for m, c in a.terms.items()))
        return self._check_range(out, f"[{a}, {b}]")

    def anchor(self, e: Polynomial) -> Derivation:
        """rho(e) f = <e, df> on the base ring."""
        if not e:
            return Derivation(self.table, 0, {})
        if e.degrees() != {self.n - 1}:
            raise ValueError(f"the anchor is defined on degree {self.n - 1}, got {sorted(e.degrees())}")
        imgs = {}
        for x in self.base:
            v = self.pair(e, self.d(self.gen(x)))
            if v:
                imgs[self.table[x].id] = v
        return Derivation(self.table, 0, imgs)

    # -- sampling ------------------------------------------------------------
    def module_monomials(self, degree: int, limit: int = 400) -> list:
        """Normal-form monomials in module generators of the given degree (at most ``limit``)."""
        gens = [g for g in self.table if g.degree > 0]
        out = []

        def rec(idx, remaining, acc):
            if len(out) >= limit:
                return
            if remaining == 0:
                out.append(tuple(acc))
                return
            for k in range(idx, len(gens)):
                g = gens[k]
                if g.degree > remaining:
                    continue
                maxe = 1 if g.odd else remaining // g.degree
                for e in range(1, maxe + 1):
                    rec(k + 1, remaining - e * g.degree, acc + [(g.id, e)])

        rec(0, degree, [])
        return out

    def random_element(self, rng: random.Random, degree: int, terms: int = 2) -> Polynomial:
        monos = self.module_monomials(degree)
        if not monos:
            return self.table.zero()
        base_ids = [self.table[x].id for x in self.base]
        acc = self.table.zero()
        for _ in range(terms):
            m = rng.choice(monos)
            bm = {}
            for _ in range(rng.randint(0, 2)):
                if base_ids:
                    i = rng.choice(base_ids)
                    bm[i] = bm.get(i, 0) + 1
            merged = dict(m)
            for i, e in bm.items():
                merged[i] = merged.get(i, 0) + e
            c = rng.choice([-3, -2, -1, 1, 2, 3, Fraction(1, 2)])
            acc = acc + monomial_poly(self.table, tuple(sorted(merged.items())), c)
        return acc

    # -- comparison ----------------------------------------------------------
    def structure_constants(self) -> dict:
        """Generator-level data as name-keyed dicts (used for round-trip comparison)."""
        names = self.table.names()
        deg = [g.degree for g in self.table]
        out = {"d": {}, "pairing": {}, "bracket": {}}
        for g in self.table:
            if g.degree <= self.n - 2:
                v = self._d(self.gen(g.name))
                if v:
                    out["d"][g.name] = v
        for i, a in enumerate(names):
            for j, b in enumerate(names):
                if deg[i] + deg[j] >= self.n:
                    v = self.pair(self.gen(a), self.gen(b))
                    if v:
                        out["pairing"][(a, b)] = v
                v = self.bracket_values.get((i, j))
                if v:
                    out["bracket"][(a, b)] = v
        return out

    def __repr__(self):
        return f"CDStructure(n={self.n}, generators={self.table.names()}, extended={self.extended})"


def constants_equal(c1: dict, c2: dict) -> list[str]:
    """Differences between two structure_constants() dicts, compared by name and printed value."""
    diffs = []
    for key in ("d", "pairing", "bracket"):
        a = {k: str(v) for k, v in c1[key].items()}
        b = {k: str(v) for k, v in c2[key].items()}
        for k in sorted(set(a) | set(b), key=str):
            if a.get(k, "0") != b.get(k, "0"):
                diffs.append(f"{key}{k}: {a.get(k, '0')} vs {b.get(k, '0')}")
    return diffs


# ---------------------------------------------------------------------------
# axiom checking


def _sample_instances(cd: CDStructure, rng: random.Random, count: int, arity: int):
    n = cd.n
    out = []
    tries = 0
    while len(out) < count and tries < 20 * count + 20:
        tries += 1
        degs = [rng.randint(0, n - 1) for _ in range(arity)]
        els = [cd.random_element(rng, k) for k in degs]
        if all(els):
            out.append(els)
    return out


def check_axioms(cd: CDStructure, samples: int = 200, seed: int = 0) -> Report:
    """Evaluate every axiom on all generator pairs/triples and on seeded random elements."""
    n = cd.n
    rep = Report(f"higher Courant-Dorfman axioms (n={n})")
    rep.data["n"] = n
    rep.data["extended"] = cd.extended
    wf = rep.new("well-formed truncation")
    for issue in cd.issues:
        wf.fail(("structure",), issue)
    if not cd.issues:
        wf.record(("structure",), 0)
    if cd.issues and not cd.extended:
        wf.note("set extended=true to admit pairings of positive degree")

    checks = {
        name: rep.new(name)
        for name in (
            "sesquilinearity <da,b>",
            "sesquilinearity [da,b]=0",
            "skew-symmetry bracket",
            "skew-symmetry pairing",
            "jacobi bracket",
            "jacobi bracket-pairing",
            "jacobi pairing",
            "leibniz bracket",
            "leibniz pairing",
            "d squared",
        )
    }
    deg = cd._deg
    br, pr = cd.bracket, cd.pair

    def run(name, inputs, fn):
        try:
            checks[name].record(inputs, fn())
        except TruncationError as exc:
            checks[name].fail(inputs, "overflow", str(exc))

    def pair_instances(a, b, label):
        A, B = deg(a), deg(b)
        if A <= n - 2:
            run("sesquilinearity <da,b>", label, lambda: pr(cd.d(a), b) + br(a, b).scale(koszul(A - n)))
            run("sesquilinearity [da,b]=0", label, lambda: br(cd.d(a), b))
        eps = koszul((A + 1 - n) * (B + 1 - n))

        def skew():
            r = br(a, b) + br(b, a).scale(eps)
            p = pr(a, b)
            if p:
                r = r + cd.d(p).scale(koszul(A - n))
            return r

        run("skew-symmetry bracket", label, skew)
        run("skew-symmetry pairing", label, lambda: pr(a, b) + pr(b, a).scale(koszul((A - n) * (B - n))))

    def triple_instances(a, b, c, label):
        A, B, C = deg(a), deg(b), deg(c)
        run(
            "jacobi bracket",
            label,
            lambda: br(a, br(b, c)) - br(br(a, b), c) - br(b, br(a, c)).scale(koszul((A + 1 - n) * (B + 1 - n))),
        )
        run(
            "jacobi bracket-pairing",
            label,
            lambda: br(a, pr(b, c)) - pr(br(a, b), c) - pr(b, br(a, c)).scale(koszul((A + 1 - n) * (B - n))),
        )
        run(
            "jacobi pairing",
            label,
            lambda: pr(a, pr(b, c)) - pr(pr(a, b), c) - pr(b, pr(a, c)).scale(koszul((A - n) * (B - n))),
        )
        if B + C <= n - 1:
            run(
                "leibniz bracket",
                label,
                lambda: br(a, b * c) - br(a, b) * c - (b * br(a, c)).scale(koszul((A + 1 - n) * B)),
            )
            run(
                "leibniz pairing",
                label,
                lambda: pr(a, b * c) - pr(a, b) * c - (b * pr(a, c)).scale(koszul((A - n) * B)),
            )

    names = cd.table.names()
    gens = [cd.gen(x) for x in names]
    for i, a in enumerate(gens):
        if deg(a) <= n - 3:
            run("d squared", (names[i],), lambda: cd.d(cd.d(a)))
        for j, b in enumerate(gens):
            pair_instances(a, b, (names[i], names[j]))
            for k, c in enumerate(gens):
                triple_instances(a, b, c, (names[i], names[j], names[k]))

    rng = random.Random(seed)
    for a, b in _sample_instances(cd, rng, samples, 2):
        pair_instances(a, b, (a, b))
        if deg(a) <= n - 3:
            run("d squared", (a,), lambda: cd.d(cd.d(a)))
    for a, b, c in _sample_instances(cd, rng, samples, 3):
        triple_instances(a, b, c, (a, b, c))
    return rep


# ---------------------------------------------------------------------------
# Dirac submodules and non-degeneracy


def _constant_vector(f: Polynomial, module_only=True) -> dict:
    """Coefficient vector of f split as sum_{alpha} x^alpha * (module part)."""
    table = f.table
    vec = {}
    for m, c in f.terms.items():
        base = tuple((i, e) for i, e in m if table.generators[i].degree == 0)
        mod = tuple((i, e) for i, e in m if table.generators[i].degree != 0)
        vec.setdefault(base, {})[mod] = c
    return vec


def is_dirac(cd: CDStructure, span: Iterable[Polynomial]) -> Report:
    """Isotropy and bracket closure of the R-span of the given module elements.

    Span elements must have constant (rational) coefficients; membership of a
    bracket in the R-span is then decided coefficientwise in each base monomial.
    """
    span = [s for s in span]
    rep = Report("Dirac submodule")
    iso = rep.new("isotropic")
    clo = rep.new("closed under bracket")
    sub = Subspace()
    for s in span:
        if not s.is_homogeneous() or any(cd.table.generators[i].degree == 0 for i in s.support_ids()):
            raise ValueError("span elements must be homogeneous with constant coefficients")
        sub.add({m: c for m, c in s.terms.items()})
    for i, a in enumerate(span):
        for j, b in enumerate(span):
            iso.record((a, b), cd.pair(a, b))
            v = cd.bracket(a, b)
            residual = {}
            for base, vec in _constant_vector(v).items():
                r = sub.reduce(vec)
                for mod, c in r.items():
                    residual[base + mod] = c
            clo.record((a, b), Polynomial(cd.table, {tuple(sorted(k)): c for k, c in residual.items()}))
    return rep


def nondegeneracy_check(cd: CDStructure) -> Report:
    """Rank of the constant Gram matrix E^i x E^{n-i} for every i."""
    n = cd.n
    rep = Report("non-degeneracy of the pairing")
    check = rep.new("gram matrices invertible")
    ranks = {}
    by_deg = {k: [g.name for g in cd.table if g.degree == k] for k in range(1, n)}
    for i in range(1, n):
        rows, cols = by_deg[i], by_deg[n - i]
        M = []
        undecidable = False
        for a in rows:
            row = []
            for b in cols:
                v = cd.pair(cd.gen(a), cd.gen(b))
                if not v.is_constant():
                    undecidable = True
                row.append(v.constant_term())
            M.append(row)
        if undecidable:
            check.forced = VACUOUS
            check.note(f"degree {i}: pairing has non-constant values; undecidable under the constant-pairing restriction")
            ranks[i] = None
            continue
        r = rank(M) if rows and cols else 0
        ranks[i] = r
        ok = len(rows) == len(cols) and r == len(rows)
        check.record((f"E^{i} x E^{n - i}",), 0 if ok else f"rank {r} for a {len(rows)}x{len(cols)} matrix")
    rep.data["ranks"] = ranks
    rep.data["total_rank"] = sum(r for r in ranks.values() if r)
    return rep


# ---------------------------------------------------------------------------
# bridge to Darboux charts


def from_symplectic(
    chart: PoissonAlgebra, theta: Polynomial, require_master: bool = True, name: str = ""
) -> CDStructure:
    """Derived structure: [a,b] = {{a,theta},b}, <a,b> = {a,b}, da = {theta,a}."""
    n = chart.n
    if require_master:
        rep = check_master_equation(chart, theta)
        if not rep.passed:
            raise MasterEquationError(rep)
    elif theta and theta.degrees() != {n + 1}:
        raise ValueError(f"Hamiltonian must have degree {n + 1}")
    low = [(g.name, g.degree) for g in chart.table if g.degree <= n - 1]
    table = GeneratorTable(low)
    d, pairing, bracket = {}, {}, {}
    gens = {g: chart.table.gen(g) for g, _ in low}
    Q = {g: chart.bracket(theta, p) for g, p in gens.items()}
    lifted = {g: chart.bracket(p, theta) for g, p in gens.items()}
    for g, k in low:
        if k <= n - 2 and Q[g]:
            d[g] = transfer(Q[g], table)
    extended = False
    for a, ka in low:
        for b, kb in low:
            if ka + kb >= n:
                v = chart.bracket(gens[a], gens[b])
                if v:
                    pairing[(a, b)] = transfer(v, table)
                    extended = extended or ka + kb > n
            if ka + kb + 1 >= n:
                v = chart.bracket(lifted[a], gens[b])
                if v:
                    bracket[(a, b)] = transfer(v, table)
    return CDStructure(n, table, d, pairing, bracket, extended=extended, name=name)


def momentum_name(x: str, taken) -> str:
    name = f"p_{x}"
    while name in taken:
        name = "_" + name
    return name


def to_theta(cd: CDStructure):
    """Darboux chart and Hamiltonian of a structure with constant non-degenerate pairing.

    The chart adds a momentum ``p_x`` of degree n for every base generator x
    with ``{x, p_x} = 1``.  The Hamiltonian is reconstructed from its
    derivatives through the Euler identity ``(n+1) theta = sum |w| w d_w theta``
    with ``d_w theta = sum_u G^{-1}_{wu} {u, theta}``.
    """
    n = cd.n
    nd = nondegeneracy_check(cd)
    if not nd.passed or nd.checks[0].status == VACUOUS:
        raise ValueError("to_theta needs a constant non-degenerate pairing\n" + nd.text())
    for x in cd.base:
        for y in cd.table.names():
            v = cd.pair(cd.gen(x), cd.gen(y))
            if v:
                raise ValueError("base generators must pair trivially")
    taken = set(cd.table.names())
    moms = []
    for x in cd.base:
        p = momentum_name(x, taken)
        taken.add(p)
        moms.append((x, p))
    table = cd.table.extended([(p, n) for _, p in moms])
    entries = {}
    for (i, j), v in cd.pairing_values.items():
        entries[(cd.table.generators[i].name, cd.table.generators[j].name)] = v.constant_term()
    pairs = [(x, p, 1) for x, p in moms]
    chart = DarbouxChart(table, n, pairs, entries)

    names = table.names()
    k = len(names)
    G = [[chart.generator_bracket(i, j).constant_term() for j in range(k)] for i in range(k)]
    Ginv = inverse(G)
    deg = [g.degree for g in table]
    lift = lambda f: f.lift(table)
    low = [i for i in range(k) if deg[i] <= n - 1]

    def euler(partials: dict, total_degree: int) -> Polynomial:
        acc = table.zero()
        for w, dw in partials.items():
            if deg[w] and dw:
                acc = acc + (table.gen(names[w]) * dw).scale(deg[w])
        return acc.scale(Fraction(1, total_degree)) if total_degree else acc

    # {u, theta} for every low generator u
    u_theta = {}
    for u in low:
        if deg[u] <= n - 2:
            u_theta[u] = lift(cd.d(cd.gen(names[u]))).scale(-koszul(deg[u] - n))
        else:
            # D_u = {u, theta} has degree n; {v, D_u} = -[u, v] for low v
            partials = {}
            for w in range(k):
                if not deg[w]:
                    continue
                acc = table.zero()
                for v in low:
                    c = Ginv[w][v]
                    if c:
                        acc = acc - lift(cd.bracket(cd.gen(names[u]), cd.gen(names[v]))).scale(c)
                partials[w] = acc
            u_theta[u] = euler(partials, n)
    partials = {}
    for w in range(k):
        if not deg[w]:
            continue
        acc = table.zero()
        for u in range(k):
            c = Ginv[w][u]
            if c:
                if u not in u_theta:
                    raise ValueError(f"cannot reconstruct: derivative along {names[w]} needs {{{names[u]}, theta}}")
                acc = acc + u_theta[u].scale(c)
        partials[w] = acc
    theta = euler(partials, n + 1)
    return chart, theta


def roundtrip_report(cd: CDStructure) -> Report:
    """Build theta, check the master equation and compare the derived structure with cd."""
    chart, theta = to_theta(cd)
    rep = check_master_equation(chart, theta)
    rt = rep.new("round trip of structure constants")
    back = from_symplectic(chart, theta, require_master=False)
    diffs = constants_equal(cd.structure_constants(), back.structure_constants())
    if diffs:
        for dff in diffs:
            rt.fail(("constants",), dff)
    else:
        rt.record(("constants",), 0)
    rep.data["theta"] = str(theta)
    rep.data["chart"] = {"n": chart.n, "generators": [f"{g.name}:{g.degree}" for g in chart.table]}
    return rep


# ---------------------------------------------------------------------------
# higher Dorfman brackets from a closed form


def _forms_table(m: int, n: int) -> GeneratorTable:
    gens = [(f"x{i}", 0) for i in range(1, m + 1)]
    gens += [(f"dx{i}", 1) for i in range(1, m + 1)]
    gens += [(f"v{i}", n - 1) for i in range(1, m + 1)]
    gens += [(f"p{i}", n) for i in range(1, m + 1)]
    return GeneratorTable(gens)


def dorfman_chart(m: int, n: int) -> DarbouxChart:
    """Chart (x_i, p_i), (v_i, dx_i) with {x_i, p_i} = 1 and {v_i, dx_i} = 1."""
    table = _forms_table(m, n)
    pairs = [(f"x{i}", f"p{i}", 1) for i in range(1, m + 1)]
    pairs += [(f"v{i}", f"dx{i}", 1) for i in range(1, m + 1)]
    return DarbouxChart(table, n, pairs)


def de_rham(table: GeneratorTable, m: int) -> Derivation:
    return Derivation(table, 1, {f"x{i}": table.gen(f"dx{i}") for i in range(1, m + 1)})


def build_higher_dorfman(m: int, n: int, omega=None, strict: bool = False, name: str = "") -> CDStructure:
    """Vector fields v_i (degree n-1) and forms dx_i (degree 1) over Q[x_1..x_m].

    ``<v, a> = i_v a``, ``[v, a] = L_v a``, ``[v1, v2] = i_{v1} i_{v2} omega`` and
    de Rham d.  ``omega`` is an (n+1)-form in the generators x_i, dx_i (a
    Polynomial over any table with those names, or a string expression).
    Closedness of omega is required only when ``strict`` is set.
    """
    chart = dorfman_chart(m, n)
    table = chart.table
    if omega is None or omega == 0:
        om = table.zero()
    elif isinstance(omega, str):
        from .structfile import parse_expression

        om = parse_expression(omega, table)
    else:
        om = transfer(omega, table)
    if om and om.degrees() != {n + 1}:
        raise ValueError(f"omega must be an {n + 1}-form, got degrees {sorted(om.degrees())}")
    for i in om.support_ids():
        if not (table.generators[i].name.startswith("x") or table.generators[i].name.startswith("dx")):
            raise ValueError("omega may only involve x_i and dx_i")
    if strict:
        dom = de_rham(table, m)(om)
        if dom:
            raise ValueError(f"omega is not closed: d(omega) = {dom}")
    p_dx = poly_sum(table, (table.gen(f"p{i}") * table.gen(f"dx{i}") for i in range(1, m + 1)))
    theta = p_dx.scale(-koszul(n)) + om
    return from_symplectic(chart, theta, require_master=False, name=name or f"higher-dorfman m={m} n={n}")


# ---------------------------------------------------------------------------
# the six ungraded Courant-Dorfman conditions (degree 2), checked independently


def check_courant_dorfman_n2(cd: CDStructure, samples: int = 40, seed: int = 0) -> Report:
    """Ungraded Courant-Dorfman conditions on (R, E, d, <,>, [,]) read off a degree-2 structure.

    R is handled with sympy's sparse polynomial ring over QQ and E as the
    free R-module on the degree-1 generators; only generator-level data of
    ``cd`` is used.  The bracket of general elements is the Dorfman extension
        [f e_a, g e_b] = fg[e_a,e_b] + f rho_a(g) e_b - g rho_b(f) e_a + g <e_a,e_b> df
    where rho_a is read from the stored anchor values [e_a, x_i].
    """
    from sympy import QQ
    from sympy.polys.rings import ring

    if cd.n != 2:
        raise ValueError("the ungraded conditions only apply in degree 2")
    base = cd.base
    mods = cd.module
    # a placeholder variable keeps the ring well defined over a point
    R, *ring_gens = ring(",".join(base) if base else "_u", QQ)
    sym = dict(zip(base, ring_gens))
    table = cd.table
    one = R.one

    def to_ring(f: Polynomial):
        expr = R.zero
        for m, c in f.terms.items():
            term = one * QQ(Fraction(c).numerator, Fraction(c).denominator)
            for i, e in m:
                term *= sym[table.generators[i].name] ** e
            expr += term
        return expr

    def to_vec(f: Polynomial) -> dict:
        """Degree-1 polynomial -> {module name: R element}."""
        vec = {}
        for m, c in f.terms.items():
            mod = [i for i, _ in m if table.generators[i].degree == 1]
            rest = monomial_poly(table, tuple((i, e) for i, e in m if table.generators[i].degree == 0), c)
            name = table.generators[mod[0]].name
            vec[name] = vec.get(name, R.zero) + to_ring(rest)
        return clean(vec)

    def clean(v: dict) -> dict:
        return {k: x for k, x in v.items() if x}

    pair_ab = {(a, b): to_ring(cd.pair(cd.gen(a), cd.gen(b))) for a in mods for b in mods}
    br_ab = {(a, b): to_vec(cd.bracket_values.get((table[a].id, table[b].id), table.zero())) for a in mods for b in mods}
    anchor = {
        (a, x): to_ring(cd.bracket_values.get((table[a].id, table[x].id), table.zero())) for a in mods for x in base
    }
    dx = {x: to_vec(cd.d(cd.gen(x))) for x in base}

    def add(u, v, c=1):
        out = dict(u)
        for k, x in v.items():
            out[k] = out.get(k, R.zero) + c * x
        return clean(out)

    def scal(f, v):
        return clean({k: f * x for k, x in v.items()})

    def rho(a, f):
        return sum((anchor[(a, x)] * f.diff(sym[x]) for x in base), R.zero)

    def partial(f):
        out = {}
        for x in base:
            out = add(out, scal(f.diff(sym[x]), dx[x]))
        return out

    def pair(u, v):
        return sum((fa * gb * pair_ab[(a, b)] for a, fa in u.items() for b, gb in v.items()), R.zero)

    def bracket(u, v):
        out = {}
        for a, f in u.items():
            for b, g in v.items():
                out = add(out, scal(f * g, br_ab[(a, b)]))
                out = add(out, {b: f * rho(a, g)})
                out = add(out, {a: -g * rho(b, f)})
                out = add(out, scal(g * pair_ab[(a, b)], partial(f)))
        return out

    rng = random.Random(seed)

    def rand_r():
        if not base:
            return one * rng.choice([1, 2, -1])
        f = one * rng.choice([0, 1, -2])
        for _ in range(2):
            f += rng.choice([1, -1, 2, QQ(1, 2)]) * math.prod(
                (sym[rng.choice(base)] for _ in range(rng.randint(1, 2))), start=one
            )
        return f

    def rand_e():
        return clean({a: rand_r() for a in rng.sample(mods, min(len(mods), 2))}) if mods else {}

    basis = [{a: one} for a in mods]
    fs = [sym[x] for x in base] + [rand_r() for _ in range(3)] if base else [one]
    es = basis + [rand_e() for _ in range(max(2, samples // 10))]

    rep = Report("Courant-Dorfman conditions (degree 2, ungraded)")
    c1 = rep.new("[e1,f e2] = f[e1,e2] + <e1,df> e2")
    c2 = rep.new("<e1,d<e2,e3>> = <[e1,e2],e3> + <e2,[e1,e3]>")
    c3 = rep.new("[e1,e2] + [e2,e1] = d<e1,e2>")
    c4 = rep.new("[e1,[e2,e3]] = [[e1,e2],e3] + [e2,[e1,e3]]")
    c5 = rep.new("[df,e] = 0")
    c6 = rep.new("<df,dg> = 0")

    def res_vec(v):
        return " + ".join(f"({x})*{k}" for k, x in sorted(v.items())) if v else 0

    for e1 in es:
        for f in fs:
            for e2 in es[: len(basis) + 2]:
                lhs = bracket(e1, scal(f, e2))
                rhs = add(scal(f, bracket(e1, e2)), scal(pair(e1, partial(f)), e2))
                c1.record((e1, f, e2), res_vec(add(lhs, rhs, -1)))
            c5.record((f, e1), res_vec(bracket(partial(f), e1)))
        for e2 in es:
            c3.record((e1, e2), res_vec(add(add(bracket(e1, e2), bracket(e2, e1)), partial(pair(e1, e2)), -1)))
            for e3 in es[: len(basis) + 1]:
                lhs = pair(e1, partial(pair(e2, e3)))
                rhs = pair(bracket(e1, e2), e3) + pair(e2, bracket(e1, e3))
                c2.record((e1, e2, e3), lhs - rhs)
                lhs = bracket(e1, bracket(e2, e3))
                rhs = add(bracket(bracket(e1, e2), e3), bracket(e2, bracket(e1, e3)))
                c4.record((e1, e2, e3), res_vec(add(lhs, rhs, -1)))
    for f in fs:
        for g in fs:
            c6.record((f, g), pair(partial(f), partial(g)))
    return rep


N2_CORRESPONDENCE = {
    "[e1,f e2] = f[e1,e2] + <e1,df> e2": ("sesquilinearity <da,b>", "leibniz bracket"),
    "<e1,d<e2,e3>> = <[e1,e2],e3> + <e2,[e1,e3]>": ("jacobi bracket-pairing",),
    "[e1,e2] + [e2,e1] = d<e1,e2>": ("skew-symmetry bracket",),
    "[e1,[e2,e3]] = [[e1,e2],e3] + [e2,[e1,e3]]": ("jacobi bracket",),
    "[df,e] = 0": ("sesquilinearity [da,b]=0",),
    "<df,dg> = 0": ("sesquilinearity <da,b>", "sesquilinearity [da,b]=0"),
}


def compare_n2_checkers(cd: CDStructure, samples: int = 40, seed: int = 0) -> Report:
    """Run both checkers on a degree-2 structure and compare their verdicts.

    Each ungraded condition is matched with the graded axioms that imply it;
    the comparison passes when every verdict pair agrees.
    """
    graded = check_axioms(cd, samples=samples, seed=seed)
    ungraded = check_courant_dorfman_n2(cd, samples=samples, seed=seed)
    rep = Report("degree-2 checker agreement")
    agree = rep.new("verdicts agree")
    rows = {}
    for cond, axioms in N2_CORRESPONDENCE.items():
        u_ok = ungraded[cond].status != FAIL
        g_ok = all(graded[a].status != FAIL for a in axioms)
        rows[cond] = {"ungraded": u_ok, "graded": g_ok, "axioms": list(axioms)}
        agree.record((cond,), 0 if u_ok == g_ok else f"ungraded={u_ok} graded={g_ok}")
    overall = (graded.passed, ungraded.passed)
    agree.record(("overall",), 0 if overall[0] == overall[1] else f"graded={overall[0]} ungraded={overall[1]}")
    rep.data["verdicts"] = rows
    rep.data["graded_passed"] = graded.passed
    rep.data["ungraded_passed"] = ungraded.passed
    rep.graded = graded
    rep.ungraded = ungraded
    return rep


# ---------------------------------------------------------------------------
# Courant algebroid axioms (degree 2) via anchor and derived data


def check_courant_algebroid(cd: CDStructure, samples: int = 40, seed: int = 0) -> Report:
    """The five Courant algebroid axioms for A * B = [A, B], pi = rho, on degree-1 sections.

    Also checks that the anchor, evaluated directly as f -> <A, df>, obeys
    the Leibniz rule on products of base functions.
    """
    if cd.n != 2:
        raise ValueError("Courant algebroid axioms apply in degree 2")
    rep = Report("Courant algebroid axioms (n=2)")
    ax1 = rep.new("pi(A*B) = [pi(A), pi(B)]")
    ax2 = rep.new("A*(B*C) = (A*B)*C + B*(A*C)")
    ax3 = rep.new("A*(fB) = (pi(A)f)B + f(A*B)")
    ax4 = rep.new("<A, B*C + C*B> = pi(A)<B,C>")
    ax5 = rep.new("pi(A)<B,C> = <A*B,C> + <B,A*C>")
    der = rep.new("anchor is a derivation: <A, d(fg)> = (pi(A)f)g + f(pi(A)g)")
    rng = random.Random(seed)
    br, pr, rho = cd.bracket, cd.pair, cd.anchor
    sections = [cd.gen(a) for a in cd.module if cd.table[a].degree == 1]

    def function():
        f = cd.table.const(rng.randint(-2, 2))
        for _ in range(rng.randint(0, 3)):
            if cd.base:
                x = cd.gen(rng.choice(cd.base))
                f = f + x * cd.table.const(rng.randint(-2, 2)) * (x if rng.random() < 0.5 else cd.table.one())
        return f

    def section():
        acc = cd.table.zero()
        for a in sections:
            acc = acc + function() * a
        return acc

    instances = [(A, B, C) for A in sections for B in sections for C in sections]
    instances += [(section(), section(), section()) for _ in range(samples)]
    for A, B, C in instances:
        f, g = function(), function()
        ax1.record((A, B, f), rho(br(A, B))(f) - rho(A)(rho(B)(f)) + rho(B)(rho(A)(f)))
        ax2.record((A, B, C), br(A, br(B, C)) - br(br(A, B), C) - br(B, br(A, C)))
        ax3.record((A, f, B), br(A, f * B) - rho(A)(f) * B - f * br(A, B))
        ax4.record((A, B, C), pr(A, br(B, C) + br(C, B)) - rho(A)(pr(B, C)))
        ax5.record((A, B, C), rho(A)(pr(B, C)) - pr(br(A, B), C) - pr(B, br(A, C)))
        der.record((A, f, g), pr(A, cd.d(f * g)) - rho(A)(f) * g - f * rho(A)(g))
    return rep
