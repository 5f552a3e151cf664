"""Degree -n graded Poisson brackets, Hamiltonians and derived brackets.

A bracket is fixed by its values on pairs of generators and extended as a
biderivation:

    {f, gh} = {f, g} h + (-1)^{(|f|-n)|g|} g {f, h}
    {f, g}  = -(-1)^{(|f|-n)(|g|-n)} {g, f}

``PoissonAlgebra`` accepts arbitrary polynomial generator values (so
Lie-Poisson and Rothstein-type brackets fit); ``DarbouxChart`` is the
constant, non-degenerate special case.
"""
from __future__ import annotations

from typing import Iterable, Mapping

from .graded_algebra import (
    Derivation,
    GeneratorTable,
    Polynomial,
    as_rational,
    check_square_zero,
    koszul,
    poly_sum,
)
from .linalg import rank
from .report import Report


class PoissonAlgebra:
    """Free graded-commutative algebra with a degree -n biderivation bracket."""

    def __init__(
        self,
        table: GeneratorTable,
        n: int,
        brackets: Mapping,
        check_degrees: bool = True,
        strict_skew: bool = True,
    ):
        self.table = table
        self.n = int(n)
        deg = [g.degree for g in table]
        values: dict[tuple[int, int], Polynomial] = {}
        given: dict[tuple[int, int], Polynomial] = {}
        for key, value in brackets.items():
            a, b = key
            i = table[a].id if isinstance(a, str) else int(a)
            j = table[b].id if isinstance(b, str) else int(b)
            value = value if isinstance(value, Polynomial) else table.const(value)
            if check_degrees and value and value.degrees() != {deg[i] + deg[j] - self.n}:
                raise ValueError(
                    f"{{{table.generators[i].name},{table.generators[j].name}}} = {value} "
                    f"must have degree {deg[i] + deg[j] - self.n}"
                )
            old = given.get((i, j))
            if old is not None and old != value:
                raise ValueError(f"two values for ({table.generators[i].name}, {table.generators[j].name})")
            given[(i, j)] = value
        for (i, j), value in given.items():
            values[(i, j)] = value
            if (j, i) in given:
                mirror = value.scale(-koszul((deg[i] - self.n) * (deg[j] - self.n)))
                if strict_skew and given[(j, i)] != mirror:
                    raise ValueError(
                        f"bracket on ({table.generators[j].name}, {table.generators[i].name}) "
                        "contradicts graded skew-symmetry"
                    )
            else:
                values[(j, i)] = value.scale(-koszul((deg[i] - self.n) * (deg[j] - self.n)))
        self.values = {k: v for k, v in values.items() if v}
        self._ham: dict[int, Derivation] = {}
        self._mono_cache: dict = {}

    # generator level ------------------------------------------------------
    def generator_bracket(self, i: int, j: int) -> Polynomial:
        return self.values.get((i, j), self.table.zero())

    def _ham_gen(self, i: int) -> Derivation:
        X = self._ham.get(i)
        if X is None:
            imgs = {j: v for (a, j), v in self.values.items() if a == i}
            X = Derivation(self.table, self.table.generators[i].degree - self.n, imgs)
            self._ham[i] = X
        return X

    # general bracket -------------------------------------------------------
    def _bracket_monomial(self, m, G: Polynomial, gdeg: int) -> Polynomial:
        """{m, G} for a normal-form monomial m and homogeneous G of degree gdeg."""
        table = self.table
        n = self.n
        out = []
        factors = list(m)
        degs = [table.generators[i].degree * e for i, e in factors]
        for pos, (gid, e) in enumerate(factors):
            XG = self._ham_gen(gid)(G)
            if not XG:
                continue
            suffix_deg = sum(degs[pos + 1:])
            prefix = factors[:pos] + ([(gid, e - 1)] if e > 1 else [])
            prefix_p = Polynomial(table, {tuple(prefix): e})
            suffix_p = Polynomial(table, {tuple(factors[pos + 1:]): 1})
            term = prefix_p * XG * suffix_p
            if koszul(suffix_deg * (gdeg - n)) < 0:
                term = -term
            out.append(term)
        return poly_sum(table, out)

    def bracket(self, f: Polynomial, g: Polynomial) -> Polynomial:
        if f.table != self.table or g.table != self.table:
            raise ValueError("bracket arguments over a different generator table")
        pieces = []
        table = self.table
        for gdeg, gpart in g.homogeneous_parts().items():
            for m, c in f.terms.items():
                if not m:
                    continue
                if len(gpart.terms) == 1:
                    key = (m, next(iter(gpart.terms)))
                    hit = self._mono_cache.get(key)
                    if hit is None:
                        mg = next(iter(gpart.terms))
                        hit = self._bracket_monomial(m, Polynomial(table, {mg: 1}), gdeg)
                        if len(self._mono_cache) < 200_000:
                            self._mono_cache[key] = hit
                    pieces.append(hit.scale(c * next(iter(gpart.terms.values()))))
                else:
                    pieces.append(self._bracket_monomial(m, gpart, gdeg).scale(c))
        return poly_sum(table, pieces)

    __call__ = bracket

    def hamiltonian_vector_field(self, f: Polynomial) -> Derivation:
        """The derivation g -> {f, g}; f must be homogeneous."""
        if not f:
            return Derivation(self.table, 0, {})
        k = f.degree - self.n
        imgs = {}
        for g in self.table:
            v = self.bracket(f, self.table.gen(g.name))
            if v:
                imgs[g.id] = v
        return Derivation(self.table, k, imgs)

    def derived_bracket(self, a: Polynomial, theta: Polynomial, b: Polynomial) -> Polynomial:
        return self.bracket(self.bracket(a, theta), b)

    def induced_differential(self, theta: Polynomial, check: bool = True) -> Derivation:
        if check:
            rep = check_master_equation(self, theta)
            if not rep.passed:
                raise MasterEquationError(rep)
        imgs = {}
        for g in self.table:
            v = self.bracket(theta, self.table.gen(g.name))
            if v:
                imgs[g.id] = v
        return Derivation(self.table, 1, imgs)

    # checks ---------------------------------------------------------------
    def _deg(self, f: Polynomial) -> int:
        return f.degree if f else 0

    def skew_residual(self, f, g) -> Polynomial:
        n = self.n
        s = koszul((self._deg(f) - n) * (self._deg(g) - n))
        return self.bracket(f, g) + self.bracket(g, f).scale(s)

    def jacobi_residual(self, a, b, c) -> Polynomial:
        n = self.n
        s = koszul((self._deg(a) - n) * (self._deg(b) - n))
        return (
            self.bracket(a, self.bracket(b, c))
            - self.bracket(self.bracket(a, b), c)
            - self.bracket(b, self.bracket(a, c)).scale(s)
        )

    def check_poisson(self, samples: Iterable[tuple] = ()) -> Report:
        """Skew-symmetry and Jacobi on all generator pairs/triples plus samples."""
        rep = Report("graded Poisson bracket")
        gens = [self.table.gen(g.name) for g in self.table]
        names = self.table.names()
        skew = rep.new("skew-symmetry")
        jac = rep.new("jacobi")
        for i, a in enumerate(gens):
            for j, b in enumerate(gens):
                skew.record((names[i], names[j]), self.skew_residual(a, b))
                for k, c in enumerate(gens):
                    jac.record((names[i], names[j], names[k]), self.jacobi_residual(a, b, c))
        for triple in samples:
            a, b, c = triple
            skew.record((a, b), self.skew_residual(a, b))
            jac.record((a, b, c), self.jacobi_residual(a, b, c))
        return rep


class MasterEquationError(ValueError):
    def __init__(self, report: Report):
        self.report = report
        super().__init__(report.text())


class DarbouxChart(PoissonAlgebra):
    """Constant non-degenerate bracket on a free graded-commutative algebra.

    ``pairs`` lists ``(a, b, c)`` meaning ``{a, b} = c`` with ``|a| + |b| = n``
    (``c`` defaults to 1); the mirrored entries follow from skew-symmetry.
    ``gram`` takes the same kind of entries for self-paired blocks
    (generators of degree n/2), e.g. ``{("e1", "e1"): 1}``.
    """

    def __init__(self, table: GeneratorTable, n: int, pairs: Iterable, gram: Mapping | None = None):
        brackets = {}
        seen: set[str] = set()
        pairs = [tuple(p) if len(p) == 3 else (p[0], p[1], 1) for p in pairs]
        entries = list(pairs) + [(a, b, c) for (a, b), c in dict(gram or {}).items()]
        for a, b, c in entries:
            if table[a].degree + table[b].degree != n:
                raise ValueError(f"pair ({a}, {b}) does not have total degree {n}")
            c = as_rational(c)
            if not c:
                continue
            brackets[(a, b)] = table.const(c)
            seen.update((a, b))
        for g in table:
            if g.name not in seen:
                raise ValueError(f"generator {g.name} is not paired")
        self.pairs = pairs
        self.gram = dict(gram or {})
        super().__init__(table, n, brackets)
        # every generator must pair non-degenerately: check the full Gram matrix
        k = len(table)
        M = [[self.generator_bracket(i, j).constant_term() for j in range(k)] for i in range(k)]
        if rank(M) != k:
            raise ValueError("Darboux pairing is degenerate")


def check_master_equation(P: PoissonAlgebra, theta: Polynomial) -> Report:
    rep = Report("classical master equation")
    if theta and theta.degrees() != {P.n + 1}:
        raise ValueError(f"Hamiltonian must be homogeneous of degree {P.n + 1}, got {sorted(theta.degrees())}")
    c = rep.new("{theta,theta}=0")
    c.record(("theta", "theta"), P.bracket(theta, theta))
    return rep


def poisson_bracket(chart: PoissonAlgebra, f: Polynomial, g: Polynomial) -> Polynomial:
    return chart.bracket(f, g)


def hamiltonian_vector_field(chart: PoissonAlgebra, f: Polynomial) -> Derivation:
    return chart.hamiltonian_vector_field(f)


def derived_bracket(chart: PoissonAlgebra, a: Polynomial, theta: Polynomial, b: Polynomial) -> Polynomial:
    return chart.derived_bracket(a, theta, b)


def induced_differential(chart: PoissonAlgebra, theta: Polynomial) -> Derivation:
    return chart.induced_differential(theta)


def differential_report(chart: PoissonAlgebra, theta: Polynomial) -> Report:
    """Master equation plus the square-zero property of the induced differential."""
    rep = check_master_equation(chart, theta)
    Q = chart.induced_differential(theta, check=False)
    rep.add(check_square_zero(Q))
    return rep
