"""Higher Lie conformal and Poisson vertex algebras of degree n.

The spectral variables Lambda and Gamma are odd generators of degree 1
appended to the carrier's generator table, so every identity is an equality
of polynomials with Koszul signs handled by the algebra.  Since Lambda is odd,
Lambda^2 = 0 and a Lambda-bracket has the two-term form

    {a_L b} = a_(0)b + L a_(1)b.

Generator data fixes the bracket; it is extended by right Leibniz
``{a_L bc} = {a_L b} c + (-1)^{(|a|+1-n)|b|} b {a_L c}`` and, in the left
slot, by skew-symmetry ``{a_L b} = -e {b_{-L-d} a}`` with
``e = (-1)^{(|a|+1-n)(|b|+1-n)}``.  Spectral factors pass to the front:
``{mu p _V nu q} = (-1)^{|nu|(|p|+1-n)} mu nu {p_V q}``.
"""
from __future__ import annotations

import random
from fractions import Fraction
from typing import Callable, Mapping

from .graded_algebra import Derivation, GeneratorTable, Polynomial, koszul, monomial_poly
from .courant_dorfman import CDStructure, TruncationError, check_axioms
from .report import Report

SPECTRAL = ("Lambda", "Gamma")


class LambdaPolynomial:
    """``sum_j Lambda^j c_j`` with Lambda written on the left of each coefficient."""

    def __init__(self, coefficients):
        coeffs = list(coefficients)
        while coeffs and not coeffs[-1]:
            coeffs.pop()
        self.coefficients = coeffs

    def __getitem__(self, j) -> Polynomial | None:
        return self.coefficients[j] if j < len(self.coefficients) else None

    def coefficient(self, j, table) -> Polynomial:
        c = self[j]
        return c if c is not None else table.zero()

    def __bool__(self):
        return bool(self.coefficients)

    def __eq__(self, other):
        if not isinstance(other, LambdaPolynomial):
            return NotImplemented
        return [str(c) for c in self.coefficients] == [str(c) for c in other.coefficients]

    def __str__(self):
        parts = []
        for j, c in enumerate(self.coefficients):
            if not c:
                continue
            body = str(c)
            if j == 0:
                parts.append(body)
            else:
                lam = "Lambda" if j == 1 else f"Lambda^{j}"
                parts.append(f"{lam}*({body})" if len(c.terms) > 1 else f"{lam}*{body}")
        return " + ".join(parts) if parts else "0"

    __repr__ = __str__


def _spectral_names(table: GeneratorTable):
    names = []
    for base in SPECTRAL:
        name = base
        while name in table:
            name = "_" + name
        names.append(name)
    return names


class LambdaAlgebra:
    """A Lambda-bracket on the free graded-commutative algebra over ``table``.

    ``values`` maps generator pairs to coefficient lists ``[c0, c1, ...]``.
    Only two-term values are representable (Lambda is odd); longer lists are
    kept in ``higher_terms`` and reported by the checkers.  A pair given in
    one orientation only is completed by skew-symmetry; absent pairs are 0.

    ``truncated`` lists the generators whose degrees count towards the window
    0..n-1 (default: all).  Generators outside it (e.g. a dgca factor) are
    unbounded.  ``d_overrides`` replaces d on individual monomials; it exists
    to build deliberately broken inputs.
    """

    def __init__(
        self,
        table: GeneratorTable,
        n: int,
        d: Mapping | Derivation | None = None,
        values: Mapping | None = None,
        truncated=None,
        d_overrides: Mapping | None = None,
        name: str = "",
    ):
        self.table = table
        self.n = n = int(n)
        self.name = name
        lname, gname = _spectral_names(table)
        self.plus = table.extended([(lname, 1), (gname, 1)])
        self.L = self.plus.gen(lname)
        self.G = self.plus.gen(gname)
        self.spectral_ids = {self.plus[lname].id, self.plus[gname].id}
        if isinstance(d, Derivation):
            self._d = d
        else:
            self._d = Derivation(table, 1, dict(d or {}))
        self.d_overrides = {}
        for f, v in dict(d_overrides or {}).items():
            if len(f.terms) != 1:
                raise ValueError("d overrides are keyed by single monomials")
            (m, c), = f.terms.items()
            self.d_overrides[m] = v.scale(Fraction(1) / c) if c != 1 else v
        if truncated is None:
            self.truncated = {g.id for g in table}
        else:
            self.truncated = {table[t].id if isinstance(t, str) else int(t) for t in truncated}
        self._tdeg = [g.degree if g.id in self.truncated else 0 for g in table]
        self.higher_terms: dict = {}
        given = {}
        for (a, b), coeffs in dict(values or {}).items():
            i = table[a].id if isinstance(a, str) else int(a)
            j = table[b].id if isinstance(b, str) else int(b)
            coeffs = [c if isinstance(c, Polynomial) else table.const(c) for c in coeffs]
            coeffs += [table.zero()] * (2 - len(coeffs))
            for k, c in enumerate(coeffs):
                target = table.generators[i].degree + table.generators[j].degree + 1 - n - k
                if c and c.degrees() != {target}:
                    raise ValueError(
                        f"{{{table.generators[i].name}_L {table.generators[j].name}}}: "
                        f"coefficient of Lambda^{k} must have degree {target}"
                    )
            if any(coeffs[2:]):
                self.higher_terms[(i, j)] = coeffs[2:]
            given[(i, j)] = (coeffs[0], coeffs[1])
        self.given = given
        gens = {}
        for (i, j), v in given.items():
            gens[(i, j)] = v
        for (i, j), v in given.items():
            if (j, i) not in given:
                gens[(j, i)] = self._skew_pair(j, i, v)
        self.generator_values = {k: v for k, v in gens.items() if v[0] or v[1]}
        self._cache: dict = {}

    # -- basic maps ----------------------------------------------------------
    def gen(self, name: str) -> Polynomial:
        return self.table.gen(name)

    def tdegree(self, m) -> int:
        return sum(self._tdeg[i] * e for i, e in m if i < len(self._tdeg))

    def degree(self, f: Polynomial) -> int:
        return f.degree if f else 0

    def d(self, f: Polynomial) -> Polynomial:
        """The differential on carrier or spectral-extended polynomials."""
        plus = f.table == self.plus
        out = []
        for m, c in f.terms.items():
            core = tuple((i, e) for i, e in m if i not in self.spectral_ids)
            spectral = tuple((i, e) for i, e in m if i in self.spectral_ids)
            if self.tdegree(core) >= self.n - 1:
                # the truncated part would land in degree n, outside the window
                raise TruncationError(f"d is not defined on {self.table.monomial_str(core)}")
            if core in self.d_overrides:
                img = self.d_overrides[core]
            else:
                img = self._d(monomial_poly(self.table, core))
            if plus:
                img = img.lift(self.plus) * monomial_poly(self.plus, spectral)
            out.append(img.scale(c))
        table = self.plus if plus else self.table
        acc = table.zero()
        for p in out:
            acc = acc + p
        return acc

    def _check_range(self, f: Polynomial, what: str):
        for m in f.terms:
            core = tuple((i, e) for i, e in m if i not in self.spectral_ids)
            if self.tdegree(core) > self.n - 1:
                raise TruncationError(f"{what} leaves the degree window: {f}")
        return f

    # -- the bracket on carrier monomials --------------------------------------
    def _skew_pair(self, j, i, value_ji):
        """{g_i _V g_j} as (c0, c1) from {g_j _W g_i} = (a0, a1)."""
        table = self.table
        di, dj = table.generators[i].degree, table.generators[j].degree
        eps = koszul((di + 1 - self.n) * (dj + 1 - self.n))
        a0, a1 = value_ji
        c0 = a0 - self.d(a1) if a1 else a0
        return (c0.scale(-eps), a1.scale(eps))

    def _pair_gen(self, p, g: int):
        """{p _V g} for a monomial p and a generator id g, as (c0, c1)."""
        table = self.table
        if len(p) == 1 and p[0][1] == 1:
            v = self.generator_values.get((p[0][0], g))
            return v if v is not None else (table.zero(), table.zero())
        key = ("g", p, g)
        hit = self._cache.get(key)
        if hit is not None:
            return hit
        a0, a1 = self.pair(((g, 1),), monomial_poly(table, p))
        dp = table.monomial_degree(p)
        eps = koszul((dp + 1 - self.n) * (table.generators[g].degree + 1 - self.n))
        c0 = a0 - self.d(a1) if a1 else a0
        out = (c0.scale(-eps), a1.scale(eps))
        self._cache[key] = out
        return out

    def pair(self, p, q: Polynomial):
        """{p _V q} for a carrier monomial p and carrier polynomial q, as (c0, c1)."""
        table = self.table
        z = table.zero()
        if not p:
            return z, z
        dp = table.monomial_degree(p)
        k = dp + 1 - self.n
        c0s, c1s = [], []
        for qm, qc in q.terms.items():
            key = ("m", p, qm)
            hit = self._cache.get(key)
            if hit is None:
                h0, h1 = [], []
                prefix_deg = 0
                for pos, (g, e) in enumerate(qm):
                    v0, v1 = self._pair_gen(p, g)
                    if v0 or v1:
                        # {p, g^e} = e g^(e-1) {p, g} for even g (any integer e); e = 1 for odd g
                        pre = monomial_poly(table, qm[:pos] + (((g, e - 1),) if e != 1 else ()), e)
                        sufp = monomial_poly(table, qm[pos + 1:])
                        s = koszul(k * prefix_deg)
                        if v0:
                            h0.append((pre * v0 * sufp).scale(s))
                        if v1:
                            # prefix * V c1 = (-1)^{|prefix|} V prefix c1
                            h1.append((pre * v1 * sufp).scale(s * koszul(prefix_deg)))
                    prefix_deg += table.generators[g].degree * e
                # renormalize: the word is the normal form of qm, so its sign is +1
                hit = (sum(h0, z), sum(h1, z))
                if len(self._cache) < 200_000:
                    self._cache[key] = hit
            c0s.append(hit[0].scale(qc))
            c1s.append(hit[1].scale(qc))
        return sum(c0s, z), sum(c1s, z)

    # -- spectral-extended bracket ---------------------------------------------
    def _split(self, m):
        core = tuple((i, e) for i, e in m if i not in self.spectral_ids)
        spectral = tuple((i, e) for i, e in m if i in self.spectral_ids)
        return core, spectral

    def lam(self, A: Polynomial, B: Polynomial, V: Polynomial | None = None) -> Polynomial:
        """{A _V B} for polynomials over the spectral-extended table (default V = Lambda)."""
        plus = self.plus
        if V is None:
            V = self.L
        A = A if A.table == plus else A.lift(plus)
        B = B if B.table == plus else B.lift(plus)
        out = plus.zero()
        tdeg = self.table.monomial_degree
        for am, ac in A.terms.items():
            p, mu = self._split(am)
            if not p:
                continue
            # am = p mu (normal form puts spectral generators last) = (-1)^{|p||mu|} mu p
            mdeg = plus.monomial_degree(mu)
            sa = koszul(tdeg(p) * mdeg)
            k = tdeg(p) + 1 - self.n
            for bm, bc in B.terms.items():
                q, nu = self._split(bm)
                ndeg = plus.monomial_degree(nu)
                sb = koszul(tdeg(q) * ndeg) * koszul(ndeg * k)
                c0, c1 = self.pair(p, monomial_poly(self.table, q))
                if not c0 and not c1:
                    continue
                val = c0.lift(plus) + V * c1.lift(plus)
                pref = monomial_poly(plus, mu) * monomial_poly(plus, nu)
                out = out + (pref * val).scale(ac * bc * sa * sb)
        return self._check_range(out, f"{{{A}_V {B}}}")

    def lambda_bracket(self, a: Polynomial, b: Polynomial) -> LambdaPolynomial:
        """{a_Lambda b} for carrier polynomials, as coefficients (a_(0)b, a_(1)b)."""
        c0s, c1s = self.table.zero(), self.table.zero()
        for m, c in a.terms.items():
            if not m:
                continue
            c0, c1 = self.pair(m, b)
            c0s = c0s + c0.scale(c)
            c1s = c1s + c1.scale(c)
        self._check_range(c0s, f"{{{a}_L {b}}}")
        return LambdaPolynomial([c0s, c1s])

    def coefficients(self, F: Polynomial, var: Polynomial | None = None):
        """Split a spectral-extended polynomial linear in ``var`` as (c0, c1), F = c0 + var c1."""
        var = var if var is not None else self.L
        vid = next(iter(var.terms))[0][0]
        c0, c1 = self.plus.zero(), self.plus.zero()
        for m, c in F.terms.items():
            if any(i == vid for i, _ in m):
                rest = tuple((i, e) for i, e in m if i != vid)
                s, mm = self.plus.mul_monomials(((vid, 1),), rest)
                c1 = c1 + monomial_poly(self.plus, rest, c * s)
            else:
                c0 = c0 + monomial_poly(self.plus, m, c)
        return c0, c1

    def skew_substituted(self, b: Polynomial, a: Polynomial) -> Polynomial:
        """{b_{-Lambda-d} a} computed from {b_Lambda a}."""
        F = self.lam(b, a)
        c0, c1 = self.coefficients(F)
        return c0 - self.L * c1 - self.d(c1)

    # -- sampling --------------------------------------------------------------
    def random_element(self, rng: random.Random, tdeg: int, terms: int = 2, extra: Callable | None = None) -> Polynomial:
        """Random element of truncated degree ``tdeg``; ``extra`` supplies factors from untruncated generators."""
        table = self.table
        gens = [g for g in table if g.id in self.truncated and g.degree > 0]
        base = [g for g in table if g.id in self.truncated and g.degree == 0]
        monos = []

        def rec(idx, remaining, acc):
            if len(monos) >= 300:
                return
            if remaining == 0:
                monos.append(tuple(acc))
                return
            for k in range(idx, len(gens)):
                g = gens[k]
                if g.degree > remaining:
                    continue
                for e in range(1, (1 if g.odd else remaining // g.degree) + 1):
                    rec(k + 1, remaining - e * g.degree, acc + [(g.id, e)])

        rec(0, tdeg, [])
        if not monos:
            return table.zero()
        acc = table.zero()
        for _ in range(terms):
            m = dict(rng.choice(monos))
            for _ in range(rng.randint(0, 2)):
                if base:
                    i = rng.choice(base).id
                    m[i] = m.get(i, 0) + 1
            f = monomial_poly(table, tuple(sorted(m.items())), rng.choice([-2, -1, 1, 2, 3, Fraction(1, 2)]))
            if extra is not None:
                f = f * extra(rng)
            acc = acc + f
        return acc

    def __repr__(self):
        return f"LambdaAlgebra(n={self.n}, generators={self.table.names()})"


# ---------------------------------------------------------------------------
# axiom checks


def _instances(W: LambdaAlgebra, rng, count, arity, sampler=None):
    sampler = sampler or (lambda r, k: W.random_element(r, k))
    out = []
    tries = 0
    while len(out) < count and tries < 20 * count + 20:
        tries += 1
        els = [sampler(rng, rng.randint(0, W.n - 1)) for _ in range(arity)]
        if all(els):
            out.append(els)
    return out


def _generator_elements(W: LambdaAlgebra, generators=None):
    names = generators if generators is not None else [W.table.generators[i].name for i in sorted(W.truncated)]
    return [(x, W.gen(x)) for x in names]


def check_lca(
    W: LambdaAlgebra, samples: int = 200, seed: int = 0, sampler=None, generators=None, admissible=None
) -> Report:
    """Sesquilinearity, skew-symmetry and Jacobi as polynomial identities in Lambda, Gamma.

    ``admissible`` filters instances (e.g. to drop window-tainted ones); a
    skipped instance is counted in the report data, never as a pass.
    """
    n = W.n
    rep = Report(f"higher Lie conformal algebra axioms (n={n})")
    two = rep.new("two-term Lambda-brackets")
    for (i, j), tail in W.higher_terms.items():
        two.fail(
            (W.table.generators[i].name, W.table.generators[j].name),
            " + ".join(f"Lambda^{k + 2}*({c})" for k, c in enumerate(tail) if c),
            "Lambda is odd, so Lambda^j = 0 for j >= 2; these coefficients cannot be represented",
        )
    if not W.higher_terms:
        two.record(("table",), 0)
    s1 = rep.new("sesquilinearity {da_L b} = -L{a_L b}")
    s2 = rep.new("sesquilinearity {a_L db} = -(-1)^(|a|-n)(d+L){a_L b}")
    sk = rep.new("skew-symmetry")
    jac = rep.new("jacobi")
    dsq = rep.new("d squared")
    skipped = {"window": 0, "truncation": 0}
    L, G = W.L, W.G
    deg = W.degree

    def run(check, inputs, fn):
        if admissible is not None and not admissible(inputs):
            skipped["window"] += 1
            return
        try:
            check.record(inputs, fn())
        except TruncationError:
            skipped["truncation"] += 1

    def pairs(a, b, label):
        A, B = deg(a), deg(b)
        run(s1, label, lambda: W.lam(W.d(a), b) + L * W.lam(a, b))
        run(s2, label, lambda: W.lam(a, W.d(b)) + (W.d(W.lam(a, b)) + L * W.lam(a, b)).scale(koszul(A - n)))
        eps = koszul((A + 1 - n) * (B + 1 - n))
        run(sk, label, lambda: W.lam(a, b) + W.skew_substituted(b, a).scale(eps))

    def triples(a, b, c, label):
        A, B = deg(a), deg(b)
        eps = koszul((A + 1 - n) * (B + 1 - n))
        run(
            jac,
            label,
            lambda: W.lam(a, W.lam(b, c, G), L)
            - W.lam(W.lam(a, b, L), c, L + G)
            - W.lam(b, W.lam(a, c, L), G).scale(eps),
        )

    gens = _generator_elements(W, generators)
    for x, a in gens:
        run(dsq, (x,), lambda: W.d(W.d(a)))
        for y, b in gens:
            pairs(a, b, (x, y))
            for z, c in gens:
                triples(a, b, c, (x, y, z))
    rng = random.Random(seed)
    for a, b in _instances(W, rng, samples, 2, sampler):
        pairs(a, b, (a, b))
        run(dsq, (a,), lambda: W.d(W.d(a)))
    for a, b, c in _instances(W, rng, samples, 3, sampler):
        triples(a, b, c, (a, b, c))
    rep.data["skipped"] = skipped
    return rep


def check_pva(W: LambdaAlgebra, samples: int = 200, seed: int = 0, sampler=None, generators=None, admissible=None) -> Report:
    """check_lca plus right Leibniz and the derivation property of d."""
    rep = check_lca(W, samples, seed, sampler, generators, admissible)
    rep.title = f"higher Poisson vertex algebra axioms (n={W.n})"
    n = W.n
    lb = rep.new("leibniz {a_L bc} = {a_L b}c + (-1)^((|a|+1-n)|b|) b{a_L c}")
    der = rep.new("d is a derivation")
    rng = random.Random(seed + 1)
    sampler = sampler or (lambda r, k: W.random_element(r, k))
    deg = W.degree
    skipped = rep.data["skipped"]

    def run(check, inputs, fn):
        if admissible is not None and not admissible(inputs):
            skipped["window"] += 1
            return
        try:
            check.record(inputs, fn())
        except TruncationError:
            skipped["truncation"] += 1

    gens = _generator_elements(W, generators)
    elements = [(x, a) for x, a in gens] + [((f,), f) for f in (sampler(rng, rng.randint(0, n - 1)) for _ in range(6)) if f]
    for x, f in elements:
        for y, g in elements:
            if deg(f) + deg(g) <= n - 2:
                run(der, (x, y), lambda: W.d(f * g) - W.d(f) * g - (f * W.d(g)).scale(koszul(deg(f))))
    tries = 0
    count = 0
    while count < samples and tries < 20 * samples:
        tries += 1
        kb = rng.randint(0, n - 1)
        kc = rng.randint(0, n - 1 - kb)
        a = sampler(rng, rng.randint(0, n - 1))
        b = sampler(rng, kb)
        c = sampler(rng, kc)
        if not (a and b and c):
            continue
        count += 1
        A, B = deg(a), deg(b)
        run(
            lb,
            (a, b, c),
            lambda: W.lam(a, b * c) - W.lam(a, b) * c.lift(W.plus) - (b.lift(W.plus) * W.lam(a, c)).scale(
                koszul((A + 1 - n) * B)
            ),
        )
    for x, a in gens:
        for y, b in gens:
            for z, c in gens:
                if deg(b) + deg(c) <= n - 1:
                    A, B = deg(a), deg(b)
                    run(
                        lb,
                        (x, y, z),
                        lambda: W.lam(a, b * c)
                        - W.lam(a, b) * c.lift(W.plus)
                        - (b.lift(W.plus) * W.lam(a, c)).scale(koszul((A + 1 - n) * B)),
                    )
    return rep


# ---------------------------------------------------------------------------
# correspondence with extended higher Courant-Dorfman algebras


def pva_from_cd(cd, check: bool = True, samples: int = 50, seed: int = 0) -> LambdaAlgebra:
    """{a_L b} = [a,b] + (-1)^{|a|+1-n} L <a,b> on generators; d as in cd."""
    if check:
        rep = check_axioms(cd, samples=samples, seed=seed)
        if not rep.passed:
            raise ValueError("the Courant-Dorfman structure fails its axioms\n" + rep.text())
    table = cd.table
    n = cd.n
    values = {}
    for gi in table:
        for gj in table:
            a, b = table.gen(gi.name), table.gen(gj.name)
            c0 = cd.bracket_values.get((gi.id, gj.id), table.zero())
            c1 = cd.pair(a, b).scale(koszul(gi.degree + 1 - n)) if gi.degree + gj.degree >= n else table.zero()
            if c0 or c1:
                values[(gi.name, gj.name)] = [c0, c1]
    return LambdaAlgebra(table, n, dict(cd.d_images), values, name=cd.name)


def cd_from_pva(W: LambdaAlgebra):
    """[a,b] = a_(0)b and <a,b> = (-1)^{|a|+1-n} a_(1)b on generators."""
    if W.higher_terms:
        (i, j), tail = next(iter(W.higher_terms.items()))
        raise ValueError(
            f"Lambda-bracket of ({W.table.generators[i].name}, {W.table.generators[j].name}) has "
            f"coefficients beyond Lambda^1: {[str(c) for c in tail]}"
        )
    table = W.table
    n = W.n
    for g in table:
        if g.degree > n - 1:
            raise ValueError(f"generator {g.name} has degree {g.degree} > {n - 1}")
    d = {}
    for g in table:
        if g.degree <= n - 2:
            v = W.d(table.gen(g.name))
            if v:
                d[g.name] = v
    pairing, bracket = {}, {}
    extended = False
    for (i, j), (c0, c1) in W.generator_values.items():
        a, b = table.generators[i], table.generators[j]
        if c0:
            bracket[(a.name, b.name)] = c0
        if c1:
            pairing[(a.name, b.name)] = c1.scale(koszul(a.degree + 1 - n))
            extended = extended or a.degree + b.degree > n
    return CDStructure(n, table, d, pairing, bracket, extended=extended, name=W.name)


def lambda_tables_equal(W1: LambdaAlgebra, W2: LambdaAlgebra) -> list[str]:
    """Differences between the generator tables of two Lambda-algebras (by name)."""
    diffs = []
    names = W1.table.names()
    if names != W2.table.names():
        return [f"generators differ: {names} vs {W2.table.names()}"]
    for a in names:
        for b in names:
            x = W1.lambda_bracket(W1.gen(a), W1.gen(b))
            y = W2.lambda_bracket(W2.gen(a), W2.gen(b))
            if x != y:
                diffs.append(f"{{{a}_L {b}}}: {x} vs {y}")
        if W1.table[a].degree <= W1.n - 2 and str(W1.d(W1.gen(a))) != str(W2.d(W2.gen(a))):
            diffs.append(f"d({a})")
    return diffs


def weak_cd_from_lca(
    W: LambdaAlgebra, samples: int = 200, seed: int = 0, sampler=None, generators=None, admissible=None
) -> Report:
    """Weak Courant-Dorfman data [a,b] = a_(0)b, <a,b> = a_(1)b and its three axioms.

    Setting Lambda = 0 in the skew-symmetry axiom gives
    ``[a,b] + e [b,a] = e d<b,a>`` with the pairing read from the Lambda^1
    tail (the substitution Lambda -> -d turns ``Lambda b_(1)a`` into
    ``-d(b_(1)a)``).
    """
    n = W.n
    rep = Report(f"weak Courant-Dorfman axioms (n={n})")
    jac = rep.new("jacobi [a,[b,c]] = [[a,b],c] + e[b,[a,c]]")
    sk = rep.new("skew [a,b] + e[b,a] = e d<b,a>")
    dd = rep.new("[da,b] = 0")
    sym = rep.new("graded symmetry <a,b> = e <b,a>")
    skipped = {"window": 0, "truncation": 0}
    deg = W.degree

    def br(a, b):
        return W.lambda_bracket(a, b).coefficient(0, W.table)

    def pr(a, b):
        return W.lambda_bracket(a, b).coefficient(1, W.table)

    def run(check, inputs, fn):
        if admissible is not None and not admissible(inputs):
            skipped["window"] += 1
            return
        try:
            check.record(inputs, fn())
        except TruncationError:
            skipped["truncation"] += 1

    def pairs(a, b, label):
        A, B = deg(a), deg(b)
        eps = koszul((A + 1 - n) * (B + 1 - n))
        run(sk, label, lambda: br(a, b) + br(b, a).scale(eps) - W.d(pr(b, a)).scale(eps))
        run(dd, label, lambda: br(W.d(a), b))
        run(sym, label, lambda: pr(a, b) - pr(b, a).scale(eps))

    def triples(a, b, c, label):
        A, B = deg(a), deg(b)
        eps = koszul((A + 1 - n) * (B + 1 - n))
        run(jac, label, lambda: br(a, br(b, c)) - br(br(a, b), c) - br(b, br(a, c)).scale(eps))

    gens = _generator_elements(W, generators)
    for x, a in gens:
        for y, b in gens:
            pairs(a, b, (x, y))
            for z, c in gens:
                triples(a, b, c, (x, y, z))
    rng = random.Random(seed)
    for a, b in _instances(W, rng, samples, 2, sampler):
        pairs(a, b, (a, b))
    for a, b, c in _instances(W, rng, samples, 3, sampler):
        triples(a, b, c, (a, b, c))
    rep.data["skipped"] = skipped
    table = {}
    for x, a in gens:
        for y, b in gens:
            try:
                v0, v1 = br(a, b), pr(a, b)
            except TruncationError:
                continue
            if v0 or v1:
                table[f"{x},{y}"] = {"bracket": str(v0), "pairing": str(v1)}
    rep.data["structure"] = table
    return rep
