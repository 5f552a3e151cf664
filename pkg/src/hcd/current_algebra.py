"""Current algebras: tensor products with dgcas, graded quotients and reductions.

A dgca E is a free graded-commutative algebra with a differential.  The two
presets are

* ``laurent(k, N)``: even invertible t_1..t_k of degree 0, odd th_1..th_k
  of degree 1, D t_i = th_i, with exponent window [-N, N];
* ``derham(m)``: polynomial s_1..s_m of degree 0 and ds_1..ds_m of degree 1.

C (x) E is realized on the union of the two generator tables, so Koszul signs
between the factors are those of the polynomial algebra.  Quotients by Im d,
by the ideal (Im d)A and by Z-exact ideals are decided exactly: every
component of a suitable multigrading is finite-dimensional, and membership
is a rank computation over Q.
"""
from __future__ import annotations

import itertools
import random
from fractions import Fraction

from .courant_dorfman import TruncationError
from .graded_algebra import Derivation, GeneratorTable, Polynomial, check_square_zero, koszul, monomial_poly
from .lambda_bracket import LambdaAlgebra
from .linalg import Subspace
from .report import VACUOUS, Report
from .symplectic import PoissonAlgebra


# ---------------------------------------------------------------------------
# dgcas


class DGCA:
    """Free dgca with paired variables (even u_i, odd du_i = D u_i)."""

    def __init__(self, kind: str, k: int, window: int | None = None):
        self.kind = kind
        self.k = k
        self.window = window
        if kind == "laurent":
            even = [f"t{i}" for i in range(1, k + 1)] if k > 1 else ["t"]
            odd = [f"th{i}" for i in range(1, k + 1)] if k > 1 else ["th"]
            gens = [(x, 0, True) for x in even] + [(y, 1) for y in odd]
        elif kind == "derham":
            even = [f"s{i}" for i in range(1, k + 1)]
            odd = [f"ds{i}" for i in range(1, k + 1)]
            gens = [(x, 0) for x in even] + [(y, 1) for y in odd]
        else:
            raise ValueError(f"unknown dgca kind {kind!r}")
        self.even, self.odd = even, odd
        self.table = GeneratorTable(gens)
        self.D = Derivation(self.table, 1, {x: self.table.gen(y) for x, y in zip(even, odd)})

    @classmethod
    def laurent(cls, k: int = 1, N: int = 6) -> "DGCA":
        return cls("laurent", k, N)

    @classmethod
    def derham(cls, m: int = 1) -> "DGCA":
        return cls("derham", m, None)

    def without_differential(self) -> "DGCA":
        """Same algebra with D = 0."""
        E = DGCA(self.kind, self.k, self.window)
        E.D = Derivation(E.table, 1, {})
        return E

    @classmethod
    def parse(cls, preset: str, window: int | None = None) -> "DGCA":
        """``laurent:k,N`` or ``derham:m``."""
        kind, _, args = preset.partition(":")
        vals = [int(v) for v in args.split(",") if v.strip()] if args else []
        if kind == "laurent":
            k = vals[0] if vals else 1
            N = vals[1] if len(vals) > 1 else (window or 6)
            if window is not None:
                N = window
            return cls.laurent(k, N)
        if kind == "derham":
            return cls.derham(vals[0] if vals else 1)
        raise ValueError(f"unknown dgca {preset!r}")

    @property
    def name(self) -> str:
        return f"laurent({self.k},{self.window})" if self.kind == "laurent" else f"derham({self.k})"

    def check(self) -> Report:
        rep = Report(f"dgca {self.name}")
        rep.add(check_square_zero(self.D))
        return rep

    def __repr__(self):
        return f"DGCA({self.name})"


class TensorTable:
    """Union of a carrier table and a dgca table, with name bookkeeping."""

    def __init__(self, carrier: GeneratorTable, E: DGCA):
        self.carrier = carrier
        self.E = E
        taken = set(carrier.names())
        self.rename = {}
        extra = []
        for g in E.table:
            name = g.name
            while name in taken:
                name = name + "_E"
            taken.add(name)
            self.rename[g.name] = name
            extra.append((name, g.degree, g.invertible))
        self.table = carrier.extended(extra)
        self.offset = len(carrier)
        self.even = [self.table[self.rename[x]].id for x in E.even]
        self.odd = [self.table[self.rename[x]].id for x in E.odd]
        self.var_index = {i: k for k, i in enumerate(self.even)}
        self.var_index.update({i: k for k, i in enumerate(self.odd)})
        self.D = Derivation(self.table, 1, {i + self.offset: self.from_E(v) for i, v in E.D.images.items()})

    def e(self, name: str) -> Polynomial:
        return self.table.gen(self.rename[name])

    def from_E(self, f: Polynomial) -> Polynomial:
        terms = {}
        for m, c in f.terms.items():
            terms[tuple((i + self.offset, e) for i, e in m)] = c
        return Polynomial(self.table, terms)

    def lift(self, a: Polynomial) -> Polynomial:
        return a.lift(self.table)

    def is_carrier(self, gid: int) -> bool:
        return gid < self.offset

    def split(self, m):
        return (
            tuple((i, e) for i, e in m if i < self.offset),
            tuple((i, e) for i, e in m if i >= self.offset),
        )

    def weights(self, m) -> tuple:
        w = [0] * self.E.k
        for i, e in m:
            k = self.var_index.get(i)
            if k is not None:
                w[k] += e
        return tuple(w)

    def max_exponent(self, f: Polynomial) -> int:
        best = 0
        for m in f.terms:
            for i, e in m:
                if i in self.even and self.E.kind == "laurent":
                    best = max(best, abs(e))
        return best

    def admissible(self, elements) -> bool:
        """Inputs stay in the safe part of the Laurent window (no taint possible)."""
        if self.E.kind != "laurent":
            return True
        polys = [x for x in elements if isinstance(x, Polynomial)]
        if len(polys) != len(elements):
            return True
        total = [0] * self.E.k
        for f in polys:
            worst = [0] * self.E.k
            for m in f.terms:
                for i, e in m:
                    if i in self.even:
                        k = self.var_index[i]
                        worst[k] = max(worst[k], abs(e))
            total = [a + b for a, b in zip(total, worst)]
        return all(t + 1 <= self.E.window for t in total)

    def tainted(self, f: Polynomial) -> bool:
        return self.E.kind == "laurent" and self.max_exponent(f) > self.E.window

    def random_E(self, rng: random.Random, degree: int | None = None, spread: int = 2) -> Polynomial:
        """A random dgca monomial (small exponents) of the given degree."""
        k = self.E.k
        if degree is None:
            degree = rng.randint(0, k)
        degree = min(degree, k)
        J = set(rng.sample(range(k), degree))
        m = []
        for idx in range(k):
            lo = -spread if self.E.kind == "laurent" else 0
            e = rng.randint(lo, spread)
            if e:
                m.append((self.even[idx], e))
        for idx in sorted(J):
            m.append((self.odd[idx], 1))
        return monomial_poly(self.table, tuple(sorted(m)))


# ---------------------------------------------------------------------------
# tensor products


def tensor_lca(C: LambdaAlgebra, E: DGCA) -> LambdaAlgebra:
    """C (x) E with {a f _L b g} = (-1)^{(|b|+1-n)|f|} {a _{L+d_E} b} f g.

    Realized by adjoining E's generators with trivial brackets and the total
    differential d_C + d_E; the formula above is what the Leibniz and skew
    rules produce, and ``tensor_bracket_formula`` evaluates it directly.
    """
    tt = TensorTable(C.table, E)
    table = tt.table
    images = {k: v.lift(table) for k, v in C._d.images.items()}
    images.update(tt.D.images)
    values = {
        (C.table.generators[i].name, C.table.generators[j].name): [c0.lift(table), c1.lift(table)]
        for (i, j), (c0, c1) in C.generator_values.items()
    }
    overrides = {monomial_poly(table, m): v.lift(table) for m, v in C.d_overrides.items()}
    W = LambdaAlgebra(
        table,
        C.n,
        Derivation(table, 1, images),
        values,
        truncated=range(len(C.table)),
        d_overrides=overrides,
        name=f"{C.name} (x) {E.name}",
    )
    W.tensor = tt
    W.source = C
    return W


def tensor_sampler(W: LambdaAlgebra):
    tt = W.tensor
    C = W.source

    def sample(rng, k):
        a = C.random_element(rng, k, terms=1)
        if not a:
            return a
        return a.lift(tt.table) * tt.random_E(rng)

    return sample


def tensor_generators(W: LambdaAlgebra, exponents=(-1, 0, 1)) -> list:
    """Named carrier generators times a few dgca monomials (for exhaustive instance lists)."""
    tt = W.tensor
    out = []
    for g in W.source.table:
        for e in exponents:
            for J in range(2):
                f = tt.table.one()
                if tt.E.kind == "laurent" or e >= 0:
                    for i in tt.even:
                        f = f * monomial_poly(tt.table, ((i, e),) if e else ())
                else:
                    continue
                if J:
                    f = f * tt.table.gen(tt.table.generators[tt.odd[0]].name)
                out.append(tt.table.gen(g.name) * f)
    return out


def tensor_bracket_formula(C: LambdaAlgebra, tt: TensorTable, a, f, b, g) -> Polynomial:
    """Direct evaluation of {a f _L b g} from the carrier bracket {a _L b} = c0 + L c1.

    Returns (r0, r1) over ``tt.table`` with {af_L bg} = r0 + L r1.
    """
    n = C.n
    lb = C.lambda_bracket(a, b)
    c0 = lb.coefficient(0, C.table).lift(tt.table)
    c1 = lb.coefficient(1, C.table).lift(tt.table)
    fdeg = f.degree if f else 0
    bdeg = b.degree if b else 0
    sign = koszul((bdeg + 1 - n) * fdeg)
    # (c0 + (L + d_E) c1) f g, with L moved to the front past nothing
    r0 = c0 * f * g + tt.D(c1 * f) * g
    r1 = c1 * f * g
    return r0.scale(sign), r1.scale(sign)


# ---------------------------------------------------------------------------
# exact quotients on finite components


class ComponentSpace:
    """Finite-dimensional components of C (x) E under (degree, weight, E-weights).

    ``cweight`` assigns an integer weight to every generator; carrier
    generators must have positive weight and dgca generators non-negative
    weight.  A component fixes total degree, total weight and the per-variable
    dgca weights (exponent of u_i plus exponent of du_i), and truncation keeps
    the carrier degree <= ``top``.
    """

    def __init__(self, tt: TensorTable, cweight: list[int], top: int | None):
        self.tt = tt
        self.table = tt.table
        self.cweight = cweight
        self.top = top
        self._carrier_cache: dict = {}
        self._basis_cache: dict = {}

    def key(self, m) -> tuple:
        table = self.table
        return (
            table.monomial_degree(m),
            sum(self.cweight[i] * e for i, e in m),
            self.tt.weights(m),
        )

    def in_window(self, m) -> bool:
        if self.top is None:
            return True
        return sum(self.table.generators[i].degree * e for i, e in m if self.tt.is_carrier(i)) <= self.top

    def _carrier_monomials(self, weight: int, degree: int) -> list:
        key = (weight, degree)
        hit = self._carrier_cache.get(key)
        if hit is not None:
            return hit
        gens = [g for g in self.table if self.tt.is_carrier(g.id)]
        out = []

        def rec(idx, w, dg, acc):
            if w == 0:
                if dg == 0:
                    out.append(tuple(acc))
                return
            for k in range(idx, len(gens)):
                g = gens[k]
                cw = self.cweight[g.id]
                if cw <= 0:
                    raise ValueError("carrier generators need positive weight")
                maxe = 1 if g.odd else w // cw
                for e in range(1, maxe + 1):
                    if cw * e > w or g.degree * e > dg:
                        break
                    rec(k + 1, w - cw * e, dg - g.degree * e, acc + [(g.id, e)])

        if weight >= 0 and degree >= 0:
            rec(0, weight, degree, [])
        self._carrier_cache[key] = out
        return out

    def _e_monomials(self, degree: int, weights: tuple) -> list:
        tt = self.tt
        k = tt.E.k
        out = []
        for J in itertools.combinations(range(k), degree):
            m = []
            ok = True
            for idx in range(k):
                e = weights[idx] - (1 if idx in J else 0)
                if e < 0 and tt.E.kind != "laurent":
                    ok = False
                    break
                if e:
                    m.append((tt.even[idx], e))
            if not ok:
                continue
            for idx in J:
                m.append((tt.odd[idx], 1))
            out.append(tuple(sorted(m)))
        return out

    def basis(self, key) -> list:
        hit = self._basis_cache.get(key)
        if hit is not None:
            return hit
        degree, weight, weights = key
        tt = self.tt
        out = []
        for de in range(0, min(degree, tt.E.k) + 1):
            for em in self._e_monomials(de, weights):
                ew = sum(self.cweight[i] * e for i, e in em)
                dc = degree - de
                if dc < 0 or (self.top is not None and dc > self.top):
                    continue
                for cm in self._carrier_monomials(weight - ew, dc):
                    out.append(cm + em)
        self._basis_cache[key] = out
        return out

    def split(self, f: Polynomial) -> dict:
        parts: dict = {}
        for m, c in f.terms.items():
            parts.setdefault(self.key(m), {})[m] = c
        return parts


def _grading_for(tt: TensorTable, images: dict, uniform: bool) -> list[int]:
    """Generator weights making the given generator images homogeneous.

    Carrier generators get weight 1; u_i gets 0 and du_i the uniform shift
    (when ``uniform``) so that a differential is homogeneous of one weight.
    """
    table = tt.table
    w = [1 if tt.is_carrier(g.id) else 0 for g in table]
    shifts = set()
    for gid, img in images.items():
        if not tt.is_carrier(gid) or not img:
            continue
        ws = {sum(w[i] * e for i, e in m) for m in img.terms}
        if len(ws) != 1:
            raise ValueError(
                f"the image of {table.generators[gid].name} is not homogeneous for the polynomial grading; "
                "exact quotients need a homogeneous differential"
            )
        shifts.add(ws.pop() - 1)
    if uniform:
        if len(shifts) > 1:
            raise ValueError(f"the differential shifts the polynomial grading unevenly: {sorted(shifts)}")
        s = shifts.pop() if shifts else 0
        if s < 0:
            raise ValueError("the differential lowers the polynomial grading")
        for i in tt.odd:
            w[i] = s
    return w


class ImageQuotient:
    """Quotient of C (x) E by the image of the total differential."""

    def __init__(self, tt: TensorTable, d, images: dict, top: int | None, order=None):
        self.tt = tt
        self.d = d
        self.space = ComponentSpace(tt, _grading_for(tt, images, uniform=True), top)
        self.order = order
        self._subspaces: dict = {}

    def _subspace(self, key) -> Subspace:
        hit = self._subspaces.get(key)
        if hit is not None:
            return hit
        degree, weight, weights = key
        shift = self.space.cweight[self.tt.odd[0]] if self.tt.odd else 0
        sub = Subspace(key=self.order)
        for m in self.space.basis((degree - 1, weight - shift, weights)):
            try:
                img = self.d(monomial_poly(self.tt.table, m))
            except TruncationError:
                continue
            vec = {mm: c for mm, c in img.terms.items() if self.space.in_window(mm)}
            if vec:
                sub.add(vec)
        self._subspaces[key] = sub
        return sub

    def reduce(self, f: Polynomial) -> Polynomial:
        out = {}
        for key, vec in self.space.split(f).items():
            out.update(self._subspace(key).reduce(vec))
        return Polynomial(self.tt.table, out)

    def contains(self, f: Polynomial) -> bool:
        return not self.reduce(f)


class IdealQuotient:
    """Quotient of a (truncated) free algebra by the ideal generated by given homogeneous elements."""

    def __init__(self, tt: TensorTable, generators: list[Polynomial], top: int | None, cweight=None, order=None):
        self.tt = tt
        gens = [g for g in generators if g]
        if cweight is None:
            cweight = [1 if tt.is_carrier(g.id) else 0 for g in tt.table]
        self.space = ComponentSpace(tt, cweight, top)
        self.generators = []
        for g in gens:
            keys = {self.space.key(m) for m in g.terms}
            if len(keys) != 1:
                # split into homogeneous pieces is not allowed: the ideal would change
                raise ValueError(f"ideal generator {g} is not homogeneous for the chosen grading")
            self.generators.append((keys.pop(), g))
        self.order = order
        self._subspaces: dict = {}

    def _subspace(self, key) -> Subspace:
        hit = self._subspaces.get(key)
        if hit is not None:
            return hit
        degree, weight, weights = key
        sub = Subspace(key=self.order)
        for (gd, gw, gws), g in self.generators:
            rest = (degree - gd, weight - gw, tuple(a - b for a, b in zip(weights, gws)))
            if rest[0] < 0 or rest[1] < 0:
                continue
            for m in self.space.basis(rest):
                prod = g * monomial_poly(self.tt.table, m)
                vec = {mm: c for mm, c in prod.terms.items() if self.space.in_window(mm)}
                if vec:
                    sub.add(vec)
        self._subspaces[key] = sub
        return sub

    def reduce(self, f: Polynomial) -> Polynomial:
        out = {}
        for key, vec in self.space.split(f).items():
            if self.space.top is not None:
                vec = {m: c for m, c in vec.items() if self.space.in_window(m)}
            out.update(self._subspace(key).reduce(vec))
        return Polynomial(self.tt.table, out)

    def contains(self, f: Polynomial) -> bool:
        return not self.reduce(f)

    def ideal_element(self, rng: random.Random, sample) -> Polynomial:
        """A random element of the ideal: generator times a sampled element."""
        if not self.generators:
            return self.tt.table.zero()
        _, g = rng.choice(self.generators)
        return g * sample(rng)


# ---------------------------------------------------------------------------
# L(C,E): graded Lie algebra on C (x) E / Im d


class TaintError(ValueError):
    """An input lies outside the Laurent exponent window."""

    def __init__(self, report: Report):
        self.report = report
        super().__init__(report.text())


def refuse_tainted(tt: TensorTable, *elements):
    if not any(tt.tainted(f) for f in elements):
        return
    rep = Report("boundary taint")
    c = rep.new(f"inputs inside the Laurent window [-{tt.E.window}, {tt.E.window}]")
    for f in elements:
        c.record((f,), f if tt.tainted(f) else 0, f"max |exponent| = {tt.max_exponent(f)}")
    raise TaintError(rep)


class LieQuotient:
    """Bracket [A, B] = {A_L B} at L = 0 on C (x) E modulo Im d (degree 1-n; degree 0 on L[n-1] shifted by n-1)."""

    def __init__(self, W: LambdaAlgebra, order=None):
        if not hasattr(W, "tensor"):
            raise ValueError("lie_quotient expects the output of tensor_lca")
        self.W = W
        self.tt = W.tensor
        self.n = W.n
        images = {i: v for i, v in W._d.images.items()}
        self.quotient = ImageQuotient(self.tt, W.d, images, top=W.n - 1, order=order)

    def bracket(self, A: Polynomial, B: Polynomial) -> Polynomial:
        refuse_tainted(self.tt, A, B)
        return self.W.lambda_bracket(A, B).coefficient(0, self.tt.table)

    def normal_form(self, A: Polynomial) -> Polynomial:
        return self.quotient.reduce(A)

    def equivalent(self, A: Polynomial, B: Polynomial) -> bool:
        return self.quotient.contains(A - B)

    def shifted_degree(self, A: Polynomial) -> int:
        return (A.degree if A else 0) - (self.n - 1)


def lie_quotient(W: LambdaAlgebra, order=None) -> LieQuotient:
    return LieQuotient(W, order)


def check_lie_quotient(Lq: LieQuotient, samples: int = 100, seed: int = 0) -> Report:
    W, n = Lq.W, Lq.n
    tt = Lq.tt
    rep = Report(f"graded Lie algebra on C (x) E / Im d (n={n})")
    sk = rep.new("skew-symmetry mod Im d")
    jac = rep.new("jacobi mod Im d")
    ex = rep.new("exact elements are central mod Im d")
    deg = rep.new("bracket has degree 0 after the shift")
    rng = random.Random(seed)
    sample = tensor_sampler(W)
    skipped = {"window": 0, "truncation": 0}
    d = W.degree

    def run(check, inputs, fn):
        if not tt.admissible(inputs):
            skipped["window"] += 1
            return
        try:
            check.record(inputs, fn())
        except TruncationError:
            skipped["truncation"] += 1

    def els(k):
        out = []
        while len(out) < k:
            x = sample(rng, rng.randint(0, n - 1))
            if x:
                out.append(x)
        return out

    for _ in range(samples):
        a, b, c = els(3)
        A, B = d(a), d(b)
        eps = koszul((A + 1 - n) * (B + 1 - n))
        br = Lq.bracket
        run(sk, (a, b), lambda: Lq.normal_form(br(a, b) + br(b, a).scale(eps)))
        run(jac, (a, b, c), lambda: Lq.normal_form(br(a, br(b, c)) - br(br(a, b), c) - br(b, br(a, c)).scale(eps)))

        def exact():
            x = W.d(a)
            return Lq.normal_form(br(x, b)) + Lq.normal_form(br(b, x))

        run(ex, (a, b), exact)

        def degree_ok():
            v = br(a, b)
            return 0 if not v or v.degrees() == {A + B + 1 - n} else v

        run(deg, (a, b), degree_ok)
    rep.data["skipped"] = skipped
    return rep


# ---------------------------------------------------------------------------
# P(C,E): graded Poisson algebra on C (x) E / (Im d) A


class PoissonQuotient:
    """Product and bracket {[A],[B]} = [{A_L B}|_{L=0}] modulo the ideal generated by Im d."""

    def __init__(self, W: LambdaAlgebra, order=None):
        if not hasattr(W, "tensor"):
            raise ValueError("poisson_quotient expects the output of tensor_lca")
        self.W = W
        self.tt = W.tensor
        self.n = W.n
        gens = []
        for g in self.tt.table:
            try:
                v = W.d(self.tt.table.gen(g.name))
            except TruncationError:
                continue
            if v:
                gens.append(v)
        self.ideal_generators = gens
        self.ideal = IdealQuotient(self.tt, gens, top=W.n - 1, order=order)

    def product(self, A: Polynomial, B: Polynomial) -> Polynomial:
        return A * B

    def bracket(self, A: Polynomial, B: Polynomial) -> Polynomial:
        refuse_tainted(self.tt, A, B)
        return self.W.lambda_bracket(A, B).coefficient(0, self.tt.table)

    def normal_form(self, A: Polynomial) -> Polynomial:
        return self.ideal.reduce(A)

    def shifted_degree(self, A: Polynomial) -> int:
        return (A.degree if A else 0) - (self.n - 1)


def poisson_quotient(W: LambdaAlgebra, order=None) -> PoissonQuotient:
    return PoissonQuotient(W, order)


def check_poisson_quotient(Pq: PoissonQuotient, samples: int = 100, seed: int = 0) -> Report:
    W, n, tt = Pq.W, Pq.n, Pq.tt
    rep = Report(f"graded Poisson algebra P(C,E) (n={n})")
    lb = rep.new("leibniz mod I")
    jac = rep.new("jacobi mod I")
    sk = rep.new("skew-symmetry mod I")
    wd = rep.new("bracket is well defined on classes")
    dg = rep.new("bracket has degree 0 after the shift")
    rng = random.Random(seed)
    sample = tensor_sampler(W)
    skipped = {"window": 0, "truncation": 0}
    d = W.degree
    br, nf = Pq.bracket, Pq.normal_form

    def run(check, inputs, fn):
        if not tt.admissible(inputs):
            skipped["window"] += 1
            return
        try:
            check.record(inputs, fn())
        except TruncationError:
            skipped["truncation"] += 1

    def el(k=None):
        while True:
            x = sample(rng, rng.randint(0, n - 1) if k is None else k)
            if x:
                return x

    for _ in range(samples):
        a, b, c = el(), el(), el()
        A, B = d(a), d(b)
        eps = koszul((A + 1 - n) * (B + 1 - n))
        run(sk, (a, b), lambda: nf(br(a, b) + br(b, a).scale(eps)))
        run(jac, (a, b, c), lambda: nf(br(a, br(b, c)) - br(br(a, b), c) - br(b, br(a, c)).scale(eps)))
        kb = rng.randint(0, n - 1)
        b2 = el(kb)
        c2 = el(rng.randint(0, n - 1 - kb))
        B2 = d(b2)
        run(
            lb,
            (a, b2, c2),
            lambda: nf(br(a, b2 * c2) - br(a, b2) * c2 - (b2 * br(a, c2)).scale(koszul((A + 1 - n) * B2))),
        )
        if Pq.ideal.generators:
            i = Pq.ideal.ideal_element(rng, lambda r: el(0))
            if i:
                run(wd, (a, b, i), lambda: nf(br(a + i, b) - br(a, b)) + nf(br(a, b + i) - br(a, b)))

        def degree_ok():
            v = br(a, b)
            if not v:
                return 0
            shifted = {x - (n - 1) for x in v.degrees()}
            expected = Pq.shifted_degree(a) + Pq.shifted_degree(b)
            return 0 if shifted == {expected} else v

        run(dg, (a, b), degree_ok)
    rep.data["skipped"] = skipped
    return rep


# ---------------------------------------------------------------------------
# the degree-0 physical subalgebra at n = 2


def ordinary_current_bracket(cd, A, B, m: int, k: int, E_tt: TensorTable):
    """{A t^m, B t^k} = A_(0)B t^{m+k} + m A_(1)B t^{m+k-1} for the ungraded PVA of a degree-2 structure.

    The ungraded lambda-bracket on generators is {e_l e'} = [e,e'] + l<e,e'>,
    {e_l f} = rho(e) f, {f_l e} = -rho(e) f and {f_l g} = 0 (e in degree 1,
    f, g in degree 0).  Values are polynomials over the tensor table with the
    odd dgca variable absent; the result is a dict exponent -> carrier polynomial.
    """
    dA = A.degree if A else 0
    dB = B.degree if B else 0
    if dA == 1 and dB == 1:
        c0 = cd.bracket(A, B)
        c1 = cd.pair(A, B)
    elif dA == 1 and dB == 0:
        c0 = cd.anchor(A)(B)
        c1 = cd.table.zero()
    elif dA == 0 and dB == 1:
        c0 = -cd.anchor(B)(A)
        c1 = cd.table.zero()
    else:
        c0 = c1 = cd.table.zero()
    out = {}
    if c0:
        out[m + k] = c0
    if c1 and m:
        out[m + k - 1] = out.get(m + k - 1, cd.table.zero()) + c1.scale(m)
    return {e: v for e, v in out.items() if v}


def physical_subalgebra_report(cd, N: int = 6, base_degree: int = 2) -> Report:
    """Compare P(C, laurent(1,N)) with the ordinary current bracket on the degree-0 part.

    Degree-0 elements are a t^m (a of degree 1) and b t^m th (b of degree 0).
    The map sends b t^m th to b t^m; the graded bracket representative must
    map onto the ordinary value exactly, for every interior pair of exponents.
    """
    from .lambda_bracket import pva_from_cd

    if cd.n != 2:
        raise ValueError("the physical subalgebra comparison is stated for degree 2")
    E = DGCA.laurent(1, N)
    W = tensor_lca(pva_from_cd(cd, check=False), E)
    Pq = PoissonQuotient(W)
    tt = W.tensor
    t_id, th_id = tt.even[0], tt.odd[0]
    th = tt.table.gen(tt.table.generators[th_id].name)
    rep = Report("degree-0 physical subalgebra (n=2)")
    chk = rep.new("graded bracket matches the ordinary current bracket")
    qchk = rep.new("bracket of classes matches modulo the ideal")
    ones = [cd.gen(x) for x in cd.table.names() if cd.table[x].degree == 1]
    zeros = []
    base = [x for x in cd.base]
    for k in range(0, base_degree + 1):
        for combo in itertools.combinations_with_replacement(base, k):
            f = cd.table.one()
            for x in combo:
                f = f * cd.gen(x)
            zeros.append(f)
    if not base:
        zeros = [cd.table.one()]
    elements = [(a, False) for a in ones] + [(b, True) for b in zeros]
    interior = range(-(N - 2), N - 1)

    def tpow(e):
        return monomial_poly(tt.table, ((t_id, e),) if e else ())

    def embed(c, with_theta):
        x = c.lift(tt.table)
        return x * th if with_theta else x

    def unmap(F: Polynomial) -> dict:
        """Send b t^m th -> (m, b) and a t^m -> (m, a)."""
        out = {}
        for mono, c in F.terms.items():
            cm, em = tt.split(mono)
            e = dict(em)
            exp = e.get(t_id, 0)
            has_th = th_id in e
            part = monomial_poly(cd.table, cm, c)
            deg = cd.table.monomial_degree(cm)
            if (deg == 0) != has_th:
                out.setdefault("stray", []).append(str(monomial_poly(tt.table, mono, c)))
                continue
            out[exp] = out.get(exp, cd.table.zero()) + part
        return {k: v for k, v in out.items() if k == "stray" or v}

    table_rows = 0
    for (a, ta), (b, tb) in itertools.product(elements, repeat=2):
        for m in interior:
            for k in interior:
                A = embed(a, ta) * tpow(m)
                B = embed(b, tb) * tpow(k)
                graded = Pq.bracket(A, B)
                mapped = unmap(graded)
                expected = ordinary_current_bracket(cd, a, b, m, k, tt)
                diff = [
                    e
                    for e in set(mapped) | set(expected)
                    if e == "stray" or str(mapped.get(e, 0)) != str(expected.get(e, cd.table.zero()))
                ]
                chk.record((A, B), 0 if not diff else f"graded {graded} vs ordinary {expected}")
                table_rows += 1
                # the quoted class-level formula {a t^m, b t^k} = a_(0)b t^{m+k} + a_(1)b m t^{m+k-1} th
                lb = W.source.lambda_bracket(a, b)
                c0 = lb.coefficient(0, cd.table).lift(tt.table)
                c1 = lb.coefficient(1, cd.table).lift(tt.table)
                if not ta and not tb:
                    quoted = c0 * tpow(m + k) + (c1 * tpow(m + k - 1) * th).scale(m)
                elif ta and not tb:
                    quoted = (c0 * tpow(m + k) * th).scale(koszul(b.degree if b else 0))
                else:
                    quoted = None
                if quoted is not None:
                    qchk.record((A, B), Pq.normal_form(graded - quoted))
    rep.data["pairs"] = table_rows
    rep.data["window"] = N
    return rep


# ---------------------------------------------------------------------------
# BFV current bracket from a dg symplectic source


def hp_current_bracket(chart: PoissonAlgebra, theta: Polynomial, tt: TensorTable, a, e1, b, e2) -> Polynomial:
    """{{a,Theta},b} e1 e2 + {a,b} (D e1) e2 over the tensor table."""
    lift = lambda f: _transfer_into(f, tt.table)
    t1 = lift(chart.bracket(chart.bracket(a, theta), b)) * e1 * e2
    t2 = lift(chart.bracket(a, b)) * tt.D(e1) * e2
    return t1 + t2


def _transfer_into(f: Polynomial, table: GeneratorTable) -> Polynomial:
    from .courant_dorfman import transfer

    return transfer(f, table)


def hp_sign_table(cd, chart, theta, E: DGCA, samples: int = 60, seed: int = 0) -> Report:
    """Compare the quotient bracket with the BFV current formula, recording the sign per degree pattern."""
    from .lambda_bracket import pva_from_cd

    W = tensor_lca(pva_from_cd(cd, check=False), E)
    Pq = PoissonQuotient(W)
    tt = W.tensor
    rep = Report("BFV current bracket")
    chk = rep.new("quotient bracket equals the current formula up to a degree-determined sign")
    signs: dict = {}
    rng = random.Random(seed)
    names = cd.table.names()
    count = 0
    while count < samples:
        a = cd.gen(rng.choice(names))
        b = cd.gen(rng.choice(names))
        e1 = tt.random_E(rng, spread=1)
        e2 = tt.random_E(rng, spread=1)
        count += 1
        A = a.lift(tt.table) * e1
        B = b.lift(tt.table) * e2
        try:
            ours = Pq.bracket(A, B)
        except TruncationError:
            continue
        hp = hp_current_bracket(chart, theta, tt, _transfer_into(a, chart.table), e1, _transfer_into(b, chart.table), e2)
        key = (a.degree, e1.degree if e1 else 0, b.degree, e2.degree if e2 else 0)
        if Pq.normal_form(ours - hp) == 0:
            s = 1
        elif Pq.normal_form(ours + hp) == 0:
            s = -1
        else:
            chk.fail((A, B), Pq.normal_form(ours - hp), "no sign makes the two agree")
            continue
        if Pq.normal_form(hp) == 0:
            chk.record((A, B), 0)
            continue
        old = signs.setdefault(key, s)
        chk.record((A, B), 0 if old == s else f"sign {s} differs from {old} for degrees {key}")
    rep.data["signs"] = {str(k): v for k, v in sorted(signs.items())}
    return rep


# ---------------------------------------------------------------------------
# zero-locus reduction


class ZeroLocusError(ValueError):
    def __init__(self, report: Report):
        self.report = report
        super().__init__(report.text())


def poisson_tensor(chart: PoissonAlgebra, E: DGCA) -> tuple[PoissonAlgebra, TensorTable]:
    """chart (x) E with the dgca variables Casimir: {a f, b g} = (-1)^{|f|(|b|-n)} {a,b} f g."""
    tt = TensorTable(chart.table, E)
    values = {}
    for (i, j), v in chart.values.items():
        values[(i, j)] = v.lift(tt.table)
    P = PoissonAlgebra(tt.table, chart.n, values)
    P.tensor = tt
    return P, tt


def bfv_differential(P: PoissonAlgebra, theta: Polynomial) -> Derivation:
    """Z = {Theta, -} + D on chart (x) E."""
    tt = P.tensor
    th = theta.lift(tt.table)
    images = {}
    for g in tt.table:
        if tt.is_carrier(g.id):
            v = P.bracket(th, tt.table.gen(g.name))
        else:
            v = tt.D(tt.table.gen(g.name))
        if v:
            images[g.id] = v
    return Derivation(tt.table, 1, images)


class ZeroLocus:
    """P / I_Z with the derived bracket {[a],[b]} = [{a, Z b}] of degree -n+1."""

    def __init__(self, P: PoissonAlgebra, Z: Derivation, order=None):
        self.P = P
        self.Z = Z
        self.tt = P.tensor
        self.n = P.n
        gens = [v for v in Z.images.values() if v]
        self.ideal = IdealQuotient(self.tt, gens, top=None, order=order)

    def bracket(self, a: Polynomial, b: Polynomial) -> Polynomial:
        return self.P.bracket(a, self.Z(b))

    def normal_form(self, a: Polynomial) -> Polynomial:
        return self.ideal.reduce(a)

    @property
    def degenerate(self) -> bool:
        return not self.ideal.generators


def check_differential(P: PoissonAlgebra, Z: Derivation, samples: int = 50, seed: int = 0) -> Report:
    """Z^2 = 0, Z a derivation of the product (by construction, re-checked) and of the bracket."""
    n = P.n
    rep = Report("differential for zero-locus reduction")
    rep.add(check_square_zero(Z))
    prod = rep.new("Z is a derivation of the product")
    brk = rep.new("Z is a derivation of the bracket")
    table = P.table
    gens = [table.gen(g.name) for g in table]
    names = table.names()
    rng = random.Random(seed)
    tt = P.tensor
    d = lambda f: f.degree if f else 0

    def bracket_residual(a, b):
        return Z(P.bracket(a, b)) - P.bracket(Z(a), b) - P.bracket(a, Z(b)).scale(koszul(d(a) - n))

    for i, a in enumerate(gens):
        for j, b in enumerate(gens):
            brk.record((names[i], names[j]), bracket_residual(a, b))
            prod.record((names[i], names[j]), Z(a * b) - Z(a) * b - (a * Z(b)).scale(koszul(d(a))))
    for _ in range(samples):
        a = _random_chart_element(rng, tt)
        b = _random_chart_element(rng, tt)
        if a and b:
            brk.record((a, b), bracket_residual(a, b))
            prod.record((a, b), Z(a * b) - Z(a) * b - (a * Z(b)).scale(koszul(d(a))))
    return rep


def _random_chart_element(rng: random.Random, tt: TensorTable, max_factors: int = 2) -> Polynomial:
    carrier = [g for g in tt.table if tt.is_carrier(g.id)]
    m = {}
    for _ in range(rng.randint(1, max_factors)):
        g = rng.choice(carrier)
        if g.odd and g.id in m:
            continue
        m[g.id] = m.get(g.id, 0) + 1
    f = monomial_poly(tt.table, tuple(sorted(m.items())), rng.choice([1, -1, 2, Fraction(1, 2)]))
    f = f * tt.random_E(rng, spread=1)
    return f


def zero_locus_reduce(P: PoissonAlgebra, Z: Derivation, samples: int = 50, seed: int = 0, order=None) -> ZeroLocus:
    rep = check_differential(P, Z, samples=samples, seed=seed)
    if not rep.passed:
        raise ZeroLocusError(rep)
    return ZeroLocus(P, Z, order)


def check_zero_locus(Zl: ZeroLocus, samples: int = 200, seed: int = 0) -> Report:
    n = Zl.n
    rep = Report(f"zero-locus reduction (bracket degree {1 - n})")
    dg = rep.new("reduced bracket has degree -n+1")
    sk = rep.new("skew-symmetry mod I_Z")
    jac = rep.new("jacobi mod I_Z")
    wd = rep.new("bracket is well defined on classes")
    if Zl.degenerate:
        for c in (dg, sk, jac, wd):
            c.note("Z = 0: I_Z = 0 and the reduced bracket vanishes identically (degenerate reduction)")
            c.forced = VACUOUS
    rng = random.Random(seed)
    tt = Zl.tt
    d = lambda f: f.degree if f else 0
    br, nf = Zl.bracket, Zl.normal_form
    m = n - 1
    for _ in range(samples):
        a = _random_chart_element(rng, tt)
        b = _random_chart_element(rng, tt)
        c = _random_chart_element(rng, tt)
        A, B = d(a), d(b)
        v = br(a, b)
        dg.record((a, b), 0 if not v or v.degrees() == {A + B - m} else v)
        eps = koszul((A - m) * (B - m))
        sk.record((a, b), nf(br(a, b) + br(b, a).scale(eps)))
        jac.record((a, b, c), nf(br(a, br(b, c)) - br(br(a, b), c) - br(b, br(a, c)).scale(eps)))
        if Zl.ideal.generators:
            _, g = rng.choice(Zl.ideal.generators)
            i = g * c
            wd.record((a, b, i), nf(br(a + i, b) - br(a, b)) + nf(br(a, b + i) - br(a, b)))
    return rep


def zero_locus_physical_report(cd, N: int = 6) -> Report:
    """On a degree-2 structure: reduced bracket of a t^m, b t^k vs the P(C,E) bracket, modulo I_Z."""
    from .courant_dorfman import to_theta
    from .lambda_bracket import pva_from_cd

    chart, theta = to_theta(cd)
    E = DGCA.laurent(1, N)
    P, tt = poisson_tensor(chart, E)
    Z = bfv_differential(P, theta)
    Zl = zero_locus_reduce(P, Z)
    W = tensor_lca(pva_from_cd(cd, check=False), E)
    Pq = PoissonQuotient(W)
    wt = W.tensor
    rep = Report("zero-locus reduction vs physical subalgebra (n=2)")
    chk = rep.new("reduced bracket equals the P(C,E) bracket modulo I_Z")
    t_id = tt.even[0]
    ones = [x for x in cd.table.names() if cd.table[x].degree == 1]
    interior = range(-(N - 2), N - 1)
    nontrivial = 0
    for a in ones:
        for b in ones:
            for m in interior:
                for k in interior:
                    A = tt.table.gen(a) * monomial_poly(tt.table, ((t_id, m),) if m else ())
                    B = tt.table.gen(b) * monomial_poly(tt.table, ((t_id, k),) if k else ())
                    red = Zl.normal_form(Zl.bracket(A, B))
                    Aw = wt.table.gen(a) * monomial_poly(wt.table, ((wt.even[0], m),) if m else ())
                    Bw = wt.table.gen(b) * monomial_poly(wt.table, ((wt.even[0], k),) if k else ())
                    phys = _rename_into(Pq.bracket(Aw, Bw), tt.table)
                    phys = Zl.normal_form(phys)
                    chk.record((A, B), red - phys)
                    nontrivial += bool(phys)
    rep.data["nonzero classes"] = nontrivial
    rep.data["ideal generators"] = [str(g) for _, g in Zl.ideal.generators]
    return rep


def _rename_into(f: Polynomial, table: GeneratorTable) -> Polynomial:
    from .courant_dorfman import transfer

    return transfer(f, table)


# ---------------------------------------------------------------------------
# formal distributions


class FormalDistribution:
    """a(Z) = sum_{m,J} z^{-1-m} zeta^{J'} a t^m th^J over k variable pairs (J' the complement of J).

    Only coefficients are materialized: ``coefficient(m)`` is the part at
    z^{-1-m}, a polynomial in the odd variables zeta and the tensor algebra.
    """

    def __init__(self, a: Polynomial, big: GeneratorTable, tt: TensorTable, odd_ids: list[int]):
        self.a = a.lift(big) if a.table != big else a
        self.big = big
        self.tt = tt
        self.odd_ids = odd_ids

    def coefficient(self, m: tuple) -> Polynomial:
        big, tt = self.big, self.tt
        k = len(m)
        out = big.zero()
        tm = monomial_poly(big, tuple(sorted((tt.even[r], e) for r, e in enumerate(m) if e)))
        for size in range(k + 1):
            for J in itertools.combinations(range(k), size):
                zeta = big.one()
                for r in range(k):
                    if r not in J:
                        zeta = zeta * big.gen(big.generators[self.odd_ids[r]].name)
                th = big.one()
                for r in J:
                    th = th * big.gen(big.generators[tt.odd[r]].name)
                out = out + zeta * self.a * tm * th
        return out


def formal_bracket_identity(C: LambdaAlgebra, N: int = 5, k: int = 1, generators=None) -> Report:
    """[a(Z), b(W)] = [a,b](W) delta(Z-W) + <a,b>(W) d delta(Z-W), coefficientwise modulo Im d.

    Here [a,b] = a_(0)b, <a,b> = a_(1)b, d = sum_r zeta_r d/dz_r and
    delta(Z-W) = prod_r sum_m z_r^{-m-1} w_r^m (zeta_r - xi_r).  The bracket
    of V = C (x) E / Im d is extended to the odd coefficients by
    [u X, v Y] = (-1)^{|v|(|X|+1-n)} u v [X, Y].  Compared coefficients are
    those of z^i w^j with every index in [-N+1, N-1], so every field
    coefficient used lies inside the exponent window [-N, N].
    """
    n = C.n
    if n != k + 1:
        raise ValueError(f"formal distributions in {k} variables need a structure of degree {k + 1}, got {n}")
    E = DGCA.laurent(k, N)
    W = tensor_lca(C, E)
    Lq = lie_quotient(W)
    tt = W.tensor
    U = tt.table
    sfx = [str(r + 1) for r in range(k)] if k > 1 else [""]
    big = U.extended([(f"zeta{s}", 1) for s in sfx] + [(f"xi{s}", 1) for s in sfx])
    zeta_ids = [big[f"zeta{s}"].id for s in sfx]
    xi_ids = [big[f"xi{s}"].id for s in sfx]
    ncore = len(U)

    def split(m):
        return tuple(p for p in m if p[0] < ncore), tuple(p for p in m if p[0] >= ncore)

    def bracket(A: Polynomial, B: Polynomial) -> Polynomial:
        out = big.zero()
        for am, ac in A.terms.items():
            X, u = split(am)
            Xd, ud = big.monomial_degree(X), big.monomial_degree(u)
            for bm, bc in B.terms.items():
                Y, v = split(bm)
                Yd, vd = big.monomial_degree(Y), big.monomial_degree(v)
                # X u = (-1)^{|X||u|} u X, likewise for Y v
                s = koszul(Xd * ud, Yd * vd, vd * (Xd + 1 - n))
                XY = Lq.bracket(monomial_poly(U, X), monomial_poly(U, Y)).lift(big)
                out = out + (monomial_poly(big, u) * monomial_poly(big, v) * XY).scale(s * ac * bc)
        return out

    def reduce(F: Polynomial) -> Polynomial:
        groups: dict = {}
        for m, c in F.terms.items():
            X, u = split(m)
            groups.setdefault(u, {})[X] = c
        out = big.zero()
        for u, vec in groups.items():
            out = out + Lq.normal_form(Polynomial(U, vec)).lift(big) * monomial_poly(big, u)
        return out

    odd = lambda i: big.gen(big.generators[i].name)
    delta_odd = big.one()
    for r in range(k):
        delta_odd = delta_odd * (odd(zeta_ids[r]) - odd(xi_ids[r]))

    rep = Report(f"formal distribution bracket identity (k={k}, N={N})")
    chk = rep.new("[a(Z),b(W)] = [a,b](W) delta(Z-W) + <a,b>(W) d delta(Z-W)")
    names = generators or [C.table.generators[i].name for i in sorted(C.truncated)]
    idx = range(-N + 1, N)
    coefficients = 0
    for x, y in itertools.product(names, repeat=2):
        a, b = C.gen(x), C.gen(y)
        lb = C.lambda_bracket(a, b)
        c = lb.coefficient(0, C.table)
        e = lb.coefficient(1, C.table)
        fa = FormalDistribution(a.lift(U), big, tt, zeta_ids)
        fb = FormalDistribution(b.lift(U), big, tt, xi_ids)
        fc = FormalDistribution(c.lift(U), big, tt, xi_ids)
        fe = FormalDistribution(e.lift(U), big, tt, xi_ids)
        for i in itertools.product(idx, repeat=k):
            for j in itertools.product(idx, repeat=k):
                lhs = bracket(fa.coefficient(tuple(-1 - v for v in i)), fb.coefficient(tuple(-1 - v for v in j)))
                rhs = big.zero()
                if c:
                    rhs = rhs + fc.coefficient(tuple(-2 - a_ - b_ for a_, b_ in zip(i, j))) * delta_odd
                if e:
                    for r in range(k):
                        # z_r^{i_r} in d/dz_r delta comes from z_r^{i_r + 1}, paired with w_r^{-2-i_r}
                        kk = tuple(-2 - a_ - b_ - (1 if s == r else 0) for s, (a_, b_) in enumerate(zip(i, j)))
                        rhs = rhs + (fe.coefficient(kk) * odd(zeta_ids[r]) * delta_odd).scale(i[r] + 1)
                chk.record((x, y, i, j), reduce(lhs - rhs))
                coefficients += 1
    rep.data["coefficients"] = coefficients
    return rep
