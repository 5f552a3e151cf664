"""Free graded-commutative polynomial algebras with exact rational coefficients.

Elements live in ``Sym`` of a graded vector space: even generators commute,
odd generators anticommute and square to zero.  Monomials are stored in
normal form (ascending generator id) and every reordering is paid for with
its Koszul sign, so two polynomials are equal iff their term maps are equal.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Mapping

Monomial = tuple  # tuple[tuple[int, int], ...], ascending generator id
ONE: Monomial = ()


def _normalize_coefficient(c):
    if isinstance(c, Fraction) and c.denominator == 1:
        return c.numerator
    return c


def as_rational(c):
    """Coerce ints, Fractions and ``"p/q"`` strings to an exact rational."""
    if isinstance(c, bool):
        raise TypeError("booleans are not coefficients")
    if isinstance(c, int):
        return c
    if isinstance(c, Fraction):
        return _normalize_coefficient(c)
    if isinstance(c, str):
        return _normalize_coefficient(Fraction(c))
    raise TypeError(f"not an exact rational: {c!r}")


@dataclass(frozen=True)
class Generator:
    id: int
    name: str
    degree: int
    invertible: bool = False  # Laurent variable; only allowed for even degree

    @property
    def parity(self) -> int:
        return self.degree % 2

    @property
    def odd(self) -> bool:
        return self.degree % 2 == 1


class GeneratorTable:
    """Immutable, ordered set of graded generators.

    Polynomials remember the table they were built over; arithmetic between
    polynomials over different tables is a usage error.  A table can be
    *extended* by new generators, and polynomials over the smaller table can
    be lifted into the extension (ids are preserved).
    """

    def __init__(self, generators: Iterable[tuple] | Iterable[Generator] = ()):
        gens = []
        for i, g in enumerate(generators):
            if isinstance(g, Generator):
                if g.id != i:
                    raise ValueError("generator ids must be 0..k-1 in order")
                gens.append(g)
            else:
                name, degree, *rest = g
                gens.append(Generator(i, name, int(degree), bool(rest[0]) if rest else False))
        names = [g.name for g in gens]
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate generator names in {names}")
        for g in gens:
            if g.invertible and g.odd:
                raise ValueError(f"odd generator {g.name} cannot be invertible")
        self.generators: tuple[Generator, ...] = tuple(gens)
        self._by_name = {g.name: g for g in gens}
        self._degrees = tuple(g.degree for g in gens)
        self._odd = tuple(g.odd for g in gens)
        self._mul_cache: dict = {}

    def __len__(self):
        return len(self.generators)

    def __iter__(self):
        return iter(self.generators)

    def __eq__(self, other):
        if self is other:
            return True
        return isinstance(other, GeneratorTable) and self.generators == other.generators

    def __hash__(self):
        return hash(self.generators)

    def __repr__(self):
        inner = ", ".join(f"{g.name}:{g.degree}" for g in self.generators)
        return f"GeneratorTable({inner})"

    def __getitem__(self, name: str) -> Generator:
        return self._by_name[name]

    def __contains__(self, name) -> bool:
        return name in self._by_name

    def names(self) -> list[str]:
        return [g.name for g in self.generators]

    def gen(self, name: str) -> "Polynomial":
        g = self._by_name.get(name)
        if g is None:
            raise KeyError(f"unknown generator {name!r}")
        return Polynomial(self, {((g.id, 1),): 1})

    def gens(self, *names: str) -> list["Polynomial"]:
        if not names:
            names = tuple(self.names())
        return [self.gen(n) for n in names]

    def one(self) -> "Polynomial":
        return Polynomial(self, {ONE: 1})

    def zero(self) -> "Polynomial":
        return Polynomial(self, {})

    def const(self, c) -> "Polynomial":
        c = as_rational(c)
        return Polynomial(self, {ONE: c} if c else {})

    def extended(self, new: Iterable[tuple]) -> "GeneratorTable":
        start = len(self.generators)
        extra = []
        for k, g in enumerate(new):
            name, degree, *rest = g
            extra.append(Generator(start + k, name, int(degree), bool(rest[0]) if rest else False))
        return GeneratorTable(self.generators + tuple(extra))

    def is_prefix_of(self, other: "GeneratorTable") -> bool:
        return other.generators[: len(self.generators)] == self.generators

    def monomial_degree(self, m: Monomial) -> int:
        deg = self._degrees
        return sum(deg[i] * e for i, e in m)

    def monomial_parity(self, m: Monomial) -> int:
        odd = self._odd
        return sum(1 for i, _ in m if odd[i]) % 2

    def mul_monomials(self, m1: Monomial, m2: Monomial):
        """Return ``(sign, m)`` with ``m1*m2 = sign*m``; sign 0 if the product vanishes."""
        if not m1:
            return 1, m2
        if not m2:
            return 1, m1
        key = (m1, m2)
        hit = self._mul_cache.get(key)
        if hit is not None:
            return hit
        odd = self._odd
        # Koszul sign: each odd factor of m2 passes the odd factors of m1 with larger id
        swaps = 0
        odd_m1 = [i for i, _ in m1 if odd[i]]
        for j, _ in m2:
            if odd[j]:
                for i in odd_m1:
                    if i > j:
                        swaps += 1
                    elif i == j:
                        self._mul_cache[key] = (0, None)
                        return 0, None
        merged: dict[int, int] = dict(m1)
        for j, e in m2:
            s = merged.get(j, 0) + e
            if s:
                merged[j] = s
            else:
                del merged[j]
        result = (-1 if swaps % 2 else 1, tuple(sorted(merged.items())))
        if len(self._mul_cache) < 200_000:
            self._mul_cache[key] = result
        return result

    def normalize_word(self, word: Iterable[int]):
        """Normalize an ordered product of generator ids.

        Returns ``(sign, monomial)``; sign 0 when an odd generator repeats.
        """
        sign, m = 1, ONE
        for gid in word:
            s, m = self.mul_monomials(m, ((gid, 1),))
            if s == 0:
                return 0, None
            sign *= s
        return sign, m

    def monomial_str(self, m: Monomial) -> str:
        if not m:
            return "1"
        parts = []
        for i, e in m:
            name = self.generators[i].name
            parts.append(name if e == 1 else f"{name}^{e}")
        return "*".join(parts)


class Polynomial:
    """Finite linear combination of normal-form monomials over a GeneratorTable."""

    __slots__ = ("table", "terms")

    def __init__(self, table: GeneratorTable, terms: Mapping[Monomial, object] | None = None):
        self.table = table
        clean = {}
        if terms:
            for m, c in terms.items():
                if c:
                    clean[m] = _normalize_coefficient(c)
        self.terms: dict[Monomial, object] = clean

    # -- construction helpers -------------------------------------------
    @classmethod
    def _raw(cls, table, terms):
        p = cls.__new__(cls)
        p.table = table
        p.terms = terms
        return p

    def _coerce(self, other) -> "Polynomial":
        if isinstance(other, Polynomial):
            if other.table is not self.table and other.table != self.table:
                raise ValueError("polynomials over different generator tables")
            return other
        return self.table.const(other)

    # -- basic protocol --------------------------------------------------
    def __bool__(self):
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other):
        if isinstance(other, Polynomial):
            return self.table == other.table and self.terms == other.terms
        try:
            return self.terms == self.table.const(other).terms
        except TypeError:
            return NotImplemented

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __repr__(self):
        return f"Polynomial({self})"

    def __str__(self):
        if not self.terms:
            return "0"
        out = []
        for m in sorted(self.terms, key=lambda m: (self.table.monomial_degree(m), m)):
            c = self.terms[m]
            body = self.table.monomial_str(m)
            neg = c < 0
            a = -c if neg else c
            if body == "1":
                s = str(a)
            elif a == 1:
                s = body
            else:
                s = f"{a}*{body}"
            out.append(("- " if neg else "+ ") + s)
        text = " ".join(out)
        return text[2:] if text.startswith("+ ") else "-" + text[1:]

    # -- arithmetic ------------------------------------------------------
    def __add__(self, other):
        other = self._coerce(other)
        terms = dict(self.terms)
        for m, c in other.terms.items():
            s = terms.get(m, 0) + c
            if s:
                terms[m] = _normalize_coefficient(s)
            else:
                terms.pop(m, None)
        return Polynomial._raw(self.table, terms)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial._raw(self.table, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def scale(self, c) -> "Polynomial":
        c = as_rational(c) if not isinstance(c, (int, Fraction)) else c
        if not c:
            return Polynomial._raw(self.table, {})
        return Polynomial._raw(self.table, {m: _normalize_coefficient(v * c) for m, v in self.terms.items()})

    def __mul__(self, other):
        if not isinstance(other, Polynomial):
            return self.scale(other)
        other = self._coerce(other)
        table = self.table
        mul = table.mul_monomials
        terms: dict = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                s, m = mul(m1, m2)
                if s == 0:
                    continue
                v = terms.get(m, 0) + s * c1 * c2
                if v:
                    terms[m] = v
                else:
                    del terms[m]
        return Polynomial._raw(table, {m: _normalize_coefficient(c) for m, c in terms.items()})

    def __rmul__(self, other):
        return self.scale(other)

    def __truediv__(self, c):
        return self.scale(Fraction(1) / Fraction(c))

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative powers only exist for single invertible generators")
        out = self.table.one()
        for _ in range(k):
            out = out * self
        return out

    # -- grading -----------------------------------------------------------
    def degrees(self) -> set[int]:
        return {self.table.monomial_degree(m) for m in self.terms}

    def is_homogeneous(self) -> bool:
        # the zero polynomial is vacuously homogeneous of every degree
        return len(self.degrees()) <= 1

    @property
    def degree(self) -> int | None:
        """Degree of a nonzero homogeneous polynomial; None for zero."""
        degs = self.degrees()
        if not degs:
            return None
        if len(degs) > 1:
            raise ValueError(f"inhomogeneous polynomial {self} has degrees {sorted(degs)}")
        return degs.pop()

    def homogeneous_parts(self) -> dict[int, "Polynomial"]:
        parts: dict[int, dict] = {}
        for m, c in self.terms.items():
            parts.setdefault(self.table.monomial_degree(m), {})[m] = c
        return {d: Polynomial._raw(self.table, t) for d, t in parts.items()}

    def part(self, degree: int) -> "Polynomial":
        return Polynomial._raw(
            self.table, {m: c for m, c in self.terms.items() if self.table.monomial_degree(m) == degree}
        )

    # -- structure ---------------------------------------------------------
    def monomials(self):
        """Yield ``(coefficient, Polynomial-of-one-monomial)`` pairs."""
        for m, c in self.terms.items():
            yield c, Polynomial._raw(self.table, {m: 1})

    def coefficient(self, m: Monomial):
        return self.terms.get(m, 0)

    def constant_term(self):
        return self.terms.get(ONE, 0)

    def is_constant(self) -> bool:
        return all(m == ONE for m in self.terms)

    def support_ids(self) -> set[int]:
        return {i for m in self.terms for i, _ in m}

    def lift(self, table: GeneratorTable) -> "Polynomial":
        """Re-home into a table that extends this polynomial's table."""
        if table is self.table:
            return self
        if not self.table.is_prefix_of(table):
            raise ValueError("target table does not extend the source table")
        return Polynomial._raw(table, dict(self.terms))

    def restrict(self, table: GeneratorTable) -> "Polynomial":
        """Inverse of lift; fails if a generator outside ``table`` occurs."""
        n = len(table)
        if not table.is_prefix_of(self.table):
            raise ValueError("source table does not extend the target table")
        for i in self.support_ids():
            if i >= n:
                raise ValueError(f"generator {self.table.generators[i].name} not in target table")
        return Polynomial._raw(table, dict(self.terms))

    def map_terms(self, fn: Callable[[Monomial, object], "Polynomial"]) -> "Polynomial":
        """Linear extension of ``fn`` defined on single monomials."""
        out = self.table.zero()
        acc: dict = {}
        table = None
        for m, c in self.terms.items():
            img = fn(m, c)
            if table is None:
                table = img.table
            for mm, cc in img.terms.items():
                v = acc.get(mm, 0) + cc
                if v:
                    acc[mm] = v
                else:
                    del acc[mm]
        if table is None:
            return out
        return Polynomial._raw(table, {m: _normalize_coefficient(c) for m, c in acc.items()})


def monomial_poly(table: GeneratorTable, m: Monomial, c=1) -> Polynomial:
    return Polynomial._raw(table, {m: c} if c else {})


def poly_sum(table: GeneratorTable, items: Iterable[Polynomial]) -> Polynomial:
    acc: dict = {}
    for p in items:
        for m, c in p.terms.items():
            v = acc.get(m, 0) + c
            if v:
                acc[m] = v
            else:
                del acc[m]
    return Polynomial._raw(table, {m: _normalize_coefficient(c) for m, c in acc.items()})


def koszul(*exponent_terms: int) -> int:
    """``(-1)`` raised to the sum of the given integers."""
    return -1 if sum(exponent_terms) % 2 else 1


class Derivation:
    """Graded derivation determined by its values on generators.

    ``X(fg) = X(f) g + (-1)^{k|f|} f X(g)`` with ``k`` the degree of X.
    Generators without an image are sent to zero.
    """

    def __init__(self, table: GeneratorTable, degree: int, images: Mapping):
        self.table = table
        self.degree = int(degree)
        imgs: dict[int, Polynomial] = {}
        for key, value in images.items():
            gid = table[key].id if isinstance(key, str) else int(key)
            value = value if isinstance(value, Polynomial) else table.const(value)
            if value.table != table:
                raise ValueError("derivation image over a different table")
            if value:
                imgs[gid] = value
        self.images = imgs
        self._cache: dict = {}

    def image(self, gen) -> Polynomial:
        gid = self.table[gen].id if isinstance(gen, str) else gen
        return self.images.get(gid, self.table.zero())

    def check_degrees(self) -> list[str]:
        """Names of generators whose image has the wrong degree."""
        bad = []
        for gid, img in self.images.items():
            g = self.table.generators[gid]
            if img.degrees() != {g.degree + self.degree}:
                bad.append(g.name)
        return bad

    def _on_monomial(self, m: Monomial) -> Polynomial:
        hit = self._cache.get(m)
        if hit is not None:
            return hit
        table = self.table
        k = self.degree
        acc: dict = {}
        prefix_deg = 0
        for idx, (gid, e) in enumerate(m):
            img = self.images.get(gid)
            g = table.generators[gid]
            if img is not None:
                prefix = m[:idx]
                rest = list(m[idx + 1:])
                # X(g^e) = e g^(e-1) X(g) for even g; e = 1 for odd g
                coeff = e
                if e != 1:
                    rest_mono = ((gid, e - 1),)
                else:
                    rest_mono = ONE
                sign0 = koszul(k * prefix_deg)
                suffix = tuple(rest)
                for mi, ci in img.terms.items():
                    s1, mm = table.mul_monomials(prefix, mi)
                    if s1 == 0:
                        continue
                    s2, mm = table.mul_monomials(mm, rest_mono)
                    if s2 == 0:
                        continue
                    s3, mm = table.mul_monomials(mm, suffix)
                    if s3 == 0:
                        continue
                    v = acc.get(mm, 0) + sign0 * s1 * s2 * s3 * coeff * ci
                    if v:
                        acc[mm] = v
                    else:
                        del acc[mm]
            prefix_deg += g.degree * e
        out = Polynomial(table, acc)
        if len(self._cache) < 100_000:
            self._cache[m] = out
        return out

    def __call__(self, f: Polynomial) -> Polynomial:
        if f.table != self.table:
            raise ValueError("derivation and polynomial over different tables")
        return poly_sum(self.table, (self._on_monomial(m).scale(c) for m, c in f.terms.items()))

    def __add__(self, other: "Derivation") -> "Derivation":
        if other.degree != self.degree:
            raise ValueError("cannot add derivations of different degree")
        keys = set(self.images) | set(other.images)
        return Derivation(self.table, self.degree, {k: self.image(k) + other.image(k) for k in keys})

    def scale(self, c) -> "Derivation":
        return Derivation(self.table, self.degree, {k: v.scale(c) for k, v in self.images.items()})

    def __eq__(self, other):
        return (
            isinstance(other, Derivation)
            and self.table == other.table
            and self.degree == other.degree
            and self.images == other.images
        )

    def __repr__(self):
        body = ", ".join(f"{self.table.generators[k].name} -> {v}" for k, v in sorted(self.images.items()))
        return f"Derivation(deg={self.degree}; {body})"


def apply_derivation(X: Derivation, f: Polynomial) -> Polynomial:
    return X(f)


def euler_field(table: GeneratorTable) -> Derivation:
    """Degree-0 derivation acting on a homogeneous f by multiplication with |f|."""
    return Derivation(table, 0, {g.id: table.gen(g.name).scale(g.degree) for g in table if g.degree})


def partial(table: GeneratorTable, name: str) -> Derivation:
    """Left partial derivative along a generator (degree minus that of the generator)."""
    g = table[name]
    return Derivation(table, -g.degree, {g.id: table.one()})


def commutator(X: Derivation, Y: Derivation) -> Derivation:
    """Graded commutator ``XY - (-1)^{|X||Y|} YX``, again a derivation."""
    table = X.table
    sign = koszul(X.degree * Y.degree)
    images = {}
    for g in table:
        v = g.id
        gp = table.gen(g.name)
        img = X(Y(gp)) - Y(X(gp)).scale(sign)
        if img:
            images[v] = img
    return Derivation(table, X.degree + Y.degree, images)


def check_square_zero(X: Derivation):
    """Check X∘X = 0 on every generator (enough, by the Leibniz rule)."""
    from .report import Check

    check = Check("square-zero")
    if X.degree != 1:
        check.note(f"derivation has degree {X.degree}, expected 1")
    for g in X.table:
        residual = X(X(X.table.gen(g.name)))
        check.record((g.name,), residual)
    return check
