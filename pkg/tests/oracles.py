"""Independent reference computations used by the tests.

These deliberately avoid the package's monomial normal form: products are
computed on words of generators with an explicit bubble sort that counts
transpositions of odd letters.
"""
from fractions import Fraction

from hypothesis import strategies as st

from hcd.graded_algebra import GeneratorTable, Polynomial


def word_of(m):
    """Expand a normal-form monomial into a word of generator ids (non-negative exponents only)."""
    out = []
    for i, e in m:
        assert e >= 0
        out.extend([i] * e)
    return out


def sort_word(table: GeneratorTable, word):
    """(sign, sorted word) by adjacent transpositions; sign 0 if an odd letter repeats."""
    w = list(word)
    sign = 1
    for i in range(len(w)):
        for j in range(len(w) - 1 - i):
            if w[j] > w[j + 1]:
                if table.generators[w[j]].odd and table.generators[w[j + 1]].odd:
                    sign = -sign
                w[j], w[j + 1] = w[j + 1], w[j]
    for a, b in zip(w, w[1:]):
        if a == b and table.generators[a].odd:
            return 0, None
    return sign, w


def word_poly(table, word, c=1) -> Polynomial:
    sign, w = sort_word(table, word)
    if not sign:
        return table.zero()
    m = {}
    for i in w:
        m[i] = m.get(i, 0) + 1
    return Polynomial(table, {tuple(sorted(m.items())): sign * c})


def oracle_mul(f: Polynomial, g: Polynomial) -> Polynomial:
    table = f.table
    out = table.zero()
    for m1, c1 in f.terms.items():
        for m2, c2 in g.terms.items():
            out = out + word_poly(table, word_of(m1) + word_of(m2), c1 * c2)
    return out


def oracle_derivation(table, degree, images: dict, f: Polynomial) -> Polynomial:
    """X(g1...gr) = sum_i (-1)^{k(|g1|+...+|g_{i-1}|)} g1..X(g_i)..gr on words."""
    out = table.zero()
    for m, c in f.terms.items():
        w = word_of(m)
        for pos, g in enumerate(w):
            img = images.get(g)
            if not img:
                continue
            pre = sum(table.generators[h].degree for h in w[:pos])
            s = -1 if (degree * pre) % 2 else 1
            left = word_poly(table, w[:pos])
            right = word_poly(table, w[pos + 1:])
            out = out + oracle_mul(oracle_mul(left, img), right).scale(s * c)
    return out


# hypothesis strategies over a fixed small table

TABLE = GeneratorTable([("x", 0), ("y", 0), ("theta", 1), ("psi", 1), ("chi", 1), ("p", 2)])

coefficients = st.sampled_from([1, -1, 2, -3, Fraction(1, 2), Fraction(-2, 3)])


@st.composite
def monomials(draw, table=TABLE, max_factors=4):
    word = draw(st.lists(st.integers(0, len(table) - 1), max_size=max_factors))
    return word


@st.composite
def polynomials(draw, table=TABLE, max_terms=3):
    f = table.zero()
    for _ in range(draw(st.integers(0, max_terms))):
        f = f + word_poly(table, draw(monomials(table)), draw(coefficients))
    return f


@st.composite
def homogeneous_polynomials(draw, table=TABLE, max_terms=3):
    f = draw(polynomials(table, max_terms))
    if not f:
        return f
    return f.part(sorted(f.degrees())[0])


def oracle_poisson(table, n, gen_bracket: dict, f: Polynomial, g: Polynomial) -> Polynomial:
    """Biderivation expansion of a degree -n bracket from its generator values, on words.

    {f1..fr, G} = sum_i (-1)^{(|f_{i+1}|+..+|f_r|)(|G|-n)} f1..{f_i,G}..fr
    {a, g1..gs} = sum_j (-1)^{(|a|-n)(|g1|+..+|g_{j-1}|)} g1..{a,g_j}..gs
    """
    deg = lambda w: sum(table.generators[h].degree for h in w)
    out = table.zero()
    for m1, c1 in f.terms.items():
        u = word_of(m1)
        for m2, c2 in g.terms.items():
            v = word_of(m2)
            G = deg(v)
            for i, a in enumerate(u):
                s1 = -1 if (deg(u[i + 1:]) * (G - n)) % 2 else 1
                A = table.generators[a].degree
                for j, b in enumerate(v):
                    val = gen_bracket.get((a, b))
                    if not val:
                        continue
                    s2 = -1 if ((A - n) * deg(v[:j])) % 2 else 1
                    inner = oracle_mul(oracle_mul(word_poly(table, v[:j]), val), word_poly(table, v[j + 1:]))
                    term = oracle_mul(oracle_mul(word_poly(table, u[:i]), inner), word_poly(table, u[i + 1:]))
                    out = out + term.scale(s1 * s2 * c1 * c2)
    return out
