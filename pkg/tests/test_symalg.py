from fractions import Fraction
import random

import pytest
import sympy
from hypothesis import given, strategies as st

from mirrorflag.symalg import (Ideal, LaurentPoly, NotAUnit, NotZeroDimensional, QElem, Ring, SymAlgError,
                               char_poly, det, groebner_basis, mat_inverse, mat_mul, mult_matrix, poly_from_terms,
                               quotient_basis, sparse_rank, upoly_str)

R = Ring(["x", "y", "z"], invertible=["x", "y"])

small = st.integers(-3, 3)
coeff = st.fractions(min_value=-5, max_value=5, max_denominator=4)
term = st.tuples(st.tuples(small, small, st.integers(0, 3)), coeff)
polys = st.lists(term, max_size=4).map(lambda ts: LaurentPoly(R, dict(ts)))


def to_sympy(p):
    x, y, z = sympy.symbols("x y z")
    return sum((sympy.Rational(c.numerator, c.denominator) * x ** e[0] * y ** e[1] * z ** e[2]
                for e, c in p.terms.items()), sympy.Integer(0))


@given(polys, polys, polys)
def test_ring_axioms(a, b, c):
    assert (a + b) * c == a * c + b * c
    assert (a * b) * c == a * (b * c)
    assert a * b == b * a
    assert a - a == R.zero()


@given(polys, polys)
def test_product_matches_sympy(a, b):
    assert sympy.expand(to_sympy(a * b) - to_sympy(a) * to_sympy(b)) == 0


@given(polys, polys)
def test_leibniz(a, b):
    for v in R.names:
        assert (a * b).diff(v) == a.diff(v) * b + a * b.diff(v)
        assert (a * b).euler(v) == a.euler(v) * b + a * b.euler(v)


@given(polys)
def test_diff_matches_sympy(a):
    x = sympy.Symbol("x")
    assert sympy.expand(to_sympy(a.diff("x")) - sympy.diff(to_sympy(a), x)) == 0


def test_units_and_negative_exponents():
    x, y, z = R.vars("x", "y", "z")
    m = x ** -2 * y
    assert m.inverse() * m == R.one()
    with pytest.raises(NotAUnit):
        (x + y).inverse()
    with pytest.raises(SymAlgError):
        LaurentPoly(R, {(0, 0, -1): Fraction(1)})


def test_subs_and_json_roundtrip():
    x, y, z = R.vars("x", "y", "z")
    p = 3 * x * y ** -1 + z ** 2 - Fraction(1, 2)
    assert p.evaluate({"x": 2, "y": 4, "z": 1}) == 2
    js = p.to_json()
    assert poly_from_terms(R, js["terms"]) == p
    assert str(R.zero()) == "0"


def _sympy_dimension(gens, syms):
    G = sympy.groebner(gens, *syms, order="grevlex")
    assert G.is_zero_dimensional
    leads = [sympy.Poly(g, *syms).monoms(order="grevlex")[0] for g in G.exprs]
    count, frontier, seen = 0, [(0,) * len(syms)], set()
    while frontier:
        e = frontier.pop()
        if e in seen or any(all(a >= b for a, b in zip(e, l)) for l in leads):
            continue
        seen.add(e)
        count += 1
        for i in range(len(syms)):
            frontier.append(tuple(a + (i == j) for j, a in enumerate(e)))
    return count


def test_groebner_dimension_matches_sympy():
    S = Ring(["a", "b"], invertible=["a"])
    a, b = S.vars("a", "b")
    I = Ideal(S, [a ** 2 + b ** 2 - 5, a * b - 2])
    qr = quotient_basis(groebner_basis(I))
    sa, sb, sw = sympy.symbols("a b w")
    assert qr.dimension == _sympy_dimension([sa ** 2 + sb ** 2 - 5, sa * sb - 2, sa * sw - 1], [sa, sb, sw]) == 4


def test_laurent_jacobi_ring_matches_sympy():
    # z1 + z2 + q/(z1 z2) at q = 7: critical points of a Laurent polynomial
    S = Ring(["z1", "z2"], invertible=["z1", "z2"])
    z1, z2 = S.vars("z1", "z2")
    W = z1 + z2 + 7 * (z1 * z2).inverse()
    qr = quotient_basis(groebner_basis(Ideal(S, [W.euler("z1"), W.euler("z2")])))
    x, y, u, v = sympy.symbols("x y u v")
    gens = [x - 7 * u * v, y - 7 * u * v, x * u - 1, y * v - 1]
    assert qr.dimension == _sympy_dimension(gens, [x, y, u, v]) == 3
    M = mult_matrix(qr, W)
    # W takes the values 3 * 7^(1/3) * zeta on the critical set
    assert char_poly(M) == [Fraction(-27 * 7), 0, 0, 1]


def test_not_zero_dimensional():
    S = Ring(["a", "b"])
    a, b = S.vars("a", "b")
    with pytest.raises(NotZeroDimensional):
        quotient_basis(groebner_basis(Ideal(S, [a * b])))


mats = st.integers(1, 4).flatmap(lambda n: st.lists(st.lists(st.integers(-6, 6), min_size=n, max_size=n),
                                                    min_size=n, max_size=n))


@given(mats)
def test_char_poly_and_det_match_sympy(M):
    F = [[Fraction(v) for v in row] for row in M]
    x = sympy.Symbol("x")
    ref = sympy.Matrix(M).charpoly(x).all_coeffs()[::-1]
    assert char_poly(F) == [Fraction(int(c)) for c in ref]
    assert det(F) == sympy.Matrix(M).det()


@given(mats)
def test_inverse_and_rank(M):
    F = [[Fraction(v) for v in row] for row in M]
    n = len(M)
    rows = [{j: v for j, v in enumerate(row) if v} for row in F]
    assert sparse_rank(rows) == sympy.Matrix(M).rank()
    if sympy.Matrix(M).det() != 0:
        I = mat_mul(F, mat_inverse(F))
        assert I == [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]


def test_qelem_algebra():
    rng = random.Random(3)
    A = QElem([[Fraction(rng.randint(-4, 4)) for _ in range(3)] for _ in range(3)])
    B = A * A + 2 * A + 1
    assert B == A * (A + 2) + 1
    inv = (A + 10).inverse()
    assert inv * (A + 10) == QElem.scalar(1, 3)


def test_upoly_str():
    assert upoly_str([Fraction(-4), Fraction(0), Fraction(1)]) == "x^2 - 4"
