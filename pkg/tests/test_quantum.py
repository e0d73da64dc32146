from fractions import Fraction

import pytest
import sympy
from hypothesis import given, strategies as st

from mirrorflag import quantum as qu
from mirrorflag.symalg import char_poly, upoly_str

from conftest import pd_of

CASES = [(1, ()), (2, (2,)), (2, ()), (3, ()), (3, (1, 3)), (3, (2, 3)), (4, (2, 4))]


@pytest.fixture(scope="module")
def models():
    return {c: qu.build_qh_model(pd_of(*c)) for c in CASES}


@pytest.mark.parametrize("case", CASES)
def test_oracles_and_flatness(models, case):
    m = models[case]
    assert all(r["pass"] for r in qu.chevalley_oracle(m))
    assert all(r["pass"] for r in qu.flatness_check(m))


def test_p1_matrix_frozen(models):
    m = models[(1, ())]
    assert [[str(x) for x in row] for row in m.D[0]] == [["-h1", "q1"], ["1", "h1"]]


def test_p2_char_poly_frozen(models):
    m = models[(2, (2,))]
    assert upoly_str(char_poly(m.D[0], m.ring.one())) == "x^3 + (-h1^2 - h1*h2 - h2^2)*x + -h1^2*h2 - h1*h2^2 - q1"


def test_p1_first_chern_char_poly(models):
    m = models[(1, ())]
    assert char_poly(qu.first_chern_matrix(m, [0], [5])) == [-20, 0, 1]


def _eval_poly(expr, xs, X, N):
    poly = sympy.Poly(expr, *xs)
    M = sympy.zeros(N)
    for mon, co in poly.terms():
        T = sympy.eye(N)
        for Xi, a in zip(X, mon):
            T = T * Xi ** a
        M += co * T
    return M


@pytest.mark.parametrize("rank", [2, 3])
def test_full_flags_satisfy_quantum_toda_relations(models, rank):
    """Independent presentation: coefficients of det(A + lambda) vanish, A tridiagonal."""
    m = models[(rank, ())]
    q = [3, -5, 7][:rank]
    D = [sympy.Matrix(M) for M in m.numeric([0] * rank, q)]
    n, N = rank + 1, D[0].shape[0]
    Z = sympy.zeros(N)
    X = [(D[i] if i < rank else Z) - (D[i - 1] if i > 0 else Z) for i in range(n)]
    xs = sympy.symbols(f"x0:{n}")
    lam = sympy.Symbol("lam")
    A = sympy.diag(*xs)
    for i in range(n - 1):
        A[i, i + 1] = q[i]
        A[i + 1, i] = -1
    coeffs = sympy.Poly((A + lam * sympy.eye(n)).det(), lam).all_coeffs()[1:]
    assert all(_eval_poly(c, xs, X, N) == Z for c in coeffs)


@given(st.lists(st.integers(-20, 20), min_size=2, max_size=2), st.integers(-20, 20).filter(bool))
def test_p2_equivariant_presentation(h, q):
    """QH_T(P^2) = Q[x, h, q] / ((x + h_1)(x + h_2)(x + h_3) - q)."""
    m = qu.build_qh_model(pd_of(2, (2,)))
    D = sympy.Matrix(m.numeric(h, [q])[0])
    hs = h + [-sum(h)]
    I = sympy.eye(3)
    assert (D + hs[0] * I) * (D + hs[1] * I) * (D + hs[2] * I) == q * I


@pytest.mark.parametrize("case", CASES)
def test_grading(models, case):
    assert all(r["pass"] for r in qu.grading_check(models[case]))


def test_cyclic_ode_examples(models):
    p1 = qu.aside_cyclic_ode(models[(1, ())], h=[0])
    assert str(p1) == "D^2 - q"
    assert str(qu.aside_cyclic_ode(models[(2, (2,))], h=[0, 0])) == "D^3 - q"
    sym = qu.aside_cyclic_ode(models[(1, ())])
    assert str(sym) == "D^2 + -h1^2 - q"
    assert sym.specialize({"h1": 3}).equivalent(qu.aside_cyclic_ode(models[(1, ())], h=[3]))


def test_cyclic_ode_needs_fixed_q(models):
    with pytest.raises(ValueError):
        qu.aside_cyclic_ode(models[(2, ())], 1)


def test_point_values_validation():
    with pytest.raises(ValueError):
        qu.point_values(pd_of(2), [1], [1, 2])


def test_connection_operator(models):
    c = qu.quantum_connection(models[(1, ())], 1)
    assert str(c.matrix_part[0][1]) == "1"
    assert c.derivation == "hbar*d/dq1"
    assert Fraction(1) == c.matrix_part[0][1].constant_value()
