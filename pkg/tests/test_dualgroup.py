import random
from fractions import Fraction

import pytest
import sympy
from hypothesis import given, strategies as st

from mirrorflag import dualgroup as dg

from conftest import pd_of

CASES = {"A1": (1, ()), "A2[2]": (2, (2,)), "A2": (2, ()), "A3": (3, ()), "A3[1,3]": (3, (1, 3)),
         "A3[2,3]": (3, (2, 3)), "A4[2,4]": (4, (2, 4)), "A4": (4, ())}
SELECTED = {"A1": -1, "A2[2]": -1, "A2": +1, "A3": -1, "A3[1,3]": +1, "A3[2,3]": -1, "A4[2,4]": -1, "A4": +1}


@pytest.fixture(scope="module")
def models():
    return {name: dg.build_dual_group(pd_of(*c)) for name, c in CASES.items()}


@pytest.mark.parametrize("sign", [1, -1])
@pytest.mark.parametrize("n,i", [(2, 1), (3, 1), (3, 2), (4, 3)])
def test_simple_rep_is_exponential_product(n, i, sign):
    e = sympy.zeros(n)
    e[i - 1, i] = 1
    f = e.T
    ref = (sign * e).exp() * (-sign * f).exp() * (sign * e).exp()
    assert ref == sympy.Matrix(dg.simple_rep(n, i, sign))


@pytest.mark.parametrize("name", CASES)
def test_self_tests_and_selected_convention(models, name):
    m = models[name]
    assert all(r["pass"] for r in m.self_test)
    assert m.sign == SELECTED[name]


def test_lift_is_a_signed_permutation(models):
    for m in models.values():
        W = sympy.Matrix(m.wdot)
        assert W * W.T == sympy.eye(m.n)
        assert all(sum(abs(x) for x in row) == 1 for row in m.wdot)
        # the underlying permutation is w_P w_0
        for r, row in enumerate(m.wdot):
            c = next(j for j, x in enumerate(row) if x)
            assert m.w.perm[c] == r + 1 or m.w.perm[r] == c + 1


@given(st.sampled_from(sorted(CASES)), st.integers(0, 10 ** 6))
def test_factorization_roundtrip(name, seed):
    m = dg.build_dual_group(pd_of(*CASES[name]))
    rng = random.Random(seed)
    x, f = dg.random_stratum_point(m, rng)
    fc = dg.bruhat_factorize(m, x)
    assert dg.recompose(m, fc) == x
    assert dg.is_lower_unitriangular(fc.u1) and dg.is_lower_unitriangular(fc.u2)
    assert dg.in_center_of_levi(m.pd, fc.t)
    assert all(r == 0 for _, r in dg.minor_equations(m, x, fc.t))
    g = dg.gauge_move(m, f, dg.random_gauge(m, rng))
    assert dg.recompose(m, g) == x
    assert dg.superpotential_from(g) == dg.superpotential_from(f) == dg.superpotential_from(fc)


@given(st.integers(0, 10 ** 6))
def test_udl(seed):
    rng = random.Random(seed)
    n = rng.randint(1, 5)
    M = [[Fraction(rng.randint(-9, 9)) for _ in range(n)] for _ in range(n)]
    try:
        N, D, L = dg.udl(M)
    except dg.NotInStratum:
        return
    from mirrorflag.symalg import mat_mul

    assert mat_mul(mat_mul(N, dg.diag_matrix(D)), L) == M


def test_not_in_stratum(models):
    m = models["A2"]
    x = [[Fraction(1), 0, 0], [Fraction(1), Fraction(1), 0], [0, 0, Fraction(1)]]
    with pytest.raises(dg.NotInStratum):
        dg.bruhat_factorize(m, x)


@pytest.mark.parametrize("name", CASES)
def test_mirror_map(name):
    pd = pd_of(*CASES[name])
    mm = dg.mirror_map(pd)
    assert mm.determinant() in (1, -1)
    q = [Fraction(v) for v in (3, -5, 7, 2)[:pd.k]]
    assert mm.q_from_tau(mm.tau_from_q(q)) == q
    t = dg.t_from_q(pd, q, Fraction(1))
    assert dg.q_from_t(pd, t) == q
    assert dg.in_center_of_levi(pd, t)


def test_coweight_view_not_unimodular():
    mm = dg.mirror_map(pd_of(2))
    assert mm.coweight_view() == [[2, -1], [-1, 2]]
    assert sympy.Matrix(mm.coweight_view()).det() == 3


def test_p1_superpotential(models):
    m = models["A1"]
    z, q = Fraction(3), Fraction(5)
    t = dg.t_from_q(m.pd, [q], Fraction(1))
    u2 = [[Fraction(1), 0], [z, Fraction(1)]]
    _, x = dg.lu_lower_upper(dg.mat_mul(dg.mat_mul(m.wdot_inv, dg.diag_matrix(t)), u2))
    assert dg.superpotential(m, x) == z + q / z
    assert dg.lg_q(m, x) == [q]
