from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings, strategies as st

from mirrorflag import brieskorn as bk
from mirrorflag import lgjacobi as lg
from mirrorflag import quantum as qu

from conftest import pd_of


@pytest.fixture(scope="module")
def qh():
    return {"P1": qu.build_qh_model(pd_of(1)), "P2": qu.build_qh_model(pd_of(2, (2,))),
            "SL3_B": qu.build_qh_model(pd_of(2))}


def kouchnirenko(tag):
    """Normalized volume of the Newton polytope of W in the z variables."""
    chart = lg.load_chart(tag)
    d = len(chart.z)
    pts = sorted({e[:d] for e in chart.W.terms})
    if d == 1:
        xs = [p[0] for p in pts]
        return max(xs) - min(xs)
    hull = sympy.convex_hull(*[sympy.Point(*p) for p in pts])
    return int(2 * abs(hull.area))


@pytest.mark.parametrize("tag,dim", [("P1", 2), ("P2", 3)])
def test_torus_dimension(tag, dim):
    assert kouchnirenko(tag) == dim
    chart = lg.load_chart(tag)
    fib = bk.brieskorn_fiber(tag, 1, [0] * chart.pd.rank, [1] * len(chart.q))
    assert fib.dimension == dim == len(fib.basis)


def test_sl3_global_dimension():
    fib = bk.brieskorn_fiber(bk.fiber_model("SL3_B"), 1, [0, 0], [1, 1])
    assert fib.dimension == 6
    assert [c[-2] for c in fib.history] == [1, 4, 6, 6, 6, 9][:len(fib.history)]


def test_sl3_torus_chart_is_larger():
    # the torus chart misses the divisor a = 0 of the fiber
    assert bk.brieskorn_fiber(bk.fiber_model("SL3_B", torus=True), 1, [0, 0], [1, 1]).dimension == 7


def test_global_model_checks():
    fm = bk.fiber_model("SL3_B")
    assert fm.kind == "global"
    assert fm.checks and all(c["pass"] for c in fm.checks)


@settings(max_examples=8)
@given(st.integers(1, 6), st.sampled_from([Fraction(1, 2), Fraction(-3), Fraction(7, 5)]))
def test_scaling_p2(hbar, c):
    a, b = bk.scaling_check(bk.fiber_model("P2"), hbar, [1, -2], [3], c)
    assert a == b == 3


@pytest.mark.parametrize("tag", ["P1", "P2"])
def test_torus_degeneration(tag):
    assert bk.degeneration_check(bk.fiber_model(tag))


def test_global_degeneration_matches_route_a():
    fm = bk.fiber_model("SL3_B")
    with pytest.raises(bk.ModelError):
        bk.degeneration_check(fm)
    h, q = [2, -1], [3, 5]
    ra = lg.jacobi_report(lg.jacobi_ideal(lg.load_chart("SL3_B")), h, q)
    rd = bk.degenerate_jacobi_report(fm, h, q)
    assert (rd["dimension"], rd["J_char_polys"], rd["W_char_poly"]) == \
        (ra["dimension"], ra["J_char_polys"], ra["W_char_poly"])


def test_odes_at_h0(qh):
    assert str(bk.bside_cyclic_ode(bk.fiber_model("P1"), h=[0])) == "D^2 - q"
    assert str(bk.bside_cyclic_ode(bk.fiber_model("P2"), h=[0, 0])) == "D^3 - q"
    B = bk.bside_cyclic_ode(bk.fiber_model("SL3_B"), 1, {2: 3}, [0, 0])
    assert B.order == 6
    assert B.equivalent(qu.aside_cyclic_ode(qh["SL3_B"], 1, {2: 3}, [0, 0]))


@pytest.mark.parametrize("tag", ["P1", "P2"])
def test_symbolic_ode_matches_a_side(tag, qh):
    B = bk.bside_cyclic_ode(bk.fiber_model(tag))
    assert B.equivalent(qu.aside_cyclic_ode(qh[tag]))


def test_symbolic_ode_specializes():
    fm = bk.fiber_model("P2")
    sym = bk.bside_cyclic_ode(fm)
    assert sym.specialize({"h1": 2, "h2": -1}).equivalent(bk.bside_cyclic_ode(fm, h=[2, -1]))


@pytest.mark.parametrize("tag,h,q", [("P2", [1, 2], [3]), ("SL3_B", [2, -1], [3, 5])])
def test_gauss_manin_semiclassical_limit(tag, h, q):
    fm = bk.fiber_model(tag)
    fixed = {j: q[j - 1] for j in range(2, len(q) + 1)}
    gm = bk.gauss_manin(fm, 1, fixed, h)
    got = bk.semiclassical_char_poly(gm, {fm.q[0]: q[0]})
    want = lg.jacobi_report(lg.jacobi_ideal(lg.load_chart(tag)), h, q)["J_char_polys"][0]
    assert got == want


def test_newton_polytope():
    P = bk.newton_polytope([(1, 0), (0, 1), (-1, -1)])
    assert len(P.normals) == 3
    assert P.degree((1, 0)) == 1 and P.degree((2, 2)) == 4 and P.degree((-1, -1)) == 1
    with pytest.raises(bk.NotFinite):
        bk.newton_polytope([(1, 0), (0, 1)])


def test_bad_points():
    fm = bk.fiber_model("P1")
    with pytest.raises(ValueError):
        bk.brieskorn_fiber(fm, 0, [0], [1])
    with pytest.raises(bk.NotFinite):
        bk.brieskorn_fiber(fm, 1, [0], [0])
