import importlib.util
import json
from fractions import Fraction
from importlib import resources
from pathlib import Path

import pytest
import sympy
from hypothesis import given, strategies as st

from mirrorflag import lgjacobi as lg
from mirrorflag import quantum as qu
from mirrorflag.symalg import NotZeroDimensional

from conftest import pd_of

ROOT = Path(__file__).resolve().parent.parent


def _derive_script():
    spec = importlib.util.spec_from_file_location("derive_charts", ROOT / "scripts" / "derive_charts.py")
    mod = importlib.util.module_from_spec(spec)
    spec.loader.exec_module(mod)
    return mod


@pytest.mark.parametrize("tag", ["P1", "P2", "SL3_B", "SL2_B"])
def test_charts_verify(tag):
    chart = lg.load_chart(tag)
    assert chart.checks and all(c["pass"] for c in chart.checks)


@pytest.mark.parametrize("tag", ["P1", "P2", "SL3_B"])
def test_shipped_charts_match_derivation(tag):
    shipped = json.loads(resources.files("mirrorflag").joinpath("charts", f"{tag}.json").read_text())
    assert _derive_script().derive(tag) == shipped


def test_unknown_chart():
    with pytest.raises(lg.ChartError):
        lg.load_chart("G2")


def test_chart_lookup():
    assert lg.chart_for(pd_of(2, (2,))) == "P2"
    assert lg.chart_for(pd_of(3)) is None


def test_p1_superpotential_char_poly():
    # critical values of z + q/z are +-2 sqrt(q)
    pres = lg.jacobi_ideal(lg.load_chart("P1"))
    r = lg.jacobi_report(pres, [0], [7])
    assert r["W_char_poly"] == [-28, 0, 1]
    x, z = sympy.symbols("x z")
    vals = sympy.solve(sympy.diff(z + 7 / z, z), z)
    ref = sympy.expand(sympy.prod([x - (v + 7 / v) for v in vals]))
    assert [Fraction(int(c)) for c in sympy.Poly(ref, x).all_coeffs()[::-1]] == r["W_char_poly"]


def test_p2_dimension_matches_sympy_groebner():
    h1, h2, q = 3, -5, 7
    z1, z2, w1, w2 = sympy.symbols("z1 z2 w1 w2")
    pres = lg.jacobi_ideal(lg.load_chart("P2"))
    chart = pres.chart
    W = sum(sympy.Rational(str(c)) * z1 ** e[0] * z2 ** e[1] * q ** e[2] for e, c in chart.W.terms.items())
    hs = [h1, h2, -h1 - h2]
    gens = []
    for j, zj in enumerate((z1, z2)):
        hterm = sum(hs[m] * chart.zexp[m][j] for m in range(3))
        gens.append(sympy.together(zj * sympy.diff(W, zj) - hterm))
    polys = [sympy.numer(g) for g in gens] + [z1 * w1 - 1, z2 * w2 - 1]
    G = sympy.groebner(polys, z1, z2, w1, w2, order="grevlex")
    assert G.is_zero_dimensional
    assert len(_standard_monomials(G, [z1, z2, w1, w2])) == lg.jacobi_report(pres, [h1, h2], [q])["dimension"] == 3


def _standard_monomials(G, syms):
    leads = [sympy.Poly(g, *syms).monoms(order="grevlex")[0] for g in G.exprs]
    out, todo = set(), [(0,) * len(syms)]
    while todo:
        e = todo.pop()
        if e in out or any(all(a >= b for a, b in zip(e, l)) for l in leads):
            continue
        out.add(e)
        todo += [tuple(a + (i == j) for j, a in enumerate(e)) for i in range(len(syms))]
    return out


@pytest.mark.parametrize("rank,levi,size", [(1, (), 2), (2, (2,), 3), (2, (), 6), (3, (2, 3), 4), (3, (1, 3), 6)])
def test_route_b_dimension(rank, levi, size):
    pres = lg.centralizer_ideal(pd_of(rank, levi))
    h = [Fraction(v) for v in (2, -3, 5)[:rank]]
    q = [Fraction(v) for v in (3, -7, 11)[:pd_of(rank, levi).k]]
    assert lg.jacobi_report(pres, h, q)["dimension"] == size


@pytest.mark.parametrize("rank,levi", [(1, ()), (2, (2,)), (2, ())])
def test_compare_routes(rank, levi):
    pd = pd_of(rank, levi)
    specs = [([0] * rank, [5] * pd.k), ([2, -1][:rank], [-3, 4][:pd.k])]
    assert all(r["pass"] for r in lg.compare_routes(pd, specs))


@given(st.lists(st.integers(-20, 20), min_size=2, max_size=2), st.lists(st.integers(-20, 20).filter(bool),
                                                                       min_size=2, max_size=2))
def test_sl3_route_b_matches_quantum(h, q):
    r = lg.jacobi_report(_SL3_B, h, q)
    assert r["J_char_polys"] == [qu.char_poly_at(_QH_SL3, i, h, q) for i in (1, 2)]


_SL3_B = lg.centralizer_ideal(pd_of(2))
_QH_SL3 = qu.build_qh_model(pd_of(2))


def test_rescaling():
    pres = lg.centralizer_ideal(pd_of(2))
    assert lg.graded_rescaling_check(pres, [1, 2], [3, 5], Fraction(2))


def test_negative_control_is_detected():
    pd = pd_of(2, (2,))
    r = lg.jacobi_report(lg.centralizer_ideal(pd, perturb=Fraction(2)), [1, 2], [3])
    assert r["J_char_polys"][0] != qu.char_poly_at(qu.build_qh_model(pd), 1, [1, 2], [3])


def test_specialize_rejections():
    pres = lg.jacobi_ideal(lg.load_chart("P1"), equivariant=False)
    with pytest.raises(ValueError):
        lg.specialize(pres, [1], [2])
    with pytest.raises(NotZeroDimensional):
        lg.specialize(pres, [0], [0])


def test_orders_agree():
    pres = lg.jacobi_ideal(lg.load_chart("SL3_B"))
    r = lg.jacobi_report(pres, [1, -2], [3, 4], orders=("grevlex", "lex"))
    assert r["dimension_by_order"] == {"grevlex": 6, "lex": 6}
