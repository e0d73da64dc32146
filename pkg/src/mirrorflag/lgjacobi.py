"""Semi-classical B-side: Jacobi algebras of the LG model.

Route A works on a torus chart X_P ~ Z(L^vee) x (C^*)^d with coordinates z_j and
the frame z_j d/dz_j.  The relations are

    z_j dW/dz_j - sum_m h_m c_{mj},

where c_{mj} is the exponent of z_j in the diagonal entry x_mm (this is the
pairing of h with p^* of the Maurer-Cartan form along the frame).  The
distinguished elements are J_i = q_i dW/dq_i - sum_m h_m e_{mi}.

Route B works on the centralizer scheme: upper triangular b commuting with
xi = e + diag(h), lying in the stratum cut out by the extremal minor
equations.  There J_i = (u_2)_{c+1,c} - omega_c(h) with u_2 from the
factorization of b, evaluated in the quotient algebra.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from itertools import combinations
from typing import Dict, List, Optional, Sequence, Tuple

from . import dualgroup as dg
from .quantum import h_eps, h_names, omega_eps, q_names, weight_value_eps
from .rootdata import ParabolicData, build_root_system, case_label, from_word, parabolic_data
from .symalg import (Ideal, LaurentPoly, NotZeroDimensional, QElem, QuotientRing, Ring, groebner_basis, mat_mul,
                     mult_matrix, poly_from_terms, quotient_basis, to_fraction)

CHART_TAGS = ("P1", "P2", "SL3_B")
CHART_ALIASES = {"SL2_B": "P1"}


class ChartError(ValueError):
    pass


# --------------------------------------------------------------------------
# charts


@dataclass
class Chart:
    tag: str
    pd: ParabolicData
    ring: Ring  # z's and q's invertible, then h's
    z: List[str]
    q: List[str]
    word: List[int]
    sign: int
    t: List[LaurentPoly]
    u1: List[List[LaurentPoly]]
    u2: List[List[LaurentPoly]]
    x: List[List[LaurentPoly]]
    W: LaurentPoly
    zexp: List[List[int]]  # zexp[m][j]: exponent of z_j in x_mm
    qexp: List[List[int]]
    gauge_monomial: LaurentPoly
    aliases: List[str] = field(default_factory=list)
    checks: List[dict] = field(default_factory=list)

    @property
    def d(self) -> int:
        return len(self.z)

    @property
    def n(self) -> int:
        return self.pd.n

    def hs(self) -> List[LaurentPoly]:
        return h_eps(self.ring, self.pd.rank)

    def h_term_z(self, j: int) -> LaurentPoly:
        return weight_value_eps([self.zexp[m][j] for m in range(self.n)], self.hs())

    def h_term_q(self, i: int) -> LaurentPoly:
        return weight_value_eps([self.qexp[m][i] for m in range(self.n)], self.hs())


def chart_ring(z: Sequence[str], q: Sequence[str], rank: int) -> Ring:
    return Ring(list(z) + list(q) + h_names(rank), invertible=list(z) + list(q))


def _read_chart(tag: str) -> dict:
    tag = CHART_ALIASES.get(tag, tag)
    if tag not in CHART_TAGS:
        raise ChartError(f"unknown chart tag {tag!r}; known: {', '.join(CHART_TAGS + tuple(CHART_ALIASES))}")
    text = resources.files("mirrorflag").joinpath("charts", f"{tag}.json").read_text()
    return json.loads(text)


def chart_for(pd: ParabolicData) -> Optional[str]:
    for tag in CHART_TAGS:
        rec = _read_chart(tag)
        if rec["rank"] == pd.rank and frozenset(rec["levi"]) == frozenset(pd.levi_subset):
            return tag
    return None


def load_chart(tag: str, verify: bool = True) -> Chart:
    rec = _read_chart(tag)
    pd = parabolic_data(build_root_system(rec["cartan_type"], rec["rank"]), rec["levi"])
    z, q = rec["z"], rec["q"]
    ring = chart_ring(z, q, pd.rank)
    base = Ring(list(z) + list(q), invertible=list(z) + list(q))

    def P(terms):
        return poly_from_terms(base, terms).to_ring(ring)

    def M(rows):
        return [[P(e) for e in row] for row in rows]

    chart = Chart(
        tag=rec["tag"], pd=pd, ring=ring, z=z, q=q, word=rec["word"], sign=rec["sign"],
        t=[P(a) for a in rec["t"]], u1=M(rec["u1"]), u2=M(rec["u2"]), x=M(rec["x"]), W=P(rec["W"]),
        zexp=rec["p_exponents"]["z"], qexp=rec["p_exponents"]["q"],
        gauge_monomial=P(rec["gauge_monomial"]), aliases=rec.get("aliases", []))
    if verify:
        chart.checks = verify_chart(chart)
        bad = [c["id"] for c in chart.checks if not c["pass"]]
        if bad:
            raise ChartError(f"chart {chart.tag} failed verification: {bad}")
    return chart


def verify_chart(chart: Chart) -> List[dict]:
    """Symbolic identities every shipped chart must satisfy."""
    pd, n = chart.pd, chart.n
    model = dg.build_dual_group(pd)
    out = []

    def rec(cid, ok, detail=None):
        out.append({"id": f"chart.{chart.tag}.{cid}", "pass": bool(ok), "detail": detail})

    w = from_word(n, chart.word)
    rec("reduced_word", w == pd.w_P_w_0 and len(chart.word) == w.length == chart.d)
    rec("representative", dg.tits_lift(n, chart.word, chart.sign) == model.wdot, model.convention)
    rec("t_in_center", dg.in_center_of_levi(pd, chart.t) and chart.t == dg.t_from_q(
        pd, [chart.ring.var(v) for v in chart.q], chart.ring.one()))
    rec("unitriangular", dg.is_lower_unitriangular(chart.u1) and dg.is_lower_unitriangular(chart.u2))
    lhs = dg.recompose(model, dg.Factorization(chart.u1, chart.t, chart.u2))
    rec("recompose", lhs == chart.x)
    rec("upper_triangular", dg.is_upper_triangular(chart.x))
    ok_exp = True
    for m in range(n):
        e = chart.x[m][m]
        if not e.is_monomial():
            ok_exp = False
            continue
        ok_exp &= [e.monomial_exponent(v) for v in chart.z] == chart.zexp[m]
        ok_exp &= [e.monomial_exponent(v) for v in chart.q] == chart.qexp[m]
    rec("p_exponents", ok_exp)
    rec("superpotential", dg.superpotential(model, chart.x) == chart.W == dg.chi(chart.u1) + dg.chi(chart.u2))
    rec("q_map", dg.lg_q(model, chart.x) == [chart.ring.var(v) for v in chart.q])
    # L_{z_j d/dz_j} (dz_1/z_1 ^ ... ^ dz_d/z_d) = div of the frame = sum_k z_k d/dz_k (delta_jk) = 0
    frame = [[chart.ring.const(int(j == k)) for k in range(chart.d)] for j in range(chart.d)]
    div_ok = all(sum((frame[j][k].euler(chart.z[k]) for k in range(chart.d)), chart.ring.zero()).is_zero()
                 for j in range(chart.d))
    rec("frame_volume_invariance", div_ok)
    return out


# --------------------------------------------------------------------------
# presentations


@dataclass
class JacobiPresentation:
    route: str  # "A-chart" or "B-centralizer"
    pd: ParabolicData
    ideal: Ideal
    fiber_vars: List[str]
    params: List[str]  # h's then q's (specialized before Groebner)
    J: List[object] = field(default_factory=list)  # route A: LaurentPoly
    W: Optional[LaurentPoly] = None
    chart: Optional[Chart] = None
    model: Optional[dg.DualGroupModel] = None
    equivariant: bool = True
    perturbed: bool = False

    def specialization(self, h: Sequence, q: Sequence) -> Dict[str, Fraction]:
        vals = {}
        if self.equivariant:
            vals.update({n: to_fraction(v) for n, v in zip(h_names(self.pd.rank), h)})
        vals.update({n: to_fraction(v) for n, v in zip(q_names(self.pd), q)})
        return vals


def jacobi_ideal(chart: Chart, equivariant: bool = True) -> JacobiPresentation:
    """Route A: the relative critical scheme of W twisted by the h-form."""
    ring = chart.ring
    if not equivariant:
        ring = ring.without(h_names(chart.pd.rank))
    W = chart.W.to_ring(ring) if equivariant else chart.W.subs({h: 0 for h in h_names(chart.pd.rank)})
    gens, J = [], []
    for j, zj in enumerate(chart.z):
        g = W.euler(zj)
        if equivariant:
            g = g - chart.h_term_z(j)
        gens.append(g)
    for i, qi in enumerate(chart.q):
        g = W.euler(qi)
        if equivariant:
            g = g - chart.h_term_q(i)
        J.append(g)
    params = (h_names(chart.pd.rank) if equivariant else []) + list(chart.q)
    return JacobiPresentation("A-chart", chart.pd, Ideal(ring, gens), list(chart.z), params, J, W,
                              chart=chart, equivariant=equivariant)


def centralizer_ideal(pd: ParabolicData, model: Optional[dg.DualGroupModel] = None,
                      perturb: Optional[Fraction] = None) -> JacobiPresentation:
    """Route B: {b upper triangular : b xi = xi b, b in the stratum}, xi = e + diag(h).

    ``perturb`` rescales the top extremal minor equation (negative control).
    """
    model = model or dg.build_dual_group(pd)
    n = pd.n
    bnames = [f"b{i + 1}{j + 1}" for i in range(n) for j in range(i, n)]
    qs = q_names(pd)
    ring = Ring(bnames + h_names(pd.rank) + qs, invertible=qs)
    zero = ring.zero()
    b = [[ring.var(f"b{i + 1}{j + 1}") if j >= i else zero for j in range(n)] for i in range(n)]
    hs = h_eps(ring, pd.rank)
    xi = [[(ring.one() if j == i + 1 else zero) + (hs[i] if i == j else zero) for j in range(n)] for i in range(n)]
    gens = []
    bx, xb = mat_mul(b, xi), mat_mul(xi, b)
    for i in range(n):
        for j in range(n):
            e = bx[i][j] - xb[i][j]
            if not e.is_zero():
                gens.append(e)
    t = dg.t_from_q(pd, [ring.var(v) for v in qs], ring.one())
    for j in range(1, n + 1):
        Iw = model.I_w(j)
        for I in combinations(range(n), j):
            val = dg.minor(b, list(range(j)), list(I))
            if I == Iw:
                target = dg.t_character(t, I)
                if perturb is not None and j == n:
                    target = target * perturb
                gens.append(val - target)
            elif not dg.gale_le(I, Iw):
                gens.append(val)
    gens = [g for g in gens if not g.is_zero()]
    return JacobiPresentation("B-centralizer", pd, Ideal(ring, gens), bnames, h_names(pd.rank) + qs,
                              model=model, perturbed=perturb is not None)


# --------------------------------------------------------------------------
# specialized quotients


@dataclass
class SpecializedJacobi:
    pres: JacobiPresentation
    h: Tuple[Fraction, ...]
    q: Tuple[Fraction, ...]
    qr: QuotientRing

    @property
    def dimension(self) -> int:
        return self.qr.dimension

    def element(self, f: LaurentPoly) -> QElem:
        return QElem(mult_matrix(self.qr, f))

    def J_elements(self) -> List[QElem]:
        pres = self.pres
        if pres.route == "A-chart":
            vals = pres.specialization(self.h, self.q)
            return [self.element(J.subs(vals, self.qr.ring)) for J in pres.J]
        f = self._group_factorization()
        out = []
        hvals = list(self.h) + [-sum(self.h)]
        for c in pres.pd.q_simple_indices:
            omega = sum(a * b for a, b in zip(omega_eps(pres.pd.n, c), hvals))
            out.append(f.u2[c][c - 1] - omega)
        return out

    def W_element(self) -> QElem:
        pres = self.pres
        if pres.route == "A-chart":
            vals = pres.specialization(self.h, self.q)
            return self.element(pres.W.subs(vals, self.qr.ring))
        return dg.superpotential_from(self._group_factorization())

    def _group_factorization(self) -> dg.Factorization:
        ring = self.qr.ring
        n = self.pres.pd.n
        N = self.dimension
        zeroq = QElem.scalar(0, N)
        b = [[self.element(ring.var(f"b{i + 1}{j + 1}")) if j >= i else zeroq for j in range(n)]
             for i in range(n)]
        return dg.bruhat_factorize(self.pres.model, b)


def specialize(pres: JacobiPresentation, h: Sequence, q: Sequence, order: str = "grevlex",
               budget: Optional[int] = None) -> SpecializedJacobi:
    h = tuple(to_fraction(v) for v in h)[:pres.pd.rank]
    q = tuple(to_fraction(v) for v in q)
    if any(v == 0 for v in q):
        raise NotZeroDimensional("q = 0 lies outside Z(L^vee)")
    if not pres.equivariant and any(h):
        raise ValueError("non-equivariant presentation needs h = 0")
    ideal = pres.ideal.specialize(pres.specialization(h, q))
    gb = groebner_basis(ideal, order, budget)
    return SpecializedJacobi(pres, h, q, quotient_basis(gb))


def jacobi_report(pres: JacobiPresentation, h: Sequence, q: Sequence, orders: Sequence[str] = ("grevlex",)) -> dict:
    """Dimension and characteristic polynomials of the distinguished elements."""
    sj = specialize(pres, h, q, orders[0])
    dims = {orders[0]: sj.dimension}
    for o in orders[1:]:
        dims[o] = specialize(pres, h, q, o).dimension
    return {
        "route": pres.route,
        "case": case_label(pres.pd),
        "h": list(sj.h),
        "q": list(sj.q),
        "dimension": sj.dimension,
        "dimension_by_order": dims,
        "J_char_polys": [e.char_poly() for e in sj.J_elements()],
        "W_char_poly": sj.W_element().char_poly(),
    }


def compare_routes(pd: ParabolicData, specializations: Sequence[Tuple[Sequence, Sequence]],
                   route_b: Optional[JacobiPresentation] = None) -> List[dict]:
    tag = chart_for(pd)
    if tag is None:
        raise ChartError(f"no chart for {case_label(pd)}")
    A = jacobi_ideal(load_chart(tag))
    B = route_b or centralizer_ideal(pd)
    out = []
    for h, q in specializations:
        ra = jacobi_report(A, h, q)
        rb = jacobi_report(B, h, q)
        ok = (ra["dimension"] == rb["dimension"] and ra["J_char_polys"] == rb["J_char_polys"]
              and ra["W_char_poly"] == rb["W_char_poly"])
        out.append({"h": ra["h"], "q": ra["q"], "route_A": ra, "route_B": rb, "pass": ok})
    return out


def graded_rescaling_check(pres: JacobiPresentation, h: Sequence, q: Sequence, s: Fraction) -> bool:
    """char polys at (s h, s^{d_i} q_i) equal the graded rescaling of those at (h, q).

    Weights: x, h and z-directions carry 1, q_i carries half its quantum degree.
    """
    from .rootdata import quantum_degree

    s = to_fraction(s)
    h = [to_fraction(v) for v in h]
    q = [to_fraction(v) for v in q]
    d = [quantum_degree(pres.pd, i) // 2 for i in range(1, pres.pd.k + 1)]
    base = jacobi_report(pres, h, q)
    scaled = jacobi_report(pres, [s * v for v in h], [s ** di * v for di, v in zip(d, q)])
    N = base["dimension"]

    def rescale(cp):
        return [c * s ** (N - j) for j, c in enumerate(cp)]

    return (scaled["dimension"] == N and scaled["W_char_poly"] == rescale(base["W_char_poly"])
            and all(a == rescale(b) for a, b in zip(scaled["J_char_polys"], base["J_char_polys"])))
