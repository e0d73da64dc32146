"""Brieskorn lattice of the LG fiber and its Gauss-Manin connection.

A fiber model presents the fiber R_P of X_P -> Z(L^vee) as Spec A, with A a
quotient of a Laurent polynomial ring by rewrite relations, a global frame
zeta_1..zeta_d of vector fields and a nowhere vanishing top form
omega = g * dx_1 ^ ... ^ dx_d.  Top forms are f * omega and the twisted de Rham
differential gives the relations

    nabla_j f = hbar (zeta_j f + div(zeta_j) f) + (zeta_j W - <h, zeta_j log p>) f

where p(x) is the diagonal of x.  The fiber G_0 = A / sum_j nabla_j(A) is computed
by filtering A by a degree function: V_R is spanned by the standard monomials of
degree <= R, and the classes of V_R modulo nabla(V_S) stabilize as S and R grow.

Along q_i the connection acts through the lift q_i d/dq_i at fixed coordinates:

    D_i f = hbar (q_i df/dq_i + div_i f) + (q_i dW/dq_i - <h, q_i d/dq_i log p>) f.

Torus charts (z_j d/dz_j frame, omega = dz/z) are the special case with no
relations.  For SL_3/B the torus chart misses a divisor of R_P and has a
7-dimensional twisted cohomology, so a global model is shipped instead.

Symbolic computations over Q(q, hbar, h) use sympy's DomainMatrix over a
rational function field.
"""

from __future__ import annotations

import itertools
import json
import random
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

import sympy
from sympy.polys.matrices import DomainMatrix

from . import dualgroup as dg
from .lgjacobi import CHART_ALIASES, Chart, jacobi_ideal, load_chart
from .quantum import NoDependence, ODEOperator, h_eps, h_names, ode_ring
from .symalg import (Ideal, LaurentPoly, Ring, SymAlgError, char_poly, det, groebner_basis, mat_inverse,
                     mult_matrix, poly_from_terms, quotient_basis, sparse_echelon, to_fraction)

Exp = Tuple[int, ...]


class NotFinite(SymAlgError):
    """The filtered quotient did not stabilize: not finite at this point."""


class BasisUnstable(SymAlgError):
    pass


class ModelError(ValueError):
    pass


# --------------------------------------------------------------------------
# Newton polytope (degree function for torus models)


@dataclass(frozen=True)
class NewtonPolytope:
    vertices: Tuple[Exp, ...]
    normals: Tuple[Tuple[Fraction, ...], ...]  # facets <n, x> = 1

    @property
    def dim(self) -> int:
        return len(self.vertices[0])

    def degree(self, a: Sequence[int]) -> Fraction:
        return max(sum(x * y for x, y in zip(n, a)) for n in self.normals)


def _solve_hyperplane(pts: Sequence[Exp]) -> Optional[Tuple[Fraction, ...]]:
    """n with <n, p> = 1 for all p (square system), or None if singular."""
    d = len(pts)
    try:
        inv = mat_inverse([[Fraction(c) for c in p] for p in pts])
    except ZeroDivisionError:
        return None
    return tuple(sum(inv[i][j] for j in range(d)) for i in range(d))


def newton_polytope(exps: Sequence[Exp]) -> NewtonPolytope:
    pts = sorted(set(tuple(e) for e in exps))
    d = len(pts[0])
    normals = set()
    for sub in itertools.combinations(pts, d):
        n = _solve_hyperplane(sub)
        if n is None:
            continue
        if all(sum(x * y for x, y in zip(n, p)) <= 1 for p in pts):
            normals.add(n)
    if not normals:
        raise NotFinite("the Newton polytope does not contain the origin in its interior")
    poly = NewtonPolytope(tuple(pts), tuple(sorted(normals)))
    for a in itertools.product((-1, 0, 1), repeat=d):
        if any(a) and poly.degree(a) <= 0:
            raise NotFinite("the origin is not interior to the Newton polytope")
    return poly


# --------------------------------------------------------------------------
# fiber models


Derivation = Dict[str, LaurentPoly]  # coordinate -> image
Rule = Tuple[Dict[str, int], LaurentPoly]  # leading monomial, replacement


def _inv_names(ring: Ring) -> List[str]:
    return [n for n, f in zip(ring.names, ring.invertible) if f]


def _reduce(f: LaurentPoly, rules: Sequence[Rule], cache: dict) -> LaurentPoly:
    """Normal form of f under monomial rewrite rules."""
    if not rules or f.is_zero():
        return f
    ring = f.ring
    prep = cache.get(ring)
    if prep is None:
        prep = [({ring.index(c): a for c, a in lead.items()}, rep.to_ring(ring)) for lead, rep in rules]
        cache[ring] = prep
    out: Dict[Exp, Fraction] = {}
    todo = dict(f.terms)
    while todo:
        e, c = todo.popitem()
        for lead, rep in prep:
            if all(e[i] >= a for i, a in lead.items()):
                base = list(e)
                for i, a in lead.items():
                    base[i] -= a
                for e2, c2 in rep.terms.items():
                    k = tuple(x + y for x, y in zip(base, e2))
                    v = todo.get(k, 0) + c * c2
                    if v:
                        todo[k] = v
                    else:
                        todo.pop(k, None)
                break
        else:
            v = out.get(e, 0) + c
            if v:
                out[e] = v
            else:
                out.pop(e, None)
    return LaurentPoly(ring, out, check=False)


def _apply(der: Derivation, f: LaurentPoly, q: Optional[str] = None) -> LaurentPoly:
    acc = f.euler(q) if q is not None and q in f.ring else f.ring.zero()
    for c, img in der.items():
        if img.is_zero() or c not in f.ring:
            continue
        df = f.diff(c)
        if not df.is_zero():
            acc = acc + img.to_ring(f.ring) * df
    return acc


@dataclass
class FiberModel:
    tag: str
    kind: str  # "torus" or "global"
    chart: Chart
    ring: Ring  # coordinates, q's, h's, hbar
    coords: List[str]
    weights: Dict[str, int]
    rules: List[Rule]
    relations: List[LaurentPoly]
    partials: Dict[str, Derivation]  # d/dx_k for the independent coordinates
    frame: List[Tuple[str, bool]]  # zeta_j = x_k d/dx_k if scaled else d/dx_k
    q_action: List[Derivation]  # q_i d/dq_i on the dependent coordinates
    W: LaurentPoly
    x: List[List[LaurentPoly]]
    diag_inv: List[LaurentPoly]
    density: LaurentPoly
    density_inv: LaurentPoly
    checks: List[dict] = field(default_factory=list)
    _cache: dict = field(default_factory=dict, repr=False)

    @property
    def pd(self):
        return self.chart.pd

    @property
    def d(self) -> int:
        return len(self.frame)

    @property
    def q(self) -> List[str]:
        return list(self.chart.q)

    def nf(self, f: LaurentPoly) -> LaurentPoly:
        return _reduce(f, self.rules, self._cache)

    def apply(self, der: Derivation, f: LaurentPoly, q: Optional[str] = None) -> LaurentPoly:
        """der(f) by the chain rule; ``q`` adds q d/dq on explicit coefficients."""
        return self.nf(_apply(der, f, q))

    def frame_derivation(self, j: int) -> Derivation:
        k, scaled = self.frame[j]
        base = self.partials[k]
        if not scaled:
            return base
        xk = self.ring.var(k)
        return {c: xk * img for c, img in base.items()}

    def _h_pairing(self, der: Derivation, q: Optional[str] = None) -> LaurentPoly:
        acc = self.ring.zero()
        for m, hm in enumerate(h_eps(self.ring, self.pd.rank)):
            acc = acc + hm * self.apply(der, self.x[m][m], q) * self.diag_inv[m]
        return self.nf(acc)

    def divergence(self, j: int) -> LaurentPoly:
        der = self.frame_derivation(j)
        return self.nf(self.apply(der, self.density) * self.density_inv + (1 if self.frame[j][1] else 0))

    def multiplier(self, j: int) -> LaurentPoly:
        der = self.frame_derivation(j)
        return self.nf(self.apply(der, self.W) - self._h_pairing(der))

    def q_divergence(self, i: int) -> LaurentPoly:
        return self.nf(self.apply(self.q_action[i], self.density, self.q[i]) * self.density_inv)

    def q_multiplier(self, i: int) -> LaurentPoly:
        der = self.q_action[i]
        return self.nf(self.apply(der, self.W, self.q[i]) - self._h_pairing(der, self.q[i]))


def _torus_model(chart: Chart) -> FiberModel:
    ring = Ring(list(chart.ring.names) + ["hbar"], invertible=list(chart.z) + list(chart.q))

    def up(p):
        return p.to_ring(ring)

    vol = ring.one()
    for z in chart.z:
        vol = vol * ring.var(z)
    model = FiberModel(
        tag=chart.tag, kind="torus", chart=chart, ring=ring, coords=list(chart.z),
        weights={z: 1 for z in chart.z}, rules=[], relations=[],
        partials={z: {z: ring.one()} for z in chart.z}, frame=[(z, True) for z in chart.z],
        q_action=[{} for _ in chart.q], W=up(chart.W), x=[[up(e) for e in row] for row in chart.x],
        diag_inv=[up(chart.x[m][m]).inverse() for m in range(chart.n)],
        density=vol.inverse(), density_inv=vol)
    model.checks = [{"id": f"fiber.{chart.tag}.torus", "pass": True, "detail": "dz/z frame on the torus chart"}]
    return model


def _fiber_record(tag: str) -> Optional[dict]:
    path = resources.files("mirrorflag").joinpath("charts", f"{tag}_fiber.json")
    return json.loads(path.read_text()) if path.is_file() else None


def _global_model(rec: dict, chart: Chart) -> FiberModel:
    coords = rec["coords"]
    base = Ring(coords + rec["q"], invertible=rec["invertible"] + rec["q"])
    ring = Ring(coords + rec["q"] + h_names(chart.pd.rank) + ["hbar"], invertible=rec["invertible"] + rec["q"])

    def P(terms):
        return poly_from_terms(base, terms).to_ring(ring)

    rel = P(rec["relation"]["poly"])
    lead = {c: a for c, a in zip(coords, rec["relation"]["lead"]) if a}
    lead_mono = ring.monomial(lead)
    if rel.terms.get(next(iter(lead_mono.terms))) != 1:
        raise ModelError("relation must be monic in its leading monomial")
    model = FiberModel(
        tag=rec["tag"], kind="global", chart=chart, ring=ring, coords=coords, weights=rec["weights"],
        rules=[(lead, lead_mono - rel)], relations=[rel],
        partials={k: {c: P(t) for c, t in der.items()} for k, der in rec["partials"].items()},
        frame=[(k, bool(sc)) for k, sc in rec["frame"]],
        q_action=[{c: P(t) for c, t in der.items()} for der in rec["q_action"]],
        W=P(rec["W"]), x=[[P(e) for e in row] for row in rec["x"]],
        diag_inv=[P(e) for e in rec["diag_inv"]], density=P(rec["density"]), density_inv=P(rec["density_inv"]))
    model.W = model.nf(model.W)
    model.x = [[model.nf(e) for e in row] for row in model.x]
    model.checks = verify_global_model(model, rec)
    bad = [c["id"] for c in model.checks if not c["pass"]]
    if bad:
        raise ModelError(f"fiber model {model.tag} failed verification: {bad}")
    return model


def verify_global_model(model: FiberModel, rec: dict) -> List[dict]:
    """Identities tying a global fiber model to its torus chart and the stratum."""
    chart = model.chart
    out = []

    def check(cid, ok, detail=None):
        out.append({"id": f"fiber.{model.tag}.{cid}", "pass": bool(ok), "detail": detail})

    loc = rec.get("torus_localize", [])
    lring = Ring(model.ring.names, invertible=_inv_names(model.ring) + loc)
    lbase = Ring(model.coords + rec["q"], invertible=rec["invertible"] + rec["q"] + loc)
    cache: dict = {}

    def L(p: LaurentPoly) -> LaurentPoly:
        return LaurentPoly(lring, p.terms, check=False)

    def eq(f: LaurentPoly, g: LaurentPoly) -> bool:
        """f == g in A[1/loc]: clear the localized variables, then reduce in A."""
        diff = f - g
        shift = {}
        for v in loc:
            i = lring.index(v)
            low = min((e[i] for e in diff.terms), default=0)
            if low < 0:
                shift[v] = -low
        if shift:
            diff = diff * lring.monomial(shift)
        return _reduce(diff, model.rules, cache).is_zero()

    phi = [poly_from_terms(lbase, t).to_ring(lring) for t in rec["torus_images"]]
    phi_inv = [poly_from_terms(lbase, t).to_ring(lring) for t in rec["torus_inverse_images"]]
    check("torus_images_invertible", all(eq(p * pi, lring.one()) for p, pi in zip(phi, phi_inv)))

    def pull(f: LaurentPoly) -> LaurentPoly:
        """Substitute the chart coordinates z_j -> phi_j."""
        acc = lring.zero()
        for e, c in f.terms.items():
            term = lring.const(c)
            for n, a in zip(f.ring.names, e):
                if not a:
                    continue
                if n in chart.z:
                    j = chart.z.index(n)
                    term = term * (phi[j] ** a if a > 0 else phi_inv[j] ** (-a))
                else:
                    term = term * lring.var(n) ** a
            acc = acc + term
        return acc

    check("superpotential", eq(pull(chart.W), L(model.W)))
    n = chart.n
    check("matrix", all(eq(pull(chart.x[i][j]), L(model.x[i][j])) for i in range(n) for j in range(n)))
    check("diag_inverse", all(eq(L(model.x[m][m] * model.diag_inv[m]), lring.one()) for m in range(n)))
    check("density_inverse", eq(L(model.density * model.density_inv), lring.one()))
    # omega pulled back from dz/z: det(d log phi_j / d x_k) over the independent coordinates
    indep = [k for k, _ in model.frame]
    jac = [[_reduce(_apply({c: L(v) for c, v in model.partials[k].items()}, phi[j]) * phi_inv[j], model.rules, cache)
            for k in indep] for j in range(len(phi))]
    check("density", eq(det(jac, lring.one()), L(model.density)))
    ok = all(model.apply(der, rel).is_zero() for der in model.partials.values() for rel in model.relations)
    ok &= all(model.apply(der, rel, model.q[i]).is_zero()
              for i, der in enumerate(model.q_action) for rel in model.relations)
    check("derivations_preserve_relation", ok)
    dmodel = dg.build_dual_group(chart.pd)
    t = dg.t_from_q(chart.pd, [model.ring.var(v) for v in model.q], model.ring.one())
    residuals = [name for name, r in dg.minor_equations(dmodel, model.x, t) if not model.nf(model.ring.coerce(r)).is_zero()]
    check("stratum", dg.is_upper_triangular(model.x) and not residuals, residuals or None)
    return out


def fiber_model(tag: str, torus: bool = False) -> FiberModel:
    """Fiber model of a chart case; a shipped global model wins unless ``torus``."""
    tag = CHART_ALIASES.get(tag, tag)
    key = (tag, torus)
    if key not in _MODELS:
        chart = load_chart(tag)
        rec = None if torus else _fiber_record(tag)
        _MODELS[key] = _global_model(rec, chart) if rec else _torus_model(chart)
    return _MODELS[key]


_MODELS: Dict[Tuple[str, bool], FiberModel] = {}


# --------------------------------------------------------------------------
# specialization


@dataclass
class Specialized:
    """Relation data of a model with some parameters fixed."""

    model: FiberModel
    ring: Ring
    values: Dict[str, Fraction]
    curve: Optional[str]  # remaining q variable, if any
    partials: Dict[str, Derivation]
    divs: List[LaurentPoly]
    mults: List[LaurentPoly]
    q_action: Derivation
    qdiv: Optional[LaurentPoly]
    qmult: Optional[LaurentPoly]
    rules: List[Rule]
    _cache: dict = field(default_factory=dict, repr=False)

    @property
    def coords(self) -> List[str]:
        return self.model.coords

    def nf(self, f: LaurentPoly) -> LaurentPoly:
        return _reduce(f, self.rules, self._cache)

    def _hbar(self):
        return self.ring.var("hbar") if "hbar" in self.ring else self.values["hbar"]

    def nabla(self, j: int, f: LaurentPoly) -> LaurentPoly:
        k, scaled = self.model.frame[j]
        df = _apply(self.partials[k], f)
        if scaled:
            df = df * self.ring.var(k)
        return self.nf((df + self.divs[j] * f) * self._hbar() + self.mults[j] * f)

    def D(self, f: LaurentPoly) -> LaurentPoly:
        if self.curve is None:
            raise ValueError("no q-direction left unspecialized")
        dq = _apply(self.q_action, f, self.curve)
        return self.nf((dq + self.qdiv * f) * self._hbar() + self.qmult * f)

    def monomial(self, e: Exp) -> LaurentPoly:
        return self.ring.monomial({c: a for c, a in zip(self.coords, e) if a})

    def split(self, f: LaurentPoly) -> Dict[Exp, LaurentPoly]:
        """{coordinate exponent: coefficient in the remaining parameters}."""
        idx = [f.ring.index(c) for c in self.coords]
        out: Dict[Exp, Dict] = {}
        for e, c in f.terms.items():
            key = tuple(e[i] for i in idx)
            rest = tuple(0 if i in idx else a for i, a in enumerate(e))
            out.setdefault(key, {})[rest] = c
        return {k: LaurentPoly(f.ring, v, check=False) for k, v in out.items()}

    def row(self, f: LaurentPoly) -> Dict[Exp, Fraction]:
        """Coefficient vector of f when every parameter is numeric."""
        return {k: p.constant_value() for k, p in self.split(f).items()}


def _symbolic_data(model: FiberModel) -> dict:
    data = model._cache.get("symbolic")
    if data is None:
        data = {
            "divs": [model.divergence(j) for j in range(model.d)],
            "mults": [model.multiplier(j) for j in range(model.d)],
            "qdivs": [model.q_divergence(i) for i in range(len(model.q))],
            "qmults": [model.q_multiplier(i) for i in range(len(model.q))],
        }
        model._cache["symbolic"] = data
    return data


def specialize(model: FiberModel, values: Mapping[str, object], curve_index: Optional[int] = None) -> Specialized:
    vals = {k: to_fraction(v) for k, v in values.items()}
    data = _symbolic_data(model)
    curve = model.q[curve_index - 1] if curve_index is not None else None
    if curve is not None and curve in vals:
        raise ValueError("the curve parameter must stay symbolic")
    ring = model.ring.without(vals)

    def S(p: LaurentPoly) -> LaurentPoly:
        return p.subs({k: v for k, v in vals.items() if k in p.ring}, ring)

    ci = curve_index - 1 if curve_index is not None else None
    return Specialized(
        model=model, ring=ring, values=vals, curve=curve,
        partials={k: {c: S(v) for c, v in der.items()} for k, der in model.partials.items()},
        divs=[S(p) for p in data["divs"]], mults=[S(p) for p in data["mults"]],
        q_action={c: S(v) for c, v in model.q_action[ci].items()} if ci is not None else {},
        qdiv=S(data["qdivs"][ci]) if ci is not None else None,
        qmult=S(data["qmults"][ci]) if ci is not None else None,
        rules=[(lead, S(rep)) for lead, rep in model.rules])


# --------------------------------------------------------------------------
# filtration


@dataclass(frozen=True)
class Filtration:
    """Degree function on coordinate exponents plus a coordinate bound per unit degree."""

    kind: str
    weights: Tuple[Fraction, ...] = ()
    polytope: Optional[NewtonPolytope] = None

    def __call__(self, e: Sequence[int]) -> Fraction:
        if self.polytope is not None:
            return self.polytope.degree(e)
        return sum(w * abs(a) for w, a in zip(self.weights, e))

    def bound(self, R) -> int:
        if self.polytope is not None:
            return int(R * max(abs(a) for v in self.polytope.vertices for a in v)) + 1
        return int(R / min(self.weights)) + 1


def filtration_for(model: FiberModel, W: Optional[LaurentPoly] = None) -> Filtration:
    """Newton filtration of W on torus models, coordinate weights on global ones."""
    if model.kind == "torus":
        W = W if W is not None else model.W
        idx = [W.ring.index(c) for c in model.coords]
        return Filtration("newton", polytope=newton_polytope([tuple(e[i] for i in idx) for e in W.terms]))
    return Filtration("weights", weights=tuple(Fraction(model.weights[c]) for c in model.coords))


def standard_monomials(model: FiberModel, filt: Filtration, R) -> List[Exp]:
    """Exponents of degree <= R not divisible by a leading monomial of a relation."""
    inv = set(_inv_names(model.ring))
    leads = [tuple(lead.get(c, 0) for c in model.coords) for lead, _ in model.rules]
    B = filt.bound(R)
    ranges = [range(-B, B + 1) if c in inv else range(0, B + 1) for c in model.coords]
    pts = [e for e in itertools.product(*ranges)
           if filt(e) <= R and not any(all(x >= l for x, l in zip(e, lead)) for lead in leads)]
    return sorted(pts, key=pivot_key(filt))


def pivot_key(filt: Filtration):
    return lambda a: (filt(a), sum(abs(x) for x in a), a)


def _pivots(spec: Specialized, filt: Filtration, S) -> dict:
    src = standard_monomials(spec.model, filt, S)
    rows = [spec.row(spec.nabla(j, spec.monomial(a))) for a in src for j in range(spec.model.d)]
    return sparse_echelon(rows, pivot_key(filt))


@dataclass
class BrieskornFiber:
    model: FiberModel
    values: Dict[str, Fraction]
    dimension: int
    basis: List[Exp]  # standard monomials whose classes form a basis
    radius: int  # relations come from nabla(V_radius)
    history: List[List[int]]
    pivots: dict
    filtration: Filtration
    spec: Specialized

    def reduce(self, f: Mapping[Exp, Fraction]) -> Dict[Exp, Fraction]:
        """Coordinates of the class of f in the monomial basis."""
        key = pivot_key(self.filtration)
        r = {k: v for k, v in f.items() if v}
        while True:
            hits = [p for p in r if p in self.pivots]
            if not hits:
                break
            p = max(hits, key=key)
            c = r[p]
            for k, v in self.pivots[p].items():
                nv = r.get(k, 0) - c * v
                if nv:
                    r[k] = nv
                else:
                    r.pop(k, None)
        if any(k not in self.basis for k in r):
            raise NotFinite("element lies outside the filtered range")
        return r


def fiber_at(model: FiberModel, values: Mapping[str, object], max_radius: int = 7) -> BrieskornFiber:
    """Fiber of the Brieskorn lattice at a rational point with hbar != 0.

    With pivots taken from nabla(V_S), counts the standard monomials of V_R that
    are not pivots, for every R <= S.  The count is accepted once
    c_S(S-1) = c_S(S-2) = c_{S-1}(S-2).
    """
    vals = {k: to_fraction(v) for k, v in values.items()}
    if vals.get("hbar", 0) == 0:
        raise ValueError("hbar must be nonzero; hbar = 0 is the Jacobi algebra")
    if any(vals[q] == 0 for q in model.q):
        raise NotFinite("q = 0 lies outside Z(L^vee)")
    spec = specialize(model, vals)
    filt = filtration_for(model)
    hist: List[List[int]] = []
    prev = None
    for S in range(1, max_radius + 1):
        piv = _pivots(spec, filt, S)
        counts = [sum(1 for a in standard_monomials(model, filt, R) if a not in piv) for R in range(S + 1)]
        hist.append(counts)
        cur = counts[S - 1]
        if S >= 3 and counts[S - 2] == cur and prev == cur:
            basis = [a for a in standard_monomials(model, filt, S - 1) if a not in piv]
            return BrieskornFiber(model, vals, cur, basis, S, hist, piv, filt, spec)
        prev = counts[S - 2] if S >= 2 else None
    raise NotFinite(f"not finite at this point: class counts {hist[-1]} did not stabilize")


def point_values(model: FiberModel, hbar, h, q) -> Dict[str, Fraction]:
    vals = {"hbar": to_fraction(hbar)}
    vals.update({n: to_fraction(v) for n, v in zip(h_names(model.pd.rank), list(h)[:model.pd.rank])})
    vals.update({n: to_fraction(v) for n, v in zip(model.q, q)})
    return vals


def brieskorn_fiber(model, hbar, h, q, max_radius: int = 7) -> BrieskornFiber:
    if not isinstance(model, FiberModel):
        model = fiber_model(model if isinstance(model, str) else model.tag)
    return fiber_at(model, point_values(model, hbar, h, q), max_radius)


def scaling_check(model: FiberModel, hbar, h, q, c) -> Tuple[int, int]:
    """(dim at (hbar, h, q), dim at (c hbar, c h, q))."""
    c = to_fraction(c)
    a = brieskorn_fiber(model, hbar, h, q).dimension
    b = brieskorn_fiber(model, c * to_fraction(hbar), [c * to_fraction(v) for v in h], q).dimension
    return a, b


# --------------------------------------------------------------------------
# hbar = 0


def degenerate_presentation(model: FiberModel) -> Tuple[Ring, List[LaurentPoly], List[LaurentPoly], LaurentPoly]:
    """(ring, relations, J_i, W) of the hbar = 0 limit of the model."""
    data = _symbolic_data(model)
    ring = model.ring.without(["hbar"])
    gens = [p.to_ring(ring) for p in data["mults"]] + [r.to_ring(ring) for r in model.relations]
    return ring, gens, [p.to_ring(ring) for p in data["qmults"]], model.W.to_ring(ring)


def degeneration_check(model: FiberModel) -> bool:
    """At hbar = 0 the torus relations are the route-A generators verbatim."""
    if model.kind != "torus":
        raise ModelError("verbatim degeneration applies to torus models; use degenerate_jacobi_report")
    ring, gens, J, _ = degenerate_presentation(model)
    pres = jacobi_ideal(model.chart)
    return ([g.to_ring(pres.ideal.ring) for g in gens] == list(pres.ideal.generators)
            and [j.to_ring(pres.ideal.ring) for j in J] == list(pres.J))


def degenerate_jacobi_report(model: FiberModel, h: Sequence, q: Sequence) -> dict:
    """Dimension and characteristic polynomials of the hbar = 0 algebra at a point."""
    ring, gens, J, W = degenerate_presentation(model)
    vals = {n: to_fraction(v) for n, v in zip(h_names(model.pd.rank), list(h)[:model.pd.rank])}
    vals.update({n: to_fraction(v) for n, v in zip(model.q, q)})
    ideal = Ideal(ring, gens).specialize(vals)
    qr = quotient_basis(groebner_basis(ideal))
    return {
        "dimension": qr.dimension,
        "J_char_polys": [char_poly(mult_matrix(qr, j.subs(vals, qr.ring))) for j in J],
        "W_char_poly": char_poly(mult_matrix(qr, W.subs(vals, qr.ring))),
    }


# --------------------------------------------------------------------------
# symbolic Gauss-Manin connection


@dataclass
class SymbolicSetup:
    spec: Specialized
    symbols: list  # curve q, hbar, then the symbolic h's
    field: object
    symbolic_h: bool

    @property
    def model(self) -> FiberModel:
        return self.spec.model

    def coeff(self, p: LaurentPoly):
        expr = sympy.Integer(0)
        for e, c in p.terms.items():
            term = sympy.Rational(c.numerator, c.denominator)
            for n, a in zip(p.ring.names, e):
                if a:
                    term = term * sympy.Symbol(n) ** a
            expr += term
        return self.field.from_sympy(expr)


def symbolic_setup(model: FiberModel, curve_index: int = 1, fixed_q: Optional[Mapping[int, object]] = None,
                   h: Optional[Sequence] = None) -> SymbolicSetup:
    fixed_q = dict(fixed_q or {})
    missing = [j for j in range(1, len(model.q) + 1) if j != curve_index and j not in fixed_q]
    if missing:
        raise ValueError(f"q-parameters {missing} must be fixed along the curve")
    vals: Dict[str, object] = {model.q[j - 1]: v for j, v in fixed_q.items()}
    hn = h_names(model.pd.rank)
    if h is not None:
        vals.update(dict(zip(hn, list(h)[:model.pd.rank])))
    spec = specialize(model, vals, curve_index)
    syms = [sympy.Symbol(model.q[curve_index - 1]), sympy.Symbol("hbar")]
    if h is None:
        syms += [sympy.Symbol(n) for n in hn]
    return SymbolicSetup(spec, syms, sympy.QQ.frac_field(*syms), h is None)


def _generic_values(setup: SymbolicSetup, seed: int) -> Dict[str, Fraction]:
    rng = random.Random(seed)
    vals = dict(setup.spec.values)
    for s in setup.symbols:
        vals[str(s)] = Fraction(rng.choice([a for a in range(-20, 21) if a]))
    return vals


def _stable_basis(setup: SymbolicSetup, seeds=(7, 11)) -> BrieskornFiber:
    fibers = [fiber_at(setup.model, _generic_values(setup, s)) for s in seeds]
    if len({f.dimension for f in fibers}) != 1:
        raise BasisUnstable(f"fiber dimension jumps between sample points: {[f.dimension for f in fibers]}")
    if any(sorted(f.basis) != sorted(fibers[0].basis) for f in fibers[1:]):
        raise BasisUnstable("the monomial basis differs between sample points")
    return fibers[0]


def _solve_classes(setup: SymbolicSetup, targets: Sequence[LaurentPoly], basis: Sequence[Exp], S: int,
                   filt: Filtration):
    """Solve target_t = sum_b X[b][t] x^b + sum_j nabla_j(f_jt) with f_jt in V_S.

    Returns X over the rational function field, or None if inconsistent.
    """
    K = setup.field
    spec = setup.spec
    cols: List[Dict[Exp, object]] = []
    for a in standard_monomials(setup.model, filt, S):
        m = spec.monomial(a)
        for j in range(setup.model.d):
            cols.append({e: setup.coeff(p) for e, p in spec.split(spec.nabla(j, m)).items()})
    nrel = len(cols)
    cols += [{b: K.one} for b in basis]
    rhs = [{e: setup.coeff(p) for e, p in spec.split(t).items()} for t in targets]
    rows = sorted(set().union(*[set(c) for c in cols + rhs]), key=pivot_key(filt), reverse=True)
    ridx = {m: i for i, m in enumerate(rows)}
    ncols = len(cols) + len(rhs)
    data = [[K.zero] * ncols for _ in rows]
    for ci, col in enumerate(cols + rhs):
        for m, v in col.items():
            data[ridx[m]][ci] = v
    rref, pivots = DomainMatrix(data, (len(rows), ncols), K).rref()
    pivots = list(pivots)
    if any(p >= len(cols) for p in pivots):
        return None
    if not set(range(nrel, len(cols))) <= set(pivots):
        raise BasisUnstable("the chosen monomials are dependent modulo the relations")
    R = rref.to_list()
    X = [[K.zero] * len(targets) for _ in basis]
    for r, p in enumerate(pivots):
        if p >= nrel:
            for t in range(len(targets)):
                X[p - nrel][t] = R[r][len(cols) + t]
    return X


@dataclass
class GaussManinMatrix:
    """Column b holds the class of D x^{basis_b}; ``unit`` is the class of 1."""

    setup: SymbolicSetup
    basis: List[Exp]
    matrix: list
    unit: list
    radius: int

    def text(self) -> List[List[str]]:
        K = self.setup.field
        return [[str(K.to_sympy(x)) for x in row] for row in self.matrix]

    def evaluate(self, values: Mapping[str, object]) -> List[List[Fraction]]:
        K = self.setup.field
        sub = {sympy.Symbol(k): sympy.Rational(str(to_fraction(v))) for k, v in values.items()}
        out = []
        for row in self.matrix:
            r = []
            for x in row:
                num, den = sympy.fraction(sympy.cancel(K.to_sympy(x)))
                dv = den.subs(sub)
                if dv == 0:
                    raise ZeroDivisionError("entry is singular at this point")
                val = sympy.Rational(num.subs(sub)) / sympy.Rational(dv)
                r.append(Fraction(int(val.p), int(val.q)))
            out.append(r)
        return out


def gauss_manin(model: FiberModel, curve_index: int = 1, fixed_q: Optional[Mapping[int, object]] = None,
                h: Optional[Sequence] = None, max_radius: int = 7) -> GaussManinMatrix:
    setup = symbolic_setup(model, curve_index, fixed_q, h)
    fib = _stable_basis(setup)
    basis = sorted(fib.basis, key=pivot_key(fib.filtration))
    spec = setup.spec
    targets = [spec.D(spec.monomial(b)) for b in basis] + [spec.ring.one()]
    for S in range(fib.radius, max_radius + 1):
        X = _solve_classes(setup, targets, basis, S, fib.filtration)
        if X is not None:
            N = len(basis)
            return GaussManinMatrix(setup, basis, [row[:N] for row in X], [row[N] for row in X], S)
    raise BasisUnstable("the Gauss-Manin reduction did not close within the radius bound")


def _to_ode(setup: SymbolicSetup, coeffs: Sequence) -> ODEOperator:
    """Clear denominators of the monic operator [c_0..c_{N-1}, 1] into the ODE ring."""
    K = setup.field
    exprs = [sympy.cancel(K.to_sympy(c)) for c in coeffs] + [sympy.Integer(1)]
    den = sympy.Integer(1)
    for ex in exprs:
        den = sympy.lcm(den, sympy.fraction(ex)[1])
    ring = ode_ring(setup.model.pd.rank, setup.symbolic_h)
    q = sympy.Symbol("q")
    gens = [q] + setup.symbols[1:]
    out = []
    for ex in exprs:
        num = sympy.expand(sympy.cancel(ex * den).subs(setup.symbols[0], q))
        terms = {}
        if num != 0:
            for mon, c in sympy.Poly(num, *gens).terms():
                e = [0] * ring.nvars
                for g, a in zip(gens, mon):
                    e[ring.index(str(g))] = a
                terms[tuple(e)] = Fraction(int(c.p), int(c.q))
        out.append(LaurentPoly(ring, terms))
    return ODEOperator(ring, out)


def ode_from_gauss_manin(gm: GaussManinMatrix) -> ODEOperator:
    """Cyclic ODE of the unit class: v_{k+1} = hbar q dv_k/dq + M v_k until dependent."""
    setup = gm.setup
    K = setup.field
    q, hbar = setup.symbols[0], setup.symbols[1]
    N = len(gm.basis)
    M = DomainMatrix(gm.matrix, (N, N), K)

    def step(v):
        dv = [K.from_sympy(sympy.cancel(hbar * q * sympy.diff(K.to_sympy(c), q))) for c in v]
        Mv = M * DomainMatrix([[c] for c in v], (N, 1), K)
        return [a + b[0] for a, b in zip(dv, Mv.to_list())]

    vecs = [list(gm.unit)]
    for _ in range(N):
        vecs.append(step(vecs[-1]))
        V = DomainMatrix([[vecs[j][a] for j in range(len(vecs))] for a in range(N)], (N, len(vecs)), K)
        if V.rank() < len(vecs):
            k = len(vecs) - 1
            A = DomainMatrix([[vecs[j][a] for j in range(k)] for a in range(N)], (N, k), K)
            b = DomainMatrix([[-vecs[k][a]] for a in range(N)], (N, 1), K)
            aug, piv = A.hstack(b).rref()
            if k in piv:
                raise NoDependence("unit class is not cyclic")
            sol = [K.zero] * k
            rows = aug.to_list()
            for r, p in enumerate(piv):
                sol[p] = rows[r][k]
            return _to_ode(setup, sol)
    raise NoDependence("no dependence within the fiber dimension")


def bside_cyclic_ode(model: FiberModel, curve_index: int = 1, fixed_q: Optional[Mapping[int, object]] = None,
                     h: Optional[Sequence] = None) -> ODEOperator:
    """Cyclic ODE of the class of omega along a q-line of the base."""
    return ode_from_gauss_manin(gauss_manin(model, curve_index, fixed_q, h))


def semiclassical_char_poly(gm: GaussManinMatrix, values: Mapping[str, object]) -> List[Fraction]:
    """Characteristic polynomial of the Gauss-Manin matrix at hbar = 0."""
    return char_poly(gm.evaluate({**values, "hbar": 0}))
