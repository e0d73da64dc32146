"""Verification runs, configuration files, reports and the command line."""

from __future__ import annotations

import argparse
import configparser
import contextlib
import io
import json
import os
import platform
import random
import sys
import time
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple

from . import __version__
from . import brieskorn as bk
from . import dualgroup as dg
from . import lgjacobi as lg
from . import quantum as qu
from .rootdata import Unsupported, build_root_system, case_label, parabolic_data, parse_levi
from .symalg import BUDGET_ENV, LaurentPoly, NotZeroDimensional, SymAlgError, char_poly, upoly_str

ANCHORS = {
    "conventions": "representative convention self-test",
    "oracle": "Chevalley rule validation",
    "dimension": "dim Jac = |W^P|",
    "stability": "Jacobi dimension stable under specialization",
    "routes": "chart Jacobi ring vs centralizer ring",
    "mirror": "semi-classical limit: c_1 action vs Jacobi element",
    "rescaling": "grading compatibility of char polys",
    "gauge": "superpotential independent of the factorization",
    "negative_control": "perturbed convention must be detected",
    "flatness": "flatness of the quantum connection",
    "ode": "cyclic ODE of the unit class vs the class of omega",
    "ode_consistency": "rational h specialization of the symbolic ODE",
    "brieskorn": "finite rank of the Brieskorn lattice",
    "gauss_manin": "Gauss-Manin connection at hbar = 0",
    "fiber_model": "fiber model identities",
}

SIDE_CHECKS = ("semiclassical", "dmodule")


class ConfigError(ValueError):
    pass


# --------------------------------------------------------------------------
# configuration


@dataclass(frozen=True)
class CaseSpec:
    name: str
    cartan_type: str
    rank: int
    levi: Tuple[int, ...]
    chart: str = ""

    def parabolic(self):
        return parabolic_data(build_root_system(self.cartan_type, self.rank), self.levi)


DEFAULT_CASES = (
    CaseSpec("P1", "A", 1, (), "P1"),
    CaseSpec("SL2_B", "A", 1, (), "SL2_B"),
    CaseSpec("P2", "A", 2, (2,), "P2"),
    CaseSpec("SL3_B", "A", 2, (), "SL3_B"),
)

_RUN_KEYS = {
    "seeds": "comma separated integers",
    "samples": "specializations drawn per seed",
    "gauge_points": "random stratum points for the gauge check",
    "scaling_factors": "random c per case for Brieskorn scaling",
    "h_samples": "rational h samples when h is not kept symbolic",
    "symbolic_h": "keep h symbolic in cyclic ODEs (yes/no)",
    "checks": "semiclassical, dmodule",
    "perturb": "rescale the top extremal minor in route B (negative control); empty for none",
    "step_budget": "Groebner step budget; empty for the default",
    "output": "report path stem; empty for none",
}
_CASE_KEYS = ("type", "rank", "levi", "chart")


@dataclass
class VerificationConfig:
    cases: List[CaseSpec] = field(default_factory=lambda: list(DEFAULT_CASES))
    seeds: List[int] = field(default_factory=lambda: [1, 2, 3])
    samples: int = 2
    gauge_points: int = 100
    scaling_factors: int = 3
    h_samples: int = 3
    symbolic_h: bool = True
    checks: Tuple[str, ...] = SIDE_CHECKS
    perturb: Optional[Fraction] = None
    step_budget: Optional[int] = None
    output: str = ""

    def __post_init__(self):
        bad = [c for c in self.checks if c not in SIDE_CHECKS]
        if bad:
            raise ConfigError(f"unknown check families {bad}")
        if self.samples < 1 or not self.seeds:
            raise ConfigError("need at least one seed and one sample")
        names = [c.name for c in self.cases]
        if len(set(names)) != len(names):
            raise ConfigError("duplicate case names")

    def to_text(self) -> str:
        cp = configparser.ConfigParser(interpolation=None)
        cp["run"] = {
            "seeds": ", ".join(map(str, self.seeds)),
            "samples": str(self.samples),
            "gauge_points": str(self.gauge_points),
            "scaling_factors": str(self.scaling_factors),
            "h_samples": str(self.h_samples),
            "symbolic_h": "yes" if self.symbolic_h else "no",
            "checks": ", ".join(self.checks),
            "perturb": "" if self.perturb is None else str(self.perturb),
            "step_budget": "" if self.step_budget is None else str(self.step_budget),
            "output": self.output,
        }
        for c in self.cases:
            cp[f"case {c.name}"] = {"type": c.cartan_type, "rank": str(c.rank),
                                    "levi": ", ".join(map(str, c.levi)), "chart": c.chart}
        buf = io.StringIO()
        cp.write(buf)
        return buf.getvalue()

    @classmethod
    def from_text(cls, text: str) -> "VerificationConfig":
        cp = configparser.ConfigParser(interpolation=None)
        try:
            cp.read_string(text)
        except configparser.Error as exc:
            raise ConfigError(str(exc)) from exc
        kwargs: Dict[str, object] = {}
        cases = []
        for section in cp.sections():
            items = dict(cp[section])
            if section == "run":
                unknown = set(items) - set(_RUN_KEYS)
                if unknown:
                    raise ConfigError(f"unknown keys in [run]: {sorted(unknown)}")
                kwargs.update(_parse_run(items))
            elif section.startswith("case "):
                unknown = set(items) - set(_CASE_KEYS)
                if unknown:
                    raise ConfigError(f"unknown keys in [{section}]: {sorted(unknown)}")
                try:
                    cases.append(CaseSpec(section[5:].strip(), items.get("type", "A"), int(items["rank"]),
                                          tuple(sorted(parse_levi(items.get("levi", "")))), items.get("chart", "")))
                except (KeyError, ValueError) as exc:
                    raise ConfigError(f"bad case section [{section}]: {exc}") from exc
            else:
                raise ConfigError(f"unknown section [{section}]")
        if cases:
            kwargs["cases"] = cases
        return cls(**kwargs)

    @classmethod
    def load(cls, path) -> "VerificationConfig":
        return cls.from_text(Path(path).read_text())


def _parse_run(items: Dict[str, str]) -> Dict[str, object]:
    out: Dict[str, object] = {}
    try:
        if "seeds" in items:
            out["seeds"] = [int(s) for s in items["seeds"].replace(" ", "").split(",") if s]
        for k in ("samples", "gauge_points", "scaling_factors", "h_samples"):
            if k in items:
                out[k] = int(items[k])
        if "symbolic_h" in items:
            v = items["symbolic_h"].strip().lower()
            if v not in ("yes", "no"):
                raise ValueError("symbolic_h must be yes or no")
            out["symbolic_h"] = v == "yes"
        if "checks" in items:
            out["checks"] = tuple(s for s in items["checks"].replace(" ", "").split(",") if s)
        if items.get("perturb", "").strip():
            out["perturb"] = Fraction(items["perturb"].strip())
        if items.get("step_budget", "").strip():
            out["step_budget"] = int(items["step_budget"])
        if "output" in items:
            out["output"] = items["output"].strip()
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    return out


# --------------------------------------------------------------------------
# report


def to_jsonable(x):
    if isinstance(x, bool) or x is None or isinstance(x, str):
        return x
    if isinstance(x, int):
        return x
    if isinstance(x, Fraction):
        return f"{x.numerator}/{x.denominator}"
    if isinstance(x, LaurentPoly):
        return x.to_json()
    if isinstance(x, qu.ODEOperator):
        return x.to_json()
    if isinstance(x, dict):
        return {str(k): to_jsonable(v) for k, v in sorted(x.items(), key=lambda kv: str(kv[0]))}
    if isinstance(x, (list, tuple)):
        return [to_jsonable(v) for v in x]
    return str(x)


@dataclass
class CheckRecord:
    id: str
    anchor: str
    inputs: dict
    expected: object
    computed: object
    passed: bool
    wall: float = 0.0

    @property
    def status(self) -> str:
        return "PASS" if self.passed else "FAIL"

    def to_json(self) -> dict:
        return {"id": self.id, "anchor": self.anchor, "inputs": to_jsonable(self.inputs),
                "expected": to_jsonable(self.expected), "computed": to_jsonable(self.computed),
                "status": self.status}


@dataclass
class VerificationReport:
    records: List[CheckRecord] = field(default_factory=list)
    conventions: Dict[str, str] = field(default_factory=dict)
    rejections: List[dict] = field(default_factory=list)

    def add(self, rec: CheckRecord):
        self.records.append(rec)

    def extend(self, other: "VerificationReport"):
        self.records.extend(other.records)
        self.conventions.update(other.conventions)
        self.rejections.extend(other.rejections)

    def sorted_records(self) -> List[CheckRecord]:
        return sorted(self.records, key=lambda r: r.id)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.records)

    def counts(self) -> Tuple[int, int]:
        p = sum(r.passed for r in self.records)
        return p, len(self.records) - p

    def failures(self) -> List[CheckRecord]:
        return [r for r in self.sorted_records() if not r.passed]

    def to_json(self) -> dict:
        return {
            "format": 1,
            "tool_versions": tool_versions(),
            "conventions": to_jsonable(self.conventions),
            "rejections": to_jsonable(self.rejections),
            "summary": dict(zip(("pass", "fail"), self.counts())),
            "records": [r.to_json() for r in self.sorted_records()],
        }

    def json_text(self) -> str:
        return json.dumps(self.to_json(), indent=1, sort_keys=True) + "\n"

    def text(self) -> str:
        lines = ["=== conventions ==="]
        lines += [f"{k}: {v}" for k, v in sorted(self.conventions.items())]
        if self.rejections:
            lines.append("=== rejected specializations ===")
            lines += [json.dumps(to_jsonable(r), sort_keys=True) for r in self.rejections]
        lines.append("=== checks ===")
        for r in self.sorted_records():
            lines.append(f"{r.status}  {r.id}  [{r.anchor}]  {r.wall:.3f}s")
            if not r.passed:
                lines.append(f"      inputs:   {json.dumps(to_jsonable(r.inputs), sort_keys=True)}")
                lines.append(f"      expected: {json.dumps(to_jsonable(r.expected), sort_keys=True)}")
                lines.append(f"      computed: {json.dumps(to_jsonable(r.computed), sort_keys=True)}")
        p, f = self.counts()
        lines.append("=== summary ===")
        lines.append(f"{p} PASS, {f} FAIL")
        return "\n".join(lines) + "\n"

    def write(self, stem) -> List[Path]:
        stem = Path(stem)
        if stem.suffix in (".txt", ".json"):
            stem = stem.with_suffix("")
        stem.parent.mkdir(parents=True, exist_ok=True)
        txt, js = stem.with_suffix(".txt"), stem.with_suffix(".json")
        txt.write_text(self.text())
        js.write_text(self.json_text())
        return [txt, js]


def tool_versions() -> Dict[str, str]:
    import sympy

    return {"mirrorflag": __version__, "python": platform.python_version(), "sympy": sympy.__version__}


class _Recorder:
    """Times a check body and files the record."""

    def __init__(self, report: VerificationReport):
        self.report = report

    def run(self, cid: str, inputs: dict, body: Callable[[], Tuple[object, object, bool]]) -> CheckRecord:
        family = cid.split(".", 1)[0]
        t0 = time.perf_counter()
        try:
            expected, computed, ok = body()
        except (SymAlgError, ArithmeticError, ValueError, RuntimeError) as exc:
            expected, computed, ok = "no error", f"{type(exc).__name__}: {exc}", False
        rec = CheckRecord(cid, ANCHORS.get(family, family), inputs, expected, computed, bool(ok),
                          time.perf_counter() - t0)
        self.report.add(rec)
        return rec

    def flag(self, cid: str, inputs: dict, ok: bool, detail=None) -> CheckRecord:
        return self.run(cid, inputs, lambda: (True, detail if detail is not None else ok, ok))


@contextlib.contextmanager
def budget_env(budget: Optional[int]):
    if budget is None:
        yield
        return
    old = os.environ.get(BUDGET_ENV)
    os.environ[BUDGET_ENV] = str(budget)
    try:
        yield
    finally:
        if old is None:
            os.environ.pop(BUDGET_ENV, None)
        else:
            os.environ[BUDGET_ENV] = old


# --------------------------------------------------------------------------
# specializations


def _nonzero(rng: random.Random, report: Optional[VerificationReport], what: str, case: str) -> Fraction:
    while True:
        v = rng.randint(-20, 20)
        if v:
            return Fraction(v)
        if report is not None:
            report.rejections.append({"case": case, "reason": f"{what} = 0 lies outside the torus"})


def specializations(case: CaseSpec, config: VerificationConfig,
                    report: Optional[VerificationReport] = None,
                    accept: Optional[Callable[[list, list], None]] = None) -> List[Tuple[list, list]]:
    """Seeded (h, q) samples, integers in [-20, 20]; the very first has h = 0.

    ``accept`` may raise NotZeroDimensional (or a stratum error) to reject a
    draw; rejections are logged in the report.
    """
    pd = case.parabolic()
    out = []
    for seed in config.seeds:
        rng = random.Random(f"{case.name}:{seed}")
        drawn = 0
        while drawn < config.samples:
            zero_h = not out
            h = [Fraction(0)] * pd.rank if zero_h else [Fraction(rng.randint(-20, 20)) for _ in range(pd.rank)]
            q = [_nonzero(rng, report, f"q{i + 1}", case.name) for i in range(pd.k)]
            if accept is not None:
                try:
                    accept(h, q)
                except (NotZeroDimensional, dg.NotInStratum, ZeroDivisionError) as exc:
                    if report is not None:
                        report.rejections.append({"case": case.name, "h": h, "q": q, "reason": str(exc)})
                    continue
            out.append((h, q))
            drawn += 1
    return out


# --------------------------------------------------------------------------
# semi-classical verification


def _case_inputs(case: CaseSpec, **extra) -> dict:
    d = {"case": case.name, "type": case.cartan_type, "rank": case.rank, "levi": list(case.levi)}
    d.update(extra)
    return d


def gauge_records(case: CaseSpec, model: dg.DualGroupModel, points: int, rec: _Recorder, seed: int = 0):
    def body():
        rng = random.Random(f"{case.name}:gauge:{seed}")
        bad = []
        for k in range(points):
            x, f = dg.random_stratum_point(model, rng)
            W0 = dg.superpotential(model, x)
            g = dg.gauge_move(model, f, dg.random_gauge(model, rng))
            if dg.recompose(model, g) != x or dg.superpotential_from(g) != W0 or dg.superpotential_from(f) != W0:
                bad.append(k)
        return points, points - len(bad), not bad

    rec.run(f"gauge.{case.name}", _case_inputs(case, points=points, seed=seed), body)


def verify_semiclassical(config: VerificationConfig) -> VerificationReport:
    report = VerificationReport()
    rec = _Recorder(report)
    with budget_env(config.step_budget):
        for case in config.cases:
            _semiclassical_case(case, config, report, rec)
    return report


def _semiclassical_case(case: CaseSpec, config: VerificationConfig, report: VerificationReport, rec: _Recorder):
    pd = case.parabolic()
    N = len(pd.minimal_reps)
    model = dg.build_dual_group(pd)
    report.conventions[case.name] = model.convention
    for r in model.self_test:
        rec.flag(f"conventions.{case.name}.{r['id']}", _case_inputs(case), r["pass"], r["detail"])
    qh = qu.build_qh_model(pd, validate=False)
    for r in qu.chevalley_oracle(qh):
        rec.flag(f"oracle.{case.name}.{r['id'].removeprefix('oracle.')}", _case_inputs(case), r["pass"], r["detail"])
    B = lg.centralizer_ideal(pd, model, perturb=config.perturb)
    tag = case.chart or lg.chart_for(pd)
    A = lg.jacobi_ideal(lg.load_chart(tag)) if tag else None
    reports: Dict[int, dict] = {}

    def accept(h, q):
        lg.specialize(B, h, q)

    specs = specializations(case, config, report, accept)
    dims = []
    for k, (h, q) in enumerate(specs):
        inputs = _case_inputs(case, h=h, q=q)
        rb = lg.jacobi_report(B, h, q)
        reports[k] = rb
        dims.append(rb["dimension"])
        rec.run(f"dimension.{case.name}.B.s{k}", inputs, lambda: (N, rb["dimension"], rb["dimension"] == N))
        ra = None
        if A is not None:
            ra = lg.jacobi_report(A, h, q)
            rec.run(f"dimension.{case.name}.A.s{k}", inputs, lambda: (N, ra["dimension"], ra["dimension"] == N))
            rec.run(f"routes.{case.name}.s{k}", inputs, lambda: (
                {"dimension": ra["dimension"], "J": ra["J_char_polys"], "W": ra["W_char_poly"]},
                {"dimension": rb["dimension"], "J": rb["J_char_polys"], "W": rb["W_char_poly"]},
                ra["dimension"] == rb["dimension"] and ra["J_char_polys"] == rb["J_char_polys"]
                and ra["W_char_poly"] == rb["W_char_poly"]))
        for i in range(1, pd.k + 1):
            def body(i=i, ra=ra):
                want = qu.char_poly_at(qh, i, h, q)
                got = rb["J_char_polys"][i - 1]
                ok = want == got and (ra is None or ra["J_char_polys"][i - 1] == want)
                return upoly_str(want), upoly_str(got), ok
            rec.run(f"mirror.{case.name}.D{i}.s{k}", inputs, body)
        if not any(h):
            def body_c1(ra=ra):
                want = char_poly(qu.first_chern_matrix(qh, h, q))
                got = rb["W_char_poly"]
                ok = want == got and (ra is None or ra["W_char_poly"] == want)
                return upoly_str(want), upoly_str(got), ok
            rec.run(f"mirror.{case.name}.c1.s{k}", inputs, body_c1)
    rec.run(f"stability.{case.name}", _case_inputs(case, samples=len(specs)),
            lambda: ([N], sorted(set(dims)), set(dims) == {N}))
    h, q = next(((h, q) for h, q in specs if any(h)), specs[0])
    s = Fraction(random.Random(f"{case.name}:rescale").choice([2, 3, 5, -2, -3]))

    def rescaling():
        ok = lg.graded_rescaling_check(B, h, q, s)
        return True, ok, ok
    rec.run(f"rescaling.{case.name}", _case_inputs(case, h=h, q=q, s=s), rescaling)
    gauge_records(case, model, config.gauge_points, rec)
    if config.perturb is None:
        def neg():
            Bp = lg.centralizer_ideal(pd, model, perturb=Fraction(2))
            try:
                rp = lg.jacobi_report(Bp, h, q)
            except NotZeroDimensional as exc:
                return "mismatch", f"not zero-dimensional: {exc}", True
            same = rp["dimension"] == N and all(
                rp["J_char_polys"][i - 1] == qu.char_poly_at(qh, i, h, q) for i in range(1, pd.k + 1))
            return "mismatch", "match" if same else "mismatch", not same
        rec.run(f"negative_control.{case.name}", _case_inputs(case, h=h, q=q, perturb="2"), neg)


# --------------------------------------------------------------------------
# D-module verification


def _ode_curves(pd, rng: random.Random) -> List[Tuple[int, Dict[int, Fraction]]]:
    out = []
    for i in range(1, pd.k + 1):
        fixed = {j: _nonzero(rng, None, "", "") for j in range(1, pd.k + 1) if j != i}
        out.append((i, fixed))
    return out


def verify_dmodule(config: VerificationConfig) -> VerificationReport:
    report = VerificationReport()
    rec = _Recorder(report)
    with budget_env(config.step_budget):
        for case in config.cases:
            pd = case.parabolic()
            qh = qu.build_qh_model(pd, validate=False)
            for r in qu.flatness_check(qh):
                rec.flag(f"flatness.{case.name}.{r['id'].removeprefix('flatness.')}", _case_inputs(case), r["pass"],
                     r["detail"])
            tag = case.chart or lg.chart_for(pd)
            if tag:
                _dmodule_case(case, config, tag, qh, report, rec)
    return report


def _dmodule_case(case: CaseSpec, config: VerificationConfig, tag: str, qh: qu.QHModel,
                  report: VerificationReport, rec: _Recorder):
    pd = qh.pd
    N = len(pd.minimal_reps)
    fm = bk.fiber_model(tag)
    for c in fm.checks:
        rec.flag(f"fiber_model.{case.name}.{c['id'].split('.', 2)[-1]}", _case_inputs(case), c["pass"], c["detail"])
    rng = random.Random(f"{case.name}:dmodule")
    zero = [0] * pd.rank
    for i, fixed in _ode_curves(pd, rng):
        where = f"q{i}"
        inputs = _case_inputs(case, curve=i, fixed_q=fixed)
        rec.run(f"ode.{case.name}.{where}.h0", {**inputs, "h": zero}, lambda i=i, fixed=fixed: _ode_pair(
            fm, qh, i, fixed, zero))
        if config.symbolic_h and i == 1:
            sym = rec.run(f"ode.{case.name}.{where}.hsym", {**inputs, "h": "symbolic"},
                          lambda fixed=fixed: _ode_pair(fm, qh, 1, fixed, None))
            if sym.passed:
                hs = [Fraction(rng.randint(-20, 20)) for _ in range(pd.rank)]

                def consistency(fixed=fixed, hs=hs):
                    B = bk.bside_cyclic_ode(fm, 1, fixed, hs)
                    Bsym = bk.bside_cyclic_ode(fm, 1, fixed, None)
                    spec = Bsym.specialize({n: v for n, v in zip(qu.h_names(pd.rank), hs)})
                    return str(spec), str(B), spec.equivalent(B)
                rec.run(f"ode_consistency.{case.name}.{where}", {**inputs, "h": hs}, consistency)
        elif i == 1:
            for k in range(config.h_samples):
                hs = [Fraction(rng.randint(-20, 20)) for _ in range(pd.rank)]
                rec.run(f"ode.{case.name}.{where}.h{k + 1}", {**inputs, "h": hs},
                        lambda fixed=fixed, hs=hs: _ode_pair(fm, qh, 1, fixed, hs))
    specs = specializations(case, config, report)
    for k, (h, q) in enumerate(specs):
        hbar = _nonzero(rng, report, "hbar", case.name)
        inputs = _case_inputs(case, hbar=hbar, h=h, q=q)

        def dim(hbar=hbar, h=h, q=q):
            d = bk.brieskorn_fiber(fm, hbar, h, q).dimension
            return N, d, d == N
        rec.run(f"brieskorn.dimension.{case.name}.s{k}", inputs, dim)
    h, q = next(((h, q) for h, q in specs if any(h)), specs[0])
    hbar = _nonzero(rng, report, "hbar", case.name)
    for j in range(config.scaling_factors):
        c = Fraction(_nonzero(rng, report, "c", case.name), rng.randint(1, 5))

        def scaling(c=c):
            a, b = bk.scaling_check(fm, hbar, h, q, c)
            return [a, a], [a, b], a == b
        rec.run(f"brieskorn.scaling.{case.name}.c{j}", _case_inputs(case, hbar=hbar, h=h, q=q, c=c), scaling)
    A = lg.jacobi_ideal(fm.chart)
    if fm.kind == "torus":
        def degen():
            ok = bk.degeneration_check(fm)
            return True, ok, ok
        rec.run(f"brieskorn.degeneration.{case.name}", _case_inputs(case), degen)
    else:
        def degen():
            ra = lg.jacobi_report(A, h, q)
            rd = bk.degenerate_jacobi_report(fm, h, q)
            want = {"dimension": ra["dimension"], "J": ra["J_char_polys"], "W": ra["W_char_poly"]}
            got = {"dimension": rd["dimension"], "J": rd["J_char_polys"], "W": rd["W_char_poly"]}
            return want, got, want == got
        rec.run(f"brieskorn.degeneration.{case.name}", _case_inputs(case, h=h, q=q), degen)

    def gm_limit():
        fixed = {j: q[j - 1] for j in range(2, pd.k + 1)}
        gm = bk.gauss_manin(fm, 1, fixed, h)
        got = bk.semiclassical_char_poly(gm, {fm.q[0]: q[0]})
        want = lg.jacobi_report(A, h, q)["J_char_polys"][0]
        return upoly_str(want), upoly_str(got), want == got
    rec.run(f"gauss_manin.{case.name}.hbar0", _case_inputs(case, h=h, q=q), gm_limit)


def _ode_pair(fm: bk.FiberModel, qh: qu.QHModel, i: int, fixed, h):
    A = qu.aside_cyclic_ode(qh, i, fixed, h)
    B = bk.bside_cyclic_ode(fm, i, fixed, h)
    return str(A), str(B), A.equivalent(B)


def verify_all(config: VerificationConfig) -> VerificationReport:
    report = VerificationReport()
    if "semiclassical" in config.checks:
        report.extend(verify_semiclassical(config))
    if "dmodule" in config.checks:
        report.extend(verify_dmodule(config))
    return report


# --------------------------------------------------------------------------
# command line


def _seeds(text: str) -> List[int]:
    try:
        seeds = [int(s) for s in text.replace(" ", "").split(",") if s]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad seed list {text!r}") from None
    if not seeds:
        raise argparse.ArgumentTypeError("empty seed list")
    return seeds


def _fractions(text: str) -> List[Fraction]:
    try:
        return [Fraction(s) for s in text.replace(" ", "").split(",") if s]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad rational list {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="mirrorflag", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)
    for name, help_ in [("roots", "root system and parabolic data"),
                        ("qh", "equivariant quantum Chevalley matrices"),
                        ("lg", "dual group model and superpotential"),
                        ("jacobi", "Jacobi algebras at sampled specializations"),
                        ("brieskorn", "Brieskorn lattice fibers and the cyclic ODE"),
                        ("verify", "run the verification suite")]:
        s = sub.add_parser(name, help=help_)
        s.add_argument("--type", default="A")
        s.add_argument("--rank", type=int)
        s.add_argument("--levi", default="")
        s.add_argument("--seeds", type=_seeds, default=None)
        s.add_argument("--out", default=None, help="write report (.txt, .json) and figures with this path stem")
        s.add_argument("--config", default=None, help="verification config file")
        if name in ("jacobi", "brieskorn"):
            s.add_argument("--h", type=_fractions, default=None, help="comma separated h values")
            s.add_argument("--q", type=_fractions, default=None, help="comma separated q values")
        if name == "brieskorn":
            s.add_argument("--hbar", type=Fraction, default=Fraction(1))
            s.add_argument("--ode", action="store_true", help="also compute the cyclic ODE at h = 0")
    return p


class UsageError(Exception):
    pass


def _case_from_args(args) -> CaseSpec:
    if args.rank is None:
        raise UsageError("--rank is required without --config")
    try:
        levi = tuple(sorted(parse_levi(args.levi)))
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    spec = CaseSpec(f"{args.type}{args.rank}[{','.join(map(str, levi))}]", args.type, args.rank, levi)
    pd = spec.parabolic()
    tag = lg.chart_for(pd)
    return CaseSpec(tag or case_label(pd), args.type, args.rank, levi, tag or "")


def _config_from_args(args) -> VerificationConfig:
    if args.config:
        cfg = VerificationConfig.load(args.config)
        if args.rank is not None:
            cfg.cases = [_case_from_args(args)]
    else:
        cfg = VerificationConfig(cases=[_case_from_args(args)])
    if args.seeds:
        cfg.seeds = args.seeds
    if args.out:
        cfg.output = args.out
    return cfg


def _section(title: str) -> str:
    return f"=== {title} ==="


def _cmd_roots(args, out) -> int:
    case = _case_from_args(args)
    pd = case.parabolic()
    print(_section(f"roots {case_label(pd)}"), file=out)
    print(f"positive roots: {len(pd.rs.positive_roots)}", file=out)
    print(f"Levi subset: {sorted(pd.levi_subset)}", file=out)
    print(f"quantum parameters: {', '.join(qu.q_names(pd))} at simple indices {list(pd.q_simple_indices)}", file=out)
    print(f"|W^P| = {len(pd.minimal_reps)}", file=out)
    print(f"w_P = {pd.w_P}  w_P w_0 = {pd.w_P_w_0} (length {pd.w_P_w_0.length})", file=out)
    print(_section("minimal coset representatives"), file=out)
    for w in pd.minimal_reps:
        print(f"{w}  length {w.length}", file=out)
    return 0


def _cmd_qh(args, out) -> int:
    case = _case_from_args(args)
    pd = case.parabolic()
    qh = qu.build_qh_model(pd)
    print(_section(f"quantum cohomology {case_label(pd)}"), file=out)
    print(f"basis: {', '.join(str(w) for w in qh.basis)}", file=out)
    for i, M in enumerate(qh.D, start=1):
        print(_section(f"D_{i}"), file=out)
        for row in M:
            print("  [" + ", ".join(str(x) for x in row) + "]", file=out)
        print(f"char poly: {upoly_str(char_poly(M, qh.ring.one()))}", file=out)
    return 0


def _cmd_lg(args, out) -> int:
    case = _case_from_args(args)
    pd = case.parabolic()
    model = dg.build_dual_group(pd)
    print(_section(f"dual group model {case_label(pd)}"), file=out)
    print(f"convention: {model.convention}", file=out)
    print(f"w_P w_0 = {pd.w_P_w_0}, lift rows: {model.wdot}", file=out)
    for r in model.self_test:
        print(f"{'PASS' if r['pass'] else 'FAIL'}  {r['id']}", file=out)
    mm = dg.mirror_map(pd)
    print(f"mirror map exponents: {mm.exponent_matrix}", file=out)
    if case.chart:
        chart = lg.load_chart(case.chart)
        print(_section(f"chart {chart.tag}"), file=out)
        print(f"W = {chart.W}", file=out)
        for c in chart.checks:
            print(f"{'PASS' if c['pass'] else 'FAIL'}  {c['id']}", file=out)
    return 0 if all(r["pass"] for r in model.self_test) else 1


def _point_args(args, pd, cfg) -> List[Tuple[list, list]]:
    if args.h is not None or args.q is not None:
        h = args.h if args.h is not None else [Fraction(0)] * pd.rank
        q = args.q if args.q is not None else [Fraction(1)] * pd.k
        if len(h) != pd.rank or len(q) != pd.k:
            raise UsageError(f"need {pd.rank} h values and {pd.k} q values")
        return [(h, q)]
    return specializations(cfg.cases[0], cfg)


def _cmd_jacobi(args, out) -> int:
    cfg = _config_from_args(args)
    case = cfg.cases[0]
    pd = case.parabolic()
    N = len(pd.minimal_reps)
    pres = [lg.centralizer_ideal(pd)]
    if case.chart:
        pres.insert(0, lg.jacobi_ideal(lg.load_chart(case.chart)))
    ok = True
    for h, q in _point_args(args, pd, cfg):
        print(_section(f"{case.name} h={_fmt(h)} q={_fmt(q)}"), file=out)
        for p in pres:
            r = lg.jacobi_report(p, h, q)
            ok &= r["dimension"] == N
            print(f"{r['route']}: dim {r['dimension']} (|W^P| = {N})", file=out)
            for i, cp in enumerate(r["J_char_polys"], start=1):
                print(f"  J_{i}: {upoly_str(cp)}", file=out)
            print(f"  W: {upoly_str(r['W_char_poly'])}", file=out)
    return 0 if ok else 1


def _cmd_brieskorn(args, out) -> int:
    cfg = _config_from_args(args)
    case = cfg.cases[0]
    if not case.chart:
        raise UsageError(f"no chart for {case.name}; Brieskorn computations need a chart case")
    pd = case.parabolic()
    N = len(pd.minimal_reps)
    fm = bk.fiber_model(case.chart)
    print(_section(f"Brieskorn lattice {case.name} ({fm.kind} fiber model)"), file=out)
    ok = True
    histories = []
    for h, q in _point_args(args, pd, cfg):
        f = bk.brieskorn_fiber(fm, args.hbar, h, q)
        ok &= f.dimension == N
        histories.append((f"h={_fmt(h)} q={_fmt(q)}", f.history[-1]))
        print(f"hbar={args.hbar} h={_fmt(h)} q={_fmt(q)}: dim {f.dimension} (|W^P| = {N}), "
              f"class counts {f.history[-1]}", file=out)
    if args.ode:
        fixed = {j: Fraction(1) for j in range(2, pd.k + 1)}
        B = bk.bside_cyclic_ode(fm, 1, fixed, [0] * pd.rank)
        A = qu.aside_cyclic_ode(qu.build_qh_model(pd), 1, fixed, [0] * pd.rank)
        print(_section("cyclic ODE along q1 at h = 0"), file=out)
        print(f"B-side: {B}", file=out)
        print(f"A-side: {A}", file=out)
        ok &= A.equivalent(B)
    if args.out:
        from .plotting import plot_filtration

        path = plot_filtration(histories, N, Path(args.out).with_suffix("").as_posix() + "_filtration.png")
        print(f"figure: {path}", file=out)
    return 0 if ok else 1


def _cmd_verify(args, out) -> int:
    cfg = _config_from_args(args)
    report = verify_all(cfg)
    out.write(report.text())
    if cfg.output:
        from .plotting import plot_report

        paths = report.write(cfg.output)
        paths.append(plot_report(report, Path(cfg.output).with_suffix("").as_posix() + "_checks.png"))
        for p in paths:
            print(f"wrote {p}", file=out)
    return 0 if report.passed else 1


def _fmt(v: Iterable[Fraction]) -> str:
    return "(" + ",".join(str(x) for x in v) + ")"


COMMANDS = {"roots": _cmd_roots, "qh": _cmd_qh, "lg": _cmd_lg, "jacobi": _cmd_jacobi,
            "brieskorn": _cmd_brieskorn, "verify": _cmd_verify}


def cli_main(argv: Optional[Sequence[str]] = None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return COMMANDS[args.command](args, out)
    except Unsupported as exc:
        print(f"unsupported: {exc}", file=sys.stderr)
        return 2
    except (UsageError, ConfigError, IndexError) as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(cli_main())
