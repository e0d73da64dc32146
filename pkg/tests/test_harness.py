import io
import json
import os
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from mirrorflag import harness as hs
from mirrorflag.symalg import BUDGET_ENV


def small_config(**kw):
    base = dict(cases=[hs.DEFAULT_CASES[0]], seeds=[1], samples=1, gauge_points=5,
                scaling_factors=1, checks=("semiclassical",))
    base.update(kw)
    return hs.VerificationConfig(**base)


@given(seeds=st.lists(st.integers(-50, 50), min_size=1, max_size=4), samples=st.integers(1, 5),
       symbolic=st.booleans(), perturb=st.none() | st.fractions(min_value=-5, max_value=5),
       checks=st.sampled_from([("semiclassical",), ("dmodule",), hs.SIDE_CHECKS]))
def test_config_roundtrip(seeds, samples, symbolic, perturb, checks):
    cfg = hs.VerificationConfig(seeds=seeds, samples=samples, symbolic_h=symbolic, perturb=perturb, checks=checks)
    assert hs.VerificationConfig.from_text(cfg.to_text()) == cfg


@pytest.mark.parametrize("text", [
    "[run]\nseeds = 1\nbogus = 3\n",
    "[runs]\nseeds = 1\n",
    "[case X]\ntype = A\nrank = 1\ncolor = red\n",
    "[case X]\ntype = A\n",
    "[run]\nsymbolic_h = maybe\n",
    "[run]\nchecks = everything\n",
    "[run]\nseeds = \n",
    "not an ini file",
])
def test_config_rejects(text):
    with pytest.raises(hs.ConfigError):
        hs.VerificationConfig.from_text(text)


def test_config_case_section():
    cfg = hs.VerificationConfig.from_text("[case F3]\ntype = A\nrank = 3\nlevi = 3, 2\n")
    assert cfg.cases == [hs.CaseSpec("F3", "A", 3, (2, 3), "")]


def test_fractions_serialize_as_ratio():
    assert hs.to_jsonable({"a": Fraction(3), "b": [Fraction(-1, 2)]}) == {"a": "3/1", "b": ["-1/2"]}


def test_specializations_are_seeded():
    cfg = small_config(seeds=[1, 2], samples=3)
    case = hs.DEFAULT_CASES[3]
    a = hs.specializations(case, cfg)
    assert a == hs.specializations(case, cfg)
    assert a[0][0] == [0, 0]
    assert all(v != 0 and -20 <= v <= 20 for _, q in a for v in q)


def test_report_deterministic():
    r1, r2 = hs.verify_all(small_config()), hs.verify_all(small_config())
    assert r1.passed and r1.counts()[0] > 10
    assert r1.json_text() == r2.json_text()
    assert "wall" not in r1.json_text()
    rec = json.loads(r1.json_text())["records"]
    assert [r["id"] for r in rec] == sorted(r["id"] for r in rec)
    assert any(r["id"].startswith("negative_control.") and r["status"] == "PASS" for r in rec)


def test_perturbed_run_fails():
    r = hs.verify_all(small_config(perturb=Fraction(2)))
    assert not r.passed
    assert any(f.id.startswith("mirror.") for f in r.failures())


def test_recorder_turns_errors_into_failures():
    rep = hs.VerificationReport()

    def boom():
        raise ZeroDivisionError("x")
    rec = hs._Recorder(rep).run("routes.X", {}, boom)
    assert not rec.passed and "ZeroDivisionError" in rec.computed
    assert "FAIL  routes.X" in rep.text()


def test_budget_env():
    before = os.environ.get(BUDGET_ENV)
    with hs.budget_env(123):
        assert os.environ[BUDGET_ENV] == "123"
    assert os.environ.get(BUDGET_ENV) == before


def run(argv):
    out = io.StringIO()
    return hs.cli_main(argv, out), out.getvalue()


def test_cli_verify_writes_report_and_figure(tmp_path):
    cfg = tmp_path / "c.ini"
    cfg.write_text(small_config().to_text())
    stem = tmp_path / "rep"
    code, text = run(["verify", "--config", str(cfg), "--out", str(stem)])
    assert code == 0
    assert "=== summary ===" in text
    for suffix in (".txt", ".json", "_checks.png"):
        assert (tmp_path / f"rep{suffix}").stat().st_size > 0


def test_cli_brieskorn(tmp_path):
    code, text = run(["brieskorn", "--type", "A", "--rank", "2", "--levi", "2", "--h", "0,0", "--q", "1",
                      "--ode", "--out", str(tmp_path / "b")])
    assert code == 0
    assert "dim 3" in text and "B-side: D^3 - q" in text
    assert (tmp_path / "b_filtration.png").exists()


@pytest.mark.parametrize("cmd", ["roots", "qh", "lg", "jacobi"])
def test_cli_commands(cmd):
    code, text = run([cmd, "--type", "A", "--rank", "2", "--levi", "2", "--seeds", "1"])
    assert code == 0 and text.startswith("===")


@pytest.mark.parametrize("argv", [
    ["verify", "--type", "D", "--rank", "4"],
    ["verify", "--type", "A", "--rank", "5"],
    ["verify", "--type", "A"],
    ["frobnicate"],
    ["jacobi", "--type", "A", "--rank", "1", "--seeds", "x"],
    ["brieskorn", "--type", "A", "--rank", "3"],
])
def test_cli_usage_errors(argv, capsys):
    assert run(argv)[0] == 2
