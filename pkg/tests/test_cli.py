import csv
import json
import math

import pytest

from fermiphon import cli
from fermiphon.bogoliubov import solve_closed_form
from fermiphon.correlators import exponents
from fermiphon.focklab.space import FockSpace

FREE_INI = """\
[model]
v_f = 1.0
v_p = 0.3
lambda = 0.0
g = 0.0
a = 0.01
L = 100.0
omega0 = 0.1

[grid]
K = 2
"""

GENERIC_INI = """\
[model]
v_f = 1.0
v_p = 0.3
lambda = 1.0
g = 0.2
a = 0.05
L = 20.0

[grid]
K = 8

[correlator]
ell = 1.0
regulator = 0.001
insertions = +:-:0:0 ; +:+:0:0
x_min = 0.5
x_max = 5.0
points = 5
t = 0.0

[scan]
lambda_min = -5.0
lambda_max = 7.0
n_lambda = 13
g_min = 0.0
g_max = 0.0
n_g = 1
"""

UNSTABLE_INI = """\
[model]
v_f = 1.0
v_p = 0.3
lambda = 6.2831853071795865
g = 0.0
a = 0.01
L = 100.0
"""


@pytest.fixture
def config_file(tmp_path):
    def write(text, name="run.ini"):
        path = tmp_path / name
        path.write_text(text)
        return str(path)
    return write


def run_cli(args):
    return cli.main(args)


def test_solve_free_trivial_exponents(config_file, tmp_path, capsys):
    cfg = config_file(FREE_INI)
    out = str(tmp_path / "sol.json")
    assert run_cli(["--config", cfg, "--output", out, "solve"]) == 0
    doc = json.loads(open(out).read())
    assert doc["exponents"]["delta_cdw"] == 1.0
    assert doc["exponents"]["delta_sc"] == 1.0
    assert doc["solution"]["vtilde_f"] == 1.0


def test_solve_unstable_exit_2(config_file, capsys):
    cfg = config_file(UNSTABLE_INI)
    assert run_cli(["--config", cfg, "solve"]) == 2
    err = capsys.readouterr().err
    assert "lambda < 2 pi v_f" in err


def test_solve_round_trip(config_file, tmp_path):
    cfg = config_file(GENERIC_INI)
    out = str(tmp_path / "sol.json")
    assert run_cli(["--config", cfg, "--output", out, "solve"]) == 0
    doc = json.loads(open(out).read())
    params = cli.load_config(cfg).model
    sol = solve_closed_form(params)
    tab = exponents(sol)
    assert doc["solution"]["vtilde_f"] == sol.vtilde_f
    assert doc["solution"]["sigma_p"] == sol.sigma_p
    assert doc["exponents"]["delta_sc"] == tab.delta_sc


def test_solve_deterministic(config_file, tmp_path):
    cfg = config_file(GENERIC_INI)
    o1, o2 = str(tmp_path / "a.json"), str(tmp_path / "b.json")
    run_cli(["--config", cfg, "--output", o1, "solve"])
    run_cli(["--config", cfg, "--output", o2, "solve"])
    assert open(o1, "rb").read() == open(o2, "rb").read()


def test_verify_k2(config_file, tmp_path):
    cfg = config_file(FREE_INI)
    out = str(tmp_path / "verify.json")
    assert run_cli(["--config", cfg, "--output", out, "verify"]) == 0
    reports = json.loads(open(out).read())
    names = {r["identity"] for r in reports}
    assert {"CAR", "SCHWINGER", "KRONIG", "DEGENERACY", "JACOBI",
            "RECONSTRUCTION"} <= names
    assert all(r["pass"] for r in reports)
    # fock-lab residuals are exact rationals, serialized as strings
    assert all(r["residual"] == "0" for r in reports
               if r["identity"] not in ("JACOBI",))


def test_verify_k1_smaller_window(config_file, tmp_path):
    cfg = config_file(FREE_INI.replace("K = 2", "K = 1"))
    out = str(tmp_path / "verify.json")
    assert run_cli(["--config", cfg, "--output", out, "verify"]) == 0
    reports = json.loads(open(out).read())
    assert all(r["pass"] for r in reports)
    assert any(r["window"] == "0" for r in reports)


def test_verify_corrupted_sign_fails(config_file, tmp_path, monkeypatch):
    orig_c = FockSpace.create_sign
    orig_a = FockSpace.annihilate_sign
    monkeypatch.setattr(
        FockSpace, "create_sign",
        lambda self, m, p: (lambda t: (t[0], abs(t[1])))(orig_c(self, m, p)))
    monkeypatch.setattr(
        FockSpace, "annihilate_sign",
        lambda self, m, p: (lambda t: (t[0], abs(t[1])))(orig_a(self, m, p)))
    cfg = config_file(FREE_INI)
    out = str(tmp_path / "verify.json")
    assert run_cli(["--config", cfg, "--output", out, "verify"]) == 1
    reports = json.loads(open(out).read())
    car = next(r for r in reports if r["identity"] == "CAR")
    assert not car["pass"]
    assert car["worst_pair"] is not None


def test_verify_k_guard(config_file):
    cfg = config_file(FREE_INI.replace("K = 2", "K = 6"))
    assert run_cli(["--config", cfg, "verify"]) == 2


def test_spectrum_first_row_vacuum(config_file, tmp_path):
    cfg = config_file(GENERIC_INI)
    out = str(tmp_path / "spec.csv")
    assert run_cli(["--config", cfg, "--output", out, "spectrum",
                    "--e-max", "0.6"]) == 0
    rows = list(csv.DictReader(open(out)))
    assert rows[0]["q_plus"] == "0" and rows[0]["q_minus"] == "0"
    assert rows[0]["modes"] == ""
    energies = [float(r["energy"]) for r in rows]
    assert energies == sorted(energies)
    params = cli.load_config(cfg).model
    assert math.isclose(energies[0], solve_closed_form(params).e0,
                        rel_tol=1e-15)


def test_spectrum_grid_too_small(config_file):
    cfg = config_file(GENERIC_INI.replace("K = 8", "K = 1"))
    assert run_cli(["--config", cfg, "spectrum", "--e-max", "0.6"]) == 2


def test_correlate_two_point_decay(config_file, tmp_path):
    cfg = config_file(GENERIC_INI.replace("lambda = 1.0", "lambda = 0.0")
                      .replace("g = 0.2", "g = 0.0"))
    out = str(tmp_path / "corr.csv")
    assert run_cli(["--config", cfg, "--output", out, "correlate",
                    "--mode", "continuum"]) == 0
    rows = list(csv.DictReader(open(out)))
    assert len(rows) == 5
    # free 2-point: |G| = 1 / (2 pi |x|) within regulator smearing
    for row in rows:
        x = float(row["x"])
        assert math.isclose(float(row["abs"]), 1.0 / (2 * math.pi * x),
                            rel_tol=1e-4)


def test_correlate_selection_violation_warns(config_file, tmp_path, capsys):
    cfg = config_file(GENERIC_INI.replace(
        "insertions = +:-:0:0 ; +:+:0:0", "insertions = +:-:0:0"))
    out = str(tmp_path / "corr.csv")
    assert run_cli(["--config", cfg, "--output", out, "correlate"]) == 0
    err = capsys.readouterr().err
    assert "selection" in err
    rows = list(csv.DictReader(open(out)))
    assert all(float(r["abs"]) == 0.0 for r in rows)


def test_correlate_finite_vs_continuum_trend(config_file, tmp_path):
    # at matched parameters the two modes differ by the multiplicative
    # renormalization; the ratio |finite / continuum| tracks
    # (Z (2 pi ell / L)^{-sigma^2})^2 from z_renorm
    from fermiphon.vertex import z_renorm
    cfg = config_file(GENERIC_INI)
    run = cli.load_config(cfg)
    out_f = str(tmp_path / "f.csv")
    out_c = str(tmp_path / "c.csv")
    assert run_cli(["--config", cfg, "--output", out_f, "correlate",
                    "--mode", "finite"]) == 0
    assert run_cli(["--config", cfg, "--output", out_c, "correlate",
                    "--mode", "continuum"]) == 0
    rows_f = list(csv.DictReader(open(out_f)))
    rows_c = list(csv.DictReader(open(out_c)))
    sol = solve_closed_form(run.model)
    ssum = sol.sigma_f**2 + sol.sigma_p**2
    z = z_renorm(run.model, sol, run.regulator)["Z"]
    factor = (z * (2 * math.pi * run.ell / run.model.L) ** (-ssum)) ** 2
    for rf, rc in zip(rows_f[:2], rows_c[:2]):
        ratio = float(rf["abs"]) / float(rc["abs"])
        assert abs(ratio / factor - 1.0) < 0.05


def test_scan_rows(config_file, tmp_path):
    cfg = config_file(GENERIC_INI)
    out = str(tmp_path / "scan.csv")
    assert run_cli(["--config", cfg, "--output", out, "scan"]) == 0
    rows = list(csv.DictReader(open(out)))
    assert len(rows) == 13
    assert any(r["stable"] == "0" for r in rows)
    for row in rows:
        lam = float(row["lambda"])
        if row["stable"] == "0":
            assert lam >= 2 * math.pi  # beyond the stability boundary
            continue
        g1 = float(row["gamma1"])
        vtf = float(row["vtilde_f"])
        # g = 0 rows: Delta_CDW * Delta_SC = 1, vtilde_f = v_f sqrt(1 - g1^2)
        assert abs(float(row["delta_cdw"]) * float(row["delta_sc"]) - 1.0) \
            < 1e-12
        assert abs(vtf - math.sqrt(1.0 - g1 * g1)) < 1e-12
    # monotonicity of vtilde_f in |gamma1| at g = 0
    stable = [(abs(float(r["gamma1"])), float(r["vtilde_f"]))
              for r in rows if r["stable"] == "1"]
    stable.sort()
    for (g1a, va), (g1b, vb) in zip(stable, stable[1:]):
        if g1b > g1a:
            assert vb < va


def test_scan_threads_deterministic(config_file, tmp_path, monkeypatch):
    cfg = config_file(GENERIC_INI)
    out1 = str(tmp_path / "s1.csv")
    out2 = str(tmp_path / "s2.csv")
    run_cli(["--config", cfg, "--output", out1, "scan"])
    monkeypatch.setenv("THREADS", "4")
    run_cli(["--config", cfg, "--output", out2, "scan"])
    assert open(out1, "rb").read() == open(out2, "rb").read()


def test_json_format_option(config_file, tmp_path):
    cfg = config_file(GENERIC_INI)
    out = str(tmp_path / "scan.json")
    assert run_cli(["--config", cfg, "--output", out, "--format", "json",
                    "scan"]) == 0
    doc = json.loads(open(out).read())
    assert isinstance(doc, list) and doc[0]["stable"] in ("0", "1")


def test_invalid_config_exit_2(tmp_path):
    path = tmp_path / "bad.ini"
    path.write_text("[model]\nv_f = -1.0\nv_p = 0.3\nlambda = 0\ng = 0\n"
                    "a = 0.01\nL = 10\n")
    assert cli.main(["--config", str(path), "solve"]) == 2
    assert cli.main(["--config", str(tmp_path / "missing.ini"), "solve"]) == 2
