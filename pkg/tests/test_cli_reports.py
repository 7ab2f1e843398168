import json
import subprocess
import sys

import numpy as np
import pytest

from gaugeflow import cli_reports as cli
from gaugeflow import grid_fields as gf
from gaugeflow import sigma_gauge as sg

ORDER_LO, ORDER_HI = 1.7, 2.3


def run_cli(*argv):
    return cli.main(list(argv))


def read_report(path):
    with open(path) as fh:
        return json.load(fh)


def body_of(report):
    out = dict(report)
    out.pop("timing")
    return json.dumps(out, sort_keys=True)


def test_verify_liouville_reference_invocation(tmp_path):
    out = tmp_path / "rep.json"
    rc = run_cli("verify", "liouville", "--map", "z", "--n", "129",
                 "--out", str(out))
    assert rc == 0
    rep = read_report(out)
    assert rep["schema"] == 1
    assert rep["verdict"] == "pass"
    assert rep["constants"] == "paper"
    assert rep["grid"]["n"] == [129, 129]
    assert rep["grid"]["n_fine"] == [257, 257]
    for row in rep["residuals"].values():
        assert row["pass"]
        assert ORDER_LO <= row["order"] <= ORDER_HI
    assert isinstance(rep["timing"]["wall_s"], float)


def test_verify_zs_curvature_analytic(tmp_path, capsys):
    rc = run_cli("verify", "zs-curvature", "--q", "planewave",
                 "--a", "1", "--k", "0")
    assert rc == 0
    rep = json.loads(capsys.readouterr().out)
    assert rep["verdict"] == "pass"
    for row in rep["residuals"].values():
        assert row["kind"] == "exact"
        assert row["linf"] <= 1e-10
        assert "order" not in row
    assert "n_fine" not in rep["grid"]


def test_verify_scenarios_all_pass(tmp_path):
    for name in ("hyp-liouville", "spin-from-nls", "sdym"):
        out = tmp_path / f"{name}.json"
        assert run_cli("verify", name, "--out", str(out)) == 0
        assert read_report(out)["verdict"] == "pass"


def test_verify_unknown_scenario_exits_2(capsys):
    assert run_cli("verify", "no-such-scenario") == 2
    assert "unknown scenario" in capsys.readouterr().err


def test_verify_unknown_map_exits_2(capsys):
    assert run_cli("verify", "liouville", "--map", "w") == 2
    assert "unknown map" in capsys.readouterr().err


def test_flag_outside_scenario_scope_exits_2(capsys):
    assert run_cli("verify", "liouville", "--eta", "3") == 2
    assert "does not apply" in capsys.readouterr().err


def test_grid_flag_conflicts_exit_2(capsys):
    assert run_cli("verify", "liouville", "--n", "33", "--h", "0.1") == 2
    assert run_cli("verify", "liouville", "--domain", "0,1,2") == 2
    assert run_cli("verify", "liouville", "--domain", "1,0,0,1") == 2
    capsys.readouterr()


def test_report_bytes_reproducible(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for path in (a, b):
        assert run_cli("verify", "hyp-liouville", "--map", "z+i", "--n", "33",
                       "--out", str(path)) == 0
    ra, rb = read_report(a), read_report(b)
    assert body_of(ra) == body_of(rb)
    # wall time is the single excluded field
    assert set(ra) == set(rb)


def test_backlund_constants_conventions(tmp_path):
    out = tmp_path / "cal.json"
    assert run_cli("verify", "backlund-soliton", "--n", "33",
                   "--out", str(out)) == 0
    rep = read_report(out)
    assert rep["constants"] == "calibrated"
    assert rep["residuals"]["pair_relation"]["linf"] < 1e-12

    out2 = tmp_path / "paper.json"
    assert run_cli("verify", "backlund-soliton", "--n", "33",
                   "--constants", "paper", "--out", str(out2)) == 1
    rep2 = read_report(out2)
    assert rep2["constants"] == "paper"
    assert rep2["verdict"] == "fail"
    # printed constants break the amplitude lock of the sech pair
    assert not rep2["residuals"]["pair_relation"]["pass"]
    assert rep2["residuals"]["pair_relation"]["linf"] > 1.0


def test_shg_relax_seed_env(tmp_path, monkeypatch):
    paths = [tmp_path / f"s{i}.json" for i in range(3)]
    monkeypatch.setenv("GAUGEFLOW_SEED", "1")
    assert run_cli("verify", "shg-relax", "--out", str(paths[0])) == 0
    assert run_cli("verify", "shg-relax", "--out", str(paths[1])) == 0
    monkeypatch.setenv("GAUGEFLOW_SEED", "2")
    assert run_cli("verify", "shg-relax", "--out", str(paths[2])) == 0
    r = [read_report(p) for p in paths]
    assert body_of(r[0]) == body_of(r[1])
    assert body_of(r[0]) != body_of(r[2])
    assert all(rep["verdict"] == "pass" for rep in r)


def test_verify_csv_format(tmp_path):
    out = tmp_path / "rep.csv"
    assert run_cli("verify", "zs-curvature", "--format", "csv",
                   "--out", str(out)) == 0
    lines = out.read_text().strip().splitlines()
    assert lines[0] == "name,linf,l2,linf_fine,l2_fine,order,tol,kind,pass"
    rows = {ln.split(",")[0]: ln.split(",") for ln in lines[1:]}
    assert set(rows) == {"curvature", "nls"}
    assert all(r[-1] == "true" for r in rows.values())


def test_generate_families_deterministic(tmp_path):
    for family in sorted(cli.FAMILIES):
        # transport needs a finer march than the scalar dumps
        n = "33" if family == "spin-from-nls" else "17"
        a = tmp_path / f"{family}-a.csv"
        b = tmp_path / f"{family}-b.csv"
        for path in (a, b):
            assert run_cli("generate", family, "--n", n,
                           "--out", str(path)) == 0
        assert a.read_bytes() == b.read_bytes()
        side = json.loads((tmp_path / f"{family}-a.csv.json").read_text())
        assert side["schema"] == 1
        assert side["family"] == family
        assert side["version"].startswith("v0.1.")
        assert side["params"]


def test_generate_boost_at_rest_matches_planewave(tmp_path):
    plain = tmp_path / "pw.csv"
    boosted = tmp_path / "b0.csv"
    assert run_cli("generate", "nls-planewave", "--out", str(plain)) == 0
    assert run_cli("generate", "nls-boosted", "--v", "0",
                   "--out", str(boosted)) == 0
    assert plain.read_bytes() == boosted.read_bytes()


def test_generate_bad_input_exits_2(tmp_path, capsys):
    assert run_cli("generate", "no-such-family",
                   "--out", str(tmp_path / "x.csv")) == 2
    assert run_cli("generate", "liouville") == 2
    # frame transport refuses grids too coarse for the march
    assert run_cli("generate", "spin-from-nls", "--n", "17",
                   "--out", str(tmp_path / "coarse.csv")) == 2
    assert "step size too coarse" in capsys.readouterr().err


def test_generate_backlund_records_convention(tmp_path):
    out = tmp_path / "bk.csv"
    assert run_cli("generate", "backlund-soliton", "--n", "17",
                   "--constants", "calibrated", "--out", str(out)) == 0
    side = json.loads((tmp_path / "bk.csv.json").read_text())
    assert side["params"]["constants"] == "calibrated"
    _, fields = gf.load_csv(out)
    assert {"Qp_re", "Qp_im", "Qm_re", "Qm_im", "c2", "branch"} <= set(fields)


def test_convert_spin_gauge_round_trip(tmp_path, capsys):
    spin = tmp_path / "spin.csv"
    assert run_cli("generate", "spin-from-nls", "--n", "65",
                   "--out", str(spin)) == 0
    gauge = tmp_path / "gauge.csv"
    assert run_cli("convert", "spin-gauge", str(spin),
                   "--out", str(gauge)) == 0
    rep = json.loads(capsys.readouterr().out)
    assert rep["schema"] == 1
    assert rep["residuals"]["reconstruction"] < 1e-10
    back = tmp_path / "spin2.csv"
    assert run_cli("convert", "gauge-spin", str(gauge),
                   "--out", str(back)) == 0
    rep2 = json.loads(capsys.readouterr().out)
    assert rep2["residuals"]["transport_drift"] < 1e-6
    _, f1 = gf.load_csv(spin)
    _, f2 = gf.load_csv(back)
    for name in ("S1", "S2", "S3", "t1", "t2", "t3"):
        assert np.abs(f1[name] - f2[name]).max() < 2.5e-2


def test_convert_nls_round_trip(tmp_path, capsys):
    src = tmp_path / "q.csv"
    assert run_cli("generate", "nls-planewave", "--n", "65", "--k", "0.5",
                   "--out", str(src)) == 0
    spin = tmp_path / "qs.csv"
    assert run_cli("convert", "nls-spin", str(src), "--out", str(spin)) == 0
    back = tmp_path / "q2.csv"
    assert run_cli("convert", "spin-nls", str(spin), "--out", str(back)) == 0
    capsys.readouterr()
    grid, fa = gf.load_csv(src)
    _, fb = gf.load_csv(back)
    Qa = fa["Q_re"] + 1j * fa["Q_im"]
    Qb = fb["Q_re"] + 1j * fb["Q_im"]
    bi, bj = grid.base_index
    phase = Qa[bi, bj] / Qb[bi, bj]
    phase /= abs(phase)
    assert np.abs(phase * Qb - Qa).max() < 5e-2


def test_convert_schema_mismatch_exits_2(tmp_path, capsys):
    src = tmp_path / "q.csv"
    assert run_cli("generate", "nls-planewave", "--out", str(src)) == 0
    assert run_cli("convert", "spin-gauge", str(src),
                   "--out", str(tmp_path / "x.csv")) == 2
    assert "lacks columns" in capsys.readouterr().err
    assert run_cli("convert", "no-such-kind", str(src),
                   "--out", str(tmp_path / "y.csv")) == 2
    capsys.readouterr()


def spin_dump_of_map(path, rmap, n, lim):
    grid = gf.square_grid(n, -lim, lim)
    sf = sg.frames_of_map(rmap, grid)
    cols = {}
    for i in range(3):
        cols[f"S{i + 1}"] = sf.S[..., i]
        cols[f"t{i + 1}"] = sf.t[..., i]
    gf.dump_csv(path, grid, cols)


def test_charge_degree_two(tmp_path, capsys):
    path = tmp_path / "deg2.csv"
    spin_dump_of_map(path, sg.RationalMap([0, 0, 1]), 129, 12.0)
    assert run_cli("charge", str(path)) == 0
    q = float(capsys.readouterr().out)
    assert abs(q - 4.0) / 4.0 < 0.02


def test_charge_constant_field_is_zero(tmp_path, capsys):
    grid = gf.square_grid(17, -1.0, 1.0)
    S = np.zeros(grid.shape + (3,))
    S[..., 2] = 1.0
    gf.dump_csv(tmp_path / "c.csv", grid,
                {"S1": S[..., 0], "S2": S[..., 1], "S3": S[..., 2]})
    assert run_cli("charge", str(tmp_path / "c.csv")) == 0
    assert float(capsys.readouterr().out) == 0.0


def test_charge_wrong_schema_exits_2(tmp_path, capsys):
    src = tmp_path / "q.csv"
    assert run_cli("generate", "nls-planewave", "--out", str(src)) == 0
    capsys.readouterr()
    assert run_cli("charge", str(src)) == 2
    capsys.readouterr()


def test_lax_models(tmp_path, capsys):
    for model in ("zs", "shg", "sg"):
        out = tmp_path / f"{model}.json"
        assert run_cli("lax", model, "--lambda", "1.3",
                       "--out", str(out)) == 0
        rep = read_report(out)
        assert rep["scenario"] == f"lax-{model}"
        assert rep["verdict"] == "pass"
    assert run_cli("lax", "kdv") == 2
    capsys.readouterr()


def test_backlund_command_with_dressing(tmp_path):
    out = tmp_path / "bk.json"
    assert run_cli("backlund", "--n", "33", "--eta", "1.2",
                   "--lambda", "1.3", "--out", str(out)) == 0
    rep = read_report(out)
    assert rep["verdict"] == "pass"
    assert {"dressing_x", "dressing_t"} <= set(rep["residuals"])
    assert rep["residuals"]["dressing_x"]["kind"] == "fd"


def test_console_script_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "gaugeflow.cli_reports", "verify",
         "zs-curvature"],
        capture_output=True, text=True)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["verdict"] == "pass"
