import io
import json

import pytest

from bottleneck_flow.cli import cli_main, read_config


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = cli_main(list(argv), stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


def test_classify_json():
    code, out, _ = run("classify", "--alpha", "0.3", "--beta", "0.6")
    assert code == 0
    rec = json.loads(out)
    assert rec["label"] == "G3" and rec["kind"] == "region"


def test_classify_csv():
    code, out, _ = run("classify", "--alpha", "0.1", "--beta", "0.4", "--format", "csv")
    assert code == 0
    assert out.splitlines()[0] == "alpha,beta,label,kind"
    assert out.splitlines()[1].split(",")[2] == "G1"


def test_usage_errors_exit_2(capsys):
    assert run("solve", "--alpha", "0.1", "--beta", "0.4")[0] == 2
    assert run("frobnicate")[0] == 2
    assert run("classify", "--alpha", "x")[0] == 2
    assert run("converge", "--alpha", "0.1", "--beta", "0.4", "--eps-list", "a,b")[0] == 2


def test_domain_errors_exit_1(cosine_canard):
    code, _, err = run("classify", "--alpha", "1.5", "--beta", "0.4")
    assert code == 1 and "OutOfDomain" in err
    # a point on g37 is degenerate: the singular orbit is not unique
    b = repr(1.0 - cosine_canard.rho_c1)
    code, _, err = run("singular", "--alpha", "0.4", "--beta", b)
    assert code == 1 and "degenerate" in err
    code, _, err = run("validate-k", "--profile", "cosine:a=0.3,b=0.5")
    assert code == 1


def test_validate_k(tmp_path):
    code, out, _ = run("validate-k")
    assert code == 0
    rec = json.loads(out)
    assert rec["xi_star"] == pytest.approx(0.75)
    assert rec["nondegenerate"] is True
    target = tmp_path / "canard.csv"
    assert run("validate-k", "--format", "csv", "--out", str(target))[0] == 0
    assert target.read_text().splitlines()[0] == "xi,rho_plus,rho_minus"
    assert json.loads((tmp_path / "canard.csv.json").read_text())["k_min"] == pytest.approx(0.7)


def test_singular_csv():
    code, out, _ = run("singular", "--alpha", "0.1", "--beta", "0.4")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "x,rho,piece"
    x0, rho0, _ = lines[1].split(",")
    assert float(x0) == 0.0 and float(rho0) == pytest.approx(0.1)


def test_solve_with_sidecar(tmp_path):
    target = tmp_path / "rho.csv"
    code, _, _ = run("solve", "--alpha", "0.1", "--beta", "0.4", "--eps", "0.02", "--out", str(target))
    assert code == 0
    rows = target.read_text().splitlines()
    assert rows[0] == "x,rho"
    meta = json.loads((tmp_path / "rho.csv.json").read_text())
    assert meta["epsilon"] == 0.02 and meta["mesh_cells"] == len(rows) - 2


def test_output_is_byte_identical():
    a = run("solve", "--alpha", "0.3", "--beta", "0.6", "--eps", "0.02")[1]
    b = run("solve", "--alpha", "0.3", "--beta", "0.6", "--eps", "0.02")[1]
    assert a == b and len(a) > 0
    assert run("sweep", "--grid", "6")[1] == run("sweep", "--grid", "6")[1]


def test_config_file_and_override(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# defaults\nalpha = 0.1\nbeta=0.4\n")
    code, out, _ = run("classify", "--config", str(cfg))
    assert code == 0 and json.loads(out)["label"] == "G1"
    code, out, _ = run("classify", "--config", str(cfg), "--alpha", "0.3", "--beta", "0.6")
    assert json.loads(out)["label"] == "G3"
    assert read_config(cfg) == {"alpha": "0.1", "beta": "0.4"}
    bad = tmp_path / "bad.cfg"
    bad.write_text("colour = red\n")
    assert run("classify", "--config", str(bad))[0] == 2
    assert run("classify", "--config", str(tmp_path / "missing.cfg"))[0] == 2


def test_sweep_and_flux_map():
    code, out, _ = run("sweep", "--grid", "4")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "alpha,beta,region,flux_singular" and len(lines) == 17
    code, out, _ = run("flux-map", "--grid", "10", "--profile", "supergauss:we=1.0,wm=0.5,d=0.2,xi0=0.6")
    assert code == 0
    rows = [l.split(",") for l in out.splitlines()[1:]]
    assert len(rows) == 100
    for r in rows:
        if r[3]:
            assert float(r[3]) == pytest.approx(float(r[5]), abs=1e-12)


def test_sweep_with_eps_columns():
    code, out, _ = run("sweep", "--grid", "2", "--eps", "0.05")
    assert code == 0
    assert out.splitlines()[0] == "alpha,beta,region,flux_singular,flux_eps,rho_0,rho_0.25,rho_0.5,rho_0.75,rho_1,error"


def test_converge_json():
    code, out, _ = run("converge", "--alpha", "0.3", "--beta", "0.6", "--eps-list", "4e-2,2e-2,1e-2,5e-3", "--format", "json")
    assert code == 0
    rec = json.loads(out)
    assert rec["region"] == "G3" and rec["expected_mu"] == 0.5
    assert len(rec["distance"]) == 4
