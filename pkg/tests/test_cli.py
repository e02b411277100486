import csv
import io
import subprocess
import sys

import pytest

from esskit import __version__
from esskit.cli import main
from esskit.harness import SweepConfig, Vary, beta_grid, sweep, write_sweep_csv
from esskit.simplex import write_weights_csv

from .helpers import TABLE2


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def table(text):
    lines = [ln for ln in text.splitlines() if not ln.startswith("#")]
    return list(csv.DictReader(io.StringIO("\n".join(lines))))


@pytest.fixture
def col_c(tmp_path):
    path = tmp_path / "c.csv"
    write_weights_csv(path, TABLE2[2])
    return str(path)


def test_compute_table2_column_c(capsys, col_c):
    code, out, _ = run(capsys, "compute", "--weights", col_c, "--method", "hr:2", "--method", "hr:inf")
    assert code == 0
    rows = table(out)
    assert [r["method"] for r in rows] == ["hr:2", "hr:inf"]
    assert [r["ess"] for r in rows] == ["3", "3"]
    assert rows[0]["rate"] == "0.6"


def test_compute_ten_significant_digits(capsys, col_c):
    _, out, _ = run(capsys, "compute", "--weights", col_c, "--method", "lp:2")
    assert table(out)[0]["ess"] == "1.898979486"


def test_compute_empty_file_is_domain_error(capsys, tmp_path):
    path = tmp_path / "empty.csv"
    path.write_text("")
    code, out, err = run(capsys, "compute", "--weights", str(path), "--method", "hr:2")
    assert code == 1
    assert out == ""
    assert err.count("\n") == 1 and err.startswith("error: InvalidSize:")


def test_missing_file(capsys, tmp_path):
    code, _, err = run(capsys, "compute", "--weights", str(tmp_path / "nope.csv"), "--method", "q")
    assert code == 1 and "FileNotFoundError" in err


@pytest.mark.parametrize(
    "argv",
    [
        ["frobnicate"],
        ["compute", "--weights", "w.csv", "--method", "hr:x"],
        ["compute", "--weights", "w.csv", "--method", "nope"],
        ["compute", "--weights", "w.csv"],
        ["property-check", "--method", "q", "--n", "0"],
        ["sweep-mean", "--out", "x.csv", "--bogus"],
        [],
    ],
)
def test_usage_errors_exit_2(capsys, argv):
    with pytest.raises(SystemExit) as exc:
        main(argv)
    assert exc.value.code == 2
    capsys.readouterr()


def test_property_check_lp2(capsys, tmp_path):
    report = tmp_path / "report.csv"
    argv = ["property-check", "--method", "lp:2", "--n", "5", "--trials", "2000", "--seed", "7"]
    code, out, _ = run(capsys, *argv, "--csv", str(report))
    assert code == 0
    assert out.startswith(f"# seed=7, version={__version__}, config=method=lp:2;n=5")
    assert "class: Proper" in out
    c5 = next(ln for ln in out.splitlines() if ln.startswith("C5"))
    assert "FAIL" in c5 and "w=[" in c5 and "M=" in c5
    rows = table(report.read_text())
    assert {r["class"] for r in rows} == {"Proper"}
    assert [r["verdict"] for r in rows] == ["pass", "pass", "pass", "pass", "FAIL"]
    # byte-identical on rerun
    _, again, _ = run(capsys, *argv)
    assert again == out


def test_sweep_and_downstream_commands(capsys, tmp_path):
    out_csv, summary = tmp_path / "sweep.csv", tmp_path / "summary.csv"
    argv = [
        "sweep-mean", "--out", str(out_csv), "--summary", str(summary), "--seed", "3",
        "--n-samples", "100", "--replications", "60", "--grid-step", "0.5",
        "--beta-step", "0.5", "--threads", "2",
    ]  # fmt: skip
    code, out, _ = run(capsys, *argv)
    assert code == 0
    assert out.startswith("# seed=3,")
    assert len(table(out)) == 5
    first = out_csv.read_bytes()
    assert first.startswith(b"# seed=3, version=")

    code, beta_out, _ = run(capsys, "optimal-beta", "--sweep", str(out_csv))
    assert code == 0
    srow = table(summary.read_text())[0]
    assert float(beta_out) == float(srow["beta_star"])

    code, fit_out, _ = run(capsys, "fit-combo", "--sweep", str(out_csv))
    frow = table(fit_out)[0]
    assert float(frow["a1"]) == pytest.approx(float(srow["a1"]), rel=1e-8)
    assert float(frow["a2"]) == pytest.approx(float(srow["a2"]), rel=1e-8)

    run(capsys, *argv[:-2], "--threads", "1")
    assert out_csv.read_bytes() == first


def test_sweep_config_file_and_flag_override(capsys, tmp_path):
    cfg = tmp_path / "sigma.cfg"
    cfg.write_text("n_samples=50\nreplications=20\nseed=4\ngrid=0.5,1.0\nbeta_step=1\n")
    out_csv = tmp_path / "s.csv"
    code, out, _ = run(capsys, "sweep-sigma", "--config", str(cfg), "--out", str(out_csv), "--seed", "9", "--mse", "--no-inf")
    assert code == 0
    assert out.startswith("# seed=9,") and "centered=0" in out and "+inf" not in out
    params = {r["param"] for r in table(out_csv.read_text())}
    assert params == {"0.5", "1"}


def test_sweep_matches_library(capsys, tmp_path):
    out_csv = tmp_path / "cli.csv"
    run(capsys, "sweep-mean", "--out", str(out_csv), "--seed", "1", "--n-samples", "80",
        "--replications", "30", "--grid-step", "1", "--beta-step", "1")  # fmt: skip
    cfg = SweepConfig(grid=(0.0, 1.0, 2.0), n_samples=80, replications=30, seed=1,
                      beta_grid=beta_grid(0.2, 50.0, 1.0))  # fmt: skip
    lib_csv = tmp_path / "lib.csv"
    write_sweep_csv(sweep(cfg, Vary.MEAN), lib_csv, cfg.describe())
    assert out_csv.read_bytes() == lib_csv.read_bytes()


def test_sweep_domain_error(capsys, tmp_path):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("integrand=x**2\n")
    code, _, err = run(capsys, "sweep-mean", "--config", str(cfg), "--out", str(tmp_path / "o.csv"))
    assert code == 1 and err.startswith("error: InvalidParameter:")


def test_collision_oracle(capsys, tmp_path):
    path = tmp_path / "w.csv"
    write_weights_csv(path, [0.5, 0.3, 0.2])
    code, out, _ = run(capsys, "collision-oracle", "--weights", str(path), "--r", "100000", "--seed", "2")
    assert code == 0 and out.startswith("# seed=2,")
    row = table(out)[0]
    assert float(row["closed_form"]) == pytest.approx(1 / 0.38)
    assert abs(float(row["z"])) < 3


def test_model_select(capsys, tmp_path):
    path = tmp_path / "curve.csv"
    path.write_text("k,V\n0,1\n1,0.2\n2,0.1\n3,0\n")
    code, out, _ = run(capsys, "model-select", "--curve", str(path), "--method", "hr:inf", "--method", "gini")
    assert code == 0
    rows = {r["method"]: r for r in table(out)}
    assert rows["hr:inf"]["raw"] == "1.25" and rows["hr:inf"]["rounded"] == "1"
    assert rows["env-index"]["raw"] == rows["gini"]["raw"]


def test_model_select_flat_curve(capsys, tmp_path):
    path = tmp_path / "flat.csv"
    path.write_text("k,V\n0,1\n1,1\n")
    code, _, err = run(capsys, "model-select", "--curve", str(path), "--method", "hr:2")
    assert code == 1 and "FlatCurve" in err


def test_console_entry_point():
    out = subprocess.run(
        [sys.executable, "-m", "esskit.cli", "--version"], capture_output=True, text=True
    )
    assert out.returncode == 0 and __version__ in out.stdout
