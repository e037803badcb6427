import json
import subprocess
import sys

import pytest

from spintwist import cli
from spintwist.export import read_csv
from spintwist.propagate import IntegrationError

SMALL = ["--n", "12", "--t-steps", "4"]


def run(tmp_path, *args):
    out = tmp_path / "out"
    code = cli.main([*args, "--out", str(out)])
    return code, out


def test_trajectory_files(tmp_path, capsys):
    code, out = run(tmp_path, "trajectory", *SMALL, "--n-theta", "10", "--n-phi", "12")
    assert code == 0
    names = sorted(p.name for p in out.iterdir())
    assert names == ["observables.csv"] + [f"qfield_{i:03d}.csv" for i in range(4)]
    header, data = read_csv(out / "observables.csv")
    assert header == ["time", "t_over_tc", "jx", "jy", "jz", "norm", "parity", "qfi"]
    assert data[:, 1].tolist() == pytest.approx([0, 1 / 3, 2 / 3, 1])
    assert data[0, 7] == pytest.approx(12)
    _, q = read_csv(out / "qfield_000.csv")
    assert q.shape == (120, 3)
    assert str(out / "observables.csv") in capsys.readouterr().out


def test_trajectory_explicit_time_grid(tmp_path):
    code, out = run(tmp_path, "trajectory", "--n", "6", "--t-max", "0.5", "--t-steps", "3", "--model", "tnt",
                    "--n-theta", "4", "--n-phi", "4")
    assert code == 0
    _, data = read_csv(out / "observables.csv")
    assert data[:, 0].tolist() == pytest.approx([0, 0.25, 0.5])


def test_parity_writes_three_files(tmp_path):
    code, out = run(tmp_path, "parity", *SMALL, "--sweep-n", "6,8,10")
    assert code == 0
    assert sorted(p.name for p in out.iterdir()) == [
        "dtheta_min_vs_n.csv", "parity_curves.csv", "sensitivity_vs_time.csv"]
    _, rows = read_csv(out / "dtheta_min_vs_n.csv")
    assert rows[:, 0].tolist() == [6, 8, 10]


def test_decoherence_row_count_and_parallel_equivalence(tmp_path):
    a = tmp_path / "a"
    b = tmp_path / "b"
    args = ["decoherence", "--sweep-n", "6,8", "--sweep-gamma", "0,0.02,0.05"]
    assert cli.main([*args, "--out", str(a)]) == 0
    assert cli.main([*args, "--out", str(b), "--jobs", "2"]) == 0
    _, rows = read_csv(a / "decoherence.csv")
    assert rows.shape == (6, 5)
    assert rows[:, 0].tolist() == [6, 6, 6, 8, 8, 8]
    assert (a / "decoherence.csv").read_bytes() == (b / "decoherence.csv").read_bytes()


def test_loss_and_semiclassical(tmp_path):
    code, out = run(tmp_path, "loss", "--n", "10", "--max-loss", "4")
    assert code == 0
    header, rows = read_csv(out / "loss_qfi.csv")
    assert header == ["delta_n", "ghz", "xyz_1tc", "xyz_0.8tc", "xyz_0.6tc"]
    assert rows.shape == (5, 5)
    assert rows[0, 1] == pytest.approx(100)
    code = cli.main(["semiclassical", *SMALL, "--out", str(tmp_path / "sc")])
    assert code == 0
    _, f = read_csv(tmp_path / "sc" / "fisher_semiclassical.csv")
    assert (f[1:, 1] > f[:-1, 1]).all()


def test_fisher_json_output(tmp_path):
    code, out = run(tmp_path, "fisher", *SMALL, "--sweep-n", "8", "--format", "json", "--t-max", "1.0")
    assert code == 0
    doc = json.loads((out / "fisher_curves.json").read_text())
    assert set(doc) == {"config", "columns", "rows"}
    assert doc["columns"] == ["curve", "time", "qfi"]
    assert doc["config"]["n"] == 12 and doc["config"]["format"] == "json"
    assert {r[0] for r in doc["rows"]} == {"oat", "xyz-effective", "floquet"}


def test_gnuplot_flag(tmp_path):
    code, out = run(tmp_path, "loss", "--n", "6", "--max-loss", "2", "--gnuplot")
    assert code == 0
    assert (out / "loss_qfi.gp").exists()


def test_config_precedence(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"n": 8, "max_loss": 2, "chi": 2.0}))
    args = cli.build_parser().parse_args(["loss", "--config", str(cfg), "--n", "10"])
    rc = cli.resolve_config(args)
    assert rc.n == 10  # flag beats file
    assert rc.max_loss == 2 and rc.chi == 2.0  # file beats default
    assert rc.alpha == 0.4  # default


@pytest.mark.parametrize("argv", [
    ["nonsense"],
    ["loss", "--n", "1"],
    ["loss", "--n", "5", "--max-loss", "5"],
    ["fisher", "--chi", "-1"],
    ["fisher", "--t-steps", "1"],
    ["decoherence", "--sweep-gamma", "0,-1"],
    ["decoherence", "--sweep-n", "a,b"],
    ["parity", "--format", "xml"],
    ["loss", "--jobs", "0"],
])
def test_usage_errors_exit_2(argv, tmp_path):
    with pytest.raises(SystemExit) as exc:
        cli.main([*argv, "--out", str(tmp_path)])
    assert exc.value.code == 2


def test_bad_config_file_exit_2(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"colour": "red"}))
    with pytest.raises(SystemExit) as exc:
        cli.main(["loss", "--config", str(cfg)])
    assert exc.value.code == 2
    with pytest.raises(SystemExit) as exc:
        cli.main(["loss", "--config", str(tmp_path / "missing.json")])
    assert exc.value.code == 2


def test_numerical_abort_exit_1(tmp_path, monkeypatch):
    def boom(cfg, w):
        raise IntegrationError("trace drift", 0.1)

    monkeypatch.setitem(cli.HANDLERS, "loss", boom)
    assert cli.main(["loss", "--out", str(tmp_path)]) == 1


def test_module_entry_point(tmp_path):
    res = subprocess.run([sys.executable, "-m", "spintwist", "loss", "--n", "4", "--max-loss", "1", "--out",
                          str(tmp_path)], capture_output=True, text=True)
    assert res.returncode == 0
    assert res.stdout.splitlines() == [str(tmp_path / "loss_qfi.csv"), str(tmp_path / "loss_pm.csv")]
