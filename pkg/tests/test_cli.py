import csv
import io
import subprocess
import sys

import pytest

from regfid.channel import identity_channel
from regfid.channel_io import write_channel
from regfid.cli import main
from regfid.experiments import CSV_COLUMNS, ExperimentConfig, monotone_violations, run_sweep, ResultRow
from regfid.errors import ConfigError
from regfid.pauli import PauliChannel


def run(capsys, *argv):
    code = main(["-q", *argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def test_sweep_csv_layout(capsys):
    code, out, _ = run(capsys, "sweep", "--preset", "fig1", "--n-max", "3", "--full-max-n", "2", "--restarts", "3", "--jobs", "1")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert tuple(rows[0]) == CSV_COLUMNS
    assert [int(r["n"]) for r in rows] == [1, 2, 3]
    assert float(rows[0]["F_symmetric"]) == pytest.approx(0.5, abs=1e-9)
    assert float(rows[1]["F_full"]) == pytest.approx(0.547722557505, abs=1e-9)
    assert rows[2]["F_full"] == "" and rows[2]["seconds_full"] == ""
    assert all(float(r["nu_infty"]) == pytest.approx(0.7, abs=1e-9) for r in rows)
    assert all(float(r["F_tilde"]) == pytest.approx(0.7) for r in rows)


def test_sweep_bytes_independent_of_jobs(tmp_path):
    outs = []
    for jobs in ("1", "2"):
        path = tmp_path / f"jobs{jobs}.csv"
        assert main(["-q", "sweep", "--preset", "fig2", "--n-max", "4", "--full-max-n", "3", "--restarts", "3",
                     "--seed", "7", "--no-timings", "--jobs", jobs, "--out", str(path)]) == 0
        outs.append(path.read_bytes())
    assert outs[0] == outs[1]


def test_sweep_kraus_channel_file(tmp_path, capsys):
    path = tmp_path / "id.yaml"
    write_channel(identity_channel(2), path)
    code, out, _ = run(capsys, "sweep", "--channel", str(path), "--n-max", "2", "--modes", "symmetric,trial",
                       "--restarts", "2", "--no-timings")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert [float(r["F_symmetric"]) for r in rows] == pytest.approx([1.0, 1.0])
    assert rows[0]["F_closed_trial"] == ""


def test_describe_fig2(capsys):
    code, out, _ = run(capsys, "describe", "--preset", "fig2")
    assert code == 0
    fields = dict(line.split(": ", 1) for line in out.strip().splitlines())
    assert float(fields["epsilon"]) == pytest.approx(1 / 21)
    assert float(fields["n0"]) == pytest.approx(9.70406, abs=1e-5)
    assert float(fields["F_tilde"]) == pytest.approx(0.7143, abs=1e-4)


def test_describe_identity_file(tmp_path, capsys):
    path = tmp_path / "id.yaml"
    write_channel(identity_channel(2), path)
    code, out, _ = run(capsys, "describe", "--channel", str(path))
    assert code == 0
    fields = dict(line.split(": ", 1) for line in out.strip().splitlines())
    assert fields["dim"] == "2" and fields["kraus_operators"] == "1"
    assert float(fields["tp_residual"]) < 1e-12


def test_malformed_channel_file_exit_code(tmp_path, capsys):
    path = tmp_path / "bad.yaml"
    path.write_text("kind: pauli\np: [0.2, 0.2, 0.2, 0.3]\n")
    code, _, err = run(capsys, "describe", "--channel", str(path))
    assert code == 2 and "p" in err


def test_config_errors_name_field():
    with pytest.raises(ConfigError, match="n_max"):
        ExperimentConfig(PauliChannel((0.1, 0.2, 0.3, 0.4)), n_min=3, n_max=2)
    with pytest.raises(ConfigError, match="full_max_n"):
        ExperimentConfig(PauliChannel((0.1, 0.2, 0.3, 0.4)), full_max_n=20)
    with pytest.raises(ConfigError, match="n_max"):
        ExperimentConfig(PauliChannel((0.1, 0.2, 0.3, 0.4)), n_max=60, modes=("symmetric",))
    with pytest.raises(ConfigError, match="preset"):
        ExperimentConfig.from_preset("fig9")


def test_sweep_cli_rejects_bad_modes(capsys):
    with pytest.raises(SystemExit):
        main(["sweep", "--preset", "fig1", "--modes", "bogus"])


def test_monotone_violations():
    rows = [ResultRow(n, {"F_symmetric": v}) for n, v in zip((1, 2, 3, 4), (0.5, 0.6, 0.6 - 5e-8, 0.59))]
    assert monotone_violations(rows) == [4]


def test_run_sweep_closed_mode_only():
    rows = run_sweep(ExperimentConfig(PauliChannel((0.4, 0.3, 0.2, 0.1)), n_max=3, modes=("closed",)))
    # canonical order is (0.4, 0.1, 0.2, 0.3); at n=1 the trial value is p0+p3
    assert rows[0].values["F_closed_trial"] == pytest.approx(0.7)
    assert all(r.values["F_closed_trial"] <= 0.7 + 1e-12 for r in rows)
    assert rows[0].values["F_tilde"] == pytest.approx(0.7)
    assert "nu_infty" not in rows[0].values


def test_props_subcommand(tmp_path):
    out = tmp_path / "props.csv"
    code = main(["-q", "props", "--only", "trace_preservation", "--only", "crossover_semantics", "--out", str(out)])
    lines = out.read_text().splitlines()
    assert code == 0
    assert lines[0] == "name,trials,max_deviation,tolerance,status"
    assert [l.split(",")[0] for l in lines[1:]] == ["trace_preservation", "crossover_semantics"]


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "regfid", "describe", "--preset", "fig1"],
                         capture_output=True, text=True, check=True)
    assert "nu_infty_closed: 0.7" in res.stdout


def test_fig2_plateau_through_n10():
    config = ExperimentConfig.from_preset("fig2", n_max=11, modes=("symmetric",))
    f = [r.values["F_symmetric"] for r in run_sweep(config)]
    assert max(abs(v - 2 / 3) for v in f[:10]) <= 1e-6
    assert f[10] > 2 / 3 + 1e-6
