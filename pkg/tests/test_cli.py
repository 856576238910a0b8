"""End-to-end command-line behaviour: exit codes, files, schemas."""
import json

import jsonschema
import pytest

from rumorgame import Trajectory, classify_outcome
from rumorgame.cli import main, parse_range
from rumorgame.serialize import schema


def run_cli(args):
    return main(list(args))


def test_parse_range_grammar():
    assert parse_range("0.2:3.0:0.2") == pytest.approx(
        tuple(0.2 * k for k in range(1, 16)))
    assert parse_range("1.0:1.0:0.5") == (1.0,)
    assert parse_range("0.5:2.0:0.5") == (0.5, 1.0, 1.5, 2.0)
    # stop short of a full step is still included within half a step
    assert parse_range("1.0:1.9:0.5") == (1.0, 1.5, 2.0)
    for bad in ("1:2", "a:b:c", "0:1:0.1", "1:0.5:0.1", "1:2:-0.5"):
        with pytest.raises(Exception):
            parse_range(bad)


def test_simulate_writes_valid_outputs(tmp_path):
    out = tmp_path / "run"
    code = run_cli(["simulate", "--r1", "1", "--r2", "2", "--out", str(out)])
    assert code == 0
    summary = json.loads((out / "summary.json").read_text())
    jsonschema.validate(summary, schema("summary"))
    assert summary["outcome"]["kind"] == "pure_stable"
    assert summary["outcome"]["corner_index"] == 2
    assert summary["run"]["r1"] == 1.0
    assert summary["run"]["samples"] == 2001
    lines = (out / "trajectory.csv").read_text().splitlines()
    assert lines[0] == "t,p,q"
    assert len(lines) == 2002


def test_simulate_summary_reclassifies_from_csv(tmp_path):
    out = tmp_path / "run"
    assert run_cli(["simulate", "--r1", "0.6", "--r2", "1", "--out", str(out)]) == 0
    summary = json.loads((out / "summary.json").read_text())
    again = classify_outcome(Trajectory.from_csv(out / "trajectory.csv"))
    assert again.kind.value == summary["outcome"]["kind"]
    assert again.corner_index == summary["outcome"]["corner_index"]
    assert again.convergence_time == summary["outcome"]["convergence_time"]
    stored = summary["outcome"]["point"]
    assert again.point[0] == pytest.approx(stored["p"], abs=1e-7)
    assert again.point[1] == pytest.approx(stored["q"], abs=1e-7)


def test_simulate_events_recorded(tmp_path):
    out = tmp_path / "run"
    assert run_cli(["simulate", "--r1", "1", "--r2", "2", "--out", str(out)]) == 0
    events = json.loads((out / "summary.json").read_text())["events"]
    q_rises = [e for e in events
               if e["coordinate"] == "q" and e["direction"] == "rising"
               and e["level"] == 0.73]
    assert len(q_rises) == 1
    assert q_rises[0]["t"] == pytest.approx(0.336, abs=0.01)
    ts = [e["t"] for e in events]
    assert ts == sorted(ts)


def test_simulate_plots_flag(tmp_path):
    out = tmp_path / "run"
    code = run_cli(["simulate", "--r1", "1", "--r2", "2", "--out", str(out),
                    "--plots", "--horizon", "50"])
    assert code == 0
    ts = (out / "timeseries.svg").read_text()
    ph = (out / "phase.svg").read_text()
    assert ts.startswith("<?xml") and "</svg>" in ts
    assert ph.startswith("<?xml") and "</svg>" in ph


def test_invalid_state_flag_exits_2_and_writes_nothing(tmp_path):
    out = tmp_path / "never"
    code = run_cli(["simulate", "--p0", "1.5", "--out", str(out)])
    assert code == 2
    assert not out.exists()


def test_invalid_emotion_flag_exits_2(tmp_path):
    assert run_cli(["simulate", "--r1", "0", "--out", str(tmp_path / "x")]) == 2
    assert run_cli(["simulate", "--r1", "-2", "--out", str(tmp_path / "y")]) == 2


def test_config_file_roundtrip(tmp_path):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({
        "r1": 0.6, "r2": 1.0,
        "integrator": {"horizon": 100.0},
        "output_dir": str(tmp_path / "from_config"),
    }))
    assert run_cli(["simulate", "--config", str(cfg)]) == 0
    summary = json.loads((tmp_path / "from_config" / "summary.json").read_text())
    assert summary["run"]["r1"] == 0.6
    assert summary["run"]["integrator"]["horizon"] == 100.0
    # flags win over the file
    assert run_cli(["simulate", "--config", str(cfg), "--r1", "1.0",
                    "--out", str(tmp_path / "flag_wins")]) == 0
    summary = json.loads((tmp_path / "flag_wins" / "summary.json").read_text())
    assert summary["run"]["r1"] == 1.0


def test_config_errors_carry_line_numbers(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('{\n  "r1": 1.0,\n  "p0": 2.25\n}\n')
    assert run_cli(["simulate", "--config", str(bad)]) == 2
    err = capsys.readouterr().err
    assert f"{bad}:3" in err

    unknown = tmp_path / "unknown.json"
    unknown.write_text('{\n  "nonsense": 1\n}\n')
    assert run_cli(["simulate", "--config", str(unknown)]) == 2
    err = capsys.readouterr().err
    assert f"{unknown}:2" in err
    assert "nonsense" in err

    broken = tmp_path / "broken.json"
    broken.write_text("{ not json\n")
    assert run_cli(["simulate", "--config", str(broken)]) == 2
    err = capsys.readouterr().err
    assert f"{broken}:1" in err


def test_config_payoff_override_and_unchecked(tmp_path):
    cfg = tmp_path / "payoffs.json"
    cfg.write_text(json.dumps({
        "payoffs": {"beta": -1.0},
        "output_dir": str(tmp_path / "o"),
    }))
    # beta below gamma violates the netizen ordering
    assert run_cli(["simulate", "--config", str(cfg)]) == 2
    cfg.write_text(json.dumps({
        "payoffs": {"beta": -1.0},
        "payoffs_unchecked": True,
        "output_dir": str(tmp_path / "o"),
    }))
    assert run_cli(["simulate", "--config", str(cfg)]) == 0
    summary = json.loads((tmp_path / "o" / "summary.json").read_text())
    assert summary["run"]["payoffs_unchecked"] is True
    assert summary["run"]["payoffs"]["beta"] == -1.0


def test_equilibria_output_validates(tmp_path):
    out = tmp_path / "eq"
    assert run_cli(["equilibria", "--r1", "1", "--r2", "1", "--out", str(out)]) == 0
    payload = json.loads((out / "equilibria.json").read_text())
    jsonschema.validate(payload, schema("equilibria"))
    corners = [e for e in payload["equilibria"] if e["kind"] == "corner"]
    assert len(corners) == 4
    interior = [e for e in payload["equilibria"] if e["kind"] == "interior"]
    assert len(interior) == 1
    assert interior[0]["point"]["p"] == pytest.approx(0.375, abs=1e-6)
    assert interior[0]["point"]["q"] == pytest.approx(0.4166667, abs=1e-6)


def test_sweep_csv_json_and_heatmap(tmp_path):
    out = tmp_path / "sw"
    code = run_cli(["sweep", "--r1-range", "0.5:1.0:0.5",
                    "--r2-range", "1.0:2.0:1.0", "--out", str(out),
                    "--horizon", "60", "--plots"])
    assert code == 0
    payload = json.loads((out / "sweep.json").read_text())
    jsonschema.validate(payload, schema("sweep"))
    assert payload["n_cells"] == 4
    assert payload["n_failed"] == 0
    lines = (out / "sweep.csv").read_text().splitlines()
    assert lines[0] == "r1,r2,outcome,detail"
    assert len(lines) == 5
    assert (out / "regimes.svg").exists()


def test_sweep_single_cell_ideal(tmp_path):
    out = tmp_path / "one"
    code = run_cli(["sweep", "--r1-range", "0.5:0.5:1", "--r2-range",
                    "2.0:2.0:1", "--out", str(out)])
    assert code == 0
    payload = json.loads((out / "sweep.json").read_text())
    assert len(payload["cells"]) == 1
    assert payload["cells"][0]["regime"] == "ideal"


def test_sweep_malformed_range_exits_2(tmp_path):
    assert run_cli(["sweep", "--r1-range", "oops", "--out", str(tmp_path / "x")]) == 2
    assert run_cli(["sweep", "--r1-range", "0:1:0.5",
                    "--out", str(tmp_path / "y")]) == 2


def test_threshold_output_validates(tmp_path):
    out = tmp_path / "th"
    code = run_cli(["threshold", "--axis", "r1", "--fixed", "1.0",
                    "--bracket", "1.0:2.0", "--out", str(out)])
    assert code == 0
    payload = json.loads((out / "threshold.json").read_text())
    jsonschema.validate(payload, schema("threshold"))
    assert payload["threshold"] is not None
    assert 1.40 <= payload["threshold"] <= 1.50
    assert payload["history"][0]["kind"] == payload["kind_lo"]


def test_threshold_null_case(tmp_path):
    out = tmp_path / "th0"
    code = run_cli(["threshold", "--axis", "r1", "--fixed", "1.0",
                    "--bracket", "1.5:2.0", "--out", str(out)])
    assert code == 0
    payload = json.loads((out / "threshold.json").read_text())
    jsonschema.validate(payload, schema("threshold"))
    assert payload["threshold"] is None


def test_regimes_prints_label(tmp_path, capsys):
    assert run_cli(["regimes", "--r1", "0.5", "--r2", "2.0"]) == 0
    out = capsys.readouterr().out
    assert "ideal" in out


def test_no_color_respected(tmp_path, capsys, monkeypatch):
    monkeypatch.setenv("NO_COLOR", "1")
    out = tmp_path / "r"
    assert run_cli(["simulate", "--r1", "1", "--r2", "2", "--out", str(out)]) == 0
    assert "\x1b[" not in capsys.readouterr().out


def test_repeated_runs_byte_identical(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    for target in (a, b):
        assert run_cli(["simulate", "--r1", "1.6", "--r2", "0.7",
                        "--out", str(target)]) == 0
    assert (a / "trajectory.csv").read_bytes() == (b / "trajectory.csv").read_bytes()
    assert (a / "summary.json").read_bytes() == (b / "summary.json").read_bytes()
