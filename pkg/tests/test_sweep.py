"""Grid sweeps, threshold search, regime labels and event scans."""
import numpy as np
import pytest

from rumorgame import (DomainValidationError, EmotionProfile, GameState,
                       IntegratorConfig, OutcomeKind, Regime, Trajectory,
                       event_scan, find_threshold, regime_label, sweep_grid)
from rumorgame.sweep import DEFAULT_GRID, grid_rows, grid_to_dict, write_grid_csv

FAST_CFG = IntegratorConfig(dt=0.01, horizon=60.0, record_stride=10)


def test_default_grid_values():
    assert len(DEFAULT_GRID) == 15
    assert DEFAULT_GRID[0] == 0.2
    assert DEFAULT_GRID[-1] == 3.0
    assert 1.0 in DEFAULT_GRID


def test_grid_shape_and_order(baseline, half_start):
    r1s, r2s = (0.5, 1.0), (0.8, 1.2, 2.0)
    grid = sweep_grid(r1s, r2s, half_start, baseline, FAST_CFG)
    assert grid.n_cells == 6
    cells = list(grid)
    # row-major: r1 varies slowest
    assert [(c.r1, c.r2) for c in cells] == [
        (0.5, 0.8), (0.5, 1.2), (0.5, 2.0),
        (1.0, 0.8), (1.0, 1.2), (1.0, 2.0)]


def test_sweep_deterministic_and_order_independent(baseline, half_start):
    r1s, r2s = (0.6, 1.2, 2.0), (0.7, 1.5)
    first = sweep_grid(r1s, r2s, half_start, baseline, FAST_CFG)
    second = sweep_grid(r1s, r2s, half_start, baseline, FAST_CFG)
    by_pair = {}
    for cell in first:
        by_pair[(cell.r1, cell.r2)] = cell.outcome
    for cell in second:
        assert cell.outcome.to_dict() == by_pair[(cell.r1, cell.r2)].to_dict()
    # permuted axes give the same outcome per (r1, r2) pair
    shuffled = sweep_grid(tuple(reversed(r1s)), tuple(reversed(r2s)),
                          half_start, baseline, FAST_CFG)
    for cell in shuffled:
        assert cell.outcome.to_dict() == by_pair[(cell.r1, cell.r2)].to_dict()


def test_sweep_cells_match_single_runs(baseline, default_cfg, half_start, run_scenario):
    grid = sweep_grid((0.6, 1.2), (1.0, 2.0), half_start, baseline, default_cfg)
    for cell in grid:
        _, single = run_scenario(cell.r1, cell.r2)
        assert cell.outcome.kind_key() == single.kind_key()


def test_axis_validation(baseline, half_start):
    with pytest.raises(DomainValidationError):
        sweep_grid((), (1.0,), half_start, baseline, FAST_CFG)
    with pytest.raises(DomainValidationError):
        sweep_grid((0.5, -1.0), (1.0,), half_start, baseline, FAST_CFG)
    with pytest.raises(DomainValidationError):
        find_threshold("r3", 1.0, (1.0, 2.0), half_start, baseline, FAST_CFG)
    with pytest.raises(DomainValidationError):
        find_threshold("r1", 1.0, (2.0, 1.0), half_start, baseline, FAST_CFG)


def test_threshold_bisection_contract(baseline, default_cfg, half_start):
    res = find_threshold("r1", 1.0, (1.0, 2.0), half_start, baseline, default_cfg)
    assert res.threshold is not None
    assert 1.0 < res.threshold < 2.0
    # the final bracket endpoints disagree in kind and are tol-close
    last = res.history[-1]
    assert last["hi"] - last["lo"] <= 2 * res.tol
    assert res.kind_lo != res.kind_hi
    assert res.history[0]["kind"] == res.kind_lo
    # reported value is the midpoint of a sub-tol bracket
    assert abs(res.threshold - 0.5 * (last["lo"] + last["hi"])) <= res.tol


def test_threshold_none_when_kinds_agree(baseline, default_cfg, half_start):
    res = find_threshold("r1", 1.0, (1.5, 2.0), half_start, baseline, default_cfg)
    assert res.threshold is None
    assert res.kind_lo == res.kind_hi == "pure_stable:corner4"
    assert len(res.history) == 2


def test_threshold_on_government_axis(baseline, default_cfg, half_start):
    # raising the government index flips full conflict into calm monitoring
    res = find_threshold("r2", 1.2, (1.2, 2.0), half_start, baseline, default_cfg)
    assert res.threshold is not None
    assert res.kind_lo == "pure_stable:corner4"
    assert res.kind_hi == "pure_stable:corner2"
    assert res.threshold == pytest.approx(1.309, abs=0.01)


def test_regime_table_single_labels(run_scenario):
    _, out = run_scenario(1.0, 2.0)
    assert regime_label(1.0, 2.0, out).label is Regime.IDEAL
    _, out = run_scenario(0.5, 0.5)
    assert regime_label(0.5, 0.5, out).label is Regime.RISK
    _, out = run_scenario(0.6, 1.0)
    assert regime_label(0.6, 1.0, out).label is Regime.SECURITY
    _, out = run_scenario(1.0, 1.0)
    assert regime_label(1.0, 1.0, out).label is Regime.SECURITY


def test_regime_pessimist_rows_split_on_outcome(run_scenario):
    # pessimistic netizens, spreading dies out: an opportunity for governance
    _, out = run_scenario(1.2, 2.0)
    assert out.corner_index == 2
    assert regime_label(1.2, 2.0, out).label is Regime.OPPORTUNITY
    # pessimistic netizens, full conflict persists: opposition
    _, out = run_scenario(1.2, 1.2)
    assert out.corner_index == 4
    assert regime_label(1.2, 1.2, out).label is Regime.OPPOSITION
    # pessimist vs optimist heading to full conflict reads as risk
    _, out = run_scenario(1.6, 0.7)
    assert regime_label(1.6, 0.7, out).label is Regime.RISK


def test_regime_label_totality_on_default_grid(baseline, half_start):
    grid = sweep_grid(DEFAULT_GRID, DEFAULT_GRID, half_start, baseline, FAST_CFG)
    labels = set()
    for cell in grid:
        assert cell.error is None
        labels.add(regime_label(cell.r1, cell.r2, cell.outcome).label)
    assert labels <= set(Regime)


def test_event_scan_finds_interpolated_crossings():
    t = np.array([0.0, 1.0, 2.0, 3.0, 4.0])
    p = np.array([0.0, 0.4, 0.8, 0.4, 0.0])
    q = np.full(5, 0.5)
    traj = Trajectory(t=t, p=p, q=q)
    crossings = event_scan(traj, "p", 0.6)
    assert len(crossings) == 2
    assert crossings[0].direction == "rising"
    assert crossings[0].t == pytest.approx(1.5, abs=1e-12)
    assert crossings[1].direction == "falling"
    assert crossings[1].t == pytest.approx(2.5, abs=1e-12)


def test_event_scan_constant_series_has_no_crossings():
    t = np.linspace(0.0, 5.0, 6)
    traj = Trajectory(t=t, p=np.full(6, 0.3), q=np.full(6, 0.3))
    assert event_scan(traj, "p", 0.3) == []
    assert event_scan(traj, "q", 0.5) == []


def test_event_scan_level_validation(run_scenario):
    traj, _ = run_scenario(1.0, 2.0)
    with pytest.raises(DomainValidationError):
        event_scan(traj, "p", 1.5)
    with pytest.raises(DomainValidationError):
        event_scan(traj, "r", 0.5)


def test_grid_rows_and_dict_shape(baseline, half_start):
    grid = sweep_grid((0.5, 1.2), (1.0,), half_start, baseline, FAST_CFG)
    rows = grid_rows(grid)
    assert len(rows) == 2
    for row in rows:
        assert row["error"] is None
        assert row["regime"] in {r.value for r in Regime}
        assert "regime_basis" in row
    payload = grid_to_dict(grid, baseline, half_start, FAST_CFG)
    assert payload["n_cells"] == 2
    assert payload["n_failed"] == 0
    assert payload["r1_values"] == [0.5, 1.2]
    assert payload["initial"] == {"p": 0.5, "q": 0.5}


def test_grid_csv_layout(tmp_path, baseline, half_start):
    grid = sweep_grid((0.5,), (2.0,), half_start, baseline, FAST_CFG)
    path = write_grid_csv(tmp_path / "sweep.csv", grid)
    lines = path.read_text().splitlines()
    assert lines[0] == "r1,r2,outcome,detail"
    assert len(lines) == 2
    fields = lines[1].split(",")
    assert len(fields) == 4  # detail must stay comma-free
    assert fields[0] == "0.50000000"
    assert fields[2] == "pure_stable"
