"""Parameter sweeps over emotion indices, thresholds, and regime labels.

A sweep integrates one trajectory per (r1, r2) grid cell and classifies
its long-run outcome.  Bisection over one emotion index locates the value
where the outcome kind flips.  The regime taxonomy maps each cell's
emotion attitudes plus its observed outcome onto one of five governance
regimes: risk, opportunity, ideal, security, opposition.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from enum import Enum
from math import isfinite
from pathlib import Path
from typing import NamedTuple

import numpy as np

from .dynamics import (
    IntegratorConfig,
    OutcomeClass,
    OutcomeKind,
    Trajectory,
    classify_outcome,
    integrate,
    integrate_many,
)
from .errors import DomainValidationError
from .game import EmotionProfile, GameState, PayoffMatrix
from .serialize import fmt_sig

# Default emotion grid for regime maps: 0.2 to 3.0 in steps of 0.2.
DEFAULT_GRID: tuple[float, ...] = tuple(round(0.2 * k, 12) for k in range(1, 16))

# A converged run counts as "no spreading" below this share of spreaders.
NO_SPREAD_P_MAX = 0.1


class Regime(str, Enum):
    RISK = "risk"
    OPPORTUNITY = "opportunity"
    IDEAL = "ideal"
    SECURITY = "security"
    OPPOSITION = "opposition"


@dataclass(frozen=True)
class RegimeLabel:
    label: Regime
    basis: str


class Crossing(NamedTuple):
    t: float
    direction: str  # "rising" or "falling"


@dataclass(frozen=True)
class SweepCell:
    r1: float
    r2: float
    outcome: OutcomeClass | None
    error: str | None = None


@dataclass(frozen=True)
class SweepGrid:
    r1_values: tuple[float, ...]
    r2_values: tuple[float, ...]
    cells: tuple[tuple[SweepCell, ...], ...]  # indexed [i_r1][i_r2]

    def __iter__(self):
        for row in self.cells:
            yield from row

    @property
    def n_cells(self) -> int:
        return len(self.r1_values) * len(self.r2_values)

    @property
    def n_failed(self) -> int:
        return sum(1 for cell in self if cell.error is not None)


def _check_axis_values(values, name: str) -> tuple[float, ...]:
    out = tuple(float(v) for v in values)
    if not out:
        raise DomainValidationError(f"{name} must be non-empty")
    for v in out:
        if not (isfinite(v) and v > 0.0):
            raise DomainValidationError(f"{name} entries must be positive finite reals, got {v!r}")
    return out


def sweep_grid(r1_values, r2_values, initial: GameState, m: PayoffMatrix,
               cfg: IntegratorConfig | None = None) -> SweepGrid:
    """Integrate and classify every (r1, r2) cell of the grid.

    Numeric failures are recorded in the affected cell instead of
    aborting the sweep.  Cell results do not depend on evaluation order.
    """
    r1_values = _check_axis_values(r1_values, "r1_values")
    r2_values = _check_axis_values(r2_values, "r2_values")
    cfg = cfg or IntegratorConfig()
    n2 = len(r2_values)
    flat_r1 = np.repeat(r1_values, n2)
    flat_r2 = np.tile(r2_values, len(r1_values))
    trajectories, errors = integrate_many(initial, flat_r1, flat_r2, m, cfg)
    rows = []
    for i, r1 in enumerate(r1_values):
        row = []
        for j, r2 in enumerate(r2_values):
            k = i * n2 + j
            if errors[k] is not None:
                row.append(SweepCell(r1, r2, None, errors[k]))
                continue
            try:
                outcome = classify_outcome(trajectories[k])
            except Exception as exc:  # record, do not abort the sweep
                row.append(SweepCell(r1, r2, None, str(exc)))
                continue
            row.append(SweepCell(r1, r2, outcome, None))
        rows.append(tuple(row))
    return SweepGrid(r1_values, r2_values, tuple(rows))


@dataclass(frozen=True)
class ThresholdResult:
    axis: str
    fixed_other: float
    bracket: tuple[float, float]
    tol: float
    threshold: float | None
    kind_lo: str
    kind_hi: str
    history: tuple[dict, ...]

    def to_dict(self) -> dict:
        return {
            "axis": self.axis,
            "fixed_other": self.fixed_other,
            "bracket": list(self.bracket),
            "tol": self.tol,
            "threshold": self.threshold,
            "kind_lo": self.kind_lo,
            "kind_hi": self.kind_hi,
            "history": [dict(step) for step in self.history],
        }


def find_threshold(axis: str, fixed_other: float, bracket: tuple[float, float],
                   initial: GameState, m: PayoffMatrix,
                   cfg: IntegratorConfig | None = None,
                   tol: float = 0.01) -> ThresholdResult:
    """Bisect one emotion index for the value where the outcome kind flips.

    The comparison key is the outcome kind plus, for pure_stable, the
    corner identity.  Returns no threshold when both bracket endpoints
    classify alike; otherwise the endpoints of the final bracket are
    guaranteed to differ in kind, and the midpoint is reported.
    """
    if axis not in ("r1", "r2"):
        raise DomainValidationError(f"axis must be 'r1' or 'r2', got {axis!r}")
    lo, hi = float(bracket[0]), float(bracket[1])
    if not (isfinite(lo) and isfinite(hi) and 0.0 < lo < hi):
        raise DomainValidationError(f"bracket must satisfy 0 < lo < hi, got {bracket!r}")
    if not (isfinite(tol) and tol > 0.0):
        raise DomainValidationError(f"tol must be positive, got {tol!r}")
    fixed_other = float(fixed_other)
    cfg = cfg or IntegratorConfig()

    def probe(value: float) -> str:
        if axis == "r1":
            profile = EmotionProfile(value, fixed_other)
        else:
            profile = EmotionProfile(fixed_other, value)
        return classify_outcome(integrate(initial, profile, m, cfg)).kind_key()

    kind_lo = probe(lo)
    kind_hi = probe(hi)
    history = [{"lo": lo, "hi": hi, "value": lo, "kind": kind_lo},
               {"lo": lo, "hi": hi, "value": hi, "kind": kind_hi}]
    if kind_lo == kind_hi:
        return ThresholdResult(axis, fixed_other, (float(bracket[0]), float(bracket[1])),
                               tol, None, kind_lo, kind_hi, tuple(history))
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        kind_mid = probe(mid)
        history.append({"lo": lo, "hi": hi, "value": mid, "kind": kind_mid})
        if kind_mid == kind_lo:
            lo = mid
        else:
            hi = mid
            kind_hi = kind_mid
    return ThresholdResult(axis, fixed_other, (float(bracket[0]), float(bracket[1])),
                           tol, 0.5 * (lo + hi), kind_lo, kind_hi, tuple(history))


def _favorable(outcome: OutcomeClass) -> bool:
    """True when the run settles with essentially nobody spreading."""
    return (outcome.kind in (OutcomeKind.PURE_STABLE, OutcomeKind.HYBRID_STABLE)
            and outcome.point is not None and outcome.point[0] <= NO_SPREAD_P_MAX)


# (netizen attitude, government attitude) -> single regime, or a
# (favorable, unfavorable) pair disambiguated by the observed outcome.
_REGIME_TABLE: dict[tuple[str, str], Regime | tuple[Regime, Regime]] = {
    ("rational", "optimistic"): Regime.RISK,
    ("rational", "pessimistic"): Regime.IDEAL,
    ("rational", "rational"): Regime.SECURITY,
    ("optimistic", "optimistic"): Regime.RISK,
    ("optimistic", "pessimistic"): Regime.IDEAL,
    ("optimistic", "rational"): Regime.SECURITY,
    ("pessimistic", "optimistic"): (Regime.OPPORTUNITY, Regime.RISK),
    ("pessimistic", "pessimistic"): (Regime.OPPORTUNITY, Regime.OPPOSITION),
    ("pessimistic", "rational"): (Regime.OPPORTUNITY, Regime.OPPOSITION),
}


def regime_label(r1: float, r2: float, outcome: OutcomeClass) -> RegimeLabel:
    """Five-regime governance label for one cell.

    Attitude pairs with a single canonical regime keep it regardless of
    the outcome.  Pairs with a favorable/unfavorable split resolve to the
    favorable member exactly when the run converged with essentially no
    spreading (p at or below 0.1), and to the unfavorable member
    otherwise.
    """
    netizen = EmotionProfile(r1, r2).r1.attitude
    government = EmotionProfile(r1, r2).r2.attitude
    entry = _REGIME_TABLE[(netizen, government)]
    if isinstance(entry, tuple):
        label = entry[0] if _favorable(outcome) else entry[1]
    else:
        label = entry
    basis = f"netizen={netizen} government={government} outcome={outcome.kind_key()}"
    return RegimeLabel(label, basis)


def event_scan(traj: Trajectory, coordinate: str, level: float) -> list[Crossing]:
    """Times at which a coordinate crosses a level, linearly interpolated.

    A rising crossing is a sample below the level followed by one at or
    above it; falling is the mirror image.  A constant trajectory yields
    no crossings.
    """
    level = float(level)
    if not (isfinite(level) and 0.0 <= level <= 1.0):
        raise DomainValidationError(f"level must lie in [0, 1], got {level!r}")
    x = traj.coordinate(coordinate)
    t = traj.t
    a, b = x[:-1], x[1:]
    rising = (a < level) & (b >= level)
    falling = (a > level) & (b <= level)
    crossings: list[Crossing] = []
    for i in np.flatnonzero(rising | falling):
        frac = (level - x[i]) / (x[i + 1] - x[i])
        when = float(t[i] + frac * (t[i + 1] - t[i]))
        crossings.append(Crossing(when, "rising" if rising[i] else "falling"))
    return crossings


def grid_rows(grid: SweepGrid) -> list[dict]:
    """Flatten a sweep row-major into JSON-ready cell dictionaries."""
    rows = []
    for cell in grid:
        entry: dict = {"r1": cell.r1, "r2": cell.r2}
        if cell.error is not None:
            entry["outcome"] = None
            entry["regime"] = None
            entry["error"] = cell.error
        else:
            label = regime_label(cell.r1, cell.r2, cell.outcome)
            entry["outcome"] = cell.outcome.to_dict()
            entry["regime"] = label.label.value
            entry["regime_basis"] = label.basis
            entry["error"] = None
        rows.append(entry)
    return rows


def grid_to_dict(grid: SweepGrid, m: PayoffMatrix, initial: GameState,
                 cfg: IntegratorConfig) -> dict:
    return {
        "r1_values": list(grid.r1_values),
        "r2_values": list(grid.r2_values),
        "initial": {"p": initial.p, "q": initial.q},
        "payoffs": m.as_dict(),
        "payoffs_unchecked": not m.ordering_checked,
        "integrator": {"dt": cfg.dt, "horizon": cfg.horizon,
                       "record_stride": cfg.record_stride},
        "n_cells": grid.n_cells,
        "n_failed": grid.n_failed,
        "cells": grid_rows(grid),
    }


def write_grid_csv(path: Path | str, grid: SweepGrid) -> Path:
    """Delimited sweep export with header r1,r2,outcome,detail."""
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(["r1", "r2", "outcome", "detail"])
        for cell in grid:
            if cell.error is not None:
                writer.writerow([fmt_sig(cell.r1), fmt_sig(cell.r2), "error", cell.error])
            else:
                writer.writerow([fmt_sig(cell.r1), fmt_sig(cell.r2),
                                 cell.outcome.kind.value, cell.outcome.detail()])
    return path
