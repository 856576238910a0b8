"""Command-line front end.

Subcommands: simulate, equilibria, sweep, threshold, regimes.  A single
optional JSON config file supplies defaults; command-line flags override
it field by field.  Exit codes are a stable contract: 0 success, 2
configuration problem, 3 numeric failure.
"""
from __future__ import annotations

import argparse
import json
import math
import os
import re
import sys
from dataclasses import dataclass, replace
from pathlib import Path
from typing import NamedTuple, Sequence

from .dynamics import IntegratorConfig, Trajectory, classify_outcome, integrate
from .equilibria import report as equilibria_report
from .errors import DomainValidationError, NumericError
from .game import EmotionProfile, GameState, PayoffMatrix
from .serialize import write_json
from .sweep import (DEFAULT_GRID, event_scan, find_threshold, grid_to_dict,
                    regime_label, sweep_grid, write_grid_csv)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERIC = 3

SWEEP_MIN_OK_FRACTION = 0.9
DEFAULT_RANGE_SPEC = "0.2:3.0:0.2"


class EventLevel(NamedTuple):
    coordinate: str
    level: float


DEFAULT_EVENT_LEVELS = (EventLevel("q", 0.73), EventLevel("p", 0.59))


@dataclass(frozen=True)
class RunConfig:
    """Fully resolved settings for one CLI invocation."""
    payoffs: PayoffMatrix
    r1: float = 1.0
    r2: float = 1.0
    p0: float = 0.5
    q0: float = 0.5
    integrator: IntegratorConfig = IntegratorConfig()
    output_dir: Path = Path("out")
    emit_plots: bool = False
    event_levels: tuple[EventLevel, ...] = DEFAULT_EVENT_LEVELS

    def profile(self) -> EmotionProfile:
        return EmotionProfile(self.r1, self.r2)

    def initial(self) -> GameState:
        return GameState(self.p0, self.q0)


class ConfigProblem(Exception):
    """Configuration rejected; the message is ready to print."""


# ---------------------------------------------------------------------------
# config assembly

_TOP_KEYS = {"r1", "r2", "p0", "q0", "payoffs", "payoffs_unchecked",
             "integrator", "output_dir", "emit_plots", "event_levels"}
_PAYOFF_KEYS = {"alpha", "beta", "gamma", "delta", "epsilon", "zeta", "eta", "theta"}
_INTEGRATOR_KEYS = {"dt", "horizon", "record_stride"}
_EVENT_KEYS = {"coordinate", "level"}


def _line_of(text: str | None, key: str) -> str:
    """Best-effort 1-based line of a key's first occurrence in the config."""
    if text is None:
        return "?"
    m = re.search(rf'"{re.escape(key)}"\s*:', text)
    if m is None:
        return "?"
    return str(text.count("\n", 0, m.start()) + 1)


class _Source:
    """Tracks where each setting came from, for error messages."""

    def __init__(self, path: Path | None, text: str | None):
        self.path = path
        self.text = text

    def fail(self, key: str, msg: str) -> None:
        if self.path is None:
            raise ConfigProblem(f"--{key}: {msg}")
        raise ConfigProblem(f"{self.path}:{_line_of(self.text, key)}: {key}: {msg}")


def _number(src: _Source, key: str, value) -> float:
    # bool is an int subclass; reject it explicitly
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        src.fail(key, f"expected a number, got {value!r}")
    return float(value)


def _load_config_file(path: Path) -> tuple[dict, str]:
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigProblem(f"{path}: cannot read config: {exc}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigProblem(f"{path}:{exc.lineno}: invalid JSON: {exc.msg}") from exc
    if not isinstance(data, dict):
        raise ConfigProblem(f"{path}:1: config must be a JSON object")
    return data, text


def _build_from_data(data: dict, src: _Source) -> RunConfig:
    unknown = sorted(set(data) - _TOP_KEYS)
    if unknown:
        src.fail(unknown[0], "unknown config key")

    payoff_values = PayoffMatrix.baseline().as_dict()
    raw_payoffs = data.get("payoffs", {})
    if not isinstance(raw_payoffs, dict):
        src.fail("payoffs", "expected an object of payoff values")
    bad = sorted(set(raw_payoffs) - _PAYOFF_KEYS)
    if bad:
        src.fail(bad[0], "unknown payoff key")
    for key, value in raw_payoffs.items():
        payoff_values[key] = _number(src, key, value)
    unchecked = data.get("payoffs_unchecked", False)
    if not isinstance(unchecked, bool):
        src.fail("payoffs_unchecked", f"expected true or false, got {unchecked!r}")
    try:
        payoffs = (PayoffMatrix.unchecked(**payoff_values) if unchecked
                   else PayoffMatrix(**payoff_values))
    except DomainValidationError as exc:
        src.fail("payoffs", str(exc))

    integ_values = {"dt": 0.01, "horizon": 200.0, "record_stride": 10}
    raw_integ = data.get("integrator", {})
    if not isinstance(raw_integ, dict):
        src.fail("integrator", "expected an object")
    bad = sorted(set(raw_integ) - _INTEGRATOR_KEYS)
    if bad:
        src.fail(bad[0], "unknown integrator key")
    for key, value in raw_integ.items():
        if key == "record_stride":
            if isinstance(value, bool) or not isinstance(value, int):
                src.fail(key, f"expected an integer, got {value!r}")
            integ_values[key] = value
        else:
            integ_values[key] = _number(src, key, value)
    try:
        integrator = IntegratorConfig(**integ_values)
    except DomainValidationError as exc:
        src.fail("integrator", str(exc))

    levels = []
    raw_levels = data.get("event_levels")
    if raw_levels is None:
        levels = list(DEFAULT_EVENT_LEVELS)
    else:
        if not isinstance(raw_levels, list):
            src.fail("event_levels", "expected a list of {coordinate, level} objects")
        for entry in raw_levels:
            if not isinstance(entry, dict) or set(entry) != _EVENT_KEYS:
                src.fail("event_levels", f"each entry needs exactly coordinate and level, got {entry!r}")
            coord = entry["coordinate"]
            if coord not in ("p", "q"):
                src.fail("event_levels", f"coordinate must be 'p' or 'q', got {coord!r}")
            level = _number(src, "event_levels", entry["level"])
            if not 0.0 <= level <= 1.0:
                src.fail("event_levels", f"level must lie in [0, 1], got {level!r}")
            levels.append(EventLevel(coord, level))

    kwargs: dict = {"payoffs": payoffs, "integrator": integrator,
                    "event_levels": tuple(levels)}
    for key in ("r1", "r2", "p0", "q0"):
        if key in data:
            kwargs[key] = _number(src, key, data[key])
    if "output_dir" in data:
        if not isinstance(data["output_dir"], str):
            src.fail("output_dir", f"expected a string, got {data['output_dir']!r}")
        kwargs["output_dir"] = Path(data["output_dir"])
    if "emit_plots" in data:
        if not isinstance(data["emit_plots"], bool):
            src.fail("emit_plots", f"expected true or false, got {data['emit_plots']!r}")
        kwargs["emit_plots"] = data["emit_plots"]
    return RunConfig(**kwargs)


def _validate(config: RunConfig, src: _Source) -> RunConfig:
    """Surface any domain violation with the offending key attached."""
    for key in ("r1", "r2"):
        value = getattr(config, key)
        if not (math.isfinite(value) and value > 0.0):
            src.fail(key, f"emotion index must be positive and finite, got {value!r}")
    for key in ("p0", "q0"):
        value = getattr(config, key)
        if not (math.isfinite(value) and 0.0 <= value <= 1.0):
            src.fail(key, f"must lie in [0, 1], got {value!r}")
    return config


def assemble_config(args: argparse.Namespace) -> RunConfig:
    if args.config is not None:
        data, text = _load_config_file(args.config)
        config = _validate(_build_from_data(data, _Source(args.config, text)),
                           _Source(args.config, text))
    else:
        config = RunConfig(payoffs=PayoffMatrix.baseline())

    overrides: dict = {}
    cli = _Source(None, None)
    for key in ("r1", "r2", "p0", "q0"):
        value = getattr(args, key, None)
        if value is not None:
            overrides[key] = value
    dt = getattr(args, "dt", None)
    horizon = getattr(args, "horizon", None)
    if dt is not None or horizon is not None:
        try:
            overrides["integrator"] = replace(
                config.integrator,
                **{k: v for k, v in (("dt", dt), ("horizon", horizon)) if v is not None})
        except DomainValidationError as exc:
            cli.fail("dt" if dt is not None else "horizon", str(exc))
    if getattr(args, "out", None) is not None:
        overrides["output_dir"] = args.out
    if getattr(args, "plots", False):
        overrides["emit_plots"] = True
    if overrides:
        config = _validate(replace(config, **overrides), cli)
    return config


# ---------------------------------------------------------------------------
# terminal output

def _use_color(stream) -> bool:
    return stream.isatty() and not os.environ.get("NO_COLOR")


def _say(msg: str, color: str | None = None) -> None:
    if color and _use_color(sys.stdout):
        code = {"green": "32", "red": "31", "cyan": "36"}[color]
        msg = f"\x1b[{code}m{msg}\x1b[0m"
    print(msg)


def _complain(msg: str) -> None:
    prefix = "error"
    if _use_color(sys.stderr):
        prefix = "\x1b[31merror\x1b[0m"
    print(f"{prefix}: {msg}", file=sys.stderr)


def _ensure_outdir(config: RunConfig) -> Path:
    outdir = config.output_dir
    outdir.mkdir(parents=True, exist_ok=True)
    return outdir


# ---------------------------------------------------------------------------
# subcommands

def cmd_simulate(config: RunConfig) -> int:
    traj = integrate(config.initial(), config.profile(), config.payoffs,
                     config.integrator)
    outcome = classify_outcome(traj)
    events = []
    for coord, level in config.event_levels:
        for crossing in event_scan(traj, coord, level):
            events.append({"coordinate": coord, "level": level,
                           "t": crossing.t, "direction": crossing.direction})
    events.sort(key=lambda e: e["t"])

    summary = {
        "outcome": outcome.to_dict(),
        "final_state": {"p": traj.p[-1], "q": traj.q[-1]},
        "events": events,
        "run": {
            "r1": config.r1, "r2": config.r2,
            "p0": config.p0, "q0": config.q0,
            "payoffs": config.payoffs.as_dict(),
            "payoffs_unchecked": not config.payoffs.ordering_checked,
            "integrator": {"dt": config.integrator.dt,
                           "horizon": config.integrator.horizon,
                           "record_stride": config.integrator.record_stride},
            "samples": len(traj),
        },
    }

    outdir = _ensure_outdir(config)
    _say(f"outcome: {outcome.kind.value} {outcome.detail()}".rstrip(), "green")
    written = [traj.to_csv(outdir / "trajectory.csv"),
               write_json(outdir / "summary.json", summary)]
    if config.emit_plots:
        from . import plots
        written.append(plots.save_timeseries(traj, outdir / "timeseries.svg"))
        written.append(plots.save_phase(traj, outdir / "phase.svg"))
    for path in written:
        _say(f"wrote {path}")
    return EXIT_OK


def cmd_equilibria(config: RunConfig) -> int:
    payload = equilibria_report(config.profile(), config.payoffs)
    outdir = _ensure_outdir(config)
    path = write_json(outdir / "equilibria.json", payload)
    for entry in payload["equilibria"]:
        point = entry["point"]
        _say(f"({point['p']:.6g}, {point['q']:.6g}) {entry['kind']}: {entry['stability']}")
    _say(f"wrote {path}")
    return EXIT_OK


def parse_range(spec: str) -> tuple[float, ...]:
    """Inclusive start:stop:step grid values, all positive."""
    parts = spec.split(":")
    if len(parts) != 3:
        raise DomainValidationError(f"range spec must be start:stop:step, got {spec!r}")
    try:
        start, stop, step = (float(part) for part in parts)
    except ValueError as exc:
        raise DomainValidationError(f"range spec must be numeric, got {spec!r}") from exc
    if not all(map(math.isfinite, (start, stop, step))):
        raise DomainValidationError(f"range spec must be finite, got {spec!r}")
    if start <= 0.0 or step <= 0.0 or stop < start:
        raise DomainValidationError(
            f"range spec needs start > 0, step > 0, stop >= start, got {spec!r}")
    count = math.floor((stop - start) / step + 0.5) + 1
    return tuple(round(start + k * step, 12) for k in range(count))


def cmd_sweep(config: RunConfig, r1_spec: str | None, r2_spec: str | None) -> int:
    r1_values = parse_range(r1_spec) if r1_spec else DEFAULT_GRID
    r2_values = parse_range(r2_spec) if r2_spec else DEFAULT_GRID
    grid = sweep_grid(r1_values, r2_values, config.initial(), config.payoffs,
                      config.integrator)
    outdir = _ensure_outdir(config)
    written = [write_grid_csv(outdir / "sweep.csv", grid),
               write_json(outdir / "sweep.json",
                          grid_to_dict(grid, config.payoffs, config.initial(),
                                       config.integrator))]
    if config.emit_plots:
        from . import plots
        written.append(plots.save_regime_heatmap(grid, outdir / "regimes.svg"))
    ok = grid.n_cells - grid.n_failed
    _say(f"cells: {ok}/{grid.n_cells} integrated",
         "green" if grid.n_failed == 0 else "red")
    for path in written:
        _say(f"wrote {path}")
    if ok < SWEEP_MIN_OK_FRACTION * grid.n_cells:
        _complain(f"{grid.n_failed} of {grid.n_cells} cells failed to integrate")
        return EXIT_NUMERIC
    return EXIT_OK


def parse_bracket(spec: str) -> tuple[float, float]:
    parts = spec.split(":")
    if len(parts) != 2:
        raise DomainValidationError(f"bracket must be lo:hi, got {spec!r}")
    try:
        lo, hi = float(parts[0]), float(parts[1])
    except ValueError as exc:
        raise DomainValidationError(f"bracket must be numeric, got {spec!r}") from exc
    return lo, hi


def cmd_threshold(config: RunConfig, axis: str, fixed: float | None,
                  bracket_spec: str, tol: float) -> int:
    bracket = parse_bracket(bracket_spec)
    if fixed is None:
        fixed = config.r2 if axis == "r1" else config.r1
    result = find_threshold(axis, fixed, bracket, config.initial(),
                            config.payoffs, config.integrator, tol=tol)
    outdir = _ensure_outdir(config)
    path = write_json(outdir / "threshold.json", result.to_dict())
    if result.threshold is None:
        _say(f"threshold: none ({result.kind_lo} at both endpoints)")
    else:
        _say(f"threshold: {result.threshold:.6g} "
             f"({result.kind_lo} -> {result.kind_hi})", "green")
    _say(f"wrote {path}")
    return EXIT_OK


def cmd_regimes(config: RunConfig) -> int:
    traj = integrate(config.initial(), config.profile(), config.payoffs,
                     config.integrator)
    outcome = classify_outcome(traj)
    label = regime_label(config.r1, config.r2, outcome)
    _say(f"regime: {label.label.value}", "cyan")
    _say(f"basis: {label.basis}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# argument parsing

def _add_common(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--config", type=Path, default=None,
                     help="JSON config file; flags override its fields")
    sub.add_argument("--r1", type=float, default=None,
                     help="netizen emotion index (> 0)")
    sub.add_argument("--r2", type=float, default=None,
                     help="government emotion index (> 0)")
    sub.add_argument("--p0", type=float, default=None,
                     help="initial spreading share in [0, 1]")
    sub.add_argument("--q0", type=float, default=None,
                     help="initial monitoring share in [0, 1]")
    sub.add_argument("--dt", type=float, default=None, help="integration step")
    sub.add_argument("--horizon", type=float, default=None,
                     help="integration end time")
    sub.add_argument("--out", type=Path, default=None, help="output directory")
    sub.add_argument("--plots", action="store_true", help="also render SVG figures")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rumorgame",
        description="Emotion-weighted rumor spreading game: simulation and analysis.")
    commands = parser.add_subparsers(dest="command", required=True)

    sim = commands.add_parser("simulate", help="integrate one trajectory")
    _add_common(sim)

    eq = commands.add_parser("equilibria", help="locate and classify rest points")
    _add_common(eq)

    sw = commands.add_parser("sweep", help="classify outcomes over an index grid")
    _add_common(sw)
    sw.add_argument("--r1-range", default=None, metavar="START:STOP:STEP")
    sw.add_argument("--r2-range", default=None, metavar="START:STOP:STEP")

    th = commands.add_parser("threshold", help="bisect for an outcome-kind flip")
    _add_common(th)
    th.add_argument("--axis", required=True, choices=("r1", "r2"))
    th.add_argument("--fixed", type=float, default=None,
                    help="value of the other index (defaults to the config value)")
    th.add_argument("--bracket", required=True, metavar="LO:HI")
    th.add_argument("--tol", type=float, default=0.01)

    rg = commands.add_parser("regimes", help="governance regime label for one profile")
    _add_common(rg)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = assemble_config(args)
        if args.command == "simulate":
            return cmd_simulate(config)
        if args.command == "equilibria":
            return cmd_equilibria(config)
        if args.command == "sweep":
            return cmd_sweep(config, args.r1_range, args.r2_range)
        if args.command == "threshold":
            return cmd_threshold(config, args.axis, args.fixed, args.bracket, args.tol)
        return cmd_regimes(config)
    except ConfigProblem as exc:
        _complain(str(exc))
        return EXIT_CONFIG
    except DomainValidationError as exc:
        _complain(str(exc))
        return EXIT_CONFIG
    except NumericError as exc:
        _complain(f"numeric failure: {exc}")
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
