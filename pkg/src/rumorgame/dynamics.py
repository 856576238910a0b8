"""Deterministic time evolution of the emotion-weighted replicator field.

Integration is classical fixed-step fourth-order Runge-Kutta.  The field
itself keeps the open unit square invariant, but discrete steps can
overshoot, so every accepted step (and every internal stage state) is
projected back onto [0, 1] componentwise.  Initial states that sit on a
vertex stay there without stepping.  No randomness enters anywhere: two
runs with identical inputs produce bitwise-identical trajectories.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from enum import Enum
from math import isfinite
from pathlib import Path

import numpy as np

from .errors import DomainValidationError, InsufficientDataError, NumericError
from .game import (
    UNIT_SQUARE_CORNERS,
    EmotionProfile,
    GameState,
    PayoffMatrix,
    _advantages,
    _coeffs,
)
from .serialize import fmt_sig, round_sig

CORNER_SNAP_TOL = 1e-12
MIN_CLASSIFY_SAMPLES = 50


@dataclass(frozen=True)
class IntegratorConfig:
    dt: float = 0.01
    horizon: float = 200.0
    record_stride: int = 10

    def __post_init__(self) -> None:
        if not (isinstance(self.dt, (int, float)) and isfinite(self.dt) and self.dt > 0.0):
            raise DomainValidationError(f"dt must be a positive finite real, got {self.dt!r}")
        if not (isinstance(self.horizon, (int, float)) and isfinite(self.horizon)):
            raise DomainValidationError(f"horizon must be a finite real, got {self.horizon!r}")
        if self.horizon < 10.0 * self.dt:
            raise DomainValidationError("horizon must cover at least ten steps")
        if not (isinstance(self.record_stride, int) and self.record_stride >= 1):
            raise DomainValidationError(f"record_stride must be an integer >= 1, got {self.record_stride!r}")
        object.__setattr__(self, "dt", float(self.dt))
        object.__setattr__(self, "horizon", float(self.horizon))

    @property
    def n_steps(self) -> int:
        return int(round(self.horizon / self.dt))

    def record_steps(self) -> list[int]:
        steps = list(range(0, self.n_steps + 1, self.record_stride))
        if steps[-1] != self.n_steps:
            steps.append(self.n_steps)
        return steps


@dataclass(frozen=True)
class Trajectory:
    """Recorded samples of one run: arrays t, p, q of equal length."""

    t: np.ndarray
    p: np.ndarray
    q: np.ndarray

    def __post_init__(self) -> None:
        t = np.asarray(self.t, dtype=float)
        p = np.asarray(self.p, dtype=float)
        q = np.asarray(self.q, dtype=float)
        if not (t.ndim == p.ndim == q.ndim == 1 and len(t) == len(p) == len(q)):
            raise DomainValidationError("t, p, q must be 1-d arrays of equal length")
        if len(t) < 2:
            raise DomainValidationError("a trajectory needs at least two samples")
        if not np.all(np.diff(t) > 0.0):
            raise DomainValidationError("sample times must increase strictly")
        for name, arr in (("p", p), ("q", q)):
            if not np.all(np.isfinite(arr)):
                raise DomainValidationError(f"{name} contains non-finite samples")
            if arr.min() < 0.0 or arr.max() > 1.0:
                raise DomainValidationError(f"{name} leaves the unit interval")
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "q", q)

    def __len__(self) -> int:
        return len(self.t)

    def final_state(self) -> GameState:
        return GameState(float(self.p[-1]), float(self.q[-1]))

    def coordinate(self, name: str) -> np.ndarray:
        if name == "p":
            return self.p
        if name == "q":
            return self.q
        raise DomainValidationError(f"coordinate must be 'p' or 'q', got {name!r}")

    def to_csv(self, path: Path | str) -> Path:
        path = Path(path)
        with path.open("w", newline="", encoding="utf-8") as handle:
            writer = csv.writer(handle)
            writer.writerow(["t", "p", "q"])
            for t, p, q in zip(self.t, self.p, self.q):
                writer.writerow([fmt_sig(t), fmt_sig(p), fmt_sig(q)])
        return path

    @classmethod
    def from_csv(cls, path: Path | str) -> "Trajectory":
        with Path(path).open(newline="", encoding="utf-8") as handle:
            reader = csv.reader(handle)
            header = next(reader, None)
            if header != ["t", "p", "q"]:
                raise DomainValidationError(f"unexpected CSV header {header!r}")
            rows = [[float(cell) for cell in row] for row in reader if row]
        data = np.asarray(rows, dtype=float)
        if data.ndim != 2 or data.shape[1] != 3:
            raise DomainValidationError("trajectory CSV must hold three columns")
        return cls(data[:, 0], data[:, 1], data[:, 2])


class OutcomeKind(str, Enum):
    PURE_STABLE = "pure_stable"
    HYBRID_STABLE = "hybrid_stable"
    OSCILLATION = "oscillation"
    NON_CONVERGENT = "non_convergent"


@dataclass(frozen=True)
class OutcomeClass:
    """Long-run behaviour of a trajectory.

    Converged runs carry a settled point (a vertex for pure_stable, the
    tail mean otherwise) and the earliest time after which the remaining
    samples vary by less than the convergence tolerance.  Oscillation
    carries the tail min/max bands of both coordinates instead.
    """

    kind: OutcomeKind
    corner_index: int | None = None
    point: tuple[float, float] | None = None
    p_band: tuple[float, float] | None = None
    q_band: tuple[float, float] | None = None
    convergence_time: float | None = None

    def kind_key(self) -> str:
        """Comparison key: the kind, plus the corner identity for pure_stable."""
        if self.kind is OutcomeKind.PURE_STABLE:
            return f"{self.kind.value}:corner{self.corner_index}"
        return self.kind.value

    def detail(self) -> str:
        """Compact comma-free description used in delimited output."""
        if self.kind is OutcomeKind.PURE_STABLE:
            return (f"corner={self.corner_index} p={self.point[0]:g} q={self.point[1]:g}"
                    f" t_conv={self.convergence_time:.6g}")
        if self.kind is OutcomeKind.HYBRID_STABLE:
            return (f"p={self.point[0]:.6g} q={self.point[1]:.6g}"
                    f" t_conv={self.convergence_time:.6g}")
        if self.kind is OutcomeKind.OSCILLATION:
            return (f"p_band=[{self.p_band[0]:.6g} {self.p_band[1]:.6g}]"
                    f" q_band=[{self.q_band[0]:.6g} {self.q_band[1]:.6g}]")
        return ""

    def to_dict(self) -> dict:
        return {
            "kind": self.kind.value,
            "corner_index": self.corner_index,
            "point": None if self.point is None else {"p": self.point[0], "q": self.point[1]},
            "p_band": None if self.p_band is None else list(self.p_band),
            "q_band": None if self.q_band is None else list(self.q_band),
            "convergence_time": self.convergence_time,
        }


def _snap_corner(p: float, q: float) -> tuple[float, float] | None:
    for cp, cq in UNIT_SQUARE_CORNERS:
        if abs(p - cp) <= CORNER_SNAP_TOL and abs(q - cq) <= CORNER_SNAP_TOL:
            return cp, cq
    return None


def _sample_time(step: int, dt: float) -> float:
    # Sample clocks carry the serialized precision so that classification
    # survives the CSV round trip bit for bit.
    return round_sig(step * dt)


def _constant_trajectory(p: float, q: float, cfg: IntegratorConfig) -> Trajectory:
    steps = cfg.record_steps()
    t = np.array([_sample_time(k, cfg.dt) for k in steps])
    return Trajectory(t, np.full(len(steps), p), np.full(len(steps), q))


def integrate(initial: GameState, profile: EmotionProfile, m: PayoffMatrix,
              cfg: IntegratorConfig | None = None) -> Trajectory:
    """Integrate the field from `initial` and record strided samples.

    Records step 0, every record_stride-th step and the final step.
    Raises NumericError if any intermediate value turns non-finite.
    """
    cfg = cfg or IntegratorConfig()
    corner = _snap_corner(initial.p, initial.q)
    if corner is not None:
        return _constant_trajectory(corner[0], corner[1], cfg)

    r1, r2 = profile.r1.r, profile.r2.r
    c = _coeffs(m)
    dt = cfg.dt
    half = 0.5 * dt
    sixth = dt / 6.0
    stride = cfg.record_stride
    n_steps = cfg.n_steps

    p, q = initial.p, initial.q
    ts, ps, qs = [0.0], [p], [q]
    for step in range(1, n_steps + 1):
        vp, vq = _advantages(p, q, r1, r2, c)
        k1p = p ** r1 * vp
        k1q = q ** r2 * vq
        sp = min(1.0, max(0.0, p + half * k1p))
        sq = min(1.0, max(0.0, q + half * k1q))
        vp, vq = _advantages(sp, sq, r1, r2, c)
        k2p = sp ** r1 * vp
        k2q = sq ** r2 * vq
        sp = min(1.0, max(0.0, p + half * k2p))
        sq = min(1.0, max(0.0, q + half * k2q))
        vp, vq = _advantages(sp, sq, r1, r2, c)
        k3p = sp ** r1 * vp
        k3q = sq ** r2 * vq
        sp = min(1.0, max(0.0, p + dt * k3p))
        sq = min(1.0, max(0.0, q + dt * k3q))
        vp, vq = _advantages(sp, sq, r1, r2, c)
        k4p = sp ** r1 * vp
        k4q = sq ** r2 * vq
        p = p + sixth * (k1p + 2.0 * (k2p + k3p) + k4p)
        q = q + sixth * (k1q + 2.0 * (k2q + k3q) + k4q)
        if not (isfinite(p) and isfinite(q)):
            raise NumericError(f"non-finite state at t={step * dt:.6g}")
        p = min(1.0, max(0.0, p))
        q = min(1.0, max(0.0, q))
        if step % stride == 0 or step == n_steps:
            ts.append(_sample_time(step, dt))
            ps.append(p)
            qs.append(q)
    return Trajectory(np.array(ts), np.array(ps), np.array(qs))


def integrate_many(initial: GameState, r1s, r2s, m: PayoffMatrix,
                   cfg: IntegratorConfig | None = None
                   ) -> tuple[list[Trajectory | None], list[str | None]]:
    """Integrate one cell per (r1, r2) pair, vectorized across cells.

    Identical arithmetic to `integrate`, evaluated elementwise on arrays.
    A cell whose state turns non-finite is reported through the second
    return value instead of aborting the batch.
    """
    cfg = cfg or IntegratorConfig()
    r1 = np.asarray(r1s, dtype=float)
    r2 = np.asarray(r2s, dtype=float)
    if r1.shape != r2.shape or r1.ndim != 1 or len(r1) == 0:
        raise DomainValidationError("r1s and r2s must be equal-length 1-d sequences")
    if not (np.all(np.isfinite(r1)) and np.all(np.isfinite(r2))
            and r1.min() > 0.0 and r2.min() > 0.0):
        raise DomainValidationError("emotion indices must be positive finite reals")
    n = len(r1)

    corner = _snap_corner(initial.p, initial.q)
    if corner is not None:
        traj = _constant_trajectory(corner[0], corner[1], cfg)
        return [traj] * n, [None] * n

    c = _coeffs(m)
    dt = cfg.dt
    half = 0.5 * dt
    sixth = dt / 6.0
    stride = cfg.record_stride
    n_steps = cfg.n_steps
    record = cfg.record_steps()

    p = np.full(n, initial.p)
    q = np.full(n, initial.q)
    rec_p = np.empty((len(record), n))
    rec_q = np.empty((len(record), n))
    rec_p[0] = p
    rec_q[0] = q
    errors: list[str | None] = [None] * n
    row = 1
    for step in range(1, n_steps + 1):
        vp, vq = _advantages(p, q, r1, r2, c)
        k1p = p ** r1 * vp
        k1q = q ** r2 * vq
        sp = np.minimum(1.0, np.maximum(0.0, p + half * k1p))
        sq = np.minimum(1.0, np.maximum(0.0, q + half * k1q))
        vp, vq = _advantages(sp, sq, r1, r2, c)
        k2p = sp ** r1 * vp
        k2q = sq ** r2 * vq
        sp = np.minimum(1.0, np.maximum(0.0, p + half * k2p))
        sq = np.minimum(1.0, np.maximum(0.0, q + half * k2q))
        vp, vq = _advantages(sp, sq, r1, r2, c)
        k3p = sp ** r1 * vp
        k3q = sq ** r2 * vq
        sp = np.minimum(1.0, np.maximum(0.0, p + dt * k3p))
        sq = np.minimum(1.0, np.maximum(0.0, q + dt * k3q))
        vp, vq = _advantages(sp, sq, r1, r2, c)
        k4p = sp ** r1 * vp
        k4q = sq ** r2 * vq
        p = p + sixth * (k1p + 2.0 * (k2p + k3p) + k4p)
        q = q + sixth * (k1q + 2.0 * (k2q + k3q) + k4q)
        bad = ~(np.isfinite(p) & np.isfinite(q))
        if bad.any():
            for i in np.flatnonzero(bad):
                if errors[i] is None:
                    errors[i] = f"non-finite state at t={step * dt:.6g}"
            # NaN survives the projection below, so failed cells stay NaN.
        p = np.minimum(1.0, np.maximum(0.0, p))
        q = np.minimum(1.0, np.maximum(0.0, q))
        if step % stride == 0 or step == n_steps:
            rec_p[row] = p
            rec_q[row] = q
            row += 1
    t = np.array([_sample_time(k, dt) for k in record])
    trajectories: list[Trajectory | None] = []
    for i in range(n):
        if errors[i] is not None:
            trajectories.append(None)
        else:
            trajectories.append(Trajectory(t, rec_p[:, i].copy(), rec_q[:, i].copy()))
    return trajectories, errors


def _earliest_settled_time(traj: Trajectory, conv_tol: float) -> float:
    """Earliest sample time after which both coordinates vary by < conv_tol."""
    # Suffix ranges computed back to front; they shrink monotonically,
    # so the first index satisfying the bound is well defined.
    p_rev = traj.p[::-1]
    q_rev = traj.q[::-1]
    range_p = np.maximum.accumulate(p_rev) - np.minimum.accumulate(p_rev)
    range_q = np.maximum.accumulate(q_rev) - np.minimum.accumulate(q_rev)
    ok = (range_p < conv_tol) & (range_q < conv_tol)
    first = len(traj) - 1 - int(np.flatnonzero(ok).max())
    return float(traj.t[first])


def _max_tail_autocorr(x: np.ndarray) -> float:
    """Largest normalized autocorrelation of x over lags 1..len(x)//2."""
    x = x - x.mean()
    denom = float(np.dot(x, x))
    if denom == 0.0:
        return 0.0
    best = -1.0
    for lag in range(1, len(x) // 2 + 1):
        value = float(np.dot(x[:-lag], x[lag:])) / denom
        if value > best:
            best = value
    return best


def classify_outcome(traj: Trajectory, corner_tol: float = 0.02,
                     conv_tol: float = 1e-4, tail_fraction: float = 0.2) -> OutcomeClass:
    """Classify the long-run behaviour recorded in a trajectory.

    The trailing `tail_fraction` of the samples decides: if both
    coordinates vary by less than conv_tol there, the run converged, to a
    vertex (pure_stable) when the tail mean lies within corner_tol of one
    and to the tail mean otherwise (hybrid_stable).  A non-settled tail
    whose p autocorrelation exceeds 0.5 at some positive lag is cycling
    (oscillation, with tail min/max bands); anything else is
    non_convergent.  Needs at least 50 samples.
    """
    n = len(traj)
    if n < MIN_CLASSIFY_SAMPLES:
        raise InsufficientDataError(
            f"classification needs >= {MIN_CLASSIFY_SAMPLES} samples, got {n}"
        )
    if not (0.0 < tail_fraction <= 1.0):
        raise DomainValidationError(f"tail_fraction must lie in (0, 1], got {tail_fraction!r}")
    tail_len = max(10, int(round(n * tail_fraction)))
    tail_p = traj.p[n - tail_len:]
    tail_q = traj.q[n - tail_len:]
    variation = max(float(tail_p.max() - tail_p.min()), float(tail_q.max() - tail_q.min()))
    if variation < conv_tol:
        mean_p = float(tail_p.mean())
        mean_q = float(tail_q.mean())
        settled = _earliest_settled_time(traj, conv_tol)
        for index, (cp, cq) in enumerate(UNIT_SQUARE_CORNERS, start=1):
            if (mean_p - cp) ** 2 + (mean_q - cq) ** 2 <= corner_tol ** 2:
                return OutcomeClass(OutcomeKind.PURE_STABLE, corner_index=index,
                                    point=(cp, cq), convergence_time=settled)
        return OutcomeClass(OutcomeKind.HYBRID_STABLE, point=(mean_p, mean_q),
                            convergence_time=settled)
    if _max_tail_autocorr(tail_p) > 0.5:
        return OutcomeClass(
            OutcomeKind.OSCILLATION,
            p_band=(float(tail_p.min()), float(tail_p.max())),
            q_band=(float(tail_q.min()), float(tail_q.max())),
        )
    return OutcomeClass(OutcomeKind.NON_CONVERGENT)
