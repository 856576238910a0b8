"""Equilibrium search and local stability for the emotion-weighted field.

The four vertices of the unit square are always rest points because both
growth rates carry a vanishing prefactor there.  Interior rest points are
the common zeros of the two advantage brackets; they are found by damped
Newton iteration multi-started from a uniform interior grid, with the
bracket Jacobian estimated by finite differences.  Stability is judged
from the determinant and trace of the numeric Jacobian of the full field.
All tolerances are explicit arguments with the documented defaults.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import NumericError
from .game import (
    UNIT_SQUARE_CORNERS,
    EmotionProfile,
    GameState,
    PayoffMatrix,
    _advantages,
    _coeffs,
    drift,
)

DEDUP_RADIUS = 1e-6
DET_TOL = 1e-8
TRACE_TOL = 1e-8
INTERIOR_MARGIN = 1e-9


class Stability(str, Enum):
    ESS = "ess"
    SADDLE = "saddle"
    UNSTABLE = "unstable"
    CENTER = "center"
    INDETERMINATE = "indeterminate"


@dataclass(frozen=True)
class Equilibrium:
    point: GameState
    kind: str  # "corner" or "interior"
    corner_index: int | None
    jacobian: np.ndarray | None
    det: float | None
    trace: float | None
    stability: Stability
    note: str | None = None

    def to_dict(self) -> dict:
        return {
            "point": {"p": self.point.p, "q": self.point.q},
            "kind": self.kind,
            "corner_index": self.corner_index,
            "jacobian": None if self.jacobian is None else [list(row) for row in self.jacobian],
            "det": self.det,
            "trace": self.trace,
            "stability": self.stability.value,
            "note": self.note,
        }


def corner_equilibria() -> list[GameState]:
    """The four vertex rest points in canonical order."""
    return [GameState(p, q) for p, q in UNIT_SQUARE_CORNERS]


def _residuals(p: float, q: float, r1: float, r2: float, c) -> tuple[float, float]:
    return _advantages(p, q, r1, r2, c)


def _residual_jacobian(p: float, q: float, r1: float, r2: float, c,
                       h: float = 1e-6) -> np.ndarray:
    """Finite-difference Jacobian of the advantage brackets.

    Evaluation points are clamped into the unit square so fractional
    powers never see a negative base.
    """
    out = np.empty((2, 2))
    for j, (x, fixed) in enumerate(((p, q), (q, p))):
        lo = max(0.0, x - h)
        hi = min(1.0, x + h)
        if j == 0:
            f_hi = _residuals(hi, fixed, r1, r2, c)
            f_lo = _residuals(lo, fixed, r1, r2, c)
        else:
            f_hi = _residuals(fixed, hi, r1, r2, c)
            f_lo = _residuals(fixed, lo, r1, r2, c)
        span = hi - lo
        out[0, j] = (f_hi[0] - f_lo[0]) / span
        out[1, j] = (f_hi[1] - f_lo[1]) / span
    return out


def _newton(p: float, q: float, r1: float, r2: float, c,
            tol: float, max_iter: int) -> tuple[float, float] | None:
    """Damped Newton iteration on the advantage brackets from one start."""
    lo, hi = INTERIOR_MARGIN, 1.0 - INTERIOR_MARGIN
    fp, fq = _residuals(p, q, r1, r2, c)
    for _ in range(max_iter):
        if abs(fp) < tol and abs(fq) < tol:
            return p, q
        jac = _residual_jacobian(p, q, r1, r2, c)
        det = jac[0, 0] * jac[1, 1] - jac[0, 1] * jac[1, 0]
        if not np.isfinite(det) or abs(det) < 1e-14:
            return None
        step_p = (-fp * jac[1, 1] + fq * jac[0, 1]) / det
        step_q = (-fq * jac[0, 0] + fp * jac[1, 0]) / det
        norm = fp * fp + fq * fq
        lam = 1.0
        improved = False
        while lam >= 2.0 ** -20:
            pn = min(hi, max(lo, p + lam * step_p))
            qn = min(hi, max(lo, q + lam * step_q))
            fpn, fqn = _residuals(pn, qn, r1, r2, c)
            if fpn * fpn + fqn * fqn < norm:
                p, q, fp, fq = pn, qn, fpn, fqn
                improved = True
                break
            lam *= 0.5
        if not improved:
            return None
    if abs(fp) < tol and abs(fq) < tol:
        return p, q
    return None


def find_interior_equilibria(profile: EmotionProfile, m: PayoffMatrix,
                             grid_n: int = 11, newton_tol: float = 1e-10,
                             max_iter: int = 200) -> list[GameState]:
    """All distinct interior rest points reachable from the start grid.

    Starts are scanned row-major over a uniform grid of grid_n x grid_n
    interior nodes; converged points within DEDUP_RADIUS of an earlier
    one are dropped, which makes the result order deterministic.
    """
    r1, r2 = profile.r1.r, profile.r2.r
    c = _coeffs(m)
    found: list[tuple[float, float]] = []
    nodes = [(i + 1) / (grid_n + 1) for i in range(grid_n)]
    for p0 in nodes:
        for q0 in nodes:
            root = _newton(p0, q0, r1, r2, c, newton_tol, max_iter)
            if root is None:
                continue
            p, q = root
            if not (INTERIOR_MARGIN < p < 1.0 - INTERIOR_MARGIN
                    and INTERIOR_MARGIN < q < 1.0 - INTERIOR_MARGIN):
                continue
            if any(max(abs(p - fp), abs(q - fq)) <= DEDUP_RADIUS for fp, fq in found):
                continue
            found.append((p, q))
    return [GameState(p, q) for p, q in found]


def interior_equilibrium(profile: EmotionProfile, m: PayoffMatrix,
                         grid_n: int = 11, newton_tol: float = 1e-10,
                         max_iter: int = 200) -> GameState | list[GameState] | None:
    """Interior rest point(s): None, the unique point, or a list of them."""
    points = find_interior_equilibria(profile, m, grid_n, newton_tol, max_iter)
    if not points:
        return None
    if len(points) == 1:
        return points[0]
    return points


def jacobian(at: GameState, profile: EmotionProfile, m: PayoffMatrix,
             h: float = 1e-6) -> np.ndarray:
    """Numeric Jacobian of the full field at a state.

    Central differences with step h; one-sided differences with the same
    h when a coordinate sits within h of 0 or 1.  Raises NumericError on
    non-finite entries.
    """
    out = np.empty((2, 2))
    for j, x in enumerate((at.p, at.q)):
        if x < h:
            lo, hi = x, x + h
        elif x > 1.0 - h:
            lo, hi = x - h, x
        else:
            lo, hi = x - h, x + h
        if j == 0:
            f_hi = drift(GameState(hi, at.q), profile, m)
            f_lo = drift(GameState(lo, at.q), profile, m)
        else:
            f_hi = drift(GameState(at.p, hi), profile, m)
            f_lo = drift(GameState(at.p, lo), profile, m)
        span = hi - lo
        out[0, j] = (f_hi[0] - f_lo[0]) / span
        out[1, j] = (f_hi[1] - f_lo[1]) / span
    if not np.all(np.isfinite(out)):
        raise NumericError(f"non-finite Jacobian entries at ({at.p:.6g}, {at.q:.6g})")
    return out


def _stability(det: float, trace: float, det_tol: float, trace_tol: float) -> Stability:
    if abs(det) <= det_tol:
        return Stability.INDETERMINATE
    if det < 0.0:
        return Stability.SADDLE
    if trace < -trace_tol:
        return Stability.ESS
    if abs(trace) <= trace_tol:
        return Stability.CENTER
    return Stability.UNSTABLE


_NOTE_NONSMOOTH = ("one-sided difference quotients of fractional powers diverge at this "
                   "vertex, so no finite Jacobian exists; classification skipped")
_NOTE_CENTER = ("determinant positive with trace inside tolerance: neutral center, "
                "expect sustained cycling rather than convergence")


def _corner_nonsmooth(p: float, q: float, r1: float, r2: float) -> bool:
    # d(x**r)/dx is unbounded at x=0 for r < 1.
    return (p == 0.0 and r1 < 1.0) or (q == 0.0 and r2 < 1.0)


def classify_all(profile: EmotionProfile, m: PayoffMatrix,
                 grid_n: int = 11, newton_tol: float = 1e-10, max_iter: int = 200,
                 h: float = 1e-6, det_tol: float = DET_TOL,
                 trace_tol: float = TRACE_TOL) -> list[Equilibrium]:
    """Classify the corner rest points and every interior rest point found."""
    r1, r2 = profile.r1.r, profile.r2.r
    results: list[Equilibrium] = []
    for index, corner in enumerate(corner_equilibria(), start=1):
        if _corner_nonsmooth(corner.p, corner.q, r1, r2):
            results.append(Equilibrium(corner, "corner", index, None, None, None,
                                       Stability.INDETERMINATE, _NOTE_NONSMOOTH))
            continue
        try:
            jac = jacobian(corner, profile, m, h)
        except NumericError as exc:
            results.append(Equilibrium(corner, "corner", index, None, None, None,
                                       Stability.INDETERMINATE, str(exc)))
            continue
        results.append(_classified(corner, "corner", index, jac, det_tol, trace_tol))
    for point in find_interior_equilibria(profile, m, grid_n, newton_tol, max_iter):
        try:
            jac = jacobian(point, profile, m, h)
        except NumericError as exc:
            results.append(Equilibrium(point, "interior", None, None, None, None,
                                       Stability.INDETERMINATE, str(exc)))
            continue
        results.append(_classified(point, "interior", None, jac, det_tol, trace_tol))
    return results


def _classified(point: GameState, kind: str, corner_index: int | None,
                jac: np.ndarray, det_tol: float, trace_tol: float) -> Equilibrium:
    det = float(jac[0, 0] * jac[1, 1] - jac[0, 1] * jac[1, 0])
    trace = float(jac[0, 0] + jac[1, 1])
    stability = _stability(det, trace, det_tol, trace_tol)
    note = _NOTE_CENTER if stability is Stability.CENTER else None
    return Equilibrium(point, kind, corner_index, jac, det, trace, stability, note)


def report(profile: EmotionProfile, m: PayoffMatrix, **kwargs) -> dict:
    """JSON-ready equilibrium report for one emotion profile."""
    return {
        "r1": profile.r1.r,
        "r2": profile.r2.r,
        "payoffs": m.as_dict(),
        "payoffs_unchecked": not m.ordering_checked,
        "equilibria": [eq.to_dict() for eq in classify_all(profile, m, **kwargs)],
    }
