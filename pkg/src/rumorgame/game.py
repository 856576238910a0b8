"""Two-population rumor game between netizens and a monitoring government.

Netizens either spread a rumor or stay silent; the government either
monitors actively or leaves the field alone.  The state (p, q) holds the
population share p of spreading netizens and q of active monitoring.
Each side judges its options with rank-dependent weights (module rdeu),
so a strategy's growth rate is its emotion-weighted advantage over the
population average, scaled by p**r1 (netizens) or q**r2 (government)
instead of the classical p(1-p) and q(1-q) prefactors.  At r1 = r2 = 1
the field reduces exactly to standard two-population replicator dynamics.

The advantage brackets are implemented from factored closed forms; the
generic lottery evaluation in module rdeu is kept as a cross-check, and
`netizen_lottery` / `government_lottery` expose the underlying lotteries
for that purpose.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import isfinite

from .errors import DomainValidationError
from .rdeu import EmotionIndex, Lottery

# Payoffs of (gamma, delta) must agree within this tolerance.
GAMMA_DELTA_TOL = 1e-12

# Vertices of the unit square in canonical order:
# (0,0), (0,1), (1,0), (1,1) indexed 1..4 elsewhere.
UNIT_SQUARE_CORNERS: tuple[tuple[float, float], ...] = (
    (0.0, 0.0),
    (0.0, 1.0),
    (1.0, 0.0),
    (1.0, 1.0),
)


@dataclass(frozen=True)
class PayoffMatrix:
    """Payoffs of the four strategy pairs.

    Netizen side: alpha for spreading into active monitoring, beta for
    spreading unhindered, gamma/delta for staying silent (monitored or
    not).  Government side: epsilon for catching a spreading rumor, zeta
    for missing one, eta for monitoring in vain, theta for calm and no
    monitoring.  The intended orderings are beta > gamma = delta > alpha
    and epsilon > theta > eta > zeta; `unchecked` skips that validation
    for exploratory payoffs and marks the instance accordingly.
    """

    alpha: float
    beta: float
    gamma: float
    delta: float
    epsilon: float
    zeta: float
    eta: float
    theta: float
    ordering_checked: bool = field(default=True, compare=False)

    def __post_init__(self) -> None:
        for name in ("alpha", "beta", "gamma", "delta", "epsilon", "zeta", "eta", "theta"):
            value = getattr(self, name)
            if not (isinstance(value, (int, float)) and isfinite(value)):
                raise DomainValidationError(f"payoff {name} must be a finite real, got {value!r}")
            object.__setattr__(self, name, float(value))
        if self.ordering_checked:
            if not self.beta > self.gamma:
                raise DomainValidationError("netizen ordering violated: beta must exceed gamma")
            if abs(self.gamma - self.delta) > GAMMA_DELTA_TOL:
                raise DomainValidationError("netizen ordering violated: gamma and delta must coincide")
            if not (self.gamma > self.alpha and self.delta > self.alpha):
                raise DomainValidationError("netizen ordering violated: gamma/delta must exceed alpha")
            if not (self.epsilon > self.theta > self.eta > self.zeta):
                raise DomainValidationError(
                    "government ordering violated: need epsilon > theta > eta > zeta"
                )

    @classmethod
    def baseline(cls) -> "PayoffMatrix":
        """Reference payoffs used throughout the analysis and as CLI defaults."""
        return cls(
            alpha=-3.0, beta=3.0, gamma=0.5, delta=0.5,
            epsilon=1.0, zeta=-4.0, eta=-3.0, theta=0.0,
        )

    @classmethod
    def unchecked(cls, alpha: float, beta: float, gamma: float, delta: float,
                  epsilon: float, zeta: float, eta: float, theta: float) -> "PayoffMatrix":
        """Construct without ordering validation; outputs carry a warning flag."""
        return cls(alpha, beta, gamma, delta, epsilon, zeta, eta, theta,
                   ordering_checked=False)

    def as_dict(self) -> dict[str, float]:
        return {
            "alpha": self.alpha, "beta": self.beta,
            "gamma": self.gamma, "delta": self.delta,
            "epsilon": self.epsilon, "zeta": self.zeta,
            "eta": self.eta, "theta": self.theta,
        }


@dataclass(frozen=True)
class EmotionProfile:
    """Emotion indices of the two populations (netizens first)."""

    r1: EmotionIndex
    r2: EmotionIndex

    def __post_init__(self) -> None:
        object.__setattr__(self, "r1", EmotionIndex.of(self.r1))
        object.__setattr__(self, "r2", EmotionIndex.of(self.r2))


@dataclass(frozen=True)
class GameState:
    """Strategy frequencies: share p of spreading, share q of monitoring."""

    p: float
    q: float

    def __post_init__(self) -> None:
        for name in ("p", "q"):
            value = getattr(self, name)
            if not (isinstance(value, (int, float)) and isfinite(value) and 0.0 <= value <= 1.0):
                raise DomainValidationError(f"state coordinate {name} must lie in [0, 1], got {value!r}")
            object.__setattr__(self, name, float(value))


def _check_unit(value: float, name: str) -> float:
    value = float(value)
    if not (isfinite(value) and 0.0 <= value <= 1.0):
        raise DomainValidationError(f"{name} must lie in [0, 1], got {value!r}")
    return value


def u_spread(q: float, profile: EmotionProfile, m: PayoffMatrix) -> float:
    """Emotion-weighted payoff a spreading netizen expects at monitoring level q."""
    q = _check_unit(q, "q")
    return m.beta + (m.alpha - m.beta) * q ** profile.r2.r


def e_u_netizen(state: GameState, profile: EmotionProfile, m: PayoffMatrix) -> float:
    """Population-average emotion-weighted payoff on the netizen side."""
    r1 = profile.r1.r
    pq = state.p * state.q
    sp = state.p - pq
    return ((m.beta - m.gamma) * sp ** r1
            + (m.gamma - m.alpha) * (1.0 - pq) ** r1
            + m.alpha)


def u_monitor(p: float, profile: EmotionProfile, m: PayoffMatrix) -> float:
    """Emotion-weighted payoff of active monitoring at spreading level p."""
    p = _check_unit(p, "p")
    return m.eta + (m.epsilon - m.eta) * p ** profile.r1.r


def e_u_government(state: GameState, profile: EmotionProfile, m: PayoffMatrix) -> float:
    """Population-average emotion-weighted payoff on the government side."""
    r2 = profile.r2.r
    p, q = state.p, state.q
    pq = p * q
    sp = p - pq
    return ((m.epsilon - m.theta) * pq ** r2
            + (m.theta - m.eta) * ((1.0 - p) * (1.0 - q) + pq) ** r2
            + (m.eta - m.zeta) * (1.0 - sp) ** r2
            + m.zeta)


def _coeffs(m: PayoffMatrix) -> tuple[float, float, float, float, float, float, float]:
    """Payoff differences used by the advantage brackets."""
    return (m.alpha - m.beta, m.beta - m.gamma, m.gamma - m.alpha,
            m.eta - m.zeta, m.epsilon - m.eta, m.epsilon - m.theta,
            m.theta - m.eta)


def _advantages(p, q, r1, r2, c):
    """Advantage brackets at (p, q); works on floats and numpy arrays alike.

    Returns (spread advantage, monitor advantage): the emotion-weighted
    payoff of the strategy minus the population average on its side.
    Every power base is one of p(1-q), pq, 1-pq, 1-p(1-q) or
    (1-p)(1-q)+pq, all of which stay inside [0, 1] on the unit square.
    """
    ab, bg, ga, hz, eh, et, th = c
    pq = p * q
    sp = p - pq
    vp = ab * (q ** r2 - 1.0) - bg * sp ** r1 - ga * (1.0 - pq) ** r1
    vq = (hz * (1.0 - (1.0 - sp) ** r2) + eh * p ** r1
          - et * pq ** r2 - th * ((1.0 - p) * (1.0 - q) + pq) ** r2)
    return vp, vq


def spread_advantage(state: GameState, profile: EmotionProfile, m: PayoffMatrix) -> float:
    """u_spread minus e_u_netizen, in factored closed form."""
    vp, _ = _advantages(state.p, state.q, profile.r1.r, profile.r2.r, _coeffs(m))
    return vp


def monitor_advantage(state: GameState, profile: EmotionProfile, m: PayoffMatrix) -> float:
    """u_monitor minus e_u_government, in factored closed form."""
    _, vq = _advantages(state.p, state.q, profile.r1.r, profile.r2.r, _coeffs(m))
    return vq


def drift(state: GameState, profile: EmotionProfile, m: PayoffMatrix) -> tuple[float, float]:
    """Growth rates (dp/dt, dq/dt) of the emotion-weighted replicator field."""
    r1, r2 = profile.r1.r, profile.r2.r
    vp, vq = _advantages(state.p, state.q, r1, r2, _coeffs(m))
    return state.p ** r1 * vp, state.q ** r2 * vq


def netizen_lottery(state: GameState, m: PayoffMatrix) -> Lottery:
    """Four-outcome lottery a netizen faces at state (p, q)."""
    p, q = state.p, state.q
    return Lottery.of([
        (m.alpha, p * q),
        (m.beta, p * (1.0 - q)),
        (m.gamma, (1.0 - p) * q),
        (m.delta, (1.0 - p) * (1.0 - q)),
    ])


def government_lottery(state: GameState, m: PayoffMatrix) -> Lottery:
    """Four-outcome lottery the government faces at state (p, q)."""
    p, q = state.p, state.q
    return Lottery.of([
        (m.epsilon, p * q),
        (m.zeta, p * (1.0 - q)),
        (m.eta, (1.0 - p) * q),
        (m.theta, (1.0 - p) * (1.0 - q)),
    ])
