"""Rank-dependent expected utility for finite lotteries.

Evaluation proceeds in three steps.  Outcomes are ranked from best payoff
to worst, with equal payoffs merged into a single rank.  Each rank carries
a rank position: the total probability of ending at that payoff or at
anything worse.  A power-shaped emotion curve w(x) = x**r then turns
adjacent rank positions into decision weights, and the value of the
lottery is the weight-payoff sum.  The weights always total one, but they
match the raw probabilities only when r equals one.

The exponent r is the emotion index of the decision maker.  Exponents
below one bend the curve concave and inflate the weight of the best
outcomes (optimism); r = 1 reproduces plain expected value (rationality);
exponents above one push weight toward the worst outcomes (pessimism).
"""

from __future__ import annotations

from dataclasses import dataclass
from math import isfinite
from typing import Iterable, NamedTuple

from .errors import DomainValidationError

# Probabilities must sum to one within this tolerance.
PROB_SUM_TOL = 1e-9
# Payoffs closer than this are treated as the same outcome when ranking.
PAYOFF_MERGE_TOL = 1e-12


@dataclass(frozen=True)
class EmotionIndex:
    """Positive exponent r of the emotion curve w(x) = x**r."""

    r: float

    def __post_init__(self) -> None:
        if not (isinstance(self.r, (int, float)) and isfinite(self.r) and self.r > 0.0):
            raise DomainValidationError(
                f"emotion index must be a positive finite real, got {self.r!r}"
            )
        object.__setattr__(self, "r", float(self.r))

    @property
    def attitude(self) -> str:
        """One of "optimistic" (r < 1), "rational" (r == 1), "pessimistic" (r > 1)."""
        if self.r == 1.0:
            return "rational"
        return "optimistic" if self.r < 1.0 else "pessimistic"

    @classmethod
    def of(cls, value: "EmotionIndex | float") -> "EmotionIndex":
        return value if isinstance(value, EmotionIndex) else cls(float(value))


@dataclass(frozen=True)
class Lottery:
    """Finite lottery given as (payoff, probability) pairs.

    Probabilities must be non-negative and sum to one within PROB_SUM_TOL.
    Duplicate payoffs are allowed; ranking merges them.
    """

    outcomes: tuple[tuple[float, float], ...]

    def __post_init__(self) -> None:
        if not self.outcomes:
            raise DomainValidationError("lottery must contain at least one outcome")
        clean = []
        total = 0.0
        for pair in self.outcomes:
            x, p = pair
            x, p = float(x), float(p)
            if not (isfinite(x) and isfinite(p)):
                raise DomainValidationError(f"non-finite lottery entry {pair!r}")
            if not p >= 0.0:
                raise DomainValidationError(f"negative probability {p!r}")
            clean.append((x, p))
            total += p
        if abs(total - 1.0) > PROB_SUM_TOL:
            raise DomainValidationError(
                f"probabilities sum to {total!r}, expected 1 within {PROB_SUM_TOL}"
            )
        object.__setattr__(self, "outcomes", tuple(clean))

    @classmethod
    def of(cls, pairs: Iterable[tuple[float, float]]) -> "Lottery":
        return cls(tuple((float(x), float(p)) for x, p in pairs))


class RankedOutcome(NamedTuple):
    payoff: float
    probability: float
    rank_position: float


class WeightedOutcome(NamedTuple):
    payoff: float
    weight: float


def emotion_weight(x: float, r: EmotionIndex | float) -> float:
    """Emotion curve w(x) = x**r on the unit interval."""
    r = EmotionIndex.of(r)
    x = float(x)
    if not (isfinite(x) and 0.0 <= x <= 1.0):
        raise DomainValidationError(f"emotion curve argument must lie in [0, 1], got {x!r}")
    # 0**r == 0 for every positive r, so the boundary needs no special case.
    return x ** r.r


def rank_positions(lottery: Lottery) -> list[RankedOutcome]:
    """Rank outcomes best to worst and attach rank positions.

    Outcomes whose payoffs agree within PAYOFF_MERGE_TOL are merged by
    summing their probabilities.  The rank position of an outcome is its
    own probability plus the probability of every worse outcome, so the
    best rank carries position 1 (up to probability round-off).
    """
    ordered = sorted(lottery.outcomes, key=lambda pair: -pair[0])
    merged: list[list[float]] = []
    for x, p in ordered:
        if merged and merged[-1][0] - x <= PAYOFF_MERGE_TOL:
            merged[-1][1] += p
        else:
            merged.append([x, p])
    # Tail-sum probabilities from the worst rank upward.
    out: list[RankedOutcome] = []
    tail = 0.0
    for x, p in reversed(merged):
        tail += p
        out.append(RankedOutcome(x, p, tail))
    out.reverse()
    return out


def decision_weights(lottery: Lottery, r: EmotionIndex | float) -> list[WeightedOutcome]:
    """Decision weight of each merged rank under emotion index r.

    The weight of a rank with probability p and rank position RP is
    w(p + 1 - RP) - w(1 - RP): the increment of the emotion curve across
    the rank's own probability mass, taken from below.  Weights are
    non-negative and sum to one within PROB_SUM_TOL.
    """
    r = EmotionIndex.of(r)
    weighted: list[WeightedOutcome] = []
    # The curve bases are accumulated best-side (1 - RP == mass of strictly
    # better ranks) so that adjacent ranks tile [0, 1] exactly.  Deriving
    # each base from its own tail sum instead would leave ulp-sized gaps at
    # the boundaries, which a fractional exponent near zero amplifies far
    # beyond PROB_SUM_TOL.
    better = 0.0
    for x, p, _ in rank_positions(lottery):
        upper = better + p
        if upper > 1.0:
            upper = 1.0
        weighted.append(WeightedOutcome(x, upper ** r.r - better ** r.r))
        better = upper
    return weighted


def rdeu_value(lottery: Lottery, r: EmotionIndex | float) -> float:
    """Value of the lottery: decision-weighted payoff sum with identity utility."""
    return sum(w * x for x, w in decision_weights(lottery, r))
