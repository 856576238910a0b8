"""Emotion-weighted evolutionary game of rumor spreading.

Netizens decide whether to spread a rumor while a government decides
whether to monitor actively.  Both sides evaluate their options through
rank-dependent expected utility with power-shaped emotion curves, which
bends the classical replicator dynamics.  The package simulates the
resulting field, finds and classifies its rest points, sweeps emotion
parameters, and maps the outcomes onto a five-regime governance taxonomy.
"""

from .dynamics import (
    IntegratorConfig,
    OutcomeClass,
    OutcomeKind,
    Trajectory,
    classify_outcome,
    integrate,
)
from .equilibria import (
    Equilibrium,
    Stability,
    classify_all,
    corner_equilibria,
    find_interior_equilibria,
    interior_equilibrium,
    jacobian,
)
from .errors import (
    DomainValidationError,
    InsufficientDataError,
    NumericError,
    RumorGameError,
)
from .game import (
    EmotionProfile,
    GameState,
    PayoffMatrix,
    drift,
    e_u_government,
    e_u_netizen,
    government_lottery,
    monitor_advantage,
    netizen_lottery,
    spread_advantage,
    u_monitor,
    u_spread,
)
from .rdeu import (
    EmotionIndex,
    Lottery,
    decision_weights,
    emotion_weight,
    rank_positions,
    rdeu_value,
)
from .sweep import (
    Crossing,
    Regime,
    RegimeLabel,
    SweepGrid,
    ThresholdResult,
    event_scan,
    find_threshold,
    regime_label,
    sweep_grid,
)

__version__ = "0.1.0"

__all__ = [
    "DomainValidationError", "InsufficientDataError", "NumericError", "RumorGameError",
    "EmotionIndex", "Lottery", "decision_weights", "emotion_weight",
    "rank_positions", "rdeu_value",
    "EmotionProfile", "GameState", "PayoffMatrix", "drift",
    "e_u_government", "e_u_netizen", "government_lottery", "monitor_advantage",
    "netizen_lottery", "spread_advantage", "u_monitor", "u_spread",
    "IntegratorConfig", "OutcomeClass", "OutcomeKind", "Trajectory",
    "classify_outcome", "integrate",
    "Equilibrium", "Stability", "classify_all", "corner_equilibria",
    "find_interior_equilibria", "interior_equilibrium", "jacobian",
    "Crossing", "Regime", "RegimeLabel", "SweepGrid", "ThresholdResult",
    "event_scan", "find_threshold", "regime_label", "sweep_grid",
    "__version__",
]
