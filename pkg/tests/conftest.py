import pytest

from rumorgame import (EmotionProfile, GameState, IntegratorConfig,
                       PayoffMatrix, classify_outcome, integrate)


@pytest.fixture(scope="session")
def baseline():
    return PayoffMatrix.baseline()


@pytest.fixture(scope="session")
def default_cfg():
    return IntegratorConfig()


@pytest.fixture(scope="session")
def half_start():
    return GameState(0.5, 0.5)


@pytest.fixture(scope="session")
def run_scenario(baseline, default_cfg, half_start):
    """Memoized (trajectory, outcome) for a profile from the (0.5, 0.5) start.

    Several test modules probe the same handful of profiles; integrating
    each once keeps the suite fast without hiding any state (integration
    is deterministic).
    """
    cache = {}

    def run(r1, r2):
        key = (r1, r2)
        if key not in cache:
            traj = integrate(half_start, EmotionProfile(r1, r2), baseline, default_cfg)
            cache[key] = (traj, classify_outcome(traj))
        return cache[key]

    return run
