"""Named scenario and detector settings for the synthetic experiments."""
from .detector import DetectorConfig
from .synthgen import ModelConfig, ScenarioSpec


def _er(p):
    return ModelConfig("erdos-renyi", 200, er_p=p)


def _cave(p):
    return ModelConfig("caveman", 200, communities=5, rewire_p=p)


SCENARIOS = {
    # fragmented <-> connected ER
    "exp1": ScenarioSpec(_er(0.003), _er(0.009)),
    # two connected ER regimes
    "exp2": ScenarioSpec(_er(0.1), _er(0.15)),
    "exp3": ScenarioSpec(_cave(0.4), _cave(0.7)),
    # caveman with per-snapshot sizes drawn from U(200, 1000)
    "exp3-varying": ScenarioSpec(_cave(0.4), _cave(0.7), size_range=(200, 1000)),
    "minimal": ScenarioSpec(_er(0.003), _er(0.009), num_changes=1,
                            run_length_mean=1.0, run_length_var=0.0),
}

DETECTORS = {
    "exp1": DetectorConfig(),
    "exp2": DetectorConfig(),
    "exp3": DetectorConfig(),
    "exp3-varying": DetectorConfig(subsample_nodes=200),
    "minimal": DetectorConfig(),
}


def preset(name):
    """``(ScenarioSpec, DetectorConfig)`` for a named preset."""
    try:
        return SCENARIOS[name], DETECTORS[name]
    except KeyError:
        raise KeyError(f"unknown preset {name!r}; choose from {sorted(SCENARIOS)}") from None
