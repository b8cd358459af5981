"""Change point detection for evolving networks from degree distributions."""
from ._accel import BACKEND
from .core import (
    EmpiricalCdf,
    SnapshotGraph,
    WindowGraph,
    degree_sequence,
    empirical_cdf,
    union_graph,
    window_graph,
)
from .detector import BoundaryTest, ChangePoint, ChangeReport, DetectorConfig, scan, window_cdf
from .evaluation import EvalResult, match_detections, run_experiment
from .presets import preset
from .stats import (
    BootstrapResult,
    bootstrap_distances,
    bootstrap_distances_two_sample,
    bootstrap_pvalue,
    ks_statistic,
)
from .synthgen import (
    GroundTruth,
    ModelConfig,
    ScenarioSpec,
    generate_caveman,
    generate_er,
    generate_scenario,
)

__version__ = "0.1.0"
