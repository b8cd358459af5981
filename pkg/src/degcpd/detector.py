"""Sliding-window change point scan over a snapshot sequence."""
from __future__ import annotations

import csv
import io
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from .core import degree_sequence, empirical_cdf, window_graph
from .stats import NULL_REFERENCES, compare_degrees

TOO_FEW_NODES = "too few nodes"
EMPTY_WINDOW = "empty window"

CSV_COLUMNS = (
    "boundary_index", "window_length", "distance", "p_value", "flagged", "skipped_reason",
    "base_nodes", "other_nodes",
)


class InsufficientDataError(ValueError):
    pass


@dataclass(frozen=True)
class DetectorConfig:
    window_lengths: tuple[int, ...] = (1,)
    alpha: float = 0.90
    bootstrap_replicates: int = 1000
    min_nodes: int = 50
    subsample_nodes: int | None = None
    rng_seed: int = 0
    null_reference: str = "two-sample"

    def __post_init__(self):
        wl = tuple(sorted({int(w) for w in self.window_lengths}))
        if not wl or wl[0] < 1:
            raise ValueError("window_lengths must be a non-empty list of positive integers")
        object.__setattr__(self, "window_lengths", wl)
        if not 0.0 < self.alpha < 1.0:
            raise ValueError("alpha must lie in (0, 1)")
        if self.bootstrap_replicates < 1:
            raise ValueError("bootstrap_replicates must be >= 1")
        if self.min_nodes < 1:
            raise ValueError("min_nodes must be >= 1")
        if self.subsample_nodes is not None and self.subsample_nodes < 1:
            raise ValueError("subsample_nodes must be >= 1")
        if self.null_reference not in NULL_REFERENCES:
            raise ValueError(f"null_reference must be one of {NULL_REFERENCES}")

    def to_dict(self):
        d = asdict(self)
        d["window_lengths"] = list(self.window_lengths)
        return d


@dataclass(frozen=True)
class BoundaryTest:
    boundary_index: int
    window_length: int
    distance: float | None
    p_value: float | None
    flagged: bool
    skipped_reason: str | None = None
    base_nodes: int = 0
    other_nodes: int = 0


@dataclass(frozen=True)
class ChangePoint:
    boundary_index: int
    p_value: float
    scales: tuple[int, ...]
    classification: str


@dataclass
class ChangeReport:
    tests: list[BoundaryTest]
    change_points: list[ChangePoint]
    config: DetectorConfig
    n_snapshots: int = 0

    @property
    def detected(self):
        return [c.boundary_index for c in self.change_points]

    def to_dict(self):
        return {
            "config": self.config.to_dict(),
            "seed": self.config.rng_seed,
            "n_snapshots": self.n_snapshots,
            "tests": [asdict(t) for t in self.tests],
            "change_points": [
                {**asdict(c), "scales": list(c.scales)} for c in self.change_points
            ],
        }

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    def to_csv(self):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for t in self.tests:
            w.writerow([
                t.boundary_index, t.window_length,
                "" if t.distance is None else repr(t.distance),
                "" if t.p_value is None else repr(t.p_value),
                int(t.flagged), t.skipped_reason or "", t.base_nodes, t.other_nodes,
            ])
        return buf.getvalue()


def load_report(path):
    with open(path) as fh:
        d = json.load(fh)
    cfg = DetectorConfig(**d["config"])
    tests = [BoundaryTest(**t) for t in d["tests"]]
    cps = [ChangePoint(**{**c, "scales": tuple(c["scales"])}) for c in d["change_points"]]
    return ChangeReport(tests, cps, cfg, d.get("n_snapshots", 0))


def _stream(seed, *key):
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=key))


# spawn-key tags: subsampling is keyed by window, bootstrap by boundary
_SUBSAMPLE, _BOOTSTRAP = 0, 1


@dataclass(frozen=True)
class WindowDegrees:
    start: int
    length: int
    n_nodes: int
    degrees: np.ndarray | None = None
    skipped_reason: str | None = None

    @property
    def cdf(self):
        return None if self.degrees is None else empirical_cdf(self.degrees)


def window_degrees(snapshots, start, length, config: DetectorConfig, rng=None):
    """Degrees used for the window ``[start, start + length)``, or a skip marker.

    With subsampling on and more nodes than ``subsample_nodes``, a uniform
    sample of nodes is drawn without replacement and their degrees in the
    full window graph are kept. Degrees are returned sorted, which makes the
    sample independent of node labels.
    """
    g = window_graph(snapshots, start, length).graph
    n = g.n_nodes
    if n == 0:
        return WindowDegrees(start, length, 0, skipped_reason=EMPTY_WINDOW)
    if n < config.min_nodes:
        return WindowDegrees(start, length, n, skipped_reason=TOO_FEW_NODES)
    deg = np.sort(degree_sequence(g))
    k = config.subsample_nodes
    if k is not None and n > k:
        if rng is None:
            rng = _stream(config.rng_seed, _SUBSAMPLE, length, start)
        deg = deg[np.sort(rng.choice(n, size=k, replace=False))]
    return WindowDegrees(start, length, n, deg)


def window_cdf(snapshots, start, length, config: DetectorConfig, rng=None):
    """Empirical degree CDF of a window, or the skip reason string."""
    w = window_degrees(snapshots, start, length, config, rng)
    return w.skipped_reason if w.degrees is None else w.cdf


def _test_boundary(windows, i, w, config):
    base, other = windows[(w, i - w)], windows[(w, i)]
    reason = base.skipped_reason or other.skipped_reason
    if reason is not None:
        return BoundaryTest(i, w, None, None, False, reason, base.n_nodes, other.n_nodes)
    dist, res = compare_degrees(
        base.degrees, other.degrees, config.bootstrap_replicates, config.null_reference,
        _stream(config.rng_seed, _BOOTSTRAP, w, i),
    )
    return BoundaryTest(
        i, w, dist, res.p_value, res.p_value > config.alpha, None, base.n_nodes, other.n_nodes
    )


def merge_flags(tests, largest_scale):
    """Collapse flagged tests into change points.

    Tests are first grouped per boundary (max p, agreeing scales). Flagged
    boundaries closer than the window length then form one cluster, reported
    at its highest-p boundary (ties go to the earlier one).
    """
    per_boundary = {}
    for t in tests:
        if not t.flagged:
            continue
        p, scales = per_boundary.get(t.boundary_index, (-1.0, set()))
        per_boundary[t.boundary_index] = (max(p, t.p_value), scales | {t.window_length})

    clusters = []
    for b in sorted(per_boundary):
        if clusters:
            prev = clusters[-1][-1]
            reach = max(max(per_boundary[prev][1]), max(per_boundary[b][1]))
            if b - prev < reach:
                clusters[-1].append(b)
                continue
        clusters.append([b])

    out = []
    for members in clusters:
        best = max(members, key=lambda b: (per_boundary[b][0], -b))
        scales = set().union(*(per_boundary[b][1] for b in members))
        kind = "change point" if largest_scale in scales else "anomaly"
        out.append(ChangePoint(best, per_boundary[best][0], tuple(sorted(scales)), kind))
    return out


def scan(snapshots, config: DetectorConfig, threads=1):
    """Test every boundary at every window length and merge the flags.

    At boundary ``i`` with window length ``W`` the earlier window
    ``[i - W, i)`` is the bootstrap base and ``[i, i + W)`` the comparison.
    Randomness is keyed on (window length, position) so the report is the
    same for any ``threads``.
    """
    n = len(snapshots)
    if n < 2 * config.window_lengths[0]:
        raise InsufficientDataError(
            f"too few snapshots: {n} < 2 x smallest window length {config.window_lengths[0]}"
        )
    scales = [w for w in config.window_lengths if 2 * w <= n]

    window_keys = [(w, s) for w in scales for s in range(n - w + 1)]
    boundary_keys = [(w, i) for w in scales for i in range(w, n - w + 1)]

    def build_window(key):
        w, s = key
        return window_degrees(snapshots, s, w, config)

    def run_boundary(key):
        w, i = key
        return _test_boundary(windows, i, w, config)

    if threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            windows = dict(zip(window_keys, pool.map(build_window, window_keys)))
            tests = list(pool.map(run_boundary, boundary_keys))
    else:
        windows = {k: build_window(k) for k in window_keys}
        tests = [run_boundary(k) for k in boundary_keys]

    if all(t.skipped_reason is not None for t in tests):
        raise InsufficientDataError("insufficient data at every boundary")
    return ChangeReport(tests, merge_flags(tests, max(scales)), config, n)
