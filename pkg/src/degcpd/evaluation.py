"""Precision/recall scoring of detections against planted change points."""
from __future__ import annotations

import csv
import io
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, replace

import numpy as np

from .detector import DetectorConfig, scan
from .synthgen import GroundTruth, ScenarioSpec, generate_scenario


@dataclass(frozen=True)
class EvalResult:
    true_positives: int
    false_positives: int
    false_negatives: int
    matches: tuple[tuple[int, int], ...] = field(default_factory=tuple)

    @property
    def precision(self):
        """TP / (TP + FP), or None when nothing was detected."""
        d = self.true_positives + self.false_positives
        return self.true_positives / d if d else None

    @property
    def recall(self):
        d = self.true_positives + self.false_negatives
        return self.true_positives / d if d else None

    def to_dict(self):
        return {
            "true_positives": self.true_positives,
            "false_positives": self.false_positives,
            "false_negatives": self.false_negatives,
            "precision": _na(self.precision),
            "recall": _na(self.recall),
            "matches": [list(m) for m in self.matches],
        }


def _na(x):
    return "n/a" if x is None else x


def match_detections(detected, truth, tolerance=1):
    """One-to-one matching, closest pairs first.

    A detection and a true change can pair when they are at most
    ``tolerance`` apart. Among equally close pairs the earlier detection,
    then the earlier true change, wins.
    """
    detected = [int(d) for d in detected]
    truth = [int(t) for t in (truth.change_indices if isinstance(truth, GroundTruth) else truth)]
    tolerance = int(tolerance)
    candidates = sorted(
        (abs(d - t), d, t)
        for d in set(detected)
        for t in truth[np.searchsorted(truth, d - tolerance):np.searchsorted(truth, d + tolerance, "right")]
    ) if truth else []
    used_d, used_t, matches = set(), set(), []
    for _, d, t in candidates:
        if d in used_d or t in used_t:
            continue
        used_d.add(d)
        used_t.add(t)
        matches.append((d, t))
    matches.sort()
    tp = len(matches)
    return EvalResult(tp, len(detected) - tp, len(truth) - tp, tuple(matches))


@dataclass(frozen=True)
class Aggregate:
    """Mean and sample standard deviation over repeats.

    Repeats where a metric is n/a are left out; ``n`` counts the ones used.
    """

    mean: float | None
    std: float | None
    n: int

    @classmethod
    def of(cls, values):
        vals = np.array([v for v in values if v is not None], dtype=float)
        if vals.size == 0:
            return cls(None, None, 0)
        std = float(vals.std(ddof=1)) if vals.size > 1 else None
        return cls(float(vals.mean()), std, int(vals.size))


@dataclass
class ExperimentResult:
    precision: Aggregate
    recall: Aggregate
    runs: list[EvalResult]
    spec: ScenarioSpec
    config: DetectorConfig
    tolerance: int

    def to_dict(self):
        return {
            "precision": asdict(self.precision),
            "recall": asdict(self.recall),
            "tolerance": self.tolerance,
            "scenario": self.spec.to_dict(),
            "detector": self.config.to_dict(),
            "runs": [r.to_dict() for r in self.runs],
        }

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    def to_csv(self):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["repeat", "true_positives", "false_positives", "false_negatives",
                    "precision", "recall"])
        for i, r in enumerate(self.runs):
            w.writerow([i, r.true_positives, r.false_positives, r.false_negatives,
                        _na(r.precision), _na(r.recall)])
        return buf.getvalue()


def repeat_seeds(seed, repeats):
    """Independent (scenario, detector) integer seeds for each repeat."""
    children = np.random.SeedSequence(seed).spawn(repeats)
    return [tuple(int(x) for x in c.generate_state(2, dtype=np.uint64)) for c in children]


def run_experiment(spec: ScenarioSpec, config: DetectorConfig, repeats=10, tolerance=1,
                   threads=1, seed=None):
    """Generate, scan and score ``repeats`` scenarios.

    Per-repeat seeds come from ``seed`` (default: the scenario's own seed), so
    results do not depend on ``threads`` or on run order.
    """
    if repeats < 1:
        raise ValueError("repeats must be >= 1")
    seeds = repeat_seeds(spec.rng_seed if seed is None else seed, repeats)

    def one(pair):
        s_seed, d_seed = pair
        snaps, truth = generate_scenario(replace(spec, rng_seed=s_seed))
        report = scan(snaps, replace(config, rng_seed=d_seed))
        return match_detections(report.detected, truth, tolerance)

    if threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            runs = list(pool.map(one, seeds))
    else:
        runs = [one(p) for p in seeds]
    return ExperimentResult(
        Aggregate.of(r.precision for r in runs),
        Aggregate.of(r.recall for r in runs),
        runs, spec, config, tolerance,
    )


def format_table(rows):
    """Plain-text table of ``(name, ExperimentResult)`` pairs."""

    def cell(a):
        if a.mean is None:
            return "n/a"
        return f"{a.mean:.3f}, {'n/a' if a.std is None else f'{a.std:.3f}'}"

    lines = [f"{'experiment':<16}{'precision (mean, std)':<26}{'recall (mean, std)':<24}"]
    for name, res in rows:
        lines.append(f"{name:<16}{cell(res.precision):<26}{cell(res.recall):<24}")
    return "\n".join(lines)
