import json

import pytest
from hypothesis import given
from hypothesis import strategies as st

from degcpd.detector import DetectorConfig
from degcpd.evaluation import Aggregate, match_detections, run_experiment
from degcpd.synthgen import GroundTruth, ModelConfig, ScenarioSpec


def test_identity():
    r = match_detections([3, 8, 15], GroundTruth((3, 8, 15)))
    assert (r.precision, r.recall) == (1.0, 1.0)


def test_shift_by_tolerance():
    r = match_detections([5, 10, 17], [3, 8, 15], tolerance=2)
    assert (r.precision, r.recall) == (1.0, 1.0)
    r = match_detections([6, 23, 43], [3, 20, 40], tolerance=2)
    assert (r.true_positives, r.precision, r.recall) == (0, 0.0, 0.0)


def test_empty_detections():
    r = match_detections([], [4, 9])
    assert r.recall == 0.0 and r.precision is None
    assert r.to_dict()["precision"] == "n/a"


def test_empty_truth():
    r = match_detections([4], [])
    assert r.precision == 0.0 and r.recall is None


def test_one_to_one_nearest_first():
    # 4 is closest to 5; 6 then only reaches 5 (taken) -> FP
    r = match_detections([4, 6], [5], tolerance=1)
    assert r.matches == ((4, 5),) and r.false_positives == 1
    r = match_detections([5, 6], [4, 6], tolerance=1)
    assert r.matches == ((5, 4), (6, 6))


sorted_ints = st.lists(st.integers(0, 200), max_size=30, unique=True).map(sorted)


@given(sorted_ints, sorted_ints, st.integers(0, 5), st.integers(-50, 50))
def test_matching_properties(det, truth, tol, shift):
    r = match_detections(det, truth, tol)
    assert r.true_positives + r.false_positives == len(det)
    assert r.true_positives + r.false_negatives == len(truth)
    assert len({d for d, _ in r.matches}) == len({t for _, t in r.matches}) == r.true_positives
    assert all(abs(d - t) <= tol for d, t in r.matches)
    moved = match_detections([d + shift for d in det], [t + shift for t in truth], tol)
    assert moved.matches == tuple((d + shift, t + shift) for d, t in r.matches)
    assert match_detections(det, truth, tol + 1).true_positives >= r.true_positives


def test_aggregate_sample_std_and_na():
    a = Aggregate.of([1.0, 0.5, None])
    assert a.mean == 0.75 and a.n == 2
    assert a.std == pytest.approx(0.3535533905932738)
    assert Aggregate.of([None]).mean is None
    assert Aggregate.of([0.4]).std is None


def test_run_experiment_small():
    spec = ScenarioSpec(ModelConfig("erdos-renyi", 100, er_p=0.01),
                        ModelConfig("erdos-renyi", 100, er_p=0.08), num_changes=6, rng_seed=4)
    cfg = DetectorConfig(bootstrap_replicates=200)
    res = run_experiment(spec, cfg, repeats=3, tolerance=1)
    assert res.recall.n == 3 and res.recall.mean == 1.0
    again = run_experiment(spec, cfg, repeats=3, tolerance=1, threads=3)
    assert res.to_json() == again.to_json()
    d = json.loads(res.to_json())
    assert d["precision"]["n"] == 3
    assert res.to_csv().splitlines()[0] == (
        "repeat,true_positives,false_positives,false_negatives,precision,recall")


def test_run_experiment_needs_repeats():
    spec = ScenarioSpec(ModelConfig("erdos-renyi", 10), ModelConfig("erdos-renyi", 10))
    with pytest.raises(ValueError):
        run_experiment(spec, DetectorConfig(), repeats=0)
