import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from degcpd.core import SnapshotGraph, degree_sequence, empirical_cdf
from degcpd.detector import (
    EMPTY_WINDOW,
    TOO_FEW_NODES,
    BoundaryTest,
    ChangeReport,
    DetectorConfig,
    InsufficientDataError,
    load_report,
    merge_flags,
    scan,
    window_cdf,
    window_degrees,
)
from degcpd.synthgen import generate_er


def er_stream(ps, n=200, seed=0):
    return [SnapshotGraph(i, *(lambda g: (g.nodes, g.edges))(generate_er(n, p, seed * 10_000 + i)))
            for i, p in enumerate(ps)]


CFG = DetectorConfig(bootstrap_replicates=200, rng_seed=1)


def test_window_of_one_snapshot_is_its_cdf(make_graph):
    snaps = er_stream([0.02, 0.02])
    cdf = window_cdf(snaps, 1, 1, CFG)
    ref = empirical_cdf(degree_sequence(snaps[1]))
    assert cdf.support.tolist() == ref.support.tolist()
    assert cdf.cumcounts.tolist() == ref.cumcounts.tolist()


def test_window_too_few_nodes(make_graph):
    g = make_graph([(i, i + 1) for i in range(29)])
    assert g.n_nodes == 30
    assert window_cdf([g], 0, 1, DetectorConfig(min_nodes=50)) == TOO_FEW_NODES


def test_window_empty(make_graph):
    empty = SnapshotGraph(0, [], np.empty((0, 2)), events=0)
    assert window_cdf([empty], 0, 1, CFG) == EMPTY_WINDOW


def test_window_out_of_range():
    with pytest.raises(IndexError):
        window_cdf(er_stream([0.02]), 0, 2, CFG)


def test_subsample_uses_full_graph_degrees():
    # star: centre has degree 99, leaves degree 1
    g = SnapshotGraph.from_edges(0, [(0, i) for i in range(1, 100)])
    cfg = DetectorConfig(subsample_nodes=20, rng_seed=3)
    w = window_degrees([g], 0, 1, cfg)
    assert len(w.degrees) == 20 and w.n_nodes == 100
    assert set(w.degrees.tolist()) <= {1, 99}
    # same window, same sample
    assert np.array_equal(w.degrees, window_degrees([g], 0, 1, cfg).degrees)


def test_identical_stream_flags_nothing():
    g = er_stream([0.03])[0]
    snaps = [SnapshotGraph(i, g.nodes, g.edges) for i in range(12)]
    rep = scan(snaps, DetectorConfig(window_lengths=(1, 2), bootstrap_replicates=200))
    assert rep.change_points == []
    assert all(t.distance == 0.0 and t.p_value == 0.0 and not t.flagged for t in rep.tests)


def test_detects_obvious_switch():
    snaps = er_stream([0.003] * 5 + [0.05] * 5)
    rep = scan(snaps, CFG)
    switch = [t for t in rep.tests if t.boundary_index == 5][0]
    assert switch.flagged and switch.p_value == 1.0
    assert 5 in rep.detected
    assert all(c.classification == "change point" for c in rep.change_points)


def test_boundaries_and_scales_enumerated_once():
    snaps = er_stream([0.02] * 9)
    rep = scan(snaps, DetectorConfig(window_lengths=(1, 2, 4), bootstrap_replicates=50))
    keys = [(t.window_length, t.boundary_index) for t in rep.tests]
    assert len(keys) == len(set(keys))
    expected = {(w, i) for w in (1, 2, 4) for i in range(w, 9 - w + 1)}
    assert set(keys) == expected
    for t in rep.tests:
        assert t.flagged == (t.skipped_reason is None and t.p_value > rep.config.alpha)


def test_too_few_snapshots():
    with pytest.raises(InsufficientDataError, match="too few snapshots"):
        scan(er_stream([0.02]), CFG)


def test_all_windows_skipped():
    snaps = er_stream([0.02, 0.02], n=20)
    with pytest.raises(InsufficientDataError, match="insufficient data at every boundary"):
        scan(snaps, CFG)


def test_skipped_boundaries_are_reported():
    small = er_stream([0.1], n=20)[0]
    snaps = er_stream([0.02, 0.02]) + [SnapshotGraph(2, small.nodes, small.edges)]
    rep = scan(snaps, CFG)
    assert [t.skipped_reason for t in rep.tests] == [None, TOO_FEW_NODES]
    assert not rep.tests[1].flagged


def test_deterministic_and_thread_independent():
    snaps = er_stream([0.003] * 4 + [0.009] * 4 + [0.003] * 4, seed=2)
    cfg = DetectorConfig(window_lengths=(1, 2), bootstrap_replicates=300, rng_seed=5)
    a = scan(snaps, cfg).to_json()
    assert a == scan(snaps, cfg).to_json()
    assert a == scan(snaps, cfg, threads=4).to_json()


def test_node_renaming_invariance():
    snaps = er_stream([0.003] * 4 + [0.009] * 4, seed=3)
    perm = np.random.default_rng(0).permutation(1000)[:200] + 17
    renamed = [SnapshotGraph(s.index, perm[s.nodes], perm[s.edges]) for s in snaps]
    cfg = DetectorConfig(window_lengths=(1, 2), bootstrap_replicates=300, rng_seed=5)
    assert scan(snaps, cfg).to_json() == scan(renamed, cfg).to_json()


def test_raising_alpha_never_adds_flags():
    snaps = er_stream([0.003] * 3 + [0.009] * 3 + [0.003] * 3, seed=4)
    counts = []
    for alpha in (0.5, 0.8, 0.9, 0.95, 0.99):
        rep = scan(snaps, DetectorConfig(alpha=alpha, bootstrap_replicates=300, rng_seed=2))
        counts.append(sum(t.flagged for t in rep.tests))
    assert counts == sorted(counts, reverse=True)


def T(i, w, p):
    return BoundaryTest(i, w, 0.5, p, True)


def test_merge_keeps_adjacent_at_scale_one():
    cps = merge_flags([T(4, 1, 0.95), T(5, 1, 0.99)], largest_scale=1)
    assert [c.boundary_index for c in cps] == [4, 5]


def test_merge_within_window_picks_max_p_then_earliest():
    cps = merge_flags([T(4, 2, 0.95), T(5, 2, 0.99), T(6, 2, 0.99), T(9, 2, 0.97)], 2)
    assert [(c.boundary_index, c.p_value) for c in cps] == [(5, 0.99), (9, 0.97)]


def test_merge_across_scales_and_classification():
    tests = [T(10, 1, 0.93), T(10, 4, 0.999), T(11, 2, 0.96), T(30, 1, 0.97)]
    cps = merge_flags(tests, largest_scale=4)
    assert [(c.boundary_index, c.scales, c.classification) for c in cps] == [
        (10, (1, 2, 4), "change point"),
        (30, (1,), "anomaly"),
    ]


def test_unflagged_tests_ignored():
    assert merge_flags([BoundaryTest(3, 1, 0.1, 0.2, False)], 1) == []


@given(st.lists(st.tuples(st.integers(0, 60), st.sampled_from([1, 2, 4]),
                          st.floats(0.9, 1.0)), max_size=40))
def test_merge_change_points_reference_flags(items):
    tests = [T(i, w, p) for i, w, p in items]
    cps = merge_flags(tests, 4)
    flagged = {t.boundary_index for t in tests}
    idx = [c.boundary_index for c in cps]
    assert set(idx) <= flagged
    assert idx == sorted(set(idx))


def test_report_json_csv_roundtrip(tmp_path):
    snaps = er_stream([0.003] * 3 + [0.05] * 3)
    rep = scan(snaps, DetectorConfig(window_lengths=(1, 2), bootstrap_replicates=100))
    path = tmp_path / "r.json"
    path.write_text(rep.to_json())
    back = load_report(path)
    assert back.to_json() == rep.to_json()
    d = json.loads(rep.to_json())
    assert set(d) == {"config", "seed", "n_snapshots", "tests", "change_points"}
    lines = rep.to_csv().splitlines()
    assert lines[0] == ("boundary_index,window_length,distance,p_value,flagged,"
                        "skipped_reason,base_nodes,other_nodes")
    assert len(lines) == 1 + len(rep.tests)


def test_config_validation():
    with pytest.raises(ValueError):
        DetectorConfig(window_lengths=())
    with pytest.raises(ValueError):
        DetectorConfig(alpha=1.0)
    with pytest.raises(ValueError):
        DetectorConfig(min_nodes=0)
    assert DetectorConfig(window_lengths=(4, 1, 2, 1)).window_lengths == (1, 2, 4)
