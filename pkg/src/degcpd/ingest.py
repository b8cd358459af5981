"""Timestamped edge-list parsing and time bucketing into snapshots."""
from __future__ import annotations

import logging
from collections import Counter
from dataclasses import dataclass, field
from datetime import datetime, timezone

import numpy as np

from .core import SnapshotGraph

log = logging.getLogger(__name__)

WEEK = 604800
MONTH_30D = 2592000


@dataclass(frozen=True)
class TemporalEdge:
    timestamp: int
    source: str
    target: str


@dataclass(frozen=True)
class IngestConfig:
    """How to read an edge list and cut it into buckets.

    ``origin`` is ``"first-event"`` or an explicit epoch timestamp.
    ``columns`` gives the (time, source, target) column positions.
    ``calendar_months`` switches to calendar-month buckets, in which case
    ``bucket_seconds`` is ignored.
    """

    bucket_seconds: int = WEEK
    origin: str | int = "first-event"
    delimiter: str = ","
    columns: tuple[int, int, int] = (0, 1, 2)
    calendar_months: bool = False
    allow_list: frozenset[str] | None = None

    def __post_init__(self):
        if int(self.bucket_seconds) <= 0:
            raise ValueError("bucket_seconds must be positive")
        if self.origin != "first-event" and not isinstance(self.origin, int):
            raise ValueError("origin must be 'first-event' or an integer timestamp")
        if len(self.columns) != 3:
            raise ValueError("columns must give (time, source, target) indices")
        if self.delimiter is not None and len(self.delimiter) != 1:
            raise ValueError("delimiter must be a single character (or None for whitespace)")


@dataclass
class SkipReport:
    lines: int = 0
    parsed: int = 0
    comments: int = 0
    self_loops: int = 0
    malformed: int = 0
    filtered: int = 0
    first_bad_lines: list = field(default_factory=list)

    def summary(self):
        return (
            f"{self.parsed} edges from {self.lines} lines; skipped {self.self_loops} self-loops, "
            f"{self.malformed} malformed, {self.filtered} outside allow-list"
        )


def read_allow_list(path):
    with open(path) as fh:
        return frozenset(
            line.strip() for line in fh if line.strip() and not line.lstrip().startswith("#")
        )


def parse_edges_with_report(path, config: IngestConfig):
    """Parse an edge file, returning ``(edges, SkipReport)``."""
    ti, si, di = config.columns
    need = max(config.columns) + 1
    edges = []
    rep = SkipReport()
    with open(path) as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.strip()
            if not line or line.startswith("#"):
                rep.comments += 1
                continue
            rep.lines += 1
            parts = line.split(config.delimiter)
            try:
                if len(parts) < need:
                    raise ValueError("too few columns")
                ts = int(parts[ti].strip())
                src, dst = parts[si].strip(), parts[di].strip()
                if not src or not dst:
                    raise ValueError("empty node id")
            except ValueError:
                rep.malformed += 1
                if len(rep.first_bad_lines) < 5:
                    rep.first_bad_lines.append(lineno)
                continue
            if src == dst:
                rep.self_loops += 1
                continue
            if config.allow_list is not None and (
                src not in config.allow_list or dst not in config.allow_list
            ):
                rep.filtered += 1
                continue
            edges.append(TemporalEdge(ts, src, dst))
    rep.parsed = len(edges)
    if rep.malformed:
        log.warning("%s: %d malformed lines (first at %s)", path, rep.malformed, rep.first_bad_lines)
    log.info("%s: %s", path, rep.summary())
    if not edges:
        raise ValueError(f"no valid edges in {path}")
    return edges, rep


def parse_edges(path, config: IngestConfig):
    return parse_edges_with_report(path, config)[0]


def _month_index(ts):
    d = datetime.fromtimestamp(ts, tz=timezone.utc)
    return d.year * 12 + d.month - 1


def bucket_of(timestamps, config: IngestConfig, origin):
    ts = np.asarray(timestamps, dtype=np.int64)
    if config.calendar_months:
        base = _month_index(origin)
        return np.array([_month_index(int(t)) - base for t in ts], dtype=np.int64)
    # floor division keeps [k*d, (k+1)*d) half-open, also before the origin
    return (ts - origin) // int(config.bucket_seconds)


def node_ids(edges):
    """Map every node label to an integer id in sorted-label order."""
    labels = sorted({e.source for e in edges} | {e.target for e in edges})
    return {label: i for i, label in enumerate(labels)}


def bucket_snapshots(edges, config: IngestConfig):
    """Group edges into consecutive time buckets.

    The result runs from the first to the last non-empty bucket; buckets
    with no events are kept as empty snapshots. ``events`` on each snapshot
    counts raw interactions before duplicate edges collapse.
    """
    if not edges:
        raise ValueError("no edges to bucket")
    ids = node_ids(edges)
    ts = np.fromiter((e.timestamp for e in edges), dtype=np.int64, count=len(edges))
    src = np.fromiter((ids[e.source] for e in edges), dtype=np.int64, count=len(edges))
    dst = np.fromiter((ids[e.target] for e in edges), dtype=np.int64, count=len(edges))
    origin = int(ts.min()) if config.origin == "first-event" else int(config.origin)
    buckets = bucket_of(ts, config, origin)
    first, last = int(buckets.min()), int(buckets.max())

    order = np.argsort(buckets, kind="stable")
    buckets, src, dst = buckets[order], src[order], dst[order]
    bounds = np.searchsorted(buckets, np.arange(first, last + 2))
    snapshots = []
    for pos, b in enumerate(range(first, last + 1)):
        lo, hi = bounds[pos], bounds[pos + 1]
        pairs = np.stack([src[lo:hi], dst[lo:hi]], axis=1)
        snapshots.append(
            SnapshotGraph.from_edges(pos, pairs, events=int(hi - lo), bucket=b)
        )
    return snapshots


def bucket_counts(snapshots):
    """Raw event count per snapshot index."""
    return Counter({s.index: s.events for s in snapshots})
