"""Erdos-Renyi and caveman snapshot streams with planted model switches."""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field, replace

import numpy as np

from . import _accel
from .core import SnapshotGraph

MODEL_KINDS = ("erdos-renyi", "caveman")
REWIRE_TRIES = 10


@dataclass(frozen=True)
class ModelConfig:
    kind: str
    n: int
    er_p: float = 0.0
    communities: int = 1
    rewire_p: float = 0.0

    def __post_init__(self):
        if self.kind not in MODEL_KINDS:
            raise ValueError(f"unknown model kind {self.kind!r}")
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if not 0.0 <= self.er_p <= 1.0 or not 0.0 <= self.rewire_p <= 1.0:
            raise ValueError("probabilities must lie in [0, 1]")
        if self.kind == "caveman" and not 1 <= self.communities <= self.n:
            raise ValueError("caveman needs 1 <= communities <= n")

    def resized(self, n):
        """Same model at ``n`` nodes, keeping the degree law fixed.

        ER keeps the expected degree (n - 1) p; caveman keeps the clique size
        and changes the number of communities, so the node count is rounded
        to a multiple of the clique size.
        """
        if self.kind == "erdos-renyi":
            mean_deg = (self.n - 1) * self.er_p
            return replace(self, n=n, er_p=min(1.0, mean_deg / (n - 1)) if n > 1 else 0.0)
        size = self.n // self.communities
        c = max(1, int(round(n / size)))
        return replace(self, n=c * size, communities=c)


@dataclass(frozen=True)
class ScenarioSpec:
    config_a: ModelConfig
    config_b: ModelConfig
    num_changes: int = 100
    run_length_mean: float = 4.0
    run_length_var: float = 2.0
    size_range: tuple[int, int] | None = None
    rng_seed: int = 0

    def __post_init__(self):
        if self.num_changes < 1:
            raise ValueError("num_changes must be >= 1")
        if self.run_length_mean <= 0 or self.run_length_var < 0:
            raise ValueError("run length needs mean > 0 and var >= 0")
        if self.size_range is not None:
            lo, hi = self.size_range
            if not 2 <= lo <= hi:
                raise ValueError("size_range must satisfy 2 <= low <= high")
            object.__setattr__(self, "size_range", (int(lo), int(hi)))

    def to_dict(self):
        d = asdict(self)
        d["size_range"] = list(self.size_range) if self.size_range else None
        return d

    @classmethod
    def from_dict(cls, d):
        d = dict(d)
        unknown = set(d) - {f for f in cls.__dataclass_fields__}
        if unknown:
            raise ValueError(f"unknown scenario keys: {sorted(unknown)}")
        d["config_a"] = ModelConfig(**d["config_a"])
        d["config_b"] = ModelConfig(**d["config_b"])
        if d.get("size_range") is not None:
            d["size_range"] = tuple(d["size_range"])
        return cls(**d)


def load_scenario(path):
    with open(path) as fh:
        return ScenarioSpec.from_dict(json.load(fh))


@dataclass(frozen=True)
class GroundTruth:
    change_indices: tuple[int, ...] = field(default_factory=tuple)

    def __post_init__(self):
        idx = tuple(int(i) for i in self.change_indices)
        if any(b <= a for a, b in zip(idx, idx[1:])):
            raise ValueError("change indices must be strictly increasing")
        object.__setattr__(self, "change_indices", idx)

    def __len__(self):
        return len(self.change_indices)


def generate_er(n, p, rng):
    """G(n, p): every unordered pair kept independently with probability ``p``."""
    rng = np.random.default_rng(rng) if not isinstance(rng, np.random.Generator) else rng
    iu, ju = np.triu_indices(n, k=1)
    keep = rng.random(iu.size) < p
    edges = np.stack([iu[keep], ju[keep]], axis=1)
    return SnapshotGraph(0, np.arange(n), edges)


def _community_sizes(n, c):
    sizes = [n // c] * c
    sizes[-1] += n - sum(sizes)
    return sizes


def caveman_edges(n, c):
    """Edges of ``c`` disjoint cliques over nodes 0..n-1, the last absorbing any remainder."""
    blocks = []
    start = 0
    for size in _community_sizes(n, c):
        iu, ju = np.triu_indices(size, k=1)
        blocks.append(np.stack([iu + start, ju + start], axis=1))
        start += size
    return np.concatenate(blocks).astype(np.int64)


def generate_caveman(n, c, rewire_p, rng):
    """Relaxed caveman graph.

    Every clique edge is rewired with probability ``rewire_p`` by moving its
    second endpoint to a uniformly chosen other node; moves that would
    duplicate an edge are redrawn up to ``REWIRE_TRIES`` times, after which
    the edge keeps its place. The edge count never changes.
    """
    rng = np.random.default_rng(rng) if not isinstance(rng, np.random.Generator) else rng
    edges = caveman_edges(n, c)
    n_edges = len(edges)
    rewire = rng.random(n_edges) < rewire_p
    if n > 1:
        cand = rng.integers(0, n - 1, size=(n_edges, REWIRE_TRIES))
        # skip over the kept endpoint so candidates are uniform on the other n - 1 nodes
        cand += cand >= edges[:, :1]
    else:
        cand = np.zeros((n_edges, REWIRE_TRIES), dtype=np.int64)
    edges = _accel.rewire_edges(edges.copy(), n, rewire, cand)
    return SnapshotGraph(0, np.arange(n), edges)


def generate(config: ModelConfig, rng, index=0):
    if config.kind == "erdos-renyi":
        g = generate_er(config.n, config.er_p, rng)
    else:
        g = generate_caveman(config.n, config.communities, config.rewire_p, rng)
    return SnapshotGraph(index, g.nodes, g.edges)


def _stream(seed, *key):
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=key))


# spawn-key tags keeping the scenario's independent streams apart
_SCHEDULE, _SIZES, _SNAPSHOT = 0, 1, 2


def run_lengths(spec: ScenarioSpec):
    """Lengths of the ``num_changes + 1`` constant-model runs."""
    rng = _stream(spec.rng_seed, _SCHEDULE)
    x = rng.normal(spec.run_length_mean, np.sqrt(spec.run_length_var), size=spec.num_changes + 1)
    return np.maximum(np.rint(x).astype(np.int64), 1)


def scenario_plan(spec: ScenarioSpec):
    """Per-snapshot model configs and the ground truth, without building graphs."""
    lengths = run_lengths(spec)
    configs = []
    for run, length in enumerate(lengths):
        cfg = spec.config_a if run % 2 == 0 else spec.config_b
        configs.extend([cfg] * int(length))
    if spec.size_range is not None:
        lo, hi = spec.size_range
        sizes = _stream(spec.rng_seed, _SIZES).integers(lo, hi + 1, size=len(configs))
        configs = [cfg.resized(int(m)) for cfg, m in zip(configs, sizes)]
    truth = GroundTruth(tuple(int(i) for i in np.cumsum(lengths)[:-1]))
    return configs, truth


def generate_scenario(spec: ScenarioSpec, threads=1):
    """Snapshots alternating between ``config_a`` and ``config_b``.

    Every snapshot draws from its own stream keyed on its index, so the
    result does not depend on ``threads``.
    """
    configs, truth = scenario_plan(spec)

    def build(i):
        return generate(configs[i], _stream(spec.rng_seed, _SNAPSHOT, i), index=i)

    if threads > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(threads) as pool:
            snapshots = list(pool.map(build, range(len(configs))))
    else:
        snapshots = [build(i) for i in range(len(configs))]
    return snapshots, truth


def format_stream(snapshots, bucket_seconds=604800, delimiter=","):
    """One timestamped edge list for the whole sequence, one bucket per snapshot.

    Isolated nodes have no edge to carry them and are lost on the round trip.
    """
    lines = ["# time,source,target"]
    for s in snapshots:
        t = s.index * bucket_seconds
        lines.extend(f"{t}{delimiter}{u}{delimiter}{v}" for u, v in s.edges)
    return "\n".join(lines) + "\n"


def format_snapshot(snapshot, delimiter=","):
    lines = [f"# index={snapshot.index} nodes={snapshot.n_nodes}"]
    lines.extend(f"{u}{delimiter}{v}" for u, v in snapshot.edges)
    return "\n".join(lines) + "\n"


def write_stream(snapshots, path, bucket_seconds=604800, delimiter=","):
    with open(path, "w") as fh:
        fh.write(format_stream(snapshots, bucket_seconds, delimiter))
