"""KS distance between degree CDFs and its bootstrap significance."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _accel
from .core import EmpiricalCdf, empirical_cdf

NULL_REFERENCES = ("two-sample", "to-base")


def as_generator(seed):
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def ks_statistic(a: EmpiricalCdf, b: EmpiricalCdf) -> float:
    """Largest gap between two step CDFs.

    Both CDFs are right-continuous and piecewise constant between support
    points, so evaluating on the merged support gives the exact supremum.
    The difference is formed in integers and divided once, so equal
    rationals always map to the same double.
    """
    if a.total == 0 or b.total == 0:
        raise ValueError("empty CDF")
    xs = np.union1d(a.support, b.support)
    diff = np.abs(a.counts_at(xs) * b.total - b.counts_at(xs) * a.total)
    return float(diff.max() / (a.total * b.total))


def _support_positions(base):
    # sorted so resampling depends on the degree multiset only, not node order
    base = np.sort(np.asarray(base, dtype=np.int64).ravel())
    if base.size == 0:
        raise ValueError("empty degree sequence")
    support, inverse, counts = np.unique(base, return_inverse=True, return_counts=True)
    return support, inverse.astype(np.int64), np.cumsum(counts)


def bootstrap_distances(base, replicates, sample_size=None, rng_seed=None):
    """KS distance from each bootstrap resample of ``base`` to ``base`` itself.

    Each replicate draws ``sample_size`` degrees uniformly with replacement
    (default: ``len(base)``).
    """
    support, inverse, cum = _support_positions(base)
    sample_size = len(inverse) if sample_size is None else int(sample_size)
    if replicates < 1 or sample_size < 1:
        raise ValueError("replicates and sample_size must be >= 1")
    rng = as_generator(rng_seed)
    pos = inverse[rng.integers(0, len(inverse), size=(int(replicates), sample_size))]
    return _accel.ks_rows_to_ref(pos, cum, int(cum[-1]), len(support))


def bootstrap_distances_two_sample(base, replicates, sizes=None, rng_seed=None):
    """KS distance between pairs of independent resamples of ``base``.

    ``sizes`` gives the two resample sizes, normally the sizes of the two
    windows being compared; both default to ``len(base)``.
    """
    support, inverse, _ = _support_positions(base)
    n = len(inverse)
    m1, m2 = (n, n) if sizes is None else (int(sizes[0]), int(sizes[1]))
    if replicates < 1 or m1 < 1 or m2 < 1:
        raise ValueError("replicates and sample sizes must be >= 1")
    rng = as_generator(rng_seed)
    pos_a = inverse[rng.integers(0, n, size=(int(replicates), m1))]
    pos_b = inverse[rng.integers(0, n, size=(int(replicates), m2))]
    return _accel.ks_rows_pair(pos_a, pos_b, len(support))


@dataclass(frozen=True)
class BootstrapResult:
    p_value: float
    replicates: int
    distances: np.ndarray | None = None


def bootstrap_pvalue(observed, distances, keep=False):
    """Fraction of bootstrap distances strictly below ``observed``.

    Ties do not count, so an observed distance of 0 always gives p = 0.
    """
    distances = np.asarray(distances, dtype=np.float64).ravel()
    if distances.size == 0:
        raise ValueError("empty distance list")
    hits = int(np.count_nonzero(float(observed) > distances))
    return BootstrapResult(hits / distances.size, int(distances.size), distances if keep else None)


def compare_degrees(base, other, replicates=1000, null="two-sample", rng_seed=None, keep=False):
    """Test whether ``other`` looks like a draw from the model behind ``base``.

    Returns ``(distance, BootstrapResult)``. ``null`` selects the reference
    distribution: ``"two-sample"`` resamples both sides from ``base`` at the
    observed sizes, ``"to-base"`` compares single resamples against ``base``.
    """
    base = np.asarray(base, dtype=np.int64)
    other = np.asarray(other, dtype=np.int64)
    observed = ks_statistic(empirical_cdf(base), empirical_cdf(other))
    if null == "two-sample":
        dists = bootstrap_distances_two_sample(base, replicates, (len(base), len(other)), rng_seed)
    elif null == "to-base":
        dists = bootstrap_distances(base, replicates, None, rng_seed)
    else:
        raise ValueError(f"unknown null reference {null!r}; expected one of {NULL_REFERENCES}")
    return observed, bootstrap_pvalue(observed, dists, keep=keep)
