"""Hot kernels with a numba path and a pure-numpy fallback.

The backend is picked once at import time from ``DEGCPD_BACKEND``
(``numba`` or ``numpy``). ``numba`` is the default when it imports cleanly.
Both paths consume the same pre-drawn random numbers and do exact integer
arithmetic, so they return bit-identical results.
"""
import os

import numpy as np

try:
    import numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None

_requested = os.environ.get("DEGCPD_BACKEND", "numba").strip().lower()
if _requested not in ("numba", "numpy"):
    raise ImportError(f"DEGCPD_BACKEND must be 'numba' or 'numpy', got {_requested!r}")

BACKEND = "numba" if (_requested == "numba" and numba is not None) else "numpy"


def _njit(func):
    return numba.njit(cache=True, nogil=True)(func)


# ---------------------------------------------------------------------------
# bootstrap KS distances
# ---------------------------------------------------------------------------

def _ks_rows_to_ref_py(positions, ref_cum, ref_total, n_support):
    """KS distance from every row of resampled support positions to a reference CDF.

    ``positions`` is (B, m) with entries in [0, n_support); ``ref_cum`` holds the
    reference's cumulative counts on the same support.
    """
    n_rep, m = positions.shape
    out = np.empty(n_rep, dtype=np.float64)
    counts = np.zeros(n_support, dtype=np.int64)
    denom = m * ref_total
    for r in range(n_rep):
        for k in range(n_support):
            counts[k] = 0
        for j in range(m):
            counts[positions[r, j]] += 1
        best = 0
        cum = 0
        for k in range(n_support):
            cum += counts[k]
            diff = cum * ref_total - ref_cum[k] * m
            if diff < 0:
                diff = -diff
            if diff > best:
                best = diff
        out[r] = best / denom
    return out


def _ks_rows_pair_py(pos_a, pos_b, n_support):
    """Row-wise KS distance between two resample matrices over a shared support."""
    n_rep, ma = pos_a.shape
    mb = pos_b.shape[1]
    out = np.empty(n_rep, dtype=np.float64)
    ca = np.zeros(n_support, dtype=np.int64)
    cb = np.zeros(n_support, dtype=np.int64)
    denom = ma * mb
    for r in range(n_rep):
        for k in range(n_support):
            ca[k] = 0
            cb[k] = 0
        for j in range(ma):
            ca[pos_a[r, j]] += 1
        for j in range(mb):
            cb[pos_b[r, j]] += 1
        best = 0
        cum_a = 0
        cum_b = 0
        for k in range(n_support):
            cum_a += ca[k]
            cum_b += cb[k]
            diff = cum_a * mb - cum_b * ma
            if diff < 0:
                diff = -diff
            if diff > best:
                best = diff
        out[r] = best / denom
    return out


def _row_cumcounts(positions, n_support):
    n_rep = positions.shape[0]
    flat = (np.arange(n_rep, dtype=np.int64)[:, None] * n_support + positions).ravel()
    counts = np.bincount(flat, minlength=n_rep * n_support).reshape(n_rep, n_support)
    return np.cumsum(counts, axis=1)


def _ks_rows_to_ref_np(positions, ref_cum, ref_total, n_support):
    m = positions.shape[1]
    cum = _row_cumcounts(positions, n_support)
    diff = np.abs(cum * ref_total - ref_cum[None, :] * m).max(axis=1)
    return diff / (m * ref_total)


def _ks_rows_pair_np(pos_a, pos_b, n_support):
    ma, mb = pos_a.shape[1], pos_b.shape[1]
    diff = np.abs(_row_cumcounts(pos_a, n_support) * mb - _row_cumcounts(pos_b, n_support) * ma)
    return diff.max(axis=1) / (ma * mb)


# ---------------------------------------------------------------------------
# caveman rewiring
# ---------------------------------------------------------------------------

def _rewire_py(edges, n, rewire, candidates):
    """Rewire clique edges in place, keeping the first endpoint.

    ``rewire[e]`` says whether edge e is rewired; ``candidates[e]`` lists
    replacement endpoints to try in order (already excluding the kept node).
    A candidate that is already a neighbour (which covers the current
    endpoint) is rejected; when every candidate is rejected the edge stays.
    """
    adj = np.zeros((n, n), dtype=np.bool_)
    n_edges = edges.shape[0]
    for e in range(n_edges):
        u = edges[e, 0]
        v = edges[e, 1]
        adj[u, v] = True
        adj[v, u] = True
    n_try = candidates.shape[1]
    for e in range(n_edges):
        if not rewire[e]:
            continue
        u = edges[e, 0]
        v = edges[e, 1]
        for t in range(n_try):
            x = candidates[e, t]
            if adj[u, x]:
                continue
            adj[u, v] = False
            adj[v, u] = False
            adj[u, x] = True
            adj[x, u] = True
            edges[e, 1] = x
            break
    return edges


if BACKEND == "numba":
    ks_rows_to_ref = _njit(_ks_rows_to_ref_py)
    ks_rows_pair = _njit(_ks_rows_pair_py)
    rewire_edges = _njit(_rewire_py)
else:
    ks_rows_to_ref = _ks_rows_to_ref_np
    ks_rows_pair = _ks_rows_pair_np
    # sequential by nature: each move depends on the adjacency left by the previous one
    rewire_edges = _rewire_py

# always-available reference implementations, used by tests and the benchmark
numpy_kernels = {
    "ks_rows_to_ref": _ks_rows_to_ref_np,
    "ks_rows_pair": _ks_rows_pair_np,
    "rewire_edges": _rewire_py,
}
