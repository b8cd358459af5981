"""Time the numba kernels against the pure-numpy fallback.

    python benchmarks/bench_backends.py [--repeat 5] [--end-to-end]

Kernel timings exclude JIT compilation. ``--end-to-end`` also times one
exp1 scenario scan in a subprocess per backend (``DEGCPD_BACKEND``) and
checks that both produce the same report.
"""
import argparse
import os
import subprocess
import sys
import time
import timeit

import numba
import numpy as np

from degcpd import _accel
from degcpd.synthgen import REWIRE_TRIES, caveman_edges


def best_of(func, repeat):
    return min(timeit.repeat(func, number=1, repeat=repeat))


def bench_kernels(repeat):
    rng = np.random.default_rng(0)
    n_support, b, m = 15, 1000, 200
    pos_a = rng.integers(0, n_support, size=(b, m))
    pos_b = rng.integers(0, n_support, size=(b, m))
    ref = np.cumsum(rng.integers(1, 30, size=n_support))

    n, c = 1000, 25
    edges = caveman_edges(n, c)
    rewire = rng.random(len(edges)) < 0.7
    cand = rng.integers(0, n - 1, size=(len(edges), REWIRE_TRIES))
    cand += cand >= edges[:, :1]

    jit = {name: numba.njit(cache=True, nogil=True)(fn) for name, fn in (
        ("ks_rows_to_ref", _accel._ks_rows_to_ref_py),
        ("ks_rows_pair", _accel._ks_rows_pair_py),
        ("rewire_edges", _accel._rewire_py),
    )}
    npy = _accel.numpy_kernels
    cases = {
        "ks_rows_to_ref (B=1000, m=200)": ("ks_rows_to_ref", (pos_a, ref, int(ref[-1]), n_support), False),
        "ks_rows_pair   (B=1000, m=200)": ("ks_rows_pair", (pos_a, pos_b, n_support), False),
        "rewire_edges   (n=1000, c=25) ": ("rewire_edges", (edges, n, rewire, cand), True),
    }
    print(f"{'kernel':<34}{'numba ms':>10}{'numpy ms':>10}{'speedup':>9}")
    for label, (name, args, copies) in cases.items():
        def call(fn):
            a = (args[0].copy(),) + args[1:] if copies else args
            return fn(*a)

        out_jit, out_np = call(jit[name]), call(npy[name])  # also compiles
        assert np.array_equal(out_jit, out_np), name
        t_jit = best_of(lambda: call(jit[name]), repeat)
        t_np = best_of(lambda: call(npy[name]), repeat)
        print(f"{label:<34}{t_jit * 1e3:>10.2f}{t_np * 1e3:>10.2f}{t_np / t_jit:>8.1f}x")


SCAN = """
import sys, time
from degcpd.presets import preset
from degcpd.synthgen import generate_scenario
from degcpd.detector import scan
spec, cfg = preset("exp1")
snaps, _ = generate_scenario(spec)
scan(snaps[:4], cfg)  # warm-up / JIT
t = time.perf_counter()
rep = scan(snaps, cfg)
sys.stderr.write(f"{time.perf_counter() - t:.3f}\\n")
sys.stdout.write(rep.to_json())
"""


def bench_end_to_end():
    results = {}
    for backend in ("numba", "numpy"):
        env = dict(os.environ, DEGCPD_BACKEND=backend)
        proc = subprocess.run([sys.executable, "-c", SCAN], env=env, capture_output=True,
                              text=True, check=True)
        results[backend] = (float(proc.stderr.strip().splitlines()[-1]), proc.stdout)
    same = results["numba"][1] == results["numpy"][1]
    print(f"exp1 scan ({len(results['numba'][1])} byte report): "
          f"numba {results['numba'][0]:.2f}s, numpy {results['numpy'][0]:.2f}s, "
          f"identical reports: {same}")


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--end-to-end", action="store_true")
    args = ap.parse_args()
    bench_kernels(args.repeat)
    if args.end_to_end:
        bench_end_to_end()
