"""Compare the compiled kernels with the numpy fallback.

Times each kernel on fit-sized inputs and a full study slice in both
backends. Run from the repository root after building the extension:

    python3 benchmarks/bench_kernels.py [--repeat 2000] [--reps 20]
"""
import argparse
import os
import subprocess
import sys
import timeit

import numpy as np

from robustar import _kernels_py

try:
    from robustar import _kernels as _kernels_c
except ImportError:
    _kernels_c = None

STUDY_SNIPPET = """
import time
from robustar.kernels import BACKEND
from robustar.simulation import StudyDesign, run_study
start = time.perf_counter()
run_study(StudyDesign(n=100, reps={reps}, seed=1))
print(BACKEND, time.perf_counter() - start)
"""


def kernel_cases(n, m, p, seed=0):
    rng = np.random.default_rng(seed)
    y, X = rng.normal(size=n), rng.normal(size=(n, m))
    phi = rng.uniform(-0.3, 0.3, p)
    w = rng.uniform(0.1, 1.3, n - p)
    fy, fX = _kernels_py.backshift_filter(y, X, phi)
    return {
        "backshift_filter": lambda k: k.backshift_filter(y, X, phi),
        "cross_products": lambda k: k.cross_products(y, p, w),
        "t_weights": lambda k: k.t_weights(fy, 1.3, 3.0),
        "weighted_gram": lambda k: k.weighted_gram(fX, fy, w),
        "weighted_ssq": lambda k: k.weighted_ssq(fy, w),
    }


def time_study(reps, pure):
    env = dict(os.environ)
    env.pop("ROBUSTAR_PURE_PYTHON", None)
    if pure:
        env["ROBUSTAR_PURE_PYTHON"] = "1"
    out = subprocess.run([sys.executable, "-c", STUDY_SNIPPET.format(reps=reps)], env=env,
                         check=True, capture_output=True, text=True).stdout.split()
    return out[0], float(out[1])


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=2000)
    ap.add_argument("--reps", type=int, default=20, help="replications in the study slice")
    args = ap.parse_args(argv)

    if _kernels_c is None:
        print("compiled kernels not built; only the study slice fallback is timed")
    for n, m, p in [(100, 3, 2), (1000, 3, 4)]:
        print(f"\nkernels, n={n} M={m} p={p} (microseconds per call)")
        print(f"{'kernel':<18}{'numpy':>10}{'cython':>10}{'speedup':>10}")
        for name, call in kernel_cases(n, m, p).items():
            t_py = min(timeit.repeat(lambda: call(_kernels_py), number=args.repeat, repeat=3))
            t_py *= 1e6 / args.repeat
            if _kernels_c is None:
                print(f"{name:<18}{t_py:>10.2f}{'-':>10}{'-':>10}")
                continue
            t_c = min(timeit.repeat(lambda: call(_kernels_c), number=args.repeat, repeat=3))
            t_c *= 1e6 / args.repeat
            print(f"{name:<18}{t_py:>10.2f}{t_c:>10.2f}{t_py / t_c:>9.1f}x")

    print(f"\nstudy slice: n=100, {args.reps} replications, normal and t fits")
    results = [time_study(args.reps, pure=True)]
    if _kernels_c is not None:
        results.append(time_study(args.reps, pure=False))
    for backend, secs in results:
        print(f"{backend:<10}{secs:>8.3f} s")
    if len(results) == 2:
        print(f"speedup   {results[0][1] / results[1][1]:>8.2f}x")


if __name__ == "__main__":
    main()
