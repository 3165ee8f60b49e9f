"""Backend benchmark: numba kernels against the pure-numpy fallback.

Runs each backend in a child process (the flag is read once at import),
times the dense symmetric kernels and one end-to-end Galerkin solve, and
prints a side-by-side table.

    python3 benchmarks/bench_linalg.py [--repeats 5] [--dims 64,128,256]
"""

import argparse
import json
import os
import statistics
import subprocess
import sys
import time

HERE = os.path.dirname(os.path.abspath(__file__))


def _bench_child(dims, repeats):
    import numpy as np

    from steklov_annulus import galerkin, linalg

    linalg.warmup()
    rng = np.random.default_rng(7)
    out = {"backend": linalg.active_backend()}

    def med(fn):
        times = []
        for _ in range(repeats):
            t0 = time.perf_counter()
            fn()
            times.append(time.perf_counter() - t0)
        return statistics.median(times)

    for d in dims:
        base = rng.standard_normal((d, d))
        sym = (base + base.T) / 2.0
        spd = base @ base.T + d * np.eye(d)
        out[f"jacobi_{d}"] = med(lambda: linalg.jacobi_eigen(sym.copy()))
        out[f"cholesky_{d}"] = med(lambda: linalg.cholesky(spd.copy()))

    weight = galerkin.counterexample_weight(1.0)
    out["galerkin_N32"] = med(
        lambda: galerkin.solve_spectrum(galerkin.assemble(weight, 32), 3))
    out["galerkin_N64"] = med(
        lambda: galerkin.solve_spectrum(galerkin.assemble(weight, 64), 3))
    print(json.dumps(out))


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeats", type=int, default=5)
    ap.add_argument("--dims", default="64,128,256")
    ap.add_argument("--child", action="store_true", help=argparse.SUPPRESS)
    args = ap.parse_args()
    dims = [int(d) for d in args.dims.split(",")]

    if args.child:
        _bench_child(dims, args.repeats)
        return

    results = {}
    for backend in ("numba", "numpy"):
        env = dict(os.environ, STEKLOV_ANNULUS_BACKEND=backend)
        proc = subprocess.run(
            [sys.executable, os.path.abspath(__file__), "--child",
             "--repeats", str(args.repeats), "--dims", args.dims],
            env=env, capture_output=True, text=True)
        if proc.returncode != 0:
            sys.stderr.write(proc.stderr)
            raise SystemExit(f"{backend} child failed")
        results[backend] = json.loads(proc.stdout.strip().splitlines()[-1])

    keys = [k for k in results["numba"] if k != "backend"]
    width = max(len(k) for k in keys)
    print(f"{'kernel':<{width}}  {'numba':>10}  {'numpy':>10}  speedup")
    for k in keys:
        tn, tp = results["numba"][k], results["numpy"][k]
        print(f"{k:<{width}}  {tn * 1e3:>8.2f}ms  {tp * 1e3:>8.2f}ms  "
              f"{tp / tn:>6.2f}x")


if __name__ == "__main__":
    main()
