"""Compare the compiled core against the pure NumPy fallback.

Micro-benchmarks time the hot kernels from both backend modules directly;
the end-to-end rows re-run this script in a subprocess with
RKKSE_FORCE_PURE=1 so the whole pipeline binds to the fallback.

    python benchmarks/bench_core.py
"""

import os
import subprocess
import sys
import time

import numpy as np

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))


def timeit(fn, *args, repeat=5, number=200):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        for _ in range(number):
            fn(*args)
        best = min(best, (time.perf_counter() - t0) / number)
    return best


def micro_rows():
    from rkkse import _purecore
    backends = [("pure", _purecore)]
    try:
        from rkkse import _native
        backends.append(("native", _native))
    except ImportError:
        pass

    rng = np.random.default_rng(0)
    breaks = np.array([0.0, 0.3, 0.7, 1.0])
    coefs = rng.uniform(-1, 1, (3, 8))
    xs = rng.uniform(0, 1, 500)
    ts = rng.uniform(0.05, 1.0, 64)

    rows = []
    for label, mod in backends:
        rows.append((
            label,
            timeit(mod.pp_eval_array, breaks, coefs, xs, 1),
            timeit(lambda: mod.caputo_pp(breaks, coefs, 0.5, 0.8)),
            timeit(lambda: mod.r2_caputo_dt_array(0.6, ts, 0.5)),
        ))
    return rows


def end_to_end(force_pure):
    env = dict(os.environ)
    env.pop("RKKSE_FORCE_PURE", None)
    if force_pure:
        env["RKKSE_FORCE_PURE"] = "1"
    code = (
        "import sys, time; sys.path.insert(0, 'src');"
        "from rkkse.operator import KseProblem; from rkkse.solver import solve;"
        "import rkkse._core as c;"
        "p = KseProblem.paper_config(alpha=0.5); t0 = time.perf_counter();"
        "solve(p, 24); print(c.BACKEND, time.perf_counter() - t0)"
    )
    out = subprocess.run(
        [sys.executable, "-c", code],
        env=env, capture_output=True, text=True,
        cwd=os.path.join(os.path.dirname(__file__), ".."),
    )
    if out.returncode != 0:
        raise RuntimeError(out.stderr)
    backend, seconds = out.stdout.split()
    return backend, float(seconds)


def main():
    print(f"{'backend':>8} {'pp_eval_array(500)':>20} {'caputo_pp':>12} {'r2_dt(64)':>12}")
    micro = micro_rows()
    for label, a, b, c in micro:
        print(f"{label:>8} {a * 1e6:>17.1f} us {b * 1e6:>9.1f} us {c * 1e6:>9.1f} us")
    if len(micro) == 2:
        _, a0, b0, c0 = micro[0]
        _, a1, b1, c1 = micro[1]
        print(f"{'speedup':>8} {a0 / a1:>18.1f}x {b0 / b1:>10.1f}x {c0 / c1:>10.1f}x")

    print()
    print("end-to-end solve (paper configuration, alpha=0.5, n=24):")
    rows = [end_to_end(force_pure=True)]
    backend, seconds = end_to_end(force_pure=False)
    rows.append((backend, seconds))
    for label, seconds in rows:
        print(f"{label:>8} {seconds:8.2f} s")
    if rows[1][0] == "native":
        print(f"{'speedup':>8} {rows[0][1] / rows[1][1]:>9.1f}x")
    else:
        print("(compiled core unavailable; both rows ran the pure fallback)")


if __name__ == "__main__":
    main()
