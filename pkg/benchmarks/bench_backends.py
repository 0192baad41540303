"""Compare the numba-compiled kernels with the plain-Python fallback.

Each backend runs in its own subprocess because the choice is fixed at
import time by the POLYFF_NUMBA environment variable.

    python3 benchmarks/bench_backends.py [--points N]
"""
import argparse
import json
import os
import subprocess
import sys

WORKER = r"""
import json, sys, time
import numpy as np
from polyff import BACKEND, shapes
from polyff.harness import evaluate

n = int(sys.argv[1])
fig = shapes.dodecahedron()
rng = np.random.default_rng(0)
d = rng.normal(size=(n, 3))
d /= np.linalg.norm(d, axis=1)[:, None]
qs = d * np.logspace(-5, 2, n)[:, None] / fig.a
evaluate(fig, qs[:2])  # compile / warm up
t = time.perf_counter()
vals = evaluate(fig, qs)[0]
dt = time.perf_counter() - t
print(json.dumps({"backend": BACKEND, "seconds": dt, "per_q_us": 1e6 * dt / n,
                  "checksum": [float(vals.real.sum()), float(vals.imag.sum())]}))
"""


def run(flag: str, n: int) -> dict:
    env = dict(os.environ, POLYFF_NUMBA=flag)
    out = subprocess.run([sys.executable, "-c", WORKER, str(n)], env=env, capture_output=True, text=True, check=True)
    return json.loads(out.stdout)


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--points", type=int, default=2000)
    args = p.parse_args()
    fast = run("1", args.points)
    slow = run("0", args.points)
    for r in (fast, slow):
        print(f"{r['backend']:>6}: {r['seconds']:.3f} s total, {r['per_q_us']:.1f} us per q")
    print(f"speedup {slow['seconds'] / fast['seconds']:.1f}x")
    diff = max(abs(a - b) for a, b in zip(fast["checksum"], slow["checksum"]))
    print(f"checksum difference {diff:.2e}")


if __name__ == "__main__":
    main()
