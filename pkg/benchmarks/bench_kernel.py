"""Benchmark the compiled kernel against the pure-Python fallback.

Times the raw kernel functions on synthetic term dicts and a realistic
end-to-end workload (a Hamiltonianity check on the second KdV
structure), then prints a small table with the speedup.  The workload is
run in subprocesses so that each backend is selected cleanly via
``JETHAM_KERNEL``.

    python3 benchmarks/bench_kernel.py [--repeat N]
"""

import argparse
import os
import random
import subprocess
import sys
import time
from fractions import Fraction

WORKLOAD = """
import time
from jetham import kernel
from jetham.hamfile import load_bundled
from jetham.schouten import Shadow, check_hamiltonian, shadow_to_bivector

assert kernel.BACKEND == %r, kernel.BACKEND
kdv = load_bundled("kdv")
W = shadow_to_bivector(Shadow(kdv.covering, list(kdv.fixture("F1").comps)))
best = float("inf")
for _ in range(%d):
    t0 = time.perf_counter()
    assert check_hamiltonian(kdv.covering, W)
    best = min(best, time.perf_counter() - t0)
print(best)
"""


def random_terms(rng, n):
    out = {}
    for _ in range(n):
        evens = sorted(rng.sample([("u", k) for k in range(6)],
                                  rng.randrange(4)))
        even = tuple((v, rng.randrange(1, 4)) for v in evens)
        odd = tuple(sorted(rng.sample([("p", k) for k in range(6)],
                                      rng.randrange(4))))
        out[(even, odd)] = Fraction(rng.randrange(-9, 10) or 1,
                                    rng.randrange(1, 5))
    return out


def bench_raw(impl, repeat):
    rng = random.Random(7)
    pairs = [(random_terms(rng, 12), random_terms(rng, 12))
             for _ in range(50)]
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        for t1, t2 in pairs:
            impl.terms_mul(t1, t2)
        best = min(best, time.perf_counter() - t0)
    return best


def bench_workload(backend, repeat):
    env = dict(os.environ, JETHAM_KERNEL=backend)
    out = subprocess.run(
        [sys.executable, "-c",
         WORKLOAD % ("python" if backend == "py" else "compiled", repeat)],
        capture_output=True, text=True, env=env, check=True)
    return float(out.stdout)


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()

    from jetham import _kernel_py
    try:
        from jetham import _ckernel
    except ImportError:
        raise SystemExit("compiled kernel not built; reinstall with Cython "
                         "and a C compiler available")

    rows = [
        ("terms_mul (synthetic)",
         bench_raw(_kernel_py, args.repeat),
         bench_raw(_ckernel, args.repeat)),
        ("check-hamiltonian (end to end)",
         bench_workload("py", args.repeat),
         bench_workload("c", args.repeat)),
    ]

    print(f"{'benchmark':<34} {'python':>10} {'compiled':>10} {'speedup':>8}")
    for name, py, c in rows:
        print(f"{name:<34} {py * 1e3:>8.2f}ms {c * 1e3:>8.2f}ms"
              f" {py / c:>7.2f}x")


if __name__ == "__main__":
    main()
