"""Throughput of the exhaustive strategy enumeration (strategy evaluations per second)."""
import argparse
import time

from wnonlocal import build_omega, enumerate_bound

p = argparse.ArgumentParser(description=__doc__)
p.add_argument("--n", type=int, nargs="+", default=[10, 11, 12])
args = p.parse_args()

enumerate_bound(build_omega(3))  # JIT warm-up
for n in args.n:
    start = time.perf_counter()
    cert = enumerate_bound(build_omega(n))
    dt = time.perf_counter() - start
    print(f"n={n}: {cert.strategies_searched} strategies in {dt:.2f}s -> {cert.strategies_searched / dt / 1e6:.1f} M/s, max={cert.max_value:+.0f}")
