"""Compare the compiled exhaustive-search kernel against the numpy fallback.

Usage: python benchmarks/bench_bruteforce.py [max_keywords]
"""

import sys
import time

import numpy as np

from sbo.kernels import HAVE_NATIVE, best_integer_bids


def bench(n: int, scenarios: int = 8, seed: int = 0) -> None:
    rng = np.random.default_rng(seed)
    clicks = rng.uniform(0, 20, size=(scenarios, n))
    cpcs = rng.uniform(0.1, 5, size=n)
    costs = clicks * cpcs
    probs = rng.uniform(0.1, 1, size=scenarios)
    probs /= probs.sum()
    budget = float(np.sum(probs @ costs) / 2)

    results = {}
    for label, force_python in (("native", False), ("python", True)):
        if label == "native" and not HAVE_NATIVE:
            continue
        start = time.perf_counter()
        mask, value = best_integer_bids(clicks, costs, probs, budget, force_python=force_python)
        elapsed = time.perf_counter() - start
        results[label] = (mask, value, elapsed)
        print(f"n={n:2d} {label:7s} {elapsed:8.3f}s  mask={mask:#x}  value={value:.6f}")
    if len(results) == 2:
        speedup = results["python"][2] / results["native"][2]
        agree = results["python"][0] == results["native"][0]
        print(f"n={n:2d} speedup={speedup:5.1f}x  masks agree: {agree}")


def main() -> None:
    max_n = int(sys.argv[1]) if len(sys.argv) > 1 else 20
    if not HAVE_NATIVE:
        print("compiled kernel unavailable; benchmarking fallback only")
    for n in range(12, max_n + 1, 2):
        bench(n)


if __name__ == "__main__":
    main()
