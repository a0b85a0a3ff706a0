"""Time MIC on both kernel backends and check they agree.

    python benchmarks/bench_mic.py [--sizes 100 250 487 1000] [--repeat 5]
"""

import argparse
import time

import numpy as np

from sentmic.mic import available_backends, mic, use_backend


def workload(n, seed=0):
    rng = np.random.default_rng(seed)
    x = rng.normal(size=n).cumsum()
    y = np.convolve(x, np.ones(30) / 30, mode="same") + rng.normal(scale=2.0, size=n)
    return x, y


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--sizes", type=int, nargs="+", default=[100, 250, 487, 1000, 2000])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    backends = available_backends()
    if len(backends) < 2:
        print("compiled kernel not built; timing the fallback only")
    print(f"{'n':>6} " + " ".join(f"{b + ' ms':>13}" for b in backends) + "   speedup  agree")
    for n in args.sizes:
        x, y = workload(n)
        times, results = {}, {}
        for b in backends:
            prev = use_backend(b)
            try:
                mic(x, y)  # warm caches
                t0 = time.perf_counter()
                for _ in range(args.repeat):
                    results[b] = mic(x, y)
                times[b] = (time.perf_counter() - t0) / args.repeat * 1e3
            finally:
                use_backend(prev)
        agree = len({r.mic for r in results.values()}) == 1
        speed = times["python"] / times["compiled"] if "compiled" in times else 1.0
        print(f"{n:>6} " + " ".join(f"{times[b]:>13.1f}" for b in backends) + f"   {speed:>6.2f}x  {agree}")


if __name__ == "__main__":
    main()
