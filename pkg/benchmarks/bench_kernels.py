#!/usr/bin/env python3
"""Benchmark the compiled grid kernels against the NumPy fallback.

Exercises the three hot kernels on grid sizes matching the default desk
configurations (64^3, 256^2, 1024) plus a full weighted-norm evaluation
through the spectral layer with each backend forced in turn.

Run:  python benchmarks/bench_kernels.py
"""

import time

import numpy as np

from carleman._kernels import backends


def timeit(fn, repeat=7):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    impls = backends()
    print(f"available backends: {', '.join(impls)}")
    rng = np.random.default_rng(0)
    sizes = {"1024 (n=1)": 1024, "256^2 (n=2)": 256**2, "64^3 (n=3)": 64**3}

    header = f"{'kernel':<28}{'size':<14}" + "".join(f"{name:>12}" for name in impls)
    if len(impls) > 1:
        header += f"{'speedup':>10}"
    print(header)
    print("-" * len(header))

    for label, m in sizes.items():
        a = rng.uniform(0.0, 3.0, size=m)
        w = rng.uniform(0.0, 2.0, size=m)
        g = [rng.normal(size=m) + 1j * rng.normal(size=m) for _ in range(3)]
        z = g[0]
        rows = [
            ("weighted_power_sum p=2", lambda impl: impl.weighted_power_sum(a, w, 2.0)),
            ("weighted_power_sum p=2.7", lambda impl: impl.weighted_power_sum(a, w, 2.7)),
            ("complex |f|^p sum, p=2", lambda impl: impl.weighted_power_sum_complex(z, w, 2.0)),
            ("complex |f|^p sum, p=1.5", lambda impl: impl.weighted_power_sum_complex(z, w, 1.5)),
            ("piecewise_power_values", lambda impl: impl.piecewise_power_values(a + 1e-6, -0.5, 0.25)),
            ("abs_magnitude (3 comps)", lambda impl: impl.abs_magnitude(g)),
        ]
        for name, call in rows:
            times = {bname: timeit(lambda impl=impl: call(impl))
                     for bname, impl in impls.items()}
            line = f"{name:<28}{label:<14}"
            for bname in impls:
                line += f"{times[bname] * 1e3:>10.3f}ms"
            if len(impls) > 1 and "cython" in times:
                line += f"{times['python'] / times['cython']:>9.2f}x"
            print(line)
    print()

    # end-to-end: a weighted norm on a 3-d grid through each backend
    # (spectral looks kernels up on the module object at call time, so
    # reloading the selector module switches the backend in place)
    import importlib
    import os

    import carleman._kernels as kernel_module
    from carleman.spectral import sample_radial, weighted_norm
    from carleman.weights import PiecewisePowerWeight

    results = {}
    for backend in impls:
        os.environ["CARLEMAN_KERNELS"] = "python" if backend == "python" else ""
        importlib.reload(kernel_module)
        f = sample_radial(lambda r: np.exp(-(r**2)), 3, 6.0, 64)
        weight = PiecewisePowerWeight(-1.0, -0.5)
        results[backend] = timeit(lambda: weighted_norm(f, weight, 2.0))
    os.environ.pop("CARLEMAN_KERNELS", None)
    importlib.reload(kernel_module)

    print("end-to-end weighted_norm on 64^3 (weight eval + power sum):")
    for backend, t in results.items():
        print(f"  {backend:<8} {t * 1e3:8.3f} ms")
    if "cython" in results and "python" in results:
        print(f"  speedup  {results['python'] / results['cython']:8.2f} x")


if __name__ == "__main__":
    main()
