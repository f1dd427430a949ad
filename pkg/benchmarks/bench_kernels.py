"""Benchmark: compiled kernels vs the pure-Python fallback.

Measures the two hot paths (full-cycle tracing and image rendering) on a
batch of valid sampled instances, plus one end-to-end dataset figure.

    python benchmarks/bench_kernels.py [--pairs 200]
"""

import argparse
import time

import numpy as np

import linkforge.backend as backend_mod
from linkforge import _kernels_py, graphs, kinematics, raster, sampling

try:
    from linkforge import _kernels as compiled
except ImportError:
    compiled = None


def collect_samples(n):
    catalog = graphs.build_catalog(2, "revolute")
    graph = catalog.by_id("T2-0").graph
    config = sampling.SampleConfig(per_graph=n, image_size=128, seed=404)
    out = []
    i = 0
    while len(out) < n:
        try:
            inst, positions, traj = sampling.sample_instance(
                graph, config.seed, "T2-0", i, config)
            out.append((inst, positions, traj))
        except sampling.Rejected:
            pass
        i += 1
    return out


def bench(kernels, samples, steps=360):
    backend_mod.kernels = kernels
    t0 = time.perf_counter()
    for inst, _, _ in samples:
        kinematics.sweep(inst, steps)
    t_trace = time.perf_counter() - t0

    renders = []
    for inst, positions, traj in samples:
        t = raster.fit_transform(raster.sweep_bbox(positions), 128)
        renders.append((inst, traj, t))
    t0 = time.perf_counter()
    for inst, traj, t in renders:
        raster.render_curve(traj, t, 128)
        raster.render_mechanism(inst, 0.0, t, 128)
    t_render = time.perf_counter() - t0
    return t_trace, t_render


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--pairs", type=int, default=200)
    args = parser.parse_args()

    samples = collect_samples(args.pairs)
    n = len(samples)
    print(f"benchmarking {n} four-bar instances, 360 steps, 128x128 renders\n")

    results = {}
    backends = [("python", _kernels_py)]
    if compiled is not None:
        backends.insert(0, ("compiled", compiled))
    original = backend_mod.kernels
    try:
        for name, kernels in backends:
            t_trace, t_render = bench(kernels, samples)
            results[name] = (t_trace, t_render)
            print(f"{name:>9}: trace {n / t_trace:8.0f} cycles/s   "
                  f"render {n / t_render:7.0f} pairs/s   "
                  f"(trace {t_trace * 1e3 / n:6.3f} ms, "
                  f"render {t_render * 1e3 / n:6.3f} ms per instance)")
    finally:
        backend_mod.kernels = original

    if compiled is not None:
        ct, cr = results["compiled"]
        pt, pr = results["python"]
        print(f"\n  speedup: trace x{pt / ct:.1f}, render x{pr / cr:.1f}")
    else:
        print("\ncompiled kernels not built; python backend only")


if __name__ == "__main__":
    main()
