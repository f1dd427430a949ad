"""Bit-equality of the compiled and pure-Python kernel backends."""

import numpy as np
import pytest

import linkforge.backend as backend_mod
from linkforge import _kernels_py, kinematics, raster, sampling
from linkforge.sampling import SampleConfig

compiled = pytest.importorskip("linkforge._kernels",
                               reason="compiled kernels not built")


@pytest.fixture()
def swap_backend():
    """Run a callable under each backend and return both results."""
    def runner(fn):
        original = backend_mod.kernels
        try:
            backend_mod.kernels = compiled
            a = fn()
            backend_mod.kernels = _kernels_py
            b = fn()
        finally:
            backend_mod.kernels = original
        return a, b
    return runner


def _random_valid_samples(catalog, graph_ids, config, want):
    out = []
    for gid in graph_ids:
        graph = catalog.by_id(gid).graph
        i = 0
        while len(out) < want and i < 500:
            try:
                inst, positions, traj = sampling.sample_instance(
                    graph, config.seed, gid, i, config)
                out.append((inst, positions, traj))
            except sampling.Rejected:
                pass
            i += 1
    return out


def test_trace_bit_identical(catalog3, swap_backend):
    config = SampleConfig(per_graph=1, seed=77)
    samples = _random_valid_samples(catalog3, ["T2-0", "T3-0", "T3-4"],
                                    config, 6)
    assert len(samples) >= 6
    for inst, _, _ in samples:
        a, b = swap_backend(lambda: kinematics.sweep(inst, 360))
        assert np.array_equal(a, b)


def test_slider_trace_bit_identical(slider_catalog2, swap_backend):
    config = SampleConfig(per_graph=1, seed=78)
    samples = _random_valid_samples(slider_catalog2, ["ST2-0"], config, 4)
    assert len(samples) >= 4
    for inst, _, _ in samples:
        a, b = swap_backend(lambda: kinematics.sweep(inst, 360))
        assert np.array_equal(a, b)


def test_failure_statuses_identical(t2_graph, swap_backend):
    from conftest import make_fourbar
    bad = make_fourbar(t2_graph, ground=1.0, crank=4.0, coupler=2.0, rocker=2.0)

    def run():
        try:
            kinematics.sweep(bad, 360)
            return None
        except kinematics.InfeasibleCycle as exc:
            return (exc.step, exc.node, exc.kind)

    a, b = swap_backend(run)
    assert a == b and a is not None


def test_renders_bit_identical(catalog3, swap_backend):
    config = SampleConfig(per_graph=1, seed=79, image_size=128)
    samples = _random_valid_samples(catalog3, ["T2-0", "T3-2"], config, 4)
    for inst, positions, traj in samples:
        t = raster.fit_transform(raster.sweep_bbox(positions), 128)
        a, b = swap_backend(lambda: raster.render_curve(traj, t, 128))
        assert np.array_equal(a, b)
        a, b = swap_backend(lambda: raster.render_mechanism(inst, 0.0, t, 128))
        assert np.array_equal(a, b)


def test_scalar_assemble_matches_both_kernels(fourbar, swap_backend):
    import math
    a, b = swap_backend(lambda: kinematics.sweep(fourbar, 64))
    assert np.array_equal(a, b)
    for i in (0, 21, 63):
        pos = kinematics.assemble(fourbar, math.tau * i / 64)
        for n, (x, y) in pos.items():
            assert a[i, n, 0] == x and a[i, n, 1] == y
