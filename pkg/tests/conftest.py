import numpy as np
import pytest

from linkforge import graphs, sampling
from linkforge.kinematics import DyadParams, LinkageInstance


@pytest.fixture(scope="session")
def catalog3():
    return graphs.build_catalog(3, "revolute")


@pytest.fixture(scope="session")
def t2_graph(catalog3):
    return catalog3.by_id("T2-0").graph


@pytest.fixture(scope="session")
def slider_catalog2():
    return graphs.build_catalog(2, "slider")


def make_fourbar(t2_graph, ground=4.0, crank=1.0, coupler=3.0, rocker=3.5,
                 coupler_pt=(2.0, 2.0), sign=1.0, phase=0.0):
    """Four-bar with a coupler point.  Node 3 is pinned to (B, I): len_p is
    the rocker (to B), len_q the coupler (to I)."""
    return LinkageInstance(
        graph=t2_graph, fixed_a=(0.0, 0.0), fixed_b=(ground, 0.0),
        crank_length=crank, crank_phase=phase,
        node_params=(DyadParams(rocker, coupler, sign),
                     DyadParams(coupler_pt[0], coupler_pt[1], sign)))


@pytest.fixture(scope="session")
def fourbar(t2_graph):
    return make_fourbar(t2_graph)


@pytest.fixture(scope="session")
def small_dataset(tmp_path_factory, catalog3):
    """Shared tiny T2 dataset: 240 pairs at 64 px."""
    out = tmp_path_factory.mktemp("dataset")
    config = sampling.SampleConfig(per_graph=240, image_size=64, seed=11)
    rows, report = sampling.generate_dataset(catalog3, ["T2-0"], config, str(out))
    return {"dir": str(out), "rows": rows, "report": report, "config": config}


@pytest.fixture()
def rng():
    return np.random.Generator(np.random.PCG64(12345))
