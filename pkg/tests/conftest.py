from __future__ import annotations

import pytest

from flowdir import extract_subnetwork, load_sioux_falls
from flowdir.netmodel import ArcAttrs, Link
from flowdir.sue import SueParams

CASE_STUDY_NODES = {5, 6, 8, 9, 10, 16, 17}


@pytest.fixture(scope="session")
def sioux_falls():
    return load_sioux_falls()


@pytest.fixture(scope="session")
def subnet(sioux_falls):
    net, trips = sioux_falls
    return extract_subnetwork(net, trips, CASE_STUDY_NODES)


def _symmetric(capacity: float, fft: float) -> ArcAttrs:
    return ArcAttrs(capacity=capacity, free_flow_time=fft, bpr_b=0.15, bpr_power=4.0)


@pytest.fixture()
def triangle():
    attrs = _symmetric(1000.0, 5.0)
    links = [Link(1, 2, attrs, attrs), Link(1, 3, attrs, attrs), Link(2, 3, attrs, attrs)]
    demand = {(o, d): 100.0 for o in (1, 2, 3) for d in (1, 2, 3) if o != d}
    return links, demand


@pytest.fixture()
def braess():
    # the classic four-node paradox instance with affine BPR costs
    var = ArcAttrs(capacity=1.0, free_flow_time=1.0, bpr_b=10.0, bpr_power=1.0)
    const = ArcAttrs(capacity=1.0, free_flow_time=50.0, bpr_b=0.02, bpr_power=1.0)
    mid = ArcAttrs(capacity=1.0, free_flow_time=10.0, bpr_b=0.1, bpr_power=1.0)
    links = [
        Link(1, 2, var, var),
        Link(1, 3, const, const),
        Link(2, 3, mid, mid),
        Link(2, 4, const, const),
        Link(3, 4, var, var),
    ]
    demand = {(1, 4): 6.0}
    return links, demand


@pytest.fixture()
def fast_params():
    return SueParams(sigma=0.1, max_iterations=50, gap_tolerance=1e-3, seed=123)
