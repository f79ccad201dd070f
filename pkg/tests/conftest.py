import numpy as np
import pytest

from ksrobust import SbmParams, balanced_labels, sample_sbm


@pytest.fixture(scope="session")
def report_store():
    # acceptance tests stash harness reports here so the determinism
    # criterion can rerun protocols and compare digests
    return {}


def make_sbm(n, d, eps, seed):
    rng = np.random.default_rng(seed)
    labels = balanced_labels(n, rng)
    graph = sample_sbm(SbmParams(n=n, d=d, eps=eps), labels, rng)
    return graph, labels, rng


@pytest.fixture
def small_graph():
    graph, labels, _ = make_sbm(80, 10.0, 0.6, seed=3)
    return graph, labels
