import numpy as np
import pytest

from hypersdp.model import ModelParams, make_partition, sample_whsbm
from hypersdp.similarity import build_similarity, expected_similarity, lambda_midpoint


@pytest.fixture
def strong_signal():
    """The n=60 balanced reference regime used across modules."""

    def factory(seed: int):
        partition = make_partition([20, 20, 20])
        params = ModelParams(n=60, d=3, k=3, p=0.8, q=0.1, seed=seed)
        w = sample_whsbm(params, partition)
        _, profile = expected_similarity(params, partition)
        return w, partition, params, profile

    return factory


def exhaustive_misclustering(est_labels, truth_labels, n_labels):
    """Reference metric: minimum over all label permutations (factorial scan)."""
    import itertools

    n = len(truth_labels)
    best = n
    for perm in itertools.permutations(range(1, n_labels + 1)):
        wrong = sum(1 for t, e in zip(truth_labels, est_labels) if t != perm[e - 1])
        best = min(best, wrong)
    return best / n
