import itertools
import math

import numpy as np
import pytest

from hypersdp.combin import binom
from hypersdp.model import ModelParams, Partition, WeightedHypergraph, make_partition, sample_whsbm
from hypersdp.oracle import (
    MleConfig,
    brute_force_mle,
    brute_force_truncated,
    mle_polynomial_terms,
    polynomial_term,
    set_partitions,
)
from hypersdp.rng import generator
from hypersdp.sdp import SdpProblem, objective, solve
from hypersdp.similarity import build_similarity


def bell_number(n):
    # Bell triangle recurrence; B(n) is the last entry of row n
    row = [1]
    for _ in range(n - 1):
        new = [row[-1]]
        for v in row:
            new.append(new[-1] + v)
        row = new
    return row[-1]


def test_set_partitions_counts_and_canonical_form():
    # against Bell numbers for unrestricted block counts
    assert sum(1 for _ in set_partitions(4, 4)) == bell_number(4) == 15
    assert sum(1 for _ in set_partitions(5, 5)) == bell_number(5) == 52
    parts = list(set_partitions(4, 2))
    assert len(parts) == 8  # S(4,1) + S(4,2) = 1 + 7
    assert parts == sorted(parts)  # lexicographic emission
    for labels in parts:
        seen = []
        for lab in labels:
            if lab not in seen:
                seen.append(lab)
        assert seen == sorted(seen)  # first occurrences increase


def test_mu_lies_between_q_and_p():
    for p in (0.15, 0.4, 0.7, 0.95):
        for q in (0.05, 0.2, 0.5):
            if q >= p:
                continue
            mu = MleConfig(p=p, q=q).mu
            assert q < mu < p
    with pytest.raises(ValueError):
        MleConfig(p=0.2, q=0.5)


def test_brute_force_mle_single_block():
    part = make_partition([5])
    w = sample_whsbm(ModelParams(n=5, d=3, k=1, p=0.8, q=0.8, seed=2), part)
    res = brute_force_mle(w, 1, MleConfig(p=0.8, q=0.2))
    assert res.labels == (1,) * 5


def test_brute_force_mle_monotone_when_all_edges_present():
    # all weights 1 and mu < 1: grouping everyone maximizes homogeneous mass
    nodes = np.asarray(list(itertools.combinations(range(1, 6), 3)))
    w = WeightedHypergraph(5, 3, nodes, np.ones(len(nodes)))
    res = brute_force_mle(w, 2, MleConfig(p=0.9, q=0.1))
    assert res.labels == (1,) * 5


def test_brute_force_mle_recovers_planted():
    part = make_partition([3, 3])
    params = ModelParams(n=6, d=3, k=2, p=0.9, q=0.05, seed=7)
    w = sample_whsbm(params, part)
    res = brute_force_mle(w, 2, MleConfig(p=0.9, q=0.05))
    assert res.labels == part.labels


def test_brute_force_mle_validations():
    part = make_partition([6, 6])
    w = sample_whsbm(ModelParams(n=12, d=3, k=2, p=0.9, q=0.1, seed=0), part)
    with pytest.raises(ValueError):
        brute_force_mle(w, 2, MleConfig(p=0.9, q=0.1))  # n > 10
    frac = WeightedHypergraph(4, 3, np.asarray([[1, 2, 3]]), np.asarray([0.5]))
    with pytest.raises(ValueError):
        brute_force_mle(frac, 2, MleConfig(p=0.9, q=0.1))


def test_brute_force_truncated_sparsity_penalty():
    # A = 0, lam = 1, k = 2, n = 4: best split {2, 2} with value -4; {1, 3} gives -6
    part, value = brute_force_truncated(np.zeros((4, 4)), 2, 1.0)
    assert value == pytest.approx(-4.0)
    assert sorted(part.sizes) == [2, 2]
    # verify the alternatives by direct evaluation
    labs13 = np.asarray((1, 2, 2, 2))
    same = labs13[:, None] == labs13[None, :]
    np.fill_diagonal(same, False)
    assert (np.zeros((4, 4)) - 1.0)[same].sum() == pytest.approx(-6.0)


def test_brute_force_truncated_block_matrix():
    part = make_partition([3, 3])
    params = ModelParams(n=6, d=3, k=2, p=0.8, q=0.2, weight_law="constant")
    a = build_similarity(sample_whsbm(params, part))
    lam = 1.1
    est, value = brute_force_truncated(a, 2, lam)
    assert est.labels == part.labels
    # closed form: (p_minus - lam) * sum_a s_a (s_a - 1) with all entries at 1.4
    assert value == pytest.approx((1.4 - lam) * (3 * 2 + 3 * 2))


def test_brute_force_truncated_all_singletons():
    a = generator(3).uniform(0.0, 1.0, size=(5, 5))
    a = (a + a.T) / 2
    np.fill_diagonal(a, 0.0)
    part, value = brute_force_truncated(a, 5, float(a.max()) + 1.0)
    assert part.labels == (1, 2, 3, 4, 5)
    assert value == pytest.approx(0.0)
    with pytest.raises(ValueError):
        brute_force_truncated(np.zeros((11, 11)), 2, 0.1)


def test_truncation_identity():
    # degree-2 term at the membership matrix equals
    # 0.5 * <A - mu*C(n-2,d-2)*J, Z Z^T> + (n/2) * mu * C(n-2,d-2)
    rng = generator(12)
    cfg = MleConfig(p=0.8, q=0.2)
    for trial in range(30):
        n = int(rng.integers(4, 9))
        d = int(rng.integers(2, min(n, 4) + 1))
        k = int(rng.integers(1, 4))
        labels = tuple(int(v) + 1 for v in rng.integers(0, k, size=n))
        part = Partition(labels=labels, k=k)
        nodes = np.asarray(list(itertools.combinations(range(1, n + 1), d)))
        weights = rng.uniform(0.0, 1.0, size=len(nodes))
        w = WeightedHypergraph(n, d, nodes, weights)
        a = build_similarity(w)
        z = part.membership_matrix()
        c = binom(n - 2, d - 2)
        lhs = polynomial_term(w, cfg.mu, z, 2)
        rhs = 0.5 * float(((a - cfg.mu * c) * (z @ z.T)).sum()) + 0.5 * n * cfg.mu * c
        assert lhs == pytest.approx(rhs, abs=1e-10)


def test_low_order_terms_closed_forms():
    rng = generator(13)
    cfg = MleConfig(p=0.7, q=0.3)
    for trial in range(10):
        n = int(rng.integers(4, 8))
        d = 3
        k = int(rng.integers(1, 4))
        labels = tuple(int(v) + 1 for v in rng.integers(0, k, size=n))
        part = Partition(labels=labels, k=k)
        nodes = np.asarray(list(itertools.combinations(range(1, n + 1), d)))
        weights = (rng.random(len(nodes)) < 0.5).astype(float)
        w = WeightedHypergraph(n, d, nodes, weights)
        p0, p1, p2 = mle_polynomial_terms(w, part, cfg)
        # direct tensor sum: <W - mu 1_E, 1_E> = d! * sum_e (W_e - mu)
        centered = w.total_weight() - cfg.mu * binom(n, d)
        assert p0 == pytest.approx(k * centered, abs=1e-10)
        assert p1 == pytest.approx(d * (2 - k) * centered, abs=1e-10)
        # degree-2 terms at Y = 2Z - 1 and at Z differ by an affine map
        c = binom(n - 2, d - 2)
        a = build_similarity(w)
        b = a - cfg.mu * c
        np.fill_diagonal(b, 0.0)
        offdiag_half = 0.5 * b.sum()
        p2_at_z = polynomial_term(w, cfg.mu, part.membership_matrix(), 2)
        assert p2 == pytest.approx(4.0 * p2_at_z + (k - 4.0) * offdiag_half, abs=1e-9)


def test_zero_weights_zero_mu_terms_vanish():
    w = WeightedHypergraph(5, 3, np.empty((0, 3)), np.empty(0))
    part = make_partition([2, 3])
    for order in range(3):
        assert polynomial_term(w, 0.0, 2 * part.membership_matrix() - 1, order) == 0.0


def test_relaxation_dominates_and_matches_integral_oracle():
    rng = generator(14)
    for trial in range(6):
        n = int(rng.integers(5, 9))
        k = 2
        sizes = [n // 2, n - n // 2]
        part = make_partition(sizes)
        params = ModelParams(n=n, d=2, k=k, p=0.95, q=0.05, seed=int(rng.integers(1 << 30)))
        w = sample_whsbm(params, part)
        a = build_similarity(w)
        lam = 0.5
        sol = solve(SdpProblem.penalized(a, lam))
        oracle_part, oracle_val = brute_force_truncated(a, k, lam)
        # align conventions: the oracle omits the fixed diagonal contribution
        assert sol.objective >= (oracle_val - n * lam) - 1e-6
        if sol.integrality_gap() <= 1e-4:
            from hypersdp.extract import misclustering_error, round_solution

            est = round_solution(sol, k, seed=trial)
            assert misclustering_error(est, oracle_part) == 0.0
