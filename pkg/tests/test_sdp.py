import itertools

import numpy as np
import pytest

from hypersdp.model import ModelParams, make_partition, sample_whpcm, sample_whsbm
from hypersdp.oracle import set_partitions
from hypersdp.rng import generator
from hypersdp.sdp import (
    FEAS_TOL,
    SdpProblem,
    SolverConfig,
    _project_box_affine_exact,
    balanced_totals,
    objective,
    project_affine_box,
    project_psd,
    solve,
)
from hypersdp.similarity import build_similarity, expected_similarity, lambda_midpoint


def assert_feasible(sol, trace_total, n, ones_total=None):
    x = sol.x
    assert np.array_equal(x, x.T)
    assert x.min() >= -FEAS_TOL and x.max() <= 1.0 + FEAS_TOL
    assert abs(np.trace(x) - trace_total) <= FEAS_TOL * n
    assert np.linalg.eigvalsh(x).min() >= -FEAS_TOL * n
    if ones_total is not None:
        assert abs(x.sum() - ones_total) <= FEAS_TOL * n * n


def cluster_matrices(n, max_blocks):
    for labels in set_partitions(n, max_blocks):
        z = np.zeros((n, max(labels)))
        for i, lab in enumerate(labels):
            z[i, lab - 1] = 1.0
        yield labels, z @ z.T


def test_objective_basics():
    a = np.asarray([[0.0, 2.0], [2.0, 0.0]])
    assert objective(a, 0.5, np.zeros((2, 2))) == 0.0
    assert objective(a, 0.5, np.eye(2)) == pytest.approx(-1.0)  # diagonal only
    with pytest.raises(ValueError):
        objective(a, 0.5, np.zeros((3, 3)))


def test_objective_ground_truth_closed_form():
    # constant-law A equals E[A]; on X* only within-community pairs and the
    # diagonal contribute: sum_a (s_a^2 - s_a) (delta_aa - lam) - n*lam
    part = make_partition([3, 3])
    params = ModelParams(n=6, d=3, k=2, p=0.8, q=0.2, weight_law="constant")
    w = sample_whsbm(params, part)
    a = build_similarity(w)
    lam = 1.1
    hand = 2 * (9 - 3) * (1.4 - lam) - 6 * lam
    assert objective(a, lam, part.cluster_matrix()) == pytest.approx(hand)
    assert hand == pytest.approx(-3.0)


def test_project_psd():
    rng = generator(0)
    m = rng.normal(size=(6, 6))
    psd = m @ m.T
    assert np.abs(project_psd(psd) - psd).max() <= 1e-12

    assert np.allclose(project_psd(np.diag([1.0, -1.0])), np.diag([1.0, 0.0]))

    v = rng.normal(size=5)
    assert np.abs(project_psd(-np.outer(v, v))).max() <= 1e-12


def test_project_affine_box_basics():
    feasible = np.full((3, 3), 0.5)
    np.fill_diagonal(feasible, 1.0)
    out = project_affine_box(feasible, trace_total=3.0)
    assert np.abs(out - feasible).max() <= 1e-9

    assert np.array_equal(project_affine_box(np.full((3, 3), 2.0)), np.ones((3, 3)))

    # zero matrix with Trace=n: diagonal rises to 1, off-diagonal stays 0
    out = project_affine_box(np.zeros((4, 4)), trace_total=4.0)
    assert np.allclose(out, np.eye(4), atol=1e-9)


def test_projection_dual_route_agreement():
    # Dykstra sweeps vs exact multiplier projection compute the same point.
    # Inputs stay near-feasible so Dykstra converges inside its sweep cap.
    rng = generator(7)
    for trial in range(6):
        for tt, ot in [(9.0, None), (5.0, 13.0)]:
            base = _project_box_affine_exact(rng.normal(0.4, 0.5, size=(9, 9)), tt, ot)
            v = base + rng.normal(0.0, 0.05, size=(9, 9))
            exact = _project_box_affine_exact(v, tt, ot)
            dyk = project_affine_box(v, tt, ot)
            # exact output is feasible ...
            assert abs(np.trace(exact) - tt) <= 1e-9
            if ot is not None:
                assert abs(exact.sum() - ot) <= 1e-8
            assert exact.min() >= 0.0 and exact.max() <= 1.0
            # ... and no farther from v than the Dykstra point (it is the
            # projection; the slack covers Dykstra's capped-sweep residual)
            assert np.linalg.norm(exact - v) <= np.linalg.norm(dyk - v) + 1e-6
            assert np.abs(exact - dyk).max() <= 1e-5


def test_projection_far_input_feasibility():
    # Dykstra may exit at its sweep cap on far inputs; the exact projection
    # must stay feasible regardless
    v = generator(8).normal(0.3, 0.9, size=(9, 9))
    exact = _project_box_affine_exact(v, 5.0, 13.0)
    assert abs(np.trace(exact) - 5.0) <= 1e-9
    assert abs(exact.sum() - 13.0) <= 1e-8
    assert exact.min() >= 0.0 and exact.max() <= 1.0


def test_identity_optimum_when_lambda_dominates():
    # lam > max A_ij makes every off-diagonal coefficient negative, and
    # Trace(X) = n pins the diagonal contribution, so X = I is optimal
    rng = generator(1)
    a = rng.uniform(0.0, 1.0, size=(4, 4))
    a = (a + a.T) / 2.0
    np.fill_diagonal(a, 0.0)
    lam = float(a.max()) + 0.5
    sol = solve(SdpProblem.penalized(a, lam))
    assert np.abs(sol.x - np.eye(4)).max() <= 1e-4
    assert_feasible(sol, 4.0, 4)
    # brute force over all cluster matrices with up to n blocks confirms it
    best = max(objective(a, lam, x) for _, x in cluster_matrices(4, 4))
    assert objective(a, lam, np.eye(4)) == pytest.approx(best)


def test_two_block_exact_recovery():
    part = make_partition([2, 2])
    params = ModelParams(n=4, d=2, k=2, p=1.0, q=0.0, weight_law="constant")
    a = build_similarity(sample_whsbm(params, part))
    xstar = part.cluster_matrix()
    sol = solve(SdpProblem.penalized(a, 0.5))
    assert np.abs(sol.x - xstar).max() <= 1e-4
    # combinatorial brute force confirms X* is the discrete optimum
    vals = [(objective(a, 0.5, x), labels) for labels, x in cluster_matrices(4, 2)]
    best_val, best_labels = max(vals)
    assert best_labels == (1, 1, 2, 2)
    assert sol.objective >= best_val - 1e-6


def test_constrained_identity_case():
    # ones_total = trace_total = n forces zero off-diagonal mass: X = I
    rng = generator(2)
    a = rng.uniform(0.0, 1.0, size=(3, 3))
    a = (a + a.T) / 2.0
    np.fill_diagonal(a, 0.0)
    sol = solve(SdpProblem.constrained(a, 3.0, 3.0))
    assert np.abs(sol.x - np.eye(3)).max() <= 1e-4
    assert_feasible(sol, 3.0, 3, ones_total=3.0)


def test_ground_truth_feasibility():
    part = make_partition([4, 4, 4])
    xstar = part.cluster_matrix()
    assert set(np.unique(xstar)) <= {0.0, 1.0}
    assert np.trace(xstar) == 12.0
    assert np.linalg.eigvalsh(xstar).min() >= -1e-12

    part_o = make_partition([4, 4], n_outliers=3)
    xo = part_o.cluster_matrix()
    assert np.trace(xo) == 8.0 == balanced_totals(2, 4)[0]
    assert xo.sum() == 32.0 == balanced_totals(2, 4)[1]


def test_optimality_sandwich_strong_signal(strong_signal):
    w, part, params, profile = strong_signal(3)
    a = build_similarity(w)
    lam = lambda_midpoint(profile)
    sol = solve(SdpProblem.penalized(a, lam))
    xstar = part.cluster_matrix()
    assert sol.objective >= objective(a, lam, xstar) - 1e-4 * 60 * 60
    assert_feasible(sol, 60.0, 60)
    assert sol.converged
    cfg = SolverConfig()
    assert sol.primal_residual <= cfg.tol_primal * 60
    assert sol.dual_residual <= cfg.tol_dual * 60


def test_outlier_mode_recovery():
    part = make_partition([15, 15, 15], n_outliers=15)
    params = ModelParams(n=60, d=3, k=3, p=0.9, q=0.1, seed=3)
    a = build_similarity(sample_whpcm(params, part))
    sol = solve(SdpProblem.constrained(a, *balanced_totals(3, 15)))
    assert np.abs(sol.x - part.cluster_matrix()).max() <= 1e-4
    assert_feasible(sol, 45.0, 60, ones_total=675.0)


def test_brute_force_dominance_small():
    rng = generator(5)
    for trial in range(5):
        n = int(rng.integers(4, 8))
        a = rng.uniform(0.0, 2.0, size=(n, n))
        a = (a + a.T) / 2.0
        np.fill_diagonal(a, 0.0)
        lam = float(rng.uniform(0.2, 1.5))
        sol = solve(SdpProblem.penalized(a, lam))
        best = max(objective(a, lam, x) for _, x in cluster_matrices(n, 3))
        assert sol.objective >= best - 1e-6


def test_record_trace_and_nonconvergence():
    rng = generator(9)
    a = rng.uniform(0.0, 1.0, size=(10, 10))
    a = (a + a.T) / 2.0
    np.fill_diagonal(a, 0.0)
    sol = solve(SdpProblem.penalized(a, 0.5), SolverConfig(max_iter=3), record_trace=True)
    assert len(sol.trace) == 3
    assert not sol.converged
    # best-effort point is still inside the box
    assert sol.x.min() >= -FEAS_TOL and sol.x.max() <= 1.0 + FEAS_TOL


def test_solver_input_validation():
    with pytest.raises(ValueError):
        solve(SdpProblem.penalized(np.asarray([[0.0, 1.0], [0.5, 0.0]]), 0.1))
    bad = np.zeros((3, 3))
    bad[0, 1] = bad[1, 0] = np.nan
    with pytest.raises(ValueError):
        solve(SdpProblem.penalized(bad, 0.1))
    with pytest.raises(ValueError):
        SdpProblem.penalized(np.zeros((3, 3)), -1.0)
    with pytest.raises(ValueError):
        SdpProblem.constrained(np.zeros((3, 3)), 3.0, 2.0)
    with pytest.raises(ValueError):
        SolverConfig(rho=-1.0)
    with pytest.raises(ValueError):
        SolverConfig(over_relaxation=2.0)
