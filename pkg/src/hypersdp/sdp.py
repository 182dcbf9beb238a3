"""Splitting solver for the clustering SDP relaxations.

Maximizes <A - lambda*J, X> (penalized form) or <A, X> subject to fixed
Trace(X) and <J, X> (constrained form) over the set

    {X PSD}  intersect  {0 <= X_ij <= 1, Trace(X) = t [, <J, X> = c]}.

The two constraint blocks are split ADMM-style: the PSD block is handled by
an eigenvalue projection, the box/affine block by an exact clipped projection
(Lagrange multipliers located by bisection), with over-relaxation and
residual balancing on the penalty parameter.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

# Returned iterates satisfy feasibility to within FEAS_TOL * n (entries, trace,
# minimum eigenvalue), independent of the configured residual tolerances.
FEAS_TOL = 1e-6

_DYKSTRA_TOL = 1e-10
_DYKSTRA_MAX_SWEEPS = 100
_BISECT_STEPS = 80


@dataclass(frozen=True)
class SdpProblem:
    """One instance of the relaxation over a similarity matrix."""

    a: np.ndarray
    mode: str  # "penalized" | "constrained"
    lam: float = 0.0
    trace_total: float = 0.0
    ones_total: float | None = None

    @classmethod
    def penalized(cls, a: np.ndarray, lam: float) -> "SdpProblem":
        if lam < 0:
            raise ValueError("lambda must be >= 0")
        return cls(a=np.asarray(a, dtype=np.float64), mode="penalized", lam=lam, trace_total=float(a.shape[0]))

    @classmethod
    def constrained(cls, a: np.ndarray, trace_total: float, ones_total: float) -> "SdpProblem":
        n = a.shape[0]
        if not trace_total <= ones_total <= trace_total * n:
            raise ValueError(f"need trace_total <= ones_total <= n*trace_total, got {trace_total}, {ones_total}")
        return cls(a=np.asarray(a, dtype=np.float64), mode="constrained", trace_total=float(trace_total), ones_total=float(ones_total))


def balanced_totals(k: int, s: int) -> tuple[float, float]:
    """Constraint constants (k*s, k*s^2) for k equal communities of size s."""
    return float(k * s), float(k * s * s)


@dataclass(frozen=True)
class SolverConfig:
    """Splitting-solver knobs. Residual tolerances are scaled by n at solve time."""

    rho: float = 1.0
    tol_primal: float = 1e-5
    tol_dual: float = 1e-5
    max_iter: int = 5000
    over_relaxation: float = 1.6

    def __post_init__(self):
        if self.rho <= 0 or self.tol_primal <= 0 or self.tol_dual <= 0:
            raise ValueError("rho and tolerances must be positive")
        if self.max_iter < 1:
            raise ValueError("max_iter must be >= 1")
        if not 1.0 <= self.over_relaxation <= 1.8:
            raise ValueError("over_relaxation must lie in [1, 1.8]")


@dataclass
class SdpSolution:
    x: np.ndarray
    objective: float
    iterations: int
    primal_residual: float
    dual_residual: float
    converged: bool
    trace: list[tuple[int, float, float, float]] = field(default_factory=list, repr=False)

    def integrality_gap(self) -> float:
        """max_ij |X_ij - round(X_ij)|; near 0 means the relaxation is integral."""
        return float(np.abs(self.x - np.round(self.x)).max())


def objective(a: np.ndarray, lam: float, x: np.ndarray) -> float:
    """sum_ij (A_ij - lambda) X_ij."""
    a = np.asarray(a)
    x = np.asarray(x)
    if a.shape != x.shape:
        raise ValueError("shape mismatch between A and X")
    return float(np.sum((a - lam) * x))


def project_psd(m: np.ndarray) -> np.ndarray:
    """Frobenius-nearest positive semidefinite matrix (negative eigenvalues clipped)."""
    vals, vecs = scipy.linalg.eigh(np.asarray(m, dtype=np.float64), check_finite=False)
    pos = vals > 0
    if not pos.any():
        return np.zeros_like(m)
    v = vecs[:, pos] * vals[pos]
    out = v @ vecs[:, pos].T
    return (out + out.T) / 2.0


def _min_eigenvalue(m: np.ndarray) -> float:
    return float(scipy.linalg.eigh(m, eigvals_only=True, subset_by_index=[0, 0], check_finite=False)[0])


def _clip_sum_solve(v: np.ndarray, target: float) -> float:
    """Shift theta with sum(clip(v - theta, 0, 1)) = target (monotone bisection)."""
    lo = float(v.min()) - 1.0
    hi = float(v.max())
    for _ in range(_BISECT_STEPS):
        mid = 0.5 * (lo + hi)
        if np.clip(v - mid, 0.0, 1.0).sum() >= target:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _project_box_affine_exact(v: np.ndarray, trace_total: float, ones_total: float | None) -> np.ndarray:
    """Exact projection onto {0 <= X <= 1} with fixed trace [and fixed total sum].

    The KKT system reduces to X = clip(V - theta2 - theta1 * I); theta1 and
    theta2 are located by nested bisection on the monotone constraint sums.
    """
    n = v.shape[0]
    diag = np.diagonal(v).copy()
    off_mask = ~np.eye(n, dtype=bool)
    if ones_total is None:
        out = np.clip(v, 0.0, 1.0)
        theta1 = _clip_sum_solve(diag, trace_total)
        np.fill_diagonal(out, np.clip(diag - theta1, 0.0, 1.0))
        return out
    off = v[off_mask]
    off_target = ones_total - trace_total

    lo = float(v.min()) - 1.0
    hi = float(v.max())
    for _ in range(_BISECT_STEPS):
        theta2 = 0.5 * (lo + hi)
        if np.clip(off - theta2, 0.0, 1.0).sum() >= off_target:
            lo = theta2
        else:
            hi = theta2
    theta2 = 0.5 * (lo + hi)
    theta1 = _clip_sum_solve(diag - theta2, trace_total)
    out = np.clip(v - theta2, 0.0, 1.0)
    np.fill_diagonal(out, np.clip(diag - theta2 - theta1, 0.0, 1.0))
    return out


def project_affine_box(m: np.ndarray, trace_total: float | None = None, ones_total: float | None = None) -> np.ndarray:
    """Dykstra-corrected alternating projection onto the box intersected with the affine constraints.

    Sweeps until the combined residual drops below 1e-10 (or 100 sweeps),
    ending on the box projection so entries lie in [0, 1] exactly. The exact
    multiplier-based projection used internally by :func:`solve` computes the
    same point; the two implementations cross-check each other in tests.
    """
    x = np.asarray(m, dtype=np.float64).copy()
    if trace_total is None:
        return np.clip(x, 0.0, 1.0)
    p = np.zeros_like(x)
    q = np.zeros_like(x)
    y = x
    for _ in range(_DYKSTRA_MAX_SWEEPS):
        w = _project_affine(x + p, trace_total, ones_total)
        p = x + p - w
        y = np.clip(w + q, 0.0, 1.0)
        q = w + q - y
        if np.abs(y - w).max() <= _DYKSTRA_TOL:
            return y
        x = y
    return y


def _project_affine(m, trace_total, ones_total):
    """Projection onto {Trace(X) = t} or its intersection with {<J, X> = c}."""
    n = m.shape[0]
    tr = np.trace(m)
    if ones_total is None:
        out = m.copy()
        out[np.diag_indices(n)] += (trace_total - tr) / n
        return out
    # normals I and J: Gram matrix [[n, n], [n, n^2]]
    total = m.sum()
    det = n * n * n - n * n
    alpha = ((trace_total - tr) * n * n - (ones_total - total) * n) / det
    beta = ((ones_total - total) * n - (trace_total - tr) * n) / det
    out = m + beta
    out[np.diag_indices(n)] += alpha
    return out


def solve(problem: SdpProblem, cfg: SolverConfig | None = None, record_trace: bool = False) -> SdpSolution:
    """Run the splitting iteration until residuals and feasibility targets are met.

    Returns the box/affine-feasible iterate; ``converged`` is False when the
    iteration cap was reached, in which case the best-effort point is still
    returned.
    """
    cfg = cfg or SolverConfig()
    a = np.asarray(problem.a, dtype=np.float64)
    n = a.shape[0]
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("A must be square")
    if not np.isfinite(a).all():
        raise ValueError("A must be finite")
    if not np.allclose(a, a.T, atol=1e-12):
        raise ValueError("A must be symmetric")

    if problem.mode == "penalized":
        b = a - problem.lam
        trace_total, ones_total = float(n), None
    elif problem.mode == "constrained":
        b = a.copy()
        trace_total, ones_total = problem.trace_total, problem.ones_total
    else:
        raise ValueError(f"unknown mode {problem.mode!r}")
    b = (b + b.T) / 2.0

    tol_primal = cfg.tol_primal * n
    tol_dual = cfg.tol_dual * n
    eig_floor = -FEAS_TOL * n

    rho = cfg.rho
    alpha = cfg.over_relaxation
    z = np.eye(n)
    u = np.zeros((n, n))
    trace_log: list[tuple[int, float, float, float]] = []
    primal = dual = np.inf
    it = 0
    for it in range(1, cfg.max_iter + 1):
        x = project_psd(z - u + b / rho)
        x_relaxed = alpha * x + (1.0 - alpha) * z
        z_old = z
        z = _project_box_affine_exact(x_relaxed + u, trace_total, ones_total)
        u = u + x_relaxed - z

        primal = float(np.linalg.norm(x - z))
        dual = float(rho * np.linalg.norm(z - z_old))
        if record_trace:
            trace_log.append((it, objective(a, problem.lam, z), primal, dual))
        if primal <= tol_primal and dual <= tol_dual:
            break
        # residual balancing keeps the two residuals within a factor of 10
        if primal > 10.0 * dual:
            rho *= 2.0
            u /= 2.0
        elif dual > 10.0 * primal:
            rho /= 2.0
            u *= 2.0

    # z is box/affine-feasible by construction; its PSD defect (bounded by the
    # primal residual) is removed by alternating projections, which converge
    # much faster than the ADMM tail for pure feasibility restoration
    feasible = _min_eigenvalue(z) >= eig_floor
    repairs = 0
    while not feasible and repairs < 100:
        z = _project_box_affine_exact(project_psd(z), trace_total, ones_total)
        feasible = _min_eigenvalue(z) >= eig_floor
        repairs += 1

    converged = primal <= tol_primal and dual <= tol_dual and feasible
    return SdpSolution(
        x=z,
        objective=objective(a, problem.lam, z),
        iterations=it,
        primal_residual=primal,
        dual_residual=dual,
        converged=converged,
        trace=trace_log,
    )
