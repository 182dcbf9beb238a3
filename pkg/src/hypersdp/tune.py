"""Data-driven estimation of (k, s, p^-, q^+, lambda) from the similarity spectrum.

Valid for the balanced model: the expected similarity matrix has a three-level
spectrum whose largest gap sits at index k, from which the community count and
the tuning window endpoints are recovered.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .rng import generator


@dataclass(frozen=True)
class TuneEstimate:
    k_hat: int
    s_hat: float
    p_minus_hat: float
    q_plus_hat: float
    lambda_hat: float
    eigenvalues: tuple[float, ...]  # sorted non-increasing


def estimate(a: np.ndarray, seed: int = 0) -> TuneEstimate:
    """Estimate model parameters from the observed similarity matrix.

    k_hat maximizes the eigenvalue gap over positions {2, ..., n-1}
    (ties broken uniformly at random, seeded); the remaining estimators are
    closed-form functions of the two top eigenvalues.
    """
    a = np.asarray(a, dtype=np.float64)
    n = a.shape[0]
    if n < 4:
        raise ValueError(f"need n >= 4 to estimate, got n={n}")
    eigs = np.sort(scipy.linalg.eigh(a, eigvals_only=True, check_finite=False))[::-1]
    # gap at position i (1-based) is eigs[i-1] - eigs[i], restricted to 2..n-1
    gaps = eigs[1 : n - 1] - eigs[2:n]
    best = gaps.max()
    ties = np.flatnonzero(gaps >= best - 0.0)
    pick = ties[0] if ties.size == 1 else ties[generator(seed, 0x7E5).integers(ties.size)]
    k_hat = int(pick) + 2
    s_hat = n / k_hat
    p_minus_hat = (s_hat * eigs[0] + (n - s_hat) * eigs[1]) / (n * (s_hat - 1.0))
    q_plus_hat = (eigs[0] - eigs[1]) / n
    return TuneEstimate(
        k_hat=k_hat,
        s_hat=float(s_hat),
        p_minus_hat=float(p_minus_hat),
        q_plus_hat=float(q_plus_hat),
        lambda_hat=float(0.5 * (p_minus_hat + q_plus_hat)),
        eigenvalues=tuple(float(v) for v in eigs),
    )


def expected_spectrum(n: int, k: int, s: int, p_minus: float, q_plus: float) -> np.ndarray:
    """Closed-form eigenvalues of E[A] for the balanced model (n = k*s).

    lambda_1 = (s-1)(p^- - q^+) + (n-1)q^+, lambda_2..k = (s-1)(p^- - q^+) - q^+,
    and the remaining n-k eigenvalues equal -p^-.
    """
    if n != k * s:
        raise ValueError(f"balanced spectrum needs n = k*s, got n={n}, k={k}, s={s}")
    gap = (s - 1) * (p_minus - q_plus)
    out = np.empty(n)
    out[0] = gap + (n - 1) * q_plus
    out[1:k] = gap - q_plus
    out[k:] = -p_minus
    return out
