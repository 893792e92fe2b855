"""Per-cluster covariance estimation with shrinkage toward the diagonal.

The shrunk estimate is ``S* = lam * diag(S) + (1 - lam) * S`` with the
analytic intensity of Schafer & Strimmer for the "diagonal, unequal
variance" target::

    lam = sum_{i != j} Var(s_ij) / sum_{i != j} s_ij**2

Variances are never shrunk, only correlations between time points are
pulled toward zero, which keeps the matrix invertible when a cluster has
fewer members than the series is long.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .errors import ContractViolation, InsufficientDataError, NumericalDegeneracyError

RIDGE_START = 1e-8
RIDGE_STOP = 1e-2
RIDGE_FLOOR = 1e-12
ER_TAU = 1e-4


@dataclass(frozen=True)
class ShrinkageEstimate:
    """Moments of one cluster.

    ``S_star`` is the regularized covariance; ``S_pd`` is the same matrix after
    :func:`ensure_positive_definite` and is what synthesis factorizes. The two
    differ only for degenerate clusters (zero-variance columns, ``lam == 0``).
    ``lam`` is NaN for estimates that do not use shrinkage.
    """

    mu: np.ndarray
    S: np.ndarray
    lam: float
    S_star: np.ndarray
    n: int
    S_pd: np.ndarray

    @property
    def d(self) -> int:
        return self.mu.shape[0]


def _as_cluster(C) -> np.ndarray:
    C = np.asarray(C, dtype=float)
    if C.ndim != 2:
        raise ContractViolation(f"cluster must be an (n, d) matrix, got shape {C.shape}")
    if C.shape[0] < 2:
        raise InsufficientDataError(f"covariance needs n >= 2 samples, got {C.shape[0]}")
    return C


def _symmetrize(A: np.ndarray) -> np.ndarray:
    return (A + A.T) / 2.0


def sample_moments(C) -> tuple[np.ndarray, np.ndarray]:
    """Column means and the unbiased (n - 1) sample covariance."""
    C = _as_cluster(C)
    n = C.shape[0]
    mu = C.mean(axis=0)
    Xc = C - mu
    S = _symmetrize(Xc.T @ Xc / (n - 1))
    return mu, S


def shrinkage_intensity(C) -> float:
    """Optimal shrinkage intensity toward ``diag(S)``, clipped to [0, 1].

    Returns 1 when ``S`` has no off-diagonal mass (shrinking changes nothing).
    """
    C = _as_cluster(C)
    n = C.shape[0]
    Xc = C - C.mean(axis=0)
    # w_kij = xc_ki * xc_kj; sum_k (w_kij - wbar_ij)^2 = sum_k w_kij^2 - n * wbar_ij^2
    wbar = Xc.T @ Xc / n
    X2 = Xc * Xc
    ss = X2.T @ X2 - n * wbar * wbar
    np.maximum(ss, 0.0, out=ss)
    var_s = n / (n - 1) ** 3 * ss
    s = wbar * (n / (n - 1))
    off = ~np.eye(C.shape[1], dtype=bool)
    denom = float(np.sum(s[off] ** 2))
    if denom == 0.0:
        return 1.0
    return float(min(1.0, max(0.0, np.sum(var_s[off]) / denom)))


def shrink_covariance(S, lam: float) -> np.ndarray:
    """``lam * diag(S) + (1 - lam) * S``; the diagonal is copied, not recomputed."""
    S = np.asarray(S, dtype=float)
    if S.ndim != 2 or S.shape[0] != S.shape[1]:
        raise ContractViolation(f"S must be square, got shape {S.shape}")
    if not np.array_equal(S, S.T):
        raise ContractViolation("S must be exactly symmetric")
    if not 0.0 <= lam <= 1.0:
        raise ContractViolation(f"shrinkage intensity must lie in [0, 1], got {lam}")
    out = (1.0 - lam) * S
    np.fill_diagonal(out, np.diag(S))
    return out


def _factorizable(A: np.ndarray) -> bool:
    if np.any(np.diag(A) <= 0):
        return False
    try:
        np.linalg.cholesky(A)
    except np.linalg.LinAlgError:
        return False
    return True


def ensure_positive_definite(S_star) -> np.ndarray:
    """Return ``S_star`` unchanged if Cholesky succeeds, else add an escalating ridge.

    The ridge is ``eps * max(max(diag), 1e-12)`` with ``eps`` running
    1e-8, 1e-7, ..., 1e-2. Raises :class:`NumericalDegeneracyError` if the
    last step still fails.
    """
    S_star = np.asarray(S_star, dtype=float)
    if _factorizable(S_star):
        return S_star
    scale = max(float(np.max(np.diag(S_star), initial=0.0)), RIDGE_FLOOR)
    eye = np.eye(S_star.shape[0])
    eps = RIDGE_START
    while eps <= RIDGE_STOP * (1 + 1e-9):
        candidate = S_star + eps * scale * eye
        if _factorizable(candidate):
            return candidate
        eps *= 10.0
    raise NumericalDegeneracyError("covariance not factorizable after ridge escalation")


def regularize_er(S, tau: float = ER_TAU) -> np.ndarray:
    """Eigenvalue regularization: lift eigenvalues below ``tau * lambda_max`` to that floor."""
    S = np.asarray(S, dtype=float)
    try:
        w, V = np.linalg.eigh(S)
    except np.linalg.LinAlgError as exc:
        raise NumericalDegeneracyError(f"eigendecomposition failed: {exc}") from None
    floor = tau * max(float(w.max()), 0.0)
    w = np.maximum(w, floor)
    return _symmetrize((V * w) @ V.T)


def estimate(C, lam: float | None = None) -> ShrinkageEstimate:
    """Moments, intensity and the factorizable shrunk covariance of one cluster.

    Pass ``lam`` to override the analytic intensity (``lam=0`` disables shrinkage).
    """
    mu, S = sample_moments(C)
    lam = shrinkage_intensity(C) if lam is None else float(lam)
    S_star = shrink_covariance(S, lam)
    return ShrinkageEstimate(mu, S, lam, S_star, np.asarray(C).shape[0], ensure_positive_definite(S_star))


def estimate_er(C, tau: float = ER_TAU) -> ShrinkageEstimate:
    mu, S = sample_moments(C)
    S_er = regularize_er(S, tau)
    return ShrinkageEstimate(mu, S, float("nan"), S_er, np.asarray(C).shape[0], ensure_positive_definite(S_er))


def condition_number(A) -> float:
    w = np.linalg.eigvalsh(np.asarray(A, dtype=float))
    return float(w[-1] / w[0]) if w[0] > 0 else float("inf")


def write_estimates(path: str | os.PathLike, estimates: Iterable[tuple[int, ShrinkageEstimate]], delimiter: str = ",") -> None:
    """Debug dump: ``cluster_id, n, lambda, condition_number`` per line."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(delimiter.join(["cluster_id", "n", "lambda", "condition_number"]) + "\n")
        for cid, est in estimates:
            fh.write(delimiter.join([str(cid), str(est.n), repr(est.lam), repr(condition_number(est.S_pd))]) + "\n")
