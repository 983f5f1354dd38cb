"""Least-squares selection solve via QR of the smoothed constraint matrix.

With M = S^{-1/2} C^T = Q R, the minimal-selection-norm interpolant of
the constraints C u = b is u = S^{-1/2} Q R^{-T} b: the pseudoinverse
of C S^{-1/2} applied to b, pulled back through the smoother. Direct
dense factorization only; the grids of interest stay at desk scale.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve_triangular

from .assembly import ConstraintSystem, materialize_matrix

__all__ = [
    "QRFactorization",
    "SolveReport",
    "RankDeficientError",
    "householder_qr",
    "condition_estimate",
    "pinv_solve",
]

RANK_TOL = 1e-13


class RankDeficientError(RuntimeError):
    """The constraint matrix has (numerically) dependent columns."""

    def __init__(self, column: int, value: float, threshold: float):
        self.column = column
        super().__init__(
            f"rank-deficient constraint matrix: |R[{column},{column}]| = "
            f"{value:.3e} below threshold {threshold:.3e}; constraint "
            f"index {column} is numerically dependent on its predecessors"
        )


@dataclass(frozen=True, eq=False)
class QRFactorization:
    """Thin QR factors: q has orthonormal columns, r is upper triangular."""

    q: np.ndarray
    r: np.ndarray


def householder_qr(mat: np.ndarray) -> QRFactorization:
    """Thin Householder QR with a loud full-rank check.

    Raises RankDeficientError naming the first offending column when a
    diagonal entry of R falls below 1e-13 times a two-norm estimate.
    """
    mat = np.asarray(mat, dtype=float)
    if mat.shape[0] < mat.shape[1]:
        raise ValueError(
            f"householder_qr expects a tall matrix, got {mat.shape}"
        )
    q, r = np.linalg.qr(mat, mode="reduced")
    # ||A||_2 <= sqrt(||A||_1 ||A||_inf), cheap and deterministic
    norm_est = np.sqrt(np.abs(mat).sum(axis=0).max()
                       * np.abs(mat).sum(axis=1).max())
    diag = np.abs(np.diag(r))
    threshold = RANK_TOL * norm_est
    bad = np.flatnonzero(diag < threshold)
    if bad.size:
        raise RankDeficientError(int(bad[0]), float(diag[bad[0]]), threshold)
    return QRFactorization(q=q, r=r)


def condition_estimate(mat: np.ndarray) -> float:
    """Two-norm condition number sigma_max / sigma_min of a dense matrix."""
    s = np.linalg.svd(np.asarray(mat, dtype=float), compute_uv=False)
    if s[-1] <= 0.0 or not np.isfinite(s[-1]):
        return np.inf
    return float(s[0] / s[-1])


@dataclass(frozen=True, eq=False)
class SolveReport:
    """Outcome of one constrained solve.

    Residual norms are recomputed from the returned solution through the
    implicit constraint operators, never carried over from the factors.
    """

    solution: np.ndarray
    residual_l2: float
    residual_linf: float
    cond_estimate: float
    n_omega: int
    n_gamma: int
    seconds: float


def pinv_solve(system: ConstraintSystem, half_inverse,
               half_inverse_adjoint=None) -> SolveReport:
    """Solve C u = b for the minimal-selection-norm u.

    half_inverse applies S^{-1/2} to a (possibly batched) grid tensor.
    The factored matrix is (C S^{-1/2})^T, i.e. the adjoint of the
    smoother applied to the constraint columns; on the roots grid the
    smoother is symmetric and one callable serves both roles, but the
    mixed roots/extrema space-time smoother is not, so its adjoint must
    be passed separately or the computed u fails to satisfy Cu = b.
    """
    t0 = time.perf_counter()
    if half_inverse_adjoint is None:
        half_inverse_adjoint = half_inverse
    mat = materialize_matrix(system, half_inverse_adjoint)
    fac = householder_qr(mat)
    cond = condition_estimate(mat)
    z = solve_triangular(fac.r, system.rhs, trans="T", lower=False)
    u = half_inverse((fac.q @ z).reshape(system.grid_shape))
    res = system.residual(u)
    seconds = time.perf_counter() - t0
    return SolveReport(
        solution=u,
        residual_l2=float(np.linalg.norm(res)),
        residual_linf=float(np.max(np.abs(res))) if res.size else 0.0,
        cond_estimate=cond,
        n_omega=system.n_omega,
        n_gamma=system.n_gamma,
        seconds=seconds,
    )
