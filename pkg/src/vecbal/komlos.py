"""Diagonal-constrained PSD construction without an SDP solver.

Given columns v_1..v_n of norm at most one and targets alpha in [0,1]^n,
``solve_komlos`` builds an n x n PSD matrix X with X_ii = alpha_i and
V X V^T <= I using only linear algebra.  The recursion removes one column
per level:

* if the Gram matrix V^T V is singular, a kernel vector x (scaled so that
  x_k^2 = alpha_k at the tightest index k) contributes the rank-one block
  x x^T, which is invisible to V X V^T, and the residual alpha_i - x_i^2 is
  delegated to the remaining columns;
* otherwise B = (V^T V)^{-1} gives a projection contribution beta * B with
  beta = min_i alpha_i / B_ii, and the leftover diagonal (alpha_i - beta
  B_ii) / gamma recurses on the other columns.

Since B_ii >= 1 / ||v_i||^2 >= 1, the spectral weights telescope below
max(alpha) <= 1.  B is assembled from the SVD of V so that V B V^T stays a
numerically clean projection even for mildly conditioned systems.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NotPSDError, NumericalError, PreconditionError

ALPHA_DROP = 1e-12
SING_TOL = 1e-10  # on the smallest eigenvalue of V^T V, i.e. sigma_min(V)^2
GAMMA_SHORT_CIRCUIT = 1e-12


@dataclass(frozen=True)
class KomlosSolution:
    """PSD matrix X with prescribed diagonal, its factor U, and the certificate."""

    X: np.ndarray
    U: np.ndarray
    alpha: np.ndarray
    eig_max_VXVt: float
    depth: int

    def validate(self) -> None:
        X, U, alpha = self.X, self.U, self.alpha
        if np.max(np.abs(X - X.T), initial=0.0) > 1e-10:
            raise NumericalError("X is not symmetric")
        if X.shape[0] and float(np.linalg.eigvalsh(X)[0]) < -1e-8:
            raise NumericalError("X has a negative eigenvalue")
        if np.max(np.abs(np.diag(X) - alpha), initial=0.0) > 1e-8:
            raise NumericalError("diagonal of X deviates from alpha")
        if self.eig_max_VXVt > 1.0 + 1e-7:
            raise NumericalError(f"largest eigenvalue of V X V^T is {self.eig_max_VXVt}")
        err = np.linalg.norm(U @ U.T - X)
        if err > 1e-7 * (1.0 + np.linalg.norm(X)):
            raise NumericalError("factor U does not reproduce X")


def psd_factor(X: np.ndarray) -> np.ndarray:
    """Factor a PSD matrix as U U^T, preserving exactly-zero rows.

    Pivoted Cholesky with diagonal tolerance 1e-10; if the produced factor
    fails to reproduce X, fall back to a symmetric eigendecomposition with
    eigenvalues below 1e-10 clamped to zero.
    """
    X = np.asarray(X, dtype=float)
    n = X.shape[0]
    if n == 0:
        return X.copy()
    if np.max(np.abs(X - X.T)) > 1e-8 * (1.0 + np.max(np.abs(X))):
        raise NotPSDError("matrix is not symmetric")
    X = 0.5 * (X + X.T)
    lam_min = float(np.linalg.eigvalsh(X)[0])
    if lam_min < -1e-6:
        raise NotPSDError(f"matrix has eigenvalue {lam_min:.3g}")

    U = _pivoted_cholesky(X)
    if np.linalg.norm(U @ U.T - X) > 1e-7 * (1.0 + np.linalg.norm(X)):
        w, Q = np.linalg.eigh(X)
        w = np.where(w < 1e-10, 0.0, w)
        U = Q * np.sqrt(w)
    U[np.diag(X) <= 0.0, :] = 0.0
    return U


def _pivoted_cholesky(X: np.ndarray, tol: float = 1e-10) -> np.ndarray:
    n = X.shape[0]
    A = X.copy()
    L = np.zeros((n, n))
    perm = np.arange(n)
    scale = max(np.max(np.diag(X)), 1.0)
    for k in range(n):
        rest = perm[k:]
        j_rel = int(np.argmax(np.diag(A)[rest]))
        j = k + j_rel
        piv = A[perm[j], perm[j]]
        if piv <= tol * scale:
            break
        perm[[k, j]] = perm[[j, k]]
        pk = perm[k]
        L[pk, k] = np.sqrt(piv)
        rows = perm[k + 1:]
        if rows.size:
            L[rows, k] = (A[rows, pk] - L[rows, :k] @ L[pk, :k]) / L[pk, k]
            d = np.diag(A).copy()
            d[rows] -= L[rows, k] ** 2
            A[np.arange(n), np.arange(n)] = d
    return L


def solve_komlos(V: np.ndarray, alpha: np.ndarray) -> KomlosSolution:
    """Build X >= 0 with X_ii = alpha_i and V X V^T <= I, plus a factor U."""
    V = np.asarray(V, dtype=float)
    alpha = np.asarray(alpha, dtype=float)
    if V.ndim != 2 or alpha.shape != (V.shape[1],):
        raise PreconditionError("need an m x n matrix and n diagonal targets")
    norms = np.linalg.norm(V, axis=0)
    if np.any(norms > 1.0 + 1e-10):
        raise PreconditionError(f"column norm {norms.max():.12g} exceeds 1")
    if np.any(alpha < -1e-12) or np.any(alpha > 1.0 + 1e-12):
        raise PreconditionError("alpha entries must lie in [0, 1]")
    alpha = np.clip(alpha, 0.0, 1.0)

    X, depth = _solve(V, alpha)
    X = 0.5 * (X + X.T)
    U = psd_factor(X)
    prod = V @ X @ V.T
    if prod.size:
        eig_max = float(np.linalg.eigvalsh(0.5 * (prod + prod.T))[-1])
    else:
        eig_max = 0.0
    sol = KomlosSolution(X=X, U=U, alpha=alpha, eig_max_VXVt=eig_max, depth=depth)
    sol.validate()
    return sol


def _solve(V: np.ndarray, alpha: np.ndarray):
    n = V.shape[1]
    X = np.zeros((n, n))
    keep = np.flatnonzero(alpha > ALPHA_DROP)
    if keep.size == 0:
        return X, 0
    Xk, depth = _solve_kept(V[:, keep], alpha[keep])
    X[np.ix_(keep, keep)] = Xk
    return X, depth


def _solve_kept(V: np.ndarray, alpha: np.ndarray):
    """Recursion on columns with alpha_i > 0; every level removes one column."""
    n = V.shape[1]
    if n == 0:
        return np.zeros((0, 0)), 0
    m = V.shape[0]

    if n > m:
        sigma_min_sq = 0.0
    else:
        svals = np.linalg.svd(V, compute_uv=False)
        sigma_min_sq = float(svals[-1]) ** 2

    if sigma_min_sq < SING_TOL:
        # kernel branch: rank-one block invisible to V X V^T
        _, _, vt = np.linalg.svd(V, full_matrices=True)
        x = vt[-1]
        ratios = np.full(n, np.inf)
        nz = np.abs(x) > 0.0
        ratios[nz] = np.sqrt(alpha[nz]) / np.abs(x[nz])
        k = int(np.argmin(ratios))
        x = float(ratios[k]) * x  # now x_i^2 <= alpha_i with equality at k
        alpha_rest = np.maximum(alpha - x * x, 0.0)
        alpha_rest = np.delete(alpha_rest, k)
        idx = np.delete(np.arange(n), k)
        Y, depth = _solve(np.delete(V, k, axis=1), alpha_rest)
        X = np.outer(x, x)
        X[np.ix_(idx, idx)] += Y
        return X, depth + 1

    # invertible branch through the SVD: B = Q S^{-2} Q^T keeps V B V^T a
    # clean projection even when V^T V is poorly conditioned
    _, s, Vt_s = np.linalg.svd(V, full_matrices=False)
    B = (Vt_s.T / s**2) @ Vt_s
    B = 0.5 * (B + B.T)
    diagB = np.diag(B)
    beta = float(np.min(alpha / diagB))
    k = int(np.argmin(alpha / diagB))
    slack = alpha - beta * diagB
    gamma = float(np.max(slack))
    if gamma <= GAMMA_SHORT_CIRCUIT:
        return beta * B, 1
    alpha_rest = np.clip(np.delete(slack, k) / gamma, 0.0, 1.0)
    idx = np.delete(np.arange(n), k)
    Y, depth = _solve(np.delete(V, k, axis=1), alpha_rest)
    X = beta * B
    X[np.ix_(idx, idx)] += gamma * Y
    return X, depth + 1
