"""
Dense Linear Algebra

Symmetric eigendecomposition, thin SVD and ridge-regularized SPD solves.
Eigen/singular pairs are returned in descending order with every vector
signed so that its largest-magnitude entry is positive.
"""

import logging
from dataclasses import dataclass
from typing import Literal, Tuple

import numpy as np
from scipy.linalg import LinAlgError, cho_factor, cho_solve

from ..errors import DataError, NotPositiveDefiniteError, NumericalError

logger = logging.getLogger(__name__)

SYMMETRY_TOL = 1e-10
JACOBI_TOL = 1e-12
JACOBI_MAX_SWEEPS = 100
SINGULAR_RTOL = 1e-12
SOLVE_RESIDUAL_TOL = 1e-8


class InaccurateSolveError(NotPositiveDefiniteError):
    """Factorization succeeded but the solve residual exceeds tolerance"""


@dataclass(frozen=True)
class EigenDecomposition:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        return (self.eigenvectors * self.eigenvalues) @ self.eigenvectors.T


@dataclass(frozen=True)
class ThinSVD:
    left_vectors: np.ndarray
    singular_values: np.ndarray
    right_vectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        return (self.left_vectors * self.singular_values) @ self.right_vectors.T


def sign_normalize(vectors: np.ndarray) -> np.ndarray:
    """Flip columns so the largest-magnitude entry of each is positive"""
    if vectors.size == 0:
        return vectors
    rows = np.argmax(np.abs(vectors), axis=0)
    signs = np.sign(vectors[rows, np.arange(vectors.shape[1])])
    signs[signs == 0] = 1.0
    return vectors * signs


def _jacobi(A: np.ndarray, tol: float, max_sweeps: int) -> Tuple[np.ndarray, np.ndarray]:
    """Cyclic Jacobi rotations on a copy of A"""
    a = np.array(A, dtype=np.float64)
    n = a.shape[0]
    v = np.eye(n)
    target = tol * np.linalg.norm(a)

    for sweep in range(max_sweeps):
        off = np.sqrt(max(float(np.sum(a * a) - np.sum(np.diag(a) ** 2)), 0.0))
        if off <= target:
            logger.debug(f"Jacobi converged after {sweep} sweeps (n={n})")
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                tau = (a[q, q] - a[p, p]) / (2.0 * apq)
                t = (1.0 if tau >= 0 else -1.0) / (abs(tau) + np.sqrt(1.0 + tau * tau))
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c

                col_p, col_q = a[:, p].copy(), a[:, q].copy()
                a[:, p] = c * col_p - s * col_q
                a[:, q] = s * col_p + c * col_q
                row_p, row_q = a[p, :].copy(), a[q, :].copy()
                a[p, :] = c * row_p - s * row_q
                a[q, :] = s * row_p + c * row_q
                a[p, q] = a[q, p] = 0.0

                vec_p, vec_q = v[:, p].copy(), v[:, q].copy()
                v[:, p] = c * vec_p - s * vec_q
                v[:, q] = s * vec_p + c * vec_q
    else:
        logger.warning(f"⚠️ Jacobi stopped after {max_sweeps} sweeps without reaching tolerance")

    return np.diag(a).copy(), v


def sym_eig(A: np.ndarray, method: Literal["lapack", "jacobi"] = "lapack") -> EigenDecomposition:
    """
    Eigendecomposition of a symmetric matrix, K = U diag(lambda) U^T.

    Args:
        A: Symmetric n x n matrix (asymmetry up to 1e-10 is tolerated)
        method: 'lapack' (numpy's symmetric driver) or 'jacobi' (cyclic rotations
            until the off-diagonal norm drops below 1e-12 * ||A||_F, at most 100 sweeps)

    Returns:
        EigenDecomposition with eigenvalues descending

    Raises:
        NumericalError: A is not square, not finite or not symmetric
    """
    A = np.asarray(A, dtype=np.float64)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise NumericalError(f"expected a square matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise NumericalError("matrix contains NaN or infinite entries")
    scale = max(1.0, float(np.max(np.abs(A)))) if A.size else 1.0
    if A.size and np.max(np.abs(A - A.T)) > SYMMETRY_TOL * scale:
        raise NumericalError("matrix is not symmetric")

    A = 0.5 * (A + A.T)
    if method == "jacobi":
        values, vectors = _jacobi(A, JACOBI_TOL, JACOBI_MAX_SWEEPS)
    elif method == "lapack":
        values, vectors = np.linalg.eigh(A)
    else:
        raise ValueError(f"unknown eigen method {method!r}")

    order = np.argsort(-values, kind="stable")
    return EigenDecomposition(values[order], sign_normalize(vectors[:, order]))


def _complete_basis(U: np.ndarray, keep: np.ndarray) -> np.ndarray:
    """Replace columns outside `keep` with an orthonormal completion"""
    n, r = U.shape
    n_good = int(np.count_nonzero(keep))
    if n_good == r:
        return U
    good = U[:, keep]
    Q, _ = np.linalg.qr(np.hstack([good, np.eye(n)]))
    completed = U.copy()
    completed[:, ~keep] = Q[:, n_good : n_good + (r - n_good)]
    return completed


def thin_svd(L: np.ndarray, method: Literal["gram", "lapack"] = "gram") -> ThinSVD:
    """
    Thin SVD L = U_L diag(sigma) V_L^T of a tall n x n_L matrix.

    The 'gram' method diagonalizes L^T L, sets sigma = sqrt(eigenvalues) and
    U_L = L V_L / sigma; columns with sigma below 1e-12 * sigma_max are
    completed by orthogonalization. This squares the condition number, which
    is acceptable for [0, 1]-valued similarity matrices with n_L in the hundreds.

    Raises:
        DataError: n < n_L (pass the transpose instead)
    """
    L = np.asarray(L, dtype=np.float64)
    if L.ndim != 2 or L.shape[1] < 1:
        raise DataError(f"expected a non-empty 2-D matrix, got shape {L.shape}")
    n, n_l = L.shape
    if n < n_l:
        raise DataError(f"thin_svd needs n >= n_L, got {n} x {n_l}; transpose first")

    if method == "lapack":
        U, sigma, Vt = np.linalg.svd(L, full_matrices=False)
        V = Vt.T
    elif method == "gram":
        gram = sym_eig(L.T @ L)
        sigma = np.sqrt(np.clip(gram.eigenvalues, 0.0, None))
        V = gram.eigenvectors
        sigma_max = sigma[0] if sigma.size else 0.0
        keep = sigma > SINGULAR_RTOL * sigma_max if sigma_max > 0 else np.zeros(n_l, dtype=bool)
        U = np.zeros((n, n_l))
        U[:, keep] = (L @ V[:, keep]) / sigma[keep]
        U = _complete_basis(U, keep)
    else:
        raise ValueError(f"unknown svd method {method!r}")

    # Sign convention on U; flip the paired V columns so the product is unchanged.
    normalized = sign_normalize(U)
    flips = np.where(np.sum(normalized * U, axis=0) < 0, -1.0, 1.0)
    return ThinSVD(normalized, sigma, V * flips)


def solve_spd(A: np.ndarray, ridge: float, b: np.ndarray) -> np.ndarray:
    """
    Solve (A + ridge * I) x = b by Cholesky factorization.

    Args:
        A: Symmetric positive semidefinite n x n matrix
        ridge: Non-negative diagonal shift
        b: Right-hand side of length n

    Returns:
        Solution vector x

    Raises:
        NotPositiveDefiniteError: the shifted matrix is not numerically positive definite
        InaccurateSolveError: residual exceeds 1e-8 * ||b||_inf
        NumericalError: NaN or infinite input
    """
    A = np.asarray(A, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if A.ndim != 2 or A.shape[0] != A.shape[1] or b.shape != (A.shape[0],):
        raise DataError(f"dimension mismatch: A {A.shape}, b {b.shape}")
    if ridge < 0:
        raise NumericalError(f"ridge must be non-negative, got {ridge}")
    if not (np.all(np.isfinite(A)) and np.all(np.isfinite(b))):
        raise NumericalError("system contains NaN or infinite entries")

    shifted = A + ridge * np.eye(A.shape[0])
    try:
        factor = cho_factor(shifted, lower=True, check_finite=False)
    except LinAlgError as e:
        raise NotPositiveDefiniteError(f"matrix + {ridge:g} I is not positive definite") from e

    x = cho_solve(factor, b, check_finite=False)
    b_norm = float(np.max(np.abs(b))) if b.size else 0.0
    residual = float(np.max(np.abs(shifted @ x - b))) if b.size else 0.0
    if not np.all(np.isfinite(x)) or residual > SOLVE_RESIDUAL_TOL * b_norm:
        raise InaccurateSolveError(
            f"solve with ridge {ridge:g} left residual {residual:.3g} (||b||_inf = {b_norm:.3g})"
        )
    return x
