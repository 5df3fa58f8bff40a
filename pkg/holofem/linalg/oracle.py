"""
Dense symmetric generalized eigensolver.

:func:`dense_generalized_eig` reduces ``A v = λ M v`` to a standard symmetric
problem with the Cholesky factor of ``M`` and diagonalizes it with cyclic
Jacobi rotations (:func:`jacobi_eigh`). It is slow and only meant for small
systems, where it serves as a reference spectrum that shares no code with the
sparse solvers.
"""

import logging
import time
from typing import List, Tuple, Union

import numpy as np
import scipy.linalg
from scipy import sparse

from holofem.base import InvalidArgument

logger = logging.getLogger(__name__)

#: largest system the dense solver accepts
ORACLE_MAX_DOF = 2000

#: stop when the off-diagonal Frobenius norm falls below this times ‖A‖_F
JACOBI_TOL = 1e-12


def _round_robin(m: int) -> List[Tuple[np.ndarray, np.ndarray]]:
    """Rounds of disjoint index pairs covering every pair of ``range(m)``
    once, ``m`` even (tournament scheduling)."""
    players = list(range(m))
    rounds = []
    for _ in range(m - 1):
        half = m // 2
        p = np.array(players[:half])
        q = np.array(players[::-1][:half])
        rounds.append((np.minimum(p, q), np.maximum(p, q)))
        players = [players[0], players[-1]] + players[1:-1]
    return rounds


def jacobi_eigh(
    matrix: np.ndarray, tol: float = JACOBI_TOL, max_sweeps: int = 100
) -> Tuple[np.ndarray, np.ndarray]:
    """Eigenvalues (ascending) and orthonormal eigenvectors of a dense
    symmetric matrix by cyclic Jacobi rotations.

    Each round applies rotations to disjoint index pairs simultaneously.

    Args:
        matrix: Symmetric matrix; only its symmetric part is used.
        tol: Relative off-diagonal tolerance.
        max_sweeps: Upper bound on full sweeps.

    Returns:
        Eigenvalues and the matrix whose columns are the eigenvectors.
    """
    a = np.array(matrix, dtype=float)
    n = a.shape[0]
    v = np.eye(n)
    if n == 0:
        return np.zeros(0), v
    a = 0.5 * (a + a.T)
    norm = np.linalg.norm(a)
    # padding index n is a dummy partner when n is odd
    rounds = []
    for p, q in _round_robin(n + n % 2):
        keep = q < n
        rounds.append((p[keep], q[keep]))

    start = time.time()
    sweep = 0
    for sweep in range(max_sweeps):
        off = np.linalg.norm(a - np.diag(np.diag(a)))
        if off <= tol * norm:
            break
        for p, q in rounds:
            if not p.size:
                continue
            apq = a[p, q]
            rotate = apq != 0
            theta = np.divide(
                a[q, q] - a[p, p], 2.0 * apq, out=np.zeros_like(apq), where=rotate
            )
            t = np.where(theta >= 0, 1.0, -1.0) / (
                np.abs(theta) + np.sqrt(theta * theta + 1.0)
            )
            t[~rotate] = 0.0
            c = 1.0 / np.sqrt(1.0 + t * t)
            s = t * c

            ap, aq = a[:, p], a[:, q]
            a[:, p] = c * ap - s * aq
            a[:, q] = s * ap + c * aq
            ap, aq = a[p, :], a[q, :]
            a[p, :] = c[:, None] * ap - s[:, None] * aq
            a[q, :] = s[:, None] * ap + c[:, None] * aq
            a[p, q] = 0.0
            a[q, p] = 0.0

            vp, vq = v[:, p], v[:, q]
            v[:, p] = c * vp - s * vq
            v[:, q] = s * vp + c * vq
    else:
        logger.warning("Jacobi iteration did not converge in %d sweeps", max_sweeps)

    logger.debug(
        "Jacobi diagonalization of order %d: %d sweeps in %f sec",
        n,
        sweep,
        time.time() - start,
    )
    w = np.diag(a).copy()
    order = np.argsort(w, kind="stable")
    return w[order], v[:, order]


def _dense(matrix) -> np.ndarray:
    if sparse.issparse(matrix):
        matrix = matrix.toarray()
    return np.array(matrix, dtype=float, ndmin=2)


def dense_generalized_eig(
    A, M, vectors: bool = False, method: str = "jacobi"
) -> Union[np.ndarray, Tuple[np.ndarray, np.ndarray]]:
    """All eigenvalues of the symmetric pencil ``A v = λ M v``, ascending.

    Args:
        A: Symmetric matrix (dense or sparse).
        M: Symmetric positive definite matrix of the same size.
        vectors: Also return M-orthonormal eigenvectors as columns.
        method: ``"jacobi"`` (default) or ``"lapack"`` to cross-check with
            :func:`scipy.linalg.eigh`.

    Raises:
        InvalidArgument: on mismatched or oversized input, an unsymmetric
            ``A`` or an ``M`` that is not positive definite.
    """
    A = _dense(A)
    M = _dense(M)
    n = A.shape[0]
    if A.shape != (n, n) or M.shape != (n, n):
        raise InvalidArgument(
            "matrices must be square and of equal size (got %r and %r)"
            % (A.shape, M.shape)
        )
    if n > ORACLE_MAX_DOF:
        raise InvalidArgument(
            "dense solver is limited to %d unknowns (got %d)" % (ORACLE_MAX_DOF, n)
        )
    scale = max(np.linalg.norm(A), np.finfo(float).tiny)
    if np.linalg.norm(A - A.T) > 1e-12 * scale:
        raise InvalidArgument("A is not symmetric")
    if method not in ("jacobi", "lapack"):
        raise InvalidArgument("unknown method %r" % (method,))

    try:
        if method == "lapack":
            w, v = scipy.linalg.eigh(A, M)
            return (w, v) if vectors else w
        lower = np.linalg.cholesky(M)
    except np.linalg.LinAlgError:
        raise InvalidArgument("M is not symmetric positive definite")

    # C = L⁻¹ A L⁻ᵀ
    half = scipy.linalg.solve_triangular(lower, A, lower=True)
    reduced = scipy.linalg.solve_triangular(lower, half.T, lower=True).T
    w, q = jacobi_eigh(reduced)
    if not vectors:
        return w
    return w, scipy.linalg.solve_triangular(lower.T, q, lower=False)
