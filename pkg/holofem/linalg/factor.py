"""
Symmetric LDLᵀ factorization of sparse matrices with diagonal pivots only.

The factorization is computed by SuperLU in symmetric mode with the pivot
threshold at zero, so every pivot is taken from the diagonal and the result
is ``P B Pᵀ = L D Lᵀ`` up to scaling of ``L``'s columns. A pivot that is
numerically zero means the matrix is singular to working precision; for the
shifted pencils this is how a shift landing on an eigenvalue shows up.

-------------------------

"""

import logging
import time
from typing import Optional

import numpy as np
from scipy import sparse
from scipy.sparse.linalg import splu

from holofem.base import InvalidArgument, NearSingularError

logger = logging.getLogger(__name__)

#: relative pivot threshold; a pivot of magnitude at most
#: ``PIVOT_TOL * max|diag|`` counts as zero
PIVOT_TOL = 1e-14

#: fill-reducing symmetric ordering; ``"NATURAL"`` keeps the given order and
#: gives the banded (profile) factor of a row-major numbering
DEFAULT_ORDERING = "MMD_AT_PLUS_A"

#: numpy dtype for each scalar field
FIELDS = {"real": np.float64, "complex": np.complex128}


class Factorization:
    """A completed factorization; safe to share between threads for solves.

    Args:
        matrix: The factored matrix, in CSC format.
        lu: SuperLU factor object.
        field: ``"real"`` or ``"complex"``.
        ordering: Column ordering used.
        scale: Reference magnitude pivots are compared against.
    """

    def __init__(
        self,
        matrix: sparse.csc_matrix,
        lu,
        field: str,
        ordering: str,
        scale: float,
    ):
        self.matrix = matrix
        self.field = field
        self.ordering = ordering
        self.scale = scale
        self._lu = lu
        #: pivots in elimination order
        self.pivots = lu.U.diagonal()

    @property
    def n(self) -> int:
        return self.matrix.shape[0]

    @property
    def min_pivot_ratio(self) -> float:
        "smallest pivot magnitude relative to the largest diagonal entry"
        return float(np.min(np.abs(self.pivots)) / self.scale)

    @property
    def is_positive_definite(self) -> bool:
        return self.field == "real" and bool(np.all(self.pivots > 0))

    def solve(self, b: np.ndarray) -> np.ndarray:
        """Solve ``B x = b`` for one right-hand side (or a column block).

        Complex right-hand sides are accepted by real factorizations.

        Raises:
            InvalidArgument: if the dimension of ``b`` does not match.
        """
        b = np.asarray(b)
        if b.ndim not in (1, 2) or b.shape[0] != self.n:
            raise InvalidArgument(
                "right-hand side of shape %r for a %d x %d system"
                % (b.shape, self.n, self.n)
            )
        if self.field == "real" and np.iscomplexobj(b):
            real = self._lu.solve(np.ascontiguousarray(b.real, dtype=float))
            imag = self._lu.solve(np.ascontiguousarray(b.imag, dtype=float))
            return real + 1j * imag
        return self._lu.solve(np.ascontiguousarray(b, dtype=FIELDS[self.field]))

    def residual(self, x: np.ndarray, b: np.ndarray) -> float:
        """Relative residual ``‖B x − b‖ / ‖b‖`` (absolute when ``b = 0``)."""
        r = np.linalg.norm(self.matrix @ x - b)
        norm_b = np.linalg.norm(b)
        return float(r / norm_b) if norm_b else float(r)

    def __repr__(self):
        return "Factorization(n=%d, field=%s, ordering=%s)" % (
            self.n,
            self.field,
            self.ordering,
        )


def factor(
    matrix,
    field: str = "real",
    pivot_tol: float = PIVOT_TOL,
    ordering: str = DEFAULT_ORDERING,
    check_symmetry: bool = True,
    scale: Optional[float] = None,
) -> Factorization:
    """Factor a structurally symmetric sparse matrix without off-diagonal
    pivoting.

    Args:
        matrix: Square sparse (or dense) matrix.
        field: ``"real"`` or ``"complex"``.
        pivot_tol: Relative threshold below which a pivot counts as zero.
        ordering: SuperLU column ordering (``"MMD_AT_PLUS_A"``,
            ``"NATURAL"``, ...).
        check_symmetry: Verify the sparsity pattern is symmetric.
        scale: Reference magnitude for the pivot threshold; defaults to the
            largest diagonal entry. Shifted pencils pass the combined scale
            of their unshifted terms.

    Returns:
        The :class:`Factorization`.

    Raises:
        InvalidArgument: for an unknown field, a non-square or empty matrix,
            an unsymmetric pattern, or complex data with ``field="real"``.
        NearSingularError: if a pivot is numerically zero, carrying its
            elimination position and original row index.
    """
    if field not in FIELDS:
        raise InvalidArgument("field must be 'real' or 'complex' (got %r)" % (field,))
    matrix = sparse.csc_matrix(matrix)
    if field == "real" and np.iscomplexobj(matrix.data):
        if np.any(matrix.data.imag):
            raise InvalidArgument("complex matrix cannot be factored over the reals")
    matrix = matrix.astype(FIELDS[field])
    rows, cols = matrix.shape
    if rows != cols or rows == 0:
        raise InvalidArgument("matrix must be square and nonempty (got %r)" % (matrix.shape,))
    if check_symmetry:
        pattern = abs(matrix)
        pattern.data[:] = 1.0
        if (pattern - pattern.T).count_nonzero():
            raise InvalidArgument("matrix is not structurally symmetric")

    if scale is None:
        scale = float(np.max(np.abs(matrix.diagonal())))
    if scale == 0 or not np.any(matrix.diagonal()):
        raise NearSingularError("matrix has a zero diagonal", pivot=0, dof=0)

    start = time.time()
    try:
        lu = splu(
            matrix,
            permc_spec=ordering,
            diag_pivot_thresh=0.0,
            options=dict(SymmetricMode=True, Equil=False),
        )
    except RuntimeError as err:
        # SuperLU reports an exactly zero pivot as a singular factor
        raise NearSingularError("matrix is exactly singular (%s)" % err)

    # original row of the k-th pivot
    order = np.argsort(lu.perm_c)
    if not np.array_equal(lu.perm_r, lu.perm_c):
        k = int(np.flatnonzero(lu.perm_r != lu.perm_c).min())
        raise NearSingularError(
            "zero diagonal pivot forced row exchange near position %d" % k,
            pivot=k,
            dof=int(order[k]),
        )

    pivots = lu.U.diagonal()
    small = np.flatnonzero(np.abs(pivots) <= pivot_tol * scale)
    if small.size:
        k = int(small[0])
        raise NearSingularError(
            "pivot %d (dof %d) has relative magnitude %.3e"
            % (k, order[k], abs(pivots[k]) / scale),
            pivot=k,
            dof=int(order[k]),
        )

    logger.debug(
        "Factored %s matrix of dimension %d (nnz %d, factor nnz %d) in %f sec",
        field,
        rows,
        matrix.nnz,
        lu.L.nnz + lu.U.nnz,
        time.time() - start,
    )
    return Factorization(matrix, lu, field, ordering, scale)
