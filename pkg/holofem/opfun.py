"""
The discrete solution operator and the operator function
``F_h(z) = T_h − z⁻¹ I`` on interior coefficient vectors.

``T_h`` maps a load ``f`` to the solution ``u`` of ``A u = M f``. Vectors are
measured in the mass inner product ``⟨x, y⟩_M = yᴴ M x``, the discrete L2
structure in which ``T_h`` is self-adjoint. The resolvent ``F_h(z)⁻¹ f`` is
computed from the equivalent sparse system ``(M − z⁻¹ A) w = A f``; the
factorization for each shift is cached, and because the pencil is real a
cached factorization at ``z`` also serves ``conj(z)``.

-------------------------

"""

import logging
import math
import threading
from collections import OrderedDict
from typing import Tuple

import numpy as np
from scipy import sparse

from holofem.assembly import AssembledSystem
from holofem.base import (
    EigenvalueProximityError,
    HolofemDict,
    InvalidArgument,
    NearSingularError,
)
from holofem.linalg.factor import DEFAULT_ORDERING, Factorization, factor

logger = logging.getLogger(__name__)

#: seed shared by every randomized routine unless overridden
DEFAULT_SEED = 20240601

#: relative residual of a shifted solve that triggers one refinement step
REFINE_TOL = 1e-10


class OperatorFunction:
    """``F_h(z) = T_h − z⁻¹ I`` for an assembled system.

    Args:
        system: The assembled stiffness and mass matrices.
        cache_size: Number of shifted factorizations to keep.
        ordering: Column ordering for the sparse factorizations.
    """

    #: default number of cached shifted factorizations
    cache_size = 64

    def __init__(
        self,
        system: AssembledSystem,
        cache_size: int = None,
        ordering: str = DEFAULT_ORDERING,
    ) -> None:
        self.system = system
        self.ordering = ordering
        if cache_size is not None:
            self.cache_size = cache_size
        self.A = sparse.csc_matrix(system.A)
        self.M = sparse.csc_matrix(system.M)
        self._diag_a = float(np.max(np.abs(self.A.diagonal())))
        self._diag_m = float(np.max(np.abs(self.M.diagonal())))
        #: real factorization of the stiffness matrix
        self.stiffness = factor(self.A, "real", ordering=ordering)
        self._cache = OrderedDict()
        self._lock = threading.Lock()
        self.stats = HolofemDict(hits=0, conjugate_hits=0, misses=0)

    @property
    def n_dof(self) -> int:
        return self.system.n_dof

    def _check_vector(self, x) -> np.ndarray:
        x = np.asarray(x)
        if x.shape != (self.n_dof,):
            raise InvalidArgument(
                "expected a vector of length %d, got shape %r" % (self.n_dof, x.shape)
            )
        return x

    @staticmethod
    def _check_shift(z) -> complex:
        z = complex(z)
        if z == 0 or not (math.isfinite(z.real) and math.isfinite(z.imag)):
            raise InvalidArgument("shift must be finite and nonzero (got %r)" % (z,))
        return z

    def norm_M(self, x) -> float:
        """Mass norm ``sqrt(xᴴ M x)``."""
        x = self._check_vector(x)
        return float(np.sqrt(max(np.vdot(x, self.M @ x).real, 0.0)))

    def apply_Th(self, f) -> np.ndarray:
        """Solve ``A u = M f``."""
        f = self._check_vector(f)
        return self.stiffness.solve(self.M @ f)

    def apply_F(self, z, x) -> np.ndarray:
        """``T_h x − x / z``.

        Raises:
            InvalidArgument: if ``z`` is zero.
        """
        z = self._check_shift(z)
        return self.apply_Th(x) - self._check_vector(x) / z

    def shifted_factorization(self, z) -> Tuple[Factorization, bool]:
        """Factorization of ``M − z⁻¹ A``, from the cache when possible.

        Returns:
            The factorization and whether it was computed at ``conj(z)``,
            in which case solves must conjugate their data.

        Raises:
            NearSingularError: if ``z`` is numerically an eigenvalue.
        """
        z = self._check_shift(z)
        with self._lock:
            if z in self._cache:
                self._cache.move_to_end(z)
                self.stats.hits += 1
                return self._cache[z], False
            mirror = z.conjugate()
            if mirror in self._cache:
                self._cache.move_to_end(mirror)
                self.stats.conjugate_hits += 1
                return self._cache[mirror], True

        # duplicate work on a racing key is harmless; the last insert wins
        shifted = self.M - self.A * (1.0 / z)
        factorization = factor(
            shifted,
            "complex",
            check_symmetry=False,
            ordering=self.ordering,
            scale=self._diag_m + self._diag_a / abs(z),
        )
        with self._lock:
            self.stats.misses += 1
            self._cache[z] = factorization
            while len(self._cache) > self.cache_size:
                self._cache.popitem(last=False)
        return factorization, False

    def clear_cache(self) -> None:
        with self._lock:
            self._cache.clear()

    def solve_resolvent(self, z, f) -> np.ndarray:
        """``F_h(z)⁻¹ f`` via ``(M − z⁻¹ A) w = A f``.

        Raises:
            InvalidArgument: if ``z`` is zero or ``f`` has the wrong length.
            EigenvalueProximityError: if ``z`` is numerically an eigenvalue.
        """
        z = self._check_shift(z)
        f = self._check_vector(f)
        try:
            factorization, conjugated = self.shifted_factorization(z)
        except NearSingularError as err:
            raise EigenvalueProximityError(z) from err

        def shifted_solve(b):
            if conjugated:
                return np.conj(factorization.solve(np.conj(b)))
            return factorization.solve(b)

        rhs = self.A @ f
        w = shifted_solve(rhs)
        residual = rhs - (self.M @ w - (self.A @ w) / z)
        norm_rhs = np.linalg.norm(rhs)
        if norm_rhs and np.linalg.norm(residual) > REFINE_TOL * norm_rhs:
            logger.debug("Refining resolvent solve at z=%r", z)
            w = w + shifted_solve(residual)
        return w

    def solve_mass(self, b) -> np.ndarray:
        """Solve ``M x = b``."""
        return self.system.mass_factorization.solve(self._check_vector(b))

    def rayleigh_quotient(self, v) -> float:
        """``(vᴴ A v) / (vᴴ M v)``."""
        v = self._check_vector(v)
        return float(np.vdot(v, self.A @ v).real / np.vdot(v, self.M @ v).real)

    def pencil_residual(self, value: float, v) -> float:
        """Relative residual of an approximate eigenpair of ``(A, M)``:
        ``‖M⁻¹(A v − λ M v)‖_M / (|λ| ‖v‖_M)``."""
        v = self._check_vector(v)
        r = self.A @ v - value * (self.M @ v)
        dual = np.sqrt(max(np.vdot(r, self.solve_mass(r)).real, 0.0))
        return float(dual / (abs(value) * self.norm_M(v)))

    def operator_norm_estimate(
        self, z, k: int = 20, seed: int = DEFAULT_SEED, power_steps: int = 30
    ) -> float:
        """Lower estimate of the M-operator norm of ``F_h(z)``.

        Each of ``k`` seeded random unit vectors is improved by
        ``power_steps`` steps of power iteration on ``F_h(z)* F_h(z)`` before
        the largest ``‖F_h(z) v‖_M`` is taken. The adjoint in the mass inner
        product is ``F_h(conj(z))``.
        """
        z = self._check_shift(z)
        if k < 1 or power_steps < 0:
            raise InvalidArgument("need k >= 1 and power_steps >= 0")
        rng = np.random.default_rng(seed)
        best = 0.0
        for _ in range(k):
            v = rng.standard_normal(self.n_dof)
            v = v / self.norm_M(v)
            for _ in range(power_steps):
                u = self.apply_F(z.conjugate(), self.apply_F(z, v))
                size = self.norm_M(u)
                if not size:
                    break
                v = u / size
            best = max(best, self.norm_M(self.apply_F(z, v)))
        return best

    def __repr__(self):
        return "OperatorFunction(n_dof=%d, cached=%d)" % (self.n_dof, len(self._cache))
