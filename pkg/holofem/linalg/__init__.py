"""
Sparse factorizations for the shifted pencils and a dense generalized
eigensolver used as an independent reference.
"""

from holofem.linalg.factor import Factorization, factor
from holofem.linalg.oracle import dense_generalized_eig, jacobi_eigh

__all__ = ["Factorization", "factor", "dense_generalized_eig", "jacobi_eigh"]
