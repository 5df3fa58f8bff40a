"""
Fixtures for tests of code built on :mod:`holofem`, registered as a pytest
plugin under the name ``holofem``.

Example use::

    def test_lowest(unit_square):
        setup = unit_square(10)
        assert setup.system.n_dof == 81

"""

import logging
from functools import lru_cache

import numpy as np
import pytest

from holofem.assembly import assemble
from holofem.base import HolofemDict
from holofem.linalg.oracle import dense_generalized_eig
from holofem.mesh import generate_uniform_mesh
from holofem.opfun import OperatorFunction

logger = logging.getLogger(__name__)


@lru_cache(maxsize=None)
def _unit_square(n: int) -> HolofemDict:
    mesh = generate_uniform_mesh(n)
    system = assemble(mesh)
    logger.debug("Built unit square setup for n=%d", n)
    return HolofemDict(mesh=mesh, system=system, opfun=OperatorFunction(system))


@lru_cache(maxsize=None)
def _oracle_spectrum(n: int) -> np.ndarray:
    system = _unit_square(n).system
    values = dense_generalized_eig(system.A, system.M)
    values.flags.writeable = False
    return values


@pytest.fixture(scope="session")
def unit_square():
    """Factory returning the mesh, assembled system and operator function of
    the structured unit square mesh with ``n`` cells per side, cached for
    the session. Treat the returned objects as read-only."""
    return _unit_square


@pytest.fixture(scope="session")
def oracle_spectrum():
    """Factory returning the dense-solver spectrum (ascending, read-only) of
    the structured unit square mesh with ``n`` cells per side."""
    return _oracle_spectrum
