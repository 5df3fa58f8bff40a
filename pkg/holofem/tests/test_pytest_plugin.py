import numpy as np
import pytest


def test_unit_square_is_cached(unit_square):
    setup = unit_square(3)
    assert setup is unit_square(3)
    assert setup.system.n_dof == 4
    assert setup.opfun.system is setup.system
    assert setup.mesh is setup.system.mesh


def test_oracle_spectrum_is_read_only(oracle_spectrum):
    values = oracle_spectrum(2)
    np.testing.assert_allclose(values, [32.0])
    with pytest.raises(ValueError):
        values[0] = 1.0
    assert oracle_spectrum(2) is values


def test_oracle_spectrum_ascending(oracle_spectrum):
    values = oracle_spectrum(5)
    assert len(values) == 16
    assert np.all(np.diff(values) >= 0)
