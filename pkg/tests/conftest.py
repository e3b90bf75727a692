import numpy as np
import pytest

from paramcz.calibration import calibrate_cz
from paramcz.device import q6q7_pair, sweet_spot_amplitude


@pytest.fixture(scope="session")
def pair():
    return q6q7_pair()


@pytest.fixture(scope="session")
def eps_star(pair):
    return sweet_spot_amplitude(pair.tunable)


@pytest.fixture(scope="session")
def cz_calibration(pair, eps_star):
    return calibrate_cz(pair, eps_star)


@pytest.fixture(autouse=True)
def _quiet_flux_warnings():
    import warnings
    with warnings.catch_warnings():
        warnings.filterwarnings("ignore", message="flux excursion")
        yield
