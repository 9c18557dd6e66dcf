import numpy as np
import pytest

import riskbudget as rb

# reference portfolio of the bundled four-asset Student-t demo model
TABLE_WEIGHTS = np.array([0.17958, 0.28127, 0.30483, 0.23432])
TABLE_CONTRIBUTION = 0.00806

# three-asset Gaussian comparison targets (calm regime / with stress regime)
CALM_VOL_ROW = np.array([0.60916, 0.22200, 0.16884])
STRESSED_ES_ROW = np.array([0.44055, 0.21511, 0.34434])
STRESSED_VOL_ROW = np.array([0.52700, 0.22882, 0.24418])


@pytest.fixture(scope="session")
def tmix_demo():
    return rb.load_model(rb.bundled_model_path("tmix4_demo"))


@pytest.fixture(scope="session")
def gmix_calm():
    return rb.load_model(rb.bundled_model_path("gmix3_calm"))


@pytest.fixture(scope="session")
def gmix_stressed():
    return rb.load_model(rb.bundled_model_path("gmix3_stressed"))


@pytest.fixture(scope="session")
def demo_sample_1m(tmix_demo):
    return rb.sample_tmix(tmix_demo, 10 ** 6, seed=20_001)
