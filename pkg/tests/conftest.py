"""Shared scenario builders for the test suite.

The reference scenario is the annulus [0.1, 60] m with K_s = 1 and a
17 dBm transmit power; most frozen reference values below were computed
for it at alpha_s = 3.5 or 2 and densities from LAMBDA_GRID.
"""

import pytest

from udnjt.model import ChannelModel, NetworkParams, Scheme

# 17 dBm in linear mW
P_S_MW = 50.118723362727224

LAMBDA_GRID = (1e-3, 2.5e-3, 5e-3, 7.5e-3, 1e-2)


def make_params(lambda_b=1e-2, alpha_s=3.5, n_0=0.0):
    return NetworkParams(lambda_b=lambda_b, r_l=0.1, r_m=60.0, k_s=1.0,
                         alpha_s=alpha_s, p_s=P_S_MW, n_0=n_0)


def all_schemes():
    return (Scheme.nojt(), Scheme.two_ns(), Scheme.cd(3.0), Scheme.fpd(10.0))


def all_channels():
    return (ChannelModel.constant(2.0), ChannelModel.rayleigh(),
            ChannelModel.nakagami(2.0, 1.3))


@pytest.fixture
def params():
    return make_params()
