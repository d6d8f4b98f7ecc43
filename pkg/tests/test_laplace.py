"""Unit tests for the numerical transform inversion.

Analytic transform/density pairs (exponential, Erlang) pin the accuracy;
transforms of distributions with jumps or atoms exercise the
non-contraction detector, which must raise instead of returning a wrong
curve.
"""

import math

import numpy as np
import pytest

from conftest import make_params
from udnjt import moments
from udnjt.laplace import PdfCurve, default_grid, euler_weights, invert
from udnjt.mgf import mgf, mgf_closed_form
from udnjt.model import AggregateKind, ChannelModel, Scheme
from udnjt.specfun import NumericError


def test_euler_weights_small_order():
    xi = euler_weights(2)
    assert np.allclose(xi, [0.5, 1.0, 1.0, 0.75, 0.25], atol=0.0)
    xi_full = euler_weights()
    assert xi_full[0] == 0.5
    assert xi_full[-1] == 2.0 ** -32
    assert len(xi_full) == 65


def test_exponential_density_recovered():
    grid = np.linspace(0.1, 5.0, 50)
    curve = invert(lambda z: 1.0 / (1.0 + z), grid)
    err = np.max(np.abs(curve.density - np.exp(-grid)))
    assert err <= 2e-6
    # the grid covers [0.1, 5]; mass on it is e^-0.1 - e^-5
    want_mass = math.exp(-0.1) - math.exp(-5.0)
    assert curve.mass_check == pytest.approx(want_mass, abs=2e-3)


def test_erlang_density_recovered():
    grid = np.linspace(0.1, 5.0, 50)
    curve = invert(lambda z: (1.0 + z) ** -2.0, grid)
    err = np.max(np.abs(curve.density - grid * np.exp(-grid)))
    assert err <= 1e-6


def test_smooth_surrogate_on_coarse_grid():
    """A nearly Gaussian transform on a deliberately coarse grid keeps its
    mass and mode."""
    grid = np.linspace(1.0, 5.0, 21)
    curve = invert(lambda z: np.exp(-3.0 * z + 0.5 * (0.2 * z) ** 2), grid)
    assert curve.mass_check == pytest.approx(1.0, abs=0.02)
    assert grid[int(np.argmax(curve.density))] == 3.0


def test_shifted_density_before_the_jump():
    """exp(-2z)/(1+z) is a unit exponential shifted to start at 2; left of
    the jump the density is numerically zero."""
    grid = np.linspace(0.05, 1.2, 40)
    curve = invert(lambda z: np.exp(-2.0 * z) / (1.0 + z), grid)
    assert np.max(np.abs(curve.density)) <= 1e-5


def test_jump_trips_the_detector():
    fn = lambda z: np.exp(-2.0 * z) / (1.0 + z)
    with pytest.raises(NumericError, match="not contracting"):
        invert(fn, np.linspace(2.2, 6.0, 39))
    with pytest.raises(NumericError, match="not contracting"):
        invert(fn, np.linspace(0.5, 6.0, 60))


def test_structured_undershoot_raises():
    """5/(1+z) - 4/(1+2z) is not a probability transform; its inverse
    dips far below zero and must be rejected."""
    fn = lambda z: 5.0 / (1.0 + z) - 4.0 / (1.0 + 2.0 * z)
    with pytest.raises(NumericError, match="undershoot"):
        invert(fn, np.linspace(0.1, 6.0, 60))


def test_detector_can_be_disabled():
    fn = lambda z: 5.0 / (1.0 + z) - 4.0 / (1.0 + 2.0 * z)
    curve = invert(fn, np.linspace(0.1, 6.0, 60), detector_rel=None)
    assert isinstance(curve, PdfCurve)
    # negative ringing is clamped once the detector is off
    assert float(np.min(curve.density)) == 0.0


def test_grid_validation():
    fn = lambda z: 1.0 / (1.0 + z)
    with pytest.raises(ValueError):
        invert(fn, np.array([1.0]))
    with pytest.raises(ValueError):
        invert(fn, np.array([2.0, 1.0]))
    with pytest.raises(ValueError):
        invert(fn, np.array([-1.0, 1.0]))
    with pytest.raises(ValueError):
        invert(fn, np.ones((2, 2)))


def test_default_grid():
    g = default_grid(10.0)
    assert len(g) == 200
    assert g[0] == pytest.approx(1e-3, rel=1e-12)
    assert g[-1] == pytest.approx(200.0, rel=1e-12)
    assert np.all(np.diff(g) > 0.0)
    assert len(default_grid(10.0, n=50)) == 50
    with pytest.raises(ValueError):
        default_grid(0.0)
    with pytest.raises(ValueError):
        default_grid(math.inf)


def test_pdf_curve_mean_and_interpolation():
    grid = np.linspace(0.01, 25.0, 2000)
    curve = invert(lambda z: 1.0 / (1.0 + z), grid)
    assert curve.mean == pytest.approx(1.0, abs=5e-3)
    mid = curve.interpolate(1.0)
    assert mid == pytest.approx(math.exp(-1.0), abs=1e-4)
    assert curve.interpolate(1e9) == 0.0
    assert curve.interpolate(1e-12) == 0.0


def test_engine_transform_inversion_round_trip():
    """Invert the interference transform of the fixed-circle scheme and
    check mass and mean against the closed moments."""
    p = make_params(alpha_s=2.0)
    ray = ChannelModel.rayleigh()
    fn = mgf(p, Scheme.cd(3.0), ray, AggregateKind.INTERFERENCE)
    mean_i = moments.mean_power(p, Scheme.cd(3.0), ray,
                                AggregateKind.INTERFERENCE)
    curve = invert(fn, default_grid(mean_i, n=80))
    assert curve.mass_check == pytest.approx(1.0, abs=0.02)
    assert curve.mean == pytest.approx(mean_i, rel=0.02)


def test_closed_form_transform_inversion():
    """Closed-form transforms carry their own complex evaluator."""
    p = make_params(alpha_s=2.0)
    closed = mgf_closed_form(p, "rayleigh-alpha2")
    total_mean = moments.mean_power(
        p, Scheme.nojt(), ChannelModel.rayleigh(), AggregateKind.TOTAL)
    curve = invert(closed, default_grid(total_mean, n=60))
    assert curve.mass_check == pytest.approx(1.0, abs=0.02)
