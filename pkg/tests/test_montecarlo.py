"""Unit tests for the annulus simulator.

The simulator is the independent cross-check of the analytic layer, so
these tests avoid the engine except where an analytic mean anchors a
statistical tolerance; sampling laws are validated against elementary
distributional facts instead.
"""

import math

import numpy as np
import pytest

from conftest import all_schemes, make_params
from udnjt import moments
from udnjt.model import AggregateKind, ChannelModel, NetworkParams, Scheme
from udnjt.montecarlo import (EmpiricalStats, Realization, TrialOutcome,
                              _draw_fades, _shard_sizes, evaluate_schemes,
                              run_experiment, sample_realization)

RAY = ChannelModel.rayleigh()
C1 = ChannelModel.constant(1.0)

SCHEMES = all_schemes()


# ---- realization sampling ----


def test_sample_realization_basics():
    p = make_params()
    rng = np.random.default_rng(3)
    real = sample_realization(p, rng)
    assert real.count == len(real.radii) == len(real.fades)
    assert real.count >= 1
    assert np.all(real.radii >= p.r_l)
    assert np.all(real.radii <= p.r_m)
    assert real.channel is None
    assert np.all(real.fades == 1.0)


def test_sample_realization_min_points():
    p = make_params(1e-3)
    rng = np.random.default_rng(4)
    for _ in range(50):
        assert sample_realization(p, rng, min_points=2).count >= 2
    with pytest.raises(ValueError):
        sample_realization(p, rng, min_points=3)


def test_sample_realization_channel_fades():
    p = make_params()
    rng = np.random.default_rng(5)
    real = sample_realization(p, rng, channel=RAY)
    assert real.channel == RAY
    assert len(np.unique(real.fades)) > 1
    real_c = sample_realization(p, rng, channel=ChannelModel.constant(2.0))
    assert np.all(real_c.fades == 2.0)


def test_draw_fades_laws():
    rng = np.random.default_rng(6)
    n = 200000
    ray = _draw_fades(RAY, rng, n)
    assert abs(ray.mean() - 1.0) <= 5.0 / math.sqrt(n)
    nak = _draw_fades(ChannelModel.nakagami(2.0, 1.3), rng, n)
    assert abs(nak.mean() - 1.3) <= 5.0 * 1.3 / math.sqrt(2.0 * n)
    assert np.all(_draw_fades(None, rng, 10) == 1.0)
    assert np.all(_draw_fades(ChannelModel.constant(0.5), rng, 10) == 0.5)


def test_radius_law_is_area_uniform():
    """Squared radii must be uniform on [r_l^2, r_m^2]."""
    p = make_params()
    rng = np.random.default_rng(7)
    sq = np.concatenate([sample_realization(p, rng).radii ** 2
                         for _ in range(300)])
    lo, hi = p.r_l ** 2, p.r_m ** 2
    u = (sq - lo) / (hi - lo)
    n = len(u)
    assert abs(u.mean() - 0.5) <= 5.0 / math.sqrt(12.0 * n)


# ---- per-realization evaluation ----


def _fixed_real(radii, fades=None, channel=None):
    radii = np.asarray(radii, dtype=float)
    fades = np.ones_like(radii) if fades is None else np.asarray(fades)
    return Realization(radii=radii, fades=fades, count=len(radii),
                       channel=channel)


def test_evaluate_schemes_returns_outcomes_in_order():
    p = make_params()
    real = _fixed_real([1.0, 2.0, 5.0])
    out = evaluate_schemes(real, SCHEMES, C1, p)
    assert [o.scheme for o in out] == list(SCHEMES)
    assert all(isinstance(o, TrialOutcome) for o in out)


def test_evaluate_schemes_power_arithmetic():
    p = make_params()
    real = _fixed_real([1.0, 2.0])
    kp = p.k_s * p.p_s
    out = {o.scheme.key: o for o in evaluate_schemes(real, SCHEMES, C1, p)}
    p1, p2 = kp * 1.0 ** -p.alpha_s, kp * 2.0 ** -p.alpha_s
    assert out["nojt"].desired_power == pytest.approx(p1, rel=1e-15)
    assert out["nojt"].interference_power == pytest.approx(p2, rel=1e-15)
    assert out["2ns"].desired_power == pytest.approx(p1 + p2, rel=1e-15)
    assert out["2ns"].interference_power == 0.0
    assert out["2ns"].sinr == math.inf
    # cd circle of radius 3 contains both points
    assert out["cd"].desired_power == pytest.approx(p1 + p2, rel=1e-15)
    assert out["nojt"].sinr == pytest.approx(p1 / p2, rel=1e-15)


def test_boundary_circle_is_inclusive():
    p = make_params()
    real = _fixed_real([1.0, 2.0])
    out, = evaluate_schemes(real, [Scheme.cd(2.0)], C1, p)
    assert out.interference_power == 0.0
    assert out.sinr == math.inf


def test_fpd_boundary_scales_nearest_radius():
    p = make_params()
    et = Scheme.fpd(10.0).eta_ratio(p)
    inside = 1.0 / et * 0.999
    outside = 1.0 / et * 1.001
    out_in, = evaluate_schemes(_fixed_real([1.0, inside]),
                               [Scheme.fpd(10.0)], C1, p)
    out_out, = evaluate_schemes(_fixed_real([1.0, outside]),
                                [Scheme.fpd(10.0)], C1, p)
    assert out_in.interference_power == 0.0
    assert out_out.interference_power > 0.0


def test_two_ns_needs_two_points():
    p = make_params()
    with pytest.raises(ValueError):
        evaluate_schemes(_fixed_real([1.0]), [Scheme.two_ns()], C1, p)


def test_unit_fades_rescale_under_constant_channel():
    p = make_params()
    base, = evaluate_schemes(_fixed_real([1.0, 2.0]), [Scheme.nojt()],
                             None, p)
    scaled, = evaluate_schemes(_fixed_real([1.0, 2.0]), [Scheme.nojt()],
                               ChannelModel.constant(2.0), p)
    assert scaled.desired_power == pytest.approx(2.0 * base.desired_power,
                                                 rel=1e-15)


def test_fade_law_mismatch_is_rejected():
    p = make_params()
    rng = np.random.default_rng(8)
    with pytest.raises(ValueError, match="unit fades"):
        evaluate_schemes(_fixed_real([1.0, 2.0]), [Scheme.nojt()], RAY, p)
    drawn = sample_realization(p, rng, channel=RAY)
    with pytest.raises(ValueError, match="drawn under"):
        evaluate_schemes(drawn, [Scheme.nojt()], C1, p)
    with pytest.raises(ValueError, match="drawn under"):
        evaluate_schemes(drawn, [Scheme.nojt()], None, p)


# ---- experiment runner ----


def test_run_experiment_validation():
    p = make_params()
    with pytest.raises(ValueError):
        run_experiment(p, [Scheme.nojt()], RAY, 50, seed=1)
    with pytest.raises(ValueError):
        run_experiment(p, [], RAY, 1000, seed=1)
    with pytest.raises(ValueError):
        run_experiment(p, [Scheme.nojt()], RAY, 1000, seed=1,
                       collectors={"bogus": True})


def test_shard_sizes_partition():
    sizes = _shard_sizes(100003)
    assert sum(sizes) == 100003
    assert max(sizes) - min(sizes) <= 1


def test_run_experiment_deterministic_across_reruns_and_workers():
    p = make_params()
    kw = dict(n_trials=2000, seed=11)
    a = run_experiment(p, [Scheme.nojt(), Scheme.cd(3.0)], RAY, **kw)
    b = run_experiment(p, [Scheme.nojt(), Scheme.cd(3.0)], RAY, **kw)
    c = run_experiment(p, [Scheme.nojt(), Scheme.cd(3.0)], RAY, workers=2,
                       **kw)
    assert set(a) == set(b) == set(c)
    for key in a:
        for other in (b, c):
            assert a[key].mean == other[key].mean
            assert a[key].variance == other[key].variance
            assert a[key].standard_error == other[key].standard_error


def test_power_partition_identity():
    """Desired plus interference equals total in every cell, because all
    three are folded from the same trials."""
    p = make_params()
    res = run_experiment(p, SCHEMES, RAY, 2000, seed=12)
    for scheme in SCHEMES:
        tot = res[(scheme, "total")].mean
        split = (res[(scheme, "desired")].mean
                 + res[(scheme, "interference")].mean)
        assert split == pytest.approx(tot, rel=1e-12)
    # the total is scheme independent
    totals = {res[(s, "total")].mean for s in SCHEMES}
    assert len(totals) == 1


def test_means_match_analytic_within_pull_bound():
    p = make_params()
    res = run_experiment(p, SCHEMES, RAY, 10000, seed=20170301)
    kinds = {"desired": AggregateKind.DESIRED,
             "interference": AggregateKind.INTERFERENCE,
             "total": AggregateKind.TOTAL}
    for scheme in SCHEMES:
        for metric, kind in kinds.items():
            cell = res[(scheme, metric)]
            want = moments.mean_power(p, scheme, RAY, kind)
            pull = abs(cell.mean - want) / cell.standard_error
            assert pull < 6.0, (scheme.key, metric, pull)


def test_mgf_collector_straddles_analytic_transform():
    from udnjt.mgf import mgf as build_transform
    p = make_params()
    zs = [0.01, 0.1, 1.0]
    res = run_experiment(p, [Scheme.nojt()], RAY, 20000, seed=13,
                         collectors={"mgf": zs})
    cell = res[(Scheme.nojt(), "interference")]
    z_grid, est, se = cell.mgf_at
    assert np.all(z_grid == np.asarray(zs))
    fn = build_transform(p, Scheme.nojt(), RAY, AggregateKind.INTERFERENCE)
    for j, z in enumerate(zs):
        assert se[j] > 0.0
        assert abs(est[j] - fn.eval(z)) <= 5.0 * se[j]


def test_histogram_collector_mass_accounting():
    p = make_params()
    edges = np.linspace(0.0, 1.0, 11)
    res = run_experiment(
        p, [Scheme.nojt()], RAY, 2000, seed=14,
        collectors={"histogram": {(Scheme.nojt(), "interference"): edges}})
    got_edges, mass, out = res[(Scheme.nojt(), "interference")].histogram
    assert np.all(got_edges == edges)
    assert np.all(mass >= 0.0)
    assert float(mass.sum()) + out / 2000 == pytest.approx(1.0, abs=1e-12)
    # cells without a histogram request carry none
    assert res[(Scheme.nojt(), "desired")].histogram is None


def test_sinr_and_se_collectors():
    p = make_params()
    res = run_experiment(p, [Scheme.nojt()], RAY, 2000, seed=15,
                         collectors={"sinr": True, "se": True})
    sinr = res[(Scheme.nojt(), "sinr")]
    se = res[(Scheme.nojt(), "se")]
    assert isinstance(sinr, EmpiricalStats)
    assert sinr.mean > 0.0
    assert se.mean > 0.0
    assert se.mean < sinr.mean
    assert sinr.n_infinite == se.n_infinite


def test_infinite_sinr_trials_are_counted():
    """A tight annulus with a wide cooperative circle leaves the
    interference window empty in most trials."""
    p = NetworkParams(lambda_b=1e-3, r_l=0.1, r_m=5.0, k_s=1.0,
                      alpha_s=3.5, p_s=50.118723362727224)
    res = run_experiment(p, [Scheme.cd(4.9)], RAY, 1000, seed=16,
                         collectors={"sinr": True})
    cell = res[(Scheme.cd(4.9), "sinr")]
    assert cell.n_infinite > 0
    assert cell.n_trials + cell.n_infinite == 1000
    assert math.isfinite(cell.mean)


def test_default_collectors_expose_power_metrics_only():
    p = make_params()
    res = run_experiment(p, [Scheme.nojt()], RAY, 1000, seed=17)
    assert set(res) == {(Scheme.nojt(), "desired"),
                        (Scheme.nojt(), "interference"),
                        (Scheme.nojt(), "total")}
    cell = res[(Scheme.nojt(), "desired")]
    assert cell.mgf_at is None
    assert cell.histogram is None
    assert cell.variance_standard_error > 0.0
