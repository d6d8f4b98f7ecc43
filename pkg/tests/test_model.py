"""Unit tests for the parameter space: conversions, validation, fade moments."""

import dataclasses
import math

import pytest

from conftest import P_S_MW, make_params
from udnjt.model import (AggregateKind, ChannelModel, ChannelVariant,
                         NetworkParams, Scheme, SchemeVariant, dbm_to_mw,
                         eta_t, mw_to_dbm)

# ---- unit conversions ----


def test_dbm_round_trip():
    assert dbm_to_mw(17.0) == pytest.approx(P_S_MW, rel=1e-15)
    assert mw_to_dbm(P_S_MW) == pytest.approx(17.0, rel=1e-14)
    assert dbm_to_mw(0.0) == 1.0
    assert mw_to_dbm(1.0) == 0.0
    assert dbm_to_mw(-30.0) == pytest.approx(1e-3, rel=1e-14)


def test_dbm_validation():
    with pytest.raises(ValueError):
        dbm_to_mw(math.inf)
    with pytest.raises(ValueError):
        dbm_to_mw(math.nan)
    for bad in (0.0, -1.0, math.nan, math.inf):
        with pytest.raises(ValueError):
            mw_to_dbm(bad)


def test_eta_t_values():
    assert eta_t(10.0, 3.5) == pytest.approx(0.51794746792312119, rel=1e-15)
    assert eta_t(10.0, 2.0) == pytest.approx(0.31622776601683794, rel=1e-15)
    assert eta_t(0.0, 2.5) == 1.0
    assert 0.0 < eta_t(40.0, 2.0) < eta_t(10.0, 2.0)


def test_eta_t_validation():
    with pytest.raises(ValueError):
        eta_t(-1.0, 3.5)
    with pytest.raises(ValueError):
        eta_t(10.0, 1.5)
    with pytest.raises(ValueError):
        eta_t(math.nan, 3.5)


# ---- network parameters ----


def test_network_params_validation():
    good = dict(lambda_b=1e-2, r_l=0.1, r_m=60.0, k_s=1.0, alpha_s=3.5,
                p_s=P_S_MW, n_0=0.0)
    NetworkParams(**good)
    for key, bad in (("r_l", 0.0), ("r_l", 60.0), ("r_l", 61.0),
                     ("lambda_b", 0.0), ("lambda_b", -1e-3),
                     ("k_s", 0.0), ("p_s", 0.0), ("p_s", -1.0),
                     ("alpha_s", 1.9), ("n_0", -1e-6),
                     ("r_m", math.inf), ("p_s", math.nan)):
        with pytest.raises(ValueError):
            NetworkParams(**{**good, key: bad})


def test_annulus_area():
    p = make_params()
    assert p.annulus_area == pytest.approx(math.pi * (60.0 ** 2 - 0.1 ** 2),
                                           rel=1e-15)


def test_params_frozen():
    p = make_params()
    with pytest.raises(dataclasses.FrozenInstanceError):
        p.lambda_b = 2e-2


# ---- schemes ----


def test_scheme_constructors_and_keys():
    assert Scheme.nojt().key == "nojt"
    assert Scheme.two_ns().key == "2ns"
    assert Scheme.cd(3.0).key == "cd"
    assert Scheme.fpd(10.0).key == "fpd"
    assert Scheme.cd(3.0).r_0 == 3.0
    assert Scheme.fpd(10.0).eta_db == 10.0
    for bad in (0.0, -1.0, math.nan):
        with pytest.raises(ValueError):
            Scheme.cd(bad)
    for bad in (-0.1, math.nan):
        with pytest.raises(ValueError):
            Scheme.fpd(bad)


def test_scheme_eta_ratio():
    p = make_params()
    assert Scheme.nojt().eta_ratio(p) == 1.0
    assert Scheme.two_ns().eta_ratio(p) == 1.0
    assert Scheme.cd(3.0).eta_ratio(p) == 1.0
    assert Scheme.fpd(0.0).eta_ratio(p) == 1.0
    assert Scheme.fpd(10.0).eta_ratio(p) == pytest.approx(
        0.51794746792312119, rel=1e-15)
    p2 = make_params(alpha_s=2.0)
    assert Scheme.fpd(10.0).eta_ratio(p2) == pytest.approx(
        0.31622776601683794, rel=1e-15)


def test_scheme_validate_against():
    p = make_params()
    Scheme.cd(3.0).validate_against(p)
    Scheme.nojt().validate_against(p)
    with pytest.raises(ValueError):
        Scheme.cd(0.05).validate_against(p)
    with pytest.raises(ValueError):
        Scheme.cd(60.0).validate_against(p)


def test_scheme_variants_cover_keys():
    assert {v.value for v in SchemeVariant} == {"nojt", "2ns", "cd", "fpd"}


# ---- channels ----


def test_channel_fade_moments():
    c2 = ChannelModel.constant(2.0)
    assert (c2.mean_fade, c2.second_fade) == (2.0, 4.0)
    ray = ChannelModel.rayleigh()
    assert (ray.mean_fade, ray.second_fade) == (1.0, 2.0)
    nak = ChannelModel.nakagami(2.0, 1.3)
    assert nak.mean_fade == 1.3
    assert nak.second_fade == pytest.approx(1.5 * 1.3 ** 2, rel=1e-15)
    # shape 1 collapses to the exponential power fade
    nak1 = ChannelModel.nakagami(1.0, 1.0)
    assert (nak1.mean_fade, nak1.second_fade) == (ray.mean_fade,
                                                  ray.second_fade)


def test_channel_validation():
    for bad in (0.0, -1.0, math.nan):
        with pytest.raises(ValueError):
            ChannelModel.constant(bad)
    with pytest.raises(ValueError):
        ChannelModel.nakagami(0.4, 1.0)
    with pytest.raises(ValueError):
        ChannelModel.nakagami(1.0, -1.0)
    with pytest.raises(ValueError):
        ChannelModel.nakagami(math.inf, 1.0)


def test_channel_keys():
    assert ChannelModel.constant(1.0).key == "constant"
    assert ChannelModel.rayleigh().key == "rayleigh"
    assert ChannelModel.nakagami(2.0, 1.0).key == "nakagami"
    assert {v.value for v in ChannelVariant} == {"constant", "rayleigh",
                                                 "nakagami"}


def test_aggregate_kind_coercion():
    assert AggregateKind("desired") is AggregateKind.DESIRED
    assert AggregateKind("interference") is AggregateKind.INTERFERENCE
    assert AggregateKind("total") is AggregateKind.TOTAL
