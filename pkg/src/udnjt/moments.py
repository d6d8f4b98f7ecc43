"""Closed-form mean, second moment, and variance of the desired and
interference power sums.

Conditioned on the split radius r, each power sum is a Poisson functional
over a sub-annulus, so its first two moments follow from the mean-measure
and second-factorial-measure integrals of K h P x^(-alpha).  Averaging the
conditional moments over the split-radius law gives closed expressions in
the clipped radius moments E[min(r, r_m)^p] (log moments when the path-loss
exponent is 2).
"""

import math
from dataclasses import dataclass

from . import specfun
from .model import AggregateKind
from .radii import boundary_law

_ALPHA2_EPS = 1e-9


@dataclass(frozen=True)
class PowerStats:
    """First and second moments of one power aggregate (linear mW)."""

    mean: float
    second_moment: float
    variance: float


# ---- conditional Poisson-sum moments over a sub-annulus ----


def _mean_sum(params, channel, u, v):
    """Mean of the power sum over transmitters in the annulus [u, v]."""
    if v <= u:
        return 0.0
    pref = 2.0 * math.pi * params.lambda_b * params.k_s * channel.mean_fade * params.p_s
    al = params.alpha_s
    if abs(al - 2.0) < _ALPHA2_EPS:
        return pref * math.log(v / u)
    return pref * (v ** (2.0 - al) - u ** (2.0 - al)) / (2.0 - al)


def _var_sum(params, channel, u, v):
    """Variance of the power sum over the annulus [u, v]."""
    if v <= u:
        return 0.0
    pref = (2.0 * math.pi * params.lambda_b * channel.second_fade
            * (params.k_s * params.p_s) ** 2)
    al = params.alpha_s
    return pref * (v ** (2.0 - 2.0 * al) - u ** (2.0 - 2.0 * al)) / (2.0 - 2.0 * al)


# ---- public moments ----


def mean_power(params, scheme, channel, kind):
    """E of the chosen power aggregate."""
    kind = AggregateKind(kind)
    if kind is AggregateKind.TOTAL:
        return _mean_sum(params, channel, params.r_l, params.r_m)
    law = boundary_law(params, scheme)
    pref = 2.0 * math.pi * params.lambda_b * params.k_s * channel.mean_fade * params.p_s
    al = params.alpha_s
    if abs(al - 2.0) < _ALPHA2_EPS:
        e_log = law.clipped_log_moment()
        if kind is AggregateKind.DESIRED:
            return pref * (e_log - math.log(params.r_l))
        return pref * (math.log(params.r_m) - e_log)
    e_p = law.clipped_power_moment(2.0 - al)
    if kind is AggregateKind.DESIRED:
        return pref * (e_p - params.r_l ** (2.0 - al)) / (2.0 - al)
    return pref * (params.r_m ** (2.0 - al) - e_p) / (2.0 - al)


def second_moment_power(params, scheme, channel, kind):
    """E of the squared power aggregate."""
    kind = AggregateKind(kind)
    if kind is AggregateKind.TOTAL:
        mu = _mean_sum(params, channel, params.r_l, params.r_m)
        return _var_sum(params, channel, params.r_l, params.r_m) + mu * mu
    law = boundary_law(params, scheme)
    al = params.alpha_s
    if abs(al - 2.0) < _ALPHA2_EPS:
        # squared log terms appear in the conditional mean, so integrate
        # the conditional second moment over the law directly
        if kind is AggregateKind.DESIRED:
            def g(m):
                mu = _mean_sum(params, channel, params.r_l, m)
                return _var_sum(params, channel, params.r_l, m) + mu * mu
        else:
            def g(m):
                mu = _mean_sum(params, channel, m, params.r_m)
                return _var_sum(params, channel, m, params.r_m) + mu * mu
        return law.expect(g, specfun.QuadratureSpec(1e-11, 1e-11, 300))
    k1 = (2.0 * math.pi * params.lambda_b * params.k_s * channel.mean_fade
          * params.p_s / (2.0 - al))
    k2 = (2.0 * math.pi * params.lambda_b * channel.second_fade
          * (params.k_s * params.p_s) ** 2 / (2.0 - 2.0 * al))
    e1 = law.clipped_power_moment(2.0 - al)        # E[m^(2-alpha)]
    e2 = law.clipped_power_moment(2.0 - 2.0 * al)  # E[m^(2-2 alpha)]
    e3 = law.clipped_power_moment(4.0 - 2.0 * al)  # E[m^(4-2 alpha)]
    if kind is AggregateKind.DESIRED:
        edge = params.r_l
        var_part = k2 * (e2 - edge ** (2.0 - 2.0 * al))
        sq_part = k1 * k1 * (e3 - 2.0 * edge ** (2.0 - al) * e1
                             + edge ** (4.0 - 2.0 * al))
    else:
        edge = params.r_m
        var_part = k2 * (edge ** (2.0 - 2.0 * al) - e2)
        sq_part = k1 * k1 * (edge ** (4.0 - 2.0 * al)
                             - 2.0 * edge ** (2.0 - al) * e1 + e3)
    return var_part + sq_part


def variance_power(params, scheme, channel, kind):
    """Variance of the chosen power aggregate.

    Tiny negative values from cancellation (relative magnitude below 1e-9)
    clamp to 0; anything more negative raises NumericError.
    """
    m2 = second_moment_power(params, scheme, channel, kind)
    mu = mean_power(params, scheme, channel, kind)
    var = m2 - mu * mu
    if var < 0.0:
        scale = max(m2, mu * mu, 1e-300)
        if var > -1e-9 * scale:
            return 0.0
        raise specfun.NumericError(
            f"variance computed as {var!r} (relative {var / scale!r}); "
            "cancellation exceeded the clamping tolerance", estimate=var)
    return var


def power_stats(params, scheme, channel, kind):
    """Mean, second moment, and variance in one bundle."""
    mu = mean_power(params, scheme, channel, kind)
    m2 = second_moment_power(params, scheme, channel, kind)
    var = variance_power(params, scheme, channel, kind)
    return PowerStats(mean=mu, second_moment=m2, variance=var)
