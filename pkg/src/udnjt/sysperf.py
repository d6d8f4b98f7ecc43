"""System-level metrics built on the power moments and transform engine.

Mean SINR is the ratio-of-means form E[P] / (E[I] + N0).  SINR moments
and spectral efficiency are semi-infinite integrals of the interference
and total-power transforms, evaluated with octave-doubling Gauss-Legendre
panels.  At zero noise these integrands flatten to a positive constant
whenever the interference window is empty with positive probability; the
target is then genuinely infinite, which is raised as DivergenceError
rather than returned as a large number.  Probabilities below a small
threshold are treated as boundary-truncation artifacts and subtracted so
the continuous part still integrates.
"""

import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy import stats

from . import mgf as _mgf
from . import moments, radii, specfun
from .model import AggregateKind, ChannelModel, NetworkParams, Scheme

logger = logging.getLogger(__name__)

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(24)

# empty-interference probability above this makes zero-noise targets infinite
_ATOM_TOL = 1e-5
# two consecutive octaves below this relative size stop the tail sweep
_REL_STOP = 1e-9
_MAX_OCTAVES = 200


class DivergenceError(specfun.NumericError):
    """A zero-noise SINR or efficiency integral has no finite value."""


@dataclass(frozen=True)
class SinrStats:
    """Mean SINR (ratio of means) and second moment (transform integral).

    The two come from different approximations of the same random ratio,
    so second_moment >= mean_sinr**2 is not guaranteed and not asserted.
    """

    mean_sinr: float
    second_moment: float
    scheme: Scheme
    channel: ChannelModel


@dataclass(frozen=True)
class EfficiencyResult:
    """Spectral efficiency with its area-weighted counterpart.

    truncation_n is the cell-count cutoff of the Poisson sum; the tail
    mass beyond it is below 1e-13.
    """

    spectral_efficiency: float
    ase: float
    truncation_n: int


# ---- tail quadrature ----


def _octave_integral(g, z_0):
    """Integrate g over [z_0, inf) with Gauss-Legendre panels per octave.

    Doubles the interval endpoint each step and stops once two
    consecutive octaves contribute less than _REL_STOP of the running
    total.  Returns (integral, z_max) where z_max is the last endpoint;
    the caller decides whether the integrand had decayed by then.
    """
    pieces = []
    small = 0
    lo = float(z_0)
    for _ in range(_MAX_OCTAVES):
        hi = 2.0 * lo
        mid = 0.5 * (hi + lo)
        half = 0.5 * (hi - lo)
        vals = [g(mid + half * x) for x in _GL_NODES]
        pieces.append(half * float(np.dot(_GL_WEIGHTS, vals)))
        total = math.fsum(pieces)
        if abs(pieces[-1]) < _REL_STOP * max(abs(total), 1e-300):
            small += 1
            if small >= 2:
                break
        else:
            small = 0
        lo = hi
    return math.fsum(pieces), lo


def _total_empty_prob(params):
    """Probability that the whole annulus holds no transmitter."""
    return math.exp(-params.lambda_b * params.annulus_area)


# ---- mean SINR ----


def mean_sinr(params, scheme, channel):
    """Ratio-of-means SINR estimate E[P] / (E[I] + N0).

    Depends on the fade law only through its mean, so any two channels
    with the same mean fade give identical values.  Raises ValueError
    when both the mean interference and the noise floor are zero.
    """
    desired = moments.mean_power(params, scheme, channel,
                                 AggregateKind.DESIRED)
    denom = moments.mean_power(params, scheme, channel,
                               AggregateKind.INTERFERENCE) + params.n_0
    if denom == 0.0:
        raise ValueError("mean SINR undefined: zero mean interference "
                         "and zero noise floor")
    return desired / denom


# ---- SINR moments through the interference transform ----


def sinr_moment(params, scheme, channel, n):
    """n-th SINR moment E[P^n] * int z^(n-1)/Gamma(n) M_I(z) e^(-z N0) dz.

    Supports n in {1, 2}.  At zero noise the transform tends to the
    empty-interference probability; if that atom exceeds 1e-5 the moment
    is infinite and DivergenceError is raised, otherwise the atom is
    subtracted as a truncation artifact and the continuous part is
    integrated.  A residual plateau above z_max^(-1.5) at the last
    quadrature endpoint also raises DivergenceError.
    """
    if n not in (1, 2):
        raise ValueError(f"moment order must be 1 or 2, got {n!r}")
    if n == 1:
        power_n = moments.mean_power(params, scheme, channel,
                                     AggregateKind.DESIRED)
    else:
        power_n = moments.second_moment_power(params, scheme, channel,
                                              AggregateKind.DESIRED)
    fn_i = _mgf.mgf(params, scheme, channel, AggregateKind.INTERFERENCE)
    n_0 = params.n_0
    atom = 0.0
    if n_0 == 0.0:
        atom = radii.boundary_law(params, scheme).interference_empty_prob()
        if atom > _ATOM_TOL:
            raise DivergenceError(
                f"E[SINR^{n}] diverges at zero noise: the interference "
                f"window is empty with probability {atom!r} "
                f"(> {_ATOM_TOL!r})", error_bound=atom)

    mean_i = moments.mean_power(params, scheme, channel,
                                AggregateKind.INTERFERENCE)
    z_0 = 1e-8 / (moments.mean_power(params, scheme, channel,
                                     AggregateKind.DESIRED) + mean_i)

    def integrand(z):
        return z ** (n - 1) * (fn_i.eval(z) - atom) * math.exp(-z * n_0)

    head = z_0 ** n / n
    tail, z_max = _octave_integral(integrand, z_0)
    if n_0 == 0.0:
        resid = fn_i.eval(z_max) - atom
        if resid > z_max ** -1.5:
            raise DivergenceError(
                f"E[SINR^{n}] integral is not decaying: transform residual "
                f"{resid!r} at z = {z_max!r} exceeds z^-1.5; the "
                f"quadrature window was [{z_0!r}, {z_max!r}]",
                estimate=power_n * (head + tail), error_bound=resid)
    return power_n * (head + tail) / math.gamma(n)


def sinr_stats(params, scheme, channel):
    """Bundle the ratio-of-means SINR with the second transform moment."""
    return SinrStats(mean_sinr=mean_sinr(params, scheme, channel),
                     second_moment=sinr_moment(params, scheme, channel, 2),
                     scheme=scheme, channel=channel)


# ---- spectral efficiency ----


def spectral_efficiency(params, scheme, channel):
    """Mean of log2(1 + SINR) through the transform difference identity.

    S = (1/ln 2) * int_0^inf (M_I(z) - M_tot(z)) e^(-z N0) / z dz, where
    M_tot is the transform of desired plus interference power (scheme
    independent).  The removable singularity at z = 0 contributes
    E[P] * z_0 below the first node.  At zero noise the large-z plateau
    of the integrand equals the probability that interference is zero
    while desired power is positive; above 1e-5 that makes the mean
    infinite (DivergenceError), below it the plateau is subtracted as a
    truncation artifact.
    """
    desired = moments.mean_power(params, scheme, channel,
                                 AggregateKind.DESIRED)
    mean_i = moments.mean_power(params, scheme, channel,
                                AggregateKind.INTERFERENCE)
    fn_i = _mgf.mgf(params, scheme, channel, AggregateKind.INTERFERENCE)
    fn_t = _mgf.mgf_total(params, channel)
    n_0 = params.n_0
    shift = 0.0
    if n_0 == 0.0:
        c_i = radii.boundary_law(params, scheme).interference_empty_prob()
        shift = c_i - _total_empty_prob(params)
        if shift > _ATOM_TOL:
            raise DivergenceError(
                "spectral efficiency diverges at zero noise: interference "
                "is zero while desired power is positive with probability "
                f"{shift!r} (> {_ATOM_TOL!r})", error_bound=shift)

    z_0 = 1e-8 / (desired + mean_i)

    def integrand(z):
        gap = fn_i.eval(z) - fn_t.eval(z) - shift
        return gap * math.exp(-z * n_0) / z

    tail, z_max = _octave_integral(integrand, z_0)
    if n_0 == 0.0:
        resid = fn_i.eval(z_max) - fn_t.eval(z_max) - shift
        if resid > z_max ** -1.5:
            raise DivergenceError(
                "spectral efficiency integral is not decaying: transform "
                f"gap {resid!r} at z = {z_max!r} exceeds z^-1.5; the "
                f"quadrature window was [{z_0!r}, {z_max!r}]",
                estimate=(desired * z_0 + tail) / math.log(2.0),
                error_bound=resid)
    return (desired * z_0 + tail) / math.log(2.0)


# ---- area spectral efficiency ----


def efficiency(params, scheme, channel):
    """Spectral efficiency plus its per-area version over the cell disc.

    The per-area value sums n * P[N = n] * S / (pi R_m^2) over the
    Poisson cell count N of the disc of radius R_m.  The truncated sum
    collapses to S * lambda_b * cdf(n_cut - 1) and the closed form is
    S * lambda_b; both are computed, the larger is reported, and the
    difference is logged.
    """
    s_eff = spectral_efficiency(params, scheme, channel)
    mu = params.lambda_b * math.pi * params.r_m ** 2
    n_cut = int(stats.poisson.isf(1e-13, mu)) + 2
    truncated = s_eff * params.lambda_b * float(stats.poisson.cdf(n_cut - 1,
                                                                  mu))
    closed = s_eff * params.lambda_b
    logger.debug("per-area efficiency paths: truncated %r, closed %r, "
                 "difference %r", truncated, closed, closed - truncated)
    return EfficiencyResult(spectral_efficiency=s_eff,
                            ase=max(truncated, closed),
                            truncation_n=n_cut)


def area_spectral_efficiency(params, scheme, channel):
    """Per-area spectral efficiency in bit/s/Hz per unit area."""
    return efficiency(params, scheme, channel).ase
