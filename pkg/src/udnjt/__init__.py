"""Power statistics of joint transmission in dense small-cell networks.

A transmitter field is a Poisson point process on an annulus around a
centered receiver.  Four association rules split the field into a
cooperating set and an interfering set: nearest transmitter only
(``Scheme.nojt``), two nearest (``Scheme.two_ns``), everything inside a
fixed circle (``Scheme.cd``), and everything within a fixed power
difference of the nearest (``Scheme.fpd``).  Fading is constant,
Rayleigh, or Nakagami-m (``ChannelModel``).

The analytic layer gives means, variances, and transforms
E[exp(-z X)] of the desired and interference power (``moments``,
``mgf``), power densities by numerical transform inversion
(``laplace``), and SINR, spectral-efficiency, and per-area efficiency
metrics (``sysperf``).  ``montecarlo`` simulates the same quantities
from scratch for cross-checks, and ``cli`` wraps everything in the
``udnjt`` command (sweep, pdf, validate).
"""

from .laplace import PdfCurve, default_grid, invert
# the per-kind transform builder stays at udnjt.mgf.mgf; re-exporting it
# under the bare name would shadow the submodule attribute
from .mgf import (CLOSED_FORM_CASES, MgfFn, derivative_moment,
                  mgf_closed_form, mgf_total)
from .model import (AggregateKind, ChannelModel, ChannelVariant,
                    NetworkParams, Scheme, SchemeVariant, dbm_to_mw,
                    mw_to_dbm)
from .moments import mean_power, second_moment_power, variance_power
from .montecarlo import (EmpiricalStats, Realization, TrialOutcome,
                         evaluate_schemes, run_experiment,
                         sample_realization)
from .radii import BoundaryLaw, boundary_law
from .specfun import NumericError, expint_ei, hyp2f1, inc_gamma
from .sysperf import (DivergenceError, EfficiencyResult, SinrStats,
                      area_spectral_efficiency, efficiency, mean_sinr,
                      sinr_moment, sinr_stats, spectral_efficiency)

__version__ = "0.1.0"

__all__ = [
    "AggregateKind", "BoundaryLaw", "CLOSED_FORM_CASES", "ChannelModel",
    "ChannelVariant", "DivergenceError", "EfficiencyResult",
    "EmpiricalStats", "MgfFn", "NetworkParams", "NumericError", "PdfCurve",
    "Realization", "Scheme", "SchemeVariant", "SinrStats", "TrialOutcome",
    "area_spectral_efficiency", "boundary_law", "dbm_to_mw",
    "default_grid", "derivative_moment", "efficiency", "evaluate_schemes",
    "expint_ei", "hyp2f1", "inc_gamma", "invert", "mean_power",
    "mean_sinr", "mgf_closed_form", "mgf_total", "mw_to_dbm",
    "run_experiment", "sample_realization", "second_moment_power",
    "sinr_moment", "sinr_stats", "spectral_efficiency", "variance_power",
]
