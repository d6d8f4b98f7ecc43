"""Special functions and the quadrature primitive used by the closed forms.

Provides the generalized incomplete gamma integral (including negative
order), the lower incomplete gamma, the Gauss hypergeometric function,
the exponential integral, and a guarded adaptive 1-D integrator.  The
gamma family accepts numpy arrays for the integration limits, which the
MGF engine relies on.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate as _si
from scipy import special as _ss


class NumericError(RuntimeError):
    """A numerical routine failed to meet its accuracy contract.

    Carries the best available estimate and an error bound when the caller
    may want to degrade gracefully.
    """

    def __init__(self, message, estimate=None, error_bound=None):
        super().__init__(message)
        self.estimate = estimate
        self.error_bound = error_bound


@dataclass(frozen=True)
class QuadratureSpec:
    """Tolerances for the adaptive integrator."""

    abs_tol: float = 1e-10
    rel_tol: float = 1e-8
    max_subdivisions: int = 200

    def __post_init__(self):
        if self.abs_tol <= 0.0 or self.rel_tol <= 0.0:
            raise ValueError("quadrature tolerances must be positive")
        if self.max_subdivisions < 1:
            raise ValueError("max_subdivisions must be >= 1")


DEFAULT_QUAD = QuadratureSpec()

# ---- incomplete gamma family ----


def _upper_reg_diff(s, a, b):
    """Gamma(s) * (Q(s, a) - Q(s, b)) for s > 0; b may be inf."""
    qa = _ss.gammaincc(s, a)
    qb = np.where(np.isinf(b), 0.0, _ss.gammaincc(s, np.where(np.isinf(b), 1.0, b)))
    return _ss.gamma(s) * (qa - qb)


def _exp1_diff(a, b):
    ea = _ss.exp1(a)
    eb = np.where(np.isinf(b), 0.0, _ss.exp1(np.where(np.isinf(b), 1.0, b)))
    return ea - eb


def _pow_exp(x, s):
    """x^s e^(-x), with the x = inf limit taken as 0."""
    out = np.where(np.isinf(x), 0.0,
                   np.where(np.isinf(x), 1.0, x) ** s * np.exp(-np.where(np.isinf(x), 1.0, x)))
    return out


def inc_gamma(s, a, b):
    """Integral of t^(s-1) e^(-t) over [a, b].

    b may be math.inf.  For s <= 0 the integrand is singular at 0, so a must
    be positive; those orders are reached by the downward recurrence

        G(s) = (G(s+1) - a^s e^(-a) + b^s e^(-b)) / s

    on the positive-order values (G(0) is a difference of E1 values).  a and
    b may be numpy arrays of a common shape; s is scalar.  Scalar calls fall
    back to direct quadrature when the recurrence loses almost all digits to
    cancellation.
    """
    s = float(s)
    a_arr = np.asarray(a, dtype=float)
    b_arr = np.asarray(b, dtype=float)
    scalar = a_arr.ndim == 0 and b_arr.ndim == 0
    a_arr, b_arr = np.broadcast_arrays(a_arr, b_arr)
    if np.any(a_arr < 0.0):
        raise ValueError("lower limit must be >= 0")
    if np.any(b_arr < a_arr):
        raise ValueError("upper limit must be >= lower limit")
    if s <= 0.0 and np.any(a_arr == 0.0):
        raise ValueError("order <= 0 requires a positive lower limit")

    val = _inc_gamma_core(s, a_arr, b_arr)
    if scalar:
        v = float(val)
        if s < 0.0 and not _is_int(s):
            # cancellation guard: compare against the magnitude of the
            # recurrence terms actually subtracted
            scale = abs(float(_pow_exp(a_arr, s))) + abs(float(_pow_exp(b_arr, s)))
            if scale > 0.0 and abs(v) < 1e-7 * scale:
                v = _inc_gamma_quad(s, float(a_arr), float(b_arr))
        return v
    return val


def _is_int(s):
    return abs(s - round(s)) < 1e-12


def _inc_gamma_core(s, a, b):
    if s > 0.0:
        return _upper_reg_diff(s, a, b)
    if abs(s) < 1e-14:
        return _exp1_diff(a, b)
    return (_inc_gamma_core(s + 1.0, a, b) - _pow_exp(a, s) + _pow_exp(b, s)) / s


def _inc_gamma_quad(s, a, b):
    """Direct adaptive quadrature route for scalar negative order."""

    def f(t):
        return t ** (s - 1.0) * math.exp(-t)

    return integrate(f, a, b, QuadratureSpec(1e-13, 1e-11, 300))


def lower_inc_gamma(s, x):
    """Integral of t^(s-1) e^(-t) over [0, x]; s must be positive."""
    s = float(s)
    if s <= 0.0:
        raise ValueError(f"lower incomplete gamma needs order > 0, got {s}")
    x_arr = np.asarray(x, dtype=float)
    if np.any(x_arr < 0.0):
        raise ValueError("argument must be >= 0")
    p = np.where(np.isinf(x_arr), 1.0, _ss.gammainc(s, np.where(np.isinf(x_arr), 1.0, x_arr)))
    val = _ss.gamma(s) * p
    return float(val) if np.ndim(x) == 0 else val


# ---- hypergeometric and exponential integral ----


def hyp2f1(a, b, c, z):
    """Gauss hypergeometric function for real arguments with z <= 0 or |z| < 1."""
    c = float(c)
    z = float(z)
    if c <= 0.0 and _is_int(c):
        raise ValueError(f"c must not be a non-positive integer, got {c}")
    if z >= 1.0:
        raise ValueError(f"argument must satisfy z <= 0 or |z| < 1, got {z}")
    val = float(_ss.hyp2f1(float(a), float(b), c, z))
    if not math.isfinite(val):
        raise NumericError(f"hypergeometric evaluation failed at ({a}, {b}; {c}; {z})",
                           estimate=val)
    return val


def expint_ei(x):
    """Cauchy principal value of the exponential integral Ei(x), x != 0."""
    x = float(x)
    if x == 0.0:
        raise ValueError("Ei is singular at 0")
    return float(_ss.expi(x))


# ---- adaptive quadrature ----


def integrate(f, lo, hi, spec=DEFAULT_QUAD):
    """Adaptive integral of f over [lo, hi]; hi may be math.inf.

    Infinite upper limits are mapped to [0, 1) with x = lo + t/(1-t).
    Raises NumericError (carrying the best estimate and bound) when the
    requested tolerance cannot be certified.
    """
    lo = float(lo)
    if math.isinf(hi):

        def g(t):
            onem = 1.0 - t
            return f(lo + t / onem) / (onem * onem)

        return _quad_guarded(g, 0.0, 1.0, spec)
    hi = float(hi)
    if hi == lo:
        return 0.0
    return _quad_guarded(f, lo, hi, spec)


def _quad_guarded(f, lo, hi, spec):
    val, err, info = _si.quad(f, lo, hi, epsabs=spec.abs_tol, epsrel=spec.rel_tol,
                              limit=spec.max_subdivisions, full_output=True)[:3]
    tol = max(spec.abs_tol, spec.rel_tol * abs(val))
    # quad reports convergence trouble by exceeding the subdivision budget
    # or by an error estimate well above the requested tolerance
    if info["last"] >= spec.max_subdivisions and err > 50.0 * tol:
        raise NumericError(
            f"quadrature did not converge on [{lo}, {hi}]: estimate {val!r}, "
            f"error bound {err!r}", estimate=val, error_bound=err)
    if err > 1e3 * tol and err > 1e-6 * max(1.0, abs(val)):
        raise NumericError(
            f"quadrature error bound {err!r} too large on [{lo}, {hi}]",
            estimate=val, error_bound=err)
    return val
