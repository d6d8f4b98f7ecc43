"""Moment generating functions M(z) = E[exp(-z X)] of the desired,
interference, and total power aggregates.

Conditioned on the split radius, each aggregate is a Poisson sum over a
sub-annulus, whose MGF is exp(-F(v) + F(u)) with F the antiderivative of
2 pi lambda_b phi_z(x) x and phi_z the per-transmitter fade exponent.  The
engine builds F once per (params, channel, z) as a panelwise Chebyshev
antiderivative, then averages exp over the split-radius law nodes, so the
cost per z is one pass over a fixed grid no matter how many radius nodes
the outer average needs.  Constant-fade channels use an incomplete-gamma
closed form for F instead of panels whenever z > 0.

The same engine accepts complex z (needed by transform inversion, which
wraps it from a separate module); this module's MgfFn API is real z.
"""

import functools
import math
from dataclasses import dataclass, field

import numpy as np

from . import moments, specfun
from .model import AggregateKind, ChannelModel, ChannelVariant, Scheme, SchemeVariant
from .radii import boundary_law

# ---- per-transmitter fade exponents ----


def _expm1_any(x):
    if np.iscomplexobj(x):
        return np.exp(x) - 1.0
    return np.expm1(x)


def _log1p_any(x):
    if np.iscomplexobj(x):
        return np.log(1.0 + x)
    return np.log1p(x)


def _phi_factory(params, channel, z):
    """phi_z(x) = 1 - E_h[exp(-z K_s h P_s x^(-alpha))], vectorized in x."""
    w = z * params.k_s * params.p_s
    al = params.alpha_s
    if channel.variant is ChannelVariant.CONSTANT:
        wh = w * channel.h

        def phi(x):
            return -_expm1_any(-wh * x ** (-al))
    elif channel.variant is ChannelVariant.RAYLEIGH:

        def phi(x):
            return w / (x ** al + w)
    else:
        q = (channel.omega / channel.m) * w
        mm = channel.m

        def phi(x):
            return -_expm1_any(-mm * _log1p_any(q * x ** (-al)))
    return phi


# ---- panelwise Chebyshev antiderivative ----

_N_PANELS = 64
_DEGREE = 23


class _PanelAntideriv:
    """F(x) = integral of g from lo to x, built by Chebyshev interpolation of
    g on geometric panels and exact integration of the interpolants."""

    def __init__(self, g, lo, hi, n_panels=_N_PANELS, degree=_DEGREE):
        n = degree + 1
        theta = (2.0 * np.arange(n) + 1.0) * math.pi / (2.0 * n)
        xi = np.cos(theta)
        # discrete orthogonality at first-kind points gives the coefficients
        interp = np.cos(np.arange(n)[:, None] * theta[None, :]) * (2.0 / n)
        interp[0] *= 0.5
        edges = np.geomspace(lo, hi, n_panels + 1)
        mid = 0.5 * (edges[1:] + edges[:-1])
        half = 0.5 * (edges[1:] - edges[:-1])
        x = mid[:, None] + half[:, None] * xi[None, :]
        y = g(x)
        coef = y @ interp.T
        anti = np.polynomial.chebyshev.chebint(coef, m=1, axis=1)
        anti = anti * half[:, None]
        # stitch panels into one continuous antiderivative with F(lo) = 0
        signs = np.where(np.arange(anti.shape[1]) % 2 == 0, 1.0, -1.0)
        at_left = anti @ signs
        at_right = anti.sum(axis=1)
        jumps = at_right[:-1] - at_left[1:]
        offsets = np.concatenate(([0.0], np.cumsum(jumps))) - at_left[0]
        self.edges = edges
        self.mid = mid
        self.half = half
        self.coef = anti
        self.offsets = offsets

    def __call__(self, x):
        x_arr = np.atleast_1d(np.asarray(x, dtype=float))
        idx = np.clip(np.searchsorted(self.edges, x_arr, side="right") - 1,
                      0, len(self.mid) - 1)
        xi = (x_arr - self.mid[idx]) / self.half[idx]
        c = self.coef[idx]
        b0 = np.zeros(len(x_arr), dtype=c.dtype)
        b1 = np.zeros_like(b0)
        for k in range(c.shape[1] - 1, 0, -1):
            b0, b1 = c[:, k] + 2.0 * xi * b0 - b1, b0
        out = c[:, 0] + xi * b0 - b1 + self.offsets[idx]
        return out[0] if np.ndim(x) == 0 else out


@functools.lru_cache(maxsize=512)
def _antideriv_cached(params, channel, z):
    pref = 2.0 * math.pi * params.lambda_b
    phi = _phi_factory(params, channel, z)
    return _PanelAntideriv(lambda x: pref * phi(x) * x, params.r_l, params.r_m)


# ---- constant-fade closed exponent ----


def _const_exponent(params, channel, z, u, v):
    """Exponent F(v) - F(u) for a constant fade and z > 0, via the
    incomplete-gamma antiderivative; v may be an array."""
    al = params.alpha_s
    wh = z * params.k_s * params.p_s * channel.h
    v_arr = np.asarray(v, dtype=float)
    tail = specfun.inc_gamma(-2.0 / al, wh * v_arr ** (-al), wh * u ** (-al))
    inner = 0.5 * (v_arr ** 2 - u ** 2) - (wh ** (2.0 / al) / al) * tail
    return 2.0 * math.pi * params.lambda_b * inner


# ---- single evaluation shared by real and complex paths ----


def evaluate(params, scheme, channel, kind, z):
    """E[exp(-z X)] for one aggregate at scalar z (real or complex with
    nonnegative real part)."""
    kind = AggregateKind(kind)
    if z == 0:
        return 1.0 if not isinstance(z, complex) else 1.0 + 0.0j
    is_real = not isinstance(z, complex)
    closed_const = (channel.variant is ChannelVariant.CONSTANT and is_real and z > 0.0)
    with np.errstate(all="ignore"):
        if kind is AggregateKind.TOTAL:
            if closed_const:
                expo = float(_const_exponent(params, channel, z,
                                             params.r_l, params.r_m))
                val = math.exp(-expo)
            else:
                f = _antideriv_cached(params, channel, complex(z) if not is_real else float(z))
                val = np.exp(-f(params.r_m))
        else:
            law = boundary_law(params, scheme)
            m, wts = law.nodes()
            if closed_const:
                if kind is AggregateKind.DESIRED:
                    expo = _const_exponent(params, channel, z, params.r_l, m)
                else:
                    expo = (_const_exponent(params, channel, z, params.r_l, params.r_m)
                            - _const_exponent(params, channel, z, params.r_l, m))
            else:
                f = _antideriv_cached(params, channel, complex(z) if not is_real else float(z))
                fm = f(m)
                if kind is AggregateKind.DESIRED:
                    expo = fm
                else:
                    expo = f(params.r_m) - fm
            val = np.sum(wts * np.exp(-np.asarray(expo)))
    val = complex(val)
    if not (math.isfinite(val.real) and math.isfinite(val.imag)):
        raise specfun.NumericError(
            f"MGF evaluation failed at z={z!r} "
            f"(scheme={getattr(scheme, 'key', None)}, channel={channel.key}, "
            f"kind={kind.value})", estimate=val)
    if is_real:
        return val.real
    return val


# ---- public MgfFn objects ----


@dataclass(frozen=True)
class MgfFn:
    """M(z) = E[exp(-z X)] of one power aggregate, cached per z.

    eval accepts real z; values for z > 0 lie in (0, 1] and M(0) = 1
    exactly.  Slightly negative z is allowed for derivative estimates at 0,
    within the step bounds of safe_derivative_step.
    """

    params: object
    scheme: object
    channel: ChannelModel
    kind: AggregateKind
    _evaluator: object = None
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def eval(self, z):
        z = float(z)
        if z == 0.0:
            return 1.0
        got = self._cache.get(z)
        if got is None:
            if self._evaluator is not None:
                got = float(self._evaluator(z))
            else:
                got = evaluate(self.params, self.scheme, self.channel, self.kind, z)
            if z > 0.0:
                if not 0.0 <= got <= 1.0 + 1e-12:
                    raise specfun.NumericError(
                        f"MGF value {got!r} outside (0, 1] at z={z!r}", estimate=got)
                got = min(got, 1.0)
            self._cache[z] = got
        return got

    __call__ = eval

    def eval_grid(self, zs):
        return np.array([self.eval(z) for z in np.asarray(zs, dtype=float).ravel()])


def mgf(params, scheme, channel, kind):
    """MGF of the desired or interference power under a scheme."""
    kind = AggregateKind(kind)
    if kind is AggregateKind.TOTAL:
        return mgf_total(params, channel)
    scheme.validate_against(params)
    return MgfFn(params=params, scheme=scheme, channel=channel, kind=kind)


def mgf_total(params, channel):
    """MGF of the total power from every transmitter in the annulus;
    scheme-independent."""
    return MgfFn(params=params, scheme=None, channel=channel,
                 kind=AggregateKind.TOTAL)


# ---- literature closed forms ----

CLOSED_FORM_CASES = (
    "rayleigh-alpha2",
    "rayleigh-alpha4",
    "rayleigh-distant-tail",
    "rayleigh-origin-disc",
    "nakagami-m2-alpha2",
    "nearest-single-rayleigh-alpha2",
)


def _require(cond, case, msg):
    if not cond:
        raise ValueError(f"closed form {case!r} requires {msg}")


def mgf_closed_form(params, case, r_1=None, r_2=None, omega=1.0, m_shape=2.0):
    """Closed-form MGF of the power sum over the annulus [r_1, r_2]
    (defaults to the network annulus) for the special cases admitting one.

    rayleigh-alpha2               power-law form, alpha_s = 2
    rayleigh-alpha4               arctan form, alpha_s = 4
    rayleigh-distant-tail         r_2 -> inf hypergeometric limit, alpha_s = 4
    rayleigh-origin-disc          r_1 -> 0 hypergeometric limit, any alpha_s
    nakagami-m2-alpha2            shape-2 gamma fade, alpha_s = 2
    nearest-single-rayleigh-alpha2  power of the nearest transmitter alone,
                                    annulus radius law, alpha_s = 2
    """
    if case not in CLOSED_FORM_CASES:
        raise ValueError(f"unknown closed-form case {case!r}; "
                         f"choose one of {CLOSED_FORM_CASES}")
    r_1 = params.r_l if r_1 is None else float(r_1)
    r_2 = params.r_m if r_2 is None else float(r_2)
    lam = params.lambda_b
    kp = params.k_s * params.p_s
    al = params.alpha_s
    c = math.pi * lam

    if case == "rayleigh-alpha2":
        _require(abs(al - 2.0) < 1e-12, case, "alpha_s = 2")
        _require(0.0 < r_1 < r_2, case, "0 < r_1 < r_2")

        def ev(z):
            w = z * kp
            return ((r_2 ** 2 + w) / (r_1 ** 2 + w)) ** (-c * w)
        channel = ChannelModel.rayleigh()
    elif case == "rayleigh-alpha4":
        _require(abs(al - 4.0) < 1e-12, case, "alpha_s = 4")
        _require(0.0 < r_1 < r_2, case, "0 < r_1 < r_2")

        def ev(z):
            w = z * kp
            s = math.sqrt(w)
            return math.exp(-c * s * (math.atan(r_2 ** 2 / s) - math.atan(r_1 ** 2 / s)))
        channel = ChannelModel.rayleigh()
    elif case == "rayleigh-distant-tail":
        _require(abs(al - 4.0) < 1e-12, case, "alpha_s = 4")
        _require(r_1 > 0.0, case, "r_1 > 0")

        def ev(z):
            w = z * kp
            hy = specfun.hyp2f1(1.0, 0.5, 1.5, -w * r_1 ** (-4))
            return math.exp(-2.0 * c * (w * r_1 ** (-2) / 2.0) * hy)
        channel = ChannelModel.rayleigh()
    elif case == "rayleigh-origin-disc":
        _require(r_2 > 0.0, case, "r_2 > 0")

        def ev(z):
            w = z * kp
            hy = specfun.hyp2f1(1.0, 2.0 / al, 1.0 + 2.0 / al, -r_2 ** al / w)
            return math.exp(-c * r_2 ** 2 * hy)
        channel = ChannelModel.rayleigh()
    elif case == "nakagami-m2-alpha2":
        _require(abs(al - 2.0) < 1e-12, case, "alpha_s = 2")
        _require(abs(m_shape - 2.0) < 1e-12, case, "shape m = 2")
        _require(0.0 < r_1 < r_2, case, "0 < r_1 < r_2")

        def ev(z):
            q = (omega / 2.0) * z * kp
            u1, u2 = r_1 ** 2 + q, r_2 ** 2 + q
            expo = c * (q * q * (r_2 ** 2 - r_1 ** 2) / (u1 * u2)
                        - 2.0 * q * math.log(u2 / u1))
            return math.exp(expo)
        channel = ChannelModel.nakagami(2.0, omega)
    else:  # nearest-single-rayleigh-alpha2
        _require(abs(al - 2.0) < 1e-12, case, "alpha_s = 2")

        def ev(z):
            b = z * kp
            z1 = math.exp(-c * params.r_l ** 2) - math.exp(-c * params.r_m ** 2)
            bc = b * c
            diff = (specfun.expint_ei(-c * params.r_m ** 2 - bc)
                    - specfun.expint_ei(-c * params.r_l ** 2 - bc))
            return (z1 - bc * math.exp(bc) * diff) / z1
        channel = ChannelModel.rayleigh()

    def ev_guard(z):
        if z == 0.0:
            return 1.0
        return ev(z)

    kind = (AggregateKind.DESIRED if case == "nearest-single-rayleigh-alpha2"
            else AggregateKind.TOTAL)
    scheme = Scheme.nojt() if case == "nearest-single-rayleigh-alpha2" else None
    return MgfFn(params=params, scheme=scheme, channel=channel, kind=kind,
                 _evaluator=ev_guard)


# ---- derivative-at-zero moment estimates ----


def safe_derivative_step(params, scheme, channel, kind):
    """Largest safe finite-difference step at z = 0, respecting the fade-MGF
    divergence radius of the channel (Rayleigh and Nakagami fade MGFs have a
    pole on the negative axis at the inverse peak single-point power)."""
    mean = moments.mean_power(params, scheme, channel, kind)
    h = 1e-6 / mean
    kp = params.k_s * params.p_s
    if channel.variant is ChannelVariant.RAYLEIGH:
        h = min(h, 0.5 * params.r_l ** params.alpha_s / kp)
    elif channel.variant is ChannelVariant.NAKAGAMI:
        h = min(h, 0.5 * (channel.m / channel.omega)
                * params.r_l ** params.alpha_s / kp)
    else:
        h = min(h, 500.0 * params.r_l ** params.alpha_s / (kp * channel.h))
    return h


def derivative_moment(fn, order=1, h=None):
    """Estimate E[X^order] (order 1 or 2) from finite differences of the MGF
    at 0, with one Richardson refinement."""
    if order not in (1, 2):
        raise ValueError(f"order must be 1 or 2, got {order!r}")
    if h is None:
        h = safe_derivative_step(fn.params, fn.scheme, fn.channel, fn.kind)
    h = float(h)

    if order == 1:
        def d(step):
            return (fn.eval(-step) - fn.eval(step)) / (2.0 * step)
    else:
        def d(step):
            return (fn.eval(step) - 2.0 + fn.eval(-step)) / (step * step)

    d1 = d(h)
    d2 = d(h / 2.0)
    return d2 + (d2 - d1) / 3.0
