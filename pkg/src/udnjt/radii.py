"""Boundary-radius distributions that split transmitters into the serving set
and the interfering set.

Two layers live here.  ``RadiusDist`` is the user-facing distribution of the
split radius (textbook densities on (0, inf), plus samplers that work either
standalone or on a realized point set).  ``BoundaryLaw`` is the engine layer:
the same law conditioned on the annulus [r_l, r_m] and renormalized, with the
clipped moments and quadrature nodes that the moment and MGF modules
integrate against.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import specfun
from .model import Scheme, SchemeVariant

# ---- user-facing distributions ----


@dataclass(frozen=True)
class RadiusDist:
    """Distribution of the radius separating serving from interfering
    transmitters under one association scheme."""

    scheme: Scheme
    params: object

    def __post_init__(self):
        self.scheme.validate_against(self.params)

    @property
    def _c(self):
        return math.pi * self.params.lambda_b

    def pdf(self, r):
        """Density of the split radius on (0, inf).

        The cd scheme has a point mass at r_0, so density queries are
        rejected for it.
        """
        v = self.scheme.variant
        if v is SchemeVariant.CD:
            raise ValueError("cd split radius is deterministic; it has no density")
        r_arr = np.asarray(r, dtype=float)
        if np.any(r_arr <= 0.0):
            raise ValueError("radius must be positive")
        c = self._c
        if v is SchemeVariant.NOJT:
            out = 2.0 * c * r_arr * np.exp(-c * r_arr ** 2)
        elif v is SchemeVariant.TWO_NS:
            out = 2.0 * c * c * r_arr ** 3 * np.exp(-c * r_arr ** 2)
        else:  # fpd: nearest-radius law stretched by the threshold ratio
            et = self.scheme.eta_ratio(self.params)
            ce = c * et * et
            out = 2.0 * ce * r_arr * np.exp(-ce * r_arr ** 2)
        return float(out) if np.ndim(r) == 0 else out

    def cdf(self, r):
        """Distribution function matching ``pdf`` (cd gives the step at r_0)."""
        r_arr = np.asarray(r, dtype=float)
        v = self.scheme.variant
        c = self._c
        if v is SchemeVariant.CD:
            out = np.where(r_arr >= self.scheme.r_0, 1.0, 0.0)
        elif v is SchemeVariant.NOJT:
            out = 1.0 - np.exp(-c * r_arr ** 2)
        elif v is SchemeVariant.TWO_NS:
            t = c * r_arr ** 2
            out = 1.0 - (1.0 + t) * np.exp(-t)
        else:
            et = self.scheme.eta_ratio(self.params)
            t = c * (et * r_arr) ** 2
            out = 1.0 - np.exp(-t)
        return float(out) if np.ndim(r) == 0 else out

    def sample(self, rng, n=None, realization=None):
        """Draw split radii.

        With ``realization`` given, the radius is the order statistic of the
        realized point set (nearest, second nearest, nearest over the
        threshold ratio, or the fixed circle).  Standalone draws invert the
        exact distribution function instead.
        """
        v = self.scheme.variant
        if realization is not None:
            radii = np.asarray(realization.radii, dtype=float)
            if v is SchemeVariant.CD:
                return self.scheme.r_0
            if radii.size == 0:
                raise ValueError("realization has no points")
            if v is SchemeVariant.NOJT:
                return float(radii.min())
            if v is SchemeVariant.TWO_NS:
                if radii.size < 2:
                    raise ValueError("second-nearest radius needs at least 2 points")
                return float(np.partition(radii, 1)[1])
            et = self.scheme.eta_ratio(self.params)
            return float(radii.min()) / et
        size = 1 if n is None else int(n)
        c = self._c
        if v is SchemeVariant.CD:
            out = np.full(size, self.scheme.r_0)
        elif v is SchemeVariant.TWO_NS:
            # sum of two unit exponentials in the squared-radius scale
            e = rng.exponential(1.0, size=(2, size)).sum(axis=0)
            out = np.sqrt(e / c)
        else:
            u = rng.random(size)
            out = np.sqrt(-np.log(u) / c)
            if v is SchemeVariant.FPD:
                out = out / self.scheme.eta_ratio(self.params)
        return float(out[0]) if n is None else out


# ---- annulus-conditioned law engine ----


class BoundaryLaw:
    """Split-radius law conditioned on the annulus and renormalized.

    The engine integrates statistics of the clipped split radius
    m = min(r, r_m).  Everything is expressed in the area scale
    t = pi * lambda_b * r^2, where the nearest-radius density is e^(-t) and
    the second-nearest density is t e^(-t), both restricted to
    [a, b] = [pi lam r_l^2, pi lam r_m^2].  The threshold scheme keeps the
    nearest-radius law but rescales the radius by 1/eta_ratio, clipping at
    r_m; the fixed-circle scheme is a point mass.
    """

    def __init__(self, params, scheme):
        scheme.validate_against(params)
        self.params = params
        self.scheme = scheme
        c = math.pi * params.lambda_b
        self.c = c
        self.a = c * params.r_l ** 2
        self.b = c * params.r_m ** 2
        v = scheme.variant
        self.eta_ratio = scheme.eta_ratio(params)
        if v is SchemeVariant.NOJT:
            self.kind = "nearest"
        elif v is SchemeVariant.TWO_NS:
            self.kind = "second"
        elif v is SchemeVariant.FPD:
            self.kind = "nearest" if self.eta_ratio == 1.0 else "scaled"
        else:
            self.kind = "fixed"
        if self.kind == "second":
            self.z_norm = (1.0 + self.a) * math.exp(-self.a) - (1.0 + self.b) * math.exp(-self.b)
        elif self.kind == "fixed":
            self.z_norm = 1.0
        else:
            self.z_norm = math.exp(-self.a) - math.exp(-self.b)
        # area-scale coordinate of the clip point r = eta_ratio * r_m
        et = self.eta_ratio
        self.t_clip = min(max(c * (et * params.r_m) ** 2, self.a), self.b)
        self._nodes_cache = {}

    # -- closed moments of the clipped radius --

    def clipped_power_moment(self, p):
        """E[min(r, r_m)^p]."""
        p = float(p)
        rm = self.params.r_m
        if self.kind == "fixed":
            return self.scheme.r_0 ** p
        c, a, b = self.c, self.a, self.b
        if self.kind == "nearest":
            return c ** (-p / 2.0) * specfun.inc_gamma((2.0 + p) / 2.0, a, b) / self.z_norm
        if self.kind == "second":
            return c ** (-p / 2.0) * specfun.inc_gamma((4.0 + p) / 2.0, a, b) / self.z_norm
        et = self.eta_ratio
        be = self.t_clip
        main = 0.0 if be <= a else (et ** (-p) * c ** (-p / 2.0)
                                    * specfun.inc_gamma((2.0 + p) / 2.0, a, be))
        tail = rm ** p * (math.exp(-be) - math.exp(-b))
        return (main + tail) / self.z_norm

    def clipped_log_moment(self):
        """E[ln min(r, r_m)]."""
        pr = self.params
        if self.kind == "fixed":
            return math.log(self.scheme.r_0)
        a, b, z = self.a, self.b, self.z_norm
        if self.kind == "nearest":
            val = (math.log(pr.r_l ** 2) * math.exp(-a)
                   - math.log(pr.r_m ** 2) * math.exp(-b)
                   + specfun.inc_gamma(0.0, a, b))
            return val / (2.0 * z)
        if self.kind == "scaled":
            et = self.eta_ratio
            be = self.t_clip
            p_over = (math.exp(-be) - math.exp(-b)) / z
            if be <= a:
                return math.log(pr.r_m)
            part = (math.log(pr.r_l ** 2) * math.exp(-a)
                    - math.log((et * pr.r_m) ** 2) * math.exp(-be)
                    + specfun.inc_gamma(0.0, a, be)) / (2.0 * z)
            return part - math.log(et) * (1.0 - p_over) + math.log(pr.r_m) * p_over
        # second-nearest log moment has no elementary form; integrate it
        return self.expect(np.log)

    def expect(self, g, spec=None):
        """E[g(min(r, r_m))] by adaptive quadrature over the law."""
        if self.kind == "fixed":
            return float(g(self.scheme.r_0))
        spec = spec or specfun.QuadratureSpec(1e-12, 1e-10, 300)
        c, z = self.c, self.z_norm
        et = self.eta_ratio
        rm = self.params.r_m

        def integrand(t):
            if self.kind == "second":
                w = t * math.exp(-t) / z
                r = math.sqrt(t / c)
            else:
                w = math.exp(-t) / z
                r = math.sqrt(t / c) / et
            return w * g(min(r, rm))

        if self.kind == "scaled" and self.a < self.t_clip < self.b:
            return (specfun.integrate(integrand, self.a, self.t_clip, spec)
                    + specfun.integrate(integrand, self.t_clip, self.b, spec))
        return specfun.integrate(integrand, self.a, self.b, spec)

    # -- quadrature nodes for vectorized mixture integrals --

    def nodes(self, n_panels=96, n_gl=24):
        """Gauss-Legendre mixture nodes (m_i, w_i) with m_i the clipped split
        radius and w_i probability weights summing to 1.

        Panels are geometric in the area scale with an edge pinned at the
        clip point, so integrands with a kink there stay panelwise smooth.
        """
        key = (n_panels, n_gl)
        cached = self._nodes_cache.get(key)
        if cached is not None:
            return cached
        if self.kind == "fixed":
            out = (np.array([self.scheme.r_0]), np.array([1.0]))
            self._nodes_cache[key] = out
            return out
        a, b, c = self.a, self.b, self.c
        hi = min(b, a + 45.0)  # density tail beyond is below double precision
        edges = np.geomspace(a, hi, n_panels + 1)
        if self.kind == "scaled" and a < self.t_clip < hi:
            edges = np.unique(np.concatenate([edges, [self.t_clip]]))
        x_gl, w_gl = np.polynomial.legendre.leggauss(n_gl)
        mid = 0.5 * (edges[1:] + edges[:-1])
        half = 0.5 * (edges[1:] - edges[:-1])
        t = (mid[:, None] + half[:, None] * x_gl[None, :]).ravel()
        w = (half[:, None] * w_gl[None, :]).ravel()
        if self.kind == "second":
            w = w * t * np.exp(-t)
        else:
            w = w * np.exp(-t)
        w = w / w.sum()  # exact law mass; quadrature defect is ~1e-15
        r = np.sqrt(t / c) / self.eta_ratio
        m = np.minimum(r, self.params.r_m)
        out = (m, w)
        self._nodes_cache[key] = out
        return out

    # -- closed tail functionals --

    def interference_empty_prob(self):
        """P(no transmitter beyond the clipped split radius),
        i.e. E[exp(-pi lam (r_m^2 - m^2))]."""
        a, b = self.a, self.b
        if self.kind == "fixed":
            return math.exp(-(b - self.c * self.scheme.r_0 ** 2))
        z = self.z_norm
        if self.kind == "nearest":
            return math.exp(-b) * (b - a) / z
        if self.kind == "second":
            return math.exp(-b) * (b * b - a * a) / (2.0 * z)
        et = self.eta_ratio
        be = self.t_clip
        kappa = 1.0 / (et * et) - 1.0
        if kappa < 1e-12:
            head = math.exp(-b) * (be - a)
        else:
            head = math.exp(-b) * (math.exp(kappa * be) - math.exp(kappa * a)) / kappa
        tail = math.exp(-be) - math.exp(-b)
        return (head + tail) / z


def boundary_law(params, scheme):
    """Build the annulus-conditioned law for a scheme."""
    return BoundaryLaw(params, scheme)
