"""Shared parameter space: network geometry, association schemes, fading models.

Everything downstream (moments, MGFs, simulation) consumes the immutable
value objects defined here.  All internal arithmetic is in linear units
(mW for powers, m for distances); dB and dBm appear only at configuration
boundaries.
"""

import enum
import math
from dataclasses import dataclass

# ---- unit conversions ----


def dbm_to_mw(x):
    """Convert a power from dBm to linear mW."""
    x = float(x)
    if not math.isfinite(x):
        raise ValueError(f"dBm value must be finite, got {x!r}")
    return 10.0 ** (x / 10.0)


def mw_to_dbm(x):
    """Convert a power from linear mW to dBm."""
    x = float(x)
    if not (math.isfinite(x) and x > 0.0):
        raise ValueError(f"mW value must be finite and positive, got {x!r}")
    return 10.0 * math.log10(x)


def eta_t(eta_db, alpha_s):
    """Distance ratio 10^(-eta/(10 alpha_s)) mapping a power threshold in dB
    to the radius scale factor of the threshold-based cooperative circle.

    Lies in (0, 1]; equals 1 when eta_db is 0.
    """
    eta_db = float(eta_db)
    alpha_s = float(alpha_s)
    if not (math.isfinite(eta_db) and eta_db >= 0.0):
        raise ValueError(f"eta_db must be >= 0, got {eta_db!r}")
    if not (math.isfinite(alpha_s) and alpha_s >= 2.0):
        raise ValueError(f"alpha_s must be >= 2, got {alpha_s!r}")
    return 10.0 ** (-eta_db / (10.0 * alpha_s))


# ---- domain types ----


@dataclass(frozen=True)
class NetworkParams:
    """Physical scenario on the annulus [r_l, r_m] around the receiver.

    lambda_b : transmitter density, 1/m^2
    r_l      : minimum transmitter distance, m
    r_m      : network radius, m
    k_s      : antenna/attenuation constant, dimensionless
    alpha_s  : path-loss exponent, >= 2
    p_s      : transmit power, linear mW
    n_0      : noise power, linear mW (0 means pure interference-limited)
    """

    lambda_b: float
    r_l: float
    r_m: float
    k_s: float
    alpha_s: float
    p_s: float
    n_0: float = 0.0

    def __post_init__(self):
        vals = (self.lambda_b, self.r_l, self.r_m, self.k_s, self.alpha_s,
                self.p_s, self.n_0)
        if not all(math.isfinite(float(v)) for v in vals):
            raise ValueError("all network parameters must be finite")
        if not (0.0 < self.r_l < self.r_m):
            raise ValueError(f"need 0 < r_l < r_m, got r_l={self.r_l}, r_m={self.r_m}")
        if self.lambda_b <= 0.0:
            raise ValueError(f"lambda_b must be positive, got {self.lambda_b}")
        if self.k_s <= 0.0:
            raise ValueError(f"k_s must be positive, got {self.k_s}")
        if self.p_s <= 0.0:
            raise ValueError(f"p_s must be positive, got {self.p_s}")
        if self.alpha_s < 2.0:
            raise ValueError(f"alpha_s must be >= 2, got {self.alpha_s}")
        if self.n_0 < 0.0:
            raise ValueError(f"n_0 must be >= 0, got {self.n_0}")

    @property
    def annulus_area(self):
        return math.pi * (self.r_m ** 2 - self.r_l ** 2)


class SchemeVariant(enum.Enum):
    NOJT = "nojt"
    TWO_NS = "2ns"
    CD = "cd"
    FPD = "fpd"


@dataclass(frozen=True)
class Scheme:
    """Association rule deciding which transmitters serve the receiver.

    nojt    : only the nearest transmitter
    two_ns  : the two nearest transmitters
    cd      : every transmitter within the fixed circle of radius r_0
    fpd     : every transmitter whose power is within eta_db of the nearest's
    """

    variant: SchemeVariant
    r_0: float = 0.0
    eta_db: float = 0.0

    @staticmethod
    def nojt():
        return Scheme(SchemeVariant.NOJT)

    @staticmethod
    def two_ns():
        return Scheme(SchemeVariant.TWO_NS)

    @staticmethod
    def cd(r_0):
        r_0 = float(r_0)
        if not (math.isfinite(r_0) and r_0 > 0.0):
            raise ValueError(f"cd radius must be positive, got {r_0!r}")
        return Scheme(SchemeVariant.CD, r_0=r_0)

    @staticmethod
    def fpd(eta_db):
        eta_db = float(eta_db)
        if not (math.isfinite(eta_db) and eta_db >= 0.0):
            raise ValueError(f"fpd threshold must be >= 0 dB, got {eta_db!r}")
        return Scheme(SchemeVariant.FPD, eta_db=eta_db)

    @property
    def key(self):
        """Short lowercase tag used in file names and result keys."""
        return self.variant.value

    def validate_against(self, params):
        """Check parameter-dependent invariants (cd circle inside the annulus)."""
        if self.variant is SchemeVariant.CD and not (params.r_l < self.r_0 < params.r_m):
            raise ValueError(
                f"cd radius must satisfy r_l < r_0 < r_m, got r_0={self.r_0} "
                f"with r_l={params.r_l}, r_m={params.r_m}")

    def eta_ratio(self, params):
        """Radius scale factor of the threshold circle (1.0 for non-fpd schemes)."""
        if self.variant is SchemeVariant.FPD:
            return eta_t(self.eta_db, params.alpha_s)
        return 1.0


class ChannelVariant(enum.Enum):
    CONSTANT = "constant"
    RAYLEIGH = "rayleigh"
    NAKAGAMI = "nakagami"


@dataclass(frozen=True)
class ChannelModel:
    """Power-domain fading law of a single link.

    constant : deterministic gain h
    rayleigh : unit-mean exponential power fade
    nakagami : gamma power fade with shape m and mean omega
    """

    variant: ChannelVariant
    h: float = 1.0
    m: float = 1.0
    omega: float = 1.0

    @staticmethod
    def constant(h):
        h = float(h)
        if not (math.isfinite(h) and h > 0.0):
            raise ValueError(f"constant fade must be positive, got {h!r}")
        return ChannelModel(ChannelVariant.CONSTANT, h=h)

    @staticmethod
    def rayleigh():
        return ChannelModel(ChannelVariant.RAYLEIGH)

    @staticmethod
    def nakagami(m, omega):
        m = float(m)
        omega = float(omega)
        if not (math.isfinite(m) and m >= 0.5):
            raise ValueError(f"nakagami shape must be >= 1/2, got {m!r}")
        if not (math.isfinite(omega) and omega > 0.0):
            raise ValueError(f"nakagami mean must be positive, got {omega!r}")
        return ChannelModel(ChannelVariant.NAKAGAMI, m=m, omega=omega)

    @property
    def key(self):
        return self.variant.value

    @property
    def mean_fade(self):
        """E[h] of the power fade."""
        if self.variant is ChannelVariant.CONSTANT:
            return self.h
        if self.variant is ChannelVariant.RAYLEIGH:
            return 1.0
        return self.omega

    @property
    def second_fade(self):
        """E[h^2] of the power fade."""
        if self.variant is ChannelVariant.CONSTANT:
            return self.h * self.h
        if self.variant is ChannelVariant.RAYLEIGH:
            return 2.0
        return (self.m + 1.0) * self.omega ** 2 / self.m


class AggregateKind(enum.Enum):
    """Which power aggregate a statistic refers to.

    DESIRED means the sum over serving transmitters, INTERFERENCE the sum
    over all others.  TOTAL (their sum over the whole annulus) is only
    meaningful to the MGF engine.
    """

    DESIRED = "desired"
    INTERFERENCE = "interference"
    TOTAL = "total"
