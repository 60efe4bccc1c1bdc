"""
Two-body relations and the characteristic time scales of a target/shell pairing.

Units: meters, seconds, radians throughout.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

# Distinguished "never" value for periods (co-orbital beat, zero detection rate).
# Consumers branch on it with ``is_infinite_period`` rather than relying on inf arithmetic.
INFINITE_PERIOD = math.inf

TWO_PI = 2.0 * math.pi


def is_infinite_period(value: float) -> bool:
    return math.isinf(value)


@dataclass(frozen=True)
class PhysicalConstants:
    """Earth/gravity constants.

    ``M`` defaults to the value that makes ``G * M`` equal to the standard
    gravitational parameter 3.986004418e14 m^3/s^2.
    """

    G: float = 6.674e-11
    M: float = 3.986004418e14 / 6.674e-11
    rho: float = 6_378_137.0  # equatorial radius, m
    J2: float = 1.083e-3
    mu: float = field(init=False)

    def __post_init__(self):
        for name in ("G", "M", "rho", "J2"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be strictly positive")
        object.__setattr__(self, "mu", self.G * self.M)


CONSTANTS = PhysicalConstants()


@dataclass(frozen=True)
class OrbitGeometry:
    """Bound elliptical orbit of a monitored object.

    Attributes:
        a: semi-major axis (m)
        c: linear eccentricity, centre-to-focus distance (m)
        i: inclination (rad)
        raan: right ascension of the ascending node (rad), stored in [0, 2pi)
    """

    a: float
    c: float = 0.0
    i: float = 0.0
    raan: float = 0.0
    rho: float = CONSTANTS.rho

    def __post_init__(self):
        if not (0.0 <= self.c < self.a):
            raise ValueError(f"need 0 <= c < a, got a={self.a}, c={self.c}")
        if not (0.0 <= self.i <= math.pi):
            raise ValueError(f"inclination {self.i} outside [0, pi]")
        if self.a - self.c <= self.rho:
            raise ValueError("perigee intersects the Earth")
        object.__setattr__(self, "raan", self.raan % TWO_PI)

    @classmethod
    def from_altitudes(cls, perigee_alt: float, apogee_alt: float, i: float = 0.0,
                       raan: float = 0.0, rho: float = CONSTANTS.rho) -> "OrbitGeometry":
        """Build from perigee/apogee altitudes above the Earth radius (m)."""
        if apogee_alt < perigee_alt:
            raise ValueError("apogee altitude below perigee altitude")
        rp = rho + perigee_alt
        ra = rho + apogee_alt
        return cls(a=0.5 * (rp + ra), c=0.5 * (ra - rp), i=i, raan=raan, rho=rho)

    @property
    def e(self) -> float:
        return self.c / self.a

    @property
    def perigee(self) -> float:
        return self.a - self.c

    @property
    def apogee(self) -> float:
        return self.a + self.c


def _check_positive(**values):
    for name, v in values.items():
        if not v > 0:
            raise ValueError(f"{name} must be positive, got {v}")


def kepler_period(a, constants: PhysicalConstants = CONSTANTS):
    """Orbital period 2*pi*sqrt(a^3/mu) in seconds."""
    if np.any(np.asarray(a) <= 0):
        raise ValueError("semi-major axis must be positive")
    return TWO_PI * np.sqrt(np.asarray(a, dtype=float) ** 3 / constants.mu)


def mean_motion(a, constants: PhysicalConstants = CONSTANTS):
    """Mean angular rate sqrt(mu/a^3) in rad/s."""
    if np.any(np.asarray(a) <= 0):
        raise ValueError("semi-major axis must be positive")
    return np.sqrt(constants.mu / np.asarray(a, dtype=float) ** 3)


def ellipse_radius(orbit: OrbitGeometry, theta):
    """Focal radius at true anomaly ``theta``: (a^2 - c^2) / (a + c cos theta)."""
    a, c = orbit.a, orbit.c
    return (a * a - c * c) / (a + c * np.cos(theta))


def beat_period(h0: float, a_target: float, constants: PhysicalConstants = CONSTANTS,
                linearized: bool = False) -> float:
    """Time for the in-plane phase between a shell satellite and the target to slip by 2pi.

    By default the exact relation 1/T1 = |1/T0 - 1/T0U| is used. With
    ``linearized=True`` the first-order form T1 = (2/3) (rho+h0)/|dr| T0 is
    returned instead (dw/w = -3/2 da/a).

    Returns ``INFINITE_PERIOD`` for a co-orbital target.
    """
    r0 = constants.rho + h0
    dr = a_target - r0
    if dr == 0.0:
        return INFINITE_PERIOD
    t0 = float(kepler_period(r0, constants))
    if linearized:
        return t0 * (2.0 / 3.0) * r0 / abs(dr)
    t0u = float(kepler_period(a_target, constants))
    return 1.0 / abs(1.0 / t0 - 1.0 / t0u)


def equivalent_distribution_period(T1: float, p: int, t: int) -> float:
    """T2 = T1 p / t: with t/p satellites per plane the pattern repeats after 2pi p/t of slip."""
    _check_positive(p=p, t=t)
    if is_infinite_period(T1):
        return INFINITE_PERIOD
    return T1 * p / t


def scanning_period(T0: float, p: int, t: int) -> float:
    """T3 = T0 p / (2 t)."""
    _check_positive(p=p, t=t)
    if p > t:
        raise ValueError("Walker constraint p <= t violated")
    return T0 * p / (2.0 * t)


def j2_differential_precession(h0: float, i: float, delta_r: float,
                               constants: PhysicalConstants = CONSTANTS) -> float:
    """Differential J2 nodal precession rate between radii rho+h0 and rho+h0+delta_r (rad/s).

    dOmega = -(21/4) J2 rho^2 / (rho+h0)^3 * omega * cos(i) * delta_r
    """
    r0 = constants.rho + h0
    omega = float(mean_motion(r0, constants))
    return -(21.0 / 4.0) * constants.J2 * constants.rho ** 2 / r0 ** 3 * omega * math.cos(i) * delta_r


def beat_angular_rate(h0: float, delta_r: float, constants: PhysicalConstants = CONSTANTS) -> float:
    """First-order in-plane beat rate -(3/2) (delta_r/(rho+h0)) omega, rad/s."""
    r0 = constants.rho + h0
    return -1.5 * delta_r / r0 * float(mean_motion(r0, constants))


# alias using the name the rest of the package expects
j2_precession_rate = j2_differential_precession
