"""
Repeat-ground-track revisit model adapted to a single LEO observer, used as
a cross-check on the Poisson engine.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from ssa_revisit.orbital_mechanics import CONSTANTS, PhysicalConstants, kepler_period

SIDEREAL_DAY = 86164.0905
DAY = 86400.0


@dataclass(frozen=True)
class XieDecomposition:
    """N = K + m/M revolutions per reference day."""

    N: float
    K: int
    m: int
    M: int

    @property
    def resonant(self) -> bool:
        return self.m == 0


def xie_decompose(T_orbit: float, tol: float = 1e-6, M_max: int = 1000,
                  T_ref: float = DAY) -> XieDecomposition:
    """Split N = T_ref / T_orbit into its integer part and a best rational fraction.

    The fraction is the best approximation with denominator <= ``M_max`` (continued
    fractions). A fractional part below ``tol`` is reported as resonant (m=0, M=1).
    """
    if T_orbit <= 0:
        raise ValueError("orbital period must be positive")
    N = T_ref / T_orbit
    K = math.floor(N)
    frac = N - K
    if frac < tol:
        return XieDecomposition(N, K, 0, 1)
    if 1.0 - frac < tol:
        return XieDecomposition(N, K + 1, 0, 1)
    q = Fraction(frac).limit_denominator(M_max)
    if q.numerator == 0:
        return XieDecomposition(N, K, 0, 1)
    if q.numerator == q.denominator:
        return XieDecomposition(N, K + 1, 0, 1)
    return XieDecomposition(N, K, q.numerator, q.denominator)


def xie_min_period(decomp: XieDecomposition, D: float) -> int:
    """Minimum whole number of days for full longitude coverage with scan width D (deg)."""
    if decomp.K < 1 or D <= 0:
        raise ValueError("need K >= 1 and D > 0")
    value = 360.0 / (decomp.K * D) - decomp.m / decomp.K
    # guard against 0.999999... from floating point at exact-coverage boundaries
    return max(1, math.ceil(round(value, 12)))


def xie_adaptive_leo(delta_r: float, h1: float, F: float,
                     constants: PhysicalConstants = CONSTANTS) -> float:
    """Single-satellite revisit (days) of the adapted model.

    The scan width seen by a satellite at radius rho + h1 is 2 delta_r tan(F/2)
    of arc length, i.e. D = 2 delta_r tan(F/2) / (rho + h1) rad. Both the
    ascending and descending passes sweep, so M* = 2 pi / (2 D) orbits.
    """
    if delta_r <= 0 or h1 <= 0 or not 0 < F < math.pi:
        raise ValueError("delta_r, h1 and F must be positive")
    r = constants.rho + h1
    D = 2.0 * delta_r * math.tan(F / 2) / r
    orbits = 2.0 * math.pi / (2.0 * D)
    return orbits * float(kepler_period(r, constants)) / DAY


def xie_star(adaptive_result: float) -> float:
    """Adapted model with the two-sided detection factor: half the adaptive value."""
    return adaptive_result / 2.0
