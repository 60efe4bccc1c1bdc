"""Optical sensor parameterization."""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

BASELINE_WORK_DISTANCE = 3000.0
BASELINE_FOV = math.pi / 4


@dataclass(frozen=True)
class SensorSpec:
    """Square-array optical sensor.

    Attributes:
        F: full field of view (rad), measured face-to-face through the boresight
        alpha: pointing angle from the velocity direction toward local vertical (rad)
        w: work distance (m)
        gamma: pixels per side (the array is square, so gamma == delta)
        kappa: minimum pixels on target for a detection
        l: reference target diameter (m)
    """

    F: float = BASELINE_FOV
    alpha: float = math.pi / 2
    w: float = BASELINE_WORK_DISTANCE
    gamma: int = 2048
    kappa: float = 1.0
    l: float = 1.0

    def __post_init__(self):
        if not 0.0 < self.F < math.pi:
            raise ValueError(f"F must lie in (0, pi), got {self.F}")
        if not 0.0 <= self.alpha <= math.pi / 2:
            raise ValueError(f"alpha must lie in [0, pi/2], got {self.alpha}")
        if not self.w > 0:
            raise ValueError("work distance must be positive")
        if self.gamma < 1 or self.kappa < 1:
            raise ValueError("gamma and kappa must be >= 1")

    @property
    def delta(self) -> int:
        return self.gamma

    @property
    def reach_depth(self) -> float:
        """Boresight depth of the detection pyramid: w cos(F/2)."""
        return self.w * math.cos(self.F / 2)

    def with_work_distance(self, w: float, rule: str = "tangent") -> "SensorSpec":
        """Same sensor at a different work distance, FoV rescaled at fixed resolution."""
        return replace(self, w=w, F=fov_for_work_distance(w, rule=rule))


def work_distance(l: float, gamma: float, F: float, kappa: float = 1.0) -> float:
    """Range at which a target of size ``l`` covers ``kappa`` pixels: l gamma / (F sqrt(kappa))."""
    if l < 0 or gamma <= 0 or F <= 0 or kappa <= 0:
        raise ValueError("work_distance inputs must be positive")
    return l * gamma / (F * math.sqrt(kappa))


def scaled_fov(w: float, l_prime: float) -> float:
    """Full FoV keeping the half-extent l' = w sin(F/2) fixed."""
    if not 0 < l_prime < w:
        raise ValueError(f"need 0 < l_prime < w, got l_prime={l_prime}, w={w}")
    return 2.0 * math.asin(l_prime / w)


def scaled_fov_tangent(w: float, l_prime: float) -> float:
    """Full FoV keeping the half-width at range w, w tan(F/2), fixed."""
    if not (w > 0 and l_prime > 0):
        raise ValueError("w and l_prime must be positive")
    return 2.0 * math.atan(l_prime / w)


def fov_for_work_distance(w: float, rule: str = "tangent", base_w: float = BASELINE_WORK_DISTANCE,
                          base_F: float = BASELINE_FOV) -> float:
    """FoV at work distance ``w`` for a sensor whose baseline is (base_w, base_F).

    ``rule="sine"`` conserves w sin(F/2); ``rule="tangent"`` conserves w tan(F/2).
    The tangent rule is the one that reproduces the published work-distance tables.
    """
    if rule == "sine":
        return scaled_fov(w, base_w * math.sin(base_F / 2))
    if rule == "tangent":
        return scaled_fov_tangent(w, base_w * math.tan(base_F / 2))
    raise ValueError(f"unknown FoV scaling rule {rule!r}")


def rayleigh_limit(wavelength: float, aperture: float, range_: float) -> float:
    """Smallest resolvable size at ``range_``: 1.22 lambda / D * range."""
    if wavelength <= 0 or aperture <= 0 or range_ < 0:
        raise ValueError("rayleigh_limit inputs must be positive")
    return 1.22 * wavelength / aperture * range_
