"""Availability and stationary coverage of a monitored spherical shell."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence


@dataclass(frozen=True)
class ShellRegion:
    """Monitored altitude band [r1, r2] (m above the Earth's surface)."""

    r1: float
    r2: float

    def __post_init__(self):
        if not 0 < self.r1 < self.r2:
            raise ValueError("need 0 < r1 < r2")


@dataclass(frozen=True)
class LayerSet:
    """Constellation shell altitudes (m) sharing one work distance ``w``."""

    layer_radii: tuple[float, ...]
    w: float = 3000.0

    def __post_init__(self):
        radii = tuple(float(x) for x in self.layer_radii)
        if any(b <= a for a, b in zip(radii, radii[1:])):
            raise ValueError("layer radii must be strictly increasing")
        if self.w <= 0:
            raise ValueError("work distance must be positive")
        object.__setattr__(self, "layer_radii", radii)


def _subtract(interval: tuple[float, float], bands: Sequence[tuple[float, float]]):
    """Pieces of ``interval`` not covered by any band."""
    pieces = [interval]
    for lo, hi in bands:
        nxt = []
        for a, b in pieces:
            if hi <= a or lo >= b:
                nxt.append((a, b))
                continue
            if a < lo:
                nxt.append((a, lo))
            if hi < b:
                nxt.append((hi, b))
        pieces = nxt
    return pieces


def availability(layers: LayerSet, region: ShellRegion, apply_w_restriction: bool = False) -> float:
    """C_a = 1 - sum(gap^2) / (r2 - r1)^2.

    Targets are uniformly distributed over (perigee, apogee) pairs in the region;
    an orbit whose altitude range spans no layer is unobservable. The gaps are the
    intervals between consecutive layers and the region edges. With the work
    distance restriction, the band [h, h + w] above each layer is also covered,
    so only the uncovered pieces of each gap count.
    """
    span = region.r2 - region.r1
    inside = [h for h in layers.layer_radii if region.r1 <= h <= region.r2]
    edges = [region.r1, *inside, region.r2]
    bands = [(h, h + layers.w) for h in inside] if apply_w_restriction else []
    uncovered = 0.0
    for a, b in zip(edges, edges[1:]):
        for lo, hi in _subtract((a, b), bands):
            uncovered += (hi - lo) ** 2
    return min(1.0, max(0.0, 1.0 - uncovered / span ** 2))


def stationary_coverage(t: int, w: float, F: float, region: ShellRegion,
                        rho: float = 6_378_137.0) -> float:
    """Instantaneous sensed-volume fraction t w^3 tan^2(F/2) / (pi (R2^3 - R1^3)).

    R1, R2 are the region bounds measured from the Earth's centre.
    """
    if t < 0 or w < 0 or not 0 < F < math.pi:
        raise ValueError("invalid coverage inputs")
    R1, R2 = rho + region.r1, rho + region.r2
    return t * w ** 3 * math.tan(F / 2) ** 2 / (math.pi * (R2 ** 3 - R1 ** 3))
