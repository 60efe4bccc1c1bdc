"""Walker-Delta constellation geometry and presets."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ssa_revisit.orbital_mechanics import CONSTANTS, TWO_PI, PhysicalConstants, mean_motion


@dataclass(frozen=True)
class ConstellationSpec:
    """Walker-Delta i:t/p/f shell at altitude h0 (SI units)."""

    i: float
    t: int
    p: int
    f: int = 1
    h0: float = 550e3

    def __post_init__(self):
        if self.p < 1 or self.t < self.p or self.t % self.p:
            raise ValueError(f"invalid Walker pattern t={self.t}, p={self.p}")
        if self.p == 1:
            # phasing is meaningless with a single plane
            object.__setattr__(self, "f", 0)
        if not 0 <= self.f < self.p:
            raise ValueError(f"phasing f={self.f} must lie in [0, p)")
        if not 0.0 <= self.i <= math.pi:
            raise ValueError("inclination outside [0, pi]")
        if not self.h0 > 0:
            raise ValueError("shell altitude must be positive")

    @property
    def per_plane(self) -> int:
        return self.t // self.p

    def radius(self, constants: PhysicalConstants = CONSTANTS) -> float:
        return constants.rho + self.h0


@dataclass(frozen=True)
class SatelliteState:
    position: np.ndarray
    velocity: np.ndarray
    plane_index: int
    slot_index: int


_PRESETS = {
    "starlink_g1": ConstellationSpec(i=math.radians(53.0), t=1584, p=72, f=1, h0=550e3),
    "starlink_g1_p22": ConstellationSpec(i=math.radians(53.0), t=1584, p=22, f=1, h0=550e3),
    "custom_polar": ConstellationSpec(i=math.radians(90.0), t=288, p=8, f=1, h0=550e3),
}


def presets() -> dict[str, ConstellationSpec]:
    return dict(_PRESETS)


def preset(name: str) -> ConstellationSpec:
    try:
        return _PRESETS[name]
    except KeyError:
        raise KeyError(f"unknown constellation preset {name!r}; known: {sorted(_PRESETS)}") from None


def plane_offsets(spec: ConstellationSpec) -> np.ndarray:
    """RAAN of each plane, k * 2pi / p."""
    return np.arange(spec.p) * (TWO_PI / spec.p)


def in_plane_spacing(spec: ConstellationSpec, r_eval: float) -> float:
    """Arc between neighbouring satellites of one plane, evaluated at radius ``r_eval``."""
    return TWO_PI * r_eval * spec.p / spec.t


def walker_star_to_delta(t: int, p: int, i: float = math.pi / 2, h0: float = 550e3) -> ConstellationSpec:
    """Polar star pattern with p planes as the equivalent delta pattern with 2p planes."""
    return ConstellationSpec(i=i, t=t, p=2 * p, f=0, h0=h0)


def walker_delta_to_star(spec: ConstellationSpec) -> tuple[int, int]:
    """Inverse of ``walker_star_to_delta``: returns (t, p) of the star pattern."""
    if spec.p % 2:
        raise ValueError("a star pattern needs an even number of delta planes")
    return spec.t, spec.p // 2


def _rotation(raan: float, inc: float) -> np.ndarray:
    cO, sO = math.cos(raan), math.sin(raan)
    ci, si = math.cos(inc), math.sin(inc)
    # columns: node direction, in-plane normal-to-node direction
    return np.array([[cO, -sO * ci], [sO, cO * ci], [0.0, si]])


def satellite_anomalies(spec: ConstellationSpec, time=0.0, constants: PhysicalConstants = CONSTANTS):
    """Argument of latitude of every satellite, shape (p, t/p) (or (..., p, t/p) for array time)."""
    k = np.arange(spec.p)[:, None]
    j = np.arange(spec.per_plane)[None, :]
    n = float(mean_motion(spec.radius(constants), constants))
    base = TWO_PI * j * spec.p / spec.t + TWO_PI * spec.f * k / spec.t
    time = np.asarray(time, dtype=float)
    return base + n * time[..., None, None]


def constellation_positions(spec: ConstellationSpec, time, constants: PhysicalConstants = CONSTANTS):
    """ECI positions of all satellites, shape (..., p, t/p, 3)."""
    r = spec.radius(constants)
    u = satellite_anomalies(spec, time, constants)
    raan = plane_offsets(spec)[:, None]
    cO, sO = np.cos(raan), np.sin(raan)
    ci, si = math.cos(spec.i), math.sin(spec.i)
    cu, su = np.cos(u), np.sin(u)
    x = r * (cO * cu - sO * ci * su)
    y = r * (sO * cu + cO * ci * su)
    z = r * (si * su) * np.ones_like(cO)
    return np.stack([x, y, z], axis=-1)


def constellation_velocities(spec: ConstellationSpec, time, constants: PhysicalConstants = CONSTANTS):
    r = spec.radius(constants)
    v = math.sqrt(constants.mu / r)
    u = satellite_anomalies(spec, time, constants)
    raan = plane_offsets(spec)[:, None]
    cO, sO = np.cos(raan), np.sin(raan)
    ci, si = math.cos(spec.i), math.sin(spec.i)
    cu, su = np.cos(u), np.sin(u)
    vx = v * (-cO * su - sO * ci * cu)
    vy = v * (-sO * su + cO * ci * cu)
    vz = v * (si * cu) * np.ones_like(cO)
    return np.stack([vx, vy, vz], axis=-1)


def satellite_state(spec: ConstellationSpec, plane: int, slot: int, time: float = 0.0,
                    constants: PhysicalConstants = CONSTANTS) -> SatelliteState:
    """State of satellite ``slot`` in plane ``plane``.

    Epoch convention: plane 0, slot 0 sits at its ascending node (+x axis) at t = 0.
    """
    if not 0 <= plane < spec.p:
        raise IndexError(f"plane {plane} out of range for p={spec.p}")
    if not 0 <= slot < spec.per_plane:
        raise IndexError(f"slot {slot} out of range for {spec.per_plane} satellites per plane")
    r = spec.radius(constants)
    v = math.sqrt(constants.mu / r)
    u = (TWO_PI * slot * spec.p / spec.t + TWO_PI * spec.f * plane / spec.t
         + float(mean_motion(r, constants)) * time)
    rot = _rotation(plane * TWO_PI / spec.p, spec.i)
    pos = rot @ np.array([r * math.cos(u), r * math.sin(u)])
    vel = rot @ np.array([-v * math.sin(u), v * math.cos(u)])
    return SatelliteState(position=pos, velocity=vel, plane_index=plane, slot_index=slot)
