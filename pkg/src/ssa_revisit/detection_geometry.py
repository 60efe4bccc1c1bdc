"""
Relative motion at an orbital alignment and the probability that the target
crosses a satellite's pyramidal field of view.

Two frames are used:

* sensor frame: x along the satellite velocity, y cross-track, z radial (up).
  The boresight is tilted from x toward z by the pointing angle alpha.
* crossing frame: x cross-track (normal to the satellite orbital plane),
  y along the satellite velocity, z radial. Satellites of one plane are spaced
  by ``d`` along y, so the detection probability is a duty cycle in y.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ssa_revisit.orbital_mechanics import CONSTANTS, OrbitGeometry, PhysicalConstants

DEGENERATE_U1 = 1e-9  # relative to v0
_DENOM_TOL = 1e-12

# (m, n) order of the four pyramid edges
CORNER_SIGNS = ((1, 1), (1, -1), (-1, 1), (-1, -1))

BOUNDED, UNBOUNDED, EMPTY = 0, 1, 2


@dataclass(frozen=True)
class AlignmentGeometry:
    """Kinematics of the target at the moment it crosses a satellite orbital plane.

    Speeds ``n_v`` and ``m_v`` are in units of the shell circular speed ``v0``.
    """

    r: float
    delta_r: float
    n_v: float
    m_v: float
    cos_angle: float
    v_radial: float = 0.0
    v0: float = 0.0

    def __post_init__(self):
        if not -1.0 - 1e-12 <= self.cos_angle <= 1.0 + 1e-12:
            raise ValueError("cos_angle outside [-1, 1]")

    @classmethod
    def circular(cls, r: float, h0: float, cos_angle: float,
                 constants: PhysicalConstants = CONSTANTS) -> "AlignmentGeometry":
        r0 = constants.rho + h0
        return cls(r=r, delta_r=r - r0, n_v=math.sqrt(r0 / r), m_v=r / r0,
                   cos_angle=cos_angle, v0=math.sqrt(constants.mu / r0))

    @classmethod
    def on_orbit(cls, orbit: OrbitGeometry, r: float, h0: float, cos_angle: float,
                 constants: PhysicalConstants = CONSTANTS) -> "AlignmentGeometry":
        r0 = constants.rho + h0
        v0 = math.sqrt(constants.mu / r0)
        vt = float(transverse_speed(orbit, r, constants))
        return cls(r=r, delta_r=r - r0, n_v=vt / v0, m_v=r / r0, cos_angle=cos_angle,
                   v_radial=float(radial_speed(orbit, r, constants)), v0=v0)


@dataclass(frozen=True)
class CrossingResult:
    u1: float
    u2: float
    y_min: float
    y_max: float
    P: float


def vis_viva_speed(a, r, constants: PhysicalConstants = CONSTANTS):
    """Orbital speed sqrt(mu (2/r - 1/a))."""
    r = np.asarray(r, dtype=float)
    if np.any(r <= 0):
        raise ValueError("radius must be positive")
    inner = 2.0 / r - 1.0 / a
    if np.any(inner < 0):
        raise ValueError("radius beyond the bound-orbit limit 2a")
    return np.sqrt(constants.mu * inner)


def transverse_speed(orbit: OrbitGeometry, r, constants: PhysicalConstants = CONSTANTS):
    """Velocity component normal to the radius vector: h / r."""
    r = np.asarray(r, dtype=float)
    tol = 1e-9 * orbit.a
    if np.any(r < orbit.perigee - tol) or np.any(r > orbit.apogee + tol):
        raise ValueError("radius outside the orbit's apsis range")
    a, c = orbit.a, orbit.c
    return math.sqrt(a * a - c * c) / r * math.sqrt(constants.mu / a)


def radial_speed(orbit: OrbitGeometry, r, constants: PhysicalConstants = CONSTANTS):
    """Magnitude of the radial velocity component, sqrt(v^2 - v_t^2)."""
    v = vis_viva_speed(orbit.a, r, constants)
    vt = transverse_speed(orbit, r, constants)
    return np.sqrt(np.maximum(v * v - vt * vt, 0.0))


def relative_speeds(n_v, m_v, cos_angle, v0=1.0):
    """Perpendicular and parallel relative speed components (u1, u2).

    With v1' = n_v v0 (sin g, cos g) and v2 = m_v v0 (0, 1):
        u1 = |v1' - cos g * v2|,  u2 = |v2 - cos g * v2|
    Works elementwise on arrays.
    """
    c = np.clip(cos_angle, -1.0, 1.0)
    s2 = 1.0 - c * c
    u1 = v0 * np.sqrt(n_v * n_v * s2 + (n_v - m_v) ** 2 * c * c)
    u2 = v0 * m_v * (1.0 - c)
    return u1, u2


def relative_velocity_components(geom: AlignmentGeometry):
    """Returns (u1, u2, degenerate) for one alignment."""
    v0 = geom.v0 if geom.v0 > 0 else 1.0
    u1, u2 = relative_speeds(geom.n_v, geom.m_v, geom.cos_angle, v0)
    return float(u1), float(u2), bool(u1 < DEGENERATE_U1 * v0)


def pyramid_corner_dirs(alpha: float, F: float) -> np.ndarray:
    """Unit vectors along the four pyramid edges in the sensor frame, shape (4, 3).

    Edge (m, n) is proportional to (cos(alpha + n F/2), sin(m F/2), sin(alpha + n F/2)) / cos(F/2).
    """
    half = F / 2
    rows = []
    for m, n in CORNER_SIGNS:
        rows.append([math.cos(alpha + n * half), math.sin(m * half), math.sin(alpha + n * half)])
    j = np.array(rows) / math.cos(half)
    return j / np.linalg.norm(j, axis=1, keepdims=True)


def boresight(alpha: float) -> np.ndarray:
    return np.array([math.cos(alpha), 0.0, math.sin(alpha)])


def to_crossing_frame(v: np.ndarray) -> np.ndarray:
    """Sensor-frame vectors (..., 3) -> crossing frame (swap the two horizontal axes)."""
    v = np.asarray(v, dtype=float)
    return v[..., [1, 0, 2]]


def pyramid_base_corners(alpha: float, F: float, depth: float) -> np.ndarray:
    """Pyramid edge endpoints at boresight depth ``depth``, sensor frame, shape (4, 3)."""
    j = pyramid_corner_dirs(alpha, F)
    return depth * j / (j @ boresight(alpha))[:, None]


def relative_direction(u1, u2, v_radial=0.0):
    """Unit direction of relative motion in the crossing frame, shape (..., 3).

    The target drifts backwards along y relative to the satellite and crosses
    the satellite plane along +x.
    """
    u1, u2, vr = np.broadcast_arrays(np.asarray(u1, float), np.asarray(u2, float),
                                     np.asarray(v_radial, float))
    e = np.stack([u1, -u2, vr], axis=-1)
    norm = np.linalg.norm(e, axis=-1, keepdims=True)
    return e / np.where(norm > 0, norm, 1.0)


def _project(points, e):
    """Project points (4 or 5, 3) along lines of direction e (..., 3) onto the x = 0 plane."""
    ex = e[..., 0][..., None]
    ratio_y = e[..., 1][..., None] / ex
    ratio_z = e[..., 2][..., None] / ex
    Y = points[:, 1] - points[:, 0] * ratio_y
    Z = points[:, 2] - points[:, 0] * ratio_z
    return Y, Z


def crossing_extent(e_dir, corners, delta_r, depth_corners=None):
    """Range [y_min, y_max] of y-offsets for which the line (0, y, delta_r) + s e hits the pyramid.

    Args:
        e_dir: relative motion direction(s) in the crossing frame, shape (3,) or (N, 3)
        corners: pyramid edge directions in the crossing frame, shape (4, 3)
        delta_r: height of the target above the shell (m), scalar or (N,)
        depth_corners: optional edge endpoints (4, 3) truncating the pyramid; ``None``
            treats the pyramid as unbounded and evaluates only its four edges.

    Returns:
        (y_min, y_max, status) arrays; status is BOUNDED, UNBOUNDED or EMPTY.
    """
    e = np.atleast_2d(np.asarray(e_dir, dtype=float))
    dr = np.broadcast_to(np.asarray(delta_r, dtype=float), e.shape[:1]).astype(float)
    corners = np.asarray(corners, dtype=float)
    ex = e[:, 0]
    parallel = np.abs(ex) < _DENOM_TOL
    e_safe = np.where(parallel[:, None], np.array([1.0, 0.0, 0.0]), e)

    if depth_corners is None:
        Y, Z = _project(corners, e_safe)
        # Z * ex is the denominator ex jz - ez jx; tau > 0 requires Z > 0
        scale = np.linalg.norm(corners, axis=1)[None, :]
        ok = Z > _DENOM_TOL * scale
        n_ok = ok.sum(axis=1)
        with np.errstate(divide="ignore", invalid="ignore"):
            y = dr[:, None] * Y / np.where(ok, Z, 1.0)
        y_min = np.where(ok, y, np.inf).min(axis=1)
        y_max = np.where(ok, y, -np.inf).max(axis=1)
        status = np.where(n_ok == 4, BOUNDED, np.where(n_ok == 0, EMPTY, UNBOUNDED))
        status = np.where(dr < 0, EMPTY, status)
        zero = dr == 0
        y_min = np.where(zero & (status == BOUNDED), 0.0, y_min)
        y_max = np.where(zero & (status == BOUNDED), 0.0, y_max)
    else:
        pts = np.vstack([np.zeros(3), np.asarray(depth_corners, dtype=float)])
        Y, Z = _project(pts, e_safe)
        ia, ib = np.triu_indices(5, k=1)
        za, zb, ya, yb = Z[:, ia], Z[:, ib], Y[:, ia], Y[:, ib]
        level = dr[:, None]
        dz = zb - za
        with np.errstate(divide="ignore", invalid="ignore"):
            s = (level - za) / dz
        hit = (dz != 0) & (s >= 0) & (s <= 1)
        yc = ya + np.where(hit, s, 0.0) * (yb - ya)
        on_level = np.abs(Z - level) <= 1e-12 * np.maximum(np.abs(level), 1.0)
        cand_min = np.concatenate([np.where(hit, yc, np.inf), np.where(on_level, Y, np.inf)], axis=1)
        cand_max = np.concatenate([np.where(hit, yc, -np.inf), np.where(on_level, Y, -np.inf)], axis=1)
        y_min = cand_min.min(axis=1)
        y_max = cand_max.max(axis=1)
        status = np.where(np.isfinite(y_min), BOUNDED, EMPTY)

    status = np.where(parallel, UNBOUNDED, status)
    return y_min, y_max, status


def duty_cycle(y_min, y_max, status, d, clamp=True):
    """Detection probability from a crossing extent: (y_max - y_min) / d."""
    width = np.where(status == BOUNDED, np.asarray(y_max) - np.asarray(y_min), 0.0)
    P = np.where(status == UNBOUNDED, 1.0, width / d)
    P = np.maximum(P, 0.0)
    return np.minimum(P, 1.0) if clamp else P


def closed_form_probability(u1, u2, F, delta_r, d):
    """Zenith-pointing (alpha = pi/2) duty cycle: 2 tan(F/2) delta_r (u2/u1 + 1) / d.

    The square cross-section at height delta_r has side 2 delta_r tan(F/2); the
    factor (u2/u1 + 1) accounts for the oblique sweep. Not clamped.
    """
    return 2.0 * math.tan(F / 2) * np.asarray(delta_r) * (np.asarray(u2) / np.asarray(u1) + 1.0) / d


def alignment_probability(geom: AlignmentGeometry, sensor, d: float, clamp: bool = True,
                          truncate: bool = True) -> CrossingResult:
    """Probability that one alignment with a satellite plane yields a detection."""
    if d <= 0:
        raise ValueError("satellite spacing must be positive")
    v0 = geom.v0 if geom.v0 > 0 else 1.0
    u1, u2 = relative_speeds(geom.n_v, geom.m_v, geom.cos_angle, v0)
    u1, u2 = float(u1), float(u2)
    if geom.delta_r < 0:
        return CrossingResult(u1, u2, 0.0, 0.0, 0.0)
    if u1 < DEGENERATE_U1 * v0:
        return CrossingResult(u1, u2, 0.0, 0.0, 1.0)
    P_vals, lo, hi = [], [], []
    # both signs of the radial drift describe the two mirror-image passes
    for vr in {geom.v_radial, -geom.v_radial}:
        e = relative_direction(u1, u2, vr)
        corners = to_crossing_frame(pyramid_corner_dirs(sensor.alpha, sensor.F))
        base = None
        if truncate:
            base = to_crossing_frame(pyramid_base_corners(sensor.alpha, sensor.F, sensor.reach_depth))
        y0, y1, st = crossing_extent(e, corners, geom.delta_r, base)
        P_vals.append(float(duty_cycle(y0, y1, st, d, clamp)[0]))
        lo.append(float(y0[0]))
        hi.append(float(y1[0]))
    return CrossingResult(u1, u2, min(lo), max(hi), float(np.mean(P_vals)))
