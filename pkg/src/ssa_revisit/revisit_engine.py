"""
Poisson detection-rate engine.

For every relative node phase phi on a uniform grid, each of the p planes
offers two radial alignments per target orbit. Each alignment yields a
detection with probability P (see ``detection_geometry``). Rates are
averaged over phi and, for elliptical targets, over the true-anomaly arc
that lies inside the detection band.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from ssa_revisit import detection_geometry as dg
from ssa_revisit.constellation import ConstellationSpec
from ssa_revisit.orbital_mechanics import (
    CONSTANTS,
    INFINITE_PERIOD,
    OrbitGeometry,
    PhysicalConstants,
    beat_period,
    ellipse_radius,
    equivalent_distribution_period,
    is_infinite_period,
    kepler_period,
    scanning_period,
)
from ssa_revisit.sensor_model import SensorSpec

DAY = 86400.0

FIXED_TARGET = "fixed-target"
CO_MOVING_TARGET = "co-moving-target"

# grid cells evaluated per vectorized block in the anomaly integration
_CHUNK_CELLS = 1 << 14


class InfeasibleError(ValueError):
    """The target never enters any detection band of the constellation."""


@dataclass(frozen=True)
class EngineConfig:
    """Discretization and model switches.

    ``pyramid`` selects the detection volume: ``"truncated"`` bounds the pyramid
    at boresight depth w cos(F/2); ``"open"`` evaluates only the four edges of an
    unbounded pyramid and relies on the altitude band to limit range.
    """

    K: int = 500
    raan_samples: int | None = None
    clamp_P: bool = True
    pyramid: str = "truncated"

    def __post_init__(self):
        if self.K < 2:
            raise ValueError("K must be at least 2")
        if self.raan_samples is not None and self.raan_samples < 1:
            raise ValueError("raan_samples must be positive")
        if self.pyramid not in ("truncated", "open"):
            raise ValueError(f"unknown pyramid model {self.pyramid!r}")

    @property
    def n_phi(self) -> int:
        return self.raan_samples or self.K


@dataclass(frozen=True)
class RevisitReport:
    """All periods in seconds; ``lam`` in detections per second."""

    lam: float
    T: float
    T1: float
    T2: float
    T3: float
    Tr: float

    @property
    def lambda_(self) -> float:
        return self.lam

    def in_days(self) -> dict:
        return {"T": self.T / DAY, "T1": self.T1 / DAY, "T2": self.T2 / DAY,
                "T3": self.T3 / DAY, "Tr": self.Tr / DAY}


def _shell_radius(spec: ConstellationSpec, constants: PhysicalConstants) -> float:
    return constants.rho + spec.h0


def _cos_angles(spec: ConstellationSpec, i_target: float, n_phi: int) -> np.ndarray:
    """cos of the angle between the orbit normals, shape (n_phi, p)."""
    phi = np.arange(n_phi) * (2.0 * math.pi / n_phi)
    node = phi[:, None] + np.arange(spec.p)[None, :] * (2.0 * math.pi / spec.p)
    cg = math.cos(spec.i) * math.cos(i_target) + math.sin(spec.i) * math.sin(i_target) * np.cos(node)
    return np.clip(cg, -1.0, 1.0)


def _probabilities(cg: np.ndarray, r, delta_r, n_v, v_radial,
                   spec: ConstellationSpec, sensor: SensorSpec, cfg: EngineConfig,
                   constants: PhysicalConstants) -> np.ndarray:
    """Per-alignment detection probability, shape (m, n_phi, p).

    ``r``, ``delta_r``, ``n_v`` and ``v_radial`` are length-m arrays, one entry per
    radius sample; ``cg`` is the (n_phi, p) grid of orbit-normal cosines.
    """
    col = lambda x: np.asarray(x, dtype=float).reshape(-1, 1, 1)  # noqa: E731
    r, delta_r, n_v, v_radial = col(r), col(delta_r), col(n_v), col(v_radial)
    r0 = _shell_radius(spec, constants)
    v0 = math.sqrt(constants.mu / r0)
    d = 2.0 * math.pi * r * spec.p / spec.t
    u1, u2 = dg.relative_speeds(n_v, r / r0, cg, v0)
    degenerate = u1 < dg.DEGENERATE_U1 * v0
    u1_safe = np.where(degenerate, 1.0, u1)

    if sensor.alpha == math.pi / 2 and not np.any(v_radial) and cfg.pyramid == "truncated":
        # zenith pointing with horizontal relative motion: square cross-section
        P = dg.closed_form_probability(u1_safe, u2, sensor.F, delta_r, d)
        P = np.where(delta_r > sensor.reach_depth, 0.0, P)
    else:
        corners = dg.to_crossing_frame(dg.pyramid_corner_dirs(sensor.alpha, sensor.F))
        base = None
        if cfg.pyramid == "truncated":
            base = dg.to_crossing_frame(dg.pyramid_base_corners(sensor.alpha, sensor.F, sensor.reach_depth))
        shape = u1.shape
        flat = lambda x: np.broadcast_to(x, shape).ravel()  # noqa: E731
        signs = (1.0, -1.0) if np.any(v_radial > 0) else (1.0,)
        P = np.zeros(u1.size)
        for s in signs:
            e = dg.relative_direction(u1_safe.ravel(), u2.ravel(), s * flat(v_radial))
            y0, y1, st = dg.crossing_extent(e, corners, flat(delta_r), base)
            P += dg.duty_cycle(y0, y1, st, flat(d), clamp=cfg.clamp_P)
        P = (P / len(signs)).reshape(shape)

    P = np.where(degenerate, 1.0, P)
    return np.clip(P, 0.0, 1.0) if cfg.clamp_P else np.maximum(P, 0.0)


def poisson_rate_circular(target: OrbitGeometry, spec: ConstellationSpec, sensor: SensorSpec,
                          cfg: EngineConfig = EngineConfig(),
                          constants: PhysicalConstants = CONSTANTS) -> float:
    """Detection rate (1/s) for a circular target: 2 <sum_planes P>_phi / T0U."""
    if target.c != 0:
        raise ValueError("poisson_rate_circular requires a circular target (c = 0)")
    r = target.a
    delta_r = r - _shell_radius(spec, constants)
    if delta_r < 0 or delta_r > sensor.w:
        return 0.0
    cg = _cos_angles(spec, target.i, cfg.n_phi)
    n_v = math.sqrt(_shell_radius(spec, constants) / r)
    P = _probabilities(cg, r, delta_r, n_v, 0.0, spec, sensor, cfg, constants)[0]
    return 2.0 * float(P.sum(axis=1).mean()) / float(kepler_period(r, constants))


def poisson_rate_elliptical(target: OrbitGeometry, spec: ConstellationSpec, sensor: SensorSpec,
                            cfg: EngineConfig = EngineConfig(),
                            constants: PhysicalConstants = CONSTANTS) -> float:
    """Detection rate (1/s) averaged over the target's true-anomaly arc.

    The anomaly xi advances in steps of pi/K from perigee. The loop stops once
    the target rises more than w above the shell; arcs below the shell add nothing.
    """
    K = cfg.K
    r0 = _shell_radius(spec, constants)
    v0 = math.sqrt(constants.mu / r0)
    cg = _cos_angles(spec, target.i, cfg.n_phi)
    step = math.pi / K
    r = ellipse_radius(target, np.arange(K) * step)
    delta_r = r - r0
    above = np.flatnonzero(delta_r > sensor.w)
    if above.size:
        # the arc ends where the target first leaves the band
        r, delta_r = r[:above[0]], delta_r[:above[0]]
    keep = delta_r >= 0
    r, delta_r = r[keep], delta_r[keep]
    if r.size == 0:
        return 0.0
    n_v = dg.transverse_speed(target, r, constants) / v0
    v_radial = dg.radial_speed(target, r, constants) if target.c > 0 else np.zeros_like(r)
    total = 0.0
    rows = max(1, _CHUNK_CELLS // cg.size)
    for k in range(0, r.size, rows):
        sl = slice(k, k + rows)
        P = _probabilities(cg, r[sl], delta_r[sl], n_v[sl], v_radial[sl], spec, sensor, cfg, constants)
        total += float(P.sum(axis=2).mean(axis=1).sum()) * step
    return 2.0 * total / (math.pi * float(kepler_period(target.a, constants)))


def infeasibility_reason(target: OrbitGeometry, spec: ConstellationSpec, sensor: SensorSpec,
                         constants: PhysicalConstants = CONSTANTS) -> str | None:
    """Why the rate is identically zero, or None when some arc lies in the band."""
    r0 = _shell_radius(spec, constants)
    if target.apogee < r0:
        return "target below constellation shell"
    if target.perigee - r0 > sensor.w:
        return "target beyond work distance of the shell"
    return None


def _period(lam: float) -> float:
    return 1.0 / lam if lam > 0 else INFINITE_PERIOD


def revisit_report(target: OrbitGeometry, spec: ConstellationSpec, sensor: SensorSpec,
                   cfg: EngineConfig = EngineConfig(),
                   constants: PhysicalConstants = CONSTANTS) -> RevisitReport:
    if target.c == 0:
        lam = poisson_rate_circular(target, spec, sensor, cfg, constants)
    else:
        lam = poisson_rate_elliptical(target, spec, sensor, cfg, constants)
    T = _period(lam)
    T1 = beat_period(spec.h0, target.a, constants)
    T2 = equivalent_distribution_period(T1, spec.p, spec.t)
    T0 = float(kepler_period(_shell_radius(spec, constants), constants))
    T3 = scanning_period(T0, spec.p, spec.t)
    Tr = T if is_infinite_period(T2) else max(T, T2)
    return RevisitReport(lam=lam, T=T, T1=T1, T2=T2, T3=T3, Tr=Tr)


def harmonic_mean_over_raan(per_phase_T: Iterable[float]) -> float:
    """Rate-averaged period: len(T) / sum(1/T). Infinite samples contribute zero rate."""
    T = np.asarray(list(per_phase_T), dtype=float)
    if T.size == 0:
        raise ValueError("need at least one sample")
    if np.any(T <= 0):
        raise ValueError("periods must be positive")
    rate = np.where(np.isinf(T), 0.0, 1.0 / np.where(np.isinf(T), 1.0, T)).mean()
    return _period(float(rate))


def aggregate_targets(reports: Sequence[RevisitReport]) -> float:
    """Population-average Tr from 1/Tr = sum(1/Tr_i) / N."""
    if not reports:
        raise ValueError("no reports to aggregate")
    return harmonic_mean_over_raan([r.Tr for r in reports])


def aggregate_constellations(reports: Sequence[RevisitReport]) -> float:
    """Combined Tr for independent observers: rates add."""
    if not reports:
        raise ValueError("no reports to aggregate")
    rate = sum(0.0 if is_infinite_period(r.Tr) else 1.0 / r.Tr for r in reports)
    return _period(rate)


def _period_for(h0: float, target_alt: float, spec: ConstellationSpec, sensor: SensorSpec,
                cfg: EngineConfig, constants: PhysicalConstants, i_target: float) -> float:
    shell = ConstellationSpec(i=spec.i, t=spec.t, p=spec.p, f=spec.f, h0=h0)
    target = OrbitGeometry(a=constants.rho + target_alt, i=i_target, rho=constants.rho)
    lam = poisson_rate_circular(target, shell, sensor, cfg, constants)
    if lam <= 0:
        raise InfeasibleError(f"no detections with shell at {h0 / 1e3:.3f} km")
    return 1.0 / lam


def revisit_sensitivity(target_mode: str, spec: ConstellationSpec, sensor: SensorSpec,
                        cfg: EngineConfig = EngineConfig(), h0: float | None = None,
                        dh: float = 10.0, target_alt: float = 552e3, offset: float = 2e3,
                        i_target: float = 0.0,
                        constants: PhysicalConstants = CONSTANTS) -> float:
    """Central-difference dT/dh0 (seconds per metre) for a circular target.

    ``fixed-target`` keeps the target at ``target_alt`` while the shell moves;
    ``co-moving-target`` keeps it ``offset`` above the shell.
    """
    h0 = spec.h0 if h0 is None else h0
    if dh <= 0:
        raise ValueError("dh must be positive")

    def alt(h):
        if target_mode == FIXED_TARGET:
            return target_alt
        if target_mode == CO_MOVING_TARGET:
            return h + offset
        raise ValueError(f"unknown target mode {target_mode!r}")

    hi = _period_for(h0 + dh, alt(h0 + dh), spec, sensor, cfg, constants, i_target)
    lo = _period_for(h0 - dh, alt(h0 - dh), spec, sensor, cfg, constants, i_target)
    return (hi - lo) / (2.0 * dh)
