"""
Brute-force detection simulator.

Propagates the target (Keplerian, no perturbations) and every satellite of the
constellation, tests the point-in-pyramid condition and logs one event per
physical pass. Screening runs in three levels so that the fine time step needed
to resolve sub-second crossings is only used near close approaches.
"""
from __future__ import annotations

import csv
import logging
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from ssa_revisit.constellation import ConstellationSpec, SatelliteState
from ssa_revisit.orbital_mechanics import CONSTANTS, TWO_PI, OrbitGeometry, PhysicalConstants, mean_motion
from ssa_revisit.sensor_model import SensorSpec

log = logging.getLogger(__name__)

MIN_FINE_DT = 1e-3
_BATCH = 500_000


@dataclass(frozen=True)
class SimConfig:
    """Simulation controls.

    ``dt`` is the mid-level screening step; the fine step is derived from the
    crossing time and never exceeds ``dt``. ``n_targets`` copies of the target
    orbit are flown with stratified random phases and pooled.
    """

    dt: float = 1.0
    duration: float = 30 * 86400.0
    seed: int = 0
    dedupe_window: float | None = None
    coarse_dt: float = 60.0
    n_targets: int = 1
    randomize_raan: bool = True

    def __post_init__(self):
        if self.dt <= 0 or self.coarse_dt < self.dt:
            raise ValueError("need 0 < dt <= coarse_dt")
        if self.duration < 0:
            raise ValueError("duration must be non-negative")
        if self.dedupe_window is not None and self.dedupe_window < self.dt:
            raise ValueError("dedupe_window must be at least dt")
        if self.n_targets < 1:
            raise ValueError("n_targets must be positive")


@dataclass(frozen=True)
class DetectionEvent:
    time: float
    plane: int
    slot: int
    target_range: float
    target_index: int = 0

    @property
    def satellite(self) -> tuple[int, int]:
        return (self.plane, self.slot)


@dataclass
class SimResult:
    events: list[DetectionEvent]
    duration: float
    n_targets: int
    fine_dt: float
    warnings: list[str] = field(default_factory=list)

    @property
    def n_events(self) -> int:
        return len(self.events)

    @property
    def mean_gap(self) -> float:
        """Target-time per detection, the empirical counterpart of 1/lambda."""
        if not self.events:
            return math.inf
        return self.duration * self.n_targets / len(self.events)

    def rate_ci(self, z: float = 1.96) -> tuple[float, float]:
        """Approximate confidence interval for the mean gap from Poisson counting noise."""
        n = len(self.events)
        if n == 0:
            return (0.0, math.inf)
        span = self.duration * self.n_targets
        lo_n, hi_n = max(n - z * math.sqrt(n), 0.0), n + z * math.sqrt(n)
        return (span / hi_n, span / lo_n if lo_n > 0 else math.inf)

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["time_s", "plane", "slot", "range_m"])
            for e in self.events:
                w.writerow([repr(float(e.time)), e.plane, e.slot, repr(float(e.target_range))])


def _sensor_axes(position: np.ndarray, velocity: np.ndarray, alpha: float):
    """Boresight b, cross-track y and elevation n unit vectors, (..., 3) each."""
    x = velocity / np.linalg.norm(velocity, axis=-1, keepdims=True)
    z = position - np.sum(position * x, axis=-1, keepdims=True) * x
    z = z / np.linalg.norm(z, axis=-1, keepdims=True)
    y = np.cross(z, x)
    ca, sa = math.cos(alpha), math.sin(alpha)
    return ca * x + sa * z, y, -sa * x + ca * z


def _inside(sensor: SensorSpec, position, velocity, target_pos):
    """Vectorized containment; returns (mask, range)."""
    rel = np.asarray(target_pos, float) - np.asarray(position, float)
    rng = np.linalg.norm(rel, axis=-1)
    b, y, n = _sensor_axes(np.asarray(position, float), np.asarray(velocity, float), sensor.alpha)
    q = np.sum(rel * b, axis=-1)
    lim = math.tan(sensor.F / 2) * q
    ok = (q > 0) & (rng <= sensor.w)
    ok &= np.abs(np.sum(rel * y, axis=-1)) <= lim
    ok &= np.abs(np.sum(rel * n, axis=-1)) <= lim
    return ok, rng


def contains(sensor: SensorSpec, sat: SatelliteState, target_pos) -> bool:
    """Whether ``target_pos`` lies in the sensor's square pyramid, within range w."""
    ok, _ = _inside(sensor, sat.position, sat.velocity, target_pos)
    return bool(ok)


def solve_kepler(M, e: float, tol: float = 1e-12, max_iter: int = 50):
    """Eccentric anomaly from mean anomaly by Newton iteration."""
    M = np.mod(np.asarray(M, float), TWO_PI)
    E = M + e * np.sin(M) if e < 0.8 else np.full_like(M, math.pi)
    for _ in range(max_iter):
        step = (E - e * np.sin(E) - M) / (1.0 - e * np.cos(E))
        E = E - step
        if np.all(np.abs(step) < tol):
            break
    return E


def target_state(orbit: OrbitGeometry, times, M0: float = 0.0, argp: float = 0.0,
                 raan: float | None = None, constants: PhysicalConstants = CONSTANTS):
    """ECI position and velocity of the target, each (..., 3)."""
    a, e = orbit.a, orbit.e
    raan = orbit.raan if raan is None else raan
    n = float(mean_motion(a, constants))
    E = solve_kepler(M0 + n * np.asarray(times, float), e)
    b = a * math.sqrt(1.0 - e * e)
    px, py = a * (np.cos(E) - e), b * np.sin(E)
    rdot = n * a / (1.0 - e * np.cos(E))
    vx, vy = -a * np.sin(E) * rdot / a, b * np.cos(E) * rdot / a
    cO, sO = math.cos(raan), math.sin(raan)
    cw, sw = math.cos(argp), math.sin(argp)
    ci, si = math.cos(orbit.i), math.sin(orbit.i)
    P = np.array([cO * cw - sO * sw * ci, sO * cw + cO * sw * ci, sw * si])
    Q = np.array([-cO * sw - sO * cw * ci, -sO * sw + cO * cw * ci, cw * si])
    pos = px[..., None] * P + py[..., None] * Q
    vel = vx[..., None] * P + vy[..., None] * Q
    return pos, vel


def _sat_states(spec: ConstellationSpec, plane, slot, times, constants: PhysicalConstants):
    """Positions/velocities for satellites (plane, slot) at ``times``; all arrays broadcast."""
    r = spec.radius(constants)
    v = math.sqrt(constants.mu / r)
    n = float(mean_motion(r, constants))
    plane = np.asarray(plane)
    u = (TWO_PI * np.asarray(slot) * spec.p / spec.t + TWO_PI * spec.f * plane / spec.t
         + n * np.asarray(times, float))
    raan = plane * (TWO_PI / spec.p)
    cO, sO = np.cos(raan), np.sin(raan)
    ci, si = math.cos(spec.i), math.sin(spec.i)
    cu, su = np.cos(u), np.sin(u)
    pos = np.stack([r * (cO * cu - sO * ci * su), r * (sO * cu + cO * ci * su), r * si * su * np.ones_like(cO)], -1)
    vel = np.stack([v * (-cO * su - sO * ci * cu), v * (-sO * su + cO * ci * cu), v * si * cu * np.ones_like(cO)], -1)
    return pos, vel


def _merge_windows(sat: np.ndarray, t: np.ndarray, half: float, t_max: float):
    """Union of the intervals [t - half, t + half] per satellite; returns (sat, lo, hi)."""
    if t.size == 0:
        return np.empty(0, int), np.empty(0), np.empty(0)
    order = np.lexsort((t, sat))
    sat, t = sat[order], t[order]
    new = np.ones(t.size, bool)
    new[1:] = (sat[1:] != sat[:-1]) | (t[1:] - t[:-1] > 2 * half)
    starts = np.flatnonzero(new)
    ends = np.append(starts[1:], t.size) - 1
    lo = np.maximum(t[starts] - half, 0.0)
    hi = np.minimum(t[ends] + half, t_max)
    return sat[starts], lo, hi


def _expand(sat: np.ndarray, lo: np.ndarray, hi: np.ndarray, step: float):
    """Sample every window on its own grid lo + k*step <= hi; returns (sat, time) per sample."""
    counts = np.floor((hi - lo) / step + 1e-9).astype(int) + 1
    first = np.repeat(np.cumsum(counts) - counts, counts)
    k = np.arange(counts.sum()) - first
    return np.repeat(sat, counts), np.repeat(lo, counts) + k * step


class _Target:
    def __init__(self, orbit, M0, argp, raan, constants):
        self.orbit, self.M0, self.argp, self.raan, self.constants = orbit, M0, argp, raan, constants

    def pos(self, times):
        return target_state(self.orbit, times, self.M0, self.argp, self.raan, self.constants)[0]


def _screen(target: _Target, spec, sensor, sim, fine_dt, v_rel, constants, index):
    """Detection events of one target over the whole duration."""
    margin = 1.1

    # level 1: coarse sampling; a satellite can only be near the target when
    # the target is near that satellite's orbital plane
    thr1 = sensor.w + margin * v_rel * sim.coarse_dt / 2
    coarse_t = np.arange(0.0, sim.duration + sim.coarse_dt, sim.coarse_dt)
    raan = np.arange(spec.p) * (TWO_PI / spec.p)
    normals = np.stack([np.sin(raan) * math.sin(spec.i), -np.cos(raan) * math.sin(spec.i),
                        np.full(spec.p, math.cos(spec.i))], axis=-1)
    cand_sat, cand_t = [], []
    chunk = 200_000
    for k in range(0, coarse_t.size, chunk):
        t = coarse_t[k:k + chunk]
        tp = target.pos(t)
        ti, pi = np.nonzero(np.abs(tp @ normals.T) <= thr1)
        if ti.size == 0:
            continue
        slots = np.arange(spec.per_plane)
        sp, _ = _sat_states(spec, pi[:, None], slots[None, :], t[ti][:, None], constants)
        d = np.linalg.norm(sp - tp[ti][:, None, :], axis=-1)
        row, col = np.nonzero(d <= thr1)
        cand_sat.append(pi[row] * spec.per_plane + col)
        cand_t.append(t[ti[row]])
    cand_sat = np.concatenate(cand_sat) if cand_sat else np.empty(0, int)
    cand_t = np.concatenate(cand_t) if cand_t else np.empty(0)
    # level 2: mid-resolution sampling around coarse candidates
    thr2 = sensor.w + margin * v_rel * sim.dt / 2
    sat, t = _expand(*_merge_windows(cand_sat, cand_t, sim.coarse_dt, sim.duration), sim.dt)
    keep = np.zeros(t.size, bool)
    for k in range(0, t.size, _BATCH):
        sl = slice(k, k + _BATCH)
        sp, _ = _sat_states(spec, sat[sl] // spec.per_plane, sat[sl] % spec.per_plane, t[sl], constants)
        keep[sl] = np.linalg.norm(sp - target.pos(t[sl]), axis=-1) <= thr2

    # level 3: fine sampling and the containment test
    sat, t = _expand(*_merge_windows(sat[keep], t[keep], sim.dt, sim.duration), fine_dt)
    events: list[DetectionEvent] = []
    for k in range(0, t.size, _BATCH):
        sl = slice(k, k + _BATCH)
        plane, slot = sat[sl] // spec.per_plane, sat[sl] % spec.per_plane
        sp, sv = _sat_states(spec, plane, slot, t[sl], constants)
        ok, rng = _inside(sensor, sp, sv, target.pos(t[sl]))
        for j in np.flatnonzero(ok):
            events.append(DetectionEvent(float(t[sl][j]), int(plane[j]), int(slot[j]), float(rng[j]), index))
    return events


def _dedupe(events: Sequence[DetectionEvent], window: float) -> list[DetectionEvent]:
    """Merge hits of the same satellite closer than ``window``; keep the closest-range sample."""
    out: list[DetectionEvent] = []
    last: dict[tuple[int, int, int], int] = {}
    last_time: dict[tuple[int, int, int], float] = {}
    for ev in sorted(events, key=lambda e: (e.time, e.plane, e.slot)):
        key = (ev.target_index, ev.plane, ev.slot)
        if key in last and ev.time - last_time[key] <= window:
            last_time[key] = ev.time
            k = last[key]
            if ev.target_range < out[k].target_range:
                out[k] = DetectionEvent(out[k].time, ev.plane, ev.slot, ev.target_range, ev.target_index)
            continue
        last[key] = len(out)
        last_time[key] = ev.time
        out.append(ev)
    return out


def fine_step(target: OrbitGeometry, spec: ConstellationSpec, sensor: SensorSpec, sim: SimConfig,
              constants: PhysicalConstants = CONSTANTS) -> float:
    """Step short enough to sample a pyramid crossing at least four times."""
    v_rel = _max_relative_speed(target, spec, constants)
    dr = target.perigee - spec.radius(constants)
    depth = dr if dr > 0 else sensor.w
    return min(sim.dt, max(MIN_FINE_DT, depth * math.tan(sensor.F / 2) / (4.0 * v_rel)))


def _max_relative_speed(target, spec, constants):
    v_sat = math.sqrt(constants.mu / spec.radius(constants))
    v_tgt = math.sqrt(constants.mu * (2.0 / target.perigee - 1.0 / target.a))
    return v_sat + v_tgt


def run(target: OrbitGeometry, spec: ConstellationSpec, sensor: SensorSpec, sim: SimConfig = SimConfig(),
        constants: PhysicalConstants = CONSTANTS) -> SimResult:
    """Simulate ``sim.n_targets`` copies of ``target`` and log detections.

    Copy k starts at mean anomaly 2 pi (k + u)/n and, when ``randomize_raan`` is
    set, at node 2 pi (k + u')/n, with u, u' drawn from ``sim.seed``. The
    perigee argument is uniform random per copy.
    """
    rng = np.random.default_rng(sim.seed)
    n = sim.n_targets
    u_phase, u_node = rng.random(), rng.random()
    # a second stratification axis decorrelates phase and node
    node_perm = rng.permutation(n)
    argps = rng.random(n) * TWO_PI
    fine_dt = fine_step(target, spec, sensor, sim, constants)
    window = sim.dedupe_window if sim.dedupe_window is not None else 2.0 * sim.dt
    v_rel = _max_relative_speed(target, spec, constants)

    events: list[DetectionEvent] = []
    if sim.duration > 0:
        for k in range(n):
            M0 = TWO_PI * (k + u_phase) / n
            raan = TWO_PI * (node_perm[k] + u_node) / n if sim.randomize_raan else target.raan
            tgt = _Target(target, M0, float(argps[k]), raan, constants)
            events.extend(_screen(tgt, spec, sensor, sim, fine_dt, v_rel, constants, k))
    events = _dedupe(events, window)
    events.sort(key=lambda e: (e.time, e.target_index, e.plane, e.slot))

    warnings = []
    if len(events) < 2:
        msg = f"only {len(events)} detection(s); mean gap is not meaningful"
        log.warning(msg)
        warnings.append(msg)
    return SimResult(events, sim.duration, n, fine_dt, warnings)
