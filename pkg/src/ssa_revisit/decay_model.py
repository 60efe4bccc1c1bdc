"""
Drag decay of circular shells.

For a near-circular orbit the specific energy is E = -mu/(2a) and drag removes
energy at the rate v * (rho_air v^2 / (2B)) with v^2 = mu/a. Equating
dE/dt = mu/(2a^2) da/dt with the drag power yields

    da/dt = -sqrt(mu) * rho_air(h) * sqrt(a) / B

with B = m / (C_D A) the ballistic coefficient. The factor 1/2 of the drag
force cancels against the 1/2 of the energy derivative.
"""
from __future__ import annotations

import bisect
import math
import os
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from ssa_revisit.orbital_mechanics import CONSTANTS, PhysicalConstants

ENV_TABLE = "SSA_ATMOSPHERE_TABLE"
DAY = 86400.0


@dataclass(frozen=True)
class AtmosphereTable:
    """Piecewise-exponential density profile.

    ``breakpoints`` holds (altitude m, density kg/m^3, scale height m); the scale
    height of a segment is the one stored at its lower breakpoint.
    """

    breakpoints: tuple[tuple[float, float, float], ...]

    @classmethod
    def from_points(cls, altitudes: Sequence[float], densities: Sequence[float]) -> "AtmosphereTable":
        h = [float(x) for x in altitudes]
        d = [float(x) for x in densities]
        if len(h) != len(d) or len(h) < 2:
            raise ValueError("need at least two (altitude, density) pairs")
        if any(b <= a for a, b in zip(h, h[1:])):
            raise ValueError("altitudes must be strictly increasing")
        if any(x <= 0 for x in d) or any(b >= a for a, b in zip(d, d[1:])):
            raise ValueError("densities must be positive and strictly decreasing")
        H = [(h[k + 1] - h[k]) / math.log(d[k] / d[k + 1]) for k in range(len(h) - 1)]
        H.append(H[-1])
        return cls(tuple(zip(h, d, H)))

    @classmethod
    def load(cls, path: str | os.PathLike | None = None) -> "AtmosphereTable":
        """Read ``altitude_km density_kg_m3`` rows; '#' starts a comment."""
        if path is None:
            path = os.environ.get(ENV_TABLE)
        if path is None:
            text = resources.files("ssa_revisit").joinpath("data/atmosphere.txt").read_text()
        else:
            text = Path(path).read_text()
        alts, dens = [], []
        for line in text.splitlines():
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) != 2:
                raise ValueError(f"malformed atmosphere row: {line!r}")
            alts.append(float(parts[0]) * 1e3)
            dens.append(float(parts[1]))
        return cls.from_points(alts, dens)

    @property
    def floor(self) -> float:
        return self.breakpoints[0][0]

    @property
    def ceiling(self) -> float:
        return self.breakpoints[-1][0]

    def density(self, h: float) -> float:
        if not self.floor <= h <= self.ceiling:
            raise ValueError(f"altitude {h / 1e3:.3f} km outside the table "
                             f"[{self.floor / 1e3:g}, {self.ceiling / 1e3:g}] km")
        alts = [b[0] for b in self.breakpoints]
        k = min(bisect.bisect_right(alts, h) - 1, len(alts) - 2)
        h0, d0, H = self.breakpoints[k]
        return d0 * math.exp(-(h - h0) / H)


_DEFAULT: dict[str, AtmosphereTable] = {}


def default_table() -> AtmosphereTable:
    """Bundled table, or the file named by the SSA_ATMOSPHERE_TABLE variable."""
    key = os.environ.get(ENV_TABLE, "")
    if key not in _DEFAULT:
        _DEFAULT[key] = AtmosphereTable.load(key or None)
    return _DEFAULT[key]


def air_density(h: float, table: AtmosphereTable | None = None) -> float:
    return (table or default_table()).density(h)


def decay_rate(a: float, B: float, table: AtmosphereTable | None = None,
               constants: PhysicalConstants = CONSTANTS,
               density: Callable[[float], float] | None = None) -> float:
    """da/dt (m/s) for a circular orbit of radius ``a``."""
    if B <= 0:
        raise ValueError("ballistic coefficient must be positive")
    h = a - constants.rho
    rho_air = density(h) if density is not None else air_density(h, table)
    return -math.sqrt(constants.mu) * rho_air * math.sqrt(a) / B


def specific_energy(a, constants: PhysicalConstants = CONSTANTS):
    """Orbital energy per unit mass, -mu/(2a)."""
    return -constants.mu / (2.0 * np.asarray(a, dtype=float))


@dataclass(frozen=True)
class DecayState:
    a: float
    t: float
    B: float

    def __post_init__(self):
        if self.B <= 0:
            raise ValueError("ballistic coefficient must be positive")


@dataclass
class DecayTrajectory:
    t: np.ndarray
    a: np.ndarray
    B: float
    truncated: bool = False
    message: str = ""
    states: list = field(default_factory=list, repr=False)

    def __post_init__(self):
        self.states = [DecayState(float(a), float(t), self.B) for t, a in zip(self.t, self.a)]

    def __len__(self):
        return len(self.t)


def propagate_decay(state0: DecayState, duration: float, dt: float = 60.0,
                    table: AtmosphereTable | None = None,
                    constants: PhysicalConstants = CONSTANTS,
                    density: Callable[[float], float] | None = None,
                    sample_every: int = 1) -> DecayTrajectory:
    """Integrate da/dt with fixed-step RK4.

    Stops early, flagging truncation, once the altitude leaves the table.
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    if duration < 0:
        raise ValueError("duration must be non-negative")
    if state0.a <= constants.rho:
        raise ValueError("orbit radius must exceed the Earth radius")
    table = table if density is not None else (table or default_table())
    floor = table.floor if table is not None else 0.0

    def f(a):
        return decay_rate(a, state0.B, table, constants, density)

    n_steps = int(math.ceil(duration / dt - 1e-9))
    ts, as_ = [state0.t], [state0.a]
    a, t = state0.a, state0.t
    truncated = False
    for k in range(n_steps):
        h = min(dt, state0.t + duration - t)
        try:
            k1 = f(a)
            k2 = f(a + 0.5 * h * k1)
            k3 = f(a + 0.5 * h * k2)
            k4 = f(a + h * k3)
        except ValueError:
            # an RK stage left the table domain
            truncated = True
            break
        a = a + h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)
        t = t + h
        if (k + 1) % sample_every == 0 or k == n_steps - 1:
            ts.append(t)
            as_.append(a)
        if a - constants.rho < floor:
            truncated = True
            break
    message = ""
    if truncated:
        if ts[-1] != t:
            ts.append(t)
            as_.append(a)
        message = f"stopped at {(as_[-1] - constants.rho) / 1e3:.3f} km: orbit left the atmosphere table"
    return DecayTrajectory(np.array(ts), np.array(as_), state0.B, truncated, message)


def revisit_drift(target, spec, sensor, cfg, B: float, horizon: float, samples: int = 10,
                  mode: str = "fixed-target", dh: float = 10.0,
                  table: AtmosphereTable | None = None,
                  constants: PhysicalConstants = CONSTANTS):
    """dT/dt (s/s) as the constellation shell decays, sampled over ``horizon``.

    Chain rule: dT/dt = dT/dh0 * dh0/dt. In ``fixed-target`` mode the target stays
    at its radius while the shell sinks toward it; in ``co-moving-target`` mode the
    target keeps its offset above the shell.

    Returns arrays (t, a, dadt, dTdt). Once the target falls out of the sensor band
    the period is unbounded and dT/dt is reported as ``inf`` from then on.
    """
    from ssa_revisit.constellation import ConstellationSpec
    from ssa_revisit.revisit_engine import InfeasibleError, revisit_sensitivity

    if samples < 1:
        raise ValueError("samples must be positive")
    r0 = constants.rho + spec.h0
    offset = target.a - r0
    target_alt = target.a - constants.rho
    times = np.linspace(0.0, horizon, samples + 1) if horizon > 0 else np.array([0.0])
    step = min(60.0, horizon) if horizon > 0 else 60.0
    traj = propagate_decay(DecayState(r0, 0.0, B), horizon, step, table, constants)
    a_at = np.interp(times, traj.t, traj.a)
    dadt = np.array([decay_rate(a, B, table, constants) for a in a_at])
    dTdt = np.full_like(dadt, math.inf)
    for k, a in enumerate(a_at):
        h0 = a - constants.rho
        shell = ConstellationSpec(i=spec.i, t=spec.t, p=spec.p, f=spec.f, h0=h0)
        try:
            dT_dh = revisit_sensitivity(mode, shell, sensor, cfg, h0=h0, dh=dh,
                                        target_alt=target_alt, offset=offset,
                                        i_target=target.i, constants=constants)
        except InfeasibleError:
            break
        dTdt[k] = dT_dh * dadt[k]
    return times, a_at, dadt, dTdt
