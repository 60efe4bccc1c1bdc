import csv
import math

import numpy as np
import pytest

from ssa_revisit.constellation import ConstellationSpec, SatelliteState
from ssa_revisit.oracle_sim import (
    SimConfig,
    _dedupe,
    _expand,
    _merge_windows,
    DetectionEvent,
    contains,
    fine_step,
    run,
    solve_kepler,
    target_state,
)
from ssa_revisit.orbital_mechanics import CONSTANTS, OrbitGeometry
from ssa_revisit.sensor_model import SensorSpec

KM = 1e3
DAY = 86400.0
R0 = CONSTANTS.rho + 550 * KM
SAT = SatelliteState(np.array([0.0, 0.0, R0]), np.array([7600.0, 0.0, 0.0]), 0, 0)


def _offset(sensor, range_, angle):
    """Point at ``range_`` from the satellite, rotated ``angle`` off boresight in the cross-track axis."""
    b = np.array([math.cos(sensor.alpha), 0.0, math.sin(sensor.alpha)])
    y = np.array([0.0, 1.0, 0.0])
    # the face of the pyramid is where |y component| = tan(F/2) * boresight component
    direction = b + math.tan(angle) * y
    return SAT.position + range_ * direction / np.linalg.norm(direction)


@pytest.mark.parametrize("alpha", [0.0, 0.7, math.pi / 2])
def test_contains_boundaries(alpha):
    s = SensorSpec(alpha=alpha)
    eps = 1e-6
    assert contains(s, SAT, _offset(s, s.w / 2, 0.0))
    assert not contains(s, SAT, _offset(s, s.w * (1 + eps), 0.0))
    assert contains(s, SAT, _offset(s, s.w / 2, s.F / 2 * (1 - eps)))
    assert not contains(s, SAT, _offset(s, s.w / 2, s.F / 2 * (1 + eps)))
    assert not contains(s, SAT, _offset(s, -s.w / 2, 0.0))


def test_sim_config_validation():
    for bad in ({"dt": 0.0}, {"coarse_dt": 0.5}, {"duration": -1.0}, {"dedupe_window": 0.5}, {"n_targets": 0}):
        with pytest.raises(ValueError):
            SimConfig(**bad)


def test_solve_kepler():
    M = np.linspace(0, 2 * math.pi, 50, endpoint=False)
    for e in (0.0, 0.01, 0.5, 0.9):
        E = solve_kepler(M, e)
        np.testing.assert_allclose(E - e * np.sin(E), M, atol=1e-11)


def test_target_state_is_keplerian():
    o = OrbitGeometry.from_altitudes(552 * KM, 650 * KM, i=0.7, raan=1.0)
    times = np.linspace(0, 6000, 40)
    pos, vel = target_state(o, times, M0=0.3, argp=0.4)
    r = np.linalg.norm(pos, axis=1)
    assert np.all(r >= o.perigee - 1e-3) and np.all(r <= o.apogee + 1e-3)
    energy = 0.5 * np.sum(vel ** 2, axis=1) - CONSTANTS.mu / r
    np.testing.assert_allclose(energy, -CONSTANTS.mu / (2 * o.a), rtol=1e-10)
    h = np.cross(pos, vel)
    np.testing.assert_allclose(h / np.linalg.norm(h, axis=1)[:, None], np.tile(h[0] / np.linalg.norm(h[0]), (40, 1)),
                               atol=1e-12)


def test_window_helpers():
    sat, lo, hi = _merge_windows(np.array([1, 1, 1, 2]), np.array([0.0, 60.0, 500.0, 60.0]), 60.0, 1000.0)
    assert list(sat) == [1, 1, 2]
    np.testing.assert_allclose(lo, [0.0, 440.0, 0.0])
    np.testing.assert_allclose(hi, [120.0, 560.0, 120.0])
    s, t = _expand(np.array([3]), np.array([0.0]), np.array([1.0]), 0.25)
    np.testing.assert_allclose(t, [0, 0.25, 0.5, 0.75, 1.0])
    assert set(s) == {3}


def test_dedupe():
    ev = [DetectionEvent(10.0, 0, 0, 500.0), DetectionEvent(10.5, 0, 0, 400.0),
          DetectionEvent(10.5, 0, 1, 300.0), DetectionEvent(30.0, 0, 0, 450.0)]
    out = _dedupe(ev, 2.0)
    assert len(out) == 3
    assert out[0].time == 10.0 and out[0].target_range == 400.0


def test_fine_step_bound():
    o = OrbitGeometry(a=CONSTANTS.rho + 552 * KM)
    spec = ConstellationSpec(i=math.pi / 2, t=36, p=3)
    dt = fine_step(o, spec, SensorSpec(), SimConfig())
    v_max = math.sqrt(CONSTANTS.mu / R0) + math.sqrt(CONSTANTS.mu / o.a)
    assert dt == pytest.approx(2 * KM * math.tan(math.pi / 8) / (4 * v_max), rel=1e-12)
    assert fine_step(o, spec, SensorSpec(), SimConfig(dt=0.001)) == 0.001


def test_no_detection_beyond_work_distance():
    o = OrbitGeometry(a=CONSTANTS.rho + 560 * KM)
    res = run(o, ConstellationSpec(i=math.pi / 2, t=36, p=3), SensorSpec(), SimConfig(duration=20 * DAY))
    assert res.n_events == 0
    assert res.warnings and math.isinf(res.mean_gap)


def test_zero_duration():
    res = run(OrbitGeometry(a=CONSTANTS.rho + 552 * KM), ConstellationSpec(i=math.pi / 2, t=36, p=3),
              SensorSpec(), SimConfig(duration=0.0))
    assert res.n_events == 0 and res.warnings


def test_seed_determinism_and_csv(tmp_path):
    o = OrbitGeometry(a=CONSTANTS.rho + 552 * KM)
    spec = ConstellationSpec(i=math.pi / 2, t=36, p=3)
    sim = SimConfig(duration=30 * DAY, n_targets=4, seed=3)
    a, b = run(o, spec, SensorSpec(), sim), run(o, spec, SensorSpec(), sim)
    assert a.events == b.events and a.n_events > 0
    assert all(e.target_range <= SensorSpec().w for e in a.events)
    assert [e.time for e in a.events] == sorted(e.time for e in a.events)
    path = tmp_path / "ev.csv"
    a.write_csv(path)
    rows = list(csv.reader(open(path)))
    assert rows[0] == ["time_s", "plane", "slot", "range_m"] and len(rows) == a.n_events + 1
    lo, hi = a.rate_ci()
    assert lo < a.mean_gap < hi


def test_doubling_t_halves_gap():
    o = OrbitGeometry(a=CONSTANTS.rho + 552 * KM)
    sim = SimConfig(duration=60 * DAY, n_targets=10, seed=1)
    g36 = run(o, ConstellationSpec(i=math.pi / 2, t=36, p=3), SensorSpec(), sim)
    g72 = run(o, ConstellationSpec(i=math.pi / 2, t=72, p=6), SensorSpec(), sim)
    ratio = g36.mean_gap / g72.mean_gap
    # Poisson counting noise on ~50 and ~100 events
    sigma = 2 * math.sqrt(1 / g36.n_events + 1 / g72.n_events)
    assert abs(ratio - 2) < 3 * sigma


def test_step_halving_keeps_count():
    o = OrbitGeometry(a=CONSTANTS.rho + 552 * KM)
    spec = ConstellationSpec(i=math.pi / 2, t=36, p=3)
    a = run(o, spec, SensorSpec(), SimConfig(duration=60 * DAY, n_targets=10, seed=2))
    b = run(o, spec, SensorSpec(), SimConfig(dt=0.5, duration=60 * DAY, n_targets=10, seed=2))
    assert abs(a.n_events - b.n_events) <= max(1, a.n_events // 100)


def test_earth_never_blocks_short_range():
    # a chord of length <= w between two points above the shell stays above the surface
    w, r = 100 * KM, R0
    half = w / 2
    assert math.sqrt(r ** 2 - half ** 2) > CONSTANTS.rho
