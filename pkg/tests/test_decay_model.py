import math

import numpy as np
import pytest

from ssa_revisit import decay_model as dm
from ssa_revisit.constellation import preset
from ssa_revisit.orbital_mechanics import CONSTANTS, OrbitGeometry
from ssa_revisit.revisit_engine import FIXED_TARGET, EngineConfig, revisit_sensitivity
from ssa_revisit.sensor_model import SensorSpec

KM = 1e3
DAY = 86400.0
R550 = CONSTANTS.rho + 550 * KM


def test_bundled_table():
    t = dm.default_table()
    assert t.floor == 100 * KM and t.ceiling == 2000 * KM
    alts = [b[0] for b in t.breakpoints]
    dens = [b[1] for b in t.breakpoints]
    for h, d in zip(alts, dens):
        assert t.density(h) == pytest.approx(d, rel=1e-12)
    mid = 0.5 * (alts[3] + alts[4])
    assert t.density(mid) == pytest.approx(math.sqrt(dens[3] * dens[4]), rel=1e-12)
    assert dm.air_density(550 * KM) > dm.air_density(600 * KM)
    with pytest.raises(ValueError):
        dm.air_density(90 * KM)
    with pytest.raises(ValueError):
        dm.air_density(2100 * KM)


def test_table_validation():
    with pytest.raises(ValueError):
        dm.AtmosphereTable.from_points([1, 2], [1e-10, 2e-10])
    with pytest.raises(ValueError):
        dm.AtmosphereTable.from_points([2, 1], [2e-10, 1e-10])
    with pytest.raises(ValueError):
        dm.AtmosphereTable.from_points([1], [1e-10])


def test_table_file_and_env(tmp_path, monkeypatch):
    path = tmp_path / "atm.txt"
    path.write_text("# test table\n100 1e-9\n\n500 1e-12  # comment\n1000 1e-15\n")
    t = dm.AtmosphereTable.load(path)
    assert t.density(500 * KM) == pytest.approx(1e-12)
    monkeypatch.setenv(dm.ENV_TABLE, str(path))
    assert dm.default_table().ceiling == 1000 * KM
    monkeypatch.delenv(dm.ENV_TABLE)
    assert dm.default_table().ceiling == 2000 * KM
    bad = tmp_path / "bad.txt"
    bad.write_text("100 1e-9 7\n")
    with pytest.raises(ValueError):
        dm.AtmosphereTable.load(bad)


def test_decay_rate_arithmetic():
    rate = dm.decay_rate(R550, 100.0, density=lambda h: 2e-13)
    assert rate == pytest.approx(-math.sqrt(CONSTANTS.mu) * 2e-13 * math.sqrt(R550) / 100.0)
    assert rate == pytest.approx(-1.05e-4, rel=0.01)
    assert rate * DAY == pytest.approx(-9.1, abs=0.1)
    assert abs(dm.decay_rate(R550, 1e15)) < 1e-15
    assert abs(dm.decay_rate(CONSTANTS.rho + 400 * KM, 100)) > abs(dm.decay_rate(CONSTANTS.rho + 800 * KM, 100))
    with pytest.raises(ValueError):
        dm.decay_rate(R550, 0.0)


def test_decay_rate_negative_everywhere():
    hs = np.linspace(100, 2000, 400) * KM
    rates = [dm.decay_rate(CONSTANTS.rho + h, 100.0) for h in hs]
    assert all(r < 0 for r in rates)
    assert all(abs(b) < abs(a) for a, b in zip(rates, rates[1:]))


def test_zero_density_keeps_radius():
    traj = dm.propagate_decay(dm.DecayState(R550, 0.0, 100.0), 5 * DAY, density=lambda h: 0.0)
    assert np.all(traj.a == R550) and not traj.truncated


def test_thirty_day_run():
    s0 = dm.DecayState(R550, 0.0, 100.0)
    coarse = dm.propagate_decay(s0, 30 * DAY, dt=120.0)
    fine = dm.propagate_decay(s0, 30 * DAY, dt=60.0)
    assert abs(coarse.a[-1] - fine.a[-1]) / abs(fine.a[-1] - R550) < 1e-3
    assert np.all(np.diff(fine.a) <= 0)
    linear = dm.decay_rate(R550, 100.0) * 30 * DAY
    assert fine.a[-1] - R550 == pytest.approx(linear, rel=0.02)
    assert fine.t[-1] == pytest.approx(30 * DAY)
    # energy bookkeeping at every sample
    np.testing.assert_allclose(dm.specific_energy(fine.a), -CONSTANTS.mu / (2 * fine.a))
    assert fine.states[-1].a == fine.a[-1]


def test_truncation_at_floor():
    traj = dm.propagate_decay(dm.DecayState(CONSTANTS.rho + 130 * KM, 0.0, 1.0), 30 * DAY, dt=60.0)
    assert traj.truncated
    assert "atmosphere table" in traj.message
    assert traj.t[-1] < 30 * DAY


def test_propagate_validation():
    s0 = dm.DecayState(R550, 0.0, 100.0)
    with pytest.raises(ValueError):
        dm.propagate_decay(s0, DAY, dt=0.0)
    with pytest.raises(ValueError):
        dm.propagate_decay(s0, -1.0)
    with pytest.raises(ValueError):
        dm.DecayState(R550, 0.0, 0.0)


def test_uniform_shell_decay():
    # every satellite of a shell has the same radius, so every trajectory is identical
    spec = preset("custom_polar")
    a = [dm.propagate_decay(dm.DecayState(spec.radius(), 0.0, 100.0), 3 * DAY).a for _ in range(2)]
    np.testing.assert_array_equal(a[0], a[1])


def test_revisit_drift():
    cp = preset("custom_polar")
    tgt = OrbitGeometry(a=CONSTANTS.rho + 552 * KM)
    cfg = EngineConfig(K=100)
    t, a, dadt, dTdt = dm.revisit_drift(tgt, cp, SensorSpec(), cfg, 100.0, 2 * DAY, samples=2)
    assert len(t) == 3 and np.all(dadt < 0) and np.all(dTdt < 0)
    dTdh = revisit_sensitivity(FIXED_TARGET, cp, SensorSpec(), cfg, h0=550 * KM, dh=10.0)
    assert dTdt[0] == pytest.approx(dTdh * dm.decay_rate(R550, 100.0), rel=1e-12)
    _, _, dadt_inf, dTdt_inf = dm.revisit_drift(tgt, cp, SensorSpec(), cfg, 1e18, DAY, samples=1)
    assert np.all(np.abs(dTdt_inf) < 1e-12)


def test_revisit_drift_after_target_leaves_band():
    # a fast-sinking shell drops the fixed 552 km target out of the 3 km band within a month
    cp = preset("custom_polar")
    tgt = OrbitGeometry(a=CONSTANTS.rho + 552 * KM)
    t, a, _, dTdt = dm.revisit_drift(tgt, cp, SensorSpec(), EngineConfig(K=50), 50.0, 30 * DAY, samples=3)
    assert math.isfinite(dTdt[0]) and dTdt[0] < 0
    assert np.isinf(dTdt[-1])
    lost = int(np.argmax(np.isinf(dTdt)))
    assert np.all(np.isinf(dTdt[lost:]))
    assert 552 * KM - (a[lost] - CONSTANTS.rho) > SensorSpec().reach_depth
