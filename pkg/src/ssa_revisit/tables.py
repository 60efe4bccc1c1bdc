"""Reference scenarios and their expected values, evaluated as flat CSV rows."""
from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from typing import Callable, Sequence

from ssa_revisit.baselines_xie import xie_adaptive_leo, xie_star
from ssa_revisit.constellation import ConstellationSpec, preset
from ssa_revisit.orbital_mechanics import CONSTANTS, OrbitGeometry
from ssa_revisit.revisit_engine import (
    CO_MOVING_TARGET,
    DAY,
    FIXED_TARGET,
    EngineConfig,
    revisit_report,
    revisit_sensitivity,
)
from ssa_revisit.sensor_model import SensorSpec

TABLE_IDS = ("tab1", "tab1_1", "tab2", "tab4", "tab5", "tab6", "tab7", "tab8", "tab9")

KM = 1e3
BASE_SHELL = 550 * KM

REFERENCE = {
    "tab1": {
        "delta_r_m": [2000, 6000, 10000, 20000, 40000, 60000, 80000, 90000],
        "xie": [29096, 9704.2, 5825.86, 2917.13, 1462.76, 977.97, 735.58, 654.78],
        "xie_star": [14548, 4852.1, 2912.93, 1458.56, 731.38, 488.99, 367.79, 327.39],
        "poisson": [14544, 4848.9, 2909.74, 1455.39, 728.21, 485.82, 364.62, 324.22],
    },
    "tab1_1": {36: 12.12, 72: 6.060, 144: 3.030, 216: 2.020, 288: 1.515},
    "tab2": {15: 21.39, 30: 19.11, 45: 17.14, 60: 15.37, 75: 13.72, 90: 12.12},
    # (case, p, apogee offset km, perigee offset km, T, T2)
    "tab4": [(1, 72, 2, 2, 0.3675, 6.98), (2, 72, 9, 2, 1.507, 2.54),
             (3, 72, 100, 2, 5.704, 0.276), (4, 22, 2, 2, 0.3675, 2.13)],
    "tab5": [(1, 8, 2, 2, 1.516, 4.263), (2, 8, 9, 2, 6.219, 1.551), (3, 8, 100, 2, 23.22, 0.169)],
    "tab6": {3000: [1.516, 6.219, 23.48, 76.14], 8000: [4.042, 2.475, 12.87, 43.46],
             50000: [25.26, 9.201, 5.324, 20.59]},
    "tab6_s_km": [2, 9, 100, 1000],
    "tab7": [[2.583, 2.354, 2.121, 1.905, 1.701],
             [2.354, 2.241, 2.055, 1.856, 1.659],
             [2.121, 2.055, 1.939, 1.772, 1.586],
             [1.905, 1.856, 1.772, 1.647, 1.477],
             [1.701, 1.659, 1.586, 1.477, 1.322]],
    "tab8": {549.5: 0.49, 550.0: 0.76, 550.5: 1.35, 551.0: 3.03, 551.5: 12.1},
    "tab9": {500: 0.00054, 1000: 0.00060, 1500: 0.00066, 2000: 0.00073},
}

HEADERS = {
    "tab1": ["delta_r_m", "model", "T_days", "paper_value", "rel_err"],
    "tab1_1": ["t", "p", "T_days", "paper_value", "rel_err"],
    "tab2": ["i_deg", "T_days", "paper_value", "rel_err"],
    "tab4": ["case", "p", "apogee_offset_km", "perigee_offset_km", "quantity", "value_days", "paper_value", "rel_err"],
    "tab5": ["case", "p", "apogee_offset_km", "perigee_offset_km", "quantity", "value_days", "paper_value", "rel_err"],
    "tab6": ["s_km", "w_m", "T_days", "paper_value", "rel_err"],
    "tab7": ["i_U_deg", "i_deg", "T_days", "paper_value", "rel_err"],
    "tab8": ["h0_km", "dT_dh0_day_per_km", "paper_value", "rel_err"],
    "tab9": ["h0_km", "dT_dh0_day_per_km", "paper_value", "rel_err"],
}


def rel_err(value: float, ref: float | None) -> float | None:
    if ref is None or ref == 0:
        return None
    return (value - ref) / ref


def _circular(alt: float, i: float = 0.0) -> OrbitGeometry:
    return OrbitGeometry(a=CONSTANTS.rho + alt, i=i)


def _target(perigee_alt: float, apogee_alt: float, i: float = 0.0) -> OrbitGeometry:
    return OrbitGeometry.from_altitudes(perigee_alt, apogee_alt, i=i)


def _T_days(target, spec, sensor, K) -> float:
    return revisit_report(target, spec, sensor, EngineConfig(K=K)).T / DAY


# cell evaluators; module-level so worker processes can import them


def _cell_tab1(dr, K):
    sensor = SensorSpec().with_work_distance(100 * KM)
    single = ConstellationSpec(i=math.pi / 2, t=1, p=1, h0=BASE_SHELL)
    xie = xie_adaptive_leo(dr, BASE_SHELL + dr, sensor.F)
    poisson = _T_days(_circular(BASE_SHELL + dr), single, sensor, K)
    return xie, xie_star(xie), poisson


def _cell_tab1_1(t, p, K):
    spec = ConstellationSpec(i=math.pi / 2, t=t, p=p, h0=BASE_SHELL)
    return _T_days(_circular(BASE_SHELL + 2 * KM), spec, SensorSpec(), K)


def _cell_tab2(i_deg, K):
    spec = ConstellationSpec(i=math.radians(i_deg), t=36, p=3, h0=BASE_SHELL)
    return _T_days(_circular(BASE_SHELL + 2 * KM), spec, SensorSpec(), K)


def _cell_case(name, p, apo_km, peri_km, K):
    base = preset(name)
    spec = ConstellationSpec(i=base.i, t=base.t, p=p, f=base.f, h0=base.h0)
    target = _target(base.h0 + peri_km * KM, base.h0 + apo_km * KM)
    r = revisit_report(target, spec, SensorSpec(), EngineConfig(K=K))
    return r.T / DAY, r.T2 / DAY


def _cell_tab6(s_km, w_m, K):
    spec = preset("custom_polar")
    sensor = SensorSpec().with_work_distance(w_m)
    return _T_days(_target(spec.h0 + 2 * KM, spec.h0 + s_km * KM), spec, sensor, K)


def _cell_tab7(iu_k, i_k, K):
    spec = ConstellationSpec(i=i_k * math.pi / 12, t=288, p=8, h0=BASE_SHELL)
    return _T_days(_circular(BASE_SHELL + 2 * KM, iu_k * math.pi / 12), spec, SensorSpec(), K)


def _cell_tab8(h0_km, K):
    spec = preset("custom_polar")
    d = revisit_sensitivity(FIXED_TARGET, spec, SensorSpec(), EngineConfig(K=K), h0=h0_km * KM,
                            dh=10.0, target_alt=552 * KM)
    return d / DAY * KM


def _cell_tab9(h0_km, K):
    spec = preset("custom_polar")
    d = revisit_sensitivity(CO_MOVING_TARGET, spec, SensorSpec(), EngineConfig(K=K), h0=h0_km * KM,
                            dh=10 * KM, offset=2 * KM)
    return d / DAY * KM


def _call(job):
    fn, args = job
    return fn(*args)


def run_cells(jobs_list: Sequence[tuple[Callable, tuple]], jobs: int = 1) -> list:
    """Evaluate cells, in parallel when ``jobs`` > 1; results keep input order."""
    if jobs <= 1 or len(jobs_list) <= 1:
        return [fn(*args) for fn, args in jobs_list]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(_call, jobs_list))


def build_table(table_id: str, K: int = 500, jobs: int = 1) -> tuple[list[str], list[list]]:
    """Rows of one reference table: computed values next to the reference ones."""
    if table_id not in TABLE_IDS:
        raise KeyError(f"unknown table {table_id!r}; known: {', '.join(TABLE_IDS)}")
    ref = REFERENCE[table_id] if table_id in REFERENCE else None
    rows: list[list] = []

    if table_id == "tab1":
        drs = ref["delta_r_m"]
        res = run_cells([(_cell_tab1, (dr, K)) for dr in drs], jobs)
        for k, (dr, (xie, star, poisson)) in enumerate(zip(drs, res)):
            for model, val, pv in (("xie", xie, ref["xie"][k]), ("xie_star", star, ref["xie_star"][k]),
                                   ("poisson", poisson, ref["poisson"][k])):
                rows.append([dr, model, val, pv, rel_err(val, pv)])

    elif table_id == "tab1_1":
        cells = [(t, p) for t in ref for p in (3, 6, 9)]
        res = run_cells([(_cell_tab1_1, (t, p, K)) for t, p in cells], jobs)
        rows = [[t, p, v, ref[t], rel_err(v, ref[t])] for (t, p), v in zip(cells, res)]

    elif table_id == "tab2":
        res = run_cells([(_cell_tab2, (i, K)) for i in ref], jobs)
        rows = [[i, v, ref[i], rel_err(v, ref[i])] for i, v in zip(ref, res)]

    elif table_id in ("tab4", "tab5"):
        name = "starlink_g1" if table_id == "tab4" else "custom_polar"
        res = run_cells([(_cell_case, (name, p, apo, peri, K)) for _, p, apo, peri, _, _ in ref], jobs)
        for (case, p, apo, peri, T_ref, T2_ref), (T, T2) in zip(ref, res):
            rows.append([case, p, apo, peri, "T", T, T_ref, rel_err(T, T_ref)])
            rows.append([case, p, apo, peri, "T2", T2, T2_ref, rel_err(T2, T2_ref)])

    elif table_id == "tab6":
        cells = [(s, w) for s in REFERENCE["tab6_s_km"] for w in ref]
        res = run_cells([(_cell_tab6, (s, w, K)) for s, w in cells], jobs)
        for (s, w), v in zip(cells, res):
            pv = ref[w][REFERENCE["tab6_s_km"].index(s)]
            rows.append([s, w, v, pv, rel_err(v, pv)])

    elif table_id == "tab7":
        cells = [(iu, i) for iu in range(1, 6) for i in range(1, 6)]
        res = run_cells([(_cell_tab7, (iu, i, K)) for iu, i in cells], jobs)
        for (iu, i), v in zip(cells, res):
            pv = ref[iu - 1][i - 1]
            rows.append([15 * iu, 15 * i, v, pv, rel_err(v, pv)])

    elif table_id == "tab8":
        res = run_cells([(_cell_tab8, (h, K)) for h in ref], jobs)
        rows = [[h, v, ref[h], rel_err(v, ref[h])] for h, v in zip(ref, res)]

    elif table_id == "tab9":
        res = run_cells([(_cell_tab9, (h, K)) for h in ref], jobs)
        rows = [[h, v, ref[h], rel_err(v, ref[h])] for h, v in zip(ref, res)]

    return HEADERS[table_id], rows
