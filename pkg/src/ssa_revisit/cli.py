"""Command-line front end: ``ssa-revisit eval|table|sweep|compare|decay|oracle``.

Configuration is a JSON file; command-line flags override file values, which
override built-in defaults. Altitudes are in km, angles in degrees and periods
in days at this boundary; everything inside the package is SI.
"""
from __future__ import annotations

import argparse
import csv
import io
import itertools
import json
import math
import os
import platform
import sys
from dataclasses import dataclass, field, replace
from datetime import datetime, timezone

import numpy as np

from ssa_revisit import __version__
from ssa_revisit.baselines_xie import xie_adaptive_leo, xie_star
from ssa_revisit.constellation import ConstellationSpec, preset
from ssa_revisit.coverage_metrics import LayerSet, ShellRegion, availability, stationary_coverage
from ssa_revisit.decay_model import DecayState, propagate_decay, revisit_drift
from ssa_revisit.oracle_sim import SimConfig, run as run_oracle
from ssa_revisit.orbital_mechanics import CONSTANTS, OrbitGeometry
from ssa_revisit.revisit_engine import (
    DAY,
    EngineConfig,
    InfeasibleError,
    infeasibility_reason,
    revisit_report,
)
from ssa_revisit.sensor_model import SensorSpec
from ssa_revisit.tables import TABLE_IDS, build_table, run_cells

KM = 1e3
EXIT_OK, EXIT_CONFIG, EXIT_INFEASIBLE, EXIT_IO = 0, 2, 3, 4

EVAL_HEADER = ["lambda_per_s", "T_days", "T1_days", "T2_days", "T3_s", "Tr_days", "Ca", "Cs"]
COMPARE_HEADER = ["delta_r_m", "xie_days", "xie_star_days", "poisson_days", "ratio"]
DECAY_HEADER = ["t_days", "a_km", "dadt_m_per_day", "dTr_dt"]
ORACLE_HEADER = ["empirical_mean_gap_days", "n_events", "engine_T_days", "rel_diff"]
REPORT_COLUMNS = ["lambda_per_s", "T_days", "T1_days", "T2_days", "T3_s", "Tr_days"]

SWEEP_AXES = {
    "w": "w_km", "alpha": "alpha_deg", "apogee_offset": "apogee_offset_km",
    "i": "i_deg", "i_U": "i_U_deg", "t": "t", "p": "p", "K": "K",
}
INTEGER_AXES = {"t", "p", "K"}


class ConfigError(ValueError):
    """Invalid or inconsistent configuration."""


# ---------------------------------------------------------------- formatting

def fmt(value) -> str:
    """Locale-independent, round-trippable text for one CSV cell."""
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        v = float(value)
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return repr(v)
    return str(value)


def to_csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt(x) for x in row])
    return buf.getvalue()


# ---------------------------------------------------------------- config

@dataclass
class RunConfig:
    """Resolved configuration for one invocation."""

    constellation: ConstellationSpec
    sensor: SensorSpec
    target: OrbitGeometry
    engine: EngineConfig
    fov_rule: str = "tangent"
    raw: dict = field(default_factory=dict)


DEFAULTS = {
    "constellation": "starlink_g1",
    "sensor": {"alpha_deg": 90.0, "w_km": 3.0, "fov_rule": "tangent"},
    "target": {"perigee_km": 552.0, "apogee_km": 552.0, "i_deg": 0.0},
    "engine": {"K": 500, "raan_samples": None, "clamp_P": True, "pyramid": "truncated"},
}


def _merge(base: dict, override: dict) -> dict:
    out = dict(base)
    for k, v in override.items():
        if isinstance(v, dict) and isinstance(out.get(k), dict):
            out[k] = _merge(out[k], v)
        else:
            out[k] = v
    return out


def load_config(path: str | None) -> dict:
    if path is None:
        return {}
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc})") from exc
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: top level must be an object")
    return data


def _constellation(value) -> ConstellationSpec:
    if isinstance(value, str):
        try:
            return preset(value)
        except KeyError as exc:
            raise ConfigError(str(exc.args[0])) from exc
    if isinstance(value, dict):
        base = preset(value["preset"]) if "preset" in value else None
        get = lambda k, d: value.get(k, d)  # noqa: E731
        return ConstellationSpec(
            i=math.radians(get("i_deg", math.degrees(base.i) if base else 90.0)),
            t=int(get("t", base.t if base else 36)),
            p=int(get("p", base.p if base else 3)),
            f=int(get("f", base.f if base else 1)),
            h0=get("h0_km", base.h0 / KM if base else 550.0) * KM,
        )
    raise ConfigError("constellation must be a preset name or an object")


def _sensor(cfg: dict) -> tuple[SensorSpec, str]:
    rule = cfg.get("fov_rule", "tangent")
    if rule not in ("tangent", "sine", "fixed"):
        raise ConfigError(f"unknown fov_rule {rule!r}")
    w = cfg.get("w_km", 3.0) * KM
    base = SensorSpec(alpha=math.radians(cfg.get("alpha_deg", 90.0)), w=w,
                      gamma=int(cfg.get("gamma", 2048)), kappa=float(cfg.get("kappa", 1.0)),
                      l=float(cfg.get("l_m", 1.0)))
    if "F_deg" in cfg:
        return replace(base, F=math.radians(cfg["F_deg"])), "fixed"
    if rule != "fixed":
        base = base.with_work_distance(w, rule=rule)
    return base, rule


def resolve(raw: dict) -> RunConfig:
    """Turn a merged config tree into domain objects; raises ConfigError."""
    cfg = _merge(DEFAULTS, raw)
    try:
        spec = _constellation(cfg["constellation"])
        sensor, rule = _sensor(cfg["sensor"])
        t = cfg["target"]
        target = OrbitGeometry.from_altitudes(t["perigee_km"] * KM, t["apogee_km"] * KM,
                                              i=math.radians(t.get("i_deg", 0.0)))
        e = cfg["engine"]
        engine = EngineConfig(K=int(e.get("K", 500)), raan_samples=e.get("raan_samples"),
                              clamp_P=bool(e.get("clamp_P", True)), pyramid=e.get("pyramid", "truncated"))
    except ConfigError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"invalid configuration: {exc}") from exc
    return RunConfig(spec, sensor, target, engine, rule, cfg)


def apply_flags(raw: dict, args: argparse.Namespace) -> dict:
    """Command-line flags take precedence over the file."""
    over: dict = {}

    def put(section, key, value):
        if value is not None:
            over.setdefault(section, {})[key] = value

    if getattr(args, "preset", None):
        over["constellation"] = args.preset
    put("target", "perigee_km", getattr(args, "perigee_km", None))
    put("target", "apogee_km", getattr(args, "apogee_km", None))
    put("target", "i_deg", getattr(args, "target_i_deg", None))
    put("sensor", "w_km", getattr(args, "w_km", None))
    put("sensor", "alpha_deg", getattr(args, "alpha_deg", None))
    put("engine", "K", getattr(args, "K", None))
    return _merge(raw, over)


# ---------------------------------------------------------------- commands

def cmd_eval(rc: RunConfig) -> tuple[list[str], list[list]]:
    reason = infeasibility_reason(rc.target, rc.constellation, rc.sensor)
    report = revisit_report(rc.target, rc.constellation, rc.sensor, rc.engine)
    if report.lam <= 0:
        raise InfeasibleError(reason or "target never enters the detection region")
    cov = rc.raw.get("coverage", {})
    region_km = cov.get("region_km", [200.0, 2000.0])
    region = ShellRegion(region_km[0] * KM, region_km[1] * KM)
    layers = LayerSet((rc.constellation.h0,), w=rc.sensor.w)
    Ca = availability(layers, region, apply_w_restriction=bool(cov.get("apply_w_restriction", True)))
    Cs = stationary_coverage(rc.constellation.t, rc.sensor.w, rc.sensor.F, region)
    row = [report.lam, report.T / DAY, report.T1 / DAY, report.T2 / DAY, report.T3, report.Tr / DAY, Ca, Cs]
    return EVAL_HEADER, [row]


def cmd_table(table_id: str, K: int, jobs: int):
    return build_table(table_id, K=K, jobs=jobs)


def _axis_values(name: str, spec) -> list:
    if isinstance(spec, list):
        vals = spec
    elif isinstance(spec, dict) and "values" in spec:
        vals = spec["values"]
    elif isinstance(spec, dict):
        lo, hi, n = spec["min"], spec["max"], int(spec.get("count", 1))
        if n < 1 or lo > hi:
            raise ConfigError(f"axis {name}: need count >= 1 and min <= max")
        spacing = spec.get("spacing", "linear")
        if spacing == "linear":
            vals = list(np.linspace(lo, hi, n)) if n > 1 else [lo]
        elif spacing == "log":
            if lo <= 0:
                raise ConfigError(f"axis {name}: log spacing needs min > 0")
            vals = list(np.geomspace(lo, hi, n)) if n > 1 else [lo]
        else:
            raise ConfigError(f"axis {name}: unknown spacing {spacing!r}")
    else:
        raise ConfigError(f"axis {name}: expected a list or an object")
    if not vals:
        raise ConfigError(f"axis {name}: no values")
    if name in INTEGER_AXES:
        return [int(round(float(v))) for v in vals]
    return [float(v) for v in vals]


def sweep_axes(grid: dict) -> list[tuple[str, list]]:
    axes = []
    for name, spec in grid.items():
        if name not in SWEEP_AXES:
            raise ConfigError(f"unknown sweep axis {name!r}; known: {', '.join(SWEEP_AXES)}")
        axes.append((name, _axis_values(name, spec)))
    if not axes:
        raise ConfigError("sweep grid is empty")
    return axes


def _sweep_cell(raw: dict, point: dict):
    """One grid point; returns the report columns plus a status string."""
    cfg = _merge(DEFAULTS, raw)
    over: dict = {}
    for name, v in point.items():
        if name == "w":
            over.setdefault("sensor", {})["w_km"] = v
        elif name == "alpha":
            over.setdefault("sensor", {})["alpha_deg"] = v
        elif name == "apogee_offset":
            h0 = _constellation(cfg["constellation"]).h0 / KM
            over.setdefault("target", {})["apogee_km"] = h0 + v
        elif name == "i_U":
            over.setdefault("target", {})["i_deg"] = v
        elif name == "K":
            over.setdefault("engine", {})["K"] = v
        else:
            c = cfg["constellation"]
            base = c if isinstance(c, dict) else {"preset": c}
            key = "i_deg" if name == "i" else name
            over["constellation"] = _merge(base, {key: v})
            cfg["constellation"] = over["constellation"]
    try:
        rc = resolve(_merge(raw, over))
    except ConfigError as exc:
        return [math.nan] * 6 + [f"invalid: {exc}"]
    r = revisit_report(rc.target, rc.constellation, rc.sensor, rc.engine)
    status = "ok" if r.lam > 0 else "infeasible"
    return [r.lam, r.T / DAY, r.T1 / DAY, r.T2 / DAY, r.T3, r.Tr / DAY, status]


def cmd_sweep(raw: dict, jobs: int = 1):
    """Long-format grid in lexicographic axis order."""
    grid = raw.get("grid")
    if not isinstance(grid, dict):
        raise ConfigError("sweep needs a 'grid' object")
    axes = sweep_axes(grid)
    resolve(raw)  # validate the base configuration up front
    names = [n for n, _ in axes]
    points = [dict(zip(names, combo)) for combo in itertools.product(*(v for _, v in axes))]
    results = run_cells([(_sweep_cell, (raw, pt)) for pt in points], jobs)
    header = [SWEEP_AXES[n] for n in names] + REPORT_COLUMNS + ["status"]
    rows = [[pt[n] for n in names] + res for pt, res in zip(points, results)]
    return header, rows


def _compare_cell(dr: float, h0: float, w: float, K: int):
    sensor = SensorSpec().with_work_distance(w)
    single = ConstellationSpec(i=math.pi / 2, t=1, p=1, h0=h0)
    xie = xie_adaptive_leo(dr, h0 + dr, sensor.F)
    star = xie_star(xie)
    target = OrbitGeometry(a=CONSTANTS.rho + h0 + dr)
    poisson = revisit_report(target, single, sensor, EngineConfig(K=K)).T / DAY
    return [dr, xie, star, poisson, xie / star]


def cmd_compare(raw: dict, jobs: int = 1):
    c = raw.get("compare", {})
    drs = c.get("delta_r_m", [2000, 6000, 10000, 20000, 40000, 60000, 80000, 90000])
    h0 = c.get("h0_km", 550.0) * KM
    w = c.get("w_km", 100.0) * KM
    K = int(_merge(DEFAULTS, raw)["engine"].get("K", 500))
    if any(not 0 < dr <= w for dr in drs):
        raise ConfigError("every delta_r_m must lie in (0, w]")
    rows = run_cells([(_compare_cell, (float(dr), h0, w, K)) for dr in drs], jobs)
    return COMPARE_HEADER, rows


def cmd_decay(rc: RunConfig, notes: list[str]):
    d = rc.raw.get("decay", {})
    B = float(d.get("B", 100.0))
    horizon = float(d.get("horizon_days", 30.0)) * DAY
    samples = int(d.get("samples", 30))
    mode = d.get("mode", "fixed-target")
    if B <= 0:
        raise ConfigError("ballistic coefficient B must be positive")
    spec = rc.constellation
    traj = propagate_decay(DecayState(spec.radius(), 0.0, B), horizon, float(d.get("dt_s", 60.0)))
    if traj.truncated:
        notes.append(traj.message)
        horizon = float(traj.t[-1])
    times, a, dadt, dTdt = revisit_drift(rc.target, spec, rc.sensor, rc.engine, B, horizon,
                                         samples=samples, mode=mode)
    lost = np.flatnonzero(~np.isfinite(dTdt))
    if lost.size:
        notes.append(f"target leaves the sensor band after {times[lost[0]] / DAY:.2f} d; dT/dt reported as inf")
    rows = [[t / DAY, ai / KM, r * DAY, g] for t, ai, r, g in zip(times, a, dadt, dTdt)]
    return DECAY_HEADER, rows


def cmd_oracle(rc: RunConfig, notes: list[str], events_path: str | None = None):
    o = rc.raw.get("oracle", {})
    sim = SimConfig(dt=float(o.get("dt_s", 1.0)), duration=float(o.get("duration_days", 30.0)) * DAY,
                    seed=int(o.get("seed", 0)), n_targets=int(o.get("n_targets", 1)),
                    coarse_dt=float(o.get("coarse_dt_s", 60.0)))
    result = run_oracle(rc.target, rc.constellation, rc.sensor, sim)
    notes.extend(result.warnings)
    if events_path:
        result.write_csv(events_path)
    T = revisit_report(rc.target, rc.constellation, rc.sensor, rc.engine).T / DAY
    gap = result.mean_gap / DAY
    rel = (gap - T) / T if math.isfinite(gap) and math.isfinite(T) else math.nan
    return ORACLE_HEADER, [[gap, result.n_events, T, rel]]


# ---------------------------------------------------------------- entry point

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON configuration file")
    common.add_argument("--jobs", type=int, default=None, help="worker processes (default: all CPUs)")
    common.add_argument("--out", help="write CSV here instead of stdout")
    common.add_argument("--preset", help="constellation preset name")
    common.add_argument("--perigee-km", type=float)
    common.add_argument("--apogee-km", type=float)
    common.add_argument("--target-i-deg", type=float)
    common.add_argument("--w-km", type=float)
    common.add_argument("--alpha-deg", type=float)
    common.add_argument("--K", type=int)

    parser = argparse.ArgumentParser(prog="ssa-revisit", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("eval", parents=[common], help="evaluate one scenario")
    tab = sub.add_parser("table", parents=[common], help="reproduce a reference table")
    tab.add_argument("table_id", choices=TABLE_IDS)
    sub.add_parser("sweep", parents=[common], help="grid sweep defined by the config 'grid'")
    sub.add_parser("compare", parents=[common], help="Poisson engine vs repeat-track baseline")
    dec = sub.add_parser("decay", parents=[common], help="shell decay and revisit drift")
    dec.add_argument("--B", type=float, help="ballistic coefficient (kg/m^2)")
    dec.add_argument("--horizon-days", type=float)
    ora = sub.add_parser("oracle", parents=[common], help="brute-force simulation cross-check")
    ora.add_argument("--seed", type=int)
    ora.add_argument("--duration-days", type=float)
    ora.add_argument("--n-targets", type=int)
    ora.add_argument("--events", help="write the event log CSV here")
    return parser


def _write_meta(path: str, args: argparse.Namespace, raw: dict, notes: list[str]) -> None:
    lines = [
        f"command: {args.command}",
        f"version: {__version__}",
        f"python: {platform.python_version()}",
        f"created_utc: {datetime.now(timezone.utc).isoformat(timespec='seconds')}",
        f"argv: {' '.join(sys.argv[1:])}",
        "config: " + json.dumps(raw, sort_keys=True),
    ]
    lines += [f"note: {n}" for n in notes]
    with open(path + ".meta", "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    jobs = args.jobs if args.jobs is not None else (os.cpu_count() or 1)
    notes: list[str] = []
    try:
        raw = apply_flags(load_config(args.config), args)
        if args.command == "decay":
            d = raw.setdefault("decay", {})
            if args.B is not None:
                d["B"] = args.B
            if args.horizon_days is not None:
                d["horizon_days"] = args.horizon_days
        if args.command == "oracle":
            o = raw.setdefault("oracle", {})
            for key, val in (("seed", args.seed), ("duration_days", args.duration_days),
                             ("n_targets", args.n_targets)):
                if val is not None:
                    o[key] = val
        if jobs < 1:
            raise ConfigError("--jobs must be at least 1")

        if args.command == "eval":
            header, rows = cmd_eval(resolve(raw))
        elif args.command == "table":
            K = int(_merge(DEFAULTS, raw)["engine"].get("K", 500))
            header, rows = cmd_table(args.table_id, K, jobs)
        elif args.command == "sweep":
            header, rows = cmd_sweep(raw, jobs)
        elif args.command == "compare":
            header, rows = cmd_compare(raw, jobs)
        elif args.command == "decay":
            header, rows = cmd_decay(resolve(raw), notes)
        else:
            header, rows = cmd_oracle(resolve(raw), notes, args.events)
        text = to_csv(header, rows)
        if args.out:
            with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
                fh.write(text)
            _write_meta(args.out, args, raw, notes)
        else:
            sys.stdout.write(text)
        for n in notes:
            print(f"warning: {n}", file=sys.stderr)
        return EXIT_OK
    except InfeasibleError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
