import csv
import io
import json
import math

import pytest

from ssa_revisit.cli import COMPARE_HEADER, DECAY_HEADER, EVAL_HEADER, ORACLE_HEADER, fmt, main


def _run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, list(csv.reader(io.StringIO(out))), err


def _cfg(tmp_path, data, name="cfg.json"):
    path = tmp_path / name
    path.write_text(json.dumps(data))
    return str(path)


def test_fmt():
    assert fmt(0.1) == "0.1" and fmt(math.inf) == "inf" and fmt(3) == "3" and fmt(None) == ""
    assert fmt(True) == "true" and fmt(float("nan")) == "nan"


def test_eval_starlink_case1(capsys):
    code, rows, _ = _run(capsys, "eval", "--K", "100")
    assert code == 0 and rows[0] == EVAL_HEADER
    vals = dict(zip(rows[0], map(float, rows[1])))
    assert vals["T_days"] == pytest.approx(0.3675, rel=0.01)
    assert vals["T2_days"] == pytest.approx(6.96, rel=0.01)
    assert vals["Tr_days"] == vals["T2_days"]
    assert 0 < vals["Ca"] < 1 and vals["Cs"] > 0


def test_eval_custom_polar_case2(capsys):
    code, rows, _ = _run(capsys, "eval", "--preset", "custom_polar", "--apogee-km", "559")
    assert code == 0
    assert float(rows[1][1]) == pytest.approx(6.219, rel=0.01)


def test_eval_infeasible(capsys):
    code, rows, err = _run(capsys, "eval", "--perigee-km", "540", "--apogee-km", "545", "--K", "50")
    assert code == 3 and "target below constellation shell" in err and rows == []


def test_config_errors(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert _run(capsys, "eval", "--config", str(bad))[0] == 2
    assert _run(capsys, "eval", "--preset", "nope")[0] == 2
    assert _run(capsys, "eval", "--perigee-km", "560", "--apogee-km", "555")[0] == 2
    assert _run(capsys, "eval", "--config", _cfg(tmp_path, {"sensor": {"fov_rule": "cubic"}}))[0] == 2
    assert _run(capsys, "eval", "--config", _cfg(tmp_path, [1, 2]))[0] == 2
    assert _run(capsys, "eval", "--jobs", "0")[0] == 2


def test_io_error(capsys, tmp_path):
    assert _run(capsys, "eval", "--config", str(tmp_path / "missing.json"))[0] == 4
    assert _run(capsys, "eval", "--K", "20", "--out", str(tmp_path / "no" / "dir.csv"))[0] == 4


def test_flags_override_file(capsys, tmp_path):
    path = _cfg(tmp_path, {"constellation": "custom_polar", "target": {"apogee_km": 559}, "engine": {"K": 50}})
    _, from_file, _ = _run(capsys, "eval", "--config", path)
    _, overridden, _ = _run(capsys, "eval", "--config", path, "--apogee-km", "552")
    _, direct, _ = _run(capsys, "eval", "--preset", "custom_polar", "--K", "50")
    assert overridden == direct and from_file != direct


def test_out_and_meta_are_reproducible(capsys, tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(["eval", "--K", "50", "--out", str(a)]) == 0
    assert main(["eval", "--K", "50", "--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    assert a.read_bytes().endswith(b"\n")
    meta = (tmp_path / "a.csv.meta").read_text()
    assert "command: eval" in meta and "created_utc" in meta


def test_table_tab1_1(capsys):
    code, rows, _ = _run(capsys, "table", "tab1_1", "--K", "50")
    assert code == 0 and rows[0] == ["t", "p", "T_days", "paper_value", "rel_err"]
    assert len(rows) == 16
    by_t = {}
    for t, p, T, *_ in rows[1:]:
        by_t.setdefault(t, set()).add(round(float(T), 9))
    assert all(len(v) == 1 for v in by_t.values())


def test_table_tab7_symmetric(capsys):
    _, rows, _ = _run(capsys, "table", "tab7", "--K", "50")
    T = {(r[0], r[1]): float(r[2]) for r in rows[1:]}
    assert len(T) == 25
    for (a, b), v in T.items():
        assert v == pytest.approx(T[(b, a)], rel=0.01)


def test_sweep(capsys, tmp_path):
    grid = {"w": [3, 50], "alpha": {"min": 45, "max": 90, "count": 2}, "apogee_offset": [2]}
    path = _cfg(tmp_path, {"constellation": "custom_polar", "engine": {"K": 30}, "grid": grid})
    code, rows, _ = _run(capsys, "sweep", "--config", path, "--jobs", "1")
    assert code == 0
    assert rows[0][:3] == ["w_km", "alpha_deg", "apogee_offset_km"] and rows[0][-1] == "status"
    assert [r[:2] for r in rows[1:]] == [["3.0", "45.0"], ["3.0", "90.0"], ["50.0", "45.0"], ["50.0", "90.0"]]
    _, parallel, _ = _run(capsys, "sweep", "--config", path, "--jobs", "2")
    assert parallel == rows


def test_sweep_infeasible_cell(capsys, tmp_path):
    path = _cfg(tmp_path, {"constellation": "custom_polar", "engine": {"K": 20},
                           "target": {"perigee_km": 560, "apogee_km": 560}, "grid": {"w": [3, 20]}})
    code, rows, _ = _run(capsys, "sweep", "--config", path, "--jobs", "1")
    assert code == 0
    assert rows[1][-1] == "infeasible" and rows[1][-2] == "inf"
    assert rows[2][-1] == "ok"


def test_sweep_single_point_matches_eval(capsys, tmp_path):
    path = _cfg(tmp_path, {"constellation": "custom_polar", "engine": {"K": 40}, "grid": {"w": [3]}})
    _, sweep, _ = _run(capsys, "sweep", "--config", path, "--jobs", "1")
    _, ev, _ = _run(capsys, "eval", "--config", path)
    assert sweep[1][1:7] == ev[1][:6]


def test_sweep_errors(capsys, tmp_path):
    assert _run(capsys, "sweep", "--config", _cfg(tmp_path, {"grid": {"zeta": [1]}}))[0] == 2
    assert _run(capsys, "sweep", "--config", _cfg(tmp_path, {}))[0] == 2
    assert _run(capsys, "sweep", "--config", _cfg(tmp_path, {"grid": {"w": {"min": 5, "max": 1}}}))[0] == 2


def test_compare(capsys, tmp_path):
    code, rows, _ = _run(capsys, "compare", "--K", "20", "--jobs", "1")
    assert code == 0 and rows[0] == COMPARE_HEADER and len(rows) == 9
    assert all(float(r[4]) == 2.0 for r in rows[1:])
    path = _cfg(tmp_path, {"compare": {"delta_r_m": []}})
    code, rows, _ = _run(capsys, "compare", "--config", path)
    assert code == 0 and rows == [COMPARE_HEADER]


def test_decay(capsys, tmp_path):
    path = _cfg(tmp_path, {"constellation": "custom_polar", "engine": {"K": 30},
                           "decay": {"samples": 3, "horizon_days": 2}})
    code, rows, _ = _run(capsys, "decay", "--config", path, "--B", "1e12")
    assert code == 0 and rows[0] == DECAY_HEADER
    a = [float(r[1]) for r in rows[1:]]
    assert max(a) - min(a) < 1e-6
    code, rows, _ = _run(capsys, "decay", "--config", path, "--B", "100")
    a = [float(r[1]) for r in rows[1:]]
    assert all(y <= x for x, y in zip(a, a[1:])) and a[-1] < a[0]
    assert all(float(r[3]) < 0 for r in rows[1:])
    assert _run(capsys, "decay", "--config", path, "--B", "-1")[0] == 2


def test_oracle_zero_duration(capsys):
    code, rows, err = _run(capsys, "oracle", "--preset", "custom_polar", "--duration-days", "0", "--K", "20")
    assert code == 0 and rows[0] == ORACLE_HEADER
    assert rows[1][1] == "0" and "warning" in err


def test_oracle_seeds(capsys, tmp_path):
    cfg = {"constellation": {"i_deg": 90, "t": 36, "p": 3}, "engine": {"K": 50}}
    path = _cfg(tmp_path, cfg)
    ev = tmp_path / "ev.csv"
    out = []
    for seed in (1, 2):
        code, rows, _ = _run(capsys, "oracle", "--config", path, "--seed", str(seed),
                             "--duration-days", "60", "--n-targets", "5", "--events", str(ev))
        assert code == 0
        out.append(rows[1])
    assert out[0][2] == out[1][2]
    g1, g2 = float(out[0][0]), float(out[1][0])
    n1, n2 = int(out[0][1]), int(out[1][1])
    assert abs(g1 - g2) < 3 * math.sqrt(g1 ** 2 / n1 + g2 ** 2 / n2)
    assert ev.read_text().startswith("time_s,plane,slot,range_m\n")


def test_version(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["--version"])
    assert exc.value.code == 0
