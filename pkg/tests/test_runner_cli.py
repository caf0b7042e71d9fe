from __future__ import annotations

import csv
import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from jointerg.errors import ConfigError, StageError
from jointerg.runner import (STAGES, default_config, emit, parse_config, parse_tuple_spec,
                             run_pipeline, to_csv_text)
from jointerg.runner.cli import main

XLOGX = """
[function]
s_part = x*log(x)
p_part = pi*x
mode = hardy

[system]
alpha = sqrt(2); sqrt(3)

[schedule]
N = 1000, 10000
verify_N = 2000, 20000

[cutoffs]
samples = 200
cov_samples = 100
"""

LOGSQ = """
[function]
s_part = log(x)^2
p_part = sqrt(2)*x^2

[system]
alpha = sqrt(3)

[schedule]
N = 1000
verify_N = 2000
"""

CASE3 = """
[function]
s_part = 0
p_part = x
mode = case3
"""


@pytest.fixture(scope="module")
def xlogx_report():
    return run_pipeline(parse_config(XLOGX))


def _strip_clock(text: str) -> dict:
    data = json.loads(text)
    data.pop("wall_clock")
    return data


# ---------------------------------------------------------------- configs

def test_defaults_are_valid():
    cfg = default_config()
    cfg.validate()
    assert cfg.get("function", "mode") == "hardy"
    assert cfg.get("schedule", "verify_N") == (10000, 100000, 1000000)


def test_exponent_notation_in_grids():
    cfg = parse_config("[schedule]\nN = 1e3, 2_000\n")
    assert cfg.get("schedule", "N") == (1000, 2000)


@pytest.mark.parametrize("text", ["[nonsense]\nx = 1\n", "[function]\nfoo = 1\n",
                                  "[function]\nmode = hardest\n", "[cutoffs]\nsamples = many\n",
                                  "[function]\nmode = case1\n", "[system]\nalpha = 1, 2; 3\n",
                                  "not an ini file"])
def test_strict_parsing_rejects(text):
    with pytest.raises(ConfigError):
        parse_config(text)


def test_inline_comments_do_not_split_alpha_rows():
    cfg = parse_config("[function]\nmode = hardy  # window mode\n"
                       "[system]\nalpha = 1/2; sqrt(2)  # two rows\n")
    assert cfg.get("system", "alpha") == (("1/2",), ("sqrt(2)",))
    assert cfg.get("function", "mode") == "hardy"


def test_ini_round_trip_of_a_worked_config():
    cfg = parse_config(XLOGX)
    assert parse_config(cfg.to_ini()) == cfg
    assert parse_config(cfg.to_ini()).digest == cfg.digest


_ident = st.sampled_from(["x*log(x)", "log(x)^2", "x^(3/2)", "x^(1/2)*log(x)"])


@settings(max_examples=40, deadline=None)
@given(s=_ident, grid=st.lists(st.integers(1, 10 ** 7), max_size=4),
       bits=st.integers(53, 1024), seed=st.integers(0, 2 ** 31),
       threads=st.integers(1, 8), thr=st.floats(1e-4, 1.0),
       fmts=st.lists(st.sampled_from(["json", "csv", "text"]), min_size=1, unique=True))
def test_round_trip_property(s, grid, bits, seed, threads, thr, fmts):
    cfg = default_config().replace(function__s_part=s, schedule__N=tuple(grid),
                                   precision__bits=bits, run__seed=seed, run__threads=threads,
                                   thresholds__threshold=thr, output__formats=tuple(fmts))
    assert parse_config(cfg.to_ini()) == cfg


def test_tuple_spec():
    kwargs, A = parse_tuple_spec("[tuple]\nd = 2\nell = 2\nK = 2\ngenerators = logN\n"
                                 "[lower_order]\n1.1 = 1/2, logN\n")
    assert kwargs["generators"] == ("logN",)
    assert (A.d, A.ell, A.degree) == (2, 2, 2)
    with pytest.raises(ConfigError):
        parse_tuple_spec("[tuple]\nd = 2\n[lower_order]\n1.1 = 1\n")
    with pytest.raises(ConfigError):
        parse_tuple_spec("[tuple]\nd = 1\nK = 2\n[lower_order]\n1.1 = 1/2 + q\n")


# ---------------------------------------------------------------- pipeline

def test_x_log_x_pipeline(xlogx_report):
    rep = xlogx_report
    assert rep.ok and list(rep.stages) == list(STAGES)
    assert rep.stages["select"]["K"] == 2
    assert rep.stages["select"]["L"] == "N^(7/12)"
    assert rep.stages["taylor"]["coefficients"] == ["pi*N + N*log(N)", "1 + pi + log(N)",
                                                    "(1/2)/N"]
    assert rep.stages["change_of_variables"]["D_inv"] == "sqrt(2)*N^(1/2)"
    assert all(c["substitution_gap"] <= 10 for c in rep.stages["change_of_variables"]["cells"])
    assert rep.stages["pet"]["levels_ok"]
    assert rep.stages["verify"]["verdict"] is True


def test_log_squared_pipeline():
    rep = run_pipeline(parse_config(LOGSQ))
    assert rep.stages["select"]["K"] == 3
    prof = rep.stages["select"]["L_profile"]
    assert prof["power"] == pytest.approx(1, abs=1e-6)
    assert prof["log_power"] == pytest.approx(-7 / 24, abs=1e-2)
    assert rep.stages["taylor"]["coefficients"][3] == "-1/N^3 + (2/3)*log(N)/N^3"


def test_case3_with_linear_h_aborts_at_decompose():
    with pytest.raises(StageError) as info:
        run_pipeline(parse_config(CASE3))
    err = info.value
    assert err.stage == "decompose" and err.kind == "hypothesis"
    assert "log < s_h" in str(err) and "s_h = 0" in str(err)
    assert err.report.error["stage"] == "decompose"
    assert err.report.stages == {}


def test_stop_after():
    rep = run_pipeline(parse_config(XLOGX), stop_after="select")
    assert list(rep.stages) == ["decompose", "select"]
    with pytest.raises(ValueError):
        run_pipeline(parse_config(XLOGX), stop_after="lunch")


def test_reports_are_deterministic(xlogx_report, tmp_path):
    cfg = parse_config(XLOGX)
    again = run_pipeline(cfg)
    threaded = run_pipeline(cfg.replace(run__threads=4))
    a = emit(xlogx_report, tmp_path / "a", ("json", "csv"))
    b = emit(again, tmp_path / "b", ("json", "csv"))
    assert _strip_clock(open(a[0]).read()) == _strip_clock(open(b[0]).read())
    assert open(a[1]).read() == open(b[1]).read()
    # worker count lives in the config, so only the numbers are compared
    one, four = _strip_clock(open(a[0]).read()), json.loads(
        open(emit(threaded, tmp_path / "c", ("json",))[0]).read())
    assert one["stages"] == four["stages"]


def test_emitted_files_reparse(xlogx_report, tmp_path):
    paths = emit(xlogx_report, tmp_path)
    assert [p.rsplit(".", 1)[1] for p in paths] == ["json", "csv", "txt"]
    data = json.loads(open(paths[0]).read())
    assert data["schema"] == "jointerg.report/1"
    assert parse_config(_to_ini(data["config"])) == xlogx_report.config
    rows = list(csv.reader(open(paths[1])))
    assert tuple(rows[0]) == ("stage", "N", "metric", "value")
    assert {r[0] for r in rows[1:]} >= {"window_error", "change_of_variables", "verify"}
    assert "== select" in open(paths[2]).read()


def _to_ini(cfg_json: dict) -> str:
    out = []
    for sec, keys in cfg_json.items():
        out.append(f"[{sec}]")
        for k, v in keys.items():
            if v is None:
                v = ""
            elif isinstance(v, list):
                v = "; ".join(", ".join(r) for r in v) if v and isinstance(v[0], list) \
                    else ", ".join(str(x) for x in v)
            out.append(f"{k} = {v}")
    return "\n".join(out) + "\n"


def test_empty_grid_gives_header_only_csv():
    assert to_csv_text([]) == "stage,N,metric,value\n"
    cfg = parse_config(XLOGX).replace(schedule__N=(), schedule__verify_N=())
    rep = run_pipeline(cfg, stop_after="change_of_variables")
    assert to_csv_text(rep.rows) == "stage,N,metric,value\n"


# ---------------------------------------------------------------- CLI

def _write(tmp_path, name, text):
    p = tmp_path / name
    p.write_text(text)
    return str(p)


def test_cli_pipeline_exit_codes(tmp_path, capsys):
    good = _write(tmp_path, "xlogx.ini", XLOGX)
    assert main(["pipeline", "--config", good, "--out", str(tmp_path / "o")]) == 0
    assert (tmp_path / "o" / "report.json").exists()
    c3 = _write(tmp_path, "c3.ini", CASE3)
    assert main(["pipeline", "--config", c3, "--out", str(tmp_path / "o3")]) == 2
    data = json.loads((tmp_path / "o3" / "report.json").read_text())
    assert data["error"]["stage"] == "decompose"
    bad = _write(tmp_path, "bad.ini", "[function]\nfoo = 1\n")
    assert main(["pipeline", "--config", bad]) == 3
    assert main(["pipeline", "--config", str(tmp_path / "missing.ini")]) == 3
    assert "error:" in capsys.readouterr().err


def test_cli_inconclusive_exit(tmp_path):
    spec = _write(tmp_path, "t.ini", "[tuple]\nd = 2\nell = 2\nK = 3\n")
    assert main(["pet", "reduce", "--config", spec, "--out", str(tmp_path)]) == 4


def test_cli_approx(tmp_path, capsys):
    cfg = _write(tmp_path, "xlogx.ini", XLOGX)
    assert main(["approx", "--config", cfg, "--out", str(tmp_path), "--N-grid", "1e3,1e4",
                 "--samples", "100"]) == 0
    rows = list(csv.reader(open(tmp_path / "approx.csv")))
    assert rows[0] == ["N", "L(N)", "K", "max_error", "cov_error"]
    assert [r[0] for r in rows[1:]] == ["1000", "10000"]
    assert float(rows[1][1]) == pytest.approx(1000 ** (7 / 12))
    data = json.loads((tmp_path / "approx.json").read_text())
    assert data["coefficients"][2] == "(1/2)/N"
    assert main(["approx", "--config", cfg, "--N-grid", "ten"]) == 3


def test_cli_approx_empty_grid(tmp_path):
    cfg = _write(tmp_path, "xlogx.ini", XLOGX.replace("N = 1000, 10000", "N ="))
    assert main(["approx", "--config", cfg, "--out", str(tmp_path)]) == 0
    assert (tmp_path / "approx.csv").read_text() == "N,L(N),K,max_error,cov_error\n"


def test_cli_pet(tmp_path, capsys):
    spec = _write(tmp_path, "t.ini", "[tuple]\nd = 1\nell = 1\nK = 3\n")
    assert main(["pet", "check", "--config", spec, "--out", str(tmp_path)]) == 0
    out = capsys.readouterr().out
    assert "c_1(h) = 6*h1*h2*e1" in out and "inclusion: ok" in out
    rec = json.loads((tmp_path / "pet_check.json").read_text())
    assert len(rec["steps"]) == 2 and rec["linear_coeffs"] == ["6*h1*h2*e1"]
    assert main(["pet", "reduce"]) == 3


def test_cli_weyl_and_verify(tmp_path):
    cfg = _write(tmp_path, "xlogx.ini", XLOGX)
    assert main(["weyl", "--config", cfg, "--out", str(tmp_path)]) == 0
    assert main(["verify", "--config", cfg, "--out", str(tmp_path), "--threads", "2"]) == 0
    rows = list(csv.reader(open(tmp_path / "verify.csv")))
    assert rows[0] == ["N", "quantity", "value"]
    assert any(r[1] == "average:deviation" for r in rows[1:])
    rep = json.loads((tmp_path / "verify.json").read_text())["report"]
    assert rep["verdict"] is True


def test_cli_rational_rotation_fails_conditions(tmp_path, capsys):
    cfg = _write(tmp_path, "half.ini", XLOGX.replace("sqrt(2); sqrt(3)", "1/2; 1/2"))
    assert main(["verify", "--config", cfg, "--out", str(tmp_path)]) == 0
    assert "conditions fail" in capsys.readouterr().out
    rep = json.loads((tmp_path / "verify.json").read_text())["report"]
    assert rep["cond_i_max"] == [1.0, 1.0]
