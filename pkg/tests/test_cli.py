from __future__ import annotations

import io
import json

import pytest

from hgzeta.cli import load_config, main, run
from hgzeta.errors import ConfigError

YU_YUI_A = [[4, 1, 0, 0], [0, 3, 0, 0], [0, 0, 4, 0], [0, 0, 0, 4]]


def write(tmp_path, name, obj):
    path = tmp_path / name
    path.write_text(json.dumps(obj) if not isinstance(obj, str) else obj)
    return str(path)


def go(tmp_path, command, cfg, *extra):
    out = tmp_path / "out"
    code = main([command, "--config", cfg, "--out", str(out), *extra])
    return code, json.loads((out / "report.json").read_text()), (out / "report.txt").read_text()


def test_analyze_dwork_quartic(tmp_path, capsys):
    cfg = write(tmp_path, "c.json", {"p": 5, "n": 3})
    code, rep, txt = go(tmp_path, "analyze", cfg)
    assert code == 0
    st = rep["structure"]
    assert st["alpha"] == [1, 1, 1, 1]
    assert st["C_rational"] == str(4**4)
    assert st["C"] == 4**4 % 5
    assert st["elementary_divisors"] == [1, 4, 4, 0]
    assert st["d"] == 16 and len(st["s_table"]) == 16
    assert "alpha: [1, 1, 1, 1]" in txt
    assert "divisor_sets" in rep["structure"]


def test_reports_are_byte_stable(tmp_path):
    cfg = write(tmp_path, "c.json", {"p": 7, "n": 2, "lambda": 2, "r_max": 2, "oracles": ["brute", "hgf"]})
    first = []
    for _ in range(2):
        main(["count", "--config", cfg, "--out", str(tmp_path / "o")])
        first.append((tmp_path / "o" / "report.json").read_bytes())
    assert first[0] == first[1]


def test_yu_yui_q13_is_assumption_violation(tmp_path):
    cfg = write(tmp_path, "c.json", {"p": 13, "n": 3, "A": YU_YUI_A, "lambda": 2})
    code, rep, _ = go(tmp_path, "count", cfg)
    assert code == 3
    assert rep["structure"]["assumptions"]["ok"] is False


@pytest.mark.parametrize(
    "obj",
    [
        "{not json",
        {"p": 8, "n": 2},
        {"p": 7, "n": 2, "lambda": 0},
        {"p": 7, "n": 2, "c": [1, 7, 1]},
        {"p": 7, "n": 2, "A": [[3, 0], [0, 3]]},
        {"p": 7, "n": 2, "oracles": ["magic"]},
        {"p": 7, "n": 2, "colour": "red"},
        {"p": 7, "q": 50, "n": 2},
        {"p": 7, "n": 2, "A": [[2, 0, 0], [0, 3, 0], [0, 0, 3]]},
    ],
)
def test_config_errors(tmp_path, obj):
    cfg = write(tmp_path, "c.json", obj)
    code, rep, _ = go(tmp_path, "analyze", cfg)
    assert code == 2 and rep["error"]["kind"] == "config"
    with pytest.raises(ConfigError):
        load_config(cfg)


def test_missing_config_and_bad_args(tmp_path):
    assert main(["analyze", "--config", str(tmp_path / "nope.json"), "--out", str(tmp_path)]) == 2
    assert main(["frobnicate", "--config", "x"]) == 2


def test_budget_exceeded(tmp_path):
    cfg = write(tmp_path, "c.json", {"p": 73, "n": 3, "A": YU_YUI_A, "lambda": 2})
    code, rep, _ = go(tmp_path, "zeta", cfg)
    assert code == 5 and rep["error"]["kind"] == "budget"
    cfg = write(tmp_path, "c2.json", {"p": 7, "n": 2, "lambda": 1, "r_max": 3, "budget": {"points": 100}})
    code, _, _ = go(tmp_path, "count", cfg)
    assert code == 5


def test_unitroot_and_text_format(tmp_path):
    cfg = write(tmp_path, "c.json", {"p": 7, "n": 2, "lambda": 1, "padic_precision": 4})
    buf = io.StringIO()
    code = run("unitroot", cfg, out=tmp_path / "o", fmt="text", stream=buf)
    assert code == 0
    rep = json.loads((tmp_path / "o" / "report.json").read_text())
    ur = rep["lambdas"][0]["unit_root"]
    assert ur["ordinary"] and ur["value"] == 741 and ur["height_one"]
    assert "unit_root" in buf.getvalue()


@pytest.mark.slow
def test_verify_plane_cubics_all_lambda(tmp_path):
    cfg = write(tmp_path, "c.json", {"p": 7, "n": 2, "lambda": "all", "r_max": 3})
    code, rep, _ = go(tmp_path, "verify", cfg, "--threads", "2")
    assert code == 0
    assert rep["verification"]["ok"]
    by_lam = {item["lambda"]: item for item in rep["lambdas"]}
    assert by_lam[1]["zeta"]["P"] == [1, 1, 7]
    assert by_lam[3]["degenerate"] and "zeta" not in by_lam[3]
    assert by_lam[3]["counts"]["1"]["brute"] == by_lam[3]["counts"]["1"]["delsarte"]
