from __future__ import annotations

import json
import subprocess
import sys

import pytest

from zerosurgery.cli import RunConfig, main

EX91 = {"pair": ["K10n10", "-16nh_17"], "arf": 0,
        "zeroNotSE": {"K10n10": "asymmetric-both"},
        "witnesses": [{"type": "annulus", "pres": "L1", "m": 0, "n1": 0, "n2": 1}]}

SMALL_TABLE = """name,dt
K3a1,4 6 2
K4a1,4 6 8 2
K6a3,4 8 12 10 2 6
K9n5,4 10 -14 -12 -16 2 -6 -18 -8
"""


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_parse(capsys):
    code, out, _ = run(capsys, "parse", "--dt", "4 6 2")
    assert code == 0
    j = json.loads(out)
    assert j["writhe"] == 3
    code, out, err = run(capsys, "parse", "--dt", "3")
    assert code == 1 and out == ""
    assert json.loads(err.strip().splitlines()[-1])["error"] == "OddLabel"
    code, _, err = run(capsys, "parse")
    assert code == 2 and "UsageError" in err


def test_invariants(capsys, tmp_path):
    code, out, _ = run(capsys, "invariants", "--dt", "4 6 8 2")
    assert code == 0
    j = json.loads(out)
    assert (j["signature"], j["determinant"], j["arf"]) == (0, 5, 1)
    t = tmp_path / "t.csv"
    t.write_text(SMALL_TABLE)
    code, out, _ = run(capsys, "invariants", "--table", str(t))
    assert code == 0 and [r["name"] for r in json.loads(out)["records"]][:2] == ["K3a1", "K4a1"]
    assert run(capsys, "invariants")[0] == 2
    assert run(capsys, "invariants", "--dt", "4 6 2", "--table", str(t))[0] == 2


def test_group_and_fingerprint(capsys):
    code, out, _ = run(capsys, "group", "--dt", "4 6 2")
    assert code == 0 and json.loads(out)["generators"] == 2
    code, out, _ = run(capsys, "fingerprint", "--dt", "4 6 2", "--max-index", "3")
    assert code == 0 and json.loads(out)["maxIndex"] == 3


@pytest.mark.parametrize("flag", ["--max-index", "--max-cosets", "--core-cap"])
def test_bounds_must_be_positive(capsys, flag):
    assert run(capsys, "fingerprint", "--dt", "4 6 2", flag, "0")[0] == 2
    assert run(capsys, "fingerprint", "--dt", "4 6 2", flag, "x")[0] == 2


def test_run_config():
    assert RunConfig().cascade().max_index == 7
    with pytest.raises(ValueError):
        RunConfig(workers=0)


def test_census(capsys, tmp_path):
    empty = tmp_path / "empty.csv"
    empty.write_text("name,dt\n")
    code, out, _ = run(capsys, "census", "--table", str(empty))
    assert code == 0 and json.loads(out)["groups"] == []
    t = tmp_path / "t.csv"
    t.write_text(SMALL_TABLE)
    outs = []
    for workers in ("1", "2"):
        dest = tmp_path / f"out{workers}.json"
        code, out, err = run(capsys, "census", "--table", str(t), "--max-index", "4",
                             "--workers", workers, "--out", str(dest))
        assert code == 0 and out == "" and "finished" in err
        outs.append(dest.read_bytes())
    assert outs[0] == outs[1]
    report = json.loads(outs[0])
    assert report["summary"]["distinguished"] == 2
    assert run(capsys, "census", "--table", str(tmp_path / "missing.csv"))[0] == 1


def test_census_quarantines_bad_rows(capsys, tmp_path):
    t = tmp_path / "t.csv"
    t.write_text(SMALL_TABLE + "bad,3 5\n")
    code, out, _ = run(capsys, "census", "--table", str(t), "--max-index", "3")
    assert code == 0
    assert [e["record"] for e in json.loads(out)["errors"]] == ["bad"]


def test_traces(capsys, tmp_path):
    ev = tmp_path / "ex91.json"
    ev.write_text(json.dumps(EX91))
    code, out, _ = run(capsys, "traces", "--evidence", str(ev))
    assert code == 0
    assert [v["level"] for v in json.loads(out)["verdicts"]] == ["NOT_HOMEOMORPHIC"]
    code, out, _ = run(capsys, "traces")
    assert code == 0 and len(json.loads(out)["verdicts"]) == 41
    ev.write_text(json.dumps({**EX91, "arf": 1}))
    code, _, err = run(capsys, "traces", "--evidence", str(ev))
    assert code == 1 and "ContradictionError" in err
    ev.write_text("{not json")
    assert run(capsys, "traces", "--evidence", str(ev))[0] == 1


def test_module_entry_point():
    p = subprocess.run([sys.executable, "-m", "zerosurgery", "parse", "--dt", "4 6 8 2"],
                       capture_output=True, text=True)
    assert p.returncode == 0 and len(json.loads(p.stdout)["crossings"]) == 4
    p = subprocess.run([sys.executable, "-m", "zerosurgery"], capture_output=True, text=True)
    assert p.returncode == 2
