"""End-to-end runs of the command line tool in subprocesses."""

import csv
import io
import json
import subprocess
import sys

import pytest

from grmod.gmodule import dumps_module, loads_module


def grmod(*args, env=None):
    return subprocess.run([sys.executable, "-m", "grmod", *map(str, args)], capture_output=True, text=True, env=env)


@pytest.fixture
def z4_file(tmp_path, z4_minus_one):
    p = tmp_path / "z4.json"
    p.write_text(dumps_module(z4_minus_one))
    return p


@pytest.fixture
def klein_file(tmp_path):
    s = [[1, 0, 0, 0], [0, 1, 0, 0], [1, 0, 1, 0], [0, 1, 0, 1]]
    t = [[1, 0, 0, 0], [0, 1, 0, 0], [1, 1, 1, 0], [1, 0, 0, 1]]
    p = tmp_path / "v4.json"
    p.write_text(json.dumps({"group": {"cyclic_orders": [2, 2]}, "ring_exponent": 2, "diag": [2, 2, 2, 2],
                             "generator_actions": [s, t]}))
    return p


def test_validate_exit_codes(tmp_path, z4_file):
    assert grmod("validate", z4_file).returncode == 0
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"group": {"cyclic_orders": [2, 2]}, "ring_exponent": 1, "diag": [3, 3],
                               "generator_actions": [[[0, 1], [1, 0]], [[1, 0], [0, 2]]]}))
    r = grmod("validate", bad)
    assert r.returncode == 1 and "T0T1 != T1T0" in r.stdout
    junk = tmp_path / "junk.json"
    junk.write_text("not json")
    assert grmod("validate", junk).returncode == 2
    assert grmod("validate", tmp_path / "missing.json").returncode == 2


def test_decompose_table(z4_file):
    r = grmod("decompose", z4_file)
    assert r.returncode == 0
    assert "|M| = 4; prod |M^chi| = 8; prod |eps M| = 2; prod |S| = 2" in r.stdout
    assert "isotypic formula: pass; image formula: pass" in r.stdout


def test_decompose_json_and_csv_agree(z4_file):
    data = json.loads(grmod("decompose", z4_file, "--format", "json").stdout)
    rows = list(csv.DictReader(io.StringIO(grmod("decompose", z4_file, "--format", "csv").stdout)))
    assert [r["isotypic"] for r in data["rows"]] == [int(r["|M^chi|"]) for r in rows] == [2, 4]
    assert [r["s"] for r in data["rows"]] == [int(r["|S|"]) for r in rows] == [1, 2]
    assert data["totals"]["order"] == 4


def test_decompose_zero_and_product_groups(tmp_path, klein_file):
    zero = tmp_path / "zero.json"
    zero.write_text(grmod("random", "--group", "3", "--modulus", "1").stdout)
    r = grmod("decompose", zero, "--format", "json")
    assert r.returncode == 0
    assert {v for row in json.loads(r.stdout)["rows"] for k, v in row.items() if k in ("isotypic", "h0", "s")} == {1}
    r = grmod("decompose", klein_file)
    assert r.returncode == 0 and "order formula: pass" in r.stdout
    assert grmod("decompose", klein_file, "--generator", "1,0").returncode == 2


def test_tate_subgroup_selection(z4_file, klein_file):
    data = json.loads(grmod("tate", z4_file, "--format", "json").stdout)
    assert [(s["h_minus1_order"], s["h0_order"], s["herbrand"]) for s in data["subgroups"]] == [(1, 1, "1"), (2, 2, "1")]
    data = json.loads(grmod("tate", klein_file, "--subgroup", "order:2", "--format", "json").stdout)
    assert len(data["subgroups"]) == 3 and all(s["h0_order"] == 1 for s in data["subgroups"])
    data = json.loads(grmod("tate", klein_file, "--subgroup", "1,0;0,1", "--format", "json").stdout)
    assert [(s["h_minus1_order"], s["h0_order"]) for s in data["subgroups"]] == [(4, 4)]
    assert grmod("tate", klein_file, "--subgroup", "order:x").returncode == 2


def test_verify_exit_codes():
    r = grmod("verify", "herbrand", "--count", 200, "--seed", 7)
    assert r.returncode == 0 and r.stdout.rstrip().endswith("PASS")
    r = grmod("verify", "thm2.2", "--count", 0, "--format", "json")
    assert r.returncode == 0 and json.loads(r.stdout)["instances"] == []
    assert grmod("verify", "thm9.9").returncode == 2
    assert grmod("verify", "herbrand", "--count", -1).returncode == 2
    assert grmod("verify", "thm4.10", "--count", 2, "--min-nonvacuous", 3).returncode == 1


def test_verify_is_byte_identical():
    a = grmod("verify", "thm2.2", "--count", 12, "--seed", 4, "--format", "json").stdout
    b = grmod("verify", "thm2.2", "--count", 12, "--seed", 4, "--format", "json").stdout
    assert a == b and json.loads(a)["summary"]["passed"]


def test_verify_csv_matches_json():
    js = json.loads(grmod("verify", "duality", "--count", 5, "--seed", 1, "--format", "json").stdout)
    rows = list(csv.DictReader(io.StringIO(grmod("verify", "duality", "--count", 5, "--seed", 1, "--format", "csv").stdout)))
    checks = {(int(r["instance"]), r["key"]) for r in rows if r["row_type"] == "check"}
    assert checks == {(i["index"], k) for i in js["instances"] for k in i["checks"]}


def test_oracle_diff(tmp_path, z4_file):
    r = grmod("oracle-diff", z4_file)
    assert r.returncode == 0 and "0 mismatches" in r.stdout
    big = tmp_path / "big.json"
    big.write_text(grmod("random", "--group", "2", "--rank", 2, "--modulus", 9).stdout)
    assert grmod("oracle-diff", big).returncode == 2
    env = dict(__import__("os").environ, GRMOD_CAPS="oracle=1000000")
    assert grmod("oracle-diff", big, env=env).returncode == 0


def test_random_modules(tmp_path):
    r = grmod("random", "--group", "2", "--rank", 1, "--modulus", 3, "--seed", 1)
    assert r.returncode == 0
    M = loads_module(r.stdout)
    assert M.order == 9 and M.validation.ok
    assert grmod("random", "--group", "2", "--rank", 1, "--modulus", 3, "--seed", 1).stdout == r.stdout
    out = tmp_path / "m.json"
    assert grmod("random", "--group", "2x2", "--relations", 2, "--seed", 3, "--out", out).returncode == 0
    assert grmod("validate", out).returncode == 0
    M = loads_module(grmod("random", "--group", "1").stdout)
    assert M.group.order == 1
    assert grmod("random", "--group", "2xq").returncode == 2
    assert grmod("random", "--group", "7", "--modulus", 9).returncode == 2
