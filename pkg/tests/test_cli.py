import json
import os
import subprocess
import sys
from pathlib import Path

import pytest

import arcops
from arcops import formats
from arcops.cli import main
from arcops.suites import find_graph, twisted_annulus

DATA = Path(arcops.__file__).parent / "data"


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, (json.loads(out.out) if out.out else None), out.err


def test_correlate_example(capsys):
    code, out, _ = run(capsys, "correlate", DATA / "annulus1.json", DATA / "kx2.json",
                       "--inputs", DATA / "io.json")
    assert code == 0
    assert out == {"schema_version": 1, "command": "correlate", "value": "1/1"}


def test_correlate_tensor(capsys):
    code, out, _ = run(capsys, "correlate", DATA / "annulus1.json", DATA / "kx2.json")
    assert code == 0
    assert out["slots"] == [[0, 0], [1, 0]]
    assert out["entries"] == [[0, 1, "1/1"], [1, 0, "1/1"]]


def test_correlate_wrong_input_count(capsys, tmp_path):
    p = tmp_path / "in.json"
    p.write_text(json.dumps({"inputs": {"0": ["1", "x"], "1": ["x"]}}))
    code, _, err = run(capsys, "correlate", DATA / "annulus1.json", DATA / "kx2.json", "--inputs", p)
    assert code == 3 and "boundary 0" in err


def test_enumerate_example(capsys):
    code, out, _ = run(capsys, "enumerate", "--genus", 0, "--boundaries", 1, "--edges", 1,
                       "--family", "exhaustive")
    assert code == 0 and out["count"] == 1 and len(out["graphs"]) == 1


def test_validate_and_classify(capsys, tmp_path):
    code, out, _ = run(capsys, "validate", DATA / "annulus1.json")
    assert code == 0 and out["ok"] and out["violations"] == []
    p = tmp_path / "tw.json"
    p.write_text(formats.graph_to_json(twisted_annulus()))
    code, out, _ = run(capsys, "classify", p)
    assert code == 0 and out["twisted_at"] == [0, 1]


def test_validate_failure_exit_code(capsys, tmp_path):
    d = formats.graph_to_dict(find_graph((("0.0",), ("1.0",)), (("0.0", "1.0"),)))
    d["genus"] = 1
    p = tmp_path / "bad.json"
    p.write_text(json.dumps(d))
    code, out, _ = run(capsys, "validate", p)
    assert code == 1 and not out["ok"]


def test_dual_expand_glue_diff(capsys):
    g = DATA / "annulus1.json"
    code, out, _ = run(capsys, "dual", g)
    assert code == 0 and len(out["ribbon"]["vertices"]) == 1
    code, out, _ = run(capsys, "expand", g, "--weight", 3)
    assert code == 0 and len(out["terms"]) == 3 and out["weight_cap"] == 3
    code, out, _ = run(capsys, "glue", g, 1, g)
    assert code == 0 and out["terms"][0]["coeff"] == 1
    code, out, _ = run(capsys, "diff", g, "--family", "all")
    assert code == 0 and out["terms"] == []


def test_homology_cells(capsys):
    code, out, _ = run(capsys, "homology-cells", "--genus", 0, "--boundaries", 1, "--edges", 3)
    assert code == 0 and out["d_squared_zero"] and out["cells"] == {"1": 1, "2": 1}


def test_verify_small(capsys, tmp_path):
    code, out, _ = run(capsys, "verify", "operad-axioms", "--corpus-size", "small",
                       "--counterexample-dir", tmp_path)
    assert code == 0 and out["status"] == "pass"
    assert "seconds" not in out["suites"][0]
    assert not os.listdir(tmp_path)


def test_verify_is_deterministic(capsys):
    first = run(capsys, "verify", "tv-identities", "--corpus-size", "small")
    second = run(capsys, "verify", "tv-identities", "--corpus-size", "small")
    assert first == second


def test_verify_timing_flag(capsys):
    code, out, _ = run(capsys, "verify", "filtration", "--corpus-size", "small", "--timing")
    assert code == 0 and "seconds" in out["suites"][0]


@pytest.mark.parametrize("argv", [[], ["verify", "nope"], ["expand", "x.json"],
                                  ["enumerate", "--genus", "-1", "--boundaries", "1", "--edges", "1"],
                                  ["glue", str(DATA / "annulus1.json"), "5", str(DATA / "annulus1.json")]])
def test_usage_errors(capsys, argv):
    assert run(capsys, *argv)[0] == 2


def test_format_errors(capsys, tmp_path):
    p = tmp_path / "broken.json"
    p.write_text("{")
    assert run(capsys, "validate", p)[0] == 3
    assert run(capsys, "validate", tmp_path / "missing.json")[0] == 3
    assert run(capsys, "correlate", DATA / "annulus1.json", p)[0] == 3


def test_console_script():
    out = subprocess.run([sys.executable, "-m", "arcops.cli", "enumerate", "--genus", "0",
                          "--boundaries", "1", "--edges", "1", "--family", "exhaustive"],
                         capture_output=True, text=True, check=True)
    assert json.loads(out.stdout)["count"] == 1
