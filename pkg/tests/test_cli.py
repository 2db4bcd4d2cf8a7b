import json
import shutil
import subprocess
import sys

import pytest

from choco.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_enumerate_json_array(capsys):
    code, out, _ = run(capsys, "enumerate", "--degree", "4", "--format", "json")
    assert code == 0 and json.loads(out) == [{"j": [1], "k": [], "l": []}]


def test_enumerate_table_and_csv(capsys, tmp_path):
    code, out, _ = run(capsys, "enumerate", "--degree", "10")
    assert code == 0 and len(out.splitlines()) == 154 and "[3,1],[2],[1]" in out.splitlines()
    dest = tmp_path / "e.csv"
    assert run(capsys, "enumerate", "--degree", "6", "--format", "csv", "--out", str(dest))[0] == 0
    lines = dest.read_text().splitlines()
    assert lines[0].startswith("# manifest: ") and lines[1] == "config,deg_x,deg_y,c"
    assert len(lines) == 2 + 7


@pytest.mark.parametrize("argv", [
    ["enumerate", "--degree", "5"],
    ["solve", "--config", "[1],[1],[]"],
    ["solve", "--config", "[1],[],"],
    ["perturb", "--config", "[1],[],[]", "--epsilon", "-1"],
    ["perturb", "--config", "[1],[],[]", "--epsilon", "10"],
    ["search", "--degree", "16"],
    ["frobnicate"],
])
def test_usage_errors_exit_2(capsys, argv):
    with pytest.raises(SystemExit) as ei:
        code = main(argv)
        raise SystemExit(code)
    assert ei.value.code == 2


def test_solve_quartic_table_and_stderr(capsys):
    code, out, err = run(capsys, "solve", "--config", "[1],[],[]", "--starts", "300")
    assert code == 0
    assert "delta     0.9510565" in out
    assert "300 starts" in err


def test_solve_json_has_manifest(capsys):
    code, out, _ = run(capsys, "solve", "--config", "[3,1],[2],[1]", "--format", "json")
    doc = json.loads(out)
    assert code == 0 and doc["config"] == "[3,1],[2],[1]"
    assert abs(doc["best"]["delta"] - 0.9744993) < 1e-6
    m = doc["manifest"]
    assert m["command"] == "solve" and m["rng_seed"] == 0 and m["tool_version"]
    assert m["backend"] in ("compiled", "python") and "config" in m["input_digests"]


def test_solve_cache_round_trip(capsys, tmp_path):
    args = ["solve", "--config", "[2],[1],[]", "--cache-dir", str(tmp_path), "--format", "json"]
    _, first, e1 = run(capsys, *args)
    _, second, e2 = run(capsys, *args)
    assert "solved" in e1 and "cache hit" in e2
    strip = lambda t: {k: v for k, v in json.loads(t).items() if k != "manifest"}
    assert strip(first) == strip(second)


def test_solve_warm_start_published(capsys):
    code, out, err = run(capsys, "solve", "--config", "[4,2,2,1],[3,2],[2,1,1]",
                         "--warm-start", "published", "--format", "json")
    assert code == 0 and abs(json.loads(out)["best"]["delta"] - 0.9808348) < 1e-6
    assert "1 starts" in err


def test_solve_infeasible_exit_3(capsys):
    # a single warm start at a point converging to a negative-parameter root
    code, _, err = run(capsys, "solve", "--config", "[1],[],[]", "--warm-start",
                       '{"delta": -0.95, "A1": 1.6, "k": 1.6}', "--no-cache")
    assert code == 3 and "no feasible solution" in err


def test_search_deterministic(capsys, tmp_path):
    outs = []
    for _ in range(2):
        code, out, _ = run(capsys, "search", "--degree", "6", "--format", "json", "--no-cache")
        doc = json.loads(out)
        doc["manifest"].pop("timestamp")
        outs.append(doc)
    assert outs[0] == outs[1]
    assert outs[0]["rows"][0]["config"] == "[2],[1],[]"


def test_search_table(capsys):
    code, out, _ = run(capsys, "search", "--degree", "6", "--precision", "5")
    lines = out.splitlines()
    assert code == 0 and lines[1].split() == ["1", "[2],[1],[]", "0.96297"]
    assert any(line.endswith("  -") for line in lines)


def test_perturb_worked_example(capsys):
    code, out, _ = run(capsys, "perturb", "--config", "[1],[],[]", "--epsilon", "0.01", "--format", "json")
    cert = json.loads(out)["certificate"]
    assert code == 0 and abs(float(cert["delta_hat"]) - 0.950097) < 1e-5
    assert abs(cert["critical_root"]["im"] - 0.311954) < 1e-4
    assert cert["identity_residual"] <= 1e-8


def test_perturb_from_solve_output(capsys, tmp_path):
    src = tmp_path / "s.json"
    run(capsys, "solve", "--config", "[1],[],[]", "--format", "json", "--out", str(src))
    code, out, _ = run(capsys, "perturb", "--input", str(src), "--epsilon", "1e-6")
    assert code == 0 and "certified     yes" in out
    assert "delta_hat     0.951056" in out


def test_verify_fixture_fails_honestly(capsys):
    code, out, err = run(capsys, "verify", "--fixture", "chang-sahinidis")
    assert code == 4 and "certified  no" in out and "z stable" in out


def test_verify_input_file(capsys, tmp_path):
    f = tmp_path / "v.json"
    f.write_text(json.dumps({"delta": 0.5, "x": [1], "y": [0]}))
    code, out, _ = run(capsys, "verify", "--input", str(f))
    # z = s^2 - s + 1 has roots 0.5 +- 0.866i
    assert code == 4 and "z stable" in out
    f.write_text(json.dumps({"delta": -0.5, "x": [1], "y": [0]}))
    code, out, _ = run(capsys, "verify", "--input", str(f))
    assert code == 0 and "certified  yes" in out


def test_verify_delta_override(capsys):
    assert run(capsys, "verify", "--fixture", "chang-sahinidis", "--delta", "0.99")[0] == 4


@pytest.mark.skipif(shutil.which("choco") is None, reason="console script not installed")
def test_console_script():
    out = subprocess.run(["choco", "enumerate", "--degree", "4"], capture_output=True, text=True)
    assert out.returncode == 0 and out.stdout.strip() == "[1],[],[]"


def test_module_entry_point():
    out = subprocess.run([sys.executable, "-m", "choco", "--version"], capture_output=True, text=True)
    assert out.returncode == 0 and out.stdout.startswith("choco ")
