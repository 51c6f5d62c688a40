import io
import json
import subprocess
import sys

import pytest

from dcsets.cli import FALSIFIED, INCONCLUSIVE, INTERNAL, OK, USAGE, run
from dcsets.scenes import Scene, generate


def call(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(list(argv), out, err)
    return code, out.getvalue(), err.getvalue()


def test_exit_code_values():
    assert (OK, FALSIFIED, INCONCLUSIVE, USAGE, INTERNAL) == (0, 1, 2, 3, 4)


@pytest.mark.parametrize("name", ["tent-sset", "sset3", "corner", "square", "staircase-isolated", "cantor-d3"])
def test_gen_example_validates(name, tmp_path):
    code, _, _ = call("gen-example", name, "--out", str(tmp_path))
    assert code == OK
    path = tmp_path / f"{name}.json"
    assert Scene.loads(path.read_text()).presentation == generate(name).presentation
    code, out, _ = call("validate", str(path))
    assert code == OK and json.loads(out)["verdict"] == "valid"


def test_certify_tent(tmp_path):
    code, out, err = call("certify", "tent-sset", "--n-sweep", "8,16")
    report = json.loads(out)
    assert code == OK and report["verdict"] == "consistent"
    assert [row["n"] for row in report["n-sweep"]] == [8, 16]
    assert all(row["concavity"]["passes"] for row in report["n-sweep"])
    assert "certify: consistent" in err


def test_certify_csv():
    code, out, _ = call("certify", "tent-sset", "--n-sweep", "8", "--format", "csv")
    assert code == OK
    assert out.splitlines()[0] == "n,total,C,lipschitz_sampled,D,failures,passes"


def test_falsify_staircase():
    code, out, _ = call("falsify", "staircase-isolated")
    report = json.loads(out)
    assert code == FALSIFIED
    assert len(report["witness"]["witnesses"]) >= 5
    ks = [row["K_hat"] for row in report["blowup"]]
    assert ks == sorted(ks) and len(set(ks)) == len(ks)


def test_gen_then_analyze_cantor(tmp_path):
    assert call("gen-example", "cantor-d5", "--out", str(tmp_path))[0] == OK
    code, out, _ = call("analyze", str(tmp_path / "cantor-d5.json"))
    report = json.loads(out)
    assert code == OK
    assert report["boundary_projection"]["components"] == 32
    assert report["boundary_projection"]["matches"]


def test_analyze_accumulating_points_flagged():
    code, out, _ = call("analyze", "accumulating-points")
    assert code == FALSIFIED


def test_render_svg(tmp_path):
    code, _, _ = call("render", "tent-sset", "--n-sweep", "8", "--out", str(tmp_path))
    assert code == OK
    (svg,) = tmp_path.glob("*.svg")
    text = svg.read_text()
    assert text.startswith("<svg") and 'class="level"' in text


@pytest.mark.parametrize("argv", [
    ("bogus", "tent-sset"),
    ("certify", "no-such-example"),
    ("certify", "tent-sset", "--n-sweep", "8,x"),
    ("certify", "tent-sset", "--mode", "sideways"),
    ("gen-example", "cantor-dx"),
])
def test_usage_errors(argv):
    assert call(*argv)[0] == USAGE


def test_malformed_json(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text('{"set": {"skeleton": [}')
    code, _, err = call("validate", str(path))
    assert code == USAGE and "line 1 column" in err


def test_malformed_piece_names_position(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"version": 1, "set": {"skeleton": [{"kind": "graph"}]}}))
    code, _, err = call("validate", str(path))
    assert code == USAGE and "$.set.skeleton[0]" in err


def test_repeated_runs_are_byte_identical(tmp_path):
    outs = []
    for k in range(2):
        d = tmp_path / str(k)
        for cmd in ("certify", "falsify", "analyze", "render"):
            target = "staircase-isolated" if cmd == "falsify" else "tent-sset"
            call(cmd, target, "--n-sweep", "8", "--seed", "7", "--out", str(d))
        outs.append({p.name: p.read_bytes() for p in sorted(d.iterdir())})
    assert outs[0] == outs[1] and len(outs[0]) >= 4


def test_console_script_runs():
    proc = subprocess.run([sys.executable, "-m", "dcsets.cli", "gen-example", "corner"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0 and json.loads(proc.stdout)["name"] == "corner"
