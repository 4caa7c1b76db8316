import io
import json
import subprocess
import sys
from fractions import Fraction

import pytest

from conftest import CHSH, deterministic_point, pr_box
from ldl.cli import main
from ldl.model import DetectionBounds, ObservedEfficiencies, postselect
from ldl.serialization import (
    bounds_from_json,
    bounds_to_json,
    correlation_from_json,
    correlation_to_json,
    dumps,
    effs_from_json,
    effs_to_json,
    format_output,
    parse_output,
    scenario_from_json,
    scenario_to_json,
)


def write(path, doc):
    path.write_text(json.dumps(doc))
    return str(path)


@pytest.fixture
def files(tmp_path):
    return {
        "scenario": write(tmp_path / "s.json", scenario_to_json(CHSH)),
        "unit_bounds": write(tmp_path / "b1.json", {"eta_min": "1", "eta_max": "1"}),
        "bounds": write(tmp_path / "b.json", {"bounds": [{"eta_min": "1/2", "eta_max": "1"}] * 2}),
        "unit_effs": write(tmp_path / "e1.json", {"uniform": "1"}),
        "effs": write(tmp_path / "e.json", {"uniform": "1/2"}),
        "pr": write(tmp_path / "pr.json", correlation_to_json(pr_box())),
        "state": write(tmp_path / "state.json", {"amplitudes": [0, [0.7071067811865476, 0], [-0.7071067811865476, 0], 0]}),
        "settings": write(tmp_path / "m.json", {"alice": [[0, 0], [1.5707963267948966, 0]],
                                                "bob": [[0.7853981633974483, 0], [2.356194490309725, 0]]}),
        "dir": tmp_path,
    }


def run(argv, capsys, stdin=None, monkeypatch=None):
    if stdin is not None:
        monkeypatch.setattr(sys, "stdin", io.StringIO(stdin))
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def test_hardy_pipe_into_eq5(capsys, monkeypatch):
    code, hardy, _ = run(["hardy", "--tau", "0.5"], capsys)
    assert code == 0
    code, out, _ = run(["eq5", "--eta-min", "0.001", "--eta-max", "1"], capsys, hardy, monkeypatch)
    assert code == 0 and json.loads(out)["violated"] is True


def test_real_process_pipeline():
    hardy = subprocess.run([sys.executable, "-m", "ldl", "hardy", "--tau", "0.5"], capture_output=True, text=True, check=True)
    eq5 = subprocess.run([sys.executable, "-m", "ldl", "eq5", "--eta-min", "0.001", "--eta-max", "1"],
                         input=hardy.stdout, capture_output=True, text=True)
    assert eq5.returncode == 0 and json.loads(eq5.stdout)["violated"] is True


def test_vertices_chsh(files, capsys):
    out_path = str(files["dir"] / "v.json")
    code, _, _ = run(["vertices", "--scenario", files["scenario"], "--bounds", files["unit_bounds"], "--out", out_path], capsys)
    assert code == 0
    verts = json.load(open(out_path))
    assert len(verts) == 16 and all(v["kind"] == "full" for v in verts)


def test_membership_pr_box(files, capsys):
    code, out, _ = run(["membership", "--target", files["pr"], "--effs", files["unit_effs"],
                        "--bounds", files["unit_bounds"], "--exact"], capsys)
    doc = json.loads(out)
    assert code == 0 and doc["member"] is False
    cert = doc["certificate"]
    assert cert["kind"] == "certificate" and Fraction(cert["violation"]) > 0


def test_membership_member(files, capsys, tmp_path):
    uni = write(tmp_path / "u.json", {"scenario": scenario_to_json(CHSH), "entries":
                [{"x": [x, y], "a": [a, b], "p": "1/4"} for x in (1, 2) for y in (1, 2) for a in (1, 2) for b in (1, 2)]})
    code, out, _ = run(["membership", "--target", uni, "--effs", files["effs"], "--bounds", files["bounds"]], capsys)
    doc = json.loads(out)
    assert code == 0 and doc["member"] is True
    assert sum(Fraction(w["weight"]) for w in doc["witness"]) == 1


def test_born_singlet(files, capsys):
    code, out, _ = run(["born", "--state", files["state"], "--settings", files["settings"]], capsys)
    p = correlation_from_json(json.loads(out))
    from ldl.quantum import chsh_value
    assert code == 0 and abs(chsh_value(p) - 2 * 2**0.5) < 1e-9


def test_scheme_and_validate(files, capsys, tmp_path):
    out = str(tmp_path / "sch.json")
    code, _, _ = run(["scheme", "--input", files["pr"], "--eta", "1/2", "--assign", "1", "--out", out], capsys)
    assert code == 0
    p = correlation_from_json(json.load(open(out)))
    assert p.exact and p.table[0, 0, 0, 0] == Fraction(1, 8) + Fraction(3, 16)
    code, res, _ = run(["validate", "--input", out], capsys)
    assert code == 0 and json.loads(res)["valid"] is True


def test_mdl_map(capsys):
    code, out, _ = run(["mdl-map", "--l", "1/4", "--h", "1/4", "--eta-min", "1/2", "--eta-max", "1"], capsys)
    doc = json.loads(out)
    assert code == 0 and (doc["l"], doc["h"], doc["clamped"]) == ("1/16", "1", False)
    code, out, _ = run(["mdl-map", "--l", "0.2", "--h", "0.3", "--eta-min", "0.9", "--eta-max", "1", "--joint"], capsys)
    assert code == 0 and json.loads(out)["joint"] is True


def test_region_csv(files, capsys):
    code, out, _ = run(["eq5-region", "--target", files["pr"], "--grid", "5"], capsys)
    lines = out.strip().split("\n")
    assert code == 0 and lines[0] == "eta_min,eta_max,lhs,violated" and len(lines) == 16


def test_critical_eta(files, capsys):
    code, out, _ = run(["critical-eta", "--target", files["pr"], "--effs", files["unit_effs"], "--step", "0.01"], capsys)
    assert code == 0 and json.loads(out)["eta_max"] == "1"


@pytest.mark.parametrize("argv", [
    [],
    ["nosuch"],
    ["eq5", "--eta-min", "x", "--eta-max", "1"],
    ["hardy", "--tol", "-1"],
    ["vertices", "--scenario", "/nonexistent.json", "--bounds", "/nonexistent.json"],
])
def test_usage_errors_exit_1(argv, capsys):
    code, _, err = run(argv, capsys)
    assert code == 1
    assert "error" in json.loads(err)


def test_out_must_differ_from_input(files, capsys):
    code, _, err = run(["validate", "--input", files["pr"], "--out", files["pr"]], capsys)
    assert code == 1 and json.loads(err)["error"] == "UsageError"
    assert json.load(open(files["pr"]))["kind"] == "postselected"


def test_degenerate_tau_is_input_error(capsys):
    code, _, err = run(["hardy", "--tau", "1"], capsys)
    assert code == 1 and json.loads(err)["error"] == "DegenerateTau"


def test_infeasibility_exit_2(files, tmp_path, capsys):
    zero = write(tmp_path / "z.json", {"effs": [{"x": [1, 1], "eta": "0"}, {"x": [1, 2], "eta": "1"},
                                                {"x": [2, 1], "eta": "1"}, {"x": [2, 2], "eta": "1"}]})
    code, _, err = run(["membership", "--target", files["pr"], "--effs", zero, "--bounds", files["unit_bounds"]], capsys)
    assert code == 2 and json.loads(err)["error"] == "ZeroEfficiency"
    code, _, err = run(["membership", "--target", files["pr"], "--effs", files["effs"], "--bounds", files["unit_bounds"]], capsys)
    assert code == 2 and json.loads(err)["error"] == "InconsistentEfficiencies"


def test_cap_exit_3(files, capsys):
    code, _, err = run(["vertices", "--scenario", files["scenario"], "--bounds", files["bounds"], "--cap", "10"], capsys)
    assert code == 3 and json.loads(err)["error"] == "SizeOverflow"


def test_exact_output_is_deterministic(files, capsys):
    argv = ["membership", "--target", files["pr"], "--effs", files["effs"], "--bounds", files["bounds"], "--exact"]
    runs = [run(argv, capsys)[1] for _ in range(2)]
    assert runs[0] == runs[1]
    argv = ["vertices", "--scenario", files["scenario"], "--bounds", files["bounds"]]
    assert run(argv, capsys)[1] == run(argv, capsys)[1]


def _commands(files):
    return {
        "vertices": ["vertices", "--scenario", files["scenario"], "--bounds", files["bounds"]],
        "membership": ["membership", "--target", files["pr"], "--effs", files["effs"], "--bounds", files["bounds"]],
        "eq5": ["eq5", "--target", files["pr"], "--eta-min", "1/3", "--eta-max", "1"],
        "eq5-region": ["eq5-region", "--target", files["pr"], "--grid", "7"],
        "hardy": ["hardy", "--tau", "0.3"],
        "born": ["born", "--state", files["state"], "--settings", files["settings"]],
        "scheme": ["scheme", "--input", files["pr"], "--eta", "0.6", "--assign", "0.2"],
        "mdl-map": ["mdl-map", "--l", "1/5", "--h", "1/2", "--eta-min", "1/2", "--eta-max", "1"],
        "validate": ["validate", "--input", files["pr"]],
        "critical-eta": ["critical-eta", "--target", files["pr"], "--effs", files["unit_effs"], "--step", "0.05"],
    }


@pytest.mark.parametrize("command", ["vertices", "membership", "eq5", "eq5-region", "hardy", "born",
                                     "scheme", "mdl-map", "validate", "critical-eta"])
def test_output_round_trip(command, files, capsys):
    code, out, _ = run(_commands(files)[command], capsys)
    assert code == 0
    assert format_output(command, parse_output(command, out)) == out


def test_member_witness_round_trip(files, capsys, tmp_path):
    det = correlation_to_json(deterministic_point(0, 1, 1, 0))
    path = write(tmp_path / "d.json", det)
    for extra in ([], ["--exact"]):
        code, out, _ = run(["membership", "--target", path, "--effs", files["effs"], "--bounds", files["bounds"]] + extra, capsys)
        assert code == 0 and json.loads(out)["member"]
        assert format_output("membership", parse_output("membership", out)) == out


def test_input_schema_round_trips():
    sc = scenario_from_json(scenario_to_json(CHSH))
    assert sc == CHSH
    b = DetectionBounds(((Fraction(1, 3), Fraction(1)), (0.25, 0.5)))
    assert bounds_to_json(bounds_from_json(bounds_to_json(b))) == bounds_to_json(b)
    e = ObservedEfficiencies.uniform(CHSH, Fraction(2, 5))
    assert effs_to_json(effs_from_json(effs_to_json(e), CHSH)) == effs_to_json(e)
    full = deterministic_point(0, 0, 1, 1)
    doc = correlation_to_json(full)
    assert dumps(correlation_to_json(correlation_from_json(doc))) == dumps(doc)


def test_full_correlation_input_is_postselected(files, capsys, tmp_path):
    from ldl.vertices import enumerate_ldl_vertices, vertex_to_full
    v = enumerate_ldl_vertices(CHSH, DetectionBounds.symmetric(2, Fraction(1, 2), Fraction(1)))[5]
    full = vertex_to_full(v)
    path = write(tmp_path / "full.json", correlation_to_json(full))
    code, out, _ = run(["eq5", "--target", path, "--eta-min", "1/2", "--eta-max", "1"], capsys)
    post, _ = postselect(full)
    from ldl.inequality import eval_eq5
    assert code == 0 and json.loads(out)["lhs"] == str(eval_eq5(post, Fraction(1, 2), Fraction(1)).lhs)


def test_decimal_string_probabilities(capsys, tmp_path):
    doc = {"scenario": scenario_to_json(CHSH), "kind": "postselected",
           "entries": [{"x": [x, y], "a": [a, b], "p": "0.25"} for x in (1, 2) for y in (1, 2) for a in (1, 2) for b in (1, 2)]}
    path = write(tmp_path / "dec.json", doc)
    code, out, _ = run(["eq5", "--target", path, "--eta-min", "1", "--eta-max", "1"], capsys)
    assert code == 0 and json.loads(out)["lhs"] == "-1/2"
