import json
from pathlib import Path

import pytest
from click.testing import CliRunner

from sdchain import chain_algebra as ca
from sdchain.cli import main
from sdchain.map_analysis import SimplicialMap
from sdchain.simplicial_core import SimplicialComplex

SAMPLES = Path(__file__).resolve().parent.parent / "samples"


def run(*args):
    res = CliRunner().invoke(main, [str(a) for a in args])
    report = json.loads(res.output) if res.exit_code in (0, 1) and res.output.startswith("{") else None
    return res.exit_code, report, res.output


def test_example_cone_of_identity():
    code, rep, _ = run("check-contractible", SAMPLES / "cone-of-identity.json")
    assert code == 0 and rep["verdict"]
    assert rep["certificate"] is not None and rep["witness"] is None


def test_example_sphere_is_a_manifold():
    code, rep, _ = run("check-homology-manifold", SAMPLES / "boundary-delta3.json")
    assert code == 0 and rep["verdict"] is True


def test_example_t_projection():
    code, rep, _ = run("analyze-map", SAMPLES / "t-projection.json")
    assert code == 0
    assert rep["data"]["vietoris"] is True and rep["data"]["routes_agree"]


def test_false_verdicts_exit_one():
    code, rep, _ = run("check-contractible", SAMPLES / "interval-chains.json")
    assert code == 1 and rep["witness"]["simplex"]
    code, rep, _ = run("analyze-map", SAMPLES / "hollow-collapse.json")
    assert code == 1 and rep["witness"]["homology"]["degree"] == 1
    code, rep, _ = run("check-pd", SAMPLES / "wedge-circles.json")
    assert code == 1


@pytest.mark.parametrize("argv", [
    ["build", "named:t-graph"],
    ["subdivide", "named:delta2", "--levels", "2", "--policy", "boundary-retracting"],
    ["mesh", "named:delta2", "--levels", "2"],
    ["squeeze-params", "named:delta2", "--alpha", "1/2"],
    ["verify", "random-star:boundary-delta3"],
    ["check-contractible", "random-contractible:delta2"],
    ["contract", "random-contractible:t-graph"],
    ["sd-chain", "random:delta2"],
    ["assemble", "simplicial:delta2"],
    ["check-pd", "named:boundary-delta3"],
    ["controlled-pd", "named:boundary-delta3", "--levels", "1"],
    ["analyze-map", "--map", "named:delta3-to-delta1", "--report", "full"],
])
def test_every_verb_succeeds(argv):
    code, rep, out = run("--seed", 4, *argv)
    assert code == 0, out
    assert rep["command"] == argv[0] and rep["verdict"] is True


def test_squeeze_verb():
    base = ["squeeze", "named:delta1", "--graded", "random:delta1", "--levels", "4"]
    code, rep, out = run(*base, "--alpha", "1/2")
    assert code == 0, out
    assert rep["data"]["triangular"] and rep["certificate"]["cone_contractible"]
    code, rep, _ = run(*base, "--far")
    assert code == 1 and rep["witness"]["bound"] >= rep["witness"]["epsilon"]


def test_squeeze_needs_room_for_a_perturbation():
    # rank-one simplicial chains on Sd^4 Δ¹ admit no non-triangular degree-one homotopy
    code, _, out = run("squeeze", "named:delta1", "--levels", "4")
    assert code == 2 and "perturbation" in out


def test_mesh_reports_rationals_and_decimals():
    _, rep, _ = run("mesh", "named:delta2", "--levels", "1")
    lvl0 = rep["data"]["levels"][0]
    assert lvl0["mesh_sq"] == "2"
    assert abs(lvl0["mesh"] - 2 ** 0.5) < 1e-12


def test_squeeze_params_report():
    _, rep, _ = run("squeeze-params", "named:delta2")
    p = rep["data"]["params"]
    assert p["epsilon_sq"] == "1/24" and p["i"] == 8


def test_malformed_json_names_the_position(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{"vertices": [0, 1],\n "maximal": [[0, 1]')
    code, _, out = run("build", bad)
    assert code == 2
    assert "line 2" in out and "column" in out


def test_missing_field_is_malformed(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{"vertices": [0, 1]}')
    code, _, out = run("build", bad)
    assert code == 2 and "maximal" in out


@pytest.mark.parametrize("argv", [
    ["build", "named:klein-bottle"],
    ["build", "no/such/file.json"],
    ["verify", "random-wobbly:delta1"],
    ["squeeze-params", "named:delta2", "--alpha", "3/2"],
    ["squeeze-params", "named:delta2", "--alpha", "half"],
    ["analyze-map"],
    ["analyze-map", "named:nope"],
])
def test_malformed_input_exits_two(argv):
    code, _, _ = run(*argv)
    assert code == 2


def test_non_simplicial_map_is_malformed(tmp_path):
    f = json.loads((SAMPLES / "t-projection.json").read_text())
    f["vertex_map"] = [[0, 0], [1, 2], [2, 2], [3, 1]]
    f["source"]["maximal"].append([0, 1, 3])
    f["source"]["vertices"] = [0, 1, 2, 3]
    path = tmp_path / "m.json"
    path.write_text(json.dumps(f))
    code, _, out = run("analyze-map", path)
    assert code == 2 and "simplicial" in out


def test_out_file(tmp_path):
    target = tmp_path / "report.json"
    code, _, out = run("--out", target, "build", SAMPLES / "boundary-delta3.json")
    assert code == 0 and out == ""
    rep = json.loads(target.read_text())
    assert rep["data"]["f_vector"] == [4, 6, 4]


def test_emitted_files_round_trip(tmp_path):
    emitted = tmp_path / "sd.json"
    code, rep, _ = run("--seed", 2, "sd-chain", "--complex", "random:delta2", "--emit", emitted, "--levels", "1")
    assert code == 0
    again = ca.GradedChainComplex.from_json(json.loads(emitted.read_text()))
    assert again == ca.GradedChainComplex.from_json(rep["data"]["subdivided"])
    assert ca.verify(again)
    _, rep, _ = run("build", "named:wedge-spheres")
    X = SimplicialComplex.from_json(rep["data"]["complex"])
    assert SimplicialComplex.from_json(X.to_json()) == X
    f = SimplicialMap.from_json(json.loads((SAMPLES / "t-projection.json").read_text()))
    assert SimplicialMap.from_json(f.to_json()).vertex_map == f.vertex_map


def test_reports_are_byte_identical():
    argv = ["--seed", 9, "assemble", "random:t-graph", "--levels", "1"]
    assert run(*argv)[2] == run(*argv)[2]
    assert json.loads(run(*argv)[2])["timings"] == {}


def test_timings_are_opt_in():
    _, rep, _ = run("--timings", "build", "named:delta1")
    assert "build" in rep["timings"]
