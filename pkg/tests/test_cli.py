import json
import os
import subprocess
import sys

import pytest

from udpaths.cli import main
from udpaths.constructions import path_construction, quadratic_c4_config
from udpaths.counting import count_antipodal_free_paths, count_paths
from udpaths.graph import build_sphere_graph, K4
from udpaths.io import config_from_dict, config_to_dict


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_construct_sphere_path(capsys):
    code, out, _ = run(capsys, "construct", "--kind", "sphere-path", "--k", "5", "--n", "50")
    assert code == 0
    data = json.loads(out)
    assert len(data["circles"]) == 2


def test_construct_grid(capsys):
    code, out, _ = run(capsys, "construct", "--kind", "grid", "--N", "3")
    data = json.loads(out)
    assert (len(data["points"]), len(data["lines"])) == (54, 27)


def test_construct_r3(capsys):
    code, out, _ = run(capsys, "construct", "--kind", "r3-bipartite", "--k", "6", "--n", "20")
    assert code == 0 and len(json.loads(out)["line_points"]) == 3


def test_construct_bad_parameters(capsys):
    code, _, err = run(capsys, "construct", "--kind", "sphere-path", "--k", "5")
    assert code == 1 and err


def test_unknown_command_is_usage_error(capsys):
    with pytest.raises(SystemExit) as info:
        main(["frobnicate"])
    assert info.value.code == 1


def test_count_quadratic_cycles_both_engines(tmp_path, capsys):
    cfg = tmp_path / "q.json"
    run(capsys, "construct", "--kind", "quadratic-c4", "--n", "10", "--out", str(cfg))
    code, out, _ = run(capsys, "count", "--input", str(cfg), "--what", "cycles", "--k", "4",
                       "--engine", "both")
    assert code == 0
    reports = json.loads(out)["reports"]
    assert [r["cycles_dihedral"] for r in reports] == ["28", "28"]
    assert "timing" in json.loads(out)


def test_count_axes_edge_list(tmp_path, capsys):
    edges = tmp_path / "axes.txt"
    edges.write_text("0 1\n1 2\n0 2\n")
    code, out, _ = run(capsys, "count", "--edges", str(edges), "--k", "3")
    assert code == 0
    assert json.loads(out)["reports"][0]["unordered_paths"] == "3"


def test_count_budget_refusal(tmp_path, capsys):
    cfg = tmp_path / "p.json"
    run(capsys, "construct", "--kind", "sphere-path", "--k", "8", "--n", "300", "--out", str(cfg))
    code, _, err = run(capsys, "count", "--input", str(cfg), "--budget", "1000")
    assert code == 3 and "refused" in err


def test_count_prescribed(tmp_path, capsys):
    cfg = tmp_path / "r3.json"
    run(capsys, "construct", "--kind", "r3-bipartite", "--k", "6", "--n", "20", "--out", str(cfg))
    code, out, _ = run(capsys, "count", "--input", str(cfg), "--what", "prescribed")
    assert code == 0 and json.loads(out)["reports"][0]["copies"] == "4080"


def test_round_trip_matches_memory(tmp_path, capsys):
    cfg_path = tmp_path / "p.json"
    run(capsys, "construct", "--kind", "sphere-path", "--k", "5", "--n", "60", "--out", str(cfg_path))
    loaded = config_from_dict(json.loads(cfg_path.read_text()))
    fresh = path_construction(5, 60)
    assert config_to_dict(loaded) == config_to_dict(fresh)
    code, out, _ = run(capsys, "count", "--input", str(cfg_path), "--k", "5")
    expected = count_paths(build_sphere_graph(fresh), 5).unordered_paths
    assert json.loads(out)["reports"][0]["unordered_paths"] == str(expected)


def test_edges_export_round_trip(tmp_path, capsys):
    e, s = tmp_path / "g.txt", tmp_path / "g.json"
    run(capsys, "construct", "--kind", "quadratic-c4", "--n", "12", "--edges", str(e), "--sidecar", str(s))
    code, out, _ = run(capsys, "count", "--edges", str(e), "--sidecar", str(s), "--what", "antipodal-free", "--k", "3")
    assert code == 0
    g = build_sphere_graph(quadratic_c4_config(12))
    assert json.loads(out)["reports"][0]["antipodal_free_unordered"] == str(count_antipodal_free_paths(g, 3))


def test_count_output_deterministic_except_timing(tmp_path, capsys):
    cfg = tmp_path / "c.json"
    run(capsys, "construct", "--kind", "sphere-cycle", "--k", "5", "--n", "60", "--out", str(cfg))
    outs = []
    for _ in range(2):
        _, out, _ = run(capsys, "count", "--input", str(cfg), "--what", "cycles", "--k", "5")
        data = json.loads(out)
        data.pop("timing")
        outs.append(json.dumps(data, sort_keys=True))
    assert outs[0] == outs[1]
    _, a, _ = run(capsys, "construct", "--kind", "enhanced-path", "--k", "7", "--n", "80")
    _, b, _ = run(capsys, "construct", "--kind", "enhanced-path", "--k", "7", "--n", "80")
    assert a == b


def test_fit_writes_csv_and_json(tmp_path, capsys):
    c, j = tmp_path / "s.csv", tmp_path / "f.json"
    code, _, _ = run(capsys, "fit", "--construction", "quadratic-c4", "--k", "4",
                     "--grid", "50,100,200,400", "--mode", "cycles", "--csv", str(c), "--json", str(j))
    assert code == 0
    assert c.read_text().splitlines()[0] == "construction,k,n,count"
    summary = json.loads(j.read_text())
    assert abs(summary["slope"] - 2) <= 0.05
    assert summary["predicted"] == "2" and summary["bound_row"]["kind"] == "sphere-cycle"


def test_fit_short_grid(capsys):
    code, _, _ = run(capsys, "fit", "--construction", "sphere-path", "--k", "4", "--grid", "50,100")
    assert code == 1


def test_lp_verify_k4_file(tmp_path, capsys):
    f = tmp_path / "k4.txt"
    f.write_text("# K4\n" + "".join(f"{a} {b}\n" for a, b in K4.edges))
    code, out, _ = run(capsys, "lp-verify", str(f))
    assert code == 0
    cert = json.loads(out)
    assert cert["max_xi"] == "2/1"
    assert cert["argmax"] == {"H": [], "lambda": [3, 3, 3, 3]}


def test_lp_verify_prism(capsys):
    code, out, _ = run(capsys, "lp-verify", "--named", "prism")
    assert code == 0
    num, den = json.loads(out)["max_xi"].split("/")
    assert int(num) <= 3 * int(den)


def test_lp_verify_rejects_non_cubic(tmp_path, capsys):
    f = tmp_path / "c4.txt"
    f.write_text("0 1\n1 2\n2 3\n3 0\n")
    code, _, err = run(capsys, "lp-verify", str(f))
    assert code == 1 and "3-regular" in err


def test_bounds(capsys):
    code, out, _ = run(capsys, "bounds", "--max-k", "10")
    rows = json.loads(out)
    assert code == 0
    assert any(r["kind"] == "r3-cycle" and r["upper"] == "12/5" for r in rows)


def test_console_entry_point(tmp_path):
    env = dict(os.environ, UDPATHS_JOBS="1")
    res = subprocess.run([sys.executable, "-m", "udpaths.cli", "bounds", "--max-k", "4"],
                         capture_output=True, text=True, env=env)
    assert res.returncode == 0 and json.loads(res.stdout)
