import csv
import json
import subprocess
import sys
import xml.etree.ElementTree as ET

import pytest

from minkbill.cli import main
from minkbill.geometry import read_polygon, write_polygon

SVG = "{http://www.w3.org/2000/svg}"


@pytest.fixture
def files(tmp_path, K, T, square):
    out = {}
    for name, P in (("K", K), ("T", T), ("square", square)):
        path = tmp_path / f"{name}.json"
        write_polygon(P, path)
        out[name] = str(path)
    return out


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


# -- golden outputs -------------------------------------------------------------


def test_capacity_golden(capsys, files):
    code, out, _ = run(capsys, "capacity", "--k", files["K"], "--t", files["T"])
    assert code == 0
    assert out.strip() == "3.4409548012"


def test_capacity_grid(capsys, files):
    code, out, _ = run(capsys, "capacity", "--k", files["K"], "--t", files["T"], "--method", "grid", "--grid-n", "50")
    assert code == 0
    assert 3.4409548 <= float(out) <= 3.4409548 + 2e-2


def test_systole_golden(capsys, files):
    assert run(capsys, "systole", "--k", files["square"], "--t", files["square"])[1].strip() == "0.5000000000"
    assert run(capsys, "systole", "--k", files["K"], "--t", files["T"])[1].strip() == "1.0472135955"


def test_simulate_generic(capsys, files, tmp_path):
    svg = tmp_path / "orbit.svg"
    code, out, _ = run(
        capsys, "simulate", "--k", files["K"], "--t", files["T"], "--q0", "0.5163118960,-0.6657395614", "--dir=-1,0.3",
        "--svg", svg,
    )
    assert code == 0
    lines = dict(line.split(" ", 1) for line in out.strip().splitlines())
    assert lines["verdict"] == "periodic"
    assert lines["period"] == "10"
    assert float(lines["tlength"]) > 3.4409548
    ET.parse(svg)


def test_classes_csv(capsys, files, tmp_path):
    out_csv = tmp_path / "classes.csv"
    code, out, _ = run(capsys, "classes", "--k", files["K"], "--t", files["T"], "--starts", "40", "--out", out_csv)
    assert code == 0
    rows = list(csv.reader(out_csv.open()))
    assert rows[0] == ["period", "tlength", "count"]
    assert [r[0] for r in rows[1:]] == ["10", "10"]
    assert sum(int(r[2]) for r in rows[1:]) == 40


def test_sweep_csv(capsys, files, tmp_path):
    out_csv = tmp_path / "sweep.csv"
    code, out, _ = run(
        capsys, "sweep", "--lk", files["square"], "--lt", files["square"], "--ck", files["K"], "--ct", files["T"],
        "--steps", "4", "--out", out_csv,
    )
    assert code == 0
    rows = list(csv.reader(out_csv.open()))
    assert rows[0] == ["lambda", "sys"]
    assert len(rows) == 6
    assert "sys_at_root 1.00000" in out


def test_products_commands(capsys, tmp_path):
    assert run(capsys, "products", "factor", 2, 1, 1)[1].strip() == "0.3333333333"
    assert run(capsys, "products", "factor", 2, 2, "inf")[1].strip() == "1.0000000000"
    code, out, _ = run(capsys, "products", "kntn", "--n", 4)
    assert code == 0
    assert "predicted_sys 1.0966563146" in out
    assert "capacity asserted" in out
    spec = tmp_path / "spec.json"
    spec.write_text(json.dumps({"p": 1, "components": [{"interval": 1}, {"interval": 1}]}))
    code, out, _ = run(capsys, "products", "mcvol", "--spec", spec, "--samples", 20000)
    assert code == 0
    est = dict(line.split(" ", 1) for line in out.strip().splitlines())
    lo, hi = map(float, est["ci99"].split())
    assert lo <= 2.0 <= hi


# -- errors -----------------------------------------------------------------------


def test_missing_file_exits_2(capsys, files, tmp_path):
    code, out, err = run(capsys, "capacity", "--k", tmp_path / "nope.json", "--t", files["T"])
    assert code == 2
    assert out == ""
    assert len(err.strip().splitlines()) == 1


def test_bad_polygon_exits_2(capsys, files, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"vertices": [[0, 0], [1, 0], [2, 0]]}))
    assert run(capsys, "capacity", "--k", bad, "--t", files["T"])[0] == 2


def test_norm_body_without_origin_exits_2(capsys, files, tmp_path, T):
    off = tmp_path / "off.json"
    write_polygon(T.translated((3, 0)), off)
    assert run(capsys, "systole", "--k", files["K"], "--t", off)[0] == 2


def test_invalid_exponent_exits_2(capsys):
    assert run(capsys, "products", "factor", 1, 1, "0.5")[0] == 2
    assert run(capsys, "products", "factor", 1, 1, "abc")[0] == 2


def test_off_boundary_start_exits_2(capsys, files):
    assert run(capsys, "simulate", "--k", files["K"], "--t", files["T"], "--q0", "0.1,0.1", "--dir", "1,0")[0] == 2


def test_unknown_command_exits_2(capsys):
    assert run(capsys, "bogus")[0] == 2


# -- JSON reports -----------------------------------------------------------------------


def test_json_report(capsys, files):
    code, out, _ = run(capsys, "capacity", "--k", files["K"], "--t", files["T"], "--json")
    assert code == 0
    rep = json.loads(out)
    assert {"command", "seed", "inputs", "method", "capacity", "minimizer", "momenta", "wall_time"} <= set(rep)
    assert rep["method"] == "exact"
    assert rep["capacity"] == pytest.approx(3.4409548011779334, abs=1e-12)
    assert set(rep["inputs"]) == {files["K"], files["T"]}
    assert all(len(h) == 64 for h in rep["inputs"].values())


def test_json_global_flag_after_subcommand(capsys, files):
    a = json.loads(run(capsys, "--json", "systole", "--k", files["K"], "--t", files["T"])[1])
    b = json.loads(run(capsys, "systole", "--k", files["K"], "--t", files["T"], "--json")[1])
    assert a["systolic_ratio"] == b["systolic_ratio"]


def test_reports_reproducible(capsys, files):
    argv = ("classes", "--k", files["K"], "--t", files["T"], "--starts", "20", "--seed", "9", "--json")
    a = json.loads(run(capsys, *argv)[1])
    b = json.loads(run(capsys, *argv)[1])
    a.pop("wall_time")
    b.pop("wall_time")
    assert a == b


def test_kntn_json_is_asserted(capsys):
    rep = json.loads(run(capsys, "products", "kntn", "--n", 3, "--json")[1])
    assert rep["asserted"] is True


# -- figures -----------------------------------------------------------------------------


def _declared(svg_path):
    root = ET.parse(svg_path).getroot()
    desc = root.find(f"{SVG}desc").text
    counts = dict(kv.split("=") for kv in desc.split())
    paths = len(root.findall(f".//{SVG}path"))
    lines = len(root.findall(f".//{SVG}polyline"))
    return {k: int(v) for k, v in counts.items()}, paths, lines


@pytest.mark.parametrize(
    "kind, extra",
    [
        ("product-pair", []),
        ("trajectory", ["--q0", "0.5163118960,-0.6657395614", "--dir=-1,0.3"]),
        ("unfolding", ["--q0", "0.5163118960,-0.6657395614", "--dir=-1,0.3"]),
        ("minimizer-family", []),
    ],
)
def test_figures_parse_with_declared_counts(capsys, files, tmp_path, kind, extra):
    svg = tmp_path / f"{kind}.svg"
    code, out, _ = run(capsys, "figure", kind, "--k", files["K"], "--t", files["T"], *extra, "--out", svg)
    assert code == 0
    counts, paths, lines = _declared(svg)
    assert counts == {"paths": paths, "polylines": lines}
    assert f"paths {paths}" in out


def test_unfolding_figure_has_one_copy_per_bounce(capsys, files, tmp_path):
    svg = tmp_path / "u.svg"
    run(capsys, "figure", "unfolding", "--k", files["K"], "--t", files["T"],
        "--q0", "0.5163118960,-0.6657395614", "--dir=-1,0.3", "--out", svg)
    counts, _, _ = _declared(svg)
    assert counts == {"paths": 10, "polylines": 1}


def test_figure_without_start_exits_2(capsys, files, tmp_path):
    assert run(capsys, "figure", "trajectory", "--k", files["K"], "--t", files["T"], "--out", tmp_path / "x.svg")[0] == 2


# -- polygon JSON -----------------------------------------------------------------------


def test_polygon_json_round_trip(tmp_path, K):
    path = tmp_path / "K.json"
    write_polygon(K, path)
    assert (read_polygon(path).vertices == K.vertices).all()


def test_module_entry_point(files):
    proc = subprocess.run(
        [sys.executable, "-m", "minkbill", "systole", "--k", files["square"], "--t", files["square"]],
        capture_output=True, text=True, check=False,
    )
    assert proc.returncode == 0
    assert proc.stdout.strip() == "0.5000000000"
