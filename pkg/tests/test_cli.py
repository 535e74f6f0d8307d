import json
import math
import subprocess
import sys

import pytest

from cntbloch.cli import GeometryReport, main
from cntbloch.geometry import ChiralSpec


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def csv_rows(text):
    return [line.split(",") for line in text.splitlines() if line and not line.startswith("#")]


def footer(text):
    return dict(line[2:].split("=", 1) for line in text.splitlines() if line.startswith("# ") and "=" in line)


# -- geom --------------------------------------------------------------------------------------


def test_geom_armchair_ratio(capsys):
    code, out, _ = run(capsys, "geom", "10", "10")
    assert code == 0
    assert "a*: 0.9969" in out


def test_geom_rejects_bad_indices(capsys):
    code, _, err = run(capsys, "geom", "2", "5")
    assert code == 2
    assert "require m <= n" in err


def test_geom_json_round_trip(capsys):
    code, out, _ = run(capsys, "geom", "5", "0", "--json")
    assert code == 0
    data = json.loads(out)
    assert data["symmetry"] == "Zigzag"
    report = GeometryReport.from_json(out)
    assert report == GeometryReport.build(ChiralSpec(5, 0))
    assert json.loads(report.to_json()) == data


# -- lattice -----------------------------------------------------------------------------------


def test_lattice_xyz_format(capsys):
    code, out, _ = run(capsys, "lattice", "5", "5", "--cells", "20")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "40"
    assert lines[1] == "SWCNT (5,5) N=20"
    rows = lines[2:]
    assert len(rows) == 40
    for row in rows:
        sym, *xyz = row.split(" ")
        assert sym == "C" and len(xyz) == 3
        assert all(len(v.split(".")[1]) == 6 for v in xyz)


def test_lattice_file_is_deterministic(tmp_path, capsys):
    a, b = tmp_path / "a.xyz", tmp_path / "b.xyz"
    assert run(capsys, "lattice", "4", "2", "--out", str(a))[0] == 0
    assert run(capsys, "lattice", "4", "2", "--out", str(b))[0] == 0
    assert a.read_bytes() == b.read_bytes()
    assert b"\r" not in a.read_bytes()


def test_lattice_unwritable_path(tmp_path, capsys):
    code, _, err = run(capsys, "lattice", "5", "5", "--out", str(tmp_path / "missing" / "x.xyz"))
    assert code == 3 and "cannot write" in err


def test_lattice_bad_cell_count(capsys):
    assert run(capsys, "lattice", "4", "2", "--cells", "3")[0] == 2


# -- bz ----------------------------------------------------------------------------------------


def test_bz_armchair_bound_and_area(capsys):
    code, out, _ = run(capsys, "bz", "5", "5")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "vertex,x_tilde,z_tilde"
    assert sum(1 for line in lines[1:8] if line[0].isdigit()) == 6
    info = footer(out)
    assert info["area"] == info["parallelogram_area"]
    plus = next(line for line in lines if line.startswith("+,"))
    assert float(plus.split(",")[3]) == pytest.approx(2 * math.pi / 2.46, abs=1e-6)


def test_bz_zigzag_rotation_only(capsys):
    _, out, _ = run(capsys, "bz", "5", "0")
    plus = next(line for line in out.splitlines() if line.startswith("+,"))
    assert plus.split(",")[1] == "rotation-only"
    data = json.loads(run(capsys, "bz", "5", "0", "--json")[1])
    assert data["domains"][0]["label"] == "rotation-only"
    assert len(data["vertices"]) == 6


# -- bands -------------------------------------------------------------------------------------


def test_bands_armchair(capsys, tmp_path):
    params = tmp_path / "p.json"
    params.write_text(json.dumps({"s1": 0.0}))
    code, out, _ = run(capsys, "bands", "5", "5", "--L", "6", "--order", "1", "--params", str(params))
    assert code == 0
    rows = csv_rows(out)
    assert rows[0] == ["nu", "kappa", "eps_minus", "eps_plus"]
    assert [int(r[0]) for r in rows[1:]] == list(range(-6, 6))
    info = footer(out)
    assert float(info["gap"]) < 1e-9
    assert info["classification"] == "metal-like"


def test_bands_zigzag_gap(capsys, tmp_path):
    params = tmp_path / "p.json"
    params.write_text(json.dumps({"s1": 0.0, "t1": 2.7}))
    _, out, _ = run(capsys, "bands", "5", "0", "--L", "6", "--params", str(params))
    assert float(footer(out)["gap"]) == pytest.approx(5.4, abs=1e-9)


def test_bands_chiral_second_order_smoke(capsys):
    code, out, _ = run(capsys, "bands", "4", "2", "--L", "4", "--order", "2")
    assert code == 0
    rows = csv_rows(out)[1:]
    assert len(rows) == 8
    assert all(math.isfinite(float(v)) for r in rows for v in r)


def test_bands_dense_is_labelled(capsys):
    _, out, _ = run(capsys, "bands", "5", "5", "--dense", "30")
    assert len(csv_rows(out)) == 31
    assert "non-cyclic" in out


@pytest.mark.parametrize("content, field", [('{"s1": 2}', "s1"), ('{"hop": 1}', "hop"), ("{oops", "<json>")])
def test_bands_bad_params(capsys, tmp_path, content, field):
    params = tmp_path / "p.json"
    params.write_text(content)
    code, _, err = run(capsys, "bands", "5", "5", "--params", str(params))
    assert code == 4
    assert f"'{field}'" in err


def test_bands_missing_params_file(capsys, tmp_path):
    assert run(capsys, "bands", "5", "5", "--params", str(tmp_path / "none.json"))[0] == 3


def test_bands_small_L(capsys):
    assert run(capsys, "bands", "5", "5", "--L", "1")[0] == 2


# -- verify and tables -----------------------------------------------------------------------------


def test_verify_chiral(capsys):
    code, out, _ = run(capsys, "verify", "4", "2")
    assert code == 0
    assert any(line.startswith("a_hat·b_tilde diag = 3π PASS") for line in out.splitlines())
    assert out.splitlines()[-1].endswith("0 failed")


def test_verify_zigzag_informational(capsys):
    code, out, _ = run(capsys, "verify", "5", "0")
    assert code == 0
    assert "a_hat·b_tilde diag = 3π informational" in out


def test_tables(capsys):
    code, out, _ = run(capsys, "tables")
    assert code == 0
    assert "(20,20)  a*=0.999" in out
    six_one = next(line for line in out.splitlines() if "(6,1)" in line)
    assert "ref=0.9635" in six_one and "ref=0.9947" in six_one
    assert "MISMATCH" not in out
    assert out.splitlines()[-1] == "15 rows, 0 outside 5e-05"


def test_outputs_are_byte_identical(capsys):
    for argv in (["geom", "6", "1"], ["bz", "8", "3", "--json"], ["bands", "7", "4", "--order", "2"], ["tables"]):
        assert run(capsys, *argv)[1] == run(capsys, *argv)[1]


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "cntbloch", "geom", "6", "1"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert "a+*: 0.963" in proc.stdout
