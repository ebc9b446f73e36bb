import json

import numpy as np
import pytest

from hollowbubble import io as hio
from hollowbubble.cli import UsageError, main, parse_float_list, parse_init
from hollowbubble.geometry import FourierShape, SupportShape, discretize


def test_shape_json_roundtrip(tmp_path):
    shapes = [FourierShape(4, 0.01, [0, 0.1, -0.02, 0.0], [0, 0, 0.03, 0.01]), SupportShape(3, 1.2, [0, 0.05, 0], [0, 0, 0.01])]
    for s in shapes:
        path = tmp_path / "s.json"
        hio.save_shape(s, path, we=2.0)
        back = hio.load_shape(path)
        assert type(back) is type(s)
        np.testing.assert_array_equal(back.a, s.a)
        np.testing.assert_array_equal(back.b, s.b)


def test_malformed_json_reports_position():
    with pytest.raises(hio.ShapeFileError, match="line 3"):
        hio.loads_shape('{\n "kind": "fourier",\n "a": [1,,2]\n}')
    with pytest.raises(hio.ShapeFileError):
        hio.loads_shape('{"kind": "polygon", "max_mode": 2}')
    with pytest.raises(hio.ShapeFileError):
        hio.loads_shape('{"kind": "fourier"}')


def test_csv_config_header():
    text = hio.discretization_csv(discretize(FourierShape.disk(2), 8), {"nodes": 8})
    cfg, rows = hio.read_csv(text)
    assert cfg == {"nodes": 8}
    assert len(rows) == 8 and set(rows[0]) == set(hio.DISCRETIZATION_COLUMNS)
    assert float(rows[0]["H"]) == pytest.approx(1.0)


def test_to_json_puts_config_first():
    d = json.loads(hio.to_json({"x": np.float64(1.5), "v": np.arange(2)}, {"a": 1}))
    assert list(d) == ["config", "x", "v"] and d["v"] == [0, 1]


def test_parse_float_list():
    assert parse_float_list("0,1,2") == [0, 1, 2]
    np.testing.assert_allclose(parse_float_list("0:0.25:0.05"), [0, 0.05, 0.1, 0.15, 0.2, 0.25])
    with pytest.raises(UsageError):
        parse_float_list("0:1:-1")


def test_parse_init():
    s = parse_init("cos2:0.05+sin3:0.01", 6, False)
    assert s.a[1] == 0.05 and s.b[2] == 0.01
    assert isinstance(parse_init("disk", 4, True), SupportShape)
    with pytest.raises(UsageError):
        parse_init("cos9:0.1", 6, False)
    r = parse_init("random:seed=3,amp=0.1", 6, False)
    assert r.min_radius() > 0.85


@pytest.fixture
def disk_file(tmp_path):
    path = tmp_path / "disk.json"
    hio.save_shape(FourierShape.disk(2), path)
    return path


def test_cli_validate_energy_capacity(disk_file, tmp_path, capsys):
    out = str(tmp_path / "out")
    assert main(["validate", str(disk_file), "--out", out]) == 0
    assert main(["energy", str(disk_file), "--we", "2", "--out", out]) == 0
    assert main(["capacity", str(disk_file), "--out", out]) == 0
    diag = json.loads((tmp_path / "out" / "disk_capacity.json").read_text())
    assert diag["capacity"] == pytest.approx(1.0, abs=1e-12)
    rep = json.loads((tmp_path / "out" / "disk_energy.json").read_text())
    assert rep["config"]["we"] == 2.0
    assert rep["functional"] == pytest.approx(2 * np.pi, abs=1e-12)


def test_cli_input_errors(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('{"kind": "fourier", "max_mode": 2,\n "a": [0, -3.0]}')
    assert main(["validate", str(bad), "--out", str(tmp_path)]) == 2
    broken = tmp_path / "broken.json"
    broken.write_text('{"kind": \n')
    assert main(["energy", str(broken), "--out", str(tmp_path)]) == 2
    assert "line" in capsys.readouterr().err
    assert main(["capacity", str(tmp_path / "missing.json")]) == 2
    assert main(["branch", "--m", "2", "--to", "3", "--out", str(tmp_path)]) == 2
    assert main(["minimize"]) == 2
    assert main(["nonsense"]) == 2


def test_cli_spectrum(tmp_path):
    assert main(["spectrum", "--kmax", "3", "--we", "0,3", "--out", str(tmp_path), "--format", "json"]) == 0
    d = json.loads((tmp_path / "spectrum.json").read_text())
    assert len(d["rows"]) == 6
    tags = {(r[0], r[1]): r[5] for r in d["rows"]}
    assert tags[(2, 3.0)] == "bifurcation" and tags[(1, 0.0)] == "translation"


def test_cli_minimize(tmp_path):
    assert main(["minimize", "--we", "1", "--init", "cos2:0.05", "--modes", "6", "--out", str(tmp_path)]) == 0
    shape = hio.load_shape(tmp_path / "minimize_we1_none_shape.json")
    assert np.abs(shape.a).max() < 1e-6
    cfg, rows = hio.read_csv((tmp_path / "minimize_we1_none_history.csv").read_text())
    assert cfg["we"] == 1.0 and rows
    assert main(["minimize", "--we", "1", "--constraint", "convex", "--modes", "6", "--out", str(tmp_path)]) == 0


def test_cli_trivial_branch(tmp_path, monkeypatch):
    monkeypatch.setenv("HOLLOWBUBBLE_OUT", str(tmp_path))
    assert main(["branch", "--trivial", "--we", "0:2.9"]) == 0
    cfg, rows = hio.read_csv((tmp_path / "branch_trivial.csv").read_text())
    assert float(rows[-1]["we"]) == pytest.approx(2.9)
    assert (tmp_path / "branch_trivial" / "point_000.json").exists()


def test_cli_ellipse_scan(tmp_path):
    assert main(["ellipse-scan", "--we", "3", "--out", str(tmp_path)]) == 0
    fit = json.loads((tmp_path / "ellipse_we3_fit.json").read_text())
    assert abs(fit["c2"]) < 1e-4
