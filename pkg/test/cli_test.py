import json

import pytest

from app.cli import cli
from app.repositories.grid_csv import GridCSVRepository
from app.schemas.figures import FIGURES

THREE_ATOMS = {
    "type": "minid",
    "d": 2,
    "atoms": [{"w": 0.4, "p": [0.3, 1.0]}, {"w": 0.5, "p": [1.0, 0.6]}, {"w": 0.2, "p": [0.5, 0.5]}],
}


def test_gamma_grid_writes_grid_csv(runner, write_spec, tmp_path):
    out = tmp_path / "clayton.csv"
    result = runner.invoke(cli, ["gamma-grid", "--model", str(write_spec({"type": "clayton"})), "--out", str(out), "--resolution", "11"])
    assert result.exit_code == 0, result.output
    table = GridCSVRepository().load(out)
    assert table.header["provenance"] == "closed-form"
    assert table.shape == (11, 11)
    assert table.values[0, 0] == pytest.approx(1.0)


def test_gamma_grid_for_minid_is_a_usage_error(runner, write_spec, tmp_path):
    result = runner.invoke(cli, ["gamma-grid", "--model", str(write_spec(THREE_ATOMS)), "--out", str(tmp_path / "x.csv")])
    assert result.exit_code == 2
    assert not (tmp_path / "x.csv").exists()


def test_invalid_model_file_is_a_usage_error(runner, tmp_path):
    path = tmp_path / "broken.json"
    path.write_text('{"type": "clayton", "unknown": 1}', encoding="utf-8")
    result = runner.invoke(cli, ["gamma-grid", "--model", str(path), "--out", str(tmp_path / "x.csv")])
    assert result.exit_code == 2


def test_bad_pair_is_a_usage_error(runner, write_spec, tmp_path):
    result = runner.invoke(cli, ["gamma-grid", "--model", str(write_spec({"type": "clayton"})), "--out", str(tmp_path / "x.csv"), "--pair", "1-2"])
    assert result.exit_code == 2


def test_factorize_three_atoms(runner, write_spec, tmp_path):
    out = tmp_path / "lambda.csv"
    result = runner.invoke(cli, [
        "factorize", "--model", str(write_spec(THREE_ATOMS)), "--subset", "1,2", "--grid", "0:0.6:2", "--out", str(out),
    ])
    assert result.exit_code == 0, result.output
    table = GridCSVRepository().load(out)
    assert table.header["kind"] == "exponent"
    assert table.values[1, 1] == pytest.approx(0.2, abs=1e-12)


def test_factorize_rejects_bad_grid(runner, write_spec, tmp_path):
    result = runner.invoke(cli, [
        "factorize", "--model", str(write_spec({"type": "clayton"})), "--subset", "1,2", "--grid", "0:2", "--out", str(tmp_path / "x.csv"),
    ])
    assert result.exit_code == 2


def test_factorize_beyond_unit_cube_is_a_domain_error(runner, write_spec, tmp_path):
    result = runner.invoke(cli, [
        "factorize", "--model", str(write_spec(THREE_ATOMS)), "--subset", "1,2", "--grid", "0:1:3", "--out", str(tmp_path / "x.csv"),
    ])
    assert result.exit_code == 3


def test_factorize_rejects_subset_outside_dimension(runner, write_spec, tmp_path):
    result = runner.invoke(cli, [
        "factorize", "--model", str(write_spec({"type": "clayton"})), "--subset", "1,3", "--grid", "0:2:3", "--out", str(tmp_path / "x.csv"),
    ])
    assert result.exit_code == 2


def test_sample_is_deterministic(runner, write_spec, tmp_path):
    spec = str(write_spec({"type": "shared_gamma", "shape": 2.0, "d": 3}))
    first, second = tmp_path / "a.csv", tmp_path / "b.csv"
    for out in (first, second):
        result = runner.invoke(cli, ["sample", "--model", spec, "-n", "50", "--seed", "11", "--out", str(out)])
        assert result.exit_code == 0, result.output
    assert first.read_text() == second.read_text()
    table = GridCSVRepository().load(first)
    assert table.columns == ("t1", "t2", "t3")
    assert table.data.shape == (50, 3)


def test_sample_rejects_non_positive_n(runner, write_spec, tmp_path):
    result = runner.invoke(cli, ["sample", "--model", str(write_spec({"type": "clayton"})), "-n", "0", "--out", str(tmp_path / "x.csv")])
    assert result.exit_code == 2


def test_verify_lattice_suite(runner, tmp_path):
    out = tmp_path / "report.json"
    result = runner.invoke(cli, ["verify", "--suite", "lattice", "--out", str(out)])
    assert result.exit_code == 0, result.output
    report = json.loads(result.stdout)
    assert report["suite"] == "lattice"
    assert report["passed"] is True
    assert json.loads(out.read_text()) == report


def test_verify_unknown_suite(runner):
    result = runner.invoke(cli, ["verify", "--suite", "nope"])
    assert result.exit_code == 2


def test_figures_writes_every_grid(runner, tmp_path):
    result = runner.invoke(cli, ["figures", "--out", str(tmp_path)])
    assert result.exit_code == 0, result.output
    assert sorted(p.name for p in tmp_path.glob("*.csv")) == sorted(f.filename for f in FIGURES)
