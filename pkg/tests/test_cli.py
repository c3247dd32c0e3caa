import json
import math

import numpy as np
import pytest

from rathull.cli import main
from rathull.errors import InvalidParams
from rathull.report import RunConfig, read_csv, run
from rathull.surfaces import family_from_dict, validate_family


def test_gallery_lists_families(capsys):
    assert main(["gallery"]) == 0
    names = [json.loads(line)["name"] for line in capsys.readouterr().out.splitlines()]
    assert names == ["klein", "klein-star", "hopf-torus", "spin-torus", "disc"]


def test_klein_run_writes_report(tmp_path):
    assert main(["run", "--family", "klein", "--out", str(tmp_path)]) == 0
    rep = json.loads((tmp_path / "report.json").read_text())
    (a,) = rep["results"]["decomposition"]["attached"]
    assert [a["inner_radius"], a["outer_radius"]] == [1.0, 9.0]
    assert rep["verdict"] is True
    assert "not checked" in rep["hypothesis"]
    assert (tmp_path / "timings.json").exists()


def test_invalid_params_exit_2(capsys):
    assert main(["run", "--family", "klein", "--param", "a=1", "--param", "b=1"]) == 2
    assert "InvalidParams" in capsys.readouterr().err


def test_embedded_spin_profile_exit_2(tmp_path, capsys):
    cfg = {"family": {"name": "spin-torus", "params": {
        "z_profile": {"re": {"const": 0, "cos": [1]}, "im": {"const": 0, "cos": [], "sin": [1]}}}}}
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(cfg))
    assert main(["run", "--config", str(path)]) == 2
    assert "ValidationFailed" in capsys.readouterr().err


def test_bad_config_exit_2(tmp_path):
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps({"family": "klein", "bogus": 1}))
    assert main(["run", "--config", str(path)]) == 2
    assert main(["run", "--config", str(tmp_path / "missing.json")]) == 2
    assert main(["total-real", "--family", "klein", "--resolution", "16"]) == 2


def test_failed_check_exit_1_with_partial_report(tmp_path):
    # an absurdly small residual tolerance makes the Stokes check fail honestly
    code = main(["certify", "--family", "spin-torus", "--tol-residual", "1e-30", "--out", str(tmp_path)])
    assert code == 1
    rep = json.loads((tmp_path / "report.json").read_text())
    assert rep["verdicts"]["certificate:stokes"] is False


def test_moments_subcommand(capsys):
    assert main(["moments", "--family", "klein", "--psi", "conj_z", "--json"]) == 0
    rep = json.loads(capsys.readouterr().out)
    r = rep["results"]["certificate:moments"]["reports"][0]
    k0 = r["moments"][r["k"].index(0)]
    assert abs(complex(*k0) - 160j * math.pi) < 1e-6 * 160 * math.pi


def test_gap_subcommand(capsys):
    assert main(["gap", "--json", "--N", "4"]) == 0
    rep = json.loads(capsys.readouterr().out)
    row = rep["results"]["certificate:laurent-gap"]["rows"][0]
    assert abs(row["residual"] - 40 * math.sqrt(82) / 41) < 1e-9


def test_decompose_hopf_latitudes(capsys):
    assert main(["decompose", "--family", "hopf-torus", "--json"]) == 0
    rep = json.loads(capsys.readouterr().out)
    a = rep["results"]["decomposition"]["attached"][0]
    bound = math.sqrt(1 - abs(complex(*a["t"])) ** 2)
    assert np.allclose(sorted(a["latitude_bounds"]), [-bound, bound], atol=1e-9)


def test_report_subcommand(tmp_path, capsys):
    main(["total-real", "--family", "disc", "--out", str(tmp_path)])
    capsys.readouterr()
    assert main(["report", str(tmp_path / "report.json")]) == 0
    out = capsys.readouterr().out
    assert "verdict: PASS" in out and "min |det|" in out
    assert main(["report", str(tmp_path / "nope.json")]) == 2


def test_reports_are_deterministic(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    for d in (a, b):
        assert main(["decompose", "--family", "spin-torus", "--out", str(d)]) == 0
    for name in ("report.json", "gamma.csv", "fiber_circles.csv", "annulus.csv"):
        assert (a / name).read_bytes() == (b / name).read_bytes()


@pytest.mark.parametrize("name", ["klein", "hopf-torus", "spin-torus", "disc"])
def test_csv_round_trip(tmp_path, name):
    run(RunConfig(family={"name": name}, stages=["validate", "decompose"], gamma_samples=256, out=str(tmp_path)))
    fam = family_from_dict({"name": name})
    files = ["fiber_circles.csv"] + (["disc_boundaries.csv"] if name == "klein" else [])
    for f in files:
        header, data = read_csv(tmp_path / f)
        assert header[2:] == ["z_re", "z_im", "w_re", "w_im"]
        z, w = fam.evaluate(data[:, 0], data[:, 1])
        assert np.max(np.abs(z - (data[:, 2] + 1j * data[:, 3]))) < 1e-12
        assert np.max(np.abs(w - (data[:, 4] + 1j * data[:, 5]))) < 1e-12
    header, gamma = read_csv(tmp_path / "gamma.csv")
    assert header == ["param", "t_re", "t_im"]


def test_run_config_minimums():
    with pytest.raises(InvalidParams):
        RunConfig(surface_resolution=32)
    with pytest.raises(InvalidParams):
        RunConfig(gamma_samples=100)
    with pytest.raises(InvalidParams):
        RunConfig(contour_samples=100)
    with pytest.raises(InvalidParams):
        RunConfig(tolerances={"zero_tol": -1})


def test_certificate_family_mismatch():
    with pytest.raises(InvalidParams):
        run(RunConfig(family={"name": "disc"}, certificates=["constancy"]))
