import json
import math

import pandas as pd
import pytest

from fuchstools import processors
from fuchstools.freegroup import GroupSpec
from fuchstools.hyperbolic import Isometry
from fuchstools.processors import EXIT_ERROR, EXIT_OK, EXIT_VIOLATION, RunConfig, main
from fuchstools.util.general import read_report_csv

from .conftest import LOG_3_2SQRT2


def _manifest(path):
    with open(f"{path}.manifest.json") as fh:
        return json.load(fh)


def test_bounds_table_run(tmp_path):
    out = tmp_path / "bounds.csv"
    assert main(["bounds", "--k-range", "2..64", "-o", str(out)]) == EXIT_OK
    df = read_report_csv(str(out))
    assert len(df) == 63
    assert (df["B_k"] > df["log_2k_minus_1"]).all()
    manifest = _manifest(out)
    assert manifest["command"] == "bounds"
    assert manifest["args"]["k_range"] == "2..64"
    assert manifest["wall_time_sec"] >= 0.0
    assert set(manifest["versions"]) >= {"fuchstools", "numpy", "scipy", "pandas"}


def test_verify_gamma2_trials(tmp_path):
    out = tmp_path / "verify.csv"
    assert main(["verify", "-i", "gamma2", "--trials", "50", "--seed", "7", "-o", str(out)]) == EXIT_OK
    df = read_report_csv(str(out))
    assert len(df) == 50
    assert df["satisfies_main"].all()
    assert (df["defect"] >= -1e-9).all()
    assert _manifest(out)["seed"] == 7


def test_verify_at_extremal_point(tmp_path):
    out = tmp_path / "at_i.csv"
    assert main(["verify", "-i", "gamma2", "--z", "0+1i", "-o", str(out)]) == EXIT_OK
    df = read_report_csv(str(out))
    assert len(df) == 1
    assert abs(df["defect"].iloc[0]) < 1e-9
    assert df["d_1"].iloc[0] == pytest.approx(LOG_3_2SQRT2, abs=1e-12)


def test_verify_is_deterministic(tmp_path):
    out = tmp_path / "v.csv"
    argv = ["verify", "-i", "gamma2", "--trials", "20", "--seed", "3", "-o", str(out), "--clobber"]
    assert main(argv) == EXIT_OK
    first = out.read_bytes()
    assert main(argv) == EXIT_OK
    assert out.read_bytes() == first


def test_sweep_run(tmp_path):
    out = tmp_path / "sweep.csv"
    assert main(["sweep", "--k-range", "2..3", "--trials", "20", "-o", str(out)]) == EXIT_OK
    df = read_report_csv(str(out))
    assert len(df) == 20
    assert sorted(df["k"].unique()) == [2, 3]
    assert list(df.columns[:5]) == ["k", "z_x", "z_y", "d_1", "d_2"]
    assert df.fuchs.violations().empty


def test_optimize_gamma2(tmp_path):
    out = tmp_path / "opt.json"
    assert main(["optimize", "-i", "gamma2", "-o", str(out)]) == EXIT_OK
    payload = json.loads(out.read_text())
    assert payload["value"] == pytest.approx(1.7627471740, abs=1e-6)
    assert payload["bound"] == pytest.approx(LOG_3_2SQRT2)
    assert payload["objective"] == "optimize"
    assert payload["local_optima"]


def test_sharpness_on_schottky(tmp_path):
    out = tmp_path / "sharp.json"
    argv = ["sharpness", "-i", "schottky:k=2,r=0.3", "--method", "coordinate-descent", "-o", str(out)]
    assert main(argv) == EXIT_OK
    payload = json.loads(out.read_text())
    assert payload["value"] <= math.pi / 2.0
    assert payload["bound"] == pytest.approx(math.pi / 2.0)


def test_measure_gamma2(tmp_path):
    out = tmp_path / "measure.json"
    argv = ["measure", "-i", "gamma2", "--max-len", "6", "--format", "json", "-o", str(out)]
    assert main(argv) == EXIT_OK
    payload = json.loads(out.read_text())
    assert payload["measure"]["N"] == 64
    assert sum(payload["measure"]["bins"]) == pytest.approx(1.0, abs=1e-12)
    letters = pd.DataFrame(payload["letters"])
    assert letters["letter"].tolist() == [1, 2, 3, 4]
    assert letters["total"].sum() == pytest.approx(1.0, abs=1e-12)
    assert (letters["displacement"] - LOG_3_2SQRT2).abs().max() < 1e-12


@pytest.mark.parametrize(
    "argv",
    [
        ["verify", "-i", "nope"],
        ["verify"],
        ["verify", "-i", "gamma2", "--trials", "0"],
        ["verify", "-i", "gamma2", "--z", "somewhere"],
        ["frobnicate"],
        [],
    ],
)
def test_bad_invocations_exit_with_error(tmp_path, argv):
    if argv and argv[0] == "verify":
        argv = argv + ["-o", str(tmp_path / "x.csv")]
    assert main(argv) == EXIT_ERROR


def test_uncertified_group_breaking_the_inequality_exits_2(tmp_path):
    g = Isometry.dilation(1.05)
    h = g.conjugate_by(Isometry.rotation(1.0))
    spec_path = tmp_path / "short.json"
    spec_path.write_text(GroupSpec((g, h)).to_json())
    out = tmp_path / "short.csv"
    assert main(["verify", "-i", str(spec_path), "--z", "0+1i", "-o", str(out)]) == EXIT_VIOLATION
    df = read_report_csv(str(out))
    assert df["defect"].iloc[0] < -1.0
    assert not df["satisfies_main"].iloc[0]


def test_violation_exit_code(tmp_path, monkeypatch):
    weak = pd.DataFrame({"k": [2], "B_k": [0.1], "log_2k_minus_1": [1.0], "ratio": [0.1]})
    monkeypatch.setattr(processors, "bounds_table", lambda ks: weak)
    out = tmp_path / "weak.csv"
    assert main(["bounds", "--k-range", "2", "-o", str(out)]) == EXIT_VIOLATION
    assert out.exists()


def test_existing_output_is_not_clobbered(tmp_path):
    out = tmp_path / "bounds.csv"
    out.write_text("keep me\n")
    assert main(["bounds", "--k-range", "2..4", "-o", str(out)]) == EXIT_OK
    assert out.read_text() == "keep me\n"
    assert len(list(tmp_path.glob("bounds_*.csv"))) == 1


def test_run_config_validation():
    with pytest.raises(ValueError):
        RunConfig(command="nope")
    with pytest.raises(ValueError):
        RunConfig(command="verify", trials=0)
    assert RunConfig(command="bounds").output_file == "bounds.csv"
    with pytest.raises(ValueError):
        RunConfig(command="verify", z="here").basepoint()
