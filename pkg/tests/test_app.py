import csv
import json
import math

import numpy as np
import pytest

from betaperturb.app import EXIT_DATA_ERROR, EXIT_OK, EXIT_USAGE, EXIT_VERIFICATION_FAILED, TrialProgress, main
from betaperturb.common.ensemble_kinds import EnsembleKind
from betaperturb.common.numerics import arg_half_period
from betaperturb.common.records import read_csv, read_json
from betaperturb.common.settings import Settings
from betaperturb.ensemble_service.models import EnsembleSpec
from betaperturb.ensemble_service.scale_laws import ExponentialLaw
from betaperturb.events import EventEmitter
from betaperturb.verify_service.service import VerificationService

FIGURE = ["--ensemble", "gauss", "--beta", "2", "--n", "30", "--l", "1", "--seed", "7"]


@pytest.fixture(autouse=True)
def clean_environment(monkeypatch):
    for name in ("BETAPERTURB_FAULT", "BETAPERTURB_JOBS", "BETAPERTURB_LOG_LEVEL", "BETAPERTURB_ROOT_TOL", "BETAPERTURB_MAX_ITER"):
        monkeypatch.delenv(name, raising=False)


def _rows(path):
    with open(path, newline="") as stream:
        return list(csv.reader(stream))


def test_sample_single_realization(tmp_path):
    output = tmp_path / "fig.csv"
    assert main(["sample", *FIGURE, "--output", str(output)]) == EXIT_OK
    rows = _rows(output)
    assert rows[0] == ["trial", "l", "k", "re", "im"]
    assert len(rows) == 31
    with open(output, newline="") as stream:
        (record,) = read_csv(stream)
    assert record.l == 1.0
    assert record.zero_count == 0
    assert np.all(record.z.real * record.z.imag > 0)
    assert float(np.sum(arg_half_period(record.z))) == pytest.approx(math.pi / 4, abs=1e-9)


def test_sample_output_is_byte_deterministic(tmp_path):
    first, second, parallel = tmp_path / "a.csv", tmp_path / "b.csv", tmp_path / "c.csv"
    args = ["sample", "--n", "6", "--law", "exp(1)", "--trials", "4", "--seed", "3"]
    assert main([*args, "--output", str(first)]) == EXIT_OK
    assert main([*args, "--output", str(second)]) == EXIT_OK
    assert main([*args, "--jobs", "2", "--output", str(parallel)]) == EXIT_OK
    assert first.read_bytes() == second.read_bytes() == parallel.read_bytes()


def test_json_and_csv_carry_the_same_values(tmp_path):
    csv_path, json_path = tmp_path / "s.csv", tmp_path / "s.json"
    args = ["sample", "--n", "5", "--law", "exp(2)", "--trials", "3", "--seed", "11"]
    assert main([*args, "--output", str(csv_path)]) == EXIT_OK
    assert main([*args, "--format", "json", "--output", str(json_path)]) == EXIT_OK
    with open(csv_path, newline="") as stream:
        from_csv = read_csv(stream)
    with open(json_path) as stream:
        meta, from_json = read_json(stream)
    assert meta.ensemble == "gauss"
    assert meta.n == 5
    assert meta.law == "exp(2.0)"
    assert len(from_csv) == len(from_json) == 3
    for a, b in zip(from_csv, from_json):
        assert a.l == b.l
        assert np.array_equal(a.z, b.z)


def test_sample_chiral_writes_exact_zero_rows(tmp_path):
    output = tmp_path / "chiral.csv"
    assert main(["sample", "--ensemble", "chiral", "--m", "5", "--n", "3", "--l", "1", "--output", str(output)]) == EXIT_OK
    rows = _rows(output)[1:]
    assert len(rows) == 8
    assert [row[3:] for row in rows[-2:]] == [["0.0", "0.0"], ["0.0", "0.0"]]


def test_sample_stdout(capsys):
    assert main(["sample", "--n", "3", "--l", "0.5"]) == EXIT_OK
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "trial,l,k,re,im"
    assert len(lines) == 4


def test_density_of_sampled_configurations(tmp_path):
    samples, densities = tmp_path / "s.csv", tmp_path / "d.csv"
    args = ["--ensemble", "laguerre", "--m", "4", "--n", "3", "--law", "exp(1)", "--trials", "3", "--seed", "5"]
    assert main(["sample", *args, "--output", str(samples)]) == EXIT_OK
    assert main(["density", *args, "--input", str(samples), "--output", str(densities)]) == EXIT_OK
    rows = _rows(densities)
    assert rows[0] == ["trial", "l", "k", "re", "im", "log_density", "normalized"]
    assert len(rows) == 10
    for row in rows[1:]:
        assert math.isfinite(float(row[5]))
        assert row[6] == "true"


def test_density_of_json_input_uses_its_metadata(tmp_path):
    samples, densities = tmp_path / "s.json", tmp_path / "d.csv"
    assert main(["sample", "--n", "4", "--l", "2", "--trials", "2", "--format", "json", "--output", str(samples)]) == EXIT_OK
    assert main(["density", "--input", str(samples), "--output", str(densities)]) == EXIT_OK
    assert all(row[6] == "false" for row in _rows(densities)[1:])


def test_density_marks_rejected_rows(tmp_path):
    samples, densities = tmp_path / "bad.csv", tmp_path / "d.csv"
    samples.write_text("trial,l,k,re,im\n0,1.0,0,0.5,0.5\n1,1.0,0,-1.0,1.0\n")
    assert main(["density", "--n", "1", "--l", "1", "--input", str(samples), "--output", str(densities)]) == EXIT_DATA_ERROR
    rows = _rows(densities)
    assert rows[1][5] != "error"
    assert rows[2][5] == "error"


def test_density_rejects_malformed_csv(tmp_path):
    samples = tmp_path / "broken.csv"
    samples.write_text("trial,l,k,re,im\n0,1.0,0,abc,1.0\n")
    assert main(["density", "--input", str(samples)]) == EXIT_DATA_ERROR


def test_density_rejects_chiral(tmp_path):
    samples = tmp_path / "chiral.csv"
    args = ["--ensemble", "chiral", "--m", "3", "--n", "2", "--l", "1"]
    assert main(["sample", *args, "--output", str(samples)]) == EXIT_OK
    assert main(["density", *args, "--input", str(samples)]) == EXIT_USAGE


def test_verify_passes_and_writes_report(tmp_path):
    report = tmp_path / "report.json"
    code = main(["verify", "--suite", "charpoly", "--n", "4", "--trials", "3", "--output", str(report)])
    assert code == EXIT_OK
    document = json.loads(report.read_text())
    assert document["suite"] == "charpoly"
    assert all(check["pass"] for check in document["checks"])


def test_verify_fault_hook_fails(tmp_path, monkeypatch):
    monkeypatch.setenv("BETAPERTURB_FAULT", "1")
    report = tmp_path / "report.json"
    code = main(["verify", "--suite", "configuration", "--n", "4", "--law", "exp(1)", "--trials", "3", "--output", str(report)])
    assert code == EXIT_VERIFICATION_FAILED
    failing = [check["name"] for check in json.loads(report.read_text())["checks"] if not check["pass"]]
    assert "configuration.angle_sum" in failing


def test_verify_progress_follows_service_events():
    progress = TrialProgress()
    events = progress.attach(EventEmitter())
    spec = EnsembleSpec(kind=EnsembleKind.GAUSSIAN, beta=2.0, n=3)
    VerificationService(settings=Settings(), events=events).run_suite("all", spec, ExponentialLaw(), 3, 1)
    assert progress.trials == 3
    assert dict(progress.done) == {
        "charpoly": 3,
        "configuration": 3,
        "jacobian": 3,
        "pushforward": 3,
        "roundtrip": 3,
        "statistics": 3,
    }


def test_verify_unknown_suite():
    assert main(["verify", "--suite", "bogus"]) == EXIT_USAGE


def test_plot_writes_svg(tmp_path):
    samples, figure = tmp_path / "s.json", tmp_path / "fig.svg"
    assert main(["sample", *FIGURE, "--format", "json", "--output", str(samples)]) == EXIT_OK
    assert main(["plot", "--input", str(samples), "--output", str(figure)]) == EXIT_OK
    text = figure.read_text()
    assert "<svg" in text
    assert "gauss, beta=2, n=30, l=1" in text


def test_plot_of_empty_input(tmp_path):
    samples, figure = tmp_path / "empty.csv", tmp_path / "fig.svg"
    samples.write_text("trial,l,k,re,im\n")
    assert main(["plot", "--input", str(samples), "--output", str(figure)]) == EXIT_OK
    assert "<svg" in figure.read_text()


def test_config_file_provides_defaults(tmp_path):
    config, output = tmp_path / "run.cfg", tmp_path / "s.json"
    config.write_text("n=5\nbeta=1\nlaw=exp(1)\n")
    assert main(["sample", "--config", str(config), "--format", "json", "--output", str(output)]) == EXIT_OK
    with open(output) as stream:
        meta, (record,) = read_json(stream)
    assert (meta.n, meta.beta, meta.law) == (5, 1.0, "exp(1.0)")
    assert record.z.size == 5
    assert main(["sample", "--config", str(config), "--n", "3", "--l", "2", "--format", "json", "--output", str(output)]) == EXIT_OK
    with open(output) as stream:
        meta, _ = read_json(stream)
    assert (meta.n, meta.law) == (3, "point(2.0)")


def test_config_file_rejects_unknown_keys(tmp_path):
    config = tmp_path / "run.cfg"
    config.write_text("colour=blue\n")
    assert main(["sample", "--config", str(config)]) == EXIT_DATA_ERROR


@pytest.mark.parametrize("argv, expected", [
    ([], EXIT_USAGE),
    (["sample", "--bogus"], EXIT_USAGE),
    (["sample", "--l", "1", "--law", "exp(1)"], EXIT_USAGE),
    (["sample", "--ensemble", "laguerre", "--n", "3"], EXIT_DATA_ERROR),
    (["sample", "--law", "cauchy(1)"], EXIT_DATA_ERROR),
    (["sample", "--n", "0"], EXIT_DATA_ERROR),
    (["density", "--input", "/nonexistent/samples.csv"], EXIT_DATA_ERROR),
])
def test_exit_codes(argv, expected):
    assert main(argv) == expected
