import io

import numpy as np
import pytest

from betaperturb.common.errors import ConfigurationError, DataError
from betaperturb.common.records import SampleMeta, TrialRecord, read_csv, read_json, write_csv, write_json
from betaperturb.common.settings import Settings, read_config_file
from betaperturb.plot_service.service import build_caption, render_scatter

META = SampleMeta(ensemble="laguerre", beta=2.0, n=3, m=2, seed=4, law="point(1.0)")


def _records():
    return [
        TrialRecord(trial=0, l=1.0, z=[2.0 + 0.5j, 0.1 + 0.3j], zero_count=1),
        TrialRecord(trial=1, l=1.0, z=[0.7 + 0.2j, 1.5 + 0.01j], zero_count=1),
    ]


def test_csv_layout():
    stream = io.StringIO()
    write_csv(_records(), stream)
    lines = stream.getvalue().split("\n")
    assert lines[0] == "trial,l,k,re,im"
    assert lines[1] == "0,1.0,0,0.1,0.3"
    assert lines[3] == "0,1.0,2,0.0,0.0"
    assert "\r" not in stream.getvalue()
    records = read_csv(io.StringIO(stream.getvalue()))
    assert [record.zero_count for record in records] == [1, 1]
    assert np.array_equal(records[1].z, _records()[1].z)


@pytest.mark.parametrize("text, line", [
    ("trial,l,re,im\n", 1),
    ("trial,l,k,re,im\n0,1.0,0,1.0,1.0\n0,1.0,2,2.0,1.0\n", 3),
    ("trial,l,k,re,im\n0,1.0,0,1.0,1.0\n0,2.0,1,2.0,1.0\n", 3),
    ("trial,l,k,re,im\n0,1.0,0,1.0,1.0\n1,1.0,0,2.0,1.0\n0,1.0,1,3.0,1.0\n", 4),
    ("trial,l,k,re,im\n0,1.0,0,nan,1.0\n", 2),
    ("trial,l,k,re,im\n0,1.0,0,1.0\n", 2),
])
def test_csv_errors_name_the_line(text, line):
    with pytest.raises(DataError) as error:
        read_csv(io.StringIO(text))
    assert error.value.line_number == line
    assert str(error.value).startswith(f"line {line}:")


def test_json_layout():
    stream = io.StringIO()
    write_json(META, _records(), stream)
    document = stream.getvalue()
    assert document.endswith("}\n")
    meta, records = read_json(io.StringIO(document))
    assert meta == META
    assert [record.trial for record in records] == [0, 1]
    assert records[0].zero_count == 1


def test_json_errors():
    with pytest.raises(DataError) as error:
        read_json(io.StringIO('{\n  "meta": {,\n}'))
    assert error.value.line_number == 2
    with pytest.raises(DataError):
        read_json(io.StringIO('{"meta": {"ensemble": "gauss"}, "trials": []}'))


def test_settings_from_environment():
    settings = Settings.from_env({"BETAPERTURB_FAULT": "yes", "BETAPERTURB_JOBS": "3", "BETAPERTURB_ROOT_TOL": "1e-10"})
    assert settings.fault
    assert settings.jobs == 3
    assert settings.root_tolerance == 1e-10
    assert not Settings.from_env({"BETAPERTURB_FAULT": "0"}).fault
    with pytest.raises(ConfigurationError):
        Settings.from_env({"BETAPERTURB_JOBS": "zero"})


def test_read_config_file(tmp_path):
    path = tmp_path / "run.cfg"
    path.write_text("--n=4\nLAW=exp(2)\n# comment\nroot-tol=1e-9\n")
    assert read_config_file(str(path)) == {"n": "4", "law": "exp(2)", "root_tol": "1e-9"}
    with pytest.raises(ConfigurationError):
        read_config_file(str(tmp_path / "missing.cfg"))


def test_scatter_is_deterministic():
    caption = build_caption(META, _records())
    assert caption == "laguerre, beta=2, m=2, n=3, l=1, trials=2"
    first, second = io.StringIO(), io.StringIO()
    render_scatter(_records(), caption, first)
    render_scatter(_records(), caption, second)
    assert first.getvalue() == second.getvalue()
    assert caption in first.getvalue()
