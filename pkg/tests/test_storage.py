import numpy as np
import pytest

from errors import ConfigurationError
from samplers import RwmhConfig, rwmh_sample
from storage import RunLog, new_record, read_spec_file, read_trace, write_trace
from target_models import binormal_model


@pytest.fixture
def trace():
    return rwmh_sample(binormal_model(), RwmhConfig(0.7, 200, seed=3, record_every=2), [0.1, -0.2])


def test_trace_csv_header_and_line_endings(trace, tmp_path):
    path = write_trace(trace, tmp_path / "t.csv")
    raw = path.read_bytes()
    assert raw.splitlines()[0] == b"index,q1,q2,log_density,accepted"
    assert b"\r\n" not in raw
    assert path.with_suffix(".meta.json").exists()


def test_trace_round_trip_is_exact(trace, tmp_path):
    back = read_trace(write_trace(trace, tmp_path / "t.csv"))
    np.testing.assert_array_equal(back.states, trace.states)
    np.testing.assert_array_equal(back.log_density, trace.log_density)
    np.testing.assert_array_equal(back.accepted, trace.accepted)
    np.testing.assert_array_equal(back.index, trace.index)
    assert (back.proposals, back.accepts) == (trace.proposals, trace.accepts)
    assert back.model_name == "binormal" and back.sampler_name == "rwmh"
    assert back.config["record_every"] == 2


def test_same_trace_same_bytes(trace, tmp_path):
    a = write_trace(trace, tmp_path / "a.csv").read_bytes()
    b = write_trace(trace, tmp_path / "b.csv").read_bytes()
    assert a == b


def test_read_trace_errors(tmp_path):
    with pytest.raises(ConfigurationError):
        read_trace(tmp_path / "missing.csv")
    bad = tmp_path / "bad.csv"
    bad.write_text("a,b\n1,2\n")
    with pytest.raises(ConfigurationError):
        read_trace(bad)


def test_read_spec_file(tmp_path):
    path = tmp_path / "gamma.txt"
    path.write_text(
        "# Gamma(5,1) with HMC\n"
        "model = gamma51\n"
        "Sampler = hmc   # trailing comment\n"
        "epsilon = 0.09\n"
        "record-every = 1\n"
        "\n"
        "init = 500\n"
    )
    fields = read_spec_file(path)
    assert fields == {
        "model": "gamma51", "sampler": "hmc", "epsilon": "0.09", "record_every": "1", "init": "500",
    }


def test_read_spec_file_rejects_garbage(tmp_path):
    path = tmp_path / "bad.txt"
    path.write_text("model gamma51\n")
    with pytest.raises(ConfigurationError):
        read_spec_file(path)


def test_run_log_appends(tmp_path):
    log = RunLog(tmp_path)
    log.append(new_record("gamma51", "hmc", 1, tmp_path / "a.csv", metrics={"iat": np.float64(1.2)}))
    log.append(new_record("binormal", "rwmh", 2, tmp_path / "b.csv"))
    records = log.records()
    assert [r.model for r in records] == ["gamma51", "binormal"]
    assert records[0].metrics["iat"] == pytest.approx(1.2)
    assert records[0].run_id != records[1].run_id
