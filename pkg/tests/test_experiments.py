"""Desk-scale reproductions of the comparative studies (``pytest -m slow``)."""

import numpy as np
import pytest

from diagnostics import acceptance_rate, coordinate_iats, mode_occupancy
from harness import compare, preset_specs, run
from samplers import thin
from target_models import BINORMAL_COV, MIXTURE_MEANS

pytestmark = pytest.mark.slow


def _runs(preset, **overrides):
    return {spec.sampler: run(spec, persist=False) for spec in preset_specs(preset, **overrides)}


@pytest.fixture(scope="module")
def gamma_runs():
    return _runs("gamma")


def test_gamma_hmc(gamma_runs):
    report = gamma_runs["hmc"].report
    assert report.acceptance_rate >= 0.99
    assert 1.0 <= report.iat <= 1.3
    assert report.summary.loc["q1", "mean"] == pytest.approx(5.0, abs=0.15)
    assert report.summary.loc["q1", "variance"] == pytest.approx(5.0, abs=0.75)


def test_gamma_rwmh_and_twalk(gamma_runs):
    assert gamma_runs["rwmh"].report.acceptance_rate == pytest.approx(0.44, abs=0.05)
    assert gamma_runs["twalk"].report.acceptance_rate == pytest.approx(0.60, abs=0.10)


def test_gamma_acceptance_ordering(gamma_runs):
    hmc, rwmh, twalk = (gamma_runs[k].report.acceptance_rate for k in ("hmc", "rwmh", "twalk"))
    assert hmc > rwmh > twalk / 2


def test_gamma_degenerate_tuning():
    result = _runs("gamma-degenerate", burnin=0, lag=1)["hmc"]
    assert acceptance_rate(result.trace) <= 0.01


def test_binormal():
    runs = _runs("binormal", burnin=1000, lag=1)
    assert runs["hmc"].report.acceptance_rate >= 0.97
    assert runs["rwmh"].report.acceptance_rate == pytest.approx(0.83, abs=0.05)
    assert runs["twalk"].report.acceptance_rate == pytest.approx(0.42, abs=0.10)
    post = thin(runs["hmc"].trace, 1000, 1).states
    np.testing.assert_allclose(np.cov(post, rowvar=False), BINORMAL_COV, atol=0.05)


def test_mixture_mode_trapping():
    runs = _runs("mixture", burnin=500, lag=1)
    for sampler in ("hmc", "rwmh"):
        occupancy = mode_occupancy(runs[sampler].trace, MIXTURE_MEANS, 3.0, burnin=500)
        assert occupancy[1] < 0.05
    twalk = mode_occupancy(runs["twalk"].trace, MIXTURE_MEANS, 3.0, burnin=500)
    assert twalk[1] == pytest.approx(0.6, abs=0.15)
    assert runs["hmc"].report.acceptance_rate >= 0.97
    assert runs["twalk"].report.extras["mode2_occupancy"] == pytest.approx(twalk[1])


def test_eightschools():
    specs = preset_specs("eightschools", burnin=1000, lag=1)
    table = compare(specs, persist=False).frame.set_index("sampler")
    assert table.loc["hmc", "acceptance_rate"] == pytest.approx(0.98, abs=0.02)
    assert table.loc["rwmh", "acceptance_rate"] == pytest.approx(0.247, abs=0.03)
    assert table["effective_per_second"].idxmax() == "hmc"

    tau = {}
    for spec in specs[:2]:
        trace = run(spec, persist=False).trace
        tau[spec.sampler] = coordinate_iats(trace.states[1000:])[9]
    assert tau["hmc"] < tau["rwmh"]
