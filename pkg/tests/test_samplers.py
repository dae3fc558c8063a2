import numpy as np
import pytest

from dynamics import PhaseState, exact_gaussian_flow
from errors import ConfigurationError, OutOfSupportError
from samplers import HmcConfig, RwmhConfig, Trace, hmc_sample, rwmh_sample, thin
from target_models import binormal_model, gamma51_model, gaussian_model


def _exact_flow(q, p, eps, steps):
    end = exact_gaussian_flow(PhaseState(q, p), eps * steps)
    return end.q, end.p


def _toy_trace(n=10):
    states = np.arange(n, dtype=float)[:, None]
    return Trace(states, -states[:, 0], np.ones(n, dtype=bool), "toy", "none")


@pytest.mark.parametrize("kwargs,field", [
    ({"epsilon": 0.0, "steps": 1, "n": 10}, "epsilon"),
    ({"epsilon": 0.1, "steps": 0, "n": 10}, "steps"),
    ({"epsilon": 0.1, "steps": 1, "n": 0}, "n"),
    ({"epsilon": 0.1, "steps": 1, "n": 10, "epsilon_jitter": 1.0}, "jitter"),
])
def test_hmc_config_validation(kwargs, field):
    with pytest.raises(ConfigurationError) as info:
        HmcConfig(**kwargs)
    assert info.value.field == field


def test_rwmh_config_validation():
    with pytest.raises(ConfigurationError):
        RwmhConfig(sigma=-1.0, n=10)
    with pytest.raises(ConfigurationError):
        RwmhConfig(sigma=1.0, n=10, record_every=0)


def test_mass_length_must_match_model():
    cfg = HmcConfig(0.1, 5, 10, mass=np.ones(3))
    with pytest.raises(ConfigurationError):
        hmc_sample(binormal_model(), cfg, [0.0, 0.0])


def test_hmc_rejects_start_outside_support():
    with pytest.raises(OutOfSupportError):
        hmc_sample(gamma51_model(), HmcConfig(0.1, 5, 10), [-1.0])
    with pytest.raises(OutOfSupportError):
        rwmh_sample(gamma51_model(), RwmhConfig(1.0, 10), [0.0])


def test_exact_flow_accepts_every_proposal():
    trace = hmc_sample(gaussian_model(2), HmcConfig(0.3, 5, 10000, seed=4), [0.5, -0.5], flow=_exact_flow)
    assert trace.accepted.all()
    assert trace.accepts == 10000


def test_hmc_is_deterministic():
    cfg = HmcConfig(0.15, 10, 300, seed=9, epsilon_jitter=0.1)
    a = hmc_sample(binormal_model(), cfg, [-1.0, 1.0])
    b = hmc_sample(binormal_model(), cfg, [-1.0, 1.0])
    np.testing.assert_array_equal(a.states, b.states)
    np.testing.assert_array_equal(a.accepted, b.accepted)


def test_hmc_with_mass_keeps_kinetic_energy_even():
    # hmc_sample asserts K(-p) == K(p) on every proposal
    cfg = HmcConfig(0.1, 8, 400, seed=7, mass=np.array([0.3, 4.0]), epsilon_jitter=0.2)
    trace = hmc_sample(binormal_model(), cfg, [0.5, -0.5])
    assert trace.n == 400
    assert 0 < trace.accepts <= 400


def test_rejected_iterations_repeat_the_state():
    trace = hmc_sample(gamma51_model(), HmcConfig(2.0, 6, 500, seed=2), [5.0])
    rejected = np.flatnonzero(~trace.accepted)
    rejected = rejected[rejected > 0]
    assert rejected.size > 0
    np.testing.assert_array_equal(trace.states[rejected], trace.states[rejected - 1])


def test_divergence_is_a_rejection_not_an_abort():
    trace = hmc_sample(gamma51_model(), HmcConfig(5.0, 6, 500, seed=1), [500.0])
    assert trace.n == 500
    assert trace.accepts / trace.proposals <= 0.05
    assert np.all(trace.states > 0)


def test_hmc_records_log_density():
    model = binormal_model()
    trace = hmc_sample(model, HmcConfig(0.15, 10, 50, seed=3), [0.5, 0.5])
    expected = [model.log_density(q) for q in trace.states]
    np.testing.assert_allclose(trace.log_density, expected, rtol=1e-12)


def test_rwmh_tiny_steps_almost_always_accept():
    trace = rwmh_sample(binormal_model(), RwmhConfig(1e-4, 5000, seed=6), [0.0, 0.0])
    assert trace.accepts / trace.proposals > 0.999


def test_rwmh_record_every_subsamples():
    cfg = RwmhConfig(0.5, 200, seed=8, record_every=5)
    trace = rwmh_sample(binormal_model(), cfg, [0.0, 0.0])
    assert trace.n == 200
    assert trace.proposals == 1000
    np.testing.assert_array_equal(trace.index, np.arange(4, 1000, 5))
    full = rwmh_sample(binormal_model(), RwmhConfig(0.5, 1000, seed=8), [0.0, 0.0])
    np.testing.assert_array_equal(trace.states, full.states[4::5])


def test_rwmh_is_deterministic():
    cfg = RwmhConfig(5.0, 500, seed=1)
    a = rwmh_sample(gamma51_model(), cfg, [500.0])
    b = rwmh_sample(gamma51_model(), cfg, [500.0])
    np.testing.assert_array_equal(a.states, b.states)


def test_thin_identity_and_indices():
    trace = _toy_trace(10)
    same = thin(trace, 0, 1)
    np.testing.assert_array_equal(same.states, trace.states)
    kept = thin(trace, 4, 3)
    assert kept.n == 2
    np.testing.assert_array_equal(kept.index, [4, 7])
    assert kept.meta["burnin"] == 4 and kept.meta["lag"] == 3


def test_thin_composes():
    trace = _toy_trace(50)
    twice = thin(thin(trace, 0, 2), 0, 3)
    once = thin(trace, 0, 6)
    np.testing.assert_array_equal(twice.states, once.states)
    assert twice.meta["lag"] == 6
    nested = thin(thin(trace, 5, 2), 3, 4)
    assert nested.meta["burnin"] == 5 + 3 * 2
    assert nested.meta["lag"] == 8
    assert nested.index[0] == nested.meta["burnin"]


def test_thin_rejects_bad_arguments():
    trace = _toy_trace(10)
    with pytest.raises(ConfigurationError):
        thin(trace, 10, 1)
    with pytest.raises(ConfigurationError):
        thin(trace, 0, 0)


def test_trace_columns_must_agree():
    with pytest.raises(ValueError):
        Trace(np.zeros((3, 1)), np.zeros(2), np.ones(3, dtype=bool), "toy", "none")
