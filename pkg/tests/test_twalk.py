import math

import numpy as np
import pytest

from errors import ConfigurationError, OutOfSupportError
from target_models import binormal_model, gamma51_model, gaussian_model
from twalk import DEFAULT_MOVE_PROBS, KERNELS, TwalkConfig, TwalkKernels, twalk_sample


def _kernels(seed=0, **kwargs):
    cfg = TwalkConfig([0.0, 0.0], [1.0, 1.0], 10, **kwargs)
    return TwalkKernels(cfg, np.random.default_rng(seed))


def test_config_defaults():
    cfg = TwalkConfig([1.0], [2.0], 10)
    assert cfg.move_probs == DEFAULT_MOVE_PROBS
    assert (cfg.a_w, cfg.a_t, cfg.n1) == (1.5, 6.0, 4.0)


def test_coincident_points_rejected():
    with pytest.raises(ConfigurationError) as info:
        TwalkConfig([1.0, 2.0], [1.0, 2.0], 10)
    assert info.value.field == "init2"


@pytest.mark.parametrize("kwargs,field", [
    ({"move_probs": (0.5, 0.5, 0.5, 0.0)}, "move_probs"),
    ({"a_w": 0.0}, "a_w"),
    ({"a_t": 1.0}, "a_t"),
    ({"n1": 0.0}, "n1"),
    ({"record_every": 0}, "record_every"),
])
def test_config_validation(kwargs, field):
    with pytest.raises(ConfigurationError) as info:
        TwalkConfig([0.0], [1.0], 10, **kwargs)
    assert info.value.field == field


def test_start_outside_support():
    with pytest.raises(OutOfSupportError):
        twalk_sample(gamma51_model(), TwalkConfig([-1.0], [1.0], 10))


def test_walk_moves_only_masked_coordinates():
    k = _kernels()
    x, pivot = np.array([1.0, 2.0]), np.array([3.0, 5.0])
    phi = np.array([True, False])
    y, log_h = k.walk(x, pivot, phi)
    assert y[1] == x[1]
    assert log_h == 0.0
    # z lies in [-a_w/(1+a_w), a_w]
    z = (y[0] - x[0]) / (x[0] - pivot[0])
    assert -1.5 / 2.5 - 1e-12 <= z <= 1.5 + 1e-12


def test_traverse_hastings_factor():
    k = _kernels(seed=3)
    x, pivot = np.array([1.0, 2.0, 3.0]), np.array([0.0, 0.0, 0.0])
    phi = np.array([True, True, True])
    y, log_h = k.traverse(x, pivot, phi)
    beta = (pivot[0] - y[0]) / (x[0] - pivot[0])
    np.testing.assert_allclose(y, pivot + beta * (pivot - x))
    assert log_h == pytest.approx((3 - 2) * math.log(beta))


def test_beta_draws_are_positive():
    k = _kernels(seed=5)
    draws = np.array([k._beta() for _ in range(2000)])
    assert np.all(draws > 0)
    # P(beta < 1) = (a - 1) / (2a)
    assert np.mean(draws < 1.0) == pytest.approx(5.0 / 12.0, abs=0.05)


@pytest.mark.parametrize("kernel", ["blow", "hop"])
def test_gaussian_kernels_keep_unmasked_coordinates(kernel):
    k = _kernels(seed=7)
    x, pivot = np.array([1.0, 2.0, 3.0]), np.array([0.5, -1.0, 4.0])
    phi = np.array([True, False, True])
    y, log_h = getattr(k, kernel)(x, pivot, phi)
    assert y[1] == x[1]
    assert math.isfinite(log_h)


def test_blow_hastings_factor_matches_densities():
    k = _kernels(seed=1)
    x, pivot = np.array([1.0, 2.0]), np.array([0.0, 0.5])
    phi = np.array([True, True])
    y, log_h = k.blow(x, pivot, phi)
    sig_fwd = np.max(np.abs(pivot - x))
    sig_back = np.max(np.abs(pivot - y))

    def log_q(h, sigma):
        return float(np.sum(-0.5 * np.log(2 * np.pi) - np.log(sigma) - 0.5 * ((h - pivot) / sigma) ** 2))

    assert log_h == pytest.approx(log_q(x, sig_back) - log_q(y, sig_fwd), rel=1e-10)


def test_sample_shapes_and_metadata():
    cfg = TwalkConfig([-1.0, 1.0], [1.0, -1.0], 300, seed=2)
    trace = twalk_sample(binormal_model(), cfg)
    assert trace.states.shape == (300, 2)
    assert trace.sampler_name == "twalk"
    assert set(trace.meta["kernel_acceptance"]) == set(KERNELS)
    assert 0 < trace.accepts <= trace.proposals == 300


def test_sample_is_deterministic():
    cfg = TwalkConfig([500.0], [501.0], 500, seed=4)
    a = twalk_sample(gamma51_model(), cfg)
    b = twalk_sample(gamma51_model(), cfg)
    np.testing.assert_array_equal(a.states, b.states)


def test_states_stay_in_support():
    trace = twalk_sample(gamma51_model(), TwalkConfig([500.0], [501.0], 2000, seed=1))
    assert np.all(trace.states > 0)


def test_record_every_counts_all_proposals():
    cfg = TwalkConfig([0.0, 0.0], [1.0, 1.0], 100, seed=3, record_every=4)
    trace = twalk_sample(gaussian_model(2), cfg)
    assert trace.n == 100
    assert trace.proposals == 400
    np.testing.assert_array_equal(trace.index, np.arange(3, 400, 4))


def test_rejected_states_repeat():
    trace = twalk_sample(binormal_model(), TwalkConfig([-7.0, -7.0], [-6.5, -6.5], 500, seed=6))
    rejected = np.flatnonzero(~trace.accepted)
    rejected = rejected[rejected > 0]
    np.testing.assert_array_equal(trace.states[rejected], trace.states[rejected - 1])


def test_move_probs_follow_kernel_order():
    assert KERNELS == ("walk", "traverse", "hop", "blow")
    cfg = TwalkConfig([0.0, 0.0], [1.0, 1.0], 200, seed=5, move_probs=(0.0, 0.0, 1.0, 0.0))
    trace = twalk_sample(gaussian_model(2), cfg)
    assert trace.meta["kernel_uses"] == {"walk": 0, "traverse": 0, "hop": 200, "blow": 0}
