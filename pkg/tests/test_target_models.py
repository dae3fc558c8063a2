import math

import numpy as np
import pytest
from scipy.stats import multivariate_normal

from errors import ConfigurationError, OutOfSupportError
from target_models import (
    BINORMAL_COV, MIXTURE_COVS, MIXTURE_MEANS, MIXTURE_WEIGHTS, EightSchoolsData, binormal_grad,
    binormal_potential, binormal_model, check_gradient, eightschools_grad, eightschools_potential,
    gamma51_grad, gamma51_model, gamma51_potential, get_model, mixture_grad, mixture_potential,
    support_points, MODEL_NAMES,
)

Y = np.array([2.8, 0.8, -0.3, 0.7, -0.1, 0.1, 1.8, 1.2])
KAPPA = np.array([0.8, 0.5, 0.8, 0.6, 0.5, 0.6, 0.5, 0.4])


def test_gamma51_potential_values():
    assert gamma51_potential(1.0) == pytest.approx(1.0)
    assert gamma51_potential(4.0) == pytest.approx(4.0 - 4.0 * math.log(4.0))
    assert gamma51_potential(4.0) == pytest.approx(-1.545177, abs=1e-6)


@pytest.mark.parametrize("q", [0.0, -1.0])
def test_gamma51_outside_support(q):
    with pytest.raises(OutOfSupportError):
        gamma51_potential(q)
    with pytest.raises(OutOfSupportError):
        gamma51_grad(q)


@pytest.mark.parametrize("q,expected", [(4.0, 0.0), (1.0, -3.0), (2.0, -1.0)])
def test_gamma51_gradient(q, expected):
    assert gamma51_grad(q) == pytest.approx(expected)


def test_binormal_values():
    assert binormal_potential([0.0, 0.0]) == 0.0
    assert binormal_potential([1.0, 1.0]) == pytest.approx(6.666667, abs=1e-6)
    assert binormal_potential([1.0, -1.0]) == pytest.approx(0.540541, abs=1e-6)
    np.testing.assert_allclose(binormal_grad([0.0, 0.0]), [0.0, 0.0])
    np.testing.assert_allclose(binormal_grad([1.0, 1.0]), [6.666667, 6.666667], atol=1e-6)


def test_binormal_potential_matches_quadratic_form():
    q = np.array([0.3, -1.2])
    expected = 0.5 * q @ np.linalg.solve(BINORMAL_COV, q)
    assert binormal_potential(q) == pytest.approx(expected, rel=1e-12)


def test_binormal_potential_is_even():
    rng = np.random.default_rng(3)
    for q in rng.normal(scale=3.0, size=(50, 2)):
        assert binormal_potential(q) == binormal_potential(-q)


def test_mixture_potential_matches_direct_density():
    rng = np.random.default_rng(4)
    for q in rng.uniform(-8.0, 9.0, size=(200, 2)):
        density = sum(
            w * multivariate_normal.pdf(q, mean=mu, cov=cov)
            for w, mu, cov in zip(MIXTURE_WEIGHTS, MIXTURE_MEANS, MIXTURE_COVS)
        )
        assert abs(mixture_potential(q) + math.log(density)) < 1e-12


def test_mixture_potential_at_component_means():
    # the other component's contribution is far below double precision
    at_mu1 = -math.log(0.4 / (2.0 * math.pi * math.sqrt(0.75)))
    at_mu2 = -math.log(0.6 / (2.0 * math.pi * math.sqrt(0.91)))
    assert mixture_potential(MIXTURE_MEANS[0]) == pytest.approx(at_mu1, abs=1e-9)
    assert mixture_potential(MIXTURE_MEANS[1]) == pytest.approx(at_mu2, abs=1e-9)
    assert mixture_potential(MIXTURE_MEANS[1]) == pytest.approx(2.301547, abs=1e-6)


def test_mixture_gradient_vanishes_at_means():
    assert np.all(np.abs(mixture_grad(MIXTURE_MEANS[0])) < 1e-40)
    # responsibility of the first component at mu2 is about exp(-54)
    assert np.all(np.abs(mixture_grad(MIXTURE_MEANS[1])) < 1e-20)


def test_mixture_gradient_finite_far_from_both_modes():
    g = mixture_grad([60.0, -60.0])
    assert np.all(np.isfinite(g))
    assert math.isfinite(mixture_potential([60.0, -60.0]))


def test_eightschools_potential_at_zero():
    expected = float(np.sum(Y ** 2 / (2.0 * KAPPA ** 2)))
    assert eightschools_potential(np.zeros(10)) == pytest.approx(expected, rel=1e-12)
    assert eightschools_potential(np.zeros(10)) == pytest.approx(19.16975694, abs=1e-7)


def test_eightschools_potential_mu_only():
    x = np.zeros(10)
    x[8] = 1.0
    expected = 0.5 + float(np.sum((Y - 1.0) ** 2 / (2.0 * KAPPA ** 2)))
    assert eightschools_potential(x) == pytest.approx(expected, rel=1e-12)


def test_eightschools_gradient_at_zero():
    g = eightschools_grad(np.zeros(10))
    assert g[8] == pytest.approx(-23.628472, abs=1e-6)
    np.testing.assert_array_equal(g[:8], 0.0)
    assert g[9] == 0.0


def test_eightschools_sign_symmetry():
    rng = np.random.default_rng(3)
    x = rng.normal(size=10)
    flipped = x.copy()
    flipped[:8] *= -1.0
    flipped[9] *= -1.0
    assert eightschools_potential(flipped) == pytest.approx(eightschools_potential(x), rel=1e-12)


def test_eightschools_data_validation():
    with pytest.raises(ConfigurationError):
        EightSchoolsData(y=np.zeros(7))
    with pytest.raises(ConfigurationError):
        EightSchoolsData(kappa=np.zeros(8))


def test_check_gradient_cases():
    assert check_gradient(binormal_model(), [1.0, 1.0], 1e-5) < 1e-6
    assert check_gradient(gamma51_model(), [4.0], 1e-5) < 1e-6


def test_check_gradient_names_coordinate_leaving_support():
    with pytest.raises(OutOfSupportError) as info:
        check_gradient(gamma51_model(), [1e-6], 1e-5)
    assert info.value.coordinate == 0


@pytest.mark.parametrize("name", ["gamma51", "binormal", "mixture", "eightschools"])
def test_gradients_over_support_points(name):
    model = get_model(name)
    worst = max(check_gradient(model, q) for q in support_points(name, 100))
    assert worst < 1e-6


def test_support_points_are_deterministic():
    first = list(support_points("mixture", 5, seed=7))
    second = list(support_points("mixture", 5, seed=7))
    np.testing.assert_array_equal(np.array(first), np.array(second))


def test_log_density_outside_support_is_minus_inf():
    assert gamma51_model().log_density([-1.0]) == -math.inf
    assert gamma51_model().log_density([1.0]) == pytest.approx(-1.0)


def test_unknown_model_names_field():
    with pytest.raises(ConfigurationError) as info:
        get_model("gama")
    assert info.value.field == "model"


def test_registry_lists_builtin_models():
    assert set(MODEL_NAMES) == {"gamma51", "binormal", "mixture", "eightschools", "gaussian"}
    for name in MODEL_NAMES:
        assert get_model(name).name == name
