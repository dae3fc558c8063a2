"""
Target distributions expressed as potential energies.

Every model is a ``TargetModel``: the potential U(q) = -log S(q) of an
(unnormalized) density S, its analytic gradient, and a support predicate.
Samplers only ever talk to this interface; models are addressed by name
("gamma51", "binormal", "mixture", "eightschools", "gaussian").
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Dict, Iterator, Sequence

import numpy as np
from scipy.special import softmax

from errors import ConfigurationError, OutOfSupportError

Vector = np.ndarray


def _always_in_support(q: Vector) -> bool:
    return bool(np.all(np.isfinite(q)))


@dataclass(frozen=True)
class TargetModel:
    name: str
    dim: int
    potential: Callable[[Vector], float]
    gradient: Callable[[Vector], Vector]
    in_support: Callable[[Vector], bool] = _always_in_support

    def __post_init__(self):
        if self.dim < 1:
            raise ConfigurationError("dim", f"model {self.name!r} needs a positive dimension")

    @property
    def bounded(self) -> bool:
        """False when every finite point is in the support."""
        return self.in_support is not _always_in_support

    def log_density(self, q: Vector) -> float:
        """-U(q), or -inf outside the support (never raises)."""
        q = np.asarray(q, dtype=float)
        if not self.in_support(q):
            return -math.inf
        return -float(self.potential(q))


# ---------------------------------------------------------------------------
# Gamma(5, 1): S(q) = q^4 exp(-q), q > 0
# ---------------------------------------------------------------------------

def _gamma51_in_support(q) -> bool:
    q = np.asarray(q, dtype=float)
    return bool(np.all(np.isfinite(q)) and np.all(q > 0))


def _require_positive(q):
    if not _gamma51_in_support(q):
        raise OutOfSupportError(f"gamma51 is supported on q > 0, got q={q}")


def gamma51_potential(q) -> float:
    _require_positive(q)
    return float(np.sum(-4.0 * np.log(q) + q))


def gamma51_grad(q):
    _require_positive(q)
    if np.ndim(q) == 0:
        return -4.0 / float(q) + 1.0
    return -4.0 / np.asarray(q, dtype=float) + 1.0


def gamma51_model() -> TargetModel:
    return TargetModel("gamma51", 1, gamma51_potential, gamma51_grad, _gamma51_in_support)


# ---------------------------------------------------------------------------
# Bivariate normal, zero mean, strong negative correlation
# ---------------------------------------------------------------------------

BINORMAL_COV = np.array([[1.0, -0.85], [-0.85, 1.0]])
_BINORMAL_PRECISION = np.linalg.inv(BINORMAL_COV)


def binormal_potential(q) -> float:
    q = np.asarray(q, dtype=float)
    return float(q @ _BINORMAL_PRECISION @ q) / 2.0


def binormal_grad(q) -> Vector:
    return _BINORMAL_PRECISION @ np.asarray(q, dtype=float)


def binormal_model() -> TargetModel:
    return TargetModel("binormal", 2, binormal_potential, binormal_grad)


# ---------------------------------------------------------------------------
# Two-component Gaussian mixture (normalized components)
# ---------------------------------------------------------------------------

MIXTURE_WEIGHTS = np.array([0.4, 0.6])
MIXTURE_MEANS = np.array([[-4.0, -4.0], [5.0, 5.0]])
MIXTURE_COVS = np.array([
    [[1.0, 0.5], [0.5, 1.0]],
    [[1.0, -0.3], [-0.3, 1.0]],
])
_MIXTURE_PRECISIONS = np.linalg.inv(MIXTURE_COVS)
# log w_k - log(2 pi) - log|Sigma_k| / 2
_MIXTURE_LOG_CONST = (
    np.log(MIXTURE_WEIGHTS)
    - 0.5 * MIXTURE_MEANS.shape[1] * math.log(2.0 * math.pi)
    - 0.5 * np.log(np.linalg.det(MIXTURE_COVS))
)


def _mixture_log_terms(q: Vector):
    diff = np.asarray(q, dtype=float) - MIXTURE_MEANS           # (k, d)
    scaled = np.einsum("kij,kj->ki", _MIXTURE_PRECISIONS, diff)  # Sigma_k^-1 (q - mu_k)
    quad = np.einsum("ki,ki->k", diff, scaled)
    return _MIXTURE_LOG_CONST - 0.5 * quad, scaled


def mixture_potential(q) -> float:
    log_terms, _ = _mixture_log_terms(q)
    return -float(np.logaddexp.reduce(log_terms))


def mixture_grad(q) -> Vector:
    # responsibilities in log space so that far-away points never underflow to 0/0
    log_terms, scaled = _mixture_log_terms(q)
    resp = softmax(log_terms)
    return resp @ scaled


def mixture_model() -> TargetModel:
    return TargetModel("mixture", 2, mixture_potential, mixture_grad)


# ---------------------------------------------------------------------------
# Eight schools, non-centred: x = (eta_1..eta_8, mu, tau)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class EightSchoolsData:
    """Per-school training effects y and their known deviations kappa."""

    y: np.ndarray = field(default_factory=lambda: np.array([2.8, 0.8, -0.3, 0.7, -0.1, 0.1, 1.8, 1.2]))
    kappa: np.ndarray = field(default_factory=lambda: np.array([0.8, 0.5, 0.8, 0.6, 0.5, 0.6, 0.5, 0.4]))

    def __post_init__(self):
        y = np.asarray(self.y, dtype=float)
        kappa = np.asarray(self.kappa, dtype=float)
        if y.shape != (8,) or kappa.shape != (8,):
            raise ConfigurationError("eightschools", "effects and deviations need 8 entries each")
        if np.any(kappa <= 0):
            raise ConfigurationError("eightschools", "deviations must be positive")
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "kappa", kappa)
        object.__setattr__(self, "_variance", kappa ** 2)

    @property
    def variance(self) -> np.ndarray:
        return self._variance


EIGHT_SCHOOLS = EightSchoolsData()


def _split_schools(x):
    x = np.asarray(x, dtype=float)
    if x.shape != (10,):
        raise ConfigurationError("x", f"eight schools expects 10 coordinates, got shape {x.shape}")
    return x[:8], x[8], x[9]


def eightschools_potential(x, data: EightSchoolsData = EIGHT_SCHOOLS) -> float:
    eta, mu, tau = _split_schools(x)
    resid = data.y - (mu + tau * eta)
    prior = 0.5 * (mu * mu + tau * tau + float(eta @ eta))
    return prior + float(np.sum(resid * resid / (2.0 * data.variance)))


def eightschools_grad(x, data: EightSchoolsData = EIGHT_SCHOOLS) -> Vector:
    eta, mu, tau = _split_schools(x)
    scaled = (data.y - (mu + tau * eta)) / data.variance
    grad = np.empty(10)
    grad[:8] = eta - scaled * tau
    grad[8] = mu - scaled.sum()
    grad[9] = tau - float(scaled @ eta)
    return grad


def eightschools_model(data: EightSchoolsData = EIGHT_SCHOOLS) -> TargetModel:
    return TargetModel(
        "eightschools",
        10,
        lambda x: eightschools_potential(x, data),
        lambda x: eightschools_grad(x, data),
    )


# ---------------------------------------------------------------------------
# Isotropic standard normal (the harmonic oscillator)
# ---------------------------------------------------------------------------

def gaussian_model(dim: int = 2) -> TargetModel:
    def potential(q):
        q = np.asarray(q, dtype=float)
        return 0.5 * float(q @ q)

    def gradient(q):
        return np.array(q, dtype=float)

    return TargetModel("gaussian", dim, potential, gradient)


# ---------------------------------------------------------------------------
# Registry and gradient checking
# ---------------------------------------------------------------------------

MODEL_FACTORIES: Dict[str, Callable[[], TargetModel]] = {
    "gamma51": gamma51_model,
    "binormal": binormal_model,
    "mixture": mixture_model,
    "eightschools": eightschools_model,
    "gaussian": gaussian_model,
}

MODEL_NAMES = tuple(MODEL_FACTORIES)


def get_model(name: str) -> TargetModel:
    factory = MODEL_FACTORIES.get(str(name).strip().lower())
    if factory is None:
        raise ConfigurationError("model", f"unknown model {name!r}; choose one of {', '.join(MODEL_NAMES)}")
    return factory()


def check_gradient(model: TargetModel, q, h: float = 1e-5) -> float:
    """Max relative error between the analytic gradient and central differences.

    Each coordinate's error is scaled by max(1, |grad_i|).
    """
    q = np.atleast_1d(np.asarray(q, dtype=float))
    if not model.in_support(q):
        raise OutOfSupportError(f"{model.name}: q={q} is outside the support")
    grad = np.atleast_1d(np.asarray(model.gradient(q), dtype=float))
    worst = 0.0
    for i in range(q.size):
        step = np.zeros_like(q)
        step[i] = h
        up, down = q + step, q - step
        if not (model.in_support(up) and model.in_support(down)):
            raise OutOfSupportError(
                f"{model.name}: perturbing coordinate {i} by {h} leaves the support", coordinate=i
            )
        fd = (model.potential(up) - model.potential(down)) / (2.0 * h)
        worst = max(worst, abs(grad[i] - fd) / max(1.0, abs(grad[i])))
    return worst


def support_points(name: str, count: int = 100, seed: int = 0) -> Iterator[np.ndarray]:
    """Deterministic points inside the support of a registered model."""
    model = get_model(name)
    rng = np.random.default_rng(seed)
    for _ in range(count):
        if model.name == "gamma51":
            yield rng.uniform(0.1, 20.0, size=1)
        elif model.name == "mixture":
            yield rng.uniform(-8.0, 8.0, size=2)
        else:
            yield 2.0 * rng.standard_normal(model.dim)


def as_position(q: Sequence[float] | float, model: TargetModel) -> np.ndarray:
    """Coerce a user-supplied starting point to a float vector of the model's dimension."""
    q = np.atleast_1d(np.asarray(q, dtype=float))
    if q.shape != (model.dim,):
        raise ConfigurationError("init", f"{model.name} needs {model.dim} coordinates, got {q.size}")
    return q
