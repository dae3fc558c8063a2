"""
Separable Hamiltonian dynamics: H(q, p) = K(p) + U(q), K(p) = sum p_i^2 / (2 m_i).

Three explicit step maps are provided (leapfrog, Euler, symplectic Euler)
together with measurements of the properties HMC depends on: reversibility
under a momentum flip, energy drift and the symplectic / volume defect of
one step.

Step maps work on raw arrays internally; ``PhaseState`` is only built at
the public boundary so that long trajectories stay cheap.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Callable, Dict, Iterable, Tuple

import numpy as np

from config import SYMPLECTIC_FD_STEP
from errors import ConfigurationError, DegenerateFitError, OutOfSupportError, TrajectoryDiverged
from target_models import TargetModel

logger = logging.getLogger(__name__)

Arrays = Tuple[np.ndarray, np.ndarray]


@dataclass(frozen=True)
class PhaseState:
    q: np.ndarray
    p: np.ndarray

    def __post_init__(self):
        q = np.atleast_1d(np.asarray(self.q, dtype=float))
        p = np.atleast_1d(np.asarray(self.p, dtype=float))
        if q.shape != p.shape or q.ndim != 1:
            raise ValueError(f"position and momentum must be equal-length vectors, got {q.shape} and {p.shape}")
        if not (np.all(np.isfinite(q)) and np.all(np.isfinite(p))):
            raise ValueError("phase state entries must be finite")
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "p", p)

    @property
    def dim(self) -> int:
        return self.q.size

    def flip(self) -> "PhaseState":
        return PhaseState(self.q, -self.p)

    def distance(self, other: "PhaseState") -> float:
        """Max-norm distance in phase space."""
        return float(max(np.max(np.abs(self.q - other.q)), np.max(np.abs(self.p - other.p))))


@dataclass(frozen=True)
class MassMatrix:
    diag: np.ndarray

    def __post_init__(self):
        diag = np.atleast_1d(np.asarray(self.diag, dtype=float))
        if diag.ndim != 1 or np.any(~np.isfinite(diag)) or np.any(diag <= 0):
            raise ConfigurationError("mass", "mass diagonal entries must be finite and positive")
        object.__setattr__(self, "diag", diag)

    @classmethod
    def identity(cls, dim: int) -> "MassMatrix":
        return cls(np.ones(dim))

    @property
    def inverse(self) -> np.ndarray:
        return 1.0 / self.diag


def kinetic_energy(p, m: MassMatrix) -> float:
    p = np.asarray(p, dtype=float)
    return float(np.sum(p * p / (2.0 * m.diag)))


def hamiltonian(model: TargetModel, s: PhaseState, m: MassMatrix) -> float:
    if not model.in_support(s.q):
        raise OutOfSupportError(f"{model.name}: q={s.q} is outside the support")
    return kinetic_energy(s.p, m) + float(model.potential(s.q))


# ---------------------------------------------------------------------------
# Raw trajectories: (model, q, p, eps, steps, inverse mass) -> (q', p')
# ---------------------------------------------------------------------------

def _guard_for(model: TargetModel) -> Callable[[np.ndarray], None]:
    # checks q after each drift; a bad momentum shows up in the next q,
    # trajectory() checks the final p
    if model.bounded:
        def guard(q):
            if not np.isfinite(q).all():
                raise TrajectoryDiverged("non-finite phase-space values")
            if not model.in_support(q):
                raise TrajectoryDiverged(f"{model.name}: trajectory left the support at q={q}")
    else:
        def guard(q):
            if not np.isfinite(q).all():
                raise TrajectoryDiverged("non-finite phase-space values")
    return guard


def _leapfrog(model: TargetModel, q, p, eps: float, steps: int, inv_m) -> Arrays:
    """Kick-drift-kick; the closing gradient of one step opens the next."""
    guard = _guard_for(model)
    gradient = model.gradient
    half = 0.5 * eps
    drift = eps * inv_m
    g = gradient(q)
    for _ in range(steps):
        p = p - half * g
        q = q + drift * p
        guard(q)
        g = gradient(q)
        p = p - half * g
    return q, p


def _euler(model: TargetModel, q, p, eps: float, steps: int, inv_m) -> Arrays:
    guard = _guard_for(model)
    drift = eps * inv_m
    for _ in range(steps):
        q, p = q + drift * p, p - eps * model.gradient(q)
        guard(q)
    return q, p


def _symplectic_euler(model: TargetModel, q, p, eps: float, steps: int, inv_m) -> Arrays:
    guard = _guard_for(model)
    drift = eps * inv_m
    for _ in range(steps):
        p = p - eps * model.gradient(q)
        q = q + drift * p
        guard(q)
    return q, p


Integrator = Callable[[TargetModel, np.ndarray, np.ndarray, float, int, np.ndarray], Arrays]

INTEGRATORS: Dict[str, Integrator] = {
    "leapfrog": _leapfrog,
    "euler": _euler,
    "symplectic-euler": _symplectic_euler,
}


def _integrator(method: str) -> Integrator:
    try:
        return INTEGRATORS[method]
    except KeyError:
        raise ConfigurationError("method", f"unknown integrator {method!r}; choose one of {', '.join(INTEGRATORS)}")


def _start(model: TargetModel, s: PhaseState, m: MassMatrix) -> Arrays:
    if m.diag.shape != s.q.shape:
        raise ConfigurationError("mass", f"mass has {m.diag.size} entries, state has {s.dim}")
    if not model.in_support(s.q):
        raise OutOfSupportError(f"{model.name}: q={s.q} is outside the support")
    return s.q, s.p


def trajectory(model: TargetModel, q: np.ndarray, p: np.ndarray, eps: float, steps: int,
               inv_m: np.ndarray, method: str = "leapfrog") -> Arrays:
    """Apply ``steps`` step maps to raw arrays. Raises TrajectoryDiverged.

    One gradient evaluation and one support check per step.
    """
    integrator = _integrator(method)
    if steps == 0:
        return q, p
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        q, p = integrator(model, q, p, eps, steps, inv_m)
    if not np.isfinite(p).all():
        raise TrajectoryDiverged("non-finite momentum at the end of the trajectory")
    return q, p


# ---------------------------------------------------------------------------
# Public step maps
# ---------------------------------------------------------------------------

def _one_step(method: str, model: TargetModel, s: PhaseState, eps: float, m: MassMatrix) -> PhaseState:
    q, p = _start(model, s, m)
    return PhaseState(*trajectory(model, q, p, eps, 1, m.inverse, method))


def leapfrog_step(model: TargetModel, s: PhaseState, eps: float, m: MassMatrix) -> PhaseState:
    """Kick-drift-kick: half momentum kick, full position drift, half kick."""
    return _one_step("leapfrog", model, s, eps, m)


def euler_step(model: TargetModel, s: PhaseState, eps: float, m: MassMatrix) -> PhaseState:
    return _one_step("euler", model, s, eps, m)


def symplectic_euler_step(model: TargetModel, s: PhaseState, eps: float, m: MassMatrix) -> PhaseState:
    return _one_step("symplectic-euler", model, s, eps, m)


def integrate(model: TargetModel, s: PhaseState, eps: float, steps: int, m: MassMatrix,
              method: str = "leapfrog") -> PhaseState:
    if steps < 0:
        raise ConfigurationError("steps", "number of steps must be non-negative")
    q, p = _start(model, s, m)
    return PhaseState(*trajectory(model, q, p, eps, steps, m.inverse, method))


def exact_gaussian_flow(s: PhaseState, t: float) -> PhaseState:
    """Closed-form flow of H = |q|^2/2 + |p|^2/2 (unit mass) over time t."""
    c, sn = np.cos(t), np.sin(t)
    return PhaseState(s.q * c + s.p * sn, -s.q * sn + s.p * c)


# ---------------------------------------------------------------------------
# Property measurements
# ---------------------------------------------------------------------------

def reversibility_defect(model: TargetModel, s: PhaseState, eps: float, steps: int, m: MassMatrix) -> float:
    """Forward, flip, forward, flip; distance back to the start."""
    forward = integrate(model, s, eps, steps, m)
    back = integrate(model, forward.flip(), eps, steps, m).flip()
    return back.distance(s)


def energy_drift(model: TargetModel, s: PhaseState, eps: float, steps: int, m: MassMatrix,
                 method: str = "leapfrog") -> float:
    end = integrate(model, s, eps, steps, m, method)
    return abs(hamiltonian(model, end, m) - hamiltonian(model, s, m))


def step_jacobian(model: TargetModel, s: PhaseState, eps: float, m: MassMatrix,
                  method: str = "leapfrog", h: float = SYMPLECTIC_FD_STEP) -> np.ndarray:
    """Central finite-difference Jacobian of one step map in z = (q, p)."""
    d = s.dim
    z = np.concatenate([s.q, s.p])
    jac = np.empty((2 * d, 2 * d))
    for j in range(2 * d):
        dz = np.zeros(2 * d)
        dz[j] = h
        up = _one_step(method, model, PhaseState((z + dz)[:d], (z + dz)[d:]), eps, m)
        down = _one_step(method, model, PhaseState((z - dz)[:d], (z - dz)[d:]), eps, m)
        jac[:, j] = (np.concatenate([up.q, up.p]) - np.concatenate([down.q, down.p])) / (2.0 * h)
    return jac


def symplectic_defect(model: TargetModel, s: PhaseState, eps: float, m: MassMatrix,
                      method: str = "leapfrog", h: float = SYMPLECTIC_FD_STEP) -> float:
    """max |M^T J M - J| for the Jacobian M of one step."""
    d = s.dim
    jac = step_jacobian(model, s, eps, m, method, h)
    eye = np.eye(d)
    zero = np.zeros((d, d))
    J = np.block([[zero, eye], [-eye, zero]])
    return float(np.max(np.abs(jac.T @ J @ jac - J)))


def volume_defect(model: TargetModel, s: PhaseState, eps: float, m: MassMatrix,
                  method: str = "leapfrog", h: float = SYMPLECTIC_FD_STEP) -> float:
    """| |det M| - 1 |, zero for volume-preserving maps."""
    return abs(abs(float(np.linalg.det(step_jacobian(model, s, eps, m, method, h)))) - 1.0)


def convergence_order(model: TargetModel, s: PhaseState, total_time: float, eps_list: Iterable[float],
                      m: MassMatrix, method: str = "leapfrog") -> Tuple[float, np.ndarray]:
    """Slope of log|dH| against log eps at fixed integration time.

    Returns the fitted slope and the drift measured at each step size.
    """
    eps = np.asarray(list(eps_list), dtype=float)
    if eps.size < 2:
        raise DegenerateFitError("need at least two step sizes to fit an order")
    drifts = np.array([
        energy_drift(model, s, e, int(round(total_time / e)), m, method) for e in eps
    ])
    if np.any(drifts <= 0) or np.ptp(drifts) == 0:
        raise DegenerateFitError(f"{method}: drifts {drifts} cannot be fitted on a log scale")
    slope, _ = np.polyfit(np.log(eps), np.log(drifts), 1)
    logger.debug("%s: drifts=%s slope=%.3f", method, drifts, slope)
    return float(slope), drifts
