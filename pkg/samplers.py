"""
Chain generators sharing one contract: a seeded ``numpy`` Generator, a fixed
per-iteration draw order, and a ``Trace`` recording every kept state.

HMC draw order per iteration: d standard normals (momentum), one uniform for
the step-size jitter (only when jitter > 0), then one uniform for the
accept/reject decision. The acceptance uniform is drawn even when the
trajectory diverges, so the stream never depends on the outcome.

RWMH draw order per iteration: d standard normals, then one uniform.
"""

from __future__ import annotations

import logging
import math
import time
from dataclasses import asdict, dataclass, field, replace
from typing import Any, Callable, Dict, Optional, Tuple

import numpy as np
from tqdm import tqdm

from config import DEFAULT_SEED, SHOW_PROGRESS
from dynamics import MassMatrix, trajectory
from errors import ConfigurationError, OutOfSupportError, TrajectoryDiverged
from target_models import TargetModel, as_position

logger = logging.getLogger(__name__)

# (q, p, eps, steps) -> (q*, p*); replaces the leapfrog trajectory when given
Flow = Callable[[np.ndarray, np.ndarray, float, int], Tuple[np.ndarray, np.ndarray]]


def _snapshot(cfg) -> Dict[str, Any]:
    out = {}
    for key, value in asdict(cfg).items():
        out[key] = value.tolist() if isinstance(value, np.ndarray) else value
    return out


@dataclass(frozen=True)
class HmcConfig:
    epsilon: float
    steps: int
    n: int
    seed: int = DEFAULT_SEED
    mass: Optional[np.ndarray] = None   # diagonal; all ones when omitted
    epsilon_jitter: float = 0.0

    def __post_init__(self):
        if not self.epsilon > 0:
            raise ConfigurationError("epsilon", "step size must be positive")
        if int(self.steps) < 1:
            raise ConfigurationError("steps", "need at least one leapfrog step")
        if int(self.n) < 1:
            raise ConfigurationError("n", "chain length must be at least 1")
        if not 0.0 <= self.epsilon_jitter < 1.0:
            raise ConfigurationError("jitter", "epsilon jitter must lie in [0, 1)")

    def mass_matrix(self, dim: int) -> MassMatrix:
        if self.mass is None:
            return MassMatrix.identity(dim)
        m = MassMatrix(self.mass)
        if m.diag.size != dim:
            raise ConfigurationError("mass", f"mass needs {dim} entries, got {m.diag.size}")
        return m


@dataclass(frozen=True)
class RwmhConfig:
    sigma: float
    n: int
    seed: int = DEFAULT_SEED
    record_every: int = 1

    def __post_init__(self):
        if not self.sigma > 0:
            raise ConfigurationError("sigma", "proposal scale must be positive")
        if int(self.n) < 1:
            raise ConfigurationError("n", "chain length must be at least 1")
        if int(self.record_every) < 1:
            raise ConfigurationError("record_every", "must be a positive integer")


@dataclass(frozen=True)
class Trace:
    states: np.ndarray
    log_density: np.ndarray
    accepted: np.ndarray
    model_name: str
    sampler_name: str
    config: Dict[str, Any] = field(default_factory=dict)
    index: Optional[np.ndarray] = None
    # Proposal counts over every iteration, including unrecorded ones
    proposals: Optional[int] = None
    accepts: Optional[int] = None
    meta: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        states = np.asarray(self.states, dtype=float)
        if states.ndim == 1:
            states = states[:, None]
        log_density = np.asarray(self.log_density, dtype=float)
        accepted = np.asarray(self.accepted, dtype=bool)
        if not (states.shape[0] == log_density.size == accepted.size):
            raise ValueError(
                f"trace columns disagree: {states.shape[0]} states, "
                f"{log_density.size} log densities, {accepted.size} flags"
            )
        index = np.arange(states.shape[0]) if self.index is None else np.asarray(self.index, dtype=int)
        object.__setattr__(self, "states", states)
        object.__setattr__(self, "log_density", log_density)
        object.__setattr__(self, "accepted", accepted)
        object.__setattr__(self, "index", index)

    @property
    def n(self) -> int:
        return self.states.shape[0]

    @property
    def dim(self) -> int:
        return self.states.shape[1]

    @property
    def elapsed(self) -> Optional[float]:
        return self.meta.get("elapsed")


def _iterations(total: int, desc: str):
    return tqdm(range(total), desc=desc, disable=not SHOW_PROGRESS, mininterval=1.0)


def _start_point(model: TargetModel, q0) -> np.ndarray:
    q = as_position(q0, model)
    if not model.in_support(q):
        raise OutOfSupportError(f"{model.name}: starting point {q} is outside the support")
    return q.copy()


def hmc_sample(model: TargetModel, cfg: HmcConfig, q0, flow: Optional[Flow] = None) -> Trace:
    """Hamiltonian Monte Carlo with a leapfrog (or supplied) trajectory.

    Args:
        model: target to sample
        cfg: step size, steps, chain length, seed, mass and jitter
        q0: starting position inside the support
        flow: optional replacement for the leapfrog trajectory

    Returns:
        Trace of ``cfg.n`` states; divergent trajectories count as rejections.
    """
    q = _start_point(model, q0)
    d = model.dim
    rng = np.random.default_rng(cfg.seed)
    mass = cfg.mass_matrix(d)
    inv_m = mass.inverse
    sd = np.sqrt(mass.diag)
    steps = int(cfg.steps)

    states = np.empty((cfg.n, d))
    log_density = np.empty(cfg.n)
    accepted = np.zeros(cfg.n, dtype=bool)
    u_cur = float(model.potential(q))
    divergences = 0

    logger.info("hmc on %s: eps=%g L=%d n=%d seed=%d", model.name, cfg.epsilon, steps, cfg.n, cfg.seed)
    start = time.perf_counter()
    for i in _iterations(cfg.n, f"hmc:{model.name}"):
        p = rng.standard_normal(d) * sd
        eps = cfg.epsilon
        if cfg.epsilon_jitter > 0:
            eps *= 1.0 + cfg.epsilon_jitter * (2.0 * rng.random() - 1.0)
        u = rng.random()
        try:
            if flow is None:
                q_new, p_new = trajectory(model, q, p, eps, steps, inv_m)
            else:
                q_new, p_new = flow(q, p, eps, steps)
            k_end = float(np.sum(p_new * p_new * inv_m)) / 2.0
            p_new = -p_new
            u_new = float(model.potential(q_new))
            h_old = u_cur + float(np.sum(p * p * inv_m)) / 2.0
            k_new = float(np.sum(p_new * p_new * inv_m)) / 2.0
            assert k_new == k_end or not math.isfinite(k_end), "kinetic energy must be even in p"
            h_new = u_new + k_new
            if not math.isfinite(h_new):
                raise TrajectoryDiverged("non-finite energy at the end of the trajectory")
            log_ratio = h_old - h_new
            if log_ratio >= 0.0 or u < math.exp(log_ratio):
                q, u_cur = q_new, u_new
                accepted[i] = True
        except (TrajectoryDiverged, OutOfSupportError) as exc:
            divergences += 1
            logger.debug("iteration %d diverged: %s", i, exc)
        states[i] = q
        log_density[i] = -u_cur
    elapsed = time.perf_counter() - start

    n_acc = int(accepted.sum())
    logger.info("hmc on %s done in %.2fs: acceptance %.4f, %d divergences",
                model.name, elapsed, n_acc / cfg.n, divergences)
    return Trace(
        states, log_density, accepted, model.name, "hmc",
        config=_snapshot(cfg), proposals=cfg.n, accepts=n_acc,
        meta={"elapsed": elapsed, "burnin": 0, "lag": 1, "divergences": divergences},
    )


def rwmh_sample(model: TargetModel, cfg: RwmhConfig, q0) -> Trace:
    """Random-walk Metropolis-Hastings with isotropic normal proposals.

    Runs ``n * record_every`` iterations and keeps every ``record_every``-th state.
    Proposals outside the support are rejected.
    """
    q = _start_point(model, q0)
    d = model.dim
    rng = np.random.default_rng(cfg.seed)
    every = int(cfg.record_every)
    total = cfg.n * every

    states = np.empty((cfg.n, d))
    log_density = np.empty(cfg.n)
    accepted = np.zeros(cfg.n, dtype=bool)
    index = np.empty(cfg.n, dtype=int)
    u_cur = float(model.potential(q))
    n_acc = 0
    block_accepted = False

    logger.info("rwmh on %s: sigma=%g n=%d record_every=%d seed=%d",
                model.name, cfg.sigma, cfg.n, every, cfg.seed)
    start = time.perf_counter()
    for it in _iterations(total, f"rwmh:{model.name}"):
        proposal = q + cfg.sigma * rng.standard_normal(d)
        u = rng.random()
        if model.in_support(proposal):
            u_new = float(model.potential(proposal))
            log_ratio = u_cur - u_new
            if log_ratio >= 0.0 or u < math.exp(log_ratio):
                q, u_cur = proposal, u_new
                n_acc += 1
                block_accepted = True
        if (it + 1) % every == 0:
            row = it // every
            states[row] = q
            log_density[row] = -u_cur
            accepted[row] = block_accepted
            index[row] = it
            block_accepted = False
    elapsed = time.perf_counter() - start

    logger.info("rwmh on %s done in %.2fs: acceptance %.4f", model.name, elapsed, n_acc / total)
    return Trace(
        states, log_density, accepted, model.name, "rwmh",
        config=_snapshot(cfg), index=index, proposals=total, accepts=n_acc,
        meta={"elapsed": elapsed, "burnin": 0, "lag": 1},
    )


def thin(trace: Trace, burnin: int, lag: int) -> Trace:
    """Drop the first ``burnin`` states and keep every ``lag``-th of the rest."""
    if burnin < 0 or burnin >= trace.n:
        raise ConfigurationError("burnin", f"burn-in {burnin} must lie in [0, {trace.n})")
    if lag < 1:
        raise ConfigurationError("lag", "lag must be a positive integer")
    keep = slice(burnin, None, lag)
    old_burnin = trace.meta.get("burnin", 0)
    old_lag = trace.meta.get("lag", 1)
    meta = dict(trace.meta, burnin=old_burnin + burnin * old_lag, lag=old_lag * lag)
    return replace(
        trace,
        states=trace.states[keep],
        log_density=trace.log_density[keep],
        accepted=trace.accepted[keep],
        index=trace.index[keep],
        meta=meta,
    )
