#!/usr/bin/env python3
"""
t-walk: a two-point, scale-invariant sampler needing no tuning or gradients.

The chain lives on pairs (x, x'). Each iteration picks one of the two
points to move, uses the other as pivot, and proposes with one of four
kernels (walk, traverse, hop, blow). Only the primary point x is recorded.

Draw order per iteration: one uniform for the kernel, one uniform for the
moving point, d uniforms for the coordinate mask, the kernel's own draws,
then one uniform for the accept/reject decision.
"""

from __future__ import annotations

import logging
import math
import time
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np

from config import DEFAULT_SEED
from errors import ConfigurationError
from samplers import Trace, _iterations, _snapshot, _start_point
from target_models import TargetModel

logger = logging.getLogger(__name__)

# move_probs are given in this order
KERNELS = ("walk", "traverse", "hop", "blow")
DEFAULT_MOVE_PROBS = (0.4918, 0.4918, 0.0082, 0.0082)
_LOG_2PI = math.log(2.0 * math.pi)


@dataclass(frozen=True)
class TwalkConfig:
    x0: np.ndarray
    x0_prime: np.ndarray
    n: int
    seed: int = DEFAULT_SEED
    move_probs: Tuple[float, float, float, float] = DEFAULT_MOVE_PROBS
    a_w: float = 1.5
    a_t: float = 6.0
    n1: float = 4.0
    record_every: int = 1

    def __post_init__(self):
        x0 = np.atleast_1d(np.asarray(self.x0, dtype=float))
        x1 = np.atleast_1d(np.asarray(self.x0_prime, dtype=float))
        if x0.shape != x1.shape:
            raise ConfigurationError("init2", f"initial points differ in shape: {x0.shape} vs {x1.shape}")
        if np.array_equal(x0, x1):
            raise ConfigurationError("init2", "the two initial points must be distinct")
        probs = np.asarray(self.move_probs, dtype=float)
        if probs.shape != (4,) or np.any(probs < 0) or abs(probs.sum() - 1.0) > 1e-12:
            raise ConfigurationError("move_probs", "need 4 non-negative probabilities summing to 1")
        if not self.a_w > 0:
            raise ConfigurationError("a_w", "walk parameter must be positive")
        if not self.a_t > 1:
            raise ConfigurationError("a_t", "traverse parameter must exceed 1")
        if not self.n1 > 0:
            raise ConfigurationError("n1", "expected number of moved coordinates must be positive")
        if int(self.n) < 1:
            raise ConfigurationError("n", "chain length must be at least 1")
        if int(self.record_every) < 1:
            raise ConfigurationError("record_every", "must be a positive integer")
        object.__setattr__(self, "x0", x0)
        object.__setattr__(self, "x0_prime", x1)
        object.__setattr__(self, "move_probs", tuple(float(v) for v in probs))


class TwalkKernels:
    """The four proposal kernels; each returns (proposal, log Hastings factor)."""

    def __init__(self, cfg: TwalkConfig, rng: np.random.Generator):
        self.cfg = cfg
        self.rng = rng
        self._walk_scale = cfg.a_w / (1.0 + cfg.a_w)

    def walk(self, x, pivot, phi) -> Tuple[np.ndarray, float]:
        u = self.rng.random(x.size)
        z = self._walk_scale * (self.cfg.a_w * u * u + 2.0 * u - 1.0)
        return x + phi * (x - pivot) * z, 0.0

    def _beta(self) -> float:
        a = self.cfg.a_t
        if self.rng.random() < (a - 1.0) / (2.0 * a):
            return math.exp(math.log(self.rng.random()) / (a + 1.0))
        return math.exp(math.log(self.rng.random()) / (1.0 - a))

    def traverse(self, x, pivot, phi) -> Tuple[np.ndarray, float]:
        beta = self._beta()
        y = np.where(phi, pivot + beta * (pivot - x), x)
        return y, (int(phi.sum()) - 2) * math.log(beta)

    @staticmethod
    def _neg_log_q(h, centre, sigma, phi) -> float:
        # -log N(h_phi | centre_phi, sigma^2 I) over the moved coordinates
        k = int(phi.sum())
        diff = (h - centre)[phi]
        return 0.5 * k * _LOG_2PI + k * math.log(sigma) + 0.5 * float(diff @ diff) / (sigma * sigma)

    @staticmethod
    def _scale(a, b, phi) -> float:
        return float(np.max(np.abs(a - b)[phi]))

    def blow(self, x, pivot, phi) -> Tuple[np.ndarray, float]:
        sigma = self._scale(pivot, x, phi)
        y = np.where(phi, pivot + sigma * self.rng.standard_normal(x.size), x)
        sigma_back = self._scale(pivot, y, phi)
        if sigma == 0.0 or sigma_back == 0.0:
            return y, -math.inf
        return y, self._neg_log_q(y, pivot, sigma, phi) - self._neg_log_q(x, pivot, sigma_back, phi)

    def hop(self, x, pivot, phi) -> Tuple[np.ndarray, float]:
        sigma = self._scale(pivot, x, phi) / 3.0
        y = np.where(phi, x + sigma * self.rng.standard_normal(x.size), x)
        sigma_back = self._scale(pivot, y, phi) / 3.0
        if sigma == 0.0 or sigma_back == 0.0:
            return y, -math.inf
        return y, self._neg_log_q(y, x, sigma, phi) - self._neg_log_q(x, y, sigma_back, phi)


def twalk_sample(model: TargetModel, cfg: TwalkConfig) -> Trace:
    """Run the t-walk from (x0, x0') and record the primary point."""
    points = [_start_point(model, cfg.x0), _start_point(model, cfg.x0_prime)]
    energies = [float(model.potential(points[0])), float(model.potential(points[1]))]
    d = model.dim
    rng = np.random.default_rng(cfg.seed)
    kernels = TwalkKernels(cfg, rng)
    moves = [getattr(kernels, name) for name in KERNELS]
    cum_probs = np.cumsum(cfg.move_probs)
    p_phi = min(d, cfg.n1) / d
    every = int(cfg.record_every)
    total = cfg.n * every

    states = np.empty((cfg.n, d))
    log_density = np.empty(cfg.n)
    accepted = np.zeros(cfg.n, dtype=bool)
    index = np.empty(cfg.n, dtype=int)
    kernel_accepts = np.zeros(4, dtype=int)
    kernel_uses = np.zeros(4, dtype=int)
    n_acc = 0
    block_accepted = False

    logger.info("twalk on %s: n=%d record_every=%d seed=%d", model.name, cfg.n, every, cfg.seed)
    start = time.perf_counter()
    for it in _iterations(total, f"twalk:{model.name}"):
        k = min(int(np.searchsorted(cum_probs, rng.random(), side="right")), 3)
        mover = 0 if rng.random() < 0.5 else 1
        phi = rng.random(d) < p_phi
        x, pivot = points[mover], points[1 - mover]
        kernel_uses[k] += 1

        y, log_hastings = moves[k](x, pivot, phi) if phi.any() else (x, -math.inf)
        u = rng.random()
        if math.isfinite(log_hastings) and np.all(y != pivot) and model.in_support(y):
            u_new = float(model.potential(y))
            log_ratio = energies[mover] - u_new + log_hastings
            if math.isfinite(log_ratio) and (log_ratio >= 0.0 or u < math.exp(log_ratio)):
                points[mover], energies[mover] = y, u_new
                n_acc += 1
                kernel_accepts[k] += 1
                block_accepted = True
        if (it + 1) % every == 0:
            row = it // every
            states[row] = points[0]
            log_density[row] = -energies[0]
            accepted[row] = block_accepted
            index[row] = it
            block_accepted = False
    elapsed = time.perf_counter() - start

    logger.info("twalk on %s done in %.2fs: acceptance %.4f", model.name, elapsed, n_acc / total)
    return Trace(
        states, log_density, accepted, model.name, "twalk",
        config=_snapshot(cfg), index=index, proposals=total, accepts=n_acc,
        meta={
            "elapsed": elapsed, "burnin": 0, "lag": 1,
            "kernel_acceptance": {
                name: (int(a) / int(u) if u else 0.0)
                for name, a, u in zip(KERNELS, kernel_accepts, kernel_uses)
            },
            "kernel_uses": {name: int(u) for name, u in zip(KERNELS, kernel_uses)},
        },
    )
