"""
Chain-quality measurements: autocorrelation, integrated autocorrelation time
(IAT), effective sample size, burn-in detection, acceptance rate, summary
statistics and mode occupancy, gathered into a ``DiagnosticsReport``.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from config import BURNIN_BAND, BURNIN_WINDOW, MODE_RADIUS, STORM_WINDOW
from errors import ConfigurationError, DegenerateSeriesError, NotConvergedError
from samplers import Trace, thin

logger = logging.getLogger(__name__)


def _centred(series) -> np.ndarray:
    x = np.asarray(series, dtype=float).ravel()
    if x.size < 2:
        raise DegenerateSeriesError(f"need at least 2 values, got {x.size}")
    x = x - x.mean()
    if not np.any(x):
        raise DegenerateSeriesError("series has zero variance")
    return x


def _acf(x: np.ndarray) -> np.ndarray:
    # full biased autocorrelation of a centred series via zero-padded FFT
    n = x.size
    size = 1 << (2 * n - 1).bit_length()
    spectrum = np.fft.rfft(x, size)
    acov = np.fft.irfft(spectrum * np.conj(spectrum), size)[:n]
    return acov / acov[0]


def autocorrelation(series, max_lag: int) -> np.ndarray:
    """rho_k for k = 0..max_lag, normalised by the total sum of squares."""
    x = _centred(series)
    if max_lag < 1 or x.size <= max_lag:
        raise ConfigurationError("max_lag", f"need 1 <= max_lag < {x.size}, got {max_lag}")
    return _acf(x)[: max_lag + 1]


def iat(series) -> float:
    """Initial-positive-sequence IAT estimate, floored at 1.

    Pairs Gamma_m = rho_2m + rho_2m+1 are summed while they stay strictly
    positive: tau = -1 + 2 * sum Gamma_m.
    """
    rho = _acf(_centred(series))
    pairs = rho.size // 2
    gamma = rho[0: 2 * pairs: 2] + rho[1: 2 * pairs: 2]
    non_positive = np.flatnonzero(gamma <= 0)
    cut = non_positive[0] if non_positive.size else gamma.size
    tau = -1.0 + 2.0 * float(gamma[:cut].sum())
    return max(tau, 1.0)


def coordinate_iats(states: np.ndarray) -> np.ndarray:
    """IAT of every column; constant columns give NaN."""
    states = np.asarray(states, dtype=float)
    if states.ndim == 1:
        states = states[:, None]
    out = np.full(states.shape[1], np.nan)
    for j in range(states.shape[1]):
        try:
            out[j] = iat(states[:, j])
        except DegenerateSeriesError:
            logger.debug("coordinate %d is constant; skipped", j)
    return out


def monitored_iat(states: np.ndarray) -> Tuple[int, float]:
    """(coordinate, IAT) of the coordinate with the largest IAT."""
    iats = coordinate_iats(states)
    if np.all(np.isnan(iats)):
        raise DegenerateSeriesError("every coordinate of the chain is constant")
    j = int(np.nanargmax(iats))
    return j, float(iats[j])


def ess(trace: Trace, burnin: int = 0) -> float:
    """(n - burnin) / max(IAT, 1) using the worst-mixing coordinate."""
    if burnin < 0 or burnin >= trace.n:
        raise ConfigurationError("burnin", f"burn-in {burnin} must lie in [0, {trace.n})")
    remaining = trace.n - burnin
    if remaining < 2:
        return float(remaining)
    _, tau = monitored_iat(trace.states[burnin:])
    return remaining / max(tau, 1.0)


def detect_burnin(log_density, window: int = BURNIN_WINDOW, c: float = BURNIN_BAND) -> int:
    """First index whose window mean enters the band of the final quarter.

    The band is mean +/- c * sd of the last quarter of the series. A final
    quarter that is still rising (least-squares slope above sd / quarter
    length) means the chain has not settled.
    """
    x = np.asarray(log_density, dtype=float).ravel()
    if window < 1:
        raise ConfigurationError("window", "window must be positive")
    if x.size < 4 * window:
        raise DegenerateSeriesError(f"need at least {4 * window} log densities, got {x.size}")
    if not np.all(np.isfinite(x)):
        raise DegenerateSeriesError("log densities must be finite")

    tail = x[(3 * x.size) // 4:]
    centre, spread = float(tail.mean()), float(tail.std())
    tol = 1e-9 * max(1.0, abs(centre))
    slope = float(np.polyfit(np.arange(tail.size), tail, 1)[0])
    if slope > spread / tail.size + tol:
        raise NotConvergedError(f"log density still rising at the end of the chain (slope {slope:.3g})")

    csum = np.concatenate([[0.0], np.cumsum(x)])
    window_means = (csum[window:] - csum[:-window]) / window
    inside = np.abs(window_means - centre) <= c * spread + tol
    hits = np.flatnonzero(inside)
    if hits.size == 0:
        raise NotConvergedError("no window mean enters the final-quarter band")
    return int(hits[0])


def acceptance_rate(trace: Trace) -> float:
    """Accepted proposals over all proposals.

    Equals the fraction of accepted flags when every iteration was recorded;
    hand-built traces without counts fall back to the flags.
    """
    if trace.n < 1:
        raise DegenerateSeriesError("empty trace")
    if trace.proposals:
        return trace.accepts / trace.proposals
    return float(np.mean(trace.accepted))


def acceptance_storm(trace: Trace, window: int = STORM_WINDOW) -> bool:
    """True when nothing was accepted during the first ``window`` iterations."""
    early = trace.index < window
    return bool(early.any() and not trace.accepted[early].any())


def _coordinate_names(dim: int) -> List[str]:
    return [f"q{j + 1}" for j in range(dim)]


def summarize(trace: Trace) -> pd.DataFrame:
    """Per-coordinate mean, unbiased variance and 2.5/50/97.5% quantiles."""
    if trace.n < 2:
        raise DegenerateSeriesError("need at least 2 states to summarize")
    x = trace.states
    quant = np.quantile(x, [0.025, 0.5, 0.975], axis=0)
    return pd.DataFrame(
        {
            "mean": x.mean(axis=0),
            "variance": x.var(axis=0, ddof=1),
            "q2.5": quant[0],
            "q50": quant[1],
            "q97.5": quant[2],
        },
        index=_coordinate_names(trace.dim),
    )


def mode_occupancy(trace: Trace, centers: Sequence[Sequence[float]], radius: float = MODE_RADIUS,
                   burnin: int = 0) -> np.ndarray:
    """Fraction of post-burn-in states within ``radius`` of each center."""
    centers = np.atleast_2d(np.asarray(centers, dtype=float))
    if centers.size == 0:
        raise ConfigurationError("centers", "need at least one center")
    if not radius > 0:
        raise ConfigurationError("radius", "radius must be positive")
    states = trace.states[burnin:]
    dist = np.linalg.norm(states[:, None, :] - centers[None, :, :], axis=2)
    return (dist <= radius).mean(axis=0)


def histogram(trace: Trace, bins: int = 50) -> pd.DataFrame:
    """Normalised per-coordinate histograms, long format."""
    frames = []
    for j, name in enumerate(_coordinate_names(trace.dim)):
        density, edges = np.histogram(trace.states[:, j], bins=bins, density=True)
        frames.append(pd.DataFrame({
            "coordinate": name,
            "bin_left": edges[:-1],
            "bin_right": edges[1:],
            "density": density,
        }))
    return pd.concat(frames, ignore_index=True)


@dataclass
class DiagnosticsReport:
    model_name: str
    sampler_name: str
    n: int
    acceptance_rate: float
    burnin: int
    lag: int
    iat: float
    monitored: int
    ess: float
    thinned_size: int
    summary: pd.DataFrame
    coordinate_iat: np.ndarray
    elapsed: Optional[float] = None
    seconds_per_effective_sample: Optional[float] = None
    warnings: List[str] = field(default_factory=list)
    extras: Dict[str, Any] = field(default_factory=dict)

    def as_dict(self) -> Dict[str, Any]:
        """Flat key-value view (used for the report file and CSV rows)."""
        out: Dict[str, Any] = {
            "model": self.model_name,
            "sampler": self.sampler_name,
            "n": self.n,
            "acceptance_rate": self.acceptance_rate,
            "burnin": self.burnin,
            "lag": self.lag,
            "iat": self.iat,
            "monitored": f"q{self.monitored + 1}",
            "ess": self.ess,
            "thinned_size": self.thinned_size,
            "elapsed": self.elapsed,
            "seconds_per_effective_sample": self.seconds_per_effective_sample,
        }
        for name, row in self.summary.iterrows():
            for stat, value in row.items():
                out[f"{name}.{stat}"] = value
        out.update(self.extras)
        if self.warnings:
            out["warnings"] = "; ".join(self.warnings)
        return out


def diagnose(trace: Trace, burnin: Optional[int] = None, lag: Optional[int] = None,
             window: int = BURNIN_WINDOW, c: float = BURNIN_BAND) -> DiagnosticsReport:
    """Full report; ``None`` burn-in/lag mean auto-detect and ceil(IAT)."""
    if burnin is None:
        burnin = detect_burnin(trace.log_density, window, c)
    if burnin < 0 or burnin >= trace.n:
        raise ConfigurationError("burnin", f"burn-in {burnin} must lie in [0, {trace.n})")

    warnings = []
    post = trace.states[burnin:]
    if post.shape[0] >= 2:
        iats = coordinate_iats(post)
        if np.all(np.isnan(iats)):
            # stuck chain: a single distinct state
            monitored, tau, effective = 0, math.nan, 1.0
            warnings.append("every coordinate of the chain is constant after burn-in")
        else:
            monitored = int(np.nanargmax(iats))
            tau = float(iats[monitored])
            effective = post.shape[0] / max(tau, 1.0)
    else:
        monitored, tau, iats = 0, 1.0, np.ones(trace.dim)
        effective = float(post.shape[0])
    if lag is None:
        lag = 1 if math.isnan(tau) else max(1, math.ceil(tau))
    thinned = thin(trace, burnin, lag)
    summary = summarize(thinned if thinned.n >= 2 else thin(trace, burnin, 1))

    if acceptance_storm(trace):
        warnings.append(f"no proposal accepted in the first {STORM_WINDOW} iterations")
    for warning in warnings:
        logger.warning("%s/%s: %s", trace.model_name, trace.sampler_name, warning)

    elapsed = trace.elapsed
    return DiagnosticsReport(
        model_name=trace.model_name,
        sampler_name=trace.sampler_name,
        n=trace.n,
        acceptance_rate=acceptance_rate(trace),
        burnin=int(burnin),
        lag=int(lag),
        iat=tau,
        monitored=monitored,
        ess=effective,
        thinned_size=thinned.n,
        summary=summary,
        coordinate_iat=iats,
        elapsed=elapsed,
        seconds_per_effective_sample=(elapsed / effective) if elapsed is not None and effective > 0 else None,
        warnings=warnings,
    )
