"""
Experiment runner: turns an ``ExperimentSpec`` into a sampled, diagnosed and
persisted run, and assembles comparison and integrator-order tables.

Files written per run, next to the trace CSV ``<stem>.csv``:
    <stem>.meta.json    sampler config, proposal counts, sampling time
    <stem>.report.txt   key = value diagnostics
    <stem>.acf.csv      autocorrelation of the monitored coordinate
    <stem>.hist.csv     per-coordinate histograms after burn-in
and one line per run in ``runs.jsonl`` of the same directory.
"""

from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Callable, Dict, List, Mapping, Optional, Sequence

import numpy as np
import pandas as pd

from config import ACF_MAX_LAG, DEFAULT_SEED, FD_STEP, HIST_BINS, MODE_RADIUS, OUTPUT_DIR
from diagnostics import DiagnosticsReport, autocorrelation, diagnose, histogram, mode_occupancy
from dynamics import INTEGRATORS, MassMatrix, PhaseState, convergence_order
from errors import ConfigurationError, DegenerateSeriesError, HmcBenchError
from presets import preset_fields
from report import format_report, format_table, report_row
from samplers import HmcConfig, RwmhConfig, Trace, hmc_sample, rwmh_sample, thin
from storage import RunLog, new_record, read_spec_file, write_frame, write_text, write_trace
from target_models import MIXTURE_MEANS, TargetModel, check_gradient, get_model, support_points
from twalk import TwalkConfig, twalk_sample
from utils import expand_vector, parse_auto_int, parse_vector

logger = logging.getLogger(__name__)

SPEC_KEYS = (
    "model", "sampler", "epsilon", "steps", "sigma", "n", "seed", "burnin",
    "lag", "init", "init2", "mass", "jitter", "record_every", "out",
)

# Global error order of each step map
EXPECTED_ORDERS = {"leapfrog": 2, "euler": 1, "symplectic-euler": 1}


def _float(value: Any, key: str) -> Optional[float]:
    if value is None or (isinstance(value, str) and not value.strip()):
        return None
    try:
        return float(value)
    except (TypeError, ValueError):
        raise ConfigurationError(key, f"expected a number, got {value!r}")


def _int(value: Any, key: str) -> Optional[int]:
    number = _float(value, key)
    if number is None:
        return None
    if number != int(number):
        raise ConfigurationError(key, f"expected an integer, got {value!r}")
    return int(number)


def _default_init(model: TargetModel) -> np.ndarray:
    # inside every support: gamma51 needs q > 0
    return np.ones(model.dim) if model.name == "gamma51" else np.zeros(model.dim)


@dataclass
class ExperimentSpec:
    """One sampler run: model, sampler, its parameters, post-processing and output.

    ``burnin``/``lag`` of ``None`` mean "auto" (detected burn-in, ceil(IAT)).
    A single ``init``/``init2``/``mass`` value is broadcast to every coordinate.
    """
    model: str
    sampler: str
    n: int
    seed: int = DEFAULT_SEED
    epsilon: Optional[float] = None
    steps: Optional[int] = None
    sigma: Optional[float] = None
    init: Optional[np.ndarray] = None
    init2: Optional[np.ndarray] = None
    mass: Optional[np.ndarray] = None
    jitter: float = 0.0
    record_every: int = 1
    burnin: Optional[int] = None
    lag: Optional[int] = None
    out: Optional[str] = None

    def __post_init__(self):
        target = get_model(self.model)
        self.model = target.name
        self.sampler = str(self.sampler).strip().lower()
        if self.sampler not in SAMPLERS:
            raise ConfigurationError("sampler", f"unknown sampler {self.sampler!r}; choose one of {', '.join(SAMPLERS)}")
        if self.init is None:
            self.init = _default_init(target)
        self.init = expand_vector(parse_vector(self.init, "init"), target.dim, "init")
        if self.init2 is not None:
            self.init2 = expand_vector(parse_vector(self.init2, "init2"), target.dim, "init2")
        elif self.sampler == "twalk":
            self.init2 = self.init + 1.0
        if self.mass is not None:
            self.mass = expand_vector(parse_vector(self.mass, "mass"), target.dim, "mass")
        if self.burnin is not None and self.burnin < 0:
            raise ConfigurationError("burnin", "burn-in must be non-negative")
        if self.lag is not None and self.lag < 1:
            raise ConfigurationError("lag", "lag must be a positive integer")
        self.sampler_config(target)

    @classmethod
    def from_fields(cls, fields: Mapping[str, Any]) -> "ExperimentSpec":
        """Build a spec from string-or-typed key/values (spec file, CLI, preset)."""
        values = {str(k).strip().lower().replace("-", "_"): v for k, v in fields.items() if v is not None}
        for key in values:
            if key not in SPEC_KEYS:
                raise ConfigurationError(key, "unknown spec key")
        for key in ("model", "sampler", "n"):
            if str(values.get(key, "")).strip() == "":
                raise ConfigurationError(key, "missing required value")
        seed = _int(values.get("seed"), "seed")
        record_every = _int(values.get("record_every"), "record_every")
        jitter = _float(values.get("jitter"), "jitter")
        return cls(
            model=str(values["model"]),
            sampler=str(values["sampler"]),
            n=_int(values["n"], "n"),
            seed=DEFAULT_SEED if seed is None else seed,
            epsilon=_float(values.get("epsilon"), "epsilon"),
            steps=_int(values.get("steps"), "steps"),
            sigma=_float(values.get("sigma"), "sigma"),
            init=values.get("init"),
            init2=values.get("init2"),
            mass=values.get("mass"),
            jitter=0.0 if jitter is None else jitter,
            record_every=1 if record_every is None else record_every,
            burnin=parse_auto_int(values.get("burnin"), "burnin"),
            lag=parse_auto_int(values.get("lag"), "lag"),
            out=values.get("out"),
        )

    @classmethod
    def from_file(cls, path, **overrides) -> "ExperimentSpec":
        fields: Dict[str, Any] = dict(read_spec_file(path))
        fields.update({k: v for k, v in overrides.items() if v is not None})
        return cls.from_fields(fields)

    @property
    def label(self) -> str:
        return f"{self.model}/{self.sampler}"

    def sampler_config(self, model: TargetModel):
        if self.sampler == "hmc":
            if self.epsilon is None:
                raise ConfigurationError("epsilon", "required by the hmc sampler")
            if self.steps is None:
                raise ConfigurationError("steps", "required by the hmc sampler")
            if self.record_every != 1:
                raise ConfigurationError("record_every", "hmc records every iteration")
            return HmcConfig(self.epsilon, self.steps, self.n, self.seed, self.mass, self.jitter)
        if self.sampler == "rwmh":
            if self.sigma is None:
                raise ConfigurationError("sigma", "required by the rwmh sampler")
            return RwmhConfig(self.sigma, self.n, self.seed, self.record_every)
        return TwalkConfig(self.init, self.init2, self.n, self.seed, record_every=self.record_every)

    def output_path(self, directory: Optional[Path] = None) -> Path:
        if self.out:
            return Path(self.out)
        return Path(directory or OUTPUT_DIR) / f"{self.model}_{self.sampler}_seed{self.seed}.csv"


def _hmc(model: TargetModel, spec: ExperimentSpec) -> Trace:
    return hmc_sample(model, spec.sampler_config(model), spec.init)


def _rwmh(model: TargetModel, spec: ExperimentSpec) -> Trace:
    return rwmh_sample(model, spec.sampler_config(model), spec.init)


def _twalk(model: TargetModel, spec: ExperimentSpec) -> Trace:
    return twalk_sample(model, spec.sampler_config(model))


SAMPLERS: Dict[str, Callable[[TargetModel, ExperimentSpec], Trace]] = {
    "hmc": _hmc,
    "rwmh": _rwmh,
    "twalk": _twalk,
}


def sample(spec: ExperimentSpec) -> Trace:
    model = get_model(spec.model)
    return SAMPLERS[spec.sampler](model, spec)


def analyse(trace: Trace, burnin: Optional[int] = None, lag: Optional[int] = None) -> DiagnosticsReport:
    """``diagnose`` plus model-specific extras (mode occupancy for the mixture)."""
    report = diagnose(trace, burnin, lag)
    if trace.model_name == "mixture":
        occupancy = mode_occupancy(trace, MIXTURE_MEANS, MODE_RADIUS, burnin=report.burnin)
        for k, share in enumerate(occupancy, 1):
            report.extras[f"mode{k}_occupancy"] = float(share)
    return report


@dataclass
class RunResult:
    spec: ExperimentSpec
    trace: Trace
    report: DiagnosticsReport
    paths: Dict[str, Path] = field(default_factory=dict)


def _write_series(trace: Trace, report: DiagnosticsReport, trace_path: Path) -> Dict[str, Path]:
    paths = {}
    post = thin(trace, report.burnin, 1)
    try:
        max_lag = min(ACF_MAX_LAG, post.n - 1)
        rho = autocorrelation(post.states[:, report.monitored], max_lag)
        acf = pd.DataFrame({"lag": np.arange(rho.size), "rho": rho})
        paths["acf"] = write_frame(acf, trace_path.with_suffix(".acf.csv"))
    except (ConfigurationError, DegenerateSeriesError) as e:
        logger.warning("no autocorrelation written for %s: %s", trace_path.name, e)
    paths["hist"] = write_frame(histogram(post, HIST_BINS), trace_path.with_suffix(".hist.csv"))
    return paths


def run(spec: ExperimentSpec, persist: bool = True, directory: Optional[Path] = None) -> RunResult:
    """Sample, diagnose and (optionally) persist one spec.

    The trace is written before diagnostics run, so a run whose burn-in cannot
    be detected still leaves its trace on disk.
    """
    trace = sample(spec)
    paths: Dict[str, Path] = {}
    if persist:
        paths["trace"] = write_trace(trace, spec.output_path(directory))
    report = analyse(trace, spec.burnin, spec.lag)
    if persist:
        trace_path = paths["trace"]
        paths["report"] = write_text(format_report(report, title=spec.label), trace_path.with_suffix(".report.txt"))
        paths.update(_write_series(trace, report, trace_path))
        RunLog(trace_path.parent).append(new_record(
            spec.model, spec.sampler, spec.seed, trace_path, paths["report"], report_row(report),
        ))
        logger.info("%s written to %s", spec.label, trace_path)
    return RunResult(spec, trace, report, paths)


@dataclass
class ComparisonTable:
    """One row per run in input order; failed runs carry an ``error`` entry."""
    frame: pd.DataFrame

    def __len__(self) -> int:
        return len(self.frame)

    def to_csv(self, path) -> Path:
        return write_frame(self.frame, path)

    def to_text(self) -> str:
        return format_table(self.frame)


def _compare_row(spec: ExperimentSpec, persist: bool, directory: Optional[Path]) -> Dict[str, Any]:
    row: Dict[str, Any] = {"label": spec.label}
    try:
        result = run(spec, persist=persist, directory=directory)
        row.update(report_row(result.report))
        row["error"] = ""
    except HmcBenchError as e:
        logger.error("%s failed: %s", spec.label, e)
        row.update({"model": spec.model, "sampler": spec.sampler, "n": spec.n, "error": str(e)})
    return row


def compare(specs: Sequence[ExperimentSpec], workers: int = 1, persist: bool = True,
            directory: Optional[Path] = None) -> ComparisonTable:
    """Run every spec and tabulate burn-in, IAT, acceptance, effective sample and timing."""
    specs = list(specs)
    if not specs:
        raise ConfigurationError("specs", "need at least one spec to compare")
    if workers > 1 and len(specs) > 1:
        with ProcessPoolExecutor(max_workers=min(workers, len(specs))) as pool:
            rows = list(pool.map(_compare_row, specs, [persist] * len(specs), [directory] * len(specs)))
    else:
        rows = [_compare_row(spec, persist, directory) for spec in specs]
    return ComparisonTable(pd.DataFrame(rows))


def integrator_study(eps_list: Sequence[float], model: str = "gaussian", total_time: float = 5.0) -> pd.DataFrame:
    """Fitted global error order of every step map on one model.

    Starts from q = (1, ..., 1), p = 0 with unit masses.
    """
    eps = sorted({float(e) for e in eps_list}, reverse=True)
    if len(eps) < 4:
        raise ConfigurationError("eps", "need at least four distinct step sizes (three halvings)")
    if eps[-1] <= 0:
        raise ConfigurationError("eps", "step sizes must be positive")
    if not total_time > 0:
        raise ConfigurationError("total_time", "integration time must be positive")
    target = get_model(model)
    start = PhaseState(np.ones(target.dim), np.zeros(target.dim))
    m = MassMatrix.identity(target.dim)

    rows = []
    for method in INTEGRATORS:
        slope, drifts = convergence_order(target, start, total_time, eps, m, method)
        row: Dict[str, Any] = {
            "method": method,
            "expected_order": EXPECTED_ORDERS.get(method),
            "estimated_order": slope,
        }
        row.update({f"dH(eps={e:g})": d for e, d in zip(eps, drifts)})
        rows.append(row)
    return pd.DataFrame(rows)


def gradcheck(model_name: str, count: int = 100, h: float = FD_STEP) -> float:
    """Worst relative gradient error over ``count`` deterministic support points."""
    model = get_model(model_name)
    worst = max(check_gradient(model, q, h) for q in support_points(model.name, count))
    logger.info("gradcheck %s: max relative error %.3g over %d points", model.name, worst, count)
    return worst


def target_sample(spec: ExperimentSpec, size: int, burnin: int, lag: int) -> Trace:
    """Exactly ``size`` states after discarding ``burnin`` and keeping every ``lag``-th.

    Runs burnin + lag * size recorded iterations; the returned trace keeps
    the sampling time in ``meta['elapsed']``.
    """
    if size < 1:
        raise ConfigurationError("size", "sample size must be positive")
    if burnin < 0:
        raise ConfigurationError("burnin", "burn-in must be non-negative")
    if lag < 1:
        raise ConfigurationError("lag", "lag must be a positive integer")
    trace = sample(replace(spec, n=burnin + lag * size))
    return thin(trace, burnin, lag)


def preset_specs(name: str, **overrides) -> List[ExperimentSpec]:
    """Specs of a named preset; ``overrides`` (e.g. n, seed) apply to every entry."""
    specs = []
    for fields in preset_fields(name):
        fields.update({k: v for k, v in overrides.items() if v is not None})
        specs.append(ExperimentSpec.from_fields(fields))
    return specs
