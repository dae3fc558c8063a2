from __future__ import annotations

import json
import uuid
from dataclasses import asdict, dataclass, field
from datetime import datetime
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

import numpy as np
import pandas as pd

from config import OUTPUT_DIR
from errors import ConfigurationError
from samplers import Trace

PathLike = Union[str, Path]
FLOAT_FORMAT = "%.17g"   # lossless for 64-bit floats
RUNS_JSONL = "runs.jsonl"


@dataclass
class RunRecord:
    run_id: str
    created: str
    model: str
    sampler: str
    seed: int
    trace_path: str
    report_path: Optional[str] = None
    metrics: Dict[str, Any] = field(default_factory=dict)


def new_run_id() -> str:
    return str(uuid.uuid4())


def _meta_path(path: Path) -> Path:
    return path.with_suffix(".meta.json")


def _jsonable(value):
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (np.floating,)):
        return float(value)
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    return value


def trace_frame(trace: Trace) -> pd.DataFrame:
    columns: Dict[str, Any] = {"index": trace.index}
    for j in range(trace.dim):
        columns[f"q{j + 1}"] = trace.states[:, j]
    columns["log_density"] = trace.log_density
    columns["accepted"] = trace.accepted.astype(int)
    return pd.DataFrame(columns)


def write_trace(trace: Trace, path: PathLike) -> Path:
    """Trace CSV (index,q1..qd,log_density,accepted) plus a JSON sidecar with run metadata."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    trace_frame(trace).to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    sidecar = {
        "model_name": trace.model_name,
        "sampler_name": trace.sampler_name,
        "config": trace.config,
        "proposals": trace.proposals,
        "accepts": trace.accepts,
        "meta": trace.meta,
    }
    with open(_meta_path(path), "w", encoding="utf-8") as f:
        json.dump(_jsonable(sidecar), f, indent=2, sort_keys=True)
    return path


def read_trace(path: PathLike) -> Trace:
    path = Path(path)
    if not path.exists():
        raise ConfigurationError("trace", f"no such trace file: {path}")
    df = pd.read_csv(path, float_precision="round_trip")
    q_cols = [c for c in df.columns if c.startswith("q") and c[1:].isdigit()]
    missing = {"index", "log_density", "accepted"} - set(df.columns)
    if missing or not q_cols:
        raise ConfigurationError("trace", f"{path} is not a trace CSV (missing {sorted(missing) or 'q columns'})")

    sidecar: Dict[str, Any] = {}
    if _meta_path(path).exists():
        with open(_meta_path(path), "r", encoding="utf-8") as f:
            sidecar = json.load(f)
    return Trace(
        states=df[q_cols].to_numpy(dtype=float),
        log_density=df["log_density"].to_numpy(dtype=float),
        accepted=df["accepted"].to_numpy().astype(bool),
        model_name=sidecar.get("model_name", "unknown"),
        sampler_name=sidecar.get("sampler_name", "unknown"),
        config=sidecar.get("config", {}),
        index=df["index"].to_numpy(dtype=int),
        proposals=sidecar.get("proposals"),
        accepts=sidecar.get("accepts"),
        meta=sidecar.get("meta", {}),
    )


def write_frame(df: pd.DataFrame, path: PathLike) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    df.to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    return path


def write_text(text: str, path: PathLike) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(text if text.endswith("\n") else text + "\n")
    return path


def read_spec_file(path: PathLike) -> Dict[str, str]:
    """Parse a flat ``key = value`` file; '#' starts a comment."""
    path = Path(path)
    if not path.exists():
        raise ConfigurationError("spec", f"no such spec file: {path}")
    values: Dict[str, str] = {}
    with open(path, "r", encoding="utf-8") as f:
        for lineno, raw in enumerate(f, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigurationError("spec", f"{path}:{lineno}: expected 'key = value'")
            key, value = (part.strip() for part in line.split("=", 1))
            values[key.lower().replace("-", "_")] = value
    return values


class RunLog:
    """Append-only JSONL index of every persisted run."""

    def __init__(self, directory: PathLike = OUTPUT_DIR):
        self.path = Path(directory) / RUNS_JSONL
        self.path.parent.mkdir(parents=True, exist_ok=True)

    def append(self, record: RunRecord) -> None:
        with open(self.path, "a", encoding="utf-8") as f:
            f.write(json.dumps(_jsonable(asdict(record)), ensure_ascii=False) + "\n")

    def records(self) -> List[RunRecord]:
        if not self.path.exists():
            return []
        with open(self.path, "r", encoding="utf-8") as f:
            return [RunRecord(**json.loads(line)) for line in f if line.strip()]


def new_record(model: str, sampler: str, seed: int, trace_path: Path,
               report_path: Optional[Path] = None, metrics: Optional[Dict[str, Any]] = None) -> RunRecord:
    return RunRecord(
        run_id=new_run_id(),
        created=datetime.now().isoformat(timespec="seconds"),
        model=model,
        sampler=sampler,
        seed=seed,
        trace_path=str(trace_path),
        report_path=str(report_path) if report_path else None,
        metrics=metrics or {},
    )
