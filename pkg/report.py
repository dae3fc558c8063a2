from typing import Any, Dict, Optional

import math
import pandas as pd

from diagnostics import DiagnosticsReport


def _fmt(value: Any) -> str:
    if value is None:
        return "n/a"
    if isinstance(value, float):
        if math.isnan(value):
            return "nan"
        return f"{value:.6g}"
    return str(value)


def format_report(report: DiagnosticsReport, title: Optional[str] = None) -> str:
    """Key-value text, one ``key = value`` per line."""
    lines = []
    if title:
        lines += [f"# {title}"]
    for key, value in report.as_dict().items():
        lines.append(f"{key} = {_fmt(value)}")
    return "\n".join(lines)


def format_summary(report: DiagnosticsReport) -> str:
    """Short human summary for the console."""
    lines = [
        f"📊 {report.model_name} / {report.sampler_name}  (n={report.n})",
        f"   acceptance rate: {report.acceptance_rate:.2%}",
        f"   burn-in: {report.burnin} | lag: {report.lag} | IAT(q{report.monitored + 1}): {report.iat:.4g}",
        f"   effective sample: {report.ess:.1f} | thinned sample: {report.thinned_size}",
    ]
    if report.elapsed is not None:
        lines.append(f"   sampling time: {report.elapsed:.2f}s | "
                     f"seconds per effective sample: {_fmt(report.seconds_per_effective_sample)}")
    for warning in report.warnings:
        lines.append(f"   ⚠ {warning}")
    lines.append("")
    lines.append(report.summary.to_string(float_format=lambda v: f"{v:.4f}"))
    return "\n".join(lines)


def format_table(df: pd.DataFrame) -> str:
    """Aligned text rendering of a comparison or order table."""
    if df.empty:
        return "(no rows)"
    return df.to_string(index=False, float_format=lambda v: f"{v:.6g}")


def report_row(report: DiagnosticsReport) -> Dict[str, Any]:
    """The comparison-table columns for one run."""
    effective_per_second = None
    if report.elapsed:
        effective_per_second = report.ess / report.elapsed
    return {
        "model": report.model_name,
        "sampler": report.sampler_name,
        "n": report.n,
        "burnin": report.burnin,
        "iat": report.iat,
        "acceptance_rate": report.acceptance_rate,
        "effective_sample": report.ess,
        "execution_time": report.elapsed,
        "seconds_per_effective_sample": report.seconds_per_effective_sample,
        "effective_per_second": effective_per_second,
    }
