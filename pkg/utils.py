from typing import List, Optional, Union

import numpy as np

from errors import ConfigurationError


def parse_vector(s: Union[str, float, int, List[float], np.ndarray], field: str = "value") -> np.ndarray:
    # Accept "1, 2", "(1,2)", "[1 2]" or a bare scalar; always returns a 1-d float array
    if isinstance(s, (list, tuple, np.ndarray)):
        return np.atleast_1d(np.asarray(s, dtype=float))
    if isinstance(s, (int, float)):
        return np.array([float(s)])
    text = str(s).strip().strip("()[]")
    parts = [p for p in text.replace(";", ",").replace(" ", ",").split(",") if p]
    if not parts:
        raise ConfigurationError(field, "empty vector")
    try:
        return np.array([float(p) for p in parts])
    except ValueError:
        raise ConfigurationError(field, f"not a numeric vector: {s!r}")


def parse_auto_int(s: Union[str, int, None], field: str) -> Optional[int]:
    """Parse an integer setting that may also be "auto" (returned as None)."""
    if s is None:
        return None
    if isinstance(s, int):
        return s
    text = str(s).strip().lower()
    if text in ("auto", ""):
        return None
    try:
        return int(float(text))
    except ValueError:
        raise ConfigurationError(field, f"expected an integer or 'auto', got {s!r}")


def expand_vector(v: np.ndarray, dim: int, field: str) -> np.ndarray:
    # A single value stands for the same value in every coordinate, e.g. init = 2 for eight schools
    if v.size == 1 and dim > 1:
        return np.full(dim, float(v[0]))
    if v.size != dim:
        raise ConfigurationError(field, f"expected {dim} values, got {v.size}")
    return v.astype(float)
