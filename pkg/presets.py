# Experiment presets: the four comparative studies at desk scale.
# Each preset is a list of spec fields, one entry per sampler run; step sizes,
# trajectory lengths, proposal scales and starting points follow the studies,
# chain lengths are shortened so a preset finishes in minutes.
from typing import Any, Dict, List

from errors import ConfigurationError

PRESETS: Dict[str, List[Dict[str, Any]]] = {
    # Gamma(5,1) from far out in the tail
    "gamma": [
        {"model": "gamma51", "sampler": "hmc", "epsilon": 0.09, "steps": 47, "init": "500", "n": 20000},
        {"model": "gamma51", "sampler": "rwmh", "sigma": 5.0, "init": "500", "n": 20000},
        {"model": "gamma51", "sampler": "twalk", "init": "500", "init2": "501", "n": 20000},
    ],
    # trajectory length matched to RWMH (eps = sigma, L = lag): almost nothing accepted
    "gamma-degenerate": [
        {"model": "gamma51", "sampler": "hmc", "epsilon": 5.0, "steps": 6, "init": "500", "n": 5000},
    ],
    "binormal": [
        {"model": "binormal", "sampler": "hmc", "epsilon": 0.15, "steps": 35, "init": "-7,-7", "n": 50000},
        {"model": "binormal", "sampler": "rwmh", "sigma": 0.15, "record_every": 35, "init": "-7,-7", "n": 50000},
        {"model": "binormal", "sampler": "twalk", "record_every": 35, "init": "-7,-7", "init2": "-6.5,-6.5",
         "n": 50000},
    ],
    "mixture": [
        {"model": "mixture", "sampler": "hmc", "epsilon": 0.2, "steps": 30, "init": "-9,-9", "n": 5000},
        {"model": "mixture", "sampler": "rwmh", "sigma": 0.2, "record_every": 30, "init": "-9,-9", "n": 5000},
        # the walkers switch modes rarely; 6M iterations before the occupancy settles near 0.6
        {"model": "mixture", "sampler": "twalk", "record_every": 30, "init": "-9,-9", "init2": "-8,-8",
         "n": 200000},
    ],
    # second starting point, between the modes
    "mixture-center": [
        {"model": "mixture", "sampler": "hmc", "epsilon": 0.2, "steps": 30, "init": "2.5,2.5", "n": 5000},
        {"model": "mixture", "sampler": "rwmh", "sigma": 0.2, "record_every": 30, "init": "2.5,2.5", "n": 5000},
        {"model": "mixture", "sampler": "twalk", "record_every": 30, "init": "2.5,2.5", "init2": "3.5,3.5",
         "n": 200000},
    ],
    "eightschools": [
        {"model": "eightschools", "sampler": "hmc", "epsilon": 0.08, "steps": 60, "init": "2", "n": 50000},
        {"model": "eightschools", "sampler": "rwmh", "sigma": 0.32, "init": "2", "n": 50000},
        {"model": "eightschools", "sampler": "twalk", "init": "2", "init2": "3", "n": 50000},
    ],
}


def preset_fields(name: str) -> List[Dict[str, Any]]:
    key = name.strip().lower()
    if key not in PRESETS:
        raise ConfigurationError("preset", f"unknown preset {name!r}; choose one of {', '.join(sorted(PRESETS))}")
    return [dict(entry) for entry in PRESETS[key]]
