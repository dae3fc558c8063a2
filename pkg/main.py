#!/usr/bin/env python3
"""
HMC Bench - Hamiltonian Monte Carlo toolkit and sampler benchmark
Command-line entry point that wires the harness into subcommands.

    python main.py run --preset gamma
    python main.py run --model binormal --sampler hmc --epsilon 0.15 --steps 35 --init=-7,-7 --n 5000
    python main.py compare --preset eightschools --workers 3
    python main.py integrators --eps 0.2,0.1,0.05,0.025
    python main.py gradcheck --model eightschools
    python main.py diagnose runs/gamma51_hmc_seed1.csv
    python main.py sample --spec gamma.txt --size 1000 --burnin 100 --lag 6
"""

import argparse
import logging
import sys
from pathlib import Path
from typing import List, Optional

# Add current directory to Python path
sys.path.append(str(Path(__file__).parent))

from config import APP_TITLE, LOG_LEVEL, OUTPUT_DIR
from errors import (
    ConfigurationError, DegenerateFitError, DegenerateSeriesError,
    NotConvergedError, OutOfSupportError,
)
from harness import (
    SPEC_KEYS, ExperimentSpec, analyse, compare, gradcheck, integrator_study,
    preset_specs, run, target_sample,
)
from presets import PRESETS
from report import format_summary, format_table
from storage import read_trace, write_frame, write_trace
from target_models import MODEL_NAMES
from utils import parse_auto_int, parse_vector

logger = logging.getLogger(__name__)

EXIT_OK, EXIT_CONFIG, EXIT_DIAGNOSTICS = 0, 1, 2
GRADCHECK_TOLERANCE = 1e-6


class BenchApp:
    """Console front end over the harness; every method returns an exit code."""

    def __init__(self, output_dir: Path = OUTPUT_DIR):
        self.output_dir = Path(output_dir)

    def run(self, specs: List[ExperimentSpec]) -> int:
        for spec in specs:
            print(f"\nRunning {spec.label} (n={spec.n}, seed={spec.seed})...")
            result = run(spec, directory=self.output_dir)
            print(format_summary(result.report))
            print(f"✓ Trace written to {result.paths['trace']}")
        return EXIT_OK

    def compare(self, specs: List[ExperimentSpec], workers: int, table_path: Path) -> int:
        print(f"\nComparing {len(specs)} runs...")
        table = compare(specs, workers=workers, directory=self.output_dir)
        print(table.to_text())
        table.to_csv(table_path)
        print(f"✓ Table written to {table_path}")
        failed = table.frame["error"].astype(bool).sum() if "error" in table.frame else 0
        if failed:
            print(f"⚠ {failed} run(s) failed; see the error column")
        return EXIT_OK

    def integrators(self, eps: List[float], model: str, total_time: float) -> int:
        df = integrator_study(eps, model, total_time)
        print(format_table(df))
        path = write_frame(df, self.output_dir / f"integrators_{model}.csv")
        print(f"✓ Order table written to {path}")
        return EXIT_OK

    def gradcheck(self, models: List[str], count: int) -> int:
        for name in models:
            worst = gradcheck(name, count)
            mark = "✓" if worst < GRADCHECK_TOLERANCE else "✗"
            print(f"{mark} {name}: max relative error {worst:.3e} over {count} points")
        return EXIT_OK

    def diagnose(self, path: Path, burnin: Optional[int], lag: Optional[int]) -> int:
        trace = read_trace(path)
        print(format_summary(analyse(trace, burnin, lag)))
        return EXIT_OK

    def sample(self, spec: ExperimentSpec, size: int, burnin: int, lag: int) -> int:
        trace = target_sample(spec, size, burnin, lag)
        path = write_trace(trace, spec.output_path(self.output_dir))
        print(f"✓ {trace.n} states ({burnin} + {lag}x{size} iterations, "
              f"{trace.elapsed:.2f}s) written to {path}")
        return EXIT_OK


def _add_spec_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--spec", help="key = value spec file; flags override its entries")
    parser.add_argument("--model", help=f"one of {', '.join(MODEL_NAMES)}")
    parser.add_argument("--sampler", help="hmc, rwmh or twalk")
    parser.add_argument("--epsilon", help="HMC step size")
    parser.add_argument("--steps", help="HMC leapfrog steps per trajectory")
    parser.add_argument("--sigma", help="RWMH proposal scale")
    parser.add_argument("--n", help="chain length (recorded states)")
    parser.add_argument("--seed")
    parser.add_argument("--burnin", help="integer or 'auto'")
    parser.add_argument("--lag", help="integer or 'auto'")
    parser.add_argument("--init", help="starting point, e.g. -7,-7 (use --init=-7,-7)")
    parser.add_argument("--init2", help="second t-walk starting point")
    parser.add_argument("--mass", help="diagonal mass matrix")
    parser.add_argument("--jitter", help="relative HMC step-size jitter in [0, 1)")
    parser.add_argument("--record-every", dest="record_every", help="keep every k-th iteration (rwmh, twalk)")
    parser.add_argument("--out", help="trace CSV path")


def _spec_from_args(args: argparse.Namespace) -> ExperimentSpec:
    fields = {key: getattr(args, key, None) for key in SPEC_KEYS}
    if args.spec:
        return ExperimentSpec.from_file(args.spec, **fields)
    return ExperimentSpec.from_fields(fields)


def _specs_from_args(args: argparse.Namespace) -> List[ExperimentSpec]:
    if getattr(args, "preset", None):
        return preset_specs(args.preset, n=args.n, seed=args.seed, burnin=args.burnin, lag=args.lag)
    return [_spec_from_args(args)]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(description=APP_TITLE)
    parser.add_argument("--output-dir", default=str(OUTPUT_DIR), help="default directory for traces and tables")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="sample, diagnose and persist one spec or preset")
    p.add_argument("--preset", choices=sorted(PRESETS))
    _add_spec_flags(p)

    p = sub.add_parser("compare", help="comparison table over a preset or several spec files")
    p.add_argument("--preset", choices=sorted(PRESETS))
    p.add_argument("--specs", nargs="+", default=[], help="spec files, one row each")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--table", help="CSV path of the comparison table")
    _add_spec_flags(p)

    p = sub.add_parser("integrators", help="fitted global error order of each step map")
    p.add_argument("--eps", default="0.2,0.1,0.05,0.025")
    p.add_argument("--model", default="gaussian")
    p.add_argument("--time", type=float, default=5.0, dest="total_time")

    p = sub.add_parser("gradcheck", help="analytic vs finite-difference gradients")
    p.add_argument("--model", help="model name (all models when omitted)")
    p.add_argument("--count", type=int, default=100)

    p = sub.add_parser("diagnose", help="diagnostics of an existing trace CSV")
    p.add_argument("trace")
    p.add_argument("--burnin", default="auto")
    p.add_argument("--lag", default="auto")

    p = sub.add_parser("sample", help="exactly SIZE states after burn-in and thinning")
    p.add_argument("--size", type=int, required=True)
    _add_spec_flags(p)
    return parser


def dispatch(args: argparse.Namespace) -> int:
    app = BenchApp(Path(args.output_dir))
    if args.command == "run":
        return app.run(_specs_from_args(args))
    if args.command == "compare":
        if args.specs:
            specs = [ExperimentSpec.from_file(path, n=args.n, seed=args.seed) for path in args.specs]
        else:
            specs = _specs_from_args(args)
        table_path = Path(args.table) if args.table else app.output_dir / f"compare_{args.preset or 'specs'}.csv"
        return app.compare(specs, args.workers, table_path)
    if args.command == "integrators":
        return app.integrators(list(parse_vector(args.eps, "eps")), args.model, args.total_time)
    if args.command == "gradcheck":
        models = [args.model] if args.model else [m for m in MODEL_NAMES if m != "gaussian"]
        return app.gradcheck(models, args.count)
    if args.command == "diagnose":
        return app.diagnose(Path(args.trace), parse_auto_int(args.burnin, "burnin"), parse_auto_int(args.lag, "lag"))
    if args.command == "sample":
        burnin = parse_auto_int(args.burnin, "burnin") or 0
        lag = parse_auto_int(args.lag, "lag") or 1
        args.burnin = args.lag = None
        return app.sample(_spec_from_args(args), args.size, burnin, lag)
    raise ConfigurationError("command", f"unknown command {args.command!r}")


def main(argv: Optional[List[str]] = None) -> int:
    """Main function for command-line usage."""
    logging.basicConfig(level=LOG_LEVEL, format="%(asctime)s %(levelname)s %(name)s: %(message)s")
    args = build_parser().parse_args(argv)
    try:
        return dispatch(args)
    except (ConfigurationError, OutOfSupportError) as e:
        print(f"✗ {e}")
        return EXIT_CONFIG
    except (NotConvergedError, DegenerateSeriesError, DegenerateFitError) as e:
        print(f"✗ {e}")
        return EXIT_DIAGNOSTICS
    except KeyboardInterrupt:
        print("\nInterrupted.")
        return 130


if __name__ == "__main__":
    sys.exit(main())
