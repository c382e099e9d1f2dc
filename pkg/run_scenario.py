#!/usr/bin/env python3
"""
Scenario runner: fit a dataset, tabulate the cos(psi) / gain / SNR laws, sweep
the ORWP handover rate or run the validation oracles.

Usage:
    python run_scenario.py fit data/session01.csv
    python run_scenario.py tabulate cospsi --config configs/axis_sweep.json
    python run_scenario.py orwp sweep --config configs/orwp.json --n-runs 1000
    python run_scenario.py validate --seed 7

Every run writes <name>.csv, <name>.meta.json and log.txt under the output
directory (--output-dir, else $LIFI_ORIENT_OUTPUT_DIR, else the config's
output_dir). Exit status: 0 success, 1 invalid input or failed oracle,
2 runtime or numerical failure.
"""
import argparse
import sys
import time
import traceback
from dataclasses import replace
from typing import List, Optional

from classes.errors import EmptySeries, InvalidConfig, NonMonotonicTimestamps, ParseError, ValidationError
from classes.run_config import RunConfig, Scenario, TableArtifact
from utils import oracles, tabulate
from utils.config import OUTPUT_DIR_ENV, load_config, resolve_output_dir
from utils.general import transcript

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_RUNTIME = 2

# faults in the config or the dataset, reported with EXIT_INVALID
INPUT_ERRORS = (ParseError, ValidationError, InvalidConfig, NonMonotonicTimestamps, EmptySeries)

_TABULATE_SCENARIOS = {
    "cospsi": Scenario.TABULATE_COSPSI,
    "gain": Scenario.TABULATE_GAIN,
    "snr": Scenario.TABULATE_SNR,
}


def run(cfg: RunConfig, show_progress: bool = True, only: Optional[List[str]] = None) -> TableArtifact:
    """Dispatch one scenario and return its table."""
    if cfg.scenario is Scenario.VALIDATE:
        results = oracles.run_validation(cfg, only=only)
        return oracles.validation_table(results, tabulate.provenance(cfg))
    if cfg.scenario is Scenario.ORWP_SWEEP:
        return tabulate.orwp_sweep_table(cfg, show_progress=show_progress)
    return tabulate.BUILDERS[cfg.scenario](cfg)


def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=str, default=None, help="JSON run configuration (defaults for anything missing)")
    common.add_argument(
        "--output-dir", type=str, default=None, help=f"Output directory (overrides ${OUTPUT_DIR_ENV} and the config)"
    )
    common.add_argument("--seed", type=int, default=None, help="Override the configured seed")
    common.add_argument("--quiet", action="store_true", help="Hide progress bars")

    parser = argparse.ArgumentParser(description="Device-orientation LiFi channel and mobility scenarios.")
    sub = parser.add_subparsers(dest="command", required=True)

    fit = sub.add_parser("fit", parents=[common], help="Fit Laplace and Gaussian theta models to an orientation CSV")
    fit.add_argument("csv", type=str, help="CSV with t_seconds,alpha_deg,beta_deg,gamma_deg")

    tab = sub.add_parser("tabulate", parents=[common], help="Tabulate the cos(psi), gain or SNR law")
    tab.add_argument("quantity", choices=sorted(_TABULATE_SCENARIOS), help="Which law to tabulate")

    orwp = sub.add_parser("orwp", parents=[common], help="ORWP handover-rate experiments")
    orwp.add_argument("action", choices=["sweep"], help="sweep: rate over room length, speed and mobility mode")
    orwp.add_argument("--n-runs", type=int, default=None, help="Trajectories per sweep point")

    val = sub.add_parser("validate", parents=[common], help="Run the oracle suite")
    val.add_argument("--n-runs", type=int, default=None, help="Trajectories per sweep point in the handover check")
    val.add_argument("--only", nargs="+", choices=list(oracles.ORACLES), default=None, help="Run only these oracle groups")
    return parser


def config_for(args: argparse.Namespace) -> RunConfig:
    cfg = load_config(args.config) if args.config else RunConfig()
    if args.command == "fit":
        cfg = replace(cfg, scenario=Scenario.FIT_DATASET, dataset=args.csv)
    elif args.command == "tabulate":
        cfg = replace(cfg, scenario=_TABULATE_SCENARIOS[args.quantity])
    elif args.command == "orwp":
        cfg = replace(cfg, scenario=Scenario.ORWP_SWEEP)
    else:
        cfg = replace(cfg, scenario=Scenario.VALIDATE)
    if args.seed is not None:
        cfg = replace(cfg, seed=args.seed)
    n_runs = getattr(args, "n_runs", None)
    if n_runs is not None:
        if n_runs < 1:
            raise ValidationError(f"--n-runs={n_runs}", "n_runs >= 1")
        cfg = replace(cfg, orwp=replace(cfg.orwp, n_runs=n_runs))
    return cfg


def main(argv: Optional[List[str]] = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        cfg = config_for(args)
    except INPUT_ERRORS as e:
        print(f"✗ Invalid configuration: {e}")
        return EXIT_INVALID

    output_dir = resolve_output_dir(cfg, args.output_dir)
    with transcript(output_dir):
        print(f"\nRunning {cfg.scenario.value} (seed={cfg.seed}) -> {output_dir}")
        start_time = time.time()
        try:
            artifact = run(cfg, show_progress=not args.quiet, only=getattr(args, "only", None))
            csv_path = artifact.write(output_dir)
        except INPUT_ERRORS as e:
            print(f"✗ {cfg.scenario.value}: {e}")
            return EXIT_INVALID
        except Exception as e:
            print(f"✗ {cfg.scenario.value} failed: {e}")
            traceback.print_exc()
            return EXIT_RUNTIME

        print(f"✓ Wrote {len(artifact.rows)} rows to {csv_path}")
        print(f"Time taken: {time.time() - start_time:.2f} seconds")
        if cfg.scenario is Scenario.VALIDATE:
            failed = [row[0] for row in artifact.rows if not row[3]]
            if failed:
                print(f"✗ {len(failed)} oracle check(s) failed: {', '.join(failed)}")
                return EXIT_INVALID
            print("✓ All oracle checks passed")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
