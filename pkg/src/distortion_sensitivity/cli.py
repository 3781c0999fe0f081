"""``distsens`` command-line entry point.

Each subcommand runs one experiment. On success a short JSON summary (the
output directory and the files written) goes to stdout and the exit code is
0. On failure a JSON object describing the error goes to stderr and the exit
code is 2 for configuration or input problems and 1 for anything else.
"""
import argparse
import json
import sys

from . import __version__
from .config import EXPERIMENTS, default_config, load_config
from .errors import ConfigError, DistSensError, IngestionError
from .experiments import run
from .kernels import BACKEND


def build_parser():
    parser = argparse.ArgumentParser(prog="distsens", description="Local sensitivity of Bayesian posteriors to distortions.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    helps = {
        "converge": "sensitivity of the exponential rate over a grid of sample sizes",
        "model-select": "sensitivity tables for several DGPs and fitted models",
        "report": "sensitivity reports and plot data for a dataset",
        "sensitivity": "a single sensitivity estimate",
    }
    for name in EXPERIMENTS:
        p = sub.add_parser(name, help=helps[name])
        p.add_argument("--config", help="INI configuration file (defaults are used when omitted)")
        p.add_argument("--seed", type=int, help="master seed, overrides the config")
        p.add_argument("--out", help="output directory, overrides the config")
        p.add_argument("--data", help="dataset CSV, overrides [data] path")
    return parser


def _error_payload(exc):
    if isinstance(exc, DistSensError):
        return exc.to_dict()
    return {"error": type(exc).__name__, "message": str(exc)}


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config, args.command) if args.config else default_config(args.command)
        cfg = cfg.with_overrides(seed=args.seed, out=args.out)
        if args.data:
            from dataclasses import replace
            cfg = replace(cfg, data_path=args.data)
        result = run(cfg)
    except (ConfigError, IngestionError, DistSensError) as exc:
        print(json.dumps(_error_payload(exc)), file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001 - the CLI reports every failure as JSON
        print(json.dumps(_error_payload(exc)), file=sys.stderr)
        return 1
    print(json.dumps({"experiment": result.kind, "out": result.out_dir, "files": result.files,
                      "seed": cfg.seed, "backend": BACKEND}))
    return 0


if __name__ == "__main__":
    sys.exit(main())
