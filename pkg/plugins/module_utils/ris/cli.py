# -*- coding: utf-8 -*-
"""ris command line: one verb per experiment command."""

import argparse
import logging
import sys

from . import __version__, commands
from .config import ExperimentConfig
from .errors import RisError
from .psi import FrequencySweep
from .reporting import write_outputs

logger = logging.getLogger(__name__)

CONFIG_VERBS = {
    "synth-array": commands.synth_array,
    "steer": commands.steer,
    "optimize-topology": commands.optimize_topology,
    "independence": commands.independence,
}


def _add_config_verb(sub, name, help_text):
    p = sub.add_parser(name, help=help_text)
    p.add_argument("--config", required=True, help="experiment config JSON")
    p.add_argument("--seed", type=int, help="override the config seed")
    p.add_argument("--out", help="override the config output directory")
    return p


def build_parser():
    parser = argparse.ArgumentParser(prog="ris", description="Dual-band reconfigurable surface experiments.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    verbosity = parser.add_mutually_exclusive_group()
    verbosity.add_argument("-v", "--verbose", action="store_true", help="log progress at debug level")
    verbosity.add_argument("-q", "--quiet", action="store_true", help="log errors only")
    sub = parser.add_subparsers(dest="verb", required=True)

    _add_config_verb(sub, "synth-array", "synthesize a port network and export it")
    _add_config_verb(sub, "steer", "build steering codebooks for the configured targets")
    _add_config_verb(sub, "optimize-topology", "optimize the element geometry for phase entropy")
    _add_config_verb(sub, "independence", "check the mmWave pattern against every sub-6 state")

    p = sub.add_parser("psi", help="isolation sweep of one or more cascaded spiral inductors")
    p.add_argument("--circuit", action="append", required=True, help="circuit JSON; repeat to cascade")
    p.add_argument("--start", type=float, default=1e6, help="first frequency in Hz")
    p.add_argument("--stop", type=float, default=40e9, help="last frequency in Hz")
    p.add_argument("--points", type=int, default=4001)
    p.add_argument("--out", default=".")

    p = sub.add_parser("subtract", help="remove the background trace from a total trace")
    p.add_argument("--total", required=True)
    p.add_argument("--env", required=True)
    p.add_argument("--out", default=".")

    p = sub.add_parser("metrics", help="pattern metrics of a pattern CSV")
    p.add_argument("--pattern", required=True)
    p.add_argument("--cut-phi", type=float, default=0.0)
    p.add_argument("--out", default=".")
    return parser


def configure_logging(verbose=False, quiet=False):
    level = logging.DEBUG if verbose else logging.ERROR if quiet else logging.INFO
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)


def run(args):
    """Execute one parsed invocation; returns (output dir, CommandResult)."""
    if args.verb in CONFIG_VERBS:
        config = ExperimentConfig.from_file(args.config, seed=args.seed, output_dir=args.out)
        out_dir = args.out if args.out is not None else config.resolve(config.output_dir)
        return out_dir, CONFIG_VERBS[args.verb](config)
    if args.verb == "psi":
        sweep = FrequencySweep(args.start, args.stop, args.points)
        return args.out, commands.psi(commands.load_circuits(args.circuit), sweep)
    if args.verb == "subtract":
        return args.out, commands.subtract(args.total, args.env)
    return args.out, commands.metrics(args.pattern, args.cut_phi)


def main(argv=None):
    args = build_parser().parse_args(argv)
    configure_logging(args.verbose, args.quiet)
    try:
        out_dir, result = run(args)
        changed = write_outputs(out_dir, result.files)
    except RisError as e:
        print(f"error: {e}", file=sys.stderr)
        return e.exit_code
    logger.info("%s: %d of %d files changed in %s", args.verb, len(changed), len(result.files), out_dir)
    return 0


if __name__ == "__main__":
    sys.exit(main())
