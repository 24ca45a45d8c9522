#!/usr/bin/env python3
"""
Neuroevolution driving simulator
Main entry point: run, sweep and replay commands
"""

import argparse
import sys
from pathlib import Path
from typing import List, Optional

# Add project root to path
sys.path.insert(0, str(Path(__file__).parent))

import config
from handlers import replay_handler, run_handler, sweep_handler
from handlers.common import report_failure
from sim_logic.exceptions import ConfigParseError
from storage.experiment_config import parse_override_args, split_list
from utils.utils_logging import setup_logging


def _join(values) -> str:
    return ','.join(str(v) for v in values)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog='neuroevo',
        allow_abbrev=False,
        description='Evolve neural-network drivers on 2D tracks',
        epilog='Any config field can be overridden with a dotted flag, e.g. --ga.mutation-rate 0.1',
    )
    parser.add_argument('--log-level', default=None, help='Override LOG_LEVEL')
    commands = parser.add_subparsers(dest='command', required=True)

    def add_run_flags(sub: argparse.ArgumentParser) -> None:
        sub.add_argument('--config', help='Experiment config (JSON)')
        sub.add_argument('--track', help='Track file (JSON); overrides track_path')
        sub.add_argument('--out', help='Output directory; overrides out_dir')

    run = commands.add_parser('run', help='One seeded evolution run', allow_abbrev=False)
    add_run_flags(run)
    run.add_argument('--seed', type=int, help='64-bit unsigned seed')

    sweep = commands.add_parser('sweep', help='Layout x crossover x mutation x seed grid', allow_abbrev=False)
    add_run_flags(sweep)
    sweep.add_argument('--layouts', default=_join(config.SWEEP_GRID['layouts']))
    sweep.add_argument('--crossover-rates', default=_join(config.SWEEP_GRID['crossover_rates']))
    sweep.add_argument('--mutation-rates', default=_join(config.SWEEP_GRID['mutation_rates']))
    sweep.add_argument('--seeds', default=_join(config.SWEEP_GRID['seeds']))

    replay = commands.add_parser('replay', help='Re-simulate a best.replay file', allow_abbrev=False)
    replay.add_argument('replay_path')
    replay.add_argument('--track', required=True, help='Track the replay was recorded on')
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    """Parse arguments and dispatch; returns the process exit code"""
    parser = build_parser()
    args, extra = parser.parse_known_args(argv)
    setup_logging(level=args.log_level)

    if args.command == 'replay':
        if extra:
            parser.error(f"unrecognized arguments: {' '.join(extra)}")
        return replay_handler.replay_command(args.replay_path, args.track)

    try:
        overrides = parse_override_args(extra)
        if args.command == 'sweep':
            grid = dict(
                layouts=split_list(args.layouts, str),
                crossover_rates=split_list(args.crossover_rates, float),
                mutation_rates=split_list(args.mutation_rates, float),
                seeds=split_list(args.seeds, int),
            )
    except ConfigParseError as e:
        return report_failure(e)

    if args.command == 'run':
        return run_handler.run_command(args.config, args.track, args.seed, args.out, overrides)
    return sweep_handler.sweep_command(args.config, args.track, args.out, overrides, **grid)


if __name__ == '__main__':
    sys.exit(main())
