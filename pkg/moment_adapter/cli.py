#!/usr/bin/env python3

# command line surface: verification suite, central values, moment tables,
# nonvanishing scans and character listings as CSV / JSON lines

from typing import List, Sequence, TextIO

import argparse
import logging
import sys
import traceback

from moment_functions import constants
from moment_functions.characters import enumerate_characters, even_primitive_characters
from moment_functions.errors import ConfigError, LMomentError
from moment_functions.lvalues import ResidueWeights, central_value_record, nonvanishing_scan
from moment_adapter.config_aux_functions import (
    COMMANDS, LOG_LEVELS, RunConfig, build_run_config, config_path, load_source,
    parse_moduli_list, read_config_file
)
from moment_adapter.identity_lab import run_suite
from moment_adapter.moments import moment_trend
from moment_adapter import report_aux_functions as reports

logger = logging.getLogger('lmoment')


def build_parser() -> argparse.ArgumentParser:
    """
    Argument parser with one subcommand per task. Every flag defaults to None
    so that values from a config file can be merged underneath.
    """
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--modulus', help='modulus as q1xq2, p or a plain semiprime')
    common.add_argument('--moduli', help='comma separated modulus specs')
    common.add_argument('--coeff', help='eisenstein:<t>, file:<path> or synthetic:<seed>')
    common.add_argument('--format', choices=(constants.FORMAT_CSV, constants.FORMAT_JSON))
    common.add_argument('--output', help='output file (stdout by default)')
    common.add_argument('--threads', type=int, help='worker threads')
    common.add_argument('--tolerance-exact', type=float, help='tolerance of exact identities')
    common.add_argument('--tolerance-quad', type=float, help='tolerance of quadrature identities')
    common.add_argument('--q-max', type=int, help='largest modulus of the verification suite')
    common.add_argument('--all', action='store_true', default=None, help='run the complete suite')
    common.add_argument('--threshold', type=float, help='nonvanishing threshold')
    common.add_argument('--config', help='key=value config file (default ${})'.format(constants.CONFIG_ENV_VAR))
    common.add_argument('--log-level', type=str.upper, choices=LOG_LEVELS)
    common.add_argument('--timing', action='store_true', default=None, help='report runtimes')
    common.add_argument('--tail-tolerance', type=float, help='AFE truncation tail tolerance')
    common.add_argument('--t-cut-cap', type=int, help='largest accepted AFE truncation')

    parser = argparse.ArgumentParser(
        prog='lmoment',
        description='First twisted moment of GL(2) x GL(1) L-functions over even primitive characters.'
    )
    subparsers = parser.add_subparsers(dest='command', required=True)
    descriptions = {
        'verify': 'run the identity verification suite',
        'lvalue': 'joint central values of every even primitive character',
        'moment': 'moment table over a list of moduli',
        'scan': 'even primitive characters with nonvanishing central value',
        'characters': 'list the characters of a modulus',
    }
    for command in COMMANDS:
        subparsers.add_parser(command, parents=[common], help=descriptions[command])
    return parser


def load_run_config(argv: Sequence[str]) -> RunConfig:
    """
    Parses command line and merges config file values under it.
    :raise ConfigError on bad values
    :raise SystemExit on argparse usage errors and --help
    """
    args = vars(build_parser().parse_args(list(argv)))
    command = args.pop('command')
    values = {}
    path = config_path(args.get('config'))
    if path:
        values.update(read_config_file(path))
    values.update({key: value for key, value in args.items() if value is not None})
    values.pop('config', None)
    return build_run_config(command, values)


def configure_logging(level: str):
    logging.basicConfig(
        stream=sys.stderr,
        level=getattr(logging, level),
        format='%(asctime)s %(levelname)s %(name)s: %(message)s',
        force=True
    )


# ---------------------------------------------------------------- commands


def run_verify(config: RunConfig, stream: TextIO) -> int:
    moduli = config.moduli
    if not moduli:
        moduli = (config.modulus,) if config.modulus else parse_moduli_list(
            [str(q) for q in constants.VERIFY_MODULI]
        )
    f = load_source(config.coeff_spec, logger=logger) if config.run_all else None
    results = run_suite(
        moduli, config.q_max,
        f=f,
        tolerance_exact=config.tolerance_exact,
        tolerance_quad=config.tolerance_quad,
        include_analytic=config.run_all,
        thread_count=config.thread_count,
        logger=logger
    )
    reports.write_records(
        [reports.verification_record(result) for result in results],
        constants.VERIFICATION_CSV_HEADER, config.output_format, stream
    )
    if all(result.passed for result in results):
        return constants.EXIT_OK
    return constants.EXIT_VERIFICATION_FAILED


def _residue_weights(config: RunConfig, f) -> ResidueWeights:
    return ResidueWeights(
        f, config.modulus,
        tail_tolerance=config.tail_tolerance,
        t_cut_cap=config.t_cut_cap,
        thread_count=config.thread_count,
        logger=logger
    )


def run_lvalue(config: RunConfig, stream: TextIO) -> int:
    f = load_source(config.coeff_spec, logger=logger)
    weights = _residue_weights(config, f)
    records = [
        reports.lvalue_record(central_value_record(f, chi, weights))
        for chi in even_primitive_characters(config.modulus)
    ]
    reports.write_records(records, constants.LVALUE_CSV_HEADER, config.output_format, stream)
    return constants.EXIT_OK


def run_moment(config: RunConfig, stream: TextIO) -> int:
    moduli = config.moduli
    if not moduli:
        moduli = (config.modulus,) if config.modulus else parse_moduli_list(
            [str(q) for q in constants.DEFAULT_MODULI]
        )
    f = load_source(config.coeff_spec, logger=logger)
    trend = moment_trend(
        f, moduli,
        thread_count=config.thread_count,
        tail_tolerance=config.tail_tolerance,
        t_cut_cap=config.t_cut_cap,
        logger=logger
    )
    if not trend.within_target:
        logger.warning(
            f'|ratio - 1| = {trend.final_deviation:.3g} at q={trend.rows[-1].q} above target {trend.target}'
        )
    reports.write_records(
        [reports.moment_record(row, config.timing) for row in trend.rows],
        constants.MOMENT_CSV_HEADER, config.output_format, stream
    )
    return constants.EXIT_OK


def run_scan(config: RunConfig, stream: TextIO) -> int:
    f = load_source(config.coeff_spec, logger=logger)
    hits = nonvanishing_scan(
        f, config.modulus, config.threshold,
        weights=_residue_weights(config, f),
        logger=logger
    )
    reports.write_records(reports.scan_records(hits), constants.SCAN_CSV_HEADER, config.output_format, stream)
    return constants.EXIT_OK


def run_characters(config: RunConfig, stream: TextIO) -> int:
    records = [reports.character_record(chi) for chi in enumerate_characters(config.modulus)]
    reports.write_records(records, constants.CHARACTER_CSV_HEADER, config.output_format, stream)
    return constants.EXIT_OK


HANDLERS = {
    'verify': run_verify,
    'lvalue': run_lvalue,
    'moment': run_moment,
    'scan': run_scan,
    'characters': run_characters,
}


def main(argv: List[str] = None) -> int:
    """
    Runs one command.
    :param argv: command line arguments without the program name
    :return: exit code (0 success, 1 failed verification, 2 usage error)
    """
    argv = sys.argv[1:] if argv is None else argv
    try:
        config = load_run_config(argv)
    except SystemExit as exit_request:
        return exit_request.code if isinstance(exit_request.code, int) else constants.EXIT_USAGE
    except ConfigError as error:
        sys.stderr.write('lmoment: error: {}\n'.format(error))
        build_parser().print_usage(sys.stderr)
        return constants.EXIT_USAGE

    configure_logging(config.log_level)
    logger.debug(f'Run configuration: {config}')
    try:
        if config.output:
            with open(config.output, 'w', newline='') as stream:
                return HANDLERS[config.command](config, stream)
        return HANDLERS[config.command](config, sys.stdout)
    except (LMomentError, OSError) as error:
        logger.error(f'{type(error).__name__}: {error}')
        logger.debug(traceback.format_exc())
        return constants.EXIT_USAGE
