#!/usr/bin/env python3

# auxiliary functions for run configuration: modulus and coefficient specs,
# moduli lists and key=value config files

from dataclasses import dataclass
from typing import Dict, Optional, Tuple

import logging
import os
import re

from moment_functions import constants
from moment_functions.characters import Modulus
from moment_functions.coefficients import (
    HeckeCoefficients, eisenstein_series, load_coefficients, synthetic_coefficients
)
from moment_functions.errors import ConfigError, LMomentError

COMMANDS = ('verify', 'lvalue', 'moment', 'scan', 'characters')
LOG_LEVELS = ('DEBUG', 'INFO', 'WARNING', 'ERROR')
# flag names as keys of merged command line / config file values
FLAG_KEYS = frozenset((
    'modulus', 'moduli', 'coeff', 'format', 'output', 'threads', 'tolerance_exact', 'tolerance_quad',
    'q_max', 'all', 'threshold', 'config', 'log_level', 'timing', 'tail_tolerance', 't_cut_cap'
))

_MODULUS_SPEC = re.compile(r'^\s*(\d+)\s*(?:[xX*]\s*(\d+)\s*)?$')
_CONFIG_LINE = re.compile(r'^\s*([a-z][a-z0-9_-]*)\s*=\s*(.*?)\s*$')


def parse_modulus_spec(record: str) -> Modulus:
    """
    Parses modulus given as 'q1xq2', 'p' or a plain semiprime integer.
    Factors are normalized to q1 < q2.
    :param record: modulus spec as string
    :return: validated modulus
    :raise ConfigError when the record is malformed or the modulus unsupported
    """
    match = _MODULUS_SPEC.match(record or '')
    if not match:
        raise ConfigError('Bad modulus spec! Record: {}'.format(record))
    try:
        if match.group(2) is None:
            return Modulus(int(match.group(1)))
        return Modulus.from_primes(int(match.group(1)), int(match.group(2)))
    except LMomentError as error:
        raise ConfigError('Bad modulus spec! Record: {} ({})'.format(record, error))


def parse_moduli_list(record) -> Tuple[Modulus, ...]:
    """
    Parses comma separated list of modulus specs (or list of specs), sorted
    ascending by q, duplicates removed.
    :param record: csv string or list of specs
    :return: moduli
    :raise ConfigError on an empty list or a bad spec
    """
    if isinstance(record, str):
        record = record.split(',')
    moduli = {}
    for spec in record:
        spec = str(spec).strip()
        if not spec:
            continue
        modulus = parse_modulus_spec(spec)
        moduli[modulus.q] = modulus
    if not moduli:
        raise ConfigError('Empty moduli list! Record: {}'.format(record))
    return tuple(moduli[q] for q in sorted(moduli))


def parse_coeff_spec(record: str) -> Tuple[str, str]:
    """
    Splits coefficient spec 'eisenstein:<t>', 'file:<path>' or
    'synthetic:<seed>' into kind and argument, validating the argument.
    :param record: coefficient spec as string
    :return: (kind, argument)
    :raise ConfigError when the record is malformed
    """
    kind, separator, argument = (record or '').partition(':')
    kind = kind.strip().lower()
    argument = argument.strip()
    if not separator or not argument:
        raise ConfigError('Bad coefficient spec! Record: {}'.format(record))
    if kind == constants.SOURCE_EISENSTEIN:
        try:
            float(argument)
        except ValueError:
            raise ConfigError('Bad spectral parameter! Record: {}'.format(record))
    elif kind == constants.SOURCE_SYNTHETIC:
        if not argument.isdigit():
            raise ConfigError('Bad synthetic seed! Record: {}'.format(record))
    elif kind != constants.SOURCE_FILE:
        raise ConfigError('Unknown coefficient source! Record: {}'.format(record))
    return kind, argument


def load_source(
    record: str,
    logger: logging.Logger = logging.getLogger(__name__)
) -> HeckeCoefficients:
    """
    Builds coefficients from a coefficient spec.
    :param record: coefficient spec as string
    :param logger: logger instance to use for log messages
    :return: coefficients
    :raise ConfigError when the spec is malformed
    :raise CoefficientFileError when a coefficient file is malformed
    """
    kind, argument = parse_coeff_spec(record)
    if kind == constants.SOURCE_EISENSTEIN:
        return eisenstein_series(float(argument))
    if kind == constants.SOURCE_SYNTHETIC:
        return synthetic_coefficients(int(argument), constants.L_ONE_MIN_N)
    return load_coefficients(argument, logger=logger)


def read_config_file(path: str) -> Dict[str, str]:
    """
    Reads key=value config file. Blank lines and lines starting with '#' are
    skipped, keys are flag names without leading dashes.
    :param path: path to config file
    :return: dict of raw string values (dashes in keys replaced by underscores)
    :raise ConfigError when the file cannot be read or a line is malformed
    """
    try:
        with open(path, 'r') as config_file:
            lines = config_file.read().splitlines()
    except OSError as error:
        raise ConfigError('Cannot read config file {}: {}'.format(path, error))
    values = {}
    for line_number, line in enumerate(lines, start=1):
        if not line.strip() or line.lstrip().startswith('#'):
            continue
        match = _CONFIG_LINE.match(line)
        if not match:
            raise ConfigError('Bad config record in {}:{}: {}'.format(path, line_number, line))
        values[match.group(1).replace('-', '_')] = match.group(2)
    return values


def config_path(flag_value: Optional[str]) -> Optional[str]:
    """
    Config file from the flag, or from the environment when the flag is missing.
    """
    return flag_value or os.environ.get(constants.CONFIG_ENV_VAR) or None


def _to_int(key: str, value, minimum: int = None) -> int:
    try:
        number = int(value)
    except (TypeError, ValueError):
        raise ConfigError('Bad {} value! Record: {}'.format(key, value))
    if minimum is not None and number < minimum:
        raise ConfigError('{} must be at least {}! Record: {}'.format(key, minimum, value))
    return number


def _to_float(key: str, value, positive: bool = True) -> float:
    try:
        number = float(value)
    except (TypeError, ValueError):
        raise ConfigError('Bad {} value! Record: {}'.format(key, value))
    if positive and not number > 0:
        raise ConfigError('{} must be positive! Record: {}'.format(key, value))
    return number


def _to_bool(key: str, value) -> bool:
    if isinstance(value, bool):
        return value
    text = str(value).strip().lower()
    if text in ('1', 'true', 'yes', 'on'):
        return True
    if text in ('0', 'false', 'no', 'off', ''):
        return False
    raise ConfigError('Bad {} value! Record: {}'.format(key, value))


@dataclass(frozen=True)
class RunConfig:
    command: str
    modulus: Optional[Modulus] = None
    moduli: Tuple[Modulus, ...] = ()
    coeff_spec: str = constants.DEFAULT_COEFF_SPEC
    output: Optional[str] = None
    output_format: str = constants.FORMAT_CSV
    tolerance_exact: float = constants.EXACT_TOLERANCE
    tolerance_quad: float = constants.QUADRATURE_TOLERANCE
    thread_count: int = 1
    q_max: Optional[int] = None
    run_all: bool = False
    threshold: float = constants.NONVANISHING_THRESHOLD
    timing: bool = False
    tail_tolerance: float = constants.AFE_TAIL_TOLERANCE
    t_cut_cap: int = constants.T_CUT_CAP
    log_level: str = 'WARNING'


def build_run_config(command: str, values: Dict[str, object]) -> RunConfig:
    """
    Validates merged flag / config file values.
    :param command: subcommand name
    :param values: raw values keyed by flag name with underscores, None for
        values not given
    :return: run configuration
    :raise ConfigError on any invalid value or unknown key
    """
    if command not in COMMANDS:
        raise ConfigError('Unknown command: {}'.format(command))
    unknown = sorted(key for key in values if key not in FLAG_KEYS)
    if unknown:
        raise ConfigError('Unknown config keys: {}'.format(', '.join(unknown)))
    values = {key: value for key, value in values.items() if value is not None}

    settings = {'command': command}
    if 'modulus' in values:
        settings['modulus'] = (
            values['modulus'] if isinstance(values['modulus'], Modulus)
            else parse_modulus_spec(str(values['modulus']))
        )
    if 'moduli' in values:
        settings['moduli'] = parse_moduli_list(values['moduli'])
    if 'coeff' in values:
        spec = str(values['coeff'])
        parse_coeff_spec(spec)
        settings['coeff_spec'] = spec
    if 'output' in values:
        settings['output'] = str(values['output'])
    if 'format' in values:
        output_format = str(values['format']).lower()
        if output_format not in (constants.FORMAT_CSV, constants.FORMAT_JSON):
            raise ConfigError('Bad output format! Record: {}'.format(values['format']))
        settings['output_format'] = output_format
    if 'tolerance_exact' in values:
        settings['tolerance_exact'] = _to_float('tolerance-exact', values['tolerance_exact'])
    if 'tolerance_quad' in values:
        settings['tolerance_quad'] = _to_float('tolerance-quad', values['tolerance_quad'])
    if 'threads' in values:
        settings['thread_count'] = _to_int('threads', values['threads'], minimum=1)
    if 'q_max' in values:
        settings['q_max'] = _to_int('q-max', values['q_max'], minimum=3)
    if 'all' in values:
        settings['run_all'] = _to_bool('all', values['all'])
    if 'threshold' in values:
        settings['threshold'] = _to_float('threshold', values['threshold'])
    if 'timing' in values:
        settings['timing'] = _to_bool('timing', values['timing'])
    if 'tail_tolerance' in values:
        settings['tail_tolerance'] = _to_float('tail-tolerance', values['tail_tolerance'])
    if 't_cut_cap' in values:
        settings['t_cut_cap'] = _to_int('t-cut-cap', values['t_cut_cap'], minimum=1)
    if 'log_level' in values:
        level = str(values['log_level']).upper()
        if level not in LOG_LEVELS:
            raise ConfigError('Bad log level! Record: {}'.format(values['log_level']))
        settings['log_level'] = level

    config = RunConfig(**settings)
    if command in ('lvalue', 'scan', 'characters') and config.modulus is None:
        raise ConfigError('Command {} needs --modulus'.format(command))
    return config
