#!/usr/bin/env python3

# Hecke eigenvalues: coefficient sources, file ingestion, Hecke extension and
# the L(1, f) value needed by the main term

from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Dict, Optional, Sequence, Tuple

import logging
import math
import re

import numpy as np
from sympy import divisors, factorint, sieve

from moment_functions import constants
from moment_functions.errors import (
    CoefficientFileError, DivergenceError, DomainError, MissingCoefficientError
)
from moment_functions.numeric_aux_functions import e
from moment_functions.special_functions import gamma, riemann_zeta

_DECIMAL = re.compile(r'^[+-]?(\d+(\.\d*)?|\.\d+)([eE][+-]?\d+)?$')
_INTEGER = re.compile(r'^\d+$')
_SIEVE_BLOCK = 2 ** 20


class CoefficientSource(ABC):
    """
    Origin of a coefficient table. Describes how values beyond the stored
    horizon are obtained and which analytic properties the data has.
    """
    kind: str = None

    @property
    @abstractmethod
    def spec(self) -> str:
        """
        Source in the command line grammar (e.g. 'eisenstein:1').
        """

    @property
    def cuspidal(self) -> bool:
        """
        No polar main terms in L(s, f) and its additive twists.
        """
        return True

    @property
    def automorphic(self) -> bool:
        """
        L(s, f) has the functional equation of an even level 1 form.
        """
        return True

    @property
    def extendable(self) -> bool:
        """
        Values for any n can be generated directly.
        """
        return False

    def generate(self, n_max: int) -> np.ndarray:
        """
        Values lambda(0..n_max), lambda(0) = 0.
        :raise MissingCoefficientError when the source cannot generate values
        """
        raise MissingCoefficientError('Source {} cannot generate coefficients'.format(self.spec))


class EisensteinSource(CoefficientSource):
    """
    lambda(n) = sum_{ab=n} (a/b)^{it}, so that L(s, E_t x chi) = L(s+it, chi) L(s-it, chi).
    """
    kind = constants.SOURCE_EISENSTEIN

    def __init__(self, t: float):
        self.t = float(t)

    @property
    def spec(self) -> str:
        return '{}:{}'.format(self.kind, _format_real(self.t))

    @property
    def cuspidal(self) -> bool:
        return False

    @property
    def extendable(self) -> bool:
        return True

    def generate(self, n_max: int) -> np.ndarray:
        return eisenstein_coefficients(self.t, n_max)


class FileSource(CoefficientSource):
    kind = constants.SOURCE_FILE

    def __init__(self, path: str):
        self.path = path

    @property
    def spec(self) -> str:
        return '{}:{}'.format(self.kind, self.path)


class SyntheticSource(CoefficientSource):
    """
    Multiplicative coefficients with Sato - Tate distributed lambda(p). They
    satisfy the Hecke relations and |lambda(p)| <= 2 but belong to no
    automorphic form.
    """
    kind = constants.SOURCE_SYNTHETIC

    def __init__(self, seed: int):
        self.seed = int(seed)

    @property
    def spec(self) -> str:
        return '{}:{}'.format(self.kind, self.seed)

    @property
    def automorphic(self) -> bool:
        return False


def _format_real(value: float) -> str:
    return '{:g}'.format(value)


class HeckeCoefficients:
    """
    Normalized Hecke eigenvalues lambda(n) of a level 1 form (or of the
    Eisenstein oracle family) with spectral parameter t. Values up to n_max
    are stored in an array; values further out come from the source or from
    the Hecke relations.
    """
    def __init__(
        self,
        source: CoefficientSource,
        t: float,
        values: np.ndarray,
        theta_bound: float = constants.THETA_BOUND,
        precision: float = constants.EXACT_TOLERANCE,
        logger: logging.Logger = logging.getLogger(__name__)
    ):
        """
        Init
        :param source: origin of the data
        :param t: spectral parameter
        :param values: lambda(0..n_max); NaN marks unknown values
        :param theta_bound: Ramanujan exponent
        :param precision: accuracy of the stored values
        :param logger: logger instance to use for log messages
        :raise DomainError when t is not finite or values are too short
        """
        if not math.isfinite(t):
            raise DomainError('Spectral parameter must be finite, got {}'.format(t))
        values = np.asarray(values, dtype=float)
        if values.size < 2:
            raise DomainError('Coefficient table must contain lambda(1)')
        self.source = source
        self.t = float(t)
        self.theta_bound = theta_bound
        self.precision = precision
        self.logger = logger
        self.lambda_cache: Dict[int, float] = {}
        self.residuals: Optional[HeckeResidualReport] = None
        self._values = values.copy()
        self._values[0] = 0.0

    @property
    def n_max(self) -> int:
        return self._values.size - 1

    @property
    def kind(self) -> str:
        return self.source.kind

    @property
    def is_eisenstein(self) -> bool:
        return isinstance(self.source, EisensteinSource)

    def __getitem__(self, n: int) -> float:
        return hecke_extend(self, int(n))

    def known(self, n: int) -> Optional[float]:
        """
        Stored value of lambda(n) or None.
        """
        if 1 <= n <= self.n_max and not math.isnan(self._values[n]):
            return float(self._values[n])
        return self.lambda_cache.get(n)

    def values(self, limit: int) -> np.ndarray:
        """
        lambda(0..limit) as an array (lambda(0) = 0). Extends the table when
        needed.
        :param limit: largest index
        :return: read-only view on the table
        :raise MissingCoefficientError when a needed prime value is unknown
        """
        if limit > self.n_max:
            if self.source.extendable:
                self.logger.debug(f'Generating {self.source.spec} coefficients up to {limit}')
                self._values = self.source.generate(limit)
            else:
                extension = np.array([
                    hecke_extend(self, n) for n in range(self.n_max + 1, limit + 1)
                ])
                self._values = np.concatenate([self._values, extension])
        view = self._values[:limit + 1]
        missing = np.flatnonzero(np.isnan(view))
        for n in missing:
            self._values[n] = hecke_extend(self, int(n))
        view = self._values[:limit + 1]
        view.flags.writeable = False
        return view


def eisenstein_lambda(t: float, n: int) -> float:
    """
    sum over ab = n of cos(t log(a/b)); d(n) at t = 0.
    :raise DomainError when n < 1
    """
    if n < 1:
        raise DomainError('Coefficient index must be positive, got {}'.format(n))
    return math.fsum(math.cos(t * math.log(a * a / n)) for a in divisors(n))


def eisenstein_coefficients(t: float, n_max: int) -> np.ndarray:
    """
    Eisenstein coefficients lambda(0..n_max) by sieving over the smaller
    factor a <= sqrt(n) of every factorization n = ab.
    :param t: spectral parameter
    :param n_max: largest index
    :return: float array, exact divisor counts at t = 0
    """
    values = np.zeros(n_max + 1)
    for a in range(1, math.isqrt(n_max) + 1):
        values[a * a] += 1.0  # a == b
        b_stop = n_max // a + 1
        for start in range(a + 1, b_stop, _SIEVE_BLOCK):
            stop = min(start + _SIEVE_BLOCK, b_stop)
            # n = a b for b in [start, stop)
            products = values[a * start:a * (stop - 1) + 1:a]
            if t == 0:
                products += 2.0
            else:
                products += 2 * np.cos(t * np.log(a / np.arange(start, stop)))
    return values


def _primes_up_to(n: int) -> np.ndarray:
    if n < 2:
        return np.zeros(0, dtype=np.int64)
    return np.fromiter(sieve.primerange(2, n + 1), dtype=np.int64)


def _prime_power_values(lambda_p: float, p: int, limit: int) -> Dict[int, float]:
    """
    lambda(p^k) for p^k <= limit from lambda(p^{k+1}) = lambda(p) lambda(p^k) - lambda(p^{k-1}).
    """
    powers = {1: 1.0, p: lambda_p}
    previous, current, power = 1.0, lambda_p, p
    while power * p <= limit:
        previous, current = current, lambda_p * current - previous
        power *= p
        powers[power] = current
    return powers


def multiplicative_extension(prime_values: Dict[int, float], limit: int) -> np.ndarray:
    """
    Completely determines lambda(1..limit) from lambda(p) through the Hecke
    relations.
    :param prime_values: lambda(p) for every prime p <= limit
    :param limit: largest index
    :return: float array lambda(0..limit)
    :raise MissingCoefficientError when a prime value is missing
    """
    values = np.ones(limit + 1)
    values[0] = 0.0
    primes = _primes_up_to(limit)
    missing = [int(p) for p in primes if int(p) not in prime_values]
    if missing:
        raise MissingCoefficientError(
            'Missing lambda({}) needed up to n={}'.format(missing[0], limit), prime=missing[0]
        )
    root = math.isqrt(limit)
    for p in primes[primes <= root]:
        p = int(p)
        for power, value in _prime_power_values(prime_values[p], p, limit).items():
            if power == 1:
                continue
            index = np.arange(power, limit + 1, power)
            index = index[(index // power) % p != 0]
            values[index] *= value
    large = primes[primes > root]
    large_values = np.array([prime_values[int(p)] for p in large])
    for cofactor in range(1, limit // (root + 1) + 1):
        count = np.searchsorted(large, limit // cofactor, side='right')
        if count == 0:
            break
        values[large[:count] * cofactor] *= large_values[:count]
    return values


def hecke_extend(h: HeckeCoefficients, n: int) -> float:
    """
    lambda(n) from the stored table, the source, or the Hecke relations
    (multiplicativity across coprime factors and the prime power recursion).
    :param h: coefficients
    :param n: positive index
    :return: lambda(n)
    :raise MissingCoefficientError when lambda(p) is unknown for a prime p | n
    """
    if n < 1:
        raise DomainError('Coefficient index must be positive, got {}'.format(n))
    value = h.known(n)
    if value is not None:
        return value
    if isinstance(h.source, EisensteinSource):
        value = eisenstein_lambda(h.t, n)
    else:
        value = 1.0
        for p, k in factorint(n).items():
            power_value = h.known(p ** k)
            if power_value is None:
                lambda_p = h.known(p)
                if lambda_p is None:
                    raise MissingCoefficientError(
                        'Missing lambda({}) needed for lambda({})'.format(p, n), prime=p
                    )
                power_value = _prime_power_values(lambda_p, p, p ** k)[p ** k]
            value *= power_value
    h.lambda_cache[n] = value
    return value


def eisenstein_series(t: float, n_max: int = constants.L_ONE_MIN_N) -> HeckeCoefficients:
    """
    Coefficients of the Eisenstein oracle family with parameter t.
    """
    source = EisensteinSource(t)
    return HeckeCoefficients(source, t, source.generate(n_max))


def synthetic_coefficients(seed: int, n_max: int) -> HeckeCoefficients:
    """
    Cuspidal-style synthetic coefficients: lambda(p) = 2 cos(theta_p) with
    theta_p Sato - Tate distributed (2 cos(theta_p) / 2 ~ 2 Beta(3/2, 3/2) - 1),
    extended by the Hecke relations. Reproducible for a given (seed, n_max).
    :param seed: random seed
    :param n_max: largest index
    :return: coefficients with t = 0
    """
    primes = _primes_up_to(n_max)
    rng = np.random.default_rng(seed)
    lambda_p = 2 * (2 * rng.beta(1.5, 1.5, size=primes.size) - 1)
    values = multiplicative_extension(dict(zip(primes.tolist(), lambda_p.tolist())), n_max)
    return HeckeCoefficients(SyntheticSource(seed), 0.0, values)


def load_coefficients(
    path: str,
    logger: logging.Logger = logging.getLogger(__name__)
) -> HeckeCoefficients:
    """
    Reads a coefficient file: a header line 't <decimal>' followed by lines
    '<n> <decimal>' with n strictly increasing from 1. Lines starting with '#'
    are comments, LF and CRLF line ends are accepted.
    :param path: path to the file
    :param logger: logger instance to use for log messages
    :return: coefficients (unknown n inside the range are NaN until extended)
    :raise CoefficientFileError when the file does not follow the grammar
    """
    t = None
    entries: Dict[int, float] = {}
    last_n = 0
    try:
        with open(path, 'r', encoding='ascii', newline=None) as coefficient_file:
            lines = coefficient_file.read().split('\n')
    except (OSError, UnicodeDecodeError) as error:
        raise CoefficientFileError('Cannot read coefficient file: {}'.format(error), path)

    for line_number, raw_line in enumerate(lines, start=1):
        line = raw_line.rstrip('\r')
        if not line.strip() or line.lstrip().startswith('#'):
            continue
        tokens = line.split()
        if t is None:
            if len(tokens) != 2 or tokens[0] != 't' or not _DECIMAL.match(tokens[1]):
                raise CoefficientFileError(
                    'Bad header record (expected "t <decimal>"): {}'.format(line), path, line_number
                )
            t = float(tokens[1])
            continue
        if len(tokens) != 2 or not _INTEGER.match(tokens[0]) or not _DECIMAL.match(tokens[1]):
            raise CoefficientFileError('Bad coefficient record: {}'.format(line), path, line_number)
        n = int(tokens[0])
        if n <= last_n:
            raise CoefficientFileError(
                'Non-monotone index {} after {}'.format(n, last_n), path, line_number
            )
        if last_n == 0 and n != 1:
            raise CoefficientFileError('Missing n=1 record', path, line_number)
        entries[n] = float(tokens[1])
        last_n = n

    if t is None:
        raise CoefficientFileError('Missing "t <decimal>" header', path)
    if 1 not in entries:
        raise CoefficientFileError('Missing n=1 record', path)
    if abs(entries[1] - 1) > constants.FILE_TOLERANCE:
        raise CoefficientFileError('lambda(1) must be 1, got {}'.format(entries[1]), path)

    values = np.full(last_n + 1, np.nan)
    for n, value in entries.items():
        values[n] = value
    values[1] = 1.0
    coefficients = HeckeCoefficients(
        FileSource(path), t, values, precision=constants.FILE_TOLERANCE, logger=logger
    )
    report = hecke_residuals(coefficients, limit=last_n, fill=False)
    coefficients.residuals = report
    logger.info(f'Loaded {len(entries)} coefficients from {path} (t={t}, n_max={last_n})')
    if max(report.multiplicativity, report.prime_power) > coefficients.precision:
        logger.warning(
            f'Hecke relation residuals above file precision in {path}: '
            f'multiplicativity={report.multiplicativity:.3g}, prime power={report.prime_power:.3g}'
        )
    return coefficients


def save_coefficients(h: HeckeCoefficients, path: str, n_max: int = None):
    """
    Writes coefficients in the format read by load_coefficients.
    :param h: coefficients
    :param path: output path
    :param n_max: largest index to write (default: stored horizon)
    """
    n_max = h.n_max if n_max is None else n_max
    values = h.values(n_max)
    with open(path, 'w', encoding='ascii', newline='\n') as coefficient_file:
        coefficient_file.write('t {}\n'.format(repr(h.t)))
        for n in range(1, n_max + 1):
            coefficient_file.write('{} {}\n'.format(n, repr(float(values[n]))))


@dataclass(frozen=True)
class HeckeResidualReport:
    multiplicativity: float       # max |lambda(m) lambda(n) - lambda(mn)| over sampled coprime pairs
    prime_power: float            # max |lambda(p) lambda(p^k) - lambda(p^{k+1}) - lambda(p^{k-1})|
    ramanujan_violations: float   # fraction of n with |lambda(n)| > d(n) n^theta
    pairs_checked: int
    n_checked: int


def hecke_residuals(
    h: HeckeCoefficients,
    limit: int = None,
    pairs: int = 500,
    seed: int = 0,
    fill: bool = True
) -> HeckeResidualReport:
    """
    Residuals of the Hecke relations on the stored table.
    :param h: coefficients
    :param limit: largest n considered (default: stored horizon)
    :param pairs: number of random coprime pairs (m, n), mn <= limit
    :param seed: seed of the pair sampler
    :param fill: extend unknown values inside the range; when False they are
        skipped
    :return: residual report
    """
    limit = h.n_max if limit is None else limit
    if fill:
        values = h.values(limit)
    else:
        limit = min(limit, h.n_max)
        values = h._values[:limit + 1]

    def residual(expression: float) -> float:
        return 0.0 if math.isnan(expression) else abs(expression)

    multiplicativity = 0.0
    checked = 0
    rng = np.random.default_rng(seed)
    if limit >= 6:
        for _ in range(pairs * 20):
            if checked >= pairs:
                break
            m = int(rng.integers(2, limit // 2 + 1))
            if limit // m < 2:
                continue
            n = int(rng.integers(2, limit // m + 1))
            if math.gcd(m, n) != 1:
                continue
            multiplicativity = max(multiplicativity, residual(values[m] * values[n] - values[m * n]))
            checked += 1

    prime_power = 0.0
    for p in _primes_up_to(math.isqrt(limit)):
        p = int(p)
        previous, power = 1, p
        while power * p <= limit:
            prime_power = max(prime_power, residual(
                values[p] * values[power] - values[power * p] - values[previous]
            ))
            previous, power = power, power * p

    divisor_counts = eisenstein_coefficients(0.0, limit)[1:]
    magnitudes = np.abs(values[1:])
    bound = divisor_counts * np.arange(1, limit + 1) ** h.theta_bound
    known = ~np.isnan(magnitudes)
    violations = np.count_nonzero(magnitudes[known] > bound[known] * (1 + 1e-12))
    fraction = violations / max(1, np.count_nonzero(known))
    return HeckeResidualReport(multiplicativity, prime_power, fraction, checked, limit)


@dataclass(frozen=True)
class LOneEstimate:
    value: float
    error_estimate: float
    method: str


def smoothed_l_one(h: HeckeCoefficients, x: float, n_limit: int = None) -> float:
    """
    sum_{n <= n_limit} lambda(n) e^{-n/X} / n.
    """
    n_limit = h.n_max if n_limit is None else n_limit
    values = h.values(n_limit)[1:]
    n = np.arange(1, n_limit + 1)
    return math.fsum(values * np.exp(-n / x) / n)


def eisenstein_smoothing_correction(t: float, x: float) -> float:
    """
    Polar terms of the smoothed sum for the Eisenstein family,
    2 Re[zeta(1+2it) Gamma(it) X^{it}] - |zeta(it)|^2 / X.
    :raise DivergenceError when t = 0
    """
    if t == 0:
        raise DivergenceError('L(1,f) divergent for the t=0 Eisenstein series')
    oscillating = riemann_zeta(1 + 2j * t) * gamma(1j * t) * complex(x) ** (1j * t)
    return 2 * oscillating.real - abs(riemann_zeta(1j * t)) ** 2 / x


def eisenstein_l_one(t: float) -> float:
    """
    |zeta(1+it)|^2.
    :raise DivergenceError when t = 0
    """
    if t == 0:
        raise DivergenceError('L(1,f) divergent for the t=0 Eisenstein series')
    return abs(riemann_zeta(1 + 1j * t)) ** 2


def eisenstein_smoothing_deviations(f: HeckeCoefficients) -> Tuple[float, ...]:
    """
    |S(X) - polar terms - |zeta(1+it)|^2| for X = 10^4/20 and 10^4/10. The
    sums run to 40 X, past which e^{-n/X} is negligible.
    :raise DivergenceError when t = 0
    """
    value = eisenstein_l_one(f.t)
    deviations = []
    for divisor in constants.L_ONE_X_DIVISORS:
        x = constants.L_ONE_MIN_N / divisor
        smoothed = smoothed_l_one(f, x, int(40 * x)) - eisenstein_smoothing_correction(f.t, x)
        deviations.append(abs(smoothed - value))
    return tuple(deviations)


def l_one(f: HeckeCoefficients) -> LOneEstimate:
    """
    L(1, f) = sum lambda(n) / n.

    Eisenstein data (t != 0) uses the closed form |zeta(1+it)|^2; its error
    estimate is the largest deviation of the smoothed sums at X = 500 and
    X = 1000, corrected by their polar terms. Other data uses the smoothed
    sums at X = n_max/20 and n_max/10 extrapolated in 1/X, with the spread of
    the two as error estimate.
    :param f: coefficients
    :return: estimate of L(1, f)
    :raise DivergenceError for the t = 0 Eisenstein series
    :raise DomainError when fewer than 10^4 coefficients are available
    """
    if f.is_eisenstein:
        return LOneEstimate(
            eisenstein_l_one(f.t), max(eisenstein_smoothing_deviations(f)), 'closed-form'
        )

    if f.n_max < constants.L_ONE_MIN_N:
        raise DomainError('L(1,f) needs coefficients up to {}, have {}'.format(
            constants.L_ONE_MIN_N, f.n_max
        ))
    first, second = (
        smoothed_l_one(f, f.n_max / divisor) for divisor in constants.L_ONE_X_DIVISORS
    )
    # S(X) = L(1, f) - L(0, f) / X + O(X^-2), X doubles from first to second
    value = 2 * second - first
    spread = abs(second - first)
    if spread > constants.L_ONE_SPREAD_LIMIT:
        f.logger.warning(f'L(1,f) smoothing spread {spread:.3g} above {constants.L_ONE_SPREAD_LIMIT}')
    return LOneEstimate(value, spread, 'richardson')


@dataclass(frozen=True)
class ExpSumReport:
    n_list: Tuple[int, ...]
    ratios: Tuple[float, ...]             # sup over the alpha grid of |S(N, alpha)| / N^0.6
    alpha_zero_ratios: Tuple[float, ...]  # |S(N, 0)| / N^0.6
    growth_factor: float
    bounded: bool
    alpha_zero_flagged: bool              # expected non-cuspidal exception at alpha = 0
    worst_alpha: float


def exp_sum_bound_check(
    f: HeckeCoefficients,
    n_list: Sequence[int] = constants.EXP_SUM_N_LIST,
    grid_size: int = constants.EXP_SUM_GRID_SIZE
) -> ExpSumReport:
    """
    Uniform bound for sum_{n <= N} lambda(n) e(alpha n) in alpha: the sup over
    the alpha grid normalized by N^0.6 must not grow by more than the growth
    factor beyond the first N. alpha = 0 is part of the sup for cuspidal
    sources and reported separately (flagged, not failed) otherwise.
    :param f: coefficients
    :param n_list: increasing sums lengths
    :param grid_size: number of alpha grid points (k + omega) / grid_size
    :return: report
    """
    n_list = tuple(sorted(int(n) for n in n_list))
    n_top = n_list[-1]
    values = f.values(n_top)[1:]
    n = np.arange(1, n_top + 1)
    alphas = (np.arange(grid_size) + constants.EXP_SUM_GRID_OFFSET) / grid_size
    partial = np.cumsum(values * e(np.outer(alphas, n) % 1.0), axis=1)
    partial_zero = np.cumsum(values)

    ratios = []
    zero_ratios = []
    worst_alpha = 0.0
    worst = -1.0
    for length in n_list:
        magnitudes = np.abs(partial[:, length - 1])
        scale = length ** constants.EXP_SUM_EXPONENT
        zero_ratio = abs(partial_zero[length - 1]) / scale
        ratio = magnitudes.max() / scale
        if f.source.cuspidal:
            ratio = max(ratio, zero_ratio)
        if ratio > worst:
            worst = ratio
            worst_alpha = float(alphas[np.argmax(magnitudes)])
        ratios.append(float(ratio))
        zero_ratios.append(float(zero_ratio))

    limit = constants.EXP_SUM_GROWTH_FACTOR
    bounded = all(ratio <= limit * ratios[0] for ratio in ratios[1:])
    zero_flagged = not f.source.cuspidal and any(
        ratio > limit * zero_ratios[0] for ratio in zero_ratios[1:]
    )
    return ExpSumReport(
        n_list, tuple(ratios), tuple(zero_ratios), limit, bounded, zero_flagged, worst_alpha
    )
