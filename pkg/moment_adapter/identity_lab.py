#!/usr/bin/env python3

# brute-force verification of the finite identities and numerically checkable
# analytic statements behind the moment computation

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, List, Sequence, Tuple

import logging
import math

import numpy as np
from scipy import integrate

from moment_functions import constants
from moment_functions.characters import (
    Modulus, character_matrix, enumerate_characters, family_B_matrix, family_D_matrix,
    gauss_multiplicativity_check
)
from moment_functions.coefficients import (
    HeckeCoefficients, eisenstein_series, exp_sum_bound_check, synthetic_coefficients
)
from moment_functions.errors import DomainError
from moment_functions.numeric_aux_functions import e, mod_inverse, ordered_map
from moment_functions.special_functions import (
    BumpFunction, ContourPlan, STANDARD_BUMP, VORONOI_PLAN, VoronoiTable, mellin, riemann_zeta
)

# (c, d) pairs of the default Voronoi cases
VORONOI_CASES = ((1, 1), (5, 2), (7, 3))
VORONOI_N = 10.0

# (width, shift) of the Gaussians of the Poisson check
POISSON_CASES = ((1.0, 0.0), (1.0, 0.3), (2.5, 0.7), (0.6, 0.25))


@dataclass(frozen=True)
class VerificationReport:
    name: str
    cases_run: int
    max_abs_deviation: float
    tolerance: float
    passed: bool
    worst_case: str

    @classmethod
    def build(cls, name: str, cases_run: int, deviation: float, tolerance: float, worst_case: str):
        """
        Report whose verdict follows from the deviation (NaN never passes).
        """
        return cls(name, cases_run, float(deviation), tolerance, bool(deviation <= tolerance), worst_case)


class _Worst:
    """
    Tracks the largest deviation seen and where it happened.
    """
    def __init__(self):
        self.deviation = 0.0
        self.case = ''
        self.count = 0

    def update(self, deviation: float, case: str, count: int = 1):
        self.count += count
        if math.isnan(self.deviation):
            return
        if not deviation <= self.deviation:
            self.deviation = deviation
            self.case = case


def _moduli(q_values: Iterable) -> List[Modulus]:
    return [q if isinstance(q, Modulus) else Modulus(int(q)) for q in q_values]


# ---------------------------------------------------------------- finite identities


def verify_orthogonality(
    q_range: Iterable = constants.VERIFY_MODULI,
    tolerance: float = constants.ORTHOGONALITY_TOLERANCE
) -> VerificationReport:
    """
    sum over chi mod q of chi(a) conj(chi(b)) = phi(q) 1_{a = b, gcd(a, q) = 1}
    for all residues a, b.
    """
    worst = _Worst()
    for m in _moduli(q_range):
        values = character_matrix(enumerate_characters(m))
        sums = values.T @ values.conj()
        units = np.gcd(np.arange(m.q), m.q) == 1
        expected = np.diag(np.where(units, m.phi, 0)).astype(complex)
        deviation = np.abs(sums - expected)
        a, b = np.unravel_index(np.argmax(deviation), deviation.shape)
        worst.update(deviation[a, b], 'q={} a={} b={}'.format(m.q, a, b), deviation.size)
    return VerificationReport.build('orthogonality', worst.count, worst.deviation, tolerance, worst.case)


def _coprime_pairs(m: Modulus, ab_limit: int) -> Tuple[np.ndarray, np.ndarray]:
    numbers = np.arange(1, ab_limit + 1)
    numbers = numbers[np.gcd(numbers, m.q) == 1]
    a, b = np.meshgrid(numbers, numbers, indexing='ij')
    return a.ravel(), b.ravel()


def _verify_family_identity(name: str, matrix, q_list, ab_limit: int, tolerance: float) -> VerificationReport:
    worst = _Worst()
    for m in _moduli(q_list):
        a, b = _coprime_pairs(m, ab_limit)
        direct = matrix(m, formula=False)[a % m.q, b % m.q]
        closed = matrix(m, formula=True)[a % m.q, b % m.q]
        deviation = np.abs(direct - closed)
        if deviation.size == 0:
            continue
        k = int(np.argmax(deviation))
        worst.update(deviation[k], 'q={} a={} b={}'.format(m.q, a[k], b[k]), deviation.size)
    return VerificationReport.build(name, worst.count, worst.deviation, tolerance, worst.case)


def verify_B_identity(
    q_list: Iterable = constants.VERIFY_MODULI,
    ab_limit: int = constants.AB_LIMIT,
    tolerance: float = constants.EXACT_TOLERANCE
) -> VerificationReport:
    """
    Character sum B_q(a, b) against its closed form for all coprime a, b <= ab_limit.
    """
    return _verify_family_identity('B_identity', family_B_matrix, q_list, ab_limit, tolerance)


def verify_D_identity(
    q_list: Iterable = constants.VERIFY_MODULI,
    ab_limit: int = constants.AB_LIMIT,
    tolerance: float = constants.EXACT_TOLERANCE
) -> VerificationReport:
    """
    Gauss-sum weighted sum D_q(a, b) against its closed form for all coprime
    a, b <= ab_limit.
    """
    return _verify_family_identity('D_identity', family_D_matrix, q_list, ab_limit, tolerance)


def verify_gauss_mult(
    q_list: Iterable = constants.VERIFY_MODULI,
    tolerance: float = constants.EXACT_TOLERANCE
) -> VerificationReport:
    """
    tau(chi1 chi2) = chi1(q2) chi2(q1) tau(chi1) tau(chi2) over all primitive
    pairs of every semiprime modulus.
    """
    worst = _Worst()
    for m in _moduli(q_list):
        if m.is_prime:
            continue
        check = gauss_multiplicativity_check(m)
        worst.update(check.max_deviation, 'q={} pair={}'.format(m.q, check.worst_pair), check.pairs_checked)
    return VerificationReport.build('gauss_mult', worst.count, worst.deviation, tolerance, worst.case)


# ---------------------------------------------------------------- Voronoi


@lru_cache(maxsize=8)
def voronoi_table(psi: BumpFunction, t: float, sign: int, plan: ContourPlan) -> VoronoiTable:
    return VoronoiTable(psi, t, sign, plan)


def voronoi_polar_term(t: float, psi: BumpFunction, c: int, N: float) -> float:
    """
    Main term the Eisenstein series adds to the dual side of the Voronoi
    formula (the series is not cuspidal).
    """
    if t == 0:
        def integrand(u):
            return psi(u) * (math.log(N * u) + 2 * np.euler_gamma - 2 * math.log(c))
        x0, x1 = psi.support
        value, _ = integrate.quad(integrand, x0, x1, epsabs=1e-14, epsrel=1e-13, limit=400)
        return N / c * value
    it = 1j * t
    term = c ** (-1 - 2 * it) * riemann_zeta(1 + 2 * it) * N ** (1 + it) * mellin(psi, 1 + it)
    return 2 * term.real


def _dual_cut(tables: Sequence[VoronoiTable], tolerance: float) -> float:
    """
    Largest x on a logarithmic grid up to the cap where some |Psi| still
    exceeds the tolerance, doubled.
    """
    grid = np.geomspace(1e-2, constants.VORONOI_X_CAP, 400)
    above = np.zeros(grid.size, dtype=bool)
    for table in tables:
        above |= np.abs(table(grid)) > tolerance
    if not np.any(above):
        return grid[0]
    return min(constants.VORONOI_X_CAP, 2 * grid[np.flatnonzero(above)[-1]])


def voronoi_sides(
    f: HeckeCoefficients,
    psi: BumpFunction,
    c: int,
    d: int,
    N: float,
    plan: ContourPlan = VORONOI_PLAN,
    logger: logging.Logger = logging.getLogger(__name__)
) -> Tuple[complex, complex]:
    """
    Both sides of the Voronoi formula

        sum lambda(n) e(n inv(d) / c) psi(n / N)
            = c sum_{+-} sum lambda(n) / n e(+-n d / c) Psi^{+-}(n N / c^2) (+ polar term).

    :return: (left side, right side)
    :raise DomainError when c < 1 or gcd(c, d) != 1
    """
    if c < 1 or math.gcd(c, d) != 1:
        raise DomainError('Voronoi needs c >= 1 and gcd(c, d) = 1, got c={}, d={}'.format(c, d))
    d_inverse = mod_inverse(d, c) if c > 1 else 0
    x0, x1 = psi.support
    n = np.arange(max(1, math.ceil(N * x0)), math.floor(N * x1) + 1)
    lam = f.values(int(n[-1]))
    left = np.sum(lam[n] * e(n * d_inverse % c / c) * psi(n / N))

    tables = [voronoi_table(psi, f.t, sign, plan) for sign in (1, -1)]
    x_cut = _dual_cut(tables, constants.VORONOI_TERM_TOLERANCE)
    n_cap = max(1, int(x_cut * c * c / N))
    logger.debug(f'Voronoi c={c}, d={d}, N={N}: dual sum up to n={n_cap}')
    lam = f.values(n_cap)
    n = np.arange(1, n_cap + 1)
    x = n * N / (c * c)
    right = 0j
    for sign, table in zip((1, -1), tables):
        right += np.sum(lam[n] / n * e(sign * n * d % c / c) * table(x))
    right *= c
    if f.is_eisenstein:
        right += voronoi_polar_term(f.t, psi, c, N)
    return complex(left), complex(right)


def verify_voronoi(
    f: HeckeCoefficients,
    psi: BumpFunction = STANDARD_BUMP,
    c: int = 1,
    d: int = 1,
    N: float = VORONOI_N,
    plan: ContourPlan = VORONOI_PLAN,
    tolerance: float = constants.QUADRATURE_TOLERANCE,
    logger: logging.Logger = logging.getLogger(__name__)
) -> VerificationReport:
    """
    Voronoi summation for one (c, d, N): direct sum over the support of psi
    against the dual sum truncated where Psi^{+-} has decayed below the term
    tolerance.
    :raise DomainError when gcd(c, d) != 1
    :raise MissingCoefficientError when f does not reach the dual cut
    """
    left, right = voronoi_sides(f, psi, c, d, N, plan, logger)
    deviation = abs(left - right)
    case = 'c={} d={} N={} t={} step={} lhs={:.10g}'.format(c, d, N, f.t, plan.step, left)
    return VerificationReport.build('voronoi', 1, deviation, tolerance, case)


# ---------------------------------------------------------------- exponential sums, Poisson


def verify_exp_sum_bound(
    f: HeckeCoefficients,
    n_list: Sequence[int] = constants.EXP_SUM_N_LIST,
    grid_size: int = constants.EXP_SUM_GRID_SIZE
) -> VerificationReport:
    """
    Uniform exponential-sum bound as a report: the deviation is the largest
    growth of the normalized sup relative to the first length, the tolerance
    the accepted growth factor.
    """
    check = exp_sum_bound_check(f, n_list, grid_size)
    first = check.ratios[0]
    growth = max(ratio / first for ratio in check.ratios[1:]) if first > 0 else math.inf
    case = 'source={} N={} ratios={} worst_alpha={:.6f}'.format(
        f.source.spec, list(check.n_list), ['{:.4g}'.format(r) for r in check.ratios], check.worst_alpha
    )
    if check.alpha_zero_flagged:
        case += ' (alpha=0 grows: non-cuspidal exception)'
    return VerificationReport.build('exp_sum_bound', len(check.n_list) * grid_size, growth,
                                    check.growth_factor, case)


def poisson_sides(width: float, shift: float) -> Tuple[complex, complex]:
    """
    sum g(n) and sum g^(m) for g(x) = exp(-(x - shift)^2 / width^2), whose
    transform int g(x) e(-mx) dx is width sqrt(pi) exp(-pi^2 width^2 m^2) e(-m shift).
    """
    reach = int(math.ceil(10 * width)) + 2
    n = np.arange(math.floor(shift) - reach, math.ceil(shift) + reach + 1)
    left = math.fsum(np.exp(-((n - shift) / width) ** 2))
    dual_reach = int(math.ceil(3 / width)) + 2
    m = np.arange(-dual_reach, dual_reach + 1)
    terms = width * math.sqrt(math.pi) * np.exp(-(math.pi * width * m) ** 2) * e(-m * shift)
    right = complex(math.fsum(terms.real), math.fsum(terms.imag))
    return complex(left), right


def verify_poisson_sanity(
    cases: Sequence[Tuple[float, float]] = POISSON_CASES,
    tolerance: float = constants.POISSON_TOLERANCE
) -> VerificationReport:
    """
    Poisson summation for shifted Gaussians, fixing the e(x) = exp(2 pi i x)
    convention of every Fourier pair in the package.
    """
    worst = _Worst()
    for width, shift in cases:
        left, right = poisson_sides(width, shift)
        worst.update(abs(left - right), 'width={} shift={}'.format(width, shift))
    return VerificationReport.build('poisson_sanity', worst.count, worst.deviation, tolerance, worst.case)


# ---------------------------------------------------------------- suite


def run_suite(
    q_list: Iterable = constants.VERIFY_MODULI,
    q_max: int = None,
    ab_limit: int = constants.AB_LIMIT,
    f: HeckeCoefficients = None,
    tolerance_exact: float = constants.EXACT_TOLERANCE,
    tolerance_quad: float = constants.QUADRATURE_TOLERANCE,
    include_analytic: bool = True,
    thread_count: int = 1,
    logger: logging.Logger = logging.getLogger(__name__)
) -> List[VerificationReport]:
    """
    Runs the verifications with their default cases.
    :param q_list: moduli of the finite identities
    :param q_max: drop moduli above q_max
    :param ab_limit: bound of the identity arguments
    :param f: coefficients of the Voronoi cases (Eisenstein t = 1 when missing)
    :param tolerance_exact: tolerance of the algebraic identities
    :param tolerance_quad: tolerance of the quadrature-mediated identities
    :param include_analytic: also run the Poisson, exponential-sum and
        Voronoi checks (the finite identities only otherwise)
    :param thread_count: number of verifications run at once
    :param logger: logger instance to use for log messages
    :return: reports in fixed order
    """
    moduli = [m for m in _moduli(q_list) if q_max is None or m.q <= q_max]
    jobs = [
        lambda: verify_orthogonality(moduli),
        lambda: verify_B_identity(moduli, ab_limit, tolerance_exact),
        lambda: verify_D_identity(moduli, ab_limit, tolerance_exact),
        lambda: verify_gauss_mult(moduli, tolerance_exact),
    ]
    if include_analytic:
        if f is None:
            f = eisenstein_series(1.0)
        synthetic = synthetic_coefficients(constants.DEFAULT_SYNTHETIC_SEED, max(constants.EXP_SUM_N_LIST))
        jobs += [
            lambda: verify_poisson_sanity(),
            lambda: verify_exp_sum_bound(synthetic),
        ] + [
            (lambda c=c, d=d: verify_voronoi(
                f, STANDARD_BUMP, c, d, VORONOI_N, tolerance=tolerance_quad, logger=logger
            ))
            for c, d in VORONOI_CASES
        ]
    reports = ordered_map(lambda job: job(), jobs, thread_count, logger=logger)
    for report in reports:
        if report.passed:
            logger.info(f'{report.name}: passed ({report.cases_run} cases, max deviation {report.max_abs_deviation:.3g})')
        else:
            logger.error(
                f'{report.name}: FAILED, deviation {report.max_abs_deviation:.3g} above '
                f'{report.tolerance:.3g} at {report.worst_case}'
            )
    return reports
