#!/usr/bin/env python3

# first twisted moment over the even primitive characters of a modulus:
# family sum, main term, S1/S2 decomposition and trend tables

from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import logging
import math
import time
import traceback

from moment_functions import constants
from moment_functions.characters import (
    Modulus, even_primitive_characters, family_B_matrix, family_D_matrix
)
from moment_functions.coefficients import HeckeCoefficients, l_one
from moment_functions.errors import DivergenceError, LMomentError
from moment_functions.lvalues import ResidueWeights
from moment_functions.numeric_aux_functions import compensated_sum

INFINITE_RATIO = complex(math.inf, 0.0)  # ratio sentinel when the main term vanishes


@dataclass(frozen=True)
class MomentReport:
    q: int
    q1: int
    q2: int
    family_sum: complex
    main_term: float
    ratio: complex
    s1: complex
    s2: complex
    num_characters: int
    runtime_ms: int

    @property
    def deviation(self) -> float:
        """
        |ratio - 1|, infinite for the sentinel ratio.
        """
        return abs(self.ratio - 1)


def _residue_weights(
    f: HeckeCoefficients,
    m: Modulus,
    weights: Optional[ResidueWeights],
    thread_count: int,
    logger: logging.Logger
) -> ResidueWeights:
    if weights is not None:
        return weights
    return ResidueWeights(f, m, thread_count=thread_count, logger=logger)


def family_sum(
    f: HeckeCoefficients,
    m: Modulus,
    weights: ResidueWeights = None,
    thread_count: int = 1,
    logger: logging.Logger = logging.getLogger(__name__)
) -> complex:
    """
    sum over even primitive chi of L(1/2, f x chi) conj(L(1/2, chi)), reduced
    in ascending chi_id order with compensated accumulation.
    :param f: coefficients of an automorphic source
    :param m: modulus
    :param weights: residue weights of (f, m), built when missing
    :param thread_count: threads of the divisor sweep
    :param logger: logger instance to use for log messages
    :return: family sum (0 for an empty family)
    """
    family = even_primitive_characters(m)
    if not family:
        return 0j
    weights = _residue_weights(f, m, weights, thread_count, logger)
    return compensated_sum(weights.products(family))


def main_term(f: HeckeCoefficients, m: Modulus) -> float:
    """
    phi(q)/2 (1 - lambda(q1)/q1 + 1/q1^2)(1 - lambda(q2)/q2 + 1/q2^2) L(1, f)
    for semiprime q, (q - 2)/2 L(1, f) for prime q.
    :raise DivergenceError when L(1, f) diverges
    """
    l_value = l_one(f).value
    if m.is_prime:
        return (m.q - 2) / 2 * l_value
    euler = 1.0
    for p in m.primes:
        euler *= 1 - f[p] / p + 1 / p ** 2
    return m.phi / 2 * euler * l_value


def s1_s2_decomposition(
    f: HeckeCoefficients,
    m: Modulus,
    formula: bool = False,
    weights: ResidueWeights = None,
    thread_count: int = 1,
    logger: logging.Logger = logging.getLogger(__name__)
) -> Tuple[complex, complex]:
    """
    First and dual AFE sums of the family with the character sums done first:
    S1 = sum W[n, m] B_q(m, n), S2 = q^{-1/2} sum W[n, m] D_q(m, n), over the
    truncation of the residue weights.
    :param f: coefficients
    :param m: modulus
    :param formula: use the closed forms of B_q and D_q instead of the
        character sums
    :param weights: residue weights of (f, m), built when missing
    :param thread_count: threads of the divisor sweep
    :param logger: logger instance to use for log messages
    :return: (S1, S2)
    """
    weights = _residue_weights(f, m, weights, thread_count, logger)
    residues = weights.matrix
    b_values = family_B_matrix(m, formula)
    d_values = family_D_matrix(m, formula)
    s1 = compensated_sum((residues * b_values.T).ravel())
    s2 = compensated_sum((residues * d_values.T).ravel()) / math.sqrt(m.q)
    return s1, s2


def _build_row(
    f: HeckeCoefficients,
    m: Modulus,
    thread_count: int,
    decomposition_tolerance: float,
    allow_divergent: bool,
    logger: logging.Logger,
    **horizon
) -> MomentReport:
    start = time.perf_counter()
    weights = ResidueWeights(f, m, thread_count=thread_count, logger=logger, **horizon)
    total = family_sum(f, m, weights)
    s1, s2 = s1_s2_decomposition(f, m, weights=weights)
    if abs(s1 + s2 - total) > decomposition_tolerance:
        raise LMomentError('S1 + S2 = {} differs from the family sum {} for q={}'.format(
            s1 + s2, total, m.q
        ))
    try:
        main = main_term(f, m)
    except DivergenceError as error:
        if not allow_divergent:
            raise
        logger.warning(f'Main term for q={m.q} diverges: {error}')
        logger.debug(traceback.format_exc())
        main = math.nan
    ratio = total / main if main != 0 and math.isfinite(main) else INFINITE_RATIO
    runtime_ms = int(round(1000 * (time.perf_counter() - start)))
    logger.info(f'Moment for q={m.q}: sum={total:.6g}, main term={main:.6g} ({runtime_ms} ms)')
    return MomentReport(
        q=m.q, q1=m.q1, q2=m.q2,
        family_sum=total, main_term=main, ratio=ratio,
        s1=s1, s2=s2,
        num_characters=len(even_primitive_characters(m)),
        runtime_ms=runtime_ms
    )


def moment_report(
    f: HeckeCoefficients,
    m: Modulus,
    thread_count: int = 1,
    decomposition_tolerance: float = constants.FILE_TOLERANCE,
    tail_tolerance: float = constants.AFE_TAIL_TOLERANCE,
    t_cut_cap: int = constants.T_CUT_CAP,
    logger: logging.Logger = logging.getLogger(__name__)
) -> MomentReport:
    """
    Complete moment row of one modulus. The residue weights are built once and
    shared by the family sum and the decomposition.
    :param f: coefficients
    :param m: modulus
    :param thread_count: threads of the divisor sweep
    :param decomposition_tolerance: accepted |S1 + S2 - family sum|
    :param tail_tolerance: tolerance of the AFE truncation tail
    :param t_cut_cap: largest accepted AFE truncation
    :param logger: logger instance to use for log messages
    :return: report
    :raise LMomentError when S1 + S2 differs from the family sum
    :raise DivergenceError when L(1, f) diverges
    """
    return _build_row(
        f, m, thread_count, decomposition_tolerance, False, logger,
        tail_tolerance=tail_tolerance, t_cut_cap=t_cut_cap
    )


@dataclass(frozen=True)
class MomentTrend:
    rows: Tuple[MomentReport, ...]
    target: float

    @property
    def first_deviation(self) -> float:
        return self.rows[0].deviation if self.rows else math.inf

    @property
    def final_deviation(self) -> float:
        return self.rows[-1].deviation if self.rows else math.inf

    @property
    def within_target(self) -> bool:
        """
        |ratio - 1| at the largest modulus is below the target.
        """
        return self.final_deviation <= self.target

    @property
    def improved(self) -> bool:
        return self.final_deviation < self.first_deviation


def moment_trend(
    f: HeckeCoefficients,
    moduli: Sequence[Modulus],
    target: float = constants.TREND_TARGET,
    thread_count: int = 1,
    tail_tolerance: float = constants.AFE_TAIL_TOLERANCE,
    t_cut_cap: int = constants.T_CUT_CAP,
    logger: logging.Logger = logging.getLogger(__name__)
) -> MomentTrend:
    """
    Moment rows for increasing moduli. A divergent main term does not stop
    the table: the row keeps its sums with main term NaN and the infinite
    ratio sentinel.
    :param f: coefficients
    :param moduli: moduli, sorted by q on output
    :param target: accepted |ratio - 1| at the largest modulus
    :param thread_count: threads of the divisor sweep
    :param tail_tolerance: tolerance of the AFE truncation tail
    :param t_cut_cap: largest accepted AFE truncation
    :param logger: logger instance to use for log messages
    :return: trend
    """
    rows = tuple(
        _build_row(
            f, m, thread_count, constants.FILE_TOLERANCE, True, logger,
            tail_tolerance=tail_tolerance, t_cut_cap=t_cut_cap
        )
        for m in sorted(moduli, key=lambda modulus: modulus.q)
    )
    trend = MomentTrend(rows, target)
    logger.info(
        f'Moment trend over {len(rows)} moduli: |ratio - 1| {trend.first_deviation:.3g} '
        f'-> {trend.final_deviation:.3g} (target {target})'
    )
    return trend
