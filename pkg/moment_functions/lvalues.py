#!/usr/bin/env python3

# central values: the joint approximate functional equation for
# L(1/2, f x chi) conj(L(1/2, chi)), Dirichlet L-values through Hurwitz zeta
# and the Eisenstein factorization oracle

from dataclasses import dataclass
from functools import lru_cache
from typing import List, Sequence, Tuple

import logging
import math

import numpy as np

from moment_functions import constants
from moment_functions.characters import (
    DirichletCharacter, Modulus, character_matrix, even_primitive_characters, gauss_sum
)
from moment_functions.coefficients import HeckeCoefficients
from moment_functions.errors import CharacterError, DomainError, TruncationError
from moment_functions.numeric_aux_functions import ordered_map
from moment_functions.special_functions import (
    AFE_PLAN, AfeWeightTable, ContourPlan, afe_weight_evaluator, hurwitz_zeta
)

_SWEEP_BLOCK = 2 ** 20  # largest b-slice handled at once by the divisor sweep


# ---------------------------------------------------------------- Dirichlet L


@lru_cache(maxsize=256)
def _hurwitz_row(s: complex, q: int) -> np.ndarray:
    """
    Regularized zeta(s, a/q) for a = 0..q-1 (a = 0 stands for a = q).
    """
    row = np.array([hurwitz_zeta(s, a / q, regularized=True) for a in range(1, q + 1)])
    return np.roll(row, 1)


def dirichlet_central(chi: DirichletCharacter, s: complex) -> complex:
    """
    L(s, chi) = q^{-s} sum_{a=1}^{q} chi(a) zeta(s, a/q). The polar parts of
    the Hurwitz zeta values cancel because the character sums to zero.
    :param chi: non-principal character
    :param s: complex point with 0.3 <= Re s <= 1.7
    :return: L(s, chi)
    :raise CharacterError when chi is principal
    :raise DomainError when Re s is out of range
    """
    if chi.is_principal:
        raise CharacterError('L(s, chi) of a principal character is not supported')
    s = complex(s)
    if not 0.3 <= s.real <= 1.7:
        raise DomainError('Re s must lie in [0.3, 1.7], got {}'.format(s))
    q = chi.modulus.q
    row = _hurwitz_row(s, q)
    total = np.dot(chi.values, row)
    return complex(q ** -s * total)


def _check_family_member(chi: DirichletCharacter):
    if not chi.is_even or not chi.primitive:
        raise CharacterError('Character {} mod {} is not even primitive ({}, conductor {})'.format(
            chi.chi_id, chi.modulus.q, chi.parity, chi.conductor
        ))


def factorization_oracle(t: float, chi: DirichletCharacter) -> complex:
    """
    Eisenstein prediction L(1/2+it, chi) L(1/2-it, chi) conj(L(1/2, chi)) of
    the joint central value.
    :raise CharacterError when chi is principal, odd or imprimitive
    """
    if chi.is_principal:
        raise CharacterError('Factorization oracle needs a non-principal character')
    _check_family_member(chi)
    return (
        dirichlet_central(chi, 0.5 + 1j * t)
        * dirichlet_central(chi, 0.5 - 1j * t)
        * dirichlet_central(chi, 0.5).conjugate()
    )


# ---------------------------------------------------------------- AFE horizon


@dataclass(frozen=True)
class AfeHorizon:
    y_max: float
    t_cut: int
    tail_estimate: float


def _afe_scale(q: int) -> float:
    """
    c with y = c mn in V(pi^{3/2} mn / q^{3/2}).
    """
    return math.pi ** 1.5 / q ** 1.5


def _tail_bound(values: np.ndarray, y: np.ndarray, c: float) -> np.ndarray:
    ratio = y / c
    return np.abs(values) * np.sqrt(ratio) * (1 + np.log(ratio)) ** 2


def afe_horizon(
    q: int,
    t: float,
    plan: ContourPlan = AFE_PLAN,
    tail_tolerance: float = constants.AFE_TAIL_TOLERANCE,
    t_cut_cap: int = constants.T_CUT_CAP
) -> AfeHorizon:
    """
    Truncation of the AFE double sums at mn <= T_cut. y_max is the first point
    of the grid 2^{j/4} from which |V(y)| sqrt(y/c) (1 + log(y/c))^2 stays
    below the tolerance on [y_max, 8 y_max]; T_cut = ceil(y_max / c).
    :param q: modulus
    :param t: spectral parameter
    :param plan: contour plan of the weight
    :param tail_tolerance: tolerance of the tail bound
    :param t_cut_cap: largest accepted T_cut
    :return: horizon
    :raise TruncationError when no horizon below the cap exists
    """
    c = _afe_scale(q)
    weight = afe_weight_evaluator(float(t), plan)
    top = int(math.ceil(4 * math.log2(constants.AFE_HORIZON_Y_LIMIT)))
    grid = constants.AFE_HORIZON_GRID ** np.arange(0, top + 1)
    bounds = _tail_bound(weight(grid), grid, c)
    window = int(round(math.log(constants.AFE_HORIZON_WINDOW) / math.log(constants.AFE_HORIZON_GRID)))
    for j in range(grid.size - window):
        tail = bounds[j:j + window + 1].max()
        if tail < tail_tolerance:
            t_cut = int(math.ceil(grid[j] / c))
            if t_cut > t_cut_cap:
                raise TruncationError('AFE horizon {} for q={} exceeds the cap {}'.format(
                    t_cut, q, t_cut_cap
                ))
            return AfeHorizon(float(grid[j]), t_cut, float(tail))
    raise TruncationError('No AFE horizon with tail below {} for q={}, t={}'.format(
        tail_tolerance, q, t
    ))


# ---------------------------------------------------------------- residue weights


def _sweep_chunks(t_cut: int) -> List[Tuple[int, int]]:
    """
    Ranges [a_start, a_stop) of the smaller factor a = min(m, n) with about
    equal numbers of pairs (m, n), mn <= t_cut. Depends on t_cut only.
    """
    root = math.isqrt(t_cut)
    work = [2 * (t_cut // a - a) + 1 for a in range(1, root + 1)]
    target = max(1, sum(work) // constants.SWEEP_CHUNKS)
    chunks = []
    start, load = 1, 0
    for a, pairs in enumerate(work, start=1):
        load += pairs
        if load >= target:
            chunks.append((start, a + 1))
            start, load = a + 1, 0
    if start <= root:
        chunks.append((start, root + 1))
    return chunks


class ResidueWeights:
    """
    Joint AFE data of one (f, q) pair, shared by all characters mod q:

        W[r, s] = sum_{n = r, m = s mod q, mn <= T} lambda(n) V(c mn) / sqrt(mn).

    For every character the first AFE sum is A = sum chi(r) conj(chi(s)) W[r, s];
    lambda and V are real, so the dual sum is conj(A) and
    L(1/2, f x chi) conj(L(1/2, chi)) = A + tau(chi) / sqrt(q) conj(A).
    """
    def __init__(
        self,
        f: HeckeCoefficients,
        m: Modulus,
        plan: ContourPlan = AFE_PLAN,
        tail_tolerance: float = constants.AFE_TAIL_TOLERANCE,
        t_cut_cap: int = constants.T_CUT_CAP,
        t_cut: int = None,
        thread_count: int = 1,
        logger: logging.Logger = logging.getLogger(__name__)
    ):
        """
        Init
        :param f: coefficients of an automorphic source
        :param m: modulus
        :param plan: contour plan of the weight V
        :param tail_tolerance: tolerance of the truncation tail bound
        :param t_cut_cap: largest accepted truncation
        :param t_cut: explicit truncation (overrides the computed horizon)
        :param thread_count: number of threads of the divisor sweep
        :param logger: logger instance to use for log messages
        :raise DomainError when f has no functional equation
        :raise TruncationError when the horizon exceeds the cap
        :raise MissingCoefficientError when f does not reach the horizon
        """
        if not f.source.automorphic:
            raise DomainError('Coefficients {} have no functional equation'.format(f.source.spec))
        self.f = f
        self.modulus = m
        self.plan = plan
        self.logger = logger

        c = _afe_scale(m.q)
        weight = afe_weight_evaluator(f.t, plan)
        if t_cut is None:
            self.horizon = afe_horizon(m.q, f.t, plan, tail_tolerance, t_cut_cap)
        else:
            y = np.array([t_cut * c])
            self.horizon = AfeHorizon(float(y[0]), int(t_cut), float(_tail_bound(weight(y), y, c)[0]))
        t_cut = self.horizon.t_cut

        self.logger.info(
            f'Building residue weights for q={m.q}, {f.source.spec} (T={t_cut})'
        )
        self._lambda = f.values(t_cut)
        table = AfeWeightTable(weight, c, c * t_cut)
        scaled = np.zeros(t_cut + 1)
        for start in range(1, t_cut + 1, _SWEEP_BLOCK):
            k = np.arange(start, min(start + _SWEEP_BLOCK, t_cut + 1))
            scaled[k[0]:k[-1] + 1] = table(c * k) / np.sqrt(k)
        self._scaled_weight = scaled

        chunks = _sweep_chunks(t_cut)
        parts = ordered_map(self._sweep, chunks, thread_count, logger=self.logger)
        total = np.zeros((m.q, m.q))
        for part in parts:
            total += part
        self.matrix = total
        self.logger.debug(f'Residue weights for q={m.q} done ({len(chunks)} chunks)')

        del self._scaled_weight
        del self._lambda

    @property
    def truncation_n(self) -> int:
        return self.horizon.t_cut

    @property
    def tail_estimate(self) -> float:
        return self.horizon.tail_estimate

    def _sweep(self, chunk: Tuple[int, int]) -> np.ndarray:
        """
        Contribution of all pairs with min(m, n) in the chunk.
        """
        q = self.modulus.q
        t_cut = self.horizon.t_cut
        lam = self._lambda
        scaled = self._scaled_weight
        total = np.zeros((q, q))
        for a in range(*chunk):
            a_residue = a % q
            b_stop = t_cut // a + 1
            for start in range(a, b_stop, _SWEEP_BLOCK):
                stop = min(start + _SWEEP_BLOCK, b_stop)
                b_residue = np.arange(start, stop) % q
                # V(c a b) / sqrt(a b) for b in [start, stop)
                weights = scaled[a * start:a * (stop - 1) + 1:a]
                # m = a, n = b >= a
                total[:, a_residue] += np.bincount(
                    b_residue, weights=lam[start:stop] * weights, minlength=q
                )
                # n = a, m = b > a
                skip = 1 if start == a else 0
                total[a_residue, :] += lam[a] * np.bincount(
                    b_residue[skip:], weights=weights[skip:], minlength=q
                )
        return total

    def first_sums(self, chars: Sequence[DirichletCharacter]) -> np.ndarray:
        """
        sum_{mn <= T} lambda(n) chi(n) conj(chi(m)) V(c mn) / sqrt(mn) per character.
        """
        values = character_matrix(chars)
        return np.einsum('ir,rs,is->i', values, self.matrix, values.conj())

    def products(self, chars: Sequence[DirichletCharacter]) -> np.ndarray:
        """
        Joint central values L(1/2, f x chi) conj(L(1/2, chi)) per character.
        """
        for chi in chars:
            if chi.modulus != self.modulus:
                raise CharacterError('Character modulus {} differs from {}'.format(
                    chi.modulus.q, self.modulus.q
                ))
            _check_family_member(chi)
        first = self.first_sums(chars)
        taus = np.array([gauss_sum(chi) for chi in chars], dtype=complex)
        return first + taus / math.sqrt(self.modulus.q) * first.conj()

    def product(self, chi: DirichletCharacter) -> complex:
        return complex(self.products([chi])[0])


# ---------------------------------------------------------------- central values


@dataclass(frozen=True)
class CentralValueRecord:
    chi_id: int
    product_afe: complex
    l_chi: complex
    l_twist: complex
    truncation_n: int
    tail_estimate: float


def product_central(
    f: HeckeCoefficients,
    chi: DirichletCharacter,
    plan: ContourPlan = AFE_PLAN,
    weights: ResidueWeights = None
) -> complex:
    """
    L(1/2, f x chi) conj(L(1/2, chi)) by the joint approximate functional
    equation.
    :param f: coefficients
    :param chi: even primitive character
    :param plan: contour plan of the weight V
    :param weights: residue weights of (f, chi.modulus), built when missing
    :return: product of central values
    :raise CharacterError when chi is odd or imprimitive
    """
    _check_family_member(chi)
    if weights is None:
        weights = ResidueWeights(f, chi.modulus, plan)
    return weights.product(chi)


def twisted_central(
    f: HeckeCoefficients,
    chi: DirichletCharacter,
    product: complex = None,
    logger: logging.Logger = logging.getLogger(__name__)
) -> complex:
    """
    L(1/2, f x chi): exact through the factorization for Eisenstein data,
    otherwise product / conj(L(1/2, chi)), NaN when |L(1/2, chi)| is below
    the guard.
    """
    _check_family_member(chi)
    if f.is_eisenstein:
        return dirichlet_central(chi, 0.5 + 1j * f.t) * dirichlet_central(chi, 0.5 - 1j * f.t)
    if product is None:
        product = product_central(f, chi)
    l_chi = dirichlet_central(chi, 0.5)
    if abs(l_chi) < constants.L_CHI_GUARD:
        logger.warning(f'|L(1/2, chi)| below guard for chi_id={chi.chi_id} mod {chi.modulus.q}')
        return complex(math.nan, math.nan)
    return product / l_chi.conjugate()


def central_value_record(
    f: HeckeCoefficients,
    chi: DirichletCharacter,
    weights: ResidueWeights = None
) -> CentralValueRecord:
    """
    Joint central value of one character with both factors and truncation
    diagnostics.
    """
    _check_family_member(chi)
    if weights is None:
        weights = ResidueWeights(f, chi.modulus)
    product = weights.product(chi)
    return CentralValueRecord(
        chi_id=chi.chi_id,
        product_afe=product,
        l_chi=dirichlet_central(chi, 0.5),
        l_twist=twisted_central(f, chi, product),
        truncation_n=weights.truncation_n,
        tail_estimate=weights.tail_estimate
    )


def nonvanishing_scan(
    f: HeckeCoefficients,
    m: Modulus,
    threshold: float = constants.NONVANISHING_THRESHOLD,
    plan: ContourPlan = AFE_PLAN,
    thread_count: int = 1,
    weights: ResidueWeights = None,
    logger: logging.Logger = logging.getLogger(__name__)
) -> List[Tuple[int, float]]:
    """
    Even primitive characters mod q whose joint central value exceeds the
    threshold in absolute value.
    :param f: coefficients
    :param m: modulus
    :param threshold: positive threshold (may be infinite)
    :param plan: contour plan of the weight V
    :param thread_count: threads of the divisor sweep
    :param weights: precomputed residue weights
    :param logger: logger instance to use for log messages
    :return: (chi_id, |product|) sorted by decreasing |product|
    :raise DomainError when threshold <= 0
    """
    if not threshold > 0:
        raise DomainError('Threshold must be positive, got {}'.format(threshold))
    if weights is None:
        weights = ResidueWeights(f, m, plan, thread_count=thread_count, logger=logger)
    family = even_primitive_characters(m)
    magnitudes = np.abs(weights.products(family)) if family else np.zeros(0)
    hits = [
        (chi.chi_id, float(value)) for chi, value in zip(family, magnitudes) if value > threshold
    ]
    hits.sort(key=lambda hit: (-hit[1], hit[0]))
    if not hits:
        logger.warning(f'No even primitive character mod {m.q} above threshold {threshold}')
    return hits
