#!/usr/bin/env python3

# complex gamma, Hurwitz zeta, the approximate functional equation weight and
# the Voronoi kernel / transform pair evaluated along vertical lines

from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Tuple, Union

import logging
import math

import numpy as np
from scipy import integrate, interpolate, special

from moment_functions import constants
from moment_functions.errors import LMomentError, DomainError, PoleError
from moment_functions.numeric_aux_functions import trapezoid_weights

ArrayOrScalar = Union[complex, np.ndarray]

_BLOCK = 2 ** 20  # evaluation block for vectorized weights


@dataclass(frozen=True)
class ContourPlan:
    """
    Discretization of a vertical line Re s = sigma, |Im s| <= height, by the
    trapezoid rule with spacing step.
    """
    sigma: float
    height: float
    step: float

    def __post_init__(self):
        if not self.height > 0 or not self.step > 0:
            raise DomainError('Bad contour plan: {}'.format(self))
        if self.height / self.step < constants.MIN_NODES_PER_PLAN - 1e-9:
            raise DomainError('Contour plan too coarse (height / step < {}): {}'.format(
                constants.MIN_NODES_PER_PLAN, self
            ))

    @property
    def node_count(self) -> int:
        """
        Nodes on the half line 0 <= tau <= height.
        """
        return int(round(self.height / self.step)) + 1

    def with_step(self, step: float) -> 'ContourPlan':
        return ContourPlan(self.sigma, self.height, step)

    def with_sigma(self, sigma: float, height: float = None) -> 'ContourPlan':
        return ContourPlan(sigma, self.height if height is None else height, self.step)


AFE_PLAN = ContourPlan(constants.AFE_SIGMA, constants.AFE_HEIGHT, constants.AFE_STEP)
VORONOI_PLAN = ContourPlan(constants.VORONOI_SIGMA, constants.VORONOI_HEIGHT, constants.VORONOI_STEP)


def _standard_profile(u: np.ndarray) -> np.ndarray:
    inside = np.abs(u) < 1
    values = np.zeros_like(u, dtype=float)
    values[inside] = np.exp(1 - 1 / (1 - u[inside] ** 2))
    return values


@dataclass(frozen=True)
class BumpFunction:
    """
    Smooth test function supported on [x0, x1]: scale * profile(u) with u the
    affine map of [x0, x1] onto [-1, 1]. The default profile exp(1 - 1/(1-u^2))
    vanishes to all orders at the endpoints.
    """
    support: Tuple[float, float] = constants.BUMP_SUPPORT
    scale: float = 1.0
    profile: Callable[[np.ndarray], np.ndarray] = _standard_profile

    def __post_init__(self):
        x0, x1 = self.support
        if not 0 < x0 < x1:
            raise DomainError('Bad bump support: {}'.format(self.support))

    def __call__(self, x):
        x0, x1 = self.support
        x = np.asarray(x, dtype=float)
        u = np.atleast_1d((2 * x - x0 - x1) / (x1 - x0))
        values = self.scale * self.profile(u)
        return float(values[0]) if x.ndim == 0 else values.reshape(x.shape)

    def scaled(self, factor: float) -> 'BumpFunction':
        return BumpFunction(self.support, self.scale * factor, self.profile)


STANDARD_BUMP = BumpFunction()


# ---------------------------------------------------------------- gamma


def _near_pole(z: np.ndarray, guard: float = constants.POLE_GUARD) -> np.ndarray:
    nearest = np.round(z.real)
    return (nearest <= 0) & (np.abs(z - nearest) < guard)


def log_gamma(z: ArrayOrScalar) -> ArrayOrScalar:
    """
    Principal branch of log Gamma(z).
    :param z: complex argument or array of arguments
    :return: log Gamma(z)
    :raise PoleError when an argument is within the guard radius of a
        non-positive integer
    """
    values = np.asarray(z, dtype=complex)
    poles = _near_pole(values)
    if np.any(poles):
        raise PoleError(
            'Gamma argument at a pole: {}'.format(values[poles].flat[0]),
            z=complex(values[poles].flat[0])
        )
    result = special.loggamma(values)
    return complex(result) if result.ndim == 0 else result


def gamma(z: ArrayOrScalar) -> ArrayOrScalar:
    return np.exp(log_gamma(z))


def _log_reciprocal_gamma(z: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """
    -log Gamma(z) where finite, plus a mask of arguments at poles (where
    1 / Gamma vanishes).
    """
    poles = _near_pole(z)
    safe = np.where(poles, 1.0, z)
    return -special.loggamma(safe), poles


# ---------------------------------------------------------------- zeta


@lru_cache(maxsize=1)
def _bernoulli_terms() -> np.ndarray:
    numbers = special.bernoulli(constants.HURWITZ_BERNOULLI_ORDER)
    return np.array([
        numbers[2 * k] / math.factorial(2 * k)
        for k in range(1, constants.HURWITZ_BERNOULLI_ORDER // 2 + 1)
    ])


def hurwitz_zeta(s: complex, a: float, regularized: bool = False) -> complex:
    """
    Hurwitz zeta function by Euler - Maclaurin summation.
    :param s: complex argument
    :param a: shift, a > 0
    :param regularized: drop the polar part 1 / (s - 1), which makes the
        function entire
    :return: zeta(s, a), or zeta(s, a) - 1 / (s - 1) when regularized
    :raise PoleError at s = 1 when not regularized
    :raise DomainError when a <= 0
    """
    s = complex(s)
    if not a > 0:
        raise DomainError('Hurwitz zeta shift must be positive, got {}'.format(a))
    if s == 1 and not regularized:
        raise PoleError('Hurwitz zeta has a pole at s = 1', z=s)

    n_terms = constants.HURWITZ_TERMS
    x = n_terms + a
    log_x = math.log(x)
    direct = np.sum(np.power(np.arange(n_terms) + a, -s))

    if regularized:
        z = (1 - s) * log_x
        polar = -log_x if z == 0 else -log_x * special.expm1(z) / z
    else:
        polar = x ** (1 - s) / (s - 1)

    correction = 0.5 * x ** (-s)
    rising = s  # s (s + 1) ... (s + 2k - 2)
    for k, coefficient in enumerate(_bernoulli_terms(), start=1):
        correction += coefficient * rising * x ** (-s - 2 * k + 1)
        rising *= (s + 2 * k - 1) * (s + 2 * k)
    return complex(direct + polar + correction)


def riemann_zeta(s: complex) -> complex:
    """
    :raise PoleError at s = 1
    """
    return hurwitz_zeta(s, 1.0)


# ---------------------------------------------------------------- AFE weight


class AfeWeight:
    """
    Vectorized weight of the joint approximate functional equation

        V(y) = 1/(2 pi i) int_(sigma) y^-u H(u) e^{u^2} du / u,

    H(u) being the gamma quotient of L(1/2 + u, f x chi) L(1/2 + u, chi) for
    an even form of spectral parameter t and an even character. The trapezoid
    sum on the line is a polynomial in exp(-i step log y) and is evaluated by
    Horner's rule.
    """
    def __init__(
        self,
        t: float,
        plan: ContourPlan = AFE_PLAN,
        logger: logging.Logger = logging.getLogger(__name__)
    ):
        """
        Init
        :param t: spectral parameter
        :param plan: contour plan, sigma > 0
        :param logger: logger instance to use for log messages
        :raise DomainError when plan.sigma <= 0
        """
        if not plan.sigma > 0:
            raise DomainError('AFE contour must lie right of 0, got sigma={}'.format(plan.sigma))
        self.t = float(t)
        self.plan = plan
        self.logger = logger

        tau = np.arange(plan.node_count) * plan.step
        integrand = self._line_values(tau)
        weights = trapezoid_weights(tau.size)
        self._tau = tau
        self._weights = weights
        # coefficients of the half-line polynomial, V = step/pi y^-sigma Re P(z)
        self._horner = (weights * integrand)[::-1].copy()
        self.logger.debug(f'AFE weight ready for t={self.t} ({tau.size} nodes)')

    def _line_values(self, tau: np.ndarray) -> np.ndarray:
        """
        H(u) e^{u^2} / u at u = sigma + i tau.
        """
        u = self.plan.sigma + 1j * tau
        it = 1j * self.t
        log_h = (
            special.loggamma((1 + 2 * u + 2 * it) / 4)
            + special.loggamma((1 + 2 * u - 2 * it) / 4)
            + special.loggamma((1 + 2 * u) / 4)
            - special.loggamma((1 + 2 * it) / 4)
            - special.loggamma((1 - 2 * it) / 4)
            - special.loggamma(0.25)
        )
        return np.exp(log_h + u * u) / u

    def __call__(self, y):
        """
        :param y: positive real or array of positive reals
        :return: V(y)
        :raise DomainError when any y <= 0
        """
        y = np.asarray(y, dtype=float)
        if np.any(~(y > 0)):
            raise DomainError('AFE weight needs y > 0')
        flat = y.ravel()
        result = np.empty(flat.size)
        for start in range(0, flat.size, _BLOCK):
            log_y = np.log(flat[start:start + _BLOCK])
            result[start:start + _BLOCK] = self.scale(log_y) * self.line_sum(log_y)
        return float(result[0]) if y.ndim == 0 else result.reshape(y.shape)

    def line_sum(self, log_y: np.ndarray) -> np.ndarray:
        """
        Re P(exp(-i step log y)), the band-limited factor of V(y).
        """
        z = np.exp(-1j * self.plan.step * np.asarray(log_y, dtype=float))
        return np.polyval(self._horner, z).real

    def scale(self, log_y: np.ndarray) -> np.ndarray:
        """
        step/pi y^-sigma, so that V(y) = scale(log y) * line_sum(log y).
        """
        return self.plan.step / np.pi * np.exp(-self.plan.sigma * np.asarray(log_y, dtype=float))

    def complex_value(self, y: float) -> complex:
        """
        Full-line trapezoid sum of the contour integral, including the
        imaginary residue that cancels in exact arithmetic.
        """
        if not y > 0:
            raise DomainError('AFE weight needs y > 0, got {}'.format(y))
        tau = np.concatenate([-self._tau[:0:-1], self._tau])
        weights = np.concatenate([self._weights[:0:-1], self._weights])
        weights[self._tau.size - 1] = 1.0  # tau = 0 is interior on the full line
        log_y = math.log(y)
        terms = weights * self._line_values(tau) * np.exp(-1j * tau * log_y)
        total = complex(math.fsum(terms.real), math.fsum(terms.imag))
        return self.plan.step / (2 * np.pi) * y ** -self.plan.sigma * total


@lru_cache(maxsize=32)
def afe_weight_evaluator(t: float, plan: ContourPlan = AFE_PLAN) -> AfeWeight:
    return AfeWeight(t, plan)


class AfeWeightTable:
    """
    V on [y_min, y_max] through a cubic spline of the line sum in log y. The
    line sum is band-limited (frequencies |tau| <= plan.height, Gaussian
    weights) and the exact factor y^-sigma multiplies the interpolant, so the
    error is O(h^4 y^-sigma) for log spacing h.
    """
    def __init__(
        self,
        weight: AfeWeight,
        y_min: float,
        y_max: float,
        spacing: float = constants.AFE_TABLE_SPACING
    ):
        """
        Init
        :param weight: exact weight evaluator
        :param y_min: smallest tabulated argument
        :param y_max: largest tabulated argument
        :param spacing: grid spacing in log y
        :raise DomainError on an empty range or a bad spacing
        """
        if not 0 < y_min <= y_max or not spacing > 0:
            raise DomainError('Bad AFE table range [{}, {}] (spacing {})'.format(y_min, y_max, spacing))
        self.weight = weight
        self.log_min = math.log(y_min) - spacing
        self.log_max = math.log(y_max) + spacing
        count = int(math.ceil((self.log_max - self.log_min) / spacing)) + 1
        grid = self.log_min + spacing * np.arange(count)
        self._spline = interpolate.CubicSpline(grid, weight.line_sum(grid))

    def __call__(self, y: np.ndarray) -> np.ndarray:
        """
        :param y: array of arguments inside the table range
        :return: V(y)
        :raise DomainError when an argument is outside the table
        """
        log_y = np.log(np.asarray(y, dtype=float))
        if log_y.size and (log_y.min() < self.log_min or log_y.max() > self.log_max):
            raise DomainError('Argument outside the AFE table range')
        return self.weight.scale(log_y) * self._spline(log_y)


def afe_weight(y: float, t: float, plan: ContourPlan = AFE_PLAN) -> float:
    """
    V(y) by trapezoid quadrature along Re u = plan.sigma.
    :param y: positive real
    :param t: spectral parameter
    :param plan: contour plan with sigma > 0
    :return: V(y) (real)
    :raise DomainError when y <= 0 or plan.sigma <= 0
    """
    if not y > 0:
        raise DomainError('AFE weight needs y > 0, got {}'.format(y))
    value = afe_weight_evaluator(float(t), plan).complex_value(y)
    if abs(value.imag) > constants.REALITY_TOLERANCE:
        raise LMomentError('AFE weight has imaginary residue {} at y={}'.format(value.imag, y))
    return value.real


# ---------------------------------------------------------------- Voronoi


def voronoi_kernel(s: ArrayOrScalar, t: float, sign: int) -> ArrayOrScalar:
    """
    G^{+-}(s) of the Voronoi formula for an even form of spectral parameter t:

        2 pi G(s) = Gamma((1+s+it)/2) Gamma((1+s-it)/2) / (Gamma((-s+it)/2) Gamma((-s-it)/2))
                  +- Gamma((2+s+it)/2) Gamma((2+s-it)/2) / (Gamma((1-s+it)/2) Gamma((1-s-it)/2))

    :param s: complex argument(s)
    :param t: spectral parameter
    :param sign: +1 or -1
    :return: G^{sign}(s)
    :raise PoleError when a numerator gamma argument is at a pole
    :raise DomainError on a bad sign
    """
    if sign not in (1, -1):
        raise DomainError('Bad Voronoi sign: {}'.format(sign))
    s = np.asarray(s, dtype=complex)
    it = 1j * float(t)
    terms = []
    for shift in (0, 1):
        numerator = log_gamma((1 + shift + s + it) / 2) + log_gamma((1 + shift + s - it) / 2)
        first, first_poles = _log_reciprocal_gamma((shift - s + it) / 2)
        second, second_poles = _log_reciprocal_gamma((shift - s - it) / 2)
        value = np.exp(numerator + first + second)
        terms.append(np.where(first_poles | second_poles, 0, value))
    result = (terms[0] + sign * terms[1]) / (2 * np.pi)
    return complex(result) if result.ndim == 0 else result


def mellin(psi: BumpFunction, s: complex) -> complex:
    """
    Mellin transform int psi(x) x^{s-1} dx by adaptive quadrature over the
    support of psi.
    """
    s = complex(s)
    x0, x1 = psi.support

    def real_part(x):
        return psi(x) * (x ** (s - 1)).real

    def imag_part(x):
        return psi(x) * (x ** (s - 1)).imag

    options = dict(epsabs=1e-14, epsrel=1e-13, limit=400)
    re, _ = integrate.quad(real_part, x0, x1, **options)
    im, _ = integrate.quad(imag_part, x0, x1, **options)
    return complex(re, im)


@lru_cache(maxsize=16)
def _log_nodes(psi: BumpFunction) -> Tuple[np.ndarray, np.ndarray, float]:
    x0, x1 = psi.support
    v = np.linspace(math.log(x0), math.log(x1), constants.MELLIN_NODES)
    dv = v[1] - v[0]
    weights = psi(np.exp(v)) * trapezoid_weights(v.size) * dv
    return v, weights, dv


def mellin_on_line(psi: BumpFunction, s: ArrayOrScalar) -> ArrayOrScalar:
    """
    Mellin transform by the trapezoid rule in v = log x, vectorized over s.
    """
    s_values = np.atleast_1d(np.asarray(s, dtype=complex))
    v, weights, _ = _log_nodes(psi)
    result = np.empty(s_values.size, dtype=complex)
    block = max(1, _BLOCK // v.size)
    for start in range(0, s_values.size, block):
        chunk = s_values[start:start + block]
        result[start:start + block] = np.exp(np.outer(chunk, v)) @ weights
    return complex(result[0]) if np.ndim(s) == 0 else result.reshape(np.shape(s))


@lru_cache(maxsize=16)
def _line_integrand(psi: BumpFunction, t: float, sign: int, plan: ContourPlan) -> Tuple[np.ndarray, np.ndarray]:
    """
    Nodes tau_j >= 0 and trapezoid-weighted values of G(sigma + i tau) psi~(-sigma - i tau).
    """
    tau = np.arange(plan.node_count) * plan.step
    s = plan.sigma + 1j * tau
    values = voronoi_kernel(s, t, sign) * mellin_on_line(psi, -s)
    return tau, values * trapezoid_weights(tau.size)


def _check_voronoi_arguments(plan: ContourPlan, sign: int):
    if not plan.sigma > -1:
        raise DomainError('Voronoi contour must lie right of -1, got sigma={}'.format(plan.sigma))
    if sign not in (1, -1):
        raise DomainError('Bad Voronoi sign: {}'.format(sign))


def voronoi_transform(
    x: float,
    psi: BumpFunction,
    t: float,
    sign: int,
    plan: ContourPlan = VORONOI_PLAN
) -> float:
    """
    Psi^{+-}(x) = 1/(2 pi i) int_(sigma) (pi^2 x)^{-s} G(s) psi~(-s) ds by
    trapezoid quadrature along the line. The integrand at conjugate heights is
    conjugate, so the value is real.
    :param x: positive real
    :param psi: test function
    :param t: spectral parameter
    :param sign: +1 or -1
    :param plan: contour plan with sigma > -1
    :return: Psi^{sign}(x)
    :raise DomainError when x <= 0 or the plan is not admissible
    """
    if not x > 0:
        raise DomainError('Voronoi transform needs x > 0, got {}'.format(x))
    _check_voronoi_arguments(plan, sign)
    tau, weighted = _line_integrand(psi, float(t), sign, plan)
    w = math.log(math.pi ** 2 * x)
    line_sum = np.sum(weighted * np.exp(-1j * tau * w)).real
    return plan.step / math.pi * math.exp(-plan.sigma * w) * line_sum


class VoronoiTable:
    """
    Psi^{+-} on a whole logarithmic grid at once. With w = log(pi^2 x) the
    trapezoid sum on the line is a Fourier sum in w, so one FFT gives it on
    an equispaced w-grid covering one period 2 pi / step; values in between
    come from a periodic cubic spline.
    """
    def __init__(
        self,
        psi: BumpFunction,
        t: float,
        sign: int,
        plan: ContourPlan = VORONOI_PLAN,
        fft_size: int = constants.VORONOI_FFT_SIZE,
        center: float = 5.0,
        logger: logging.Logger = logging.getLogger(__name__)
    ):
        """
        Init
        :param psi: test function
        :param t: spectral parameter
        :param sign: +1 or -1
        :param plan: contour plan with sigma > -1
        :param fft_size: FFT length, at least the number of line nodes
        :param center: centre of the w-window (w = log(pi^2 x))
        :param logger: logger instance to use for log messages
        :raise DomainError when the plan is not admissible
        """
        _check_voronoi_arguments(plan, sign)
        self.psi = psi
        self.t = float(t)
        self.sign = sign
        self.plan = plan
        self.logger = logger

        tau, weighted = _line_integrand(psi, self.t, sign, plan)
        if tau.size > fft_size:
            raise DomainError('FFT size {} below node count {}'.format(fft_size, tau.size))
        self.period = 2 * math.pi / plan.step
        self.w0 = center - self.period / 2
        coefficients = np.zeros(fft_size, dtype=complex)
        coefficients[:tau.size] = weighted * np.exp(-1j * tau * self.w0)
        line_sums = plan.step / math.pi * np.fft.fft(coefficients).real
        grid = self.w0 + np.arange(fft_size + 1) * (self.period / fft_size)
        self._spline = interpolate.CubicSpline(
            grid, np.append(line_sums, line_sums[0]), bc_type='periodic'
        )
        self.logger.debug(
            f'Voronoi table ready: t={self.t}, sign={sign}, plan={plan}, size={fft_size}'
        )

    def __call__(self, x):
        """
        :param x: positive real or array
        :return: Psi^{sign}(x)
        """
        x = np.asarray(x, dtype=float)
        if np.any(~(x > 0)):
            raise DomainError('Voronoi transform needs x > 0')
        w = np.log(math.pi ** 2 * x)
        wrapped = self.w0 + np.mod(w - self.w0, self.period)
        values = np.exp(-self.plan.sigma * w) * self._spline(wrapped)
        return float(values) if x.ndim == 0 else values
