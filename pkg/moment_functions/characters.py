#!/usr/bin/env python3

# Dirichlet characters modulo prime and semiprime moduli, Gauss sums and the
# closed forms of the even primitive family averages

from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from typing import List, Sequence, Tuple

import itertools
import math

import numpy as np
from sympy.ntheory import factorint, primitive_root

from moment_functions.errors import ModulusError, CharacterError, CoprimalityError
from moment_functions.numeric_aux_functions import compensated_sum, e


@dataclass(frozen=True)
class Modulus:
    """
    Factored modulus q, either an odd prime or a product q1 * q2 of two
    distinct odd primes (q1 < q2).
    """
    q: int
    factors: Tuple[Tuple[int, int], ...] = field(init=False, compare=False)
    phi: int = field(init=False, compare=False)

    def __post_init__(self):
        if isinstance(self.q, bool) or not isinstance(self.q, (int, np.integer)):
            raise ModulusError('Bad modulus type: {}'.format(self.q))
        if self.q < 3:
            raise ModulusError('Modulus must be at least 3, got {}'.format(self.q))
        factors = tuple(sorted(factorint(int(self.q)).items()))
        if any(exponent != 1 for _, exponent in factors) or len(factors) > 2:
            raise ModulusError(
                'Unsupported modulus {}: only primes and products of two '
                'distinct odd primes are supported'.format(self.q)
            )
        if len(factors) == 2 and factors[0][0] == 2:
            raise ModulusError(
                'Unsupported modulus {}: both prime factors must be odd'.format(self.q)
            )
        object.__setattr__(self, 'q', int(self.q))
        object.__setattr__(self, 'factors', factors)
        object.__setattr__(self, 'phi', math.prod(p - 1 for p, _ in factors))

    @classmethod
    def from_primes(cls, q1: int, q2: int) -> 'Modulus':
        """
        :param q1: first prime factor
        :param q2: second prime factor (distinct from q1)
        :return: modulus q1 * q2
        :raise ModulusError when q1 == q2 or the factors are not primes
        """
        if q1 == q2:
            raise ModulusError('Prime factors must be distinct: {}x{}'.format(q1, q2))
        modulus = cls(q1 * q2)
        if set(modulus.primes) != {q1, q2}:
            raise ModulusError('Bad prime factors: {}x{}'.format(q1, q2))
        return modulus

    @property
    def primes(self) -> Tuple[int, ...]:
        return tuple(p for p, _ in self.factors)

    @property
    def is_prime(self) -> bool:
        return len(self.factors) == 1

    @property
    def q1(self) -> int:
        return self.primes[0]

    @property
    def q2(self) -> int:
        """
        Second prime factor, 1 for a prime modulus.
        """
        return self.primes[1] if len(self.primes) > 1 else 1

    def is_unit(self, a: int) -> bool:
        return math.gcd(int(a), self.q) == 1

    def __str__(self):
        if self.is_prime:
            return str(self.q)
        return '{}x{}'.format(self.q1, self.q2)


@lru_cache(maxsize=None)
def _index_table(p: int) -> np.ndarray:
    """
    Discrete logarithms modulo p with respect to the smallest primitive root.
    Entry 0 is -1.
    """
    g = primitive_root(p)
    index = np.full(p, -1, dtype=np.int64)
    power = 1
    for k in range(p - 1):
        index[power] = k
        power = power * g % p
    return index


@lru_cache(maxsize=None)
def _phase_tables(m: Modulus) -> Tuple[int, np.ndarray, np.ndarray, np.ndarray]:
    """
    Precomputed data shared by all characters of a modulus.
    :return: (common order L, per-prime index rows scaled to L, unit mask,
        L-th roots of unity)
    """
    order = math.lcm(*(p - 1 for p in m.primes))
    residues = np.arange(m.q)
    rows = np.stack([
        _index_table(p)[residues % p] * (order // (p - 1)) for p in m.primes
    ])
    units = np.gcd(residues, m.q) == 1
    roots = e(np.arange(order) / order)
    return order, rows, units, roots


@dataclass(frozen=True)
class DirichletCharacter:
    """
    Character modulo a prime or semiprime q described by its exponents with
    respect to the smallest primitive root of every prime factor:
    chi(n) = prod_p e(j_p * ind_p(n) / (p - 1)).
    """
    modulus: Modulus
    exponents: Tuple[int, ...]

    def __post_init__(self):
        exponents = tuple(int(j) for j in self.exponents)
        if len(exponents) != len(self.modulus.primes):
            raise CharacterError('Bad exponent record {} for modulus {}'.format(
                self.exponents, self.modulus.q
            ))
        for j, p in zip(exponents, self.modulus.primes):
            if not 0 <= j < p - 1:
                raise CharacterError('Exponent {} out of range mod {}'.format(j, p))
        object.__setattr__(self, 'exponents', exponents)

    @cached_property
    def values(self) -> np.ndarray:
        """
        Value table indexed by residue 0..q-1 (zero off the units).
        """
        order, rows, units, roots = _phase_tables(self.modulus)
        phase = np.zeros(self.modulus.q, dtype=np.int64)
        for j, row in zip(self.exponents, rows):
            phase += j * row
        table = roots[np.mod(phase, order)]
        table[~units] = 0
        return table

    @property
    def chi_id(self) -> int:
        """
        Position in the lexicographic enumeration of all characters mod q.
        """
        chi_id = 0
        for j, p in zip(self.exponents, self.modulus.primes):
            chi_id = chi_id * (p - 1) + j
        return chi_id

    @property
    def is_even(self) -> bool:
        return sum(self.exponents) % 2 == 0

    @property
    def parity(self) -> str:
        return 'even' if self.is_even else 'odd'

    @property
    def conductor(self) -> int:
        return math.prod(p for j, p in zip(self.exponents, self.modulus.primes) if j)

    @property
    def primitive(self) -> bool:
        return self.conductor == self.modulus.q

    @property
    def is_principal(self) -> bool:
        return not any(self.exponents)

    def __call__(self, n: int) -> complex:
        return complex(self.values[int(n) % self.modulus.q])

    def conjugate(self) -> 'DirichletCharacter':
        return DirichletCharacter(
            self.modulus,
            tuple((-j) % (p - 1) for j, p in zip(self.exponents, self.modulus.primes))
        )

    def __mul__(self, other: 'DirichletCharacter') -> 'DirichletCharacter':
        if other.modulus != self.modulus:
            raise CharacterError('Characters of different moduli: {} and {}'.format(
                self.modulus.q, other.modulus.q
            ))
        return DirichletCharacter(
            self.modulus,
            tuple(
                (a + b) % (p - 1)
                for a, b, p in zip(self.exponents, other.exponents, self.modulus.primes)
            )
        )


@lru_cache(maxsize=64)
def _character_family(m: Modulus) -> Tuple[DirichletCharacter, ...]:
    ranges = [range(p - 1) for p in m.primes]
    return tuple(DirichletCharacter(m, exponents) for exponents in itertools.product(*ranges))


def enumerate_characters(m: Modulus) -> List[DirichletCharacter]:
    """
    All phi(q) characters modulo q ordered by chi_id.
    :param m: modulus
    :return: list of characters
    """
    return list(_character_family(m))


def even_primitive_characters(m: Modulus) -> List[DirichletCharacter]:
    """
    Even primitive characters modulo q in enumeration order.
    """
    return [chi for chi in _character_family(m) if chi.is_even and chi.primitive]


def character_matrix(chars: Sequence[DirichletCharacter]) -> np.ndarray:
    """
    :param chars: characters of one modulus
    :return: complex array (len(chars), q) of value tables
    """
    if not chars:
        return np.zeros((0, 0), dtype=complex)
    return np.vstack([chi.values for chi in chars])


@lru_cache(maxsize=1024)
def _gauss_sum(chi: DirichletCharacter) -> complex:
    q = chi.modulus.q
    additive = e(np.arange(q) / q)
    return compensated_sum(chi.values * additive)


def gauss_sum(chi: DirichletCharacter) -> complex:
    """
    Gauss sum tau(chi) = sum_{a mod q} chi(a) e(a / q).
    """
    return _gauss_sum(chi)


def crt_split(chi: DirichletCharacter) -> Tuple[DirichletCharacter, DirichletCharacter]:
    """
    Splits a character modulo q1 * q2 into its components modulo q1 and q2.
    :param chi: character modulo a semiprime
    :return: (chi1 mod q1, chi2 mod q2) with chi = chi1 * chi2
    :raise ModulusError when the modulus is prime
    """
    m = chi.modulus
    if m.is_prime:
        raise ModulusError('Cannot split a character of prime modulus {}'.format(m.q))
    return (
        DirichletCharacter(Modulus(m.q1), (chi.exponents[0],)),
        DirichletCharacter(Modulus(m.q2), (chi.exponents[1],))
    )


def orthogonality_sum(m: Modulus, a: int, b: int) -> complex:
    """
    sum over all chi mod q of chi(a) * conj(chi(b)).
    """
    return compensated_sum(chi(a) * chi(b).conjugate() for chi in _character_family(m))


def _check_coprime(m: Modulus, a: int, b: int):
    if math.gcd(a * b, m.q) != 1:
        raise CoprimalityError('Arguments a={}, b={} are not coprime to q={}'.format(a, b, m.q))


def family_B_direct(m: Modulus, a: int, b: int) -> complex:
    """
    B_q(a, b) = sum over even primitive chi of conj(chi(a)) * chi(b).
    :raise CoprimalityError when gcd(ab, q) != 1
    """
    _check_coprime(m, a, b)
    return compensated_sum(
        chi(a).conjugate() * chi(b) for chi in even_primitive_characters(m)
    )


def family_B_formula(m: Modulus, a: int, b: int) -> complex:
    """
    Closed form 1/2 sum_{+-} prod_p [phi(p) 1_{b = +-a mod p} - 1] of B_q(a, b).
    :raise CoprimalityError when gcd(ab, q) != 1
    """
    _check_coprime(m, a, b)
    total = 0.0
    for sign in (1, -1):
        term = 1.0
        for p in m.primes:
            term *= (p - 1) * ((b - sign * a) % p == 0) - 1
        total += term
    return complex(total / 2)


def family_D_direct(m: Modulus, a: int, b: int) -> complex:
    """
    D_q(a, b) = sum over even primitive chi of chi(a) * conj(chi(b)) * tau(chi).
    :raise CoprimalityError when gcd(ab, q) != 1
    """
    _check_coprime(m, a, b)
    return compensated_sum(
        chi(a) * chi(b).conjugate() * gauss_sum(chi) for chi in even_primitive_characters(m)
    )


def family_D_formula(m: Modulus, a: int, b: int) -> complex:
    """
    Closed form 1/2 sum_{+-} prod_p (phi(p) e(+-inv(a) inv(q/p) b / p) + 1) of
    D_q(a, b), inverses taken modulo p.
    :raise CoprimalityError when gcd(ab, q) != 1
    """
    _check_coprime(m, a, b)
    total = 0j
    for sign in (1, -1):
        term = 1 + 0j
        for p in m.primes:
            k = sign * pow(a, -1, p) * pow(m.q // p, -1, p) * b % p
            term *= (p - 1) * e(k / p) + 1
        total += term
    return total / 2


def _residue_grid(m: Modulus) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    s, r = np.ogrid[:m.q, :m.q]
    units = np.gcd(np.arange(m.q), m.q) == 1
    return s, r, units[:, None] & units[None, :]


def family_B_matrix(m: Modulus, formula: bool = False) -> np.ndarray:
    """
    Matrix of B_q(s, r) over residues s (rows) and r (columns), zero when s or
    r is not a unit.
    :param m: modulus
    :param formula: use the closed form instead of the character sum
    :return: complex (q, q) array
    """
    if not formula:
        chars = character_matrix(even_primitive_characters(m))
        if chars.size == 0:
            return np.zeros((m.q, m.q), dtype=complex)
        return chars.conj().T @ chars
    s, r, units = _residue_grid(m)
    plus = np.ones((m.q, m.q))
    minus = np.ones((m.q, m.q))
    for p in m.primes:
        plus = plus * ((p - 1) * ((r - s) % p == 0) - 1)
        minus = minus * ((p - 1) * ((r + s) % p == 0) - 1)
    return np.where(units, (plus + minus) / 2, 0).astype(complex)


def family_D_matrix(m: Modulus, formula: bool = False) -> np.ndarray:
    """
    Matrix of D_q(s, r) over residues s (rows) and r (columns), zero when s or
    r is not a unit.
    :param m: modulus
    :param formula: use the closed form instead of the Gauss-sum weighted sum
    :return: complex (q, q) array
    """
    if not formula:
        family = even_primitive_characters(m)
        if not family:
            return np.zeros((m.q, m.q), dtype=complex)
        chars = character_matrix(family)
        taus = np.array([gauss_sum(chi) for chi in family])
        return (chars.T * taus) @ chars.conj()
    s, r, units = _residue_grid(m)
    plus = np.ones((m.q, m.q), dtype=complex)
    minus = np.ones((m.q, m.q), dtype=complex)
    for p in m.primes:
        inverse = np.array([pow(x, -1, p) if x else 0 for x in range(p)])
        k = inverse[s % p] * pow(m.q // p, -1, p) * r % p
        plus = plus * ((p - 1) * e(k / p) + 1)
        minus = minus * ((p - 1) * e(-k / p) + 1)
    return np.where(units, (plus + minus) / 2, 0)


@dataclass(frozen=True)
class GaussMultiplicativityReport:
    pairs_checked: int
    max_deviation: float
    worst_pair: Tuple[int, int] = None


def gauss_multiplicativity_check(m: Modulus) -> GaussMultiplicativityReport:
    """
    Checks tau(chi1 chi2) = chi1(q2) chi2(q1) tau(chi1) tau(chi2) for every pair
    of primitive characters chi1 mod q1, chi2 mod q2.
    :param m: semiprime modulus
    :return: number of pairs and maximal absolute deviation
    :raise ModulusError when the modulus is prime
    """
    if m.is_prime:
        raise ModulusError('Gauss sum multiplicativity needs a semiprime modulus, got {}'.format(m.q))
    m1, m2 = Modulus(m.q1), Modulus(m.q2)
    max_deviation = 0.0
    worst_pair = None
    pairs = 0
    for chi1 in enumerate_characters(m1):
        if not chi1.primitive:
            continue
        for chi2 in enumerate_characters(m2):
            if not chi2.primitive:
                continue
            product = DirichletCharacter(m, chi1.exponents + chi2.exponents)
            lhs = gauss_sum(product)
            rhs = chi1(m.q2) * chi2(m.q1) * gauss_sum(chi1) * gauss_sum(chi2)
            deviation = abs(lhs - rhs)
            pairs += 1
            if deviation >= max_deviation:
                max_deviation = deviation
                worst_pair = (chi1.chi_id, chi2.chi_id)
    return GaussMultiplicativityReport(pairs, max_deviation, worst_pair)
