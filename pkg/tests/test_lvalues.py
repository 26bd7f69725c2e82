#!/usr/bin/env python3

# tests of Dirichlet central values, the joint approximate functional
# equation and the nonvanishing scan

import math

import mpmath
import numpy as np
import pytest

from moment_functions import constants
from moment_functions.characters import Modulus, enumerate_characters, even_primitive_characters
from moment_functions.coefficients import eisenstein_series, synthetic_coefficients
from moment_functions.errors import CharacterError, DomainError, TruncationError
from moment_functions.lvalues import (
    ResidueWeights, afe_horizon, central_value_record, dirichlet_central, factorization_oracle,
    nonvanishing_scan, product_central, twisted_central
)
from moment_functions.special_functions import AfeWeight


@pytest.fixture(scope='module', params=[0.0, 1.0])
def eisenstein_15(request):
    f = eisenstein_series(request.param)
    return f, ResidueWeights(f, Modulus(15))


def _mpmath_l(chi, s):
    return complex(mpmath.dirichlet(mpmath.mpc(s.real, s.imag), [complex(v) for v in chi.values]))


class TestDirichletCentral:
    @pytest.mark.parametrize('q', [15, 13, 35])
    @pytest.mark.parametrize('s', [0.5, 0.5 + 1j, 1.2 - 3j])
    def test_against_mpmath(self, q, s):
        for chi in enumerate_characters(Modulus(q))[1:]:
            expected = _mpmath_l(chi, complex(s))
            assert abs(dirichlet_central(chi, s) - expected) < 1e-10

    def test_principal(self):
        with pytest.raises(CharacterError):
            dirichlet_central(enumerate_characters(Modulus(15))[0], 0.5)

    @pytest.mark.parametrize('s', [0.2, 1.8 + 1j])
    def test_strip(self, s):
        with pytest.raises(DomainError):
            dirichlet_central(enumerate_characters(Modulus(15))[1], s)


class TestAfeHorizon:
    def test_grows_with_modulus(self):
        assert afe_horizon(35, 0.0).t_cut > afe_horizon(15, 0.0).t_cut

    def test_tail_below_tolerance(self):
        horizon = afe_horizon(15, 1.0)
        assert horizon.tail_estimate < 1e-8
        assert horizon.t_cut >= horizon.y_max / (math.pi ** 1.5 / 15 ** 1.5)

    def test_cap(self):
        with pytest.raises(TruncationError):
            afe_horizon(15, 0.0, t_cut_cap=10)

    @pytest.mark.parametrize('t', [1.0, 2.0])
    def test_largest_default_modulus_fits(self, t):
        horizon = afe_horizon(221, t)
        assert horizon.t_cut <= constants.T_CUT_CAP
        assert horizon.tail_estimate < constants.AFE_TAIL_TOLERANCE


class TestJointCentralValue:
    def test_matches_factorization(self, eisenstein_15):
        f, weights = eisenstein_15
        for chi in even_primitive_characters(Modulus(15)):
            assert abs(weights.product(chi) - factorization_oracle(f.t, chi)) < 1e-6

    def test_product_central(self, eisenstein_15):
        f, weights = eisenstein_15
        chi = even_primitive_characters(Modulus(15))[0]
        assert product_central(f, chi, weights=weights) == weights.product(chi)

    def test_thread_count_does_not_change_result(self):
        f = eisenstein_series(1.0)
        single = ResidueWeights(f, Modulus(15), thread_count=1)
        threaded = ResidueWeights(f, Modulus(15), thread_count=4)
        assert np.array_equal(single.matrix, threaded.matrix)

    def test_sweep_matches_double_loop(self):
        f = eisenstein_series(1.0)
        q, t_cut = 15, 3000
        weights = ResidueWeights(f, Modulus(q), t_cut=t_cut)
        weight = AfeWeight(1.0)
        c = math.pi ** 1.5 / q ** 1.5
        lam = f.values(t_cut)
        expected = np.zeros((q, q))
        for m in range(1, t_cut + 1):
            n = np.arange(1, t_cut // m + 1)
            np.add.at(expected, (n % q, m % q), lam[n] * weight(c * m * n) / np.sqrt(m * n))
        assert np.max(np.abs(weights.matrix - expected)) < 1e-10

    def test_truncation_stability(self, eisenstein_15):
        f, weights = eisenstein_15
        doubled = ResidueWeights(f, Modulus(15), t_cut=2 * weights.truncation_n)
        family = even_primitive_characters(Modulus(15))
        assert np.max(np.abs(weights.products(family) - doubled.products(family))) < 1e-8

    def test_conjugate_character(self, eisenstein_15):
        f, weights = eisenstein_15
        for chi in even_primitive_characters(Modulus(15)):
            conjugate = chi.conjugate()
            assert conjugate.is_even and conjugate.primitive
            assert abs(weights.product(conjugate) - weights.product(chi).conjugate()) < 1e-9

    def test_odd_character(self, eisenstein_15):
        f, weights = eisenstein_15
        odd = next(chi for chi in enumerate_characters(Modulus(15)) if not chi.is_even)
        with pytest.raises(CharacterError):
            product_central(f, odd, weights=weights)

    def test_imprimitive_character(self, eisenstein_15):
        f, weights = eisenstein_15
        imprimitive = next(
            chi for chi in enumerate_characters(Modulus(15)) if chi.is_even and not chi.primitive
        )
        with pytest.raises(CharacterError):
            weights.product(imprimitive)

    def test_foreign_modulus(self, eisenstein_15):
        f, weights = eisenstein_15
        with pytest.raises(CharacterError):
            weights.product(even_primitive_characters(Modulus(35))[0])

    def test_synthetic_has_no_functional_equation(self):
        with pytest.raises(DomainError):
            ResidueWeights(synthetic_coefficients(1, 1000), Modulus(15))

    @pytest.mark.slow
    @pytest.mark.parametrize('q', [35, 77])
    @pytest.mark.parametrize('t', [0.0, 1.0])
    def test_matches_factorization_larger_moduli(self, q, t):
        f = eisenstein_series(t)
        weights = ResidueWeights(f, Modulus(q), thread_count=4)
        for chi in even_primitive_characters(Modulus(q)):
            assert abs(weights.product(chi) - factorization_oracle(t, chi)) < 1e-6


class TestCentralValueRecord:
    def test_eisenstein_twist_is_exact(self, eisenstein_15):
        f, weights = eisenstein_15
        chi = even_primitive_characters(Modulus(15))[1]
        expected = _mpmath_l(chi, 0.5 + 1j * f.t) * _mpmath_l(chi, 0.5 - 1j * f.t)
        assert abs(twisted_central(f, chi) - expected) < 1e-9

    def test_record(self, eisenstein_15):
        f, weights = eisenstein_15
        chi = even_primitive_characters(Modulus(15))[0]
        record = central_value_record(f, chi, weights)
        assert record.chi_id == chi.chi_id
        assert record.truncation_n == weights.truncation_n
        assert abs(record.l_chi - _mpmath_l(chi, 0.5)) < 1e-10
        assert abs(record.product_afe - record.l_twist * record.l_chi.conjugate()) < 1e-6


class TestNonvanishingScan:
    def test_sorted_by_magnitude(self, eisenstein_15):
        f, weights = eisenstein_15
        hits = nonvanishing_scan(f, Modulus(15), 1e-12, weights=weights)
        assert len(hits) == 2
        assert hits[0][1] >= hits[1][1]
        family = even_primitive_characters(Modulus(15))
        expected = {chi.chi_id: abs(weights.product(chi)) for chi in family}
        for chi_id, magnitude in hits:
            assert magnitude == pytest.approx(expected[chi_id])

    def test_infinite_threshold(self, eisenstein_15, caplog):
        f, weights = eisenstein_15
        assert nonvanishing_scan(f, Modulus(15), math.inf, weights=weights) == []
        assert 'above threshold' in caplog.text

    @pytest.mark.parametrize('threshold', [0.0, -1.0, math.nan])
    def test_bad_threshold(self, eisenstein_15, threshold):
        f, weights = eisenstein_15
        with pytest.raises(DomainError):
            nonvanishing_scan(f, Modulus(15), threshold, weights=weights)
