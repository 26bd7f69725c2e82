#!/usr/bin/env python3

# tests of characters, Gauss sums and the family identities

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from moment_functions.characters import (
    DirichletCharacter, Modulus, character_matrix, crt_split, enumerate_characters,
    even_primitive_characters, family_B_direct, family_B_formula, family_B_matrix,
    family_D_direct, family_D_formula, family_D_matrix, gauss_multiplicativity_check,
    gauss_sum, orthogonality_sum
)
from moment_functions.errors import CharacterError, CoprimalityError, ModulusError


class TestModulus:
    def test_semiprime(self):
        m = Modulus(15)
        assert m.primes == (3, 5)
        assert m.phi == 8
        assert (m.q1, m.q2) == (3, 5)
        assert not m.is_prime
        assert str(m) == '3x5'

    def test_prime(self):
        m = Modulus(101)
        assert m.is_prime
        assert m.q2 == 1
        assert m.phi == 100

    def test_from_primes_normalizes_order(self):
        assert Modulus.from_primes(7, 5) == Modulus(35)
        assert Modulus.from_primes(7, 5).q1 == 5

    @pytest.mark.parametrize('q', [1, 2, 4, 9, 10, 30, 45])
    def test_unsupported(self, q):
        with pytest.raises(ModulusError):
            Modulus(q)

    def test_repeated_factor(self):
        with pytest.raises(ModulusError):
            Modulus.from_primes(3, 3)


class TestCharacters:
    def test_enumeration(self):
        chars = enumerate_characters(Modulus(15))
        assert len(chars) == 8
        assert [chi.chi_id for chi in chars] == list(range(8))
        assert chars[0].is_principal

    @pytest.mark.parametrize('q, count', [(15, 2), (35, 8), (101, 49)])
    def test_even_primitive_count(self, q, count):
        family = even_primitive_characters(Modulus(q))
        assert len(family) == count
        assert all(chi.is_even and chi.primitive for chi in family)

    def test_values_vanish_off_units(self):
        for chi in enumerate_characters(Modulus(21)):
            for n in (0, 3, 7, 14, 21):
                assert chi(n) == 0

    def test_parity_matches_value_at_minus_one(self):
        for chi in enumerate_characters(Modulus(35)):
            assert abs(chi(-1) - (1 if chi.is_even else -1)) < 1e-12

    def test_conductor(self):
        m = Modulus(15)
        assert DirichletCharacter(m, (0, 0)).conductor == 1
        assert DirichletCharacter(m, (1, 0)).conductor == 3
        assert DirichletCharacter(m, (0, 2)).conductor == 5
        assert DirichletCharacter(m, (1, 2)).primitive

    def test_bad_exponents(self):
        with pytest.raises(CharacterError):
            DirichletCharacter(Modulus(15), (2, 0))
        with pytest.raises(CharacterError):
            DirichletCharacter(Modulus(15), (1,))

    @settings(max_examples=60, deadline=None)
    @given(st.integers(0, 3 * 5 * 7), st.integers(-500, 500), st.integers(-500, 500))
    def test_complete_multiplicativity(self, index, a, b):
        chars = enumerate_characters(Modulus(35))
        chi = chars[index % len(chars)]
        assert abs(chi(a) * chi(b) - chi(a * b)) < 1e-12

    def test_conjugate_and_product(self):
        chars = enumerate_characters(Modulus(33))
        chi, psi = chars[7], chars[13]
        assert (chi * chi.conjugate()).is_principal
        product = chi * psi
        for n in range(1, 40):
            assert abs(product(n) - chi(n) * psi(n)) < 1e-12

    def test_crt_split(self):
        for chi in enumerate_characters(Modulus(35)):
            chi1, chi2 = crt_split(chi)
            for n in range(1, 36):
                assert abs(chi(n) - chi1(n) * chi2(n)) < 1e-12

    def test_crt_split_needs_semiprime(self):
        with pytest.raises(ModulusError):
            crt_split(enumerate_characters(Modulus(7))[1])

    def test_character_matrix(self):
        chars = enumerate_characters(Modulus(15))
        values = character_matrix(chars)
        assert values.shape == (8, 15)
        assert np.allclose(values[3], chars[3].values)


class TestOrthogonality:
    def test_diagonal(self):
        assert abs(orthogonality_sum(Modulus(15), 2, 2) - 8) < 1e-10

    def test_off_diagonal(self):
        assert abs(orthogonality_sum(Modulus(15), 2, 3)) < 1e-10
        assert abs(orthogonality_sum(Modulus(15), 2, 7)) < 1e-10


class TestGaussSums:
    @pytest.mark.parametrize('q', [15, 35, 13])
    def test_modulus_of_primitive(self, q):
        for chi in enumerate_characters(Modulus(q)):
            if chi.primitive:
                assert abs(abs(gauss_sum(chi)) - math.sqrt(q)) < 1e-10

    def test_principal_prime(self):
        # tau(chi_0 mod p) = sum_{a=1}^{p-1} e(a/p) = -1
        assert abs(gauss_sum(enumerate_characters(Modulus(13))[0]) + 1) < 1e-12

    @pytest.mark.parametrize('q', [15, 35, 77])
    def test_multiplicativity(self, q):
        report = gauss_multiplicativity_check(Modulus(q))
        assert report.pairs_checked > 0
        assert report.max_deviation < 1e-9

    def test_multiplicativity_needs_semiprime(self):
        with pytest.raises(ModulusError):
            gauss_multiplicativity_check(Modulus(11))


class TestFamilyIdentities:
    def test_b_trivial_arguments(self):
        m = Modulus(15)
        assert abs(family_B_direct(m, 1, 1) - 2) < 1e-9
        assert abs(family_B_formula(m, 1, 1) - 2) < 1e-9

    def test_b_opposite_arguments(self):
        # chi(-1) = 1 on the family, so B(1, -1) counts the family
        m = Modulus(35)
        assert abs(family_B_direct(m, 1, 34) - 8) < 1e-9
        assert abs(family_B_formula(m, 1, 34) - 8) < 1e-9

    def test_b_equal_arguments_count_family(self):
        m = Modulus(77)
        count = len(even_primitive_characters(m))
        assert abs(family_B_formula(m, 13, 13) - count) < 1e-9

    def test_d_trivial_arguments(self):
        expected = 4 * math.sqrt(3) * math.sin(4 * math.pi / 5)
        m = Modulus(15)
        assert abs(family_D_direct(m, 1, 1) - expected) < 1e-9
        assert abs(family_D_formula(m, 1, 1) - expected) < 1e-9

    @settings(max_examples=80, deadline=None)
    @given(st.sampled_from([15, 21, 35, 13]), st.integers(1, 60), st.integers(1, 60))
    def test_closed_forms(self, q, a, b):
        m = Modulus(q)
        if math.gcd(a * b, q) != 1:
            with pytest.raises(CoprimalityError):
                family_B_formula(m, a, b)
            return
        assert abs(family_B_direct(m, a, b) - family_B_formula(m, a, b)) < 1e-9
        assert abs(family_D_direct(m, a, b) - family_D_formula(m, a, b)) < 1e-9

    def test_imaginary_parts_cancel(self):
        m = Modulus(21)
        for a in range(1, 21):
            for b in range(1, 21):
                if math.gcd(a * b, 21) == 1:
                    assert abs(family_D_formula(m, a, b).imag) < 1e-9

    @pytest.mark.parametrize('q', [15, 35, 13])
    def test_matrices(self, q):
        m = Modulus(q)
        assert np.max(np.abs(family_B_matrix(m) - family_B_matrix(m, formula=True))) < 1e-9
        assert np.max(np.abs(family_D_matrix(m) - family_D_matrix(m, formula=True))) < 1e-9
        assert abs(family_D_matrix(m)[2, 4] - family_D_direct(m, 2, 4)) < 1e-9

    def test_matrices_vanish_off_units(self):
        m = Modulus(15)
        assert np.all(family_B_matrix(m, formula=True)[3] == 0)
        assert np.all(family_D_matrix(m, formula=True)[:, 5] == 0)
