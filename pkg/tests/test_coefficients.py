#!/usr/bin/env python3

# tests of coefficient sources, the coefficient file format and L(1, f)

import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from sympy import divisor_count

from moment_functions import constants
from moment_functions.coefficients import (
    eisenstein_coefficients, eisenstein_lambda, eisenstein_series, eisenstein_smoothing_correction,
    eisenstein_smoothing_deviations, exp_sum_bound_check, hecke_residuals, l_one,
    load_coefficients, multiplicative_extension, save_coefficients, smoothed_l_one,
    synthetic_coefficients
)
from moment_functions.errors import (
    CoefficientFileError, DivergenceError, DomainError, MissingCoefficientError
)


@pytest.fixture(scope='module')
def synthetic():
    return synthetic_coefficients(7, 10_000)


def _write(path, text):
    path.write_bytes(text.encode('ascii'))
    return str(path)


class TestEisenstein:
    def test_divisor_counts_at_zero(self):
        values = eisenstein_coefficients(0.0, 2000)
        expected = [0] + [int(divisor_count(n)) for n in range(1, 2001)]
        assert np.array_equal(values, np.array(expected, dtype=float))

    @pytest.mark.parametrize('n', [1, 12, 97, 360, 1001])
    def test_sieve_matches_divisor_sum(self, n):
        assert abs(eisenstein_coefficients(1.3, 1100)[n] - eisenstein_lambda(1.3, n)) < 1e-12

    def test_sieve_across_blocks(self):
        n_max = 2 ** 20 + 64
        values = eisenstein_coefficients(1.0, n_max)
        divisor_counts = eisenstein_coefficients(0.0, n_max)
        for n in (2 ** 20, 2 ** 20 + 1, 2 ** 20 + 2, 2 ** 20 + 3, n_max):
            assert abs(values[n] - eisenstein_lambda(1.0, n)) < 1e-9
            assert divisor_counts[n] == int(divisor_count(n))

    def test_residuals(self):
        report = hecke_residuals(eisenstein_series(1.0, 10_000))
        assert report.pairs_checked > 0
        assert report.multiplicativity < 1e-9
        assert report.prime_power < 1e-9

    @settings(max_examples=60, deadline=None)
    @given(st.integers(1, 120), st.integers(1, 120), st.floats(0, 5))
    def test_multiplicativity(self, m, n, t):
        if math.gcd(m, n) != 1:
            return
        assert abs(eisenstein_lambda(t, m) * eisenstein_lambda(t, n) - eisenstein_lambda(t, m * n)) < 1e-9

    def test_extends_on_demand(self):
        f = eisenstein_series(0.0, 100)
        assert f[1024] == 11
        assert f.values(200)[199] == 2
        assert f.n_max == 200

    def test_bad_index(self):
        with pytest.raises(DomainError):
            eisenstein_lambda(0.0, 0)


class TestSynthetic:
    def test_prime_values_bounded(self, synthetic):
        values = synthetic.values(10_000)
        for p in (2, 3, 5, 7919, 9973):
            assert abs(values[p]) <= 2

    def test_deterministic(self, synthetic):
        again = synthetic_coefficients(7, 10_000)
        assert np.array_equal(again.values(10_000), synthetic.values(10_000))
        other = synthetic_coefficients(8, 10_000)
        assert not np.array_equal(other.values(10_000), synthetic.values(10_000))

    def test_hecke_relations(self, synthetic):
        report = hecke_residuals(synthetic)
        assert report.multiplicativity < 1e-9
        assert report.prime_power < 1e-9
        assert report.ramanujan_violations == 0

    def test_not_automorphic(self, synthetic):
        assert not synthetic.source.automorphic
        assert synthetic.source.cuspidal
        assert synthetic.source.spec == 'synthetic:7'

    def test_multiplicative_extension_needs_primes(self):
        with pytest.raises(MissingCoefficientError) as info:
            multiplicative_extension({2: 0.5, 3: 0.1}, 10)
        assert info.value.prime == 5


class TestCoefficientFile:
    def test_save_and_load(self, tmp_path):
        f = synthetic_coefficients(3, 500)
        path = str(tmp_path / 'coefficients.txt')
        save_coefficients(f, path)
        loaded = load_coefficients(path)
        assert loaded.t == 0.0
        assert loaded.n_max == 500
        assert np.array_equal(loaded.values(500), f.values(500))
        assert loaded.residuals.multiplicativity < 1e-9

    def test_gaps_filled_by_hecke_relations(self, tmp_path):
        path = _write(tmp_path / 'sparse.txt', '# sparse\nt 0\n1 1\n2 0.5\n3 -0.25\n5 1.1\n')
        f = load_coefficients(path)
        assert f[4] == pytest.approx(-0.75)
        assert f[6] == pytest.approx(-0.125)
        assert f[10] == pytest.approx(0.55)
        assert not np.any(np.isnan(f.values(5)))

    def test_crlf(self, tmp_path):
        f = load_coefficients(_write(tmp_path / 'crlf.txt', 't 1.5\r\n1 1.0\r\n2 -0.3\r\n'))
        assert f.t == 1.5
        assert f[2] == pytest.approx(-0.3)

    def test_missing_prime(self, tmp_path):
        f = load_coefficients(_write(tmp_path / 'short.txt', 't 0\n1 1\n2 0.5\n3 0.1\n'))
        with pytest.raises(MissingCoefficientError) as info:
            f[14]
        assert info.value.prime == 7

    def test_beyond_horizon(self, tmp_path):
        f = synthetic_coefficients(3, 1000)
        path = str(tmp_path / 'coefficients.txt')
        save_coefficients(f, path)
        loaded = load_coefficients(path)
        assert loaded[1024] == pytest.approx(_power(loaded[2], 10))
        assert loaded[2002] == pytest.approx(loaded[2] * loaded[7] * loaded[11] * loaded[13])
        with pytest.raises(MissingCoefficientError) as info:
            loaded[1009]
        assert info.value.prime == 1009

    @pytest.mark.parametrize('text, line_number', [
        ('x 1\n1 1\n', 1),
        ('t 0\n2 0.3\n', 2),
        ('t 0\n1 1\n3 0\n2 0\n', 4),
        ('t 0\n1 1\n2 abc\n', 3),
        ('# header\nt\n', 2),
    ])
    def test_bad_records(self, tmp_path, text, line_number):
        with pytest.raises(CoefficientFileError) as info:
            load_coefficients(_write(tmp_path / 'bad.txt', text))
        assert info.value.line_number == line_number

    def test_prime_power_residual_reported(self, tmp_path, caplog):
        f = load_coefficients(_write(tmp_path / 'loose.txt', 't 0\n1 1\n2 1.0\n4 0.5\n'))
        assert f.residuals.prime_power == pytest.approx(0.5)
        assert f.precision == constants.FILE_TOLERANCE
        assert f[4] == 0.5
        assert 'residuals above file precision' in caplog.text

    def test_lambda_one(self, tmp_path):
        with pytest.raises(CoefficientFileError):
            load_coefficients(_write(tmp_path / 'bad.txt', 't 0\n1 0.5\n'))

    def test_missing_header(self, tmp_path):
        with pytest.raises(CoefficientFileError):
            load_coefficients(_write(tmp_path / 'empty.txt', '# nothing\n'))

    def test_missing_file(self, tmp_path):
        with pytest.raises(CoefficientFileError):
            load_coefficients(str(tmp_path / 'absent.txt'))


def _power(lambda_p, k):
    previous, current = 1.0, lambda_p
    for _ in range(k - 1):
        previous, current = current, lambda_p * current - previous
    return current


class TestLOne:
    @pytest.mark.parametrize('t', [1.0, 2.0])
    def test_eisenstein_closed_form(self, t):
        estimate = l_one(eisenstein_series(t))
        expected = float(abs(mpmath.zeta(mpmath.mpc(1, t))) ** 2)
        assert abs(estimate.value - expected) < 1e-12
        assert estimate.error_estimate < 1e-5
        assert estimate.method == 'closed-form'

    @pytest.mark.parametrize('t', [1.0, 2.0])
    def test_eisenstein_smoothed_sums(self, t):
        f = eisenstein_series(t)
        expected = float(abs(mpmath.zeta(mpmath.mpc(1, t))) ** 2)
        for x in (500.0, 1000.0):
            smoothed = smoothed_l_one(f, x, int(40 * x)) - eisenstein_smoothing_correction(t, x)
            assert abs(smoothed - expected) < 1e-6
        assert l_one(f).error_estimate == max(eisenstein_smoothing_deviations(f))

    def test_divergent(self):
        with pytest.raises(DivergenceError):
            l_one(eisenstein_series(0.0))

    def test_synthetic(self, synthetic):
        estimate = l_one(synthetic)
        assert estimate.method == 'richardson'
        assert math.isfinite(estimate.value)

    def test_too_few_coefficients(self):
        with pytest.raises(DomainError):
            l_one(synthetic_coefficients(7, 1000))


class TestExpSumBound:
    def test_synthetic_bounded(self, synthetic):
        report = exp_sum_bound_check(synthetic)
        assert report.n_list == (256, 1024, 4096)
        assert report.bounded
        assert not report.alpha_zero_flagged

    def test_eisenstein_alpha_zero_flagged(self):
        report = exp_sum_bound_check(eisenstein_series(0.0))
        assert report.alpha_zero_flagged
        # d(n) partial sums grow like N log N
        assert report.alpha_zero_ratios[-1] > report.alpha_zero_ratios[0]
