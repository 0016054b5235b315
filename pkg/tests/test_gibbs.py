"""The inhomogeneous Markov measure: structure, cylinders, sampling, dimension."""

import itertools
import math

import numpy as np
import pytest

from thermosym.errors import RangeError, ValidationError
from thermosym.gibbs import InhomMarkov
from thermosym.legendre import spectrum
from thermosym.model import (
    ConstantWeights,
    FrequencyTable,
    MoebiusWeights,
    xy_potential,
)
from thermosym.partition import exact_partition
from thermosym.pressure import closed_form_psi_prime


class TestChainStructure:
    def test_row_stochastic_and_left_invariant(self):
        m = InhomMarkov(1.3, MoebiusWeights(), horizon=50)
        half = np.array([0.5, 0.5])
        for n in range(50):
            p = m.transition_matrix(n)
            assert np.abs(p.sum(axis=1) - 1.0).max() <= 1e-14
            assert np.abs(half @ p - half).max() <= 1e-14
            assert (p > 0).all()

    def test_matrix_entries(self):
        lam, w0 = 0.7, -1.0
        m = InhomMarkov(lam, ConstantWeights(w0), horizon=3)
        a = lam * w0
        denom = math.exp(a) + math.exp(-a)
        p = m.transition_matrix(0)
        # same-sign transitions carry e^a (states ordered -1, +1)
        assert p[0, 0] == pytest.approx(math.exp(a) / denom, rel=1e-15)
        assert p[0, 1] == pytest.approx(math.exp(-a) / denom, rel=1e-15)


class TestCylinders:
    def test_lambda_zero_uniform(self):
        m = InhomMarkov(0.0, MoebiusWeights(), horizon=40)
        for word in ([1, 1, -1], [-1] * 10, [1]):
            n = len(word) - 1
            assert m.cylinder_measure(word) == pytest.approx(
                0.5 ** (n + 1), rel=1e-13
            )

    def test_normalization(self):
        m = InhomMarkov(0.9, MoebiusWeights(), horizon=16)
        for n in (1, 5, 10):
            total = math.fsum(
                m.cylinder_measure(word)
                for word in itertools.product((-1, 1), repeat=n + 1)
            )
            assert total == pytest.approx(1.0, abs=1e-12)

    def test_gibbs_identity_vs_exact_partition(self):
        p = xy_potential()
        for weights in (MoebiusWeights(), ConstantWeights(1.0)):
            m = InhomMarkov(1.1, weights, horizon=10)
            w = weights.values(8)
            log_z = exact_partition(weights, p, 1.1, 8).log_z
            for word in itertools.product((-1, 1), repeat=9):
                x = np.array(word)
                s = float((w * x[:-1] * x[1:]).sum())
                lhs = m.log_cylinder_measure(word) + 9 * math.log(2.0) + log_z
                assert lhs == pytest.approx(1.1 * s, abs=1e-12)

    def test_bad_symbols_rejected(self):
        m = InhomMarkov(1.0, ConstantWeights(1.0), horizon=4)
        with pytest.raises(ValidationError):
            m.cylinder_measure([1, 0, 1])
        with pytest.raises(RangeError):
            m.cylinder_measure([1] * 10)


class TestSampling:
    def test_reproducible_and_count_independent(self):
        m = InhomMarkov(0.8, MoebiusWeights(), horizon=64)
        a = m.sample_paths(length=32, count=5, seed=77)
        b = m.sample_paths(length=32, count=9, seed=77)
        assert np.array_equal(a.paths, b.paths[:5])
        c = m.sample_paths(length=32, count=5, seed=78)
        assert not np.array_equal(a.paths, c.paths)

    def test_lambda_zero_symmetric(self):
        k = 4000
        m = InhomMarkov(0.0, ConstantWeights(1.0), horizon=16)
        res = m.sample_paths(length=16, count=k, seed=5)
        assert np.abs(res.step_product_mean).max() <= 4.0 / math.sqrt(k)

    def test_lln_constant_weights(self):
        k = 20_000
        m = InhomMarkov(1.0, ConstantWeights(1.0), horizon=16)
        res = m.sample_paths(length=9, count=k, seed=11)
        assert abs(res.product_mean - math.tanh(1.0)) < 0.02
        assert np.allclose(res.analytic_step_mean, math.tanh(1.0))

    def test_running_average_moebius_single_path(self):
        n = 10 ** 5
        m = InhomMarkov(1.0, MoebiusWeights(), horizon=n)
        res = m.sample_paths(length=n, count=1, seed=3)
        want = (6.0 / math.pi ** 2) * math.tanh(1.0)
        assert abs(res.running_weighted_mean[-1] - want) < 0.02
        # the same limit through the closed-form derivative at lam = 1
        assert want == pytest.approx(
            closed_form_psi_prime(FrequencyTable.moebius(), 1.0), rel=1e-12
        )

    def test_csv_and_summary(self):
        m = InhomMarkov(0.5, MoebiusWeights(), horizon=8)
        res = m.sample_paths(length=8, count=10, seed=1)
        text = res.to_csv()
        assert text.startswith("n,w_n,mean_product,analytic_mean")
        summ = res.summary()
        assert summ["paths"] == 10 and summ["length"] == 8


class TestLocalDimension:
    def test_lambda_zero_exactly_one(self):
        m = InhomMarkov(0.0, MoebiusWeights(), horizon=2048)
        path = m.sample_paths(length=2049, count=1, seed=9).paths[0]
        dims = m.local_dimension_estimate(path, [1, 10, 100, 2049])
        assert (dims == 1.0).all()

    def test_constant_weight_closed_form(self):
        n = 10 ** 5
        m = InhomMarkov(1.0, ConstantWeights(1.0), horizon=n)
        path = m.sample_paths(length=n, count=1, seed=21).paths[0]
        dim = m.local_dimension_estimate(path, [n])[0]
        want = (math.log(math.e + math.exp(-1.0)) - math.tanh(1.0)) / math.log(2.0)
        assert abs(dim - want) < 0.01

    def test_matches_spectrum_at_derivative_slope(self):
        lam = 1.0
        ft = FrequencyTable.single(1.0)
        alpha = closed_form_psi_prime(ft, lam)
        want = spectrum(ft, alpha).dim_lower
        n = 10 ** 5
        m = InhomMarkov(lam, ConstantWeights(1.0), horizon=n)
        path = m.sample_paths(length=n, count=1, seed=33).paths[0]
        dim = m.local_dimension_estimate(path, [n])[0]
        assert abs(dim - want) < 0.01
