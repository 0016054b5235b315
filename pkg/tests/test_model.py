"""Spaces, potentials, weight sequences and empirical frequencies."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from thermosym.errors import RangeError, ValidationError
from thermosym.model import (
    ConstantWeights,
    FileWeights,
    FrequencyTable,
    FrequencyWeights,
    IIDWeights,
    MoebiusWeights,
    Potential,
    SquarefreeWeights,
    SubstitutiveWeights,
    SymbolicSpace,
    affine_xy_potential,
    empirical_frequencies,
    spin_space,
    weight_at,
    xy_potential,
)
from thermosym.weights import thue_morse


class TestSpaceAndPotential:
    def test_space_invariants(self):
        with pytest.raises(ValidationError):
            SymbolicSpace(("a",))
        with pytest.raises(ValidationError):
            SymbolicSpace(("a", "a"))
        assert SymbolicSpace(("a", "b", "c")).q == 3

    def test_word_index_roundtrip(self):
        sp = SymbolicSpace(("a", "b", "c"))
        for idx in range(27):
            word = sp.word_of_index(idx, 3)
            assert sp.index_of_word(word) == idx

    def test_xy_potential_table(self):
        p = xy_potential()
        assert p.table == {"--": 1.0, "-+": -1.0, "+-": -1.0, "++": 1.0}

    def test_affine_potential(self):
        p = affine_xy_potential(2.0, 0.5, -1.0)
        # f(x, y) = 2xy + 0.5x - y at x=+1, y=-1
        assert p.table["+-"] == pytest.approx(-2.0 + 0.5 + 1.0)

    def test_table_must_be_total(self):
        sp = spin_space()
        with pytest.raises(ValidationError):
            Potential(sp, 2, {"--": 1.0, "-+": -1.0, "+-": -1.0})
        with pytest.raises(ValidationError):
            Potential(sp, 1, {"-": math.inf, "+": 0.0})

    def test_file_roundtrip(self, tmp_path):
        p = affine_xy_potential(1.0, 0.25, 0.0)
        path = tmp_path / "pot.json"
        p.to_file(path)
        back = Potential.from_file(path)
        assert back.r == p.r
        assert back.table == p.table


class TestWeightKinds:
    def test_constant(self):
        assert weight_at(ConstantWeights(1.0), 7) == 1.0

    def test_moebius_values(self):
        w = MoebiusWeights()
        assert w.at(0) == 0.0  # index-0 convention for arithmetic kinds
        assert w.at(6) == 1.0  # mu(2*3) = (-1)^2
        assert w.at(4) == 0.0
        assert w.values(11)[1:].tolist() == [1, -1, -1, 0, -1, 1, -1, 0, 0, 1]

    def test_squarefree_values(self):
        w = SquarefreeWeights()
        assert w.at(12) == 0.0  # 4 | 12
        assert w.at(10) == 1.0
        assert w.at(0) == 0.0

    def test_substitutive_thue_morse_pm1(self):
        w = SubstitutiveWeights(thue_morse(), {"0": -1.0, "1": 1.0})
        assert w.values(8).tolist() == [-1, 1, 1, -1, 1, -1, -1, 1]
        assert w.bound == 1.0

    def test_file_weights(self, tmp_path):
        path = tmp_path / "w.txt"
        path.write_text("0.5\n-1.5\n2.0\n")
        w = FileWeights(path)
        assert w.at(0) == 0.5
        assert w.bound == 2.0
        with pytest.raises(RangeError):
            w.at(3)

    def test_iid_scalar_matches_bulk(self):
        w = IIDWeights(seed=123, values=(-1.0, 0.0, 1.0), probs=(0.25, 0.5, 0.25))
        bulk = w.values(200)
        fresh = IIDWeights(seed=123, values=(-1.0, 0.0, 1.0), probs=(0.25, 0.5, 0.25))
        # stateless counter access agrees with the buffered stream
        for n in (0, 1, 17, 63, 199):
            u = fresh.uniform_at(n)
            j = np.searchsorted(np.cumsum(fresh._probs), u, side="right")
            assert fresh._values[min(j, 2)] == bulk[n]

    def test_iid_determinism_across_instances(self):
        a = IIDWeights(seed=9, values=(0.0, 2.0))
        b = IIDWeights(seed=9, values=(0.0, 2.0))
        assert np.array_equal(a.values(10_000), b.values(10_000))
        c = IIDWeights(seed=10, values=(0.0, 2.0))
        assert not np.array_equal(a.values(10_000), c.values(10_000))

    @settings(max_examples=25, deadline=None)
    @given(st.integers(0, 10 ** 6))
    def test_weight_at_pure_function_of_config(self, n):
        # sampled property: identical configuration -> identical w_n
        a = IIDWeights(seed=4, values=(-1.0, 1.0))
        b = IIDWeights(seed=4, values=(-1.0, 1.0))
        assert a.at(n) == b.at(n)

    def test_buffer_extension_is_stable(self):
        w = MoebiusWeights()
        head = w.values(100).copy()
        w.values(100_000)
        assert np.array_equal(w.values(100), head)


class TestFrequencies:
    def test_constant_frequencies(self):
        ft = empirical_frequencies(ConstantWeights(1.0), 100)
        assert ft.values == (1.0,)
        assert ft.freqs == (1.0,)
        assert ft.source == "estimated" and ft.sample_size == 100

    def test_moebius_nonzero_density(self):
        ft = empirical_frequencies(MoebiusWeights(), 10 ** 6)
        nonzero = sum(p for v, p in zip(ft.values, ft.freqs) if v != 0.0)
        assert abs(nonzero - 6.0 / math.pi ** 2) < 1e-3

    def test_squarefree_density_vs_sieve_count_oracle(self):
        n = 10 ** 6
        ft = empirical_frequencies(SquarefreeWeights(), n)
        freq_one = dict(zip(ft.values, ft.freqs))[1.0]
        # independent sieve-of-squares count
        free = np.ones(n + 1, dtype=bool)
        for p in range(2, int(math.isqrt(n)) + 1):
            free[p * p:: p * p] = False
        assert freq_one == pytest.approx(free[1:].sum() / n, abs=0)
        assert abs(freq_one - 6.0 / math.pi ** 2) < 1e-3

    def test_counts_majorize_at_doubled_window(self):
        w = SubstitutiveWeights(thue_morse(), {"0": 0.0, "1": 3.0})
        m = 4096
        small = empirical_frequencies(w, m)
        large = empirical_frequencies(w, 2 * m)
        for v, p in zip(small.values, small.freqs):
            big = dict(zip(large.values, large.freqs))[v]
            # counts at 2m contain the counts at m
            assert big * 2 * m >= p * m - 1e-9

    def test_distinct_value_cap(self):
        w = IIDWeights(seed=0, values=tuple(range(80)), probs=(1 / 80,) * 80)
        with pytest.raises(ValidationError):
            empirical_frequencies(w, 10_000, max_distinct=64)

    def test_frequency_table_validation(self):
        with pytest.raises(ValidationError):
            FrequencyTable((1.0, 2.0), (0.5, 0.6))
        with pytest.raises(ValidationError):
            FrequencyTable((1.0, 1.0), (0.5, 0.5))
        with pytest.raises(ValidationError):
            FrequencyTable((1.0, 2.0), (-0.1, 1.1))

    def test_moebius_exact_table(self):
        ft = FrequencyTable.moebius()
        s = 6.0 / math.pi ** 2
        assert dict(zip(ft.values, ft.freqs)) == {
            -1.0: s / 2.0, 0.0: 1.0 - s, 1.0: s / 2.0
        }

    def test_frequency_weights_converge(self):
        w = FrequencyWeights((-1.0, 0.0, 1.0), (0.2, 0.3, 0.5))
        ft = empirical_frequencies(w, 200_000)
        got = dict(zip(ft.values, ft.freqs))
        assert abs(got[-1.0] - 0.2) < 1e-3
        assert abs(got[0.0] - 0.3) < 1e-3
        assert abs(got[1.0] - 0.5) < 1e-3
