"""Occurrences, return-word sets and decompositions."""

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from thermosym.errors import HorizonError, ValidationError
from thermosym.returnwords import (
    decompose,
    is_periodic,
    occurrences,
    return_words,
)
from thermosym.weights import fixed_point_prefix, thue_morse


def tm_prefix_by_bit_parity(n: int) -> str:
    """Independent Thue-Morse oracle: symbol k is the parity of popcount(k)."""
    return "".join(str(bin(k).count("1") % 2) for k in range(n))


# The first 19 blocks of the u="0" decomposition of the true fixed point,
# frozen from the bit-parity oracle (see test_decomposition_matches_oracle).
TM_FIRST_19_BLOCKS = [
    "011", "01", "0", "011", "0", "01", "011", "01", "0", "01",
    "011", "0", "011", "01", "0", "011", "0", "01", "011",
]


class TestOccurrences:
    def test_overlapping(self):
        assert occurrences("0101010", "010", 7) == [0, 2, 4]

    def test_thue_morse_zero_positions(self):
        x = fixed_point_prefix(thue_morse(), 8)
        assert x[:8] == "01101001"
        assert occurrences(x, "0", 8) == [0, 3, 5, 6]

    def test_u_longer_than_horizon(self):
        assert occurrences("0101", "01010101", 4) == []

    def test_symbol_absent(self):
        assert occurrences("0000", "1", 4) == []

    def test_tuple_sequences(self):
        x = (1.0, -1.0, 1.0, 1.0, -1.0)
        assert occurrences(x, (1.0, -1.0), 5) == [0, 3]

    def test_horizon_beyond_data(self):
        with pytest.raises(HorizonError):
            occurrences("0101", "01", 10)


class TestReturnWordSets:
    def test_thue_morse_u0(self):
        x = fixed_point_prefix(thue_morse(), 1 << 12)
        assert return_words(x, "0", 1 << 12) == {"0", "01", "011"}

    def test_thue_morse_u01(self):
        x = fixed_point_prefix(thue_morse(), 1 << 12)
        assert return_words(x, "01", 1 << 12) == {"01", "010", "011", "0110"}

    def test_periodic_single_return_word(self):
        x = "01" * 64
        assert return_words(x, "01", len(x)) == {"01"}

    def test_prefix_required(self):
        with pytest.raises(ValidationError):
            return_words("0110", "11", 4)

    def test_insufficient_horizon(self):
        x = fixed_point_prefix(thue_morse(), 64)
        with pytest.raises(HorizonError):
            return_words(x, x[:32], 40)


class TestDecomposition:
    def test_matches_bit_parity_oracle(self):
        # library path: substitution iteration; oracle: popcount parity
        horizon = 1 << 10
        x = fixed_point_prefix(thue_morse(), horizon)
        assert x[:horizon] == tm_prefix_by_bit_parity(horizon)
        dec = decompose(x, "0", horizon)
        oracle_occ = [i for i in range(horizon) if x[i] == "0"]
        oracle_blocks = [x[i:j] for i, j in zip(oracle_occ[:-1], oracle_occ[1:])]
        assert dec.blocks() == oracle_blocks
        assert dec.blocks()[:19] == TM_FIRST_19_BLOCKS

    def test_reconstruction_identity(self):
        x = fixed_point_prefix(thue_morse(), 1 << 12)
        for u in ("0", "01", "011010"):
            dec = decompose(x, u, 1 << 12)
            assert "".join(dec.blocks()) == x[: dec.coverage]

    def test_constant_word(self):
        x = "a" * 50
        dec = decompose(x, "a", 50)
        assert dec.blocks() == ["a"] * 49
        assert dec.freqs.values == ("a",)

    def test_lengths_at_least_half_prefix_for_aperiodic(self):
        x = fixed_point_prefix(thue_morse(), 1 << 14)
        for n in (4, 8, 16):
            u = x[:n]
            assert not is_periodic(u)
            dec = decompose(x, u, 1 << 14)
            assert min(len(w) for w in dec.returns) >= n / 2

    def test_frequency_stability_under_doubling(self):
        x = fixed_point_prefix(thue_morse(), 1 << 13)
        small = decompose(x, "0", 1 << 12)
        large = decompose(x, "0", 1 << 13)
        ps = dict(zip(small.freqs.values, small.freqs.freqs))
        pl = dict(zip(large.freqs.values, large.freqs.freqs))
        assert set(ps) == set(pl)
        for wrd in ps:
            assert abs(ps[wrd] - pl[wrd]) <= 0.02
        assert large.stable

    def test_json_export(self):
        x = fixed_point_prefix(thue_morse(), 256)
        blob = decompose(x, "0", 256).to_json()
        assert '"prefix": "0"' in blob and '"coverage"' in blob

    @settings(max_examples=60, deadline=None)
    @given(st.text(alphabet="ab", min_size=8, max_size=120), st.integers(1, 4))
    def test_reconstruction_on_random_words(self, body, ulen):
        x = "a" + body
        u = x[:ulen]
        try:
            dec = decompose(x, u, len(x))
        except HorizonError:
            return
        assert "".join(dec.blocks()) == x[: dec.coverage]
        # blocks never overlap and each starts with an occurrence of u
        pos = 0
        for b in dec.blocks():
            assert x[pos: pos + len(u)] == u
            pos += len(b)


class TestPeriodicity:
    def test_periodic_detection(self):
        assert is_periodic("010101")
        assert is_periodic("aaaa")
        assert not is_periodic("0110")
        assert not is_periodic("0")
