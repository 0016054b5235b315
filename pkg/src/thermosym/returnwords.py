"""Return words: occurrences of a prefix, the words between them, and the
induced decomposition of a sequence.

A return word over a prefix ``u`` of ``x`` is a factor of ``x`` running
from one occurrence of ``u`` to the next.  Because the analysis always
starts from a prefix, the decomposition of ``x`` into return words starts
at index 0 and is unique; concatenating the blocks reproduces the scanned
part of the sequence exactly.

All scans are horizon-bounded: the return-word set is only "observed
within N" and carries a stability flag from comparing against the
half-horizon scan.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .errors import HorizonError, RangeError, ValidationError
from .model import FrequencyTable


def _as_word(x):
    """Normalize a sequence to an indexable, sliceable, hashable word type."""
    if isinstance(x, str):
        return x
    return tuple(x)


def occurrences(x, u, horizon: int) -> list[int]:
    """All start indices i <= horizon - len(u) with x[i:i+len(u)] == u.

    Overlapping occurrences are included.
    """
    x = _as_word(x)
    u = _as_word(u)
    if len(u) < 1:
        raise RangeError("len(u)", 0, 1, None)
    if horizon > len(x):
        raise HorizonError(f"horizon {horizon} exceeds available length {len(x)}")
    if horizon < len(u):
        return []
    codes: dict = {}
    arr = np.fromiter(
        (codes.setdefault(c, len(codes)) for c in x[:horizon]),
        dtype=np.int64,
        count=horizon,
    )
    if any(c not in codes for c in u):
        return []
    m = len(u)
    limit = horizon - m + 1
    ok = np.ones(limit, dtype=bool)
    for j, c in enumerate(u):
        ok &= arr[j: j + limit] == codes[c]
    return np.flatnonzero(ok).tolist()


def minimal_period(u) -> int:
    """Smallest p with u[i] == u[i+p] for all i; len(u) if none exists."""
    u = _as_word(u)
    n = len(u)
    for p in range(1, n):
        if all(u[i] == u[i + p] for i in range(n - p)):
            return p
    return n


def is_periodic(u) -> bool:
    """Whether the word repeats with a period no longer than half its length.

    Words failing this have all their return words at least half as long
    as the word itself: a shorter return word would force exactly such a
    period through the overlap of consecutive occurrences.
    """
    u = _as_word(u)
    return minimal_period(u) <= len(u) // 2


@dataclass(frozen=True)
class ReturnWordDecomposition:
    """Decomposition of a sequence prefix into return words over ``prefix_u``.

    ``returns`` lists the distinct return words in order of first
    appearance; ``sequence`` indexes into it, one entry per completed
    block; ``coverage`` counts the symbols consumed (the trailing
    incomplete block is dropped).  ``stable`` records whether the observed
    return-word set matched the half-horizon scan.
    """

    prefix_u: object
    returns: tuple
    sequence: tuple[int, ...]
    freqs: FrequencyTable
    coverage: int
    stable: bool

    def blocks(self):
        return [self.returns[i] for i in self.sequence]

    def to_json(self) -> str:
        def render(word):
            return word if isinstance(word, str) else list(word)

        return json.dumps(
            {
                "prefix": render(self.prefix_u),
                "returns": [
                    {"word": render(w), "length": len(w), "frequency": p}
                    for w, p in zip(self.freqs.values, self.freqs.freqs)
                ],
                "sequence": list(self.sequence),
                "coverage": self.coverage,
                "stable": self.stable,
            },
            indent=1,
        )


def return_words(x, u, horizon: int) -> set:
    """The set of factors of x between successive occurrences of u.

    Requires u to be a prefix of x and at least two occurrences within the
    horizon.
    """
    x = _as_word(x)
    u = _as_word(u)
    if x[: len(u)] != u:
        raise ValidationError("u must be a prefix of x")
    occ = occurrences(x, u, horizon)
    if len(occ) < 2:
        raise HorizonError(
            f"only {len(occ)} occurrence(s) of the prefix within horizon {horizon}; "
            "need at least 2"
        )
    return {x[i:j] for i, j in zip(occ[:-1], occ[1:])}


def decompose(x, u, horizon: int) -> ReturnWordDecomposition:
    """Unique decomposition of x[:coverage] into return words over u."""
    x = _as_word(x)
    u = _as_word(u)
    if x[: len(u)] != u:
        raise ValidationError("u must be a prefix of x")
    occ = occurrences(x, u, horizon)
    if len(occ) < 2:
        raise HorizonError(
            f"only {len(occ)} occurrence(s) of the prefix within horizon {horizon}; "
            "need at least 2"
        )
    words: list = []
    index: dict = {}
    seq: list[int] = []
    for i, j in zip(occ[:-1], occ[1:]):
        block = x[i:j]
        if block not in index:
            index[block] = len(words)
            words.append(block)
        seq.append(index[block])
    coverage = occ[-1]
    counts = np.bincount(seq, minlength=len(words))
    freqs = FrequencyTable(
        tuple(words),
        tuple(float(c) / len(seq) for c in counts),
        source="estimated",
        sample_size=len(seq),
    )
    # stability: does halving the horizon see the same return words?
    stable = False
    half = horizon // 2
    if half >= 2 * len(u):
        try:
            stable = return_words(x, u, half) == set(words)
        except HorizonError:
            stable = False
    return ReturnWordDecomposition(
        prefix_u=u,
        returns=tuple(words),
        sequence=tuple(seq),
        freqs=freqs,
        coverage=coverage,
        stable=stable,
    )
