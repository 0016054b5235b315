"""Core domain types: symbol spaces, potentials and weight sequences.

A potential is a real function of ``r`` consecutive symbols, stored as a
full table over words of length ``r``.  Weight sequences provide
deterministic indexed access to the multipliers w_n; every kind is a pure
function of its configuration, so two sequences built the same way agree
on every index, which is what makes grid evaluations reproducible.

Index convention: all sums run over n = 0..N-1 and w_0 is defined for
every kind.  The arithmetic kinds (Moebius, squarefree) set w_0 = 0 since
their natural domain starts at 1; a single shifted term changes no limit.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .errors import RangeError, ValidationError
from .weights import Substitution, fixed_point_prefix, moebius_sieve

MAX_DISTINCT_VALUES = 64

# Fractional part of the golden ratio; drives the low-discrepancy
# realization used by frequency-specified sequences.
_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class SymbolicSpace:
    """A finite alphabet of q >= 2 distinct single-character symbols."""

    labels: tuple[str, ...]

    def __post_init__(self):
        if len(self.labels) < 2:
            raise ValidationError("alphabet needs at least two symbols")
        if len(set(self.labels)) != len(self.labels):
            raise ValidationError("symbol labels must be distinct")
        for lab in self.labels:
            if len(lab) != 1:
                raise ValidationError(f"labels must be single characters, got {lab!r}")

    @property
    def q(self) -> int:
        return len(self.labels)

    def index_of_word(self, word: str) -> int:
        """Base-q integer code of a word, first symbol most significant."""
        idx = 0
        for c in word:
            idx = idx * self.q + self.labels.index(c)
        return idx

    def word_of_index(self, idx: int, length: int) -> str:
        out = []
        for _ in range(length):
            idx, rem = divmod(idx, self.q)
            out.append(self.labels[rem])
        return "".join(reversed(out))


def spin_space() -> SymbolicSpace:
    """The two-symbol space {-1, +1}, written '-' and '+'."""
    return SymbolicSpace(("-", "+"))


SPIN_VALUES = {"-": -1.0, "+": 1.0}


def binary_space() -> SymbolicSpace:
    """The two-symbol space {0, 1}."""
    return SymbolicSpace(("0", "1"))


BINARY_VALUES = {"0": 0.0, "1": 1.0}


class Potential:
    """A real function of r consecutive symbols, tabulated over all words.

    The table must be total on words of length r and all values finite.
    Internally the values live in an array indexed by the base-q word code,
    which is what the transfer-matrix builder consumes.
    """

    def __init__(self, space: SymbolicSpace, r: int, table: dict[str, float]):
        if r < 1:
            raise ValidationError("potential span r must be >= 1")
        size = space.q ** r
        if len(table) != size:
            raise ValidationError(
                f"table has {len(table)} entries, expected q**r = {size}"
            )
        values = np.empty(size, dtype=np.float64)
        seen = 0
        for word, val in table.items():
            if len(word) != r or any(c not in space.labels for c in word):
                raise ValidationError(f"bad word {word!r} for this space and span")
            if not math.isfinite(val):
                raise ValidationError(f"value for {word!r} is not finite")
            values[space.index_of_word(word)] = float(val)
            seen += 1
        assert seen == size
        self.space = space
        self.r = r
        self.values = values

    @property
    def table(self) -> dict[str, float]:
        return {
            self.space.word_of_index(i, self.r): float(v)
            for i, v in enumerate(self.values)
        }

    @property
    def max_abs(self) -> float:
        return float(np.abs(self.values).max())

    @classmethod
    def from_function(
        cls,
        space: SymbolicSpace,
        r: int,
        fn,
        symbol_values: dict[str, float],
    ) -> "Potential":
        """Tabulate ``fn`` applied to the numeric values of each word."""
        table = {}
        for idx in range(space.q ** r):
            word = space.word_of_index(idx, r)
            table[word] = fn(*(symbol_values[c] for c in word))
        return cls(space, r, table)

    @classmethod
    def from_file(cls, path) -> "Potential":
        """Load ``{"q": ..., "r": ..., "labels": [...], "table": {...}}`` JSON."""
        with open(path) as fh:
            data = json.load(fh)
        labels = tuple(data["labels"])
        if data.get("q", len(labels)) != len(labels):
            raise ValidationError("q does not match the number of labels")
        space = SymbolicSpace(labels)
        return cls(space, int(data["r"]), {w: float(v) for w, v in data["table"].items()})

    def to_file(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(
                {"q": self.space.q, "r": self.r, "labels": list(self.space.labels),
                 "table": self.table},
                fh, indent=1, sort_keys=True,
            )


def xy_potential(space: SymbolicSpace | None = None,
                 symbol_values: dict[str, float] | None = None) -> Potential:
    """f(x, y) = x*y, by default on the spin space {-1, +1}."""
    space = space or spin_space()
    symbol_values = symbol_values or SPIN_VALUES
    return Potential.from_function(space, 2, lambda x, y: x * y, symbol_values)


def affine_xy_potential(a: float, b: float, c: float) -> Potential:
    """f(x, y) = a*x*y + b*x + c*y on the spin space."""
    return Potential.from_function(
        spin_space(), 2, lambda x, y: a * x * y + b * x + c * y, SPIN_VALUES
    )


# ---------------------------------------------------------------------------
# Weight sequences


class WeightSequence:
    """Deterministic indexed access to weights w_n, n >= 0.

    Subclasses implement ``values(n)`` returning the prefix w_0..w_{n-1};
    repeated reads return identical values.  ``bound`` is a uniform bound
    on |w_n|.  Instances are immutable after construction apart from
    memoized prefix buffers, which only ever grow.
    """

    kind: str = "?"
    bound: float = 0.0

    def at(self, n: int) -> float:
        if n < 0:
            raise RangeError("n", n, 0, None)
        return float(self.values(n + 1)[n])

    def values(self, n: int) -> np.ndarray:
        raise NotImplementedError

    def describe(self) -> str:
        return self.kind


class _BufferedSequence(WeightSequence):
    """Base for kinds that memoize an expanding prefix buffer."""

    _MIN_BUFFER = 1024

    def __init__(self):
        self._buf = np.empty(0, dtype=np.float64)

    def _generate(self, n: int) -> np.ndarray:
        raise NotImplementedError

    def values(self, n: int) -> np.ndarray:
        if n < 0:
            raise RangeError("n", n, 0, None)
        if n > self._buf.size:
            target = max(n, 2 * self._buf.size, self._MIN_BUFFER)
            fresh = np.asarray(self._generate(target), dtype=np.float64)
            if self._buf.size and not np.array_equal(fresh[: self._buf.size], self._buf):
                raise AssertionError("sequence regeneration changed existing values")
            self._buf = fresh
        return self._buf[:n]


class ConstantWeights(WeightSequence):
    kind = "constant"

    def __init__(self, value: float = 1.0):
        self.value = float(value)
        self.bound = abs(self.value)

    def values(self, n: int) -> np.ndarray:
        if n < 0:
            raise RangeError("n", n, 0, None)
        return np.full(n, self.value)

    def describe(self) -> str:
        return f"constant({self.value:g})"


class FrequencyWeights(WeightSequence):
    """Deterministic finite-valued sequence realizing prescribed frequencies.

    Index n is assigned the value whose cumulative-frequency bin contains
    frac((n+1) * golden); the rotation is equidistributed with low
    discrepancy, so empirical frequencies converge to the prescribed ones
    at rate ~log(N)/N.
    """

    kind = "frequencies"

    def __init__(self, values, freqs):
        table = FrequencyTable(tuple(values), tuple(freqs), source="exact")
        self.table = table
        self._values = np.asarray(table.values, dtype=np.float64)
        self._cum = np.cumsum(table.freqs)
        self.bound = float(np.abs(self._values).max())

    def values(self, n: int) -> np.ndarray:
        if n < 0:
            raise RangeError("n", n, 0, None)
        u = ((np.arange(1, n + 1, dtype=np.float64) * _GOLDEN) % 1.0)
        idx = np.searchsorted(self._cum, u, side="right")
        return self._values[np.minimum(idx, len(self._values) - 1)]

    def describe(self) -> str:
        pairs = ",".join(f"{v:g}:{p:g}" for v, p in zip(self.table.values, self.table.freqs))
        return f"frequencies({pairs})"


class IIDWeights(_BufferedSequence):
    """I.i.d. draws from a finite value distribution.

    Backed by the counter-based Philox generator keyed by the seed, so
    w_n is a pure function of (seed, n): the n-th value can be produced
    either from the bulk stream or by advancing a fresh generator to
    position n, with identical results.
    """

    kind = "iid"

    def __init__(self, seed: int, values=(-1.0, 1.0), probs=None):
        super().__init__()
        self.seed = int(seed)
        self._values = np.asarray(values, dtype=np.float64)
        if probs is None:
            probs = np.full(len(self._values), 1.0 / len(self._values))
        self._probs = np.asarray(probs, dtype=np.float64)
        if len(self._probs) != len(self._values):
            raise ValidationError("values and probs must have equal lengths")
        if (self._probs < 0).any() or abs(self._probs.sum() - 1.0) > 1e-12:
            raise ValidationError("probs must be nonnegative and sum to 1")
        self._cum = np.cumsum(self._probs)
        self.bound = float(np.abs(self._values).max())

    def _uniforms(self, n: int) -> np.ndarray:
        return np.random.Generator(np.random.Philox(key=self.seed)).random(n)

    def uniform_at(self, n: int) -> float:
        """Stateless random access to the n-th uniform of the stream.

        Each Philox counter block yields four 64-bit outputs, so jump
        n // 4 blocks and draw within the block.
        """
        bg = np.random.Philox(key=self.seed)
        bg.advance(n // 4)
        return float(np.random.Generator(bg).random(n % 4 + 1)[-1])

    def _generate(self, n: int) -> np.ndarray:
        idx = np.searchsorted(self._cum, self._uniforms(n), side="right")
        return self._values[np.minimum(idx, len(self._values) - 1)]

    def describe(self) -> str:
        return f"iid(seed={self.seed})"


class SubstitutiveWeights(_BufferedSequence):
    """Fixed point of a substitution mapped letter-by-letter to values."""

    kind = "substitutive"

    def __init__(self, subst: Substitution, letter_values: dict[str, float]):
        super().__init__()
        missing = set(subst.alphabet) - set(letter_values)
        if missing:
            raise ValidationError(f"letter_values missing {sorted(missing)}")
        self.subst = subst
        self.letter_values = {a: float(v) for a, v in letter_values.items()}
        self.bound = max(abs(v) for v in self.letter_values.values())

    def _generate(self, n: int) -> np.ndarray:
        prefix = fixed_point_prefix(self.subst, n)
        lut = np.array(
            [self.letter_values[a] for a in self.subst.alphabet], dtype=np.float64
        )
        pos = {a: i for i, a in enumerate(self.subst.alphabet)}
        codes = np.fromiter((pos[c] for c in prefix), dtype=np.int64, count=len(prefix))
        return lut[codes]

    def describe(self) -> str:
        return f"substitutive(start={self.subst.start!r})"


class MoebiusWeights(_BufferedSequence):
    """w_n = mu(n) for n >= 1 and w_0 = 0."""

    kind = "moebius"
    bound = 1.0

    def _generate(self, n: int) -> np.ndarray:
        out = np.zeros(n, dtype=np.float64)
        if n > 1:
            out[1:] = moebius_sieve(n - 1)
        return out


class SquarefreeWeights(_BufferedSequence):
    """w_n = 1 if n is squarefree, else 0; w_0 = 0."""

    kind = "squarefree"
    bound = 1.0

    def _generate(self, n: int) -> np.ndarray:
        out = np.zeros(n, dtype=np.float64)
        if n > 1:
            out[1:] = moebius_sieve(n - 1) != 0
        return out


class FileWeights(WeightSequence):
    """Weights read from a text file, one real per line, index 0 first."""

    kind = "file"

    def __init__(self, path):
        self.path = str(path)
        with open(path) as fh:
            vals = [float(line) for line in fh if line.strip()]
        if not vals:
            raise ValidationError(f"weight file {self.path} is empty")
        self._vals = np.asarray(vals, dtype=np.float64)
        self.bound = float(np.abs(self._vals).max())

    def values(self, n: int) -> np.ndarray:
        if n < 0:
            raise RangeError("n", n, 0, None)
        if n > self._vals.size:
            raise RangeError(
                "n", n, 0, self._vals.size,
                f"file-backed sequence {self.path} has only {self._vals.size} entries",
            )
        return self._vals[:n]

    def describe(self) -> str:
        return f"file({self.path})"


def weight_at(w: WeightSequence, n: int) -> float:
    """The weight w_n; deterministic across calls and runs."""
    return w.at(n)


# ---------------------------------------------------------------------------
# Frequency tables


@dataclass(frozen=True)
class FrequencyTable:
    """Distinct values with their limiting or sampled frequencies.

    ``source`` is "exact" for analytically known frequencies or
    "estimated" (with ``sample_size``) for counting proportions.  Values
    are compared exactly; they are user-specified symbols, not computed
    floats.
    """

    values: tuple
    freqs: tuple[float, ...]
    source: str = "exact"
    sample_size: int | None = None

    def __post_init__(self):
        if len(self.values) != len(self.freqs):
            raise ValidationError("values and freqs must have equal lengths")
        if len(set(self.values)) != len(self.values):
            raise ValidationError("values must be distinct")
        if any(p < 0 for p in self.freqs):
            raise ValidationError("frequencies must be nonnegative")
        if abs(math.fsum(self.freqs) - 1.0) > 1e-12:
            raise ValidationError("frequencies must sum to 1 within 1e-12")
        if self.source not in ("exact", "estimated"):
            raise ValidationError(f"unknown source {self.source!r}")

    def as_arrays(self) -> tuple[np.ndarray, np.ndarray]:
        return (np.asarray(self.values, dtype=np.float64),
                np.asarray(self.freqs, dtype=np.float64))

    @classmethod
    def single(cls, value: float) -> "FrequencyTable":
        return cls((float(value),), (1.0,), source="exact")

    @classmethod
    def moebius(cls) -> "FrequencyTable":
        """Limiting frequencies of mu(n): +-1 each with density 3/pi^2."""
        s = 6.0 / math.pi ** 2
        return cls((-1.0, 0.0, 1.0), (s / 2.0, 1.0 - s, s / 2.0), source="exact")


def empirical_frequencies(
    w: WeightSequence, n: int, max_distinct: int = MAX_DISTINCT_VALUES
) -> FrequencyTable:
    """Counting proportions of w_1..w_n (the index-0 term is excluded).

    Raises if the sequence takes more than ``max_distinct`` distinct values
    over the window, which signals it is not finite-valued.
    """
    if n < 1:
        raise RangeError("n", n, 1, None)
    vals = w.values(n + 1)[1:]
    uniq, counts = np.unique(vals, return_counts=True)
    if uniq.size > max_distinct:
        raise ValidationError(
            f"sequence takes {uniq.size} > {max_distinct} distinct values; "
            "not finite-valued"
        )
    freqs = counts / float(n)
    return FrequencyTable(
        tuple(float(v) for v in uniq),
        tuple(float(p) for p in freqs),
        source="estimated",
        sample_size=n,
    )
