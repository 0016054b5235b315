"""Generators for structured weight sequences.

Two families are produced here: fixed points of letter substitutions
(Thue-Morse and friends) and the Moebius / squarefree indicator values
obtained from a prime sieve.  Both are deterministic and cheap to extend,
which is what the rest of the toolkit relies on for reproducible runs.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .errors import RangeError, ValidationError

# Hard cap on sieve size; above this the table alone costs ~0.5 GB.
SIEVE_LIMIT = 1 << 27


@dataclass(frozen=True)
class Substitution:
    """A letter-rewriting map ``letter -> word`` iterated from a start letter.

    ``rules[start]`` must begin with ``start`` so that successive iterates
    extend one another, and the iterates must grow without bound; both are
    checked on construction.  Letters are single characters and words are
    plain strings.
    """

    alphabet: tuple[str, ...]
    rules: dict[str, str] = field(hash=False)
    start: str

    def __post_init__(self):
        if len(set(self.alphabet)) != len(self.alphabet):
            raise ValidationError("alphabet letters must be distinct")
        for a in self.alphabet:
            if len(a) != 1:
                raise ValidationError(f"letters must be single characters, got {a!r}")
        if self.start not in self.alphabet:
            raise ValidationError(f"start letter {self.start!r} not in alphabet")
        if set(self.rules) != set(self.alphabet):
            raise ValidationError("rules must cover exactly the alphabet")
        for a, word in self.rules.items():
            if not word:
                raise ValidationError(f"rule for {a!r} maps to the empty word")
            if set(word) - set(self.alphabet):
                raise ValidationError(f"rule for {a!r} uses letters outside the alphabet")
        if self.rules[self.start][0] != self.start:
            raise ValidationError(
                f"rule for start letter must begin with it: "
                f"{self.start!r} -> {self.rules[self.start]!r}"
            )
        if not self._iterates_grow():
            raise ValidationError(
                "iterates of the start letter stay bounded; no infinite fixed point"
            )

    def _iterates_grow(self) -> bool:
        # Track the set of letters present in successive iterates.  The set
        # sequence is eventually periodic; iterates grow without bound iff
        # some recurrent set contains a letter with an image of length >= 2.
        seen: dict[frozenset, int] = {}
        current = frozenset(self.start)
        while current not in seen:
            seen[current] = len(seen)
            current = frozenset(c for a in current for c in self.rules[a])
        cycle_start = seen[current]
        recurrent = [s for s, k in seen.items() if k >= cycle_start]
        return any(len(self.rules[a]) >= 2 for s in recurrent for a in s)

    def apply(self, word: str) -> str:
        return "".join(self.rules[a] for a in word)

    def incidence_matrix(self) -> np.ndarray:
        """Matrix M with M[i, j] = number of occurrences of letter j in rules[letter i]."""
        m = np.zeros((len(self.alphabet), len(self.alphabet)), dtype=np.int64)
        pos = {a: i for i, a in enumerate(self.alphabet)}
        for a, word in self.rules.items():
            for c in word:
                m[pos[a], pos[c]] += 1
        return m

    @classmethod
    def from_file(cls, path) -> "Substitution":
        """Load ``{"alphabet": [...], "rules": {...}, "start": "..."}`` JSON."""
        with open(path) as fh:
            data = json.load(fh)
        return cls(tuple(data["alphabet"]), dict(data["rules"]), data["start"])


def thue_morse() -> Substitution:
    return Substitution(("0", "1"), {"0": "01", "1": "10"}, "0")


def fixed_point_prefix(subst: Substitution, n: int) -> str:
    """Prefix of length >= n of the unique fixed point of ``subst``.

    Iterates the substitution on a buffer until it is long enough; each
    iterate is a prefix of the next, so the result is a genuine prefix of
    the infinite fixed point.
    """
    if n < 1:
        raise RangeError("n", n, 1, None)
    word = subst.start
    while len(word) < n:
        nxt = subst.apply(word)
        if len(nxt) == len(word):
            # cannot happen for validated substitutions, but guard anyway
            raise ValidationError("substitution stopped growing")
        word = nxt
    return word


def primitivity_check(subst: Substitution) -> tuple[bool, int | None]:
    """Whether some power of the incidence matrix is entrywise positive.

    Returns ``(True, k)`` with the smallest witness power, searching up to
    the standard ``len(alphabet)**2`` bound, or ``(False, None)``.
    """
    m = subst.incidence_matrix() > 0
    power = m.copy()
    for k in range(1, len(subst.alphabet) ** 2 + 1):
        if power.all():
            return True, k
        power = (power @ m) > 0
    return False, None


def moebius_sieve(n: int) -> np.ndarray:
    """Values mu(1), ..., mu(n) via a smallest-prime-factor sieve.

    mu(m) is +-1 on squarefree m by parity of the number of prime factors
    and 0 otherwise.  O(n log log n) to build the factor table, one pass to
    fill in mu.
    """
    if n < 1:
        raise RangeError("n", n, 1, SIEVE_LIMIT)
    if n > SIEVE_LIMIT:
        raise RangeError("n", n, 1, SIEVE_LIMIT, "sieve exceeds memory budget")
    spf = np.zeros(n + 1, dtype=np.int64)
    for i in range(2, n + 1):
        if spf[i] == 0:
            sl = spf[i::i]
            sl[sl == 0] = i
    spf_list = spf.tolist()
    mu = [0] * (n + 1)
    mu[1] = 1
    for m in range(2, n + 1):
        p = spf_list[m]
        rest = m // p
        mu[m] = 0 if rest % p == 0 else -mu[rest]
    return np.array(mu[1:], dtype=np.int8)


def squarefree_indicator(n: int) -> np.ndarray:
    """Indicator of squarefree integers for 1..n (the square of mu)."""
    return (moebius_sieve(n) != 0).astype(np.int8)
