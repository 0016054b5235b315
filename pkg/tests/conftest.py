"""Shared fixtures and independent oracles used across the test suite.

The oracles here deliberately avoid the library's own computation paths:
partition functions are brute-force sums over explicit word tuples, the
Moebius function is recomputed by trial division, and entropy terms are
written out directly.
"""

import itertools
import math

import numpy as np
import pytest

from thermosym.model import Potential


def moebius_by_factorization(n: int) -> int:
    """Trial-division Moebius value; independent of the sieve."""
    if n == 1:
        return 1
    count = 0
    m = n
    p = 2
    while p * p <= m:
        if m % p == 0:
            m //= p
            if m % p == 0:
                return 0
            count += 1
        else:
            p += 1
    if m > 1:
        count += 1
    return (-1) ** count


def brute_force_log_partition(
    weights, potential: Potential, lam: float, n: int
) -> float:
    """log E exp(lam * sum_{k<n} w_k f(x_k..x_{k+r-1})) by direct enumeration.

    Loops over explicit tuples of symbol indices with itertools; no shared
    code with the library's exact or transfer paths.
    """
    q = potential.space.q
    r = potential.r
    length = n + r - 1
    if hasattr(weights, "at"):
        w = [weights.at(k) for k in range(n)]
    else:
        w = list(weights)
    terms = []
    for word in itertools.product(range(q), repeat=length):
        s = 0.0
        for k in range(n):
            idx = 0
            for j in range(r):
                idx = idx * q + word[k + j]
            s += w[k] * potential.values[idx]
        terms.append(lam * s)
    m = max(terms)
    return m + math.log(sum(math.exp(t - m) for t in terms)) - length * math.log(q)


def binary_entropy(x: float) -> float:
    if x in (0.0, 1.0):
        return 0.0
    return -x * math.log(x) - (1.0 - x) * math.log(1.0 - x)


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
