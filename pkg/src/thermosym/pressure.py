"""Pressure estimation and its diagnostics.

The pressure reported everywhere is psi(lam) = (1/n) log Z_n(lam) + log q,
which is exactly log q at lam = 0 and convex in lam.  Finite-n estimates
never claim a limit exists; every curve carries the stabilization gap
|psi_n - psi_{n/2}| instead.

For weights times +-1-valued symbol products on two symbols the pressure
has a closed form driven only by the value frequencies,
    psi(lam) = sum_j p_j log(exp(lam v_j) + exp(-lam v_j)),
with explicit first and second derivatives; these are the reference
curves the finite-n machinery is validated against.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateProductError, RangeError, ValidationError
from .model import FrequencyTable, Potential, WeightSequence
from .partition import LogScaledMatrix, log_partition_grid
from .returnwords import decompose, is_periodic

DEFAULT_LAMBDA_GRID = (-8.0, 8.0, 257)


def lambda_grid(lo: float = None, hi: float = None, steps: int = None) -> np.ndarray:
    """The default sampling grid for pressure curves, overridable piecewise."""
    lo = DEFAULT_LAMBDA_GRID[0] if lo is None else lo
    hi = DEFAULT_LAMBDA_GRID[1] if hi is None else hi
    steps = DEFAULT_LAMBDA_GRID[2] if steps is None else steps
    if steps < 2 or not hi > lo:
        raise ValidationError("grid needs at least 2 strictly increasing points")
    return np.linspace(lo, hi, steps)


@dataclass(frozen=True, eq=False)
class PressureCurve:
    """Sampled pressure estimates with convergence metadata.

    ``diag`` holds the per-point gap |psi_n - psi_{n/2}| for finite-n
    curves (zeros for closed forms).  ``evaluator``, when present, is an
    exact callable behind the samples and lets conjugation refine off-grid.
    """

    lambdas: np.ndarray
    psi: np.ndarray
    n: int
    method: str
    diag: np.ndarray
    q: int = 2
    evaluator: object = field(default=None, repr=False)

    def __post_init__(self):
        if self.lambdas.shape != self.psi.shape or self.lambdas.shape != self.diag.shape:
            raise ValidationError("grid, psi and diag must have equal lengths")
        if self.lambdas.size < 2:
            raise ValidationError("curve needs at least two grid points")
        if not (np.diff(self.lambdas) > 0).all():
            raise ValidationError("lambda grid must be strictly increasing")
        if not np.isfinite(self.psi).all():
            raise ValidationError("psi values must be finite")

    @property
    def phi(self) -> np.ndarray:
        return self.psi - math.log(self.q)

    def cell_slopes(self) -> np.ndarray:
        return np.diff(self.psi) / np.diff(self.lambdas)

    def to_csv(self, fh=None) -> str | None:
        """Columns lambda, psi, diag_gap, n, method; '.' decimals, LF rows."""
        out = fh or io.StringIO()
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(["lambda", "psi", "diag_gap", "n", "method"])
        for lam, ps, dg in zip(self.lambdas, self.psi, self.diag):
            writer.writerow([repr(float(lam)), repr(float(ps)), repr(float(dg)),
                             self.n, self.method])
        if fh is None:
            return out.getvalue()
        return None

    def to_json(self) -> str:
        return json.dumps(
            {
                "lambda": [float(x) for x in self.lambdas],
                "psi": [float(x) for x in self.psi],
                "diag_gap": [float(x) for x in self.diag],
                "n": self.n,
                "method": self.method,
                "q": self.q,
            },
            indent=1,
        )


def estimate_pressure(w: WeightSequence, p: Potential, lam: float, n: int) -> float:
    """psi_n(lam) = (1/n) log Z_n(lam) + log q."""
    if n < 1:
        raise RangeError("n", n, 1, None)
    out = log_partition_grid(w, p, np.array([float(lam)]), n)
    return float(out[n][0]) / n + math.log(p.space.q)


def pressure_curve(
    w: WeightSequence, p: Potential, lambdas, n: int
) -> PressureCurve:
    """Finite-n pressure over a lambda grid, with stabilization gaps.

    A single sweep over the weights serves the whole grid; the half-length
    estimate psi_{n/2} is captured along the way for the diagnostic.
    """
    if n < 1:
        raise RangeError("n", n, 1, None)
    lambdas = np.asarray(lambdas, dtype=np.float64)
    half = max(1, n // 2)
    out = log_partition_grid(w, p, lambdas, n, checkpoints=(half,))
    logq = math.log(p.space.q)
    psi = out[n] / n + logq
    psi_half = out[half] / half + logq
    return PressureCurve(
        lambdas=lambdas, psi=psi, n=n, method="finite_n",
        diag=np.abs(psi - psi_half), q=p.space.q,
    )


# ---------------------------------------------------------------------------
# Closed forms for the +-1-product class on two symbols


def _log_2cosh(a):
    """log(exp(a) + exp(-a)), stable for any magnitude."""
    a = np.abs(a)
    return a + np.log1p(np.exp(-2.0 * a))


def closed_form_pressure(ft: FrequencyTable, lam):
    """psi(lam) = sum_j p_j log(exp(lam v_j) + exp(-lam v_j)).

    Valid for weights taking the tabulated values with the tabulated
    frequencies, multiplying +-1-valued products of two symbols; checking
    that the weights belong to this class is the caller's responsibility.
    """
    v, p = ft.as_arrays()
    lam = np.asarray(lam, dtype=np.float64)
    val = (_log_2cosh(np.multiply.outer(lam, v)) * p).sum(axis=-1)
    return float(val) if val.ndim == 0 else val


def closed_form_psi_prime(ft: FrequencyTable, lam):
    """psi'(lam) = sum_j p_j v_j tanh(lam v_j)."""
    v, p = ft.as_arrays()
    lam = np.asarray(lam, dtype=np.float64)
    val = (np.tanh(np.multiply.outer(lam, v)) * (p * v)).sum(axis=-1)
    return float(val) if val.ndim == 0 else val


def closed_form_psi_second(ft: FrequencyTable, lam):
    """psi''(lam) = sum_j p_j v_j^2 / cosh(lam v_j)^2, strictly positive."""
    v, p = ft.as_arrays()
    lam = np.asarray(lam, dtype=np.float64)
    a = np.abs(np.multiply.outer(lam, v))
    sech = 2.0 * np.exp(-a) / (1.0 + np.exp(-2.0 * a))
    val = (sech * sech * (p * v * v)).sum(axis=-1)
    return float(val) if val.ndim == 0 else val


def slope_range(ft: FrequencyTable) -> float:
    """sum_j p_j |v_j| = psi'(+inf); the attainable slopes are (-range, range)."""
    v, p = ft.as_arrays()
    return float((p * np.abs(v)).sum())


def closed_form_curve(ft: FrequencyTable, lambdas=None) -> PressureCurve:
    lambdas = lambda_grid() if lambdas is None else np.asarray(lambdas, np.float64)
    psi = closed_form_pressure(ft, lambdas)
    return PressureCurve(
        lambdas=lambdas, psi=psi, n=0, method="closed_form",
        diag=np.zeros_like(lambdas), q=2,
        evaluator=lambda lam: closed_form_pressure(ft, lam),
    )


# ---------------------------------------------------------------------------
# Matrix products: top exponent and projective contraction diagnostics


def lyapunov_exponent(matrices, n: int | None = None) -> float:
    """(1/N) log ||A_1 .. A_N|| for the entry-sum norm.

    Accepts any iterable of nonnegative square matrices (or LogScaledMatrix
    values); products are renormalized step by step.  Raises if a partial
    product develops an all-zero row or column, which would poison the
    exponent.
    """
    prod = None
    count = 0
    for a in matrices:
        if not isinstance(a, LogScaledMatrix):
            a = LogScaledMatrix.from_matrix(np.asarray(a, dtype=np.float64))
        prod = a if prod is None else prod @ a
        count += 1
        if (prod.mat.sum(axis=0) == 0).any() or (prod.mat.sum(axis=1) == 0).any():
            raise DegenerateProductError(
                f"product developed an all-zero row or column at step {count}"
            )
        if n is not None and count >= n:
            break
    if prod is None:
        raise ValidationError("empty matrix stream")
    return prod.sum_norm_log / count


def product_of(matrices) -> LogScaledMatrix:
    """Ordered renormalized product, for block composition by callers."""
    prod = None
    for a in matrices:
        if not isinstance(a, LogScaledMatrix):
            a = LogScaledMatrix.from_matrix(np.asarray(a, dtype=np.float64))
        prod = a if prod is None else prod @ a
    if prod is None:
        raise ValidationError("empty matrix stream")
    return prod


def transfer_lyapunov(w: WeightSequence, p: Potential, lam: float, n: int) -> float:
    """Top exponent of the weight-driven transfer product, via the fast sweep."""
    out = log_partition_grid(w, p, np.array([float(lam)]), n)
    return (float(out[n][0]) + (n + p.r - 1) * math.log(p.space.q)) / n


def hilbert_metric(x, y) -> float:
    """d(x, y) = log( max_i x_i/y_i * max_i y_i/x_i ) on positive vectors."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape != y.shape:
        raise ValidationError("vectors must have equal shapes")
    if (x <= 0).any() or (y <= 0).any():
        raise ValidationError("projective metric needs strictly positive vectors")
    r = np.log(x) - np.log(y)
    return float(r.max() - r.min())


def projective_diameter_bound(b) -> float:
    """4 log(1/delta) for a positive matrix with entries in [delta, 1/delta].

    delta is read off the matrix as min(min entry, 1/max entry); the bound
    dominates the true projective diameter of the image cone.
    """
    b = np.asarray(b, dtype=np.float64)
    if (b <= 0).any():
        raise ValidationError("matrix must be strictly positive")
    delta = min(float(b.min()), 1.0 / float(b.max()))
    return 4.0 * math.log(1.0 / delta)


def contraction_ratio(b) -> float:
    """tanh of a quarter of the diameter bound: tanh(log(1/delta)) < 1."""
    return math.tanh(projective_diameter_bound(b) / 4.0)


# ---------------------------------------------------------------------------
# Return-word pressure approximation


@dataclass(frozen=True)
class ReturnWordComponent:
    word: tuple
    frequency: float
    length: int
    log_z: float


@dataclass(frozen=True)
class ReturnWordPressure:
    """Pressure approximation from the return-word decomposition.

    psi = (sum_v p_v log Z_v) / (sum_v p_v |v|) + log q, where Z_v is the
    partition value of the weight word v.  The approximation error decays
    like 1/prefix_len for frequency-convergent weights.  When the prefix is
    periodic the decomposition collapses; the value then falls back to the
    direct estimate over the prefix and ``periodic_fallback`` is set.
    """

    psi: float
    phi: float
    lam: float
    prefix_len: int
    components: tuple[ReturnWordComponent, ...]
    periodic_fallback: bool
    coverage: int


class _WordWeights:
    """Weight sequence view of one concrete weight word."""

    def __init__(self, word):
        self._vals = np.asarray(word, dtype=np.float64)
        self.bound = float(np.abs(self._vals).max()) if self._vals.size else 0.0

    def values(self, n):
        return self._vals[:n]

    def at(self, n):
        return float(self._vals[n])


def _word_log_z(word, p: Potential, lambdas: np.ndarray) -> np.ndarray:
    return log_partition_grid(_WordWeights(word), p, lambdas, len(word))[len(word)]


def _return_word_setup(w, p, prefix_len, horizon):
    if prefix_len < 1:
        raise RangeError("prefix_len", prefix_len, 1, horizon)
    if horizon < 2 * prefix_len:
        raise RangeError("horizon", horizon, 2 * prefix_len, None)
    seq = tuple(float(v) for v in w.values(horizon))
    u = seq[:prefix_len]
    if is_periodic(u):
        return u, None
    return u, decompose(seq, u, horizon)


def _return_word_eval(u, dec, p, lambdas):
    """(psi array, per-lambda component tuples, fallback flag, coverage)."""
    logq = math.log(p.space.q)
    if dec is None:
        lz = _word_log_z(u, p, lambdas)
        phi = lz / len(u)
        comps = [
            (ReturnWordComponent(word=u, frequency=1.0, length=len(u),
                                 log_z=float(z)),)
            for z in lz
        ]
        return phi + logq, comps, True, len(u)
    words = dec.freqs.values
    freqs = np.asarray(dec.freqs.freqs)
    lengths = np.asarray([len(word) for word in words], dtype=np.float64)
    lz = np.stack([_word_log_z(word, p, lambdas) for word in words])
    phi = (freqs @ lz) / float(freqs @ lengths)
    comps = [
        tuple(
            ReturnWordComponent(word=word, frequency=float(f), length=int(le),
                                log_z=float(z))
            for word, f, le, z in zip(words, freqs, lengths, lz[:, i])
        )
        for i in range(lambdas.size)
    ]
    return phi + logq, comps, False, dec.coverage


def return_word_pressure(
    w: WeightSequence,
    p: Potential,
    lam: float,
    prefix_len: int,
    horizon: int = 1 << 16,
) -> ReturnWordPressure:
    """Estimate the pressure from return words of the weight sequence.

    The weight prefix of length ``prefix_len`` is located repeatedly in
    the sequence; the words between consecutive occurrences carry the
    decomposition, and each contributes its own partition value weighted
    by its empirical frequency.  The trailing incomplete word is dropped.
    When the prefix is periodic the decomposition collapses and the value
    falls back to the direct estimate over the prefix.
    """
    u, dec = _return_word_setup(w, p, prefix_len, horizon)
    lambdas = np.array([float(lam)])
    psi, comps, fallback, coverage = _return_word_eval(u, dec, p, lambdas)
    return ReturnWordPressure(
        psi=float(psi[0]), phi=float(psi[0]) - math.log(p.space.q), lam=lam,
        prefix_len=prefix_len, components=comps[0],
        periodic_fallback=fallback, coverage=coverage,
    )


def return_word_curve(
    w: WeightSequence, p: Potential, lambdas, prefix_len: int, horizon: int = 1 << 16
) -> PressureCurve:
    """Return-word pressure over a lambda grid, decomposing only once."""
    lambdas = np.asarray(lambdas, dtype=np.float64)
    u, dec = _return_word_setup(w, p, prefix_len, horizon)
    psi, _, _, _ = _return_word_eval(u, dec, p, lambdas)
    return PressureCurve(
        lambdas=lambdas, psi=psi, n=prefix_len,
        method=f"return_word({prefix_len})",
        diag=np.zeros_like(lambdas), q=p.space.q,
    )
