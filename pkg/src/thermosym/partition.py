"""Partition functions of weighted symbol sums, three ways.

``exact_partition`` enumerates every word (the oracle, capped in size),
``transfer_log_partition`` multiplies transfer matrices with per-step
renormalization, and the block form Z_{m,n} restricts the weight window.
All values are expectations against the uniform measure on sequences:
Z_{m,n} = E exp(lam * sum_{m<=k<n} w_k f(x_k..x_{k+r-1})), so Z at lam=0
is exactly 1 and log Z_{n,n} = 0.

For a potential of span r over q symbols the transfer matrix is indexed
by words of length r-1; entry (u, v) is exp(lam*w*f(x)) when u and v
overlap in a word x of length r and zero otherwise.  Entries span
exp(+-lam*n*bound), hence every product is carried as a unit-normalized
matrix plus an accumulated log scale.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    DegenerateProductError,
    OracleScaleError,
    RangeError,
    ValidationError,
)
from .model import Potential, WeightSequence

MAX_TRANSFER_DIM = 4096
ORACLE_CAP = 1 << 24
_GRAM_CODE_CAP = 8192
_GRAM_ENTRY_CAP = 1 << 24
_ENUM_CHUNK = 1 << 20


@dataclass(frozen=True, eq=False)
class LogScaledMatrix:
    """A nonnegative matrix stored as (unit-normalized matrix, log scale).

    Represents exp(logscale) * mat with max(mat) == 1; multiplication
    renormalizes so that long products never overflow.
    """

    mat: np.ndarray
    logscale: float = 0.0

    def __post_init__(self):
        if self.mat.ndim != 2 or self.mat.shape[0] != self.mat.shape[1]:
            raise ValidationError("matrix must be square")
        if (self.mat < 0).any():
            raise ValidationError("matrix entries must be nonnegative")
        if abs(float(self.mat.max()) - 1.0) > 1e-12:
            raise ValidationError("matrix must be normalized to unit max entry")

    @classmethod
    def from_matrix(cls, a: np.ndarray, logscale: float = 0.0) -> "LogScaledMatrix":
        a = np.asarray(a, dtype=np.float64)
        mx = float(a.max())
        if not mx > 0:
            raise DegenerateProductError("matrix has no positive entry")
        return cls(a / mx, logscale + math.log(mx))

    @classmethod
    def identity(cls, dim: int) -> "LogScaledMatrix":
        return cls(np.eye(dim), 0.0)

    def __matmul__(self, other: "LogScaledMatrix") -> "LogScaledMatrix":
        prod = self.mat @ other.mat
        mx = float(prod.max())
        if not mx > 0:
            raise DegenerateProductError("matrix product vanished")
        return LogScaledMatrix(prod / mx, self.logscale + other.logscale + math.log(mx))

    @property
    def sum_norm_log(self) -> float:
        """log of the entry-sum norm of the represented matrix."""
        return self.logscale + math.log(float(self.mat.sum()))

    def dense(self) -> np.ndarray:
        """The represented matrix; may overflow for large log scales."""
        return math.exp(self.logscale) * self.mat


@dataclass(frozen=True)
class PartitionResult:
    log_z: float
    n: int
    method: str
    m: int = 0

    def __post_init__(self):
        if not math.isfinite(self.log_z):
            raise ValidationError("log partition value must be finite")


# ---------------------------------------------------------------------------
# Transfer matrices


def _check_dim(p: Potential) -> int:
    d = p.space.q ** (p.r - 1)
    if d > MAX_TRANSFER_DIM:
        raise ValidationError(
            f"transfer dimension q**(r-1) = {d} exceeds cap {MAX_TRANSFER_DIM}"
        )
    return d


def _transfer_tables(p: Potential, lambdas: np.ndarray, values: np.ndarray):
    """Normalized transfer matrices for each (weight value, lambda).

    Returns ``mats`` of shape (V, L, d, d) with unit max entry and ``logs``
    of shape (V, L) holding the extracted log scales.
    """
    q, r = p.space.q, p.r
    d = _check_dim(p)
    nwords = q ** r
    word = np.arange(nwords)
    if r == 1:
        # 1x1 case: the single entry is the symbol sum of exp(lam*w*f(s))
        expo = lambdas[None, :, None] * values[:, None, None] * p.values[None, None, :]
        mx = expo.max(axis=2)
        logs = mx + np.log(np.exp(expo - mx[:, :, None]).sum(axis=2))
        mats = np.ones((len(values), len(lambdas), 1, 1))
        return mats, logs
    u = word // q
    v = word % d
    expo = lambdas[None, :, None] * values[:, None, None] * p.values[None, None, :]
    mx = expo.max(axis=2)
    scaled = np.exp(expo - mx[:, :, None])
    mats = np.zeros((len(values), len(lambdas), d, d))
    mats[:, :, u, v] = scaled
    return mats, mx


def build_transfer(p: Potential, w: float, lam: float) -> LogScaledMatrix:
    """Transfer matrix for one step with weight ``w`` at parameter ``lam``."""
    mats, logs = _transfer_tables(
        p, np.array([float(lam)]), np.array([float(w)])
    )
    return LogScaledMatrix(mats[0, 0], float(logs[0, 0]))


def _gram_size(nvalues: int, nsteps: int, grid: int, dim: int) -> int:
    """Largest block length g whose product table stays small."""
    best = 1
    for g in range(2, 17):
        codes = nvalues ** g
        if codes > _GRAM_CODE_CAP:
            break
        table = min(codes, nsteps // g + 1) * grid * dim * dim
        if table > _GRAM_ENTRY_CAP:
            break
        best = g
    return best


def _sweep_segment(inv, mats, logs, state):
    """Multiply the row-vector state through one weight segment.

    ``state`` is (v, acc) with v of shape (L, d) holding the normalized
    row vector 1^T A_..A_.. per lambda and acc the accumulated log scales.
    Per-step (and per block-product) renormalization keeps v bounded.
    """
    v, acc = state
    nsteps = inv.size
    if nsteps == 0:
        return v, acc
    g = _gram_size(mats.shape[0], nsteps, mats.shape[1], mats.shape[2])
    pos = 0
    if g > 1 and nsteps >= 2 * g:
        nblocks = nsteps // g
        base = mats.shape[0] ** np.arange(g, dtype=np.int64)
        codes = inv[: nblocks * g].reshape(nblocks, g) @ base
        uniq, block_inv = np.unique(codes, return_inverse=True)
        digits = (uniq[:, None] // base[None, :]) % mats.shape[0]
        gram = mats[digits[:, 0]].copy()
        gls = logs[digits[:, 0]].copy()
        for j in range(1, g):
            gram = gram @ mats[digits[:, j]]
            mx = gram.max(axis=(2, 3))
            gram /= mx[:, :, None, None]
            gls += np.log(mx) + logs[digits[:, j]]
        vv = v[:, None, :]
        for b in range(nblocks):
            c = block_inv[b]
            vv = vv @ gram[c]
            mx = vv.max(axis=(1, 2))
            vv /= mx[:, None, None]
            acc += np.log(mx) + gls[c]
        v = vv[:, 0, :]
        pos = nblocks * g
    vv = v[:, None, :]
    for k in range(pos, nsteps):
        j = inv[k]
        vv = vv @ mats[j]
        mx = vv.max(axis=(1, 2))
        vv /= mx[:, None, None]
        acc += np.log(mx) + logs[j]
    return vv[:, 0, :], acc


def log_partition_grid(
    w: WeightSequence,
    p: Potential,
    lambdas,
    n: int,
    m: int = 0,
    checkpoints: tuple[int, ...] = (),
) -> dict[int, np.ndarray]:
    """log Z_{m,c} for each checkpoint c and for c = n, over a lambda grid.

    One sweep over the weight window serves every lambda and every
    checkpoint; this is the engine behind the scalar entry points.
    """
    lambdas = np.atleast_1d(np.asarray(lambdas, dtype=np.float64))
    if not (0 <= m <= n):
        raise RangeError("m", m, 0, n, "need 0 <= m <= n")
    bad = [c for c in checkpoints if not m <= c <= n]
    if bad:
        raise RangeError("checkpoints", bad[0], m, n)
    marks = sorted(set(checkpoints) | {n})
    q, r = p.space.q, p.r
    logq = math.log(q)
    vals = np.asarray(w.values(n), dtype=np.float64)[m:n]
    distinct, inv = np.unique(vals, return_inverse=True)
    out: dict[int, np.ndarray] = {}
    if r == 1:
        # symbol sums commute; per-value terms weighted by prefix counts
        expo = np.multiply.outer(lambdas, distinct)[:, :, None] * p.values[None, None, :]
        mx = expo.max(axis=2)
        terms = mx + np.log(np.exp(expo - mx[:, :, None]).sum(axis=2)) - logq
        prev, total = m, np.zeros_like(lambdas)
        for c in marks:
            counts = np.bincount(inv[prev - m: c - m], minlength=distinct.size)
            total = total + terms @ counts
            out[c] = total.copy()
            prev = c
        return out
    d = _check_dim(p)
    mats, logs = _transfer_tables(p, lambdas, distinct)
    v = np.ones((lambdas.size, d))
    acc = np.zeros(lambdas.size)
    prev = m
    for c in marks:
        v, acc = _sweep_segment(inv[prev - m: c - m], mats, logs, (v, acc))
        out[c] = acc + np.log(v.sum(axis=1)) - (c - m + r - 1) * logq
        prev = c
    return out


def transfer_log_partition(
    w: WeightSequence, p: Potential, lam: float, n: int, m: int = 0
) -> PartitionResult:
    """log Z_{m,n}(lam) via renormalized transfer products."""
    out = log_partition_grid(w, p, np.array([float(lam)]), n, m)
    return PartitionResult(float(out[n][0]), n=n, method="transfer", m=m)


def transfer_block_product(
    w: WeightSequence, p: Potential, lam: float, n: int, m: int = 0
) -> LogScaledMatrix:
    """The renormalized product A_{w_m} .. A_{w_{n-1}} as one matrix.

    Blocks compose associatively: multiplying per-block results in order
    reproduces the whole-window product, so disjoint index ranges can be
    processed independently and combined.
    """
    if not (0 <= m <= n):
        raise RangeError("m", m, 0, n, "need 0 <= m <= n")
    d = _check_dim(p)
    prod = LogScaledMatrix.identity(d)
    vals = np.asarray(w.values(n), dtype=np.float64)[m:n]
    if vals.size == 0:
        return prod
    distinct, inv = np.unique(vals, return_inverse=True)
    mats, logs = _transfer_tables(p, np.array([float(lam)]), distinct)
    steps = [LogScaledMatrix(mats[j, 0], float(logs[j, 0]))
             for j in range(distinct.size)]
    for j in inv:
        prod = prod @ steps[j]
    return prod


def exact_partition(
    w: WeightSequence, p: Potential, lam: float, n: int
) -> PartitionResult:
    """log Z_n(lam) by enumerating all q**(n+r-1) words (oracle scale only).

    Uses a streaming log-sum-exp over enumeration chunks, so the value is
    stable for any lam while memory stays bounded.
    """
    q, r = p.space.q, p.r
    length = n + r - 1
    total = q ** length
    if total > ORACLE_CAP:
        raise OracleScaleError(
            f"q**(n+r-1) = {total} exceeds {ORACLE_CAP}; "
            "use transfer_log_partition for this size"
        )
    wv = np.asarray(w.values(n), dtype=np.float64)
    f = p.values
    run_max = -math.inf
    run_sum = 0.0
    for start in range(0, total, _ENUM_CHUNK):
        idx = np.arange(start, min(start + _ENUM_CHUNK, total), dtype=np.int64)
        expo = np.zeros(idx.size)
        for k in range(n):
            shift = q ** (length - (k + r))
            window = (idx // shift) % (q ** r)
            expo += (lam * wv[k]) * f[window]
        mx = float(expo.max()) if idx.size else -math.inf
        if mx > run_max:
            run_sum *= math.exp(run_max - mx) if run_max > -math.inf else 0.0
            run_max = mx
        run_sum += float(np.exp(expo - run_max).sum())
    log_z = run_max + math.log(run_sum) - length * math.log(q)
    return PartitionResult(log_z, n=n, method="exact")


def log_partition_split_gap(
    w: WeightSequence, p: Potential, lam: float, l: int, m: int, n: int
) -> float:
    """|log Z_{l,n} - log Z_{l,m} - log Z_{m,n}|.

    The chain rule for partition windows holds up to a lambda-dependent
    constant; this gap must stay bounded as n grows for fixed potential
    and lambda, which makes it a cheap runtime diagnostic.
    """
    if not (0 <= l <= m <= n):
        raise RangeError("(l, m, n)", (l, m, n), 0, None, "need 0 <= l <= m <= n")
    out = log_partition_grid(w, p, np.array([float(lam)]), n, l, checkpoints=(m,))
    whole = float(out[n][0])
    first = float(out[m][0])
    second = float(log_partition_grid(w, p, np.array([float(lam)]), n, m)[n][0])
    return abs(whole - first - second)
