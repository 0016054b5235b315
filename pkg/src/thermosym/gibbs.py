"""The inhomogeneous Markov measure realizing the Gibbs weights exactly.

For the product potential f(x, y) = x*y on symbols {-1, +1} the Gibbs
weights are carried by a chain with step matrices

    P_n = [[e^a, e^-a], [e^-a, e^a]] / (e^a + e^-a),      a = lam * w_n,

started from (1/2, 1/2), which is a left-invariant vector of every step.
Cylinder masses then reproduce exp(lam * sum w_k x_k x_{k+1}) up to the
partition normalization: in the expectation convention used throughout,

    mu([x_0..x_n]) * 2^(n+1) * Z_n(lam) = exp(lam * sum_{k<n} w_k x_k x_{k+1}).

Path sampling uses one Philox stream per path, keyed by (seed, path), with
step n consuming the n-th uniform, so paths are reproducible and
independent of how many are drawn.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import RangeError, ValidationError
from .model import WeightSequence

_SYMBOLS = (-1, 1)


class InhomMarkov:
    """Markov chain on {-1, +1} with one symmetric stochastic matrix per step."""

    def __init__(self, lam: float, weights: WeightSequence, horizon: int):
        if horizon < 1:
            raise RangeError("horizon", horizon, 1, None)
        self.lam = float(lam)
        self.weights = weights
        self.horizon = int(horizon)
        a = self.lam * np.asarray(weights.values(horizon), dtype=np.float64)
        # log(e^a + e^-a) and the stay/flip log-probabilities, all stable
        self._log_denom = np.abs(a) + np.log1p(np.exp(-2.0 * np.abs(a)))
        self._log_stay = a - self._log_denom
        self._log_flip = -a - self._log_denom
        self._stay = np.exp(self._log_stay)

    def transition_matrix(self, n: int) -> np.ndarray:
        """Row-stochastic step matrix P_n, states ordered (-1, +1)."""
        if not 0 <= n < self.horizon:
            raise RangeError("n", n, 0, self.horizon - 1)
        stay = self._stay[n]
        return np.array([[stay, 1.0 - stay], [1.0 - stay, stay]])

    def matrices(self) -> list[np.ndarray]:
        return [self.transition_matrix(n) for n in range(self.horizon)]

    def _check_word(self, word) -> np.ndarray:
        arr = np.asarray(word)
        if arr.ndim != 1 or arr.size < 1:
            raise ValidationError("word must be a nonempty 1-d symbol sequence")
        if not np.isin(arr, _SYMBOLS).all():
            raise ValidationError("symbols must be -1 or +1")
        if arr.size > self.horizon + 1:
            raise RangeError("len(word)", arr.size, 1, self.horizon + 1)
        return arr.astype(np.int8)

    def log_cylinder_measure(self, word) -> float:
        """log mu([x_0..x_n]); safe at any depth."""
        x = self._check_word(word)
        n = x.size - 1
        if n == 0:
            return -math.log(2.0)
        prods = (x[:-1] * x[1:]).astype(np.float64)
        a = self.lam * np.asarray(self.weights.values(n), dtype=np.float64)
        steps = a * prods - self._log_denom[:n]
        return -math.log(2.0) + math.fsum(steps.tolist())

    def cylinder_measure(self, word) -> float:
        """mu([x_0..x_n]) = (1/2) p_(0)(x_0,x_1) .. p_(n-1)(x_{n-1},x_n)."""
        return math.exp(self.log_cylinder_measure(word))

    def sample_paths(self, length: int, count: int, seed: int) -> "GibbsSample":
        """Draw ``count`` independent chains of ``length`` symbols.

        Inverse-CDF sampling on the two-point rows: the first uniform of a
        path picks x_0 from (1/2, 1/2), the n-th subsequent uniform keeps
        the sign when it falls below the stay probability of step n.
        """
        if count < 1:
            raise RangeError("count", count, 1, None)
        if length < 2:
            raise RangeError("length", length, 2, self.horizon + 1)
        if length > self.horizon + 1:
            raise RangeError("length", length, 2, self.horizon + 1)
        stay = self._stay[: length - 1]
        w = np.asarray(self.weights.values(length - 1), dtype=np.float64)
        paths = np.empty((count, length), dtype=np.int8)
        step_sum = np.zeros(length - 1)
        running_sum = np.zeros(length - 1)
        for k in range(count):
            u = np.random.Generator(
                np.random.Philox(key=[seed & (2 ** 64 - 1), k])
            ).random(length)
            x0 = 1 if u[0] < 0.5 else -1
            signs = np.where(u[1:] < stay, 1, -1).astype(np.int8)
            path = x0 * np.multiply.accumulate(
                np.concatenate(([np.int8(1)], signs))
            )
            paths[k] = path
            prods = (path[:-1] * path[1:]).astype(np.float64)
            step_sum += prods
            running_sum += np.cumsum(w * prods) / np.arange(1, length)
        return GibbsSample(
            lam=self.lam,
            seed=seed,
            paths=paths,
            step_product_mean=step_sum / count,
            running_weighted_mean=running_sum / count,
            analytic_step_mean=np.tanh(self.lam * w),
            weights=w,
        )

    def local_dimension_estimate(self, path, depths) -> np.ndarray:
        """log mu([x_0..x_{d-1}]) / (-d log 2) for each requested depth."""
        x = np.asarray(path)
        depths = [int(d) for d in depths]
        if min(depths) < 1:
            raise RangeError("depth", min(depths), 1, x.size)
        if max(depths) > x.size:
            raise RangeError("depth", max(depths), 1, x.size)
        return np.array([
            self.log_cylinder_measure(x[:d]) / (-d * math.log(2.0))
            for d in depths
        ])


@dataclass(frozen=True, eq=False)
class GibbsSample:
    """Paths plus per-step and running empirical statistics."""

    lam: float
    seed: int
    paths: np.ndarray
    step_product_mean: np.ndarray      # mean over paths of x_n * x_{n+1}
    running_weighted_mean: np.ndarray  # mean over paths of (1/m) sum w_k x_k x_{k+1}
    analytic_step_mean: np.ndarray     # tanh(lam * w_n) per step
    weights: np.ndarray

    @property
    def product_mean(self) -> float:
        """Pooled mean of x_n x_{n+1} over all steps and paths."""
        return float(self.step_product_mean.mean())

    def to_csv(self, fh=None):
        import csv
        import io

        out = fh or io.StringIO()
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(["n", "w_n", "mean_product", "analytic_mean",
                         "running_weighted_mean"])
        for n in range(self.step_product_mean.size):
            writer.writerow([
                n, repr(float(self.weights[n])),
                repr(float(self.step_product_mean[n])),
                repr(float(self.analytic_step_mean[n])),
                repr(float(self.running_weighted_mean[n])),
            ])
        if fh is None:
            return out.getvalue()
        return None

    def summary(self) -> dict:
        return {
            "lambda": self.lam,
            "seed": self.seed,
            "paths": int(self.paths.shape[0]),
            "length": int(self.paths.shape[1]),
            "empirical_product_mean": self.product_mean,
            "analytic_product_mean": float(self.analytic_step_mean.mean()),
            "final_running_weighted_mean": float(self.running_weighted_mean[-1]),
        }
