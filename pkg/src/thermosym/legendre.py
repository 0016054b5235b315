"""Numerical convex analysis: subderivatives, conjugates, dimension spectra.

The dimension spectrum of a level value alpha is
    dim E(alpha) = (psi(lam_alpha) - lam_alpha * alpha) / log q
                 = -psi*(alpha) / log q,
where lam_alpha solves psi'(lam) = alpha.  When the pressure curve has a
kink, only two-sided bounds are available: the conjugate is evaluated at
both edges of the subderivative interval and reported as a (lower, upper)
pair; the pair collapsing signals differentiability numerically.

Curves are treated as piecewise-linear between grid points, for which the
conjugate is exact at slope vertices; curves carrying an exact evaluator
are refined by golden-section inside the bracketing cells.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass

import numpy as np

from .errors import RangeError, ValidationError
from .model import FrequencyTable
from .pressure import (
    PressureCurve,
    closed_form_pressure,
    closed_form_psi_prime,
    slope_range,
)

DERIV_COLLAPSE_TOL = 1e-6
ENDPOINT_MARGIN = 1e-9
BRACKET_CAP = 50.0
_SOLVE_TOL_CLOSED = 1e-12
_SOLVE_TOL_CURVE = 1e-8
_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class SpectrumPoint:
    """One point of the dimension spectrum, with two-sided bounds."""

    alpha: float
    lambda_alpha: float
    dim_lower: float
    dim_upper: float

    def __post_init__(self):
        if not -1e-9 <= self.dim_lower <= self.dim_upper <= 1.0 + 1e-9:
            raise ValidationError(
                f"dimension bounds ({self.dim_lower}, {self.dim_upper}) "
                "outside [0, 1]"
            )

    @property
    def collapsed(self) -> bool:
        return self.dim_upper - self.dim_lower < DERIV_COLLAPSE_TOL


def binary_entropy(x: float) -> float:
    """H(x) = -x log x - (1-x) log(1-x), with H(0) = H(1) = 0."""
    if not 0.0 <= x <= 1.0:
        raise RangeError("x", x, 0.0, 1.0)
    if x in (0.0, 1.0):
        return 0.0
    return -x * math.log(x) - (1.0 - x) * math.log(1.0 - x)


def _one_sided_quotient(xs, ys, at: float) -> float:
    """Derivative at ``at`` of the interpolant through 2 or 3 points.

    With three points this is the second-order one-sided quotient (exact
    for quadratics; O(h^2) error on smooth curves), with two points the
    plain difference quotient.
    """
    if len(xs) == 3:
        d01 = (ys[1] - ys[0]) / (xs[1] - xs[0])
        d12 = (ys[2] - ys[1]) / (xs[2] - xs[1])
        d012 = (d12 - d01) / (xs[2] - xs[0])
        return d12 + d012 * (2.0 * at - xs[1] - xs[2])
    return (ys[1] - ys[0]) / (xs[1] - xs[0])


def numeric_subderivative(curve: PressureCurve, lam: float) -> tuple[float, float]:
    """[left, right] difference quotients at lam from neighboring grid points.

    Each side uses the second-order one-sided quotient, so the interval
    collapses (width O(step^2)) on smooth curves while a genuine kink
    keeps its two distinct slopes.  lam must be strictly inside the grid.
    """
    grid = curve.lambdas
    if not grid[0] < lam < grid[-1]:
        raise RangeError("lambda", lam, float(grid[0]), float(grid[-1]),
                         "strictly inside the curve grid")
    i = int(np.searchsorted(grid, lam))
    scale = max(1.0, abs(lam))
    if i > 0 and abs(grid[i - 1] - lam) <= 1e-12 * scale:
        i -= 1  # lam coincides with the vertex on its left
    if abs(grid[i] - lam) > 1e-12 * scale:
        # strictly inside a cell: both one-sided slopes are the cell slope
        s = float((curve.psi[i] - curve.psi[i - 1]) / (grid[i] - grid[i - 1]))
        return s, s
    left_pts = list(range(max(0, i - 2), i + 1))
    right_pts = list(range(i, min(grid.size, i + 3)))
    left = _one_sided_quotient(grid[left_pts], curve.psi[left_pts], lam)
    right = _one_sided_quotient(grid[right_pts], curve.psi[right_pts], lam)
    return (float(min(left, right)), float(max(left, right)))


def _slope_bounds(curve: PressureCurve) -> tuple[float, float]:
    slopes = curve.cell_slopes()
    return float(slopes.min()), float(slopes.max())


def _golden_max(g, a: float, b: float, tol: float = 1e-13) -> float:
    """Golden-section maximum of a unimodal g on [a, b]."""
    x1 = b - _GOLDEN * (b - a)
    x2 = a + _GOLDEN * (b - a)
    g1, g2 = g(x1), g(x2)
    while b - a > tol * max(1.0, abs(a), abs(b)):
        if g1 < g2:
            a, x1, g1 = x1, x2, g2
            x2 = a + _GOLDEN * (b - a)
            g2 = g(x2)
        else:
            b, x2, g2 = x2, x1, g1
            x1 = b - _GOLDEN * (b - a)
            g1 = g(x1)
    return max(g1, g2)


def conjugate(curve: PressureCurve, alpha: float) -> float:
    """psi*(alpha) = sup_lam (alpha*lam - psi(lam)) over the curve.

    For a piecewise-linear curve the supremum sits at a grid vertex; when
    the curve carries an exact evaluator the bracketing cells are refined
    by golden-section.  alpha must lie in the closed range of attainable
    slopes.
    """
    lo, hi = _slope_bounds(curve)
    if not lo <= alpha <= hi:
        raise RangeError(
            "alpha", alpha, lo, hi,
            "outside the attainable slope range (psi'(lam_min), psi'(lam_max))",
        )
    vals = alpha * curve.lambdas - curve.psi
    k = int(np.argmax(vals))
    best = float(vals[k])
    if curve.evaluator is not None:
        a = float(curve.lambdas[max(0, k - 1)])
        b = float(curve.lambdas[min(curve.lambdas.size - 1, k + 1)])
        fn = curve.evaluator
        best = max(best, _golden_max(lambda t: alpha * t - float(fn(t)), a, b))
    return best


def biconjugate(curve: PressureCurve, lam: float) -> float:
    """psi**(lam) computed through the conjugate at the curve's slope nodes.

    Equals the piecewise-linear interpolant exactly at interior grid
    points, which is the double-conjugation identity for convex curves.
    """
    grid = curve.lambdas
    if not grid[0] <= lam <= grid[-1]:
        raise RangeError("lambda", lam, float(grid[0]), float(grid[-1]))
    slopes = curve.cell_slopes()
    conj = (slopes[:, None] * grid[None, :] - curve.psi[None, :]).max(axis=1)
    return float((lam * slopes - conj).max())


def _solve_closed_form(ft: FrequencyTable, alpha: float) -> float:
    rng = slope_range(ft)
    if abs(alpha) > rng - ENDPOINT_MARGIN:
        raise RangeError(
            "alpha", alpha, -rng, rng,
            "level value too close to the open endpoint; lambda diverges there",
        )

    def fprime(lam):
        return closed_form_psi_prime(ft, lam) - alpha

    lo, hi = -1.0, 1.0
    while fprime(hi) < 0.0:
        hi *= 2.0
        if hi > BRACKET_CAP:
            raise RangeError("alpha", alpha, -rng, rng,
                             "bracket cap reached; alpha is too near an endpoint")
    while fprime(lo) > 0.0:
        lo *= 2.0
        if lo < -BRACKET_CAP:
            raise RangeError("alpha", alpha, -rng, rng,
                             "bracket cap reached; alpha is too near an endpoint")
    for _ in range(300):
        mid = 0.5 * (lo + hi)
        val = fprime(mid)
        if abs(val) <= _SOLVE_TOL_CLOSED or hi - lo <= 1e-16 * max(1.0, abs(mid)):
            return mid
        if val < 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _solve_curve(curve: PressureCurve, alpha: float) -> float:
    lo_s, hi_s = _slope_bounds(curve)
    if not lo_s + ENDPOINT_MARGIN <= alpha <= hi_s - ENDPOINT_MARGIN:
        raise RangeError("alpha", alpha, lo_s, hi_s,
                         "outside the interior slope range of the curve")
    if curve.evaluator is not None:
        fn = curve.evaluator
        h = 1e-6

        def fprime(lam):
            return (float(fn(lam + h)) - float(fn(lam - h))) / (2.0 * h) - alpha

        lo = float(curve.lambdas[0])
        hi = float(curve.lambdas[-1])
        for _ in range(300):
            mid = 0.5 * (lo + hi)
            val = fprime(mid)
            if abs(val) <= _SOLVE_TOL_CURVE or hi - lo <= 1e-14 * max(1.0, abs(mid)):
                return mid
            if val < 0.0:
                lo = mid
            else:
                hi = mid
        return 0.5 * (lo + hi)
    slopes = curve.cell_slopes()
    j = int(np.searchsorted(slopes, alpha))
    j = min(max(j, 1), slopes.size - 1)
    return float(curve.lambdas[j])


def solve_lambda_alpha(source, alpha: float) -> float:
    """The parameter lam with psi'(lam) = alpha.

    The derivative is strictly increasing (psi'' > 0), so bisection with
    bracket doubling converges; brackets are capped at |lam| <= 50 and the
    open range endpoints are rejected outright.
    """
    if isinstance(source, FrequencyTable):
        return _solve_closed_form(source, alpha)
    if isinstance(source, PressureCurve):
        return _solve_curve(source, alpha)
    raise TypeError("source must be a FrequencyTable or a PressureCurve")


def spectrum(source, alpha: float) -> SpectrumPoint:
    """Dimension of the level set at alpha, with two-sided bounds.

    For closed-form tables the pressure is smooth and both bounds agree:
    dim = (psi(lam_alpha) - lam_alpha*alpha) / log 2.  For sampled curves
    a non-collapsed subderivative at lam_alpha widens the answer to the
    pair (-psi*(edge)/log q) over the two subderivative edges.
    """
    if isinstance(source, FrequencyTable):
        lam = _solve_closed_form(source, alpha)
        dim = (closed_form_pressure(source, lam) - lam * alpha) / math.log(2.0)
        dim = min(max(dim, 0.0), 1.0)
        return SpectrumPoint(alpha, lam, dim, dim)
    if not isinstance(source, PressureCurve):
        raise TypeError("source must be a FrequencyTable or a PressureCurve")
    curve = source
    logq = math.log(curve.q)
    lam = _solve_curve(curve, alpha)
    lo, hi = numeric_subderivative(curve, lam)
    # Discriminate a genuine kink from discretization width: on a smooth
    # curve the quotient gap shrinks like step^2, while a kink keeps an
    # O(1) slope jump, so anything below the local step is noise.
    i = int(np.searchsorted(curve.lambdas, lam))
    i = min(max(i, 1), curve.lambdas.size - 2)
    local_step = float(max(curve.lambdas[i] - curve.lambdas[i - 1],
                           curve.lambdas[i + 1] - curve.lambdas[i]))
    if hi - lo < max(DERIV_COLLAPSE_TOL, local_step):
        dim = -conjugate(curve, alpha) / logq
        dim = min(max(dim, 0.0), 1.0)
        return SpectrumPoint(alpha, lam, dim, dim)
    edges = sorted(
        min(max(-conjugate(curve, edge) / logq, 0.0), 1.0) for edge in (lo, hi)
    )
    return SpectrumPoint(alpha, lam, edges[0], edges[1])


def spectrum_points(source, alphas) -> list[SpectrumPoint]:
    return [spectrum(source, float(a)) for a in np.asarray(alphas, dtype=np.float64)]


def mobius_spectrum(alpha: float, zero_fraction: float | None = None) -> float:
    """Closed-form spectrum for three-valued {-1, 0, +1} weights.

    With f0 the frequency of zero weights, for alpha in the open interval
    (-(1-f0), 1-f0):
        dim F(alpha) = f0 + (1-f0)/log 2 * H(1/2 + alpha / (2 (1-f0))).
    The default f0 = 1 - 6/pi^2 is the density of non-squarefree integers,
    the Moebius case.
    """
    f0 = (1.0 - 6.0 / math.pi ** 2) if zero_fraction is None else float(zero_fraction)
    if not 0.0 <= f0 < 1.0:
        raise RangeError("zero_fraction", f0, 0.0, 1.0)
    active = 1.0 - f0
    if abs(alpha) > active - ENDPOINT_MARGIN:
        raise RangeError("alpha", alpha, -active, active,
                         "open interval; the spectrum endpoint is a limit")
    return f0 + active / math.log(2.0) * binary_entropy(0.5 + alpha / (2.0 * active))


def write_spectrum_csv(points, fh=None) -> str | None:
    """Columns alpha, lambda_alpha, dim_lower, dim_upper."""
    out = fh or io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["alpha", "lambda_alpha", "dim_lower", "dim_upper"])
    for pt in points:
        writer.writerow([repr(pt.alpha), repr(pt.lambda_alpha),
                         repr(pt.dim_lower), repr(pt.dim_upper)])
    if fh is None:
        return out.getvalue()
    return None


def spectrum_json(points) -> str:
    return json.dumps(
        [
            {"alpha": pt.alpha, "lambda_alpha": pt.lambda_alpha,
             "dim_lower": pt.dim_lower, "dim_upper": pt.dim_upper}
            for pt in points
        ],
        indent=1,
    )
