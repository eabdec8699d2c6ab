"""Ranking, summaries, least squares, densities and curve fits.

Everything here is a pure function of its arguments.  The regression
path reports classical inference statistics; the density and Gaussian
fit path reproduces rank-curve and distribution plots from raw samples.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


class SingularDesignError(ValueError):
    """Raised when a regression design matrix is rank-deficient."""


class NoInflectionError(ValueError):
    """Raised when a fitted rank curve has no concavity change."""


class DegenerateDataError(ValueError):
    """Raised when a sample is too degenerate for density estimation."""


class FitConvergenceError(RuntimeError):
    """Simplex search ran out of iterations; carries the best point found."""

    def __init__(self, message: str, best: "GaussianFit"):
        super().__init__(message)
        self.best = best


# ---------------------------------------------------------------------------
# ranking and summaries


def rank_descending(values: list) -> list[int]:
    """Competition ranks on descending order: rank = 1 + #{strictly greater}.

    Ties share the smaller rank and the following rank is skipped, so a
    two-way tie at the top yields ranks (1, 1, 3, ...).
    """
    if len(values) == 0:
        raise ValueError("cannot rank an empty list")
    order = sorted(range(len(values)), key=lambda i: values[i], reverse=True)
    ranks = [0] * len(values)
    prev_value = None
    prev_rank = 0
    for position, i in enumerate(order, start=1):
        v = values[i]
        if prev_value is not None and v == prev_value:
            ranks[i] = prev_rank
        else:
            ranks[i] = position
            prev_value, prev_rank = v, position
    return ranks


@dataclass(frozen=True)
class RankTable:
    """Ids with their download counts and competition ranks."""

    ids: tuple
    downloads: tuple[int, ...]
    ranks: tuple[int, ...]
    population: int


def rank_table(ids: list, downloads: list[int]) -> RankTable:
    if len(ids) != len(downloads):
        raise ValueError(f"{len(ids)} ids vs {len(downloads)} download counts")
    ranks = rank_descending(downloads)
    return RankTable(tuple(ids), tuple(downloads), tuple(ranks), len(ids))


def _interp_sorted(ordered: list[float], p: float) -> float:
    # linear interpolation of order statistics at h = (n-1)p
    h = (len(ordered) - 1) * p
    lo = math.floor(h)
    hi = min(lo + 1, len(ordered) - 1)
    return ordered[lo] + (h - lo) * (ordered[hi] - ordered[lo])


def quantile(values: list[float], p: float) -> float:
    """Quantile by linear interpolation of order statistics at h = (n-1)p."""
    if len(values) == 0:
        raise ValueError("cannot take a quantile of an empty list")
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must be in [0, 1], got {p!r}")
    return _interp_sorted(sorted(float(v) for v in values), p)


@dataclass(frozen=True)
class SummarySix:
    """Min / first quartile / median / mean / third quartile / max."""

    min: float
    q1: float
    median: float
    mean: float
    q3: float
    max: float


def summary_six(values: list[float]) -> SummarySix:
    if len(values) == 0:
        raise ValueError("cannot summarize an empty list")
    ordered = sorted(float(v) for v in values)
    return SummarySix(
        min=ordered[0],
        q1=_interp_sorted(ordered, 0.25),
        median=_interp_sorted(ordered, 0.5),
        mean=math.fsum(ordered) / len(ordered),
        q3=_interp_sorted(ordered, 0.75),
        max=ordered[-1],
    )


# ---------------------------------------------------------------------------
# least squares


@dataclass(frozen=True)
class FitResult:
    """Least-squares estimates with classical inference statistics.

    Inference fields are None when the residual degrees of freedom are
    zero (exactly as many observations as coefficients) or, for the F
    statistic, when the model has no non-intercept regressors.
    """

    coefficients: tuple[float, ...]
    std_errors: tuple[float, ...] | None
    t_stats: tuple[float, ...] | None
    r_squared: float
    adj_r_squared: float | None
    f_statistic: float | None
    n_obs: int


def _qr_solve(y: np.ndarray, X: np.ndarray):
    """Solve min ||y - X b|| by QR; reject rank-deficient designs.

    Returns (beta, unscaled inverse Gram matrix, residual SS, total SS).
    """
    Q, R = np.linalg.qr(X)
    diag = np.abs(np.diag(R))
    scale = diag.max()
    if scale == 0.0 or diag.min() <= scale * max(X.shape) * np.finfo(float).eps:
        raise SingularDesignError("design matrix is rank-deficient")
    beta = np.linalg.solve(R, Q.T @ y)
    r_inv = np.linalg.inv(R)
    gram_inv = r_inv @ r_inv.T
    resid = y - X @ beta
    ssr = float(resid @ resid)
    sst = float(((y - y.mean()) ** 2).sum())
    return beta, gram_inv, ssr, sst


def _assemble_fit(beta: np.ndarray, gram_inv: np.ndarray, ssr: float, sst: float, n: int, m: int) -> FitResult:
    if sst > 0.0:
        r2 = min(max(1.0 - ssr / sst, 0.0), 1.0)
    else:
        # constant response: an intercept fits it exactly
        r2 = 1.0 if ssr <= 1e-12 else 0.0
    coefficients = tuple(float(b) for b in beta)
    df = n - m
    p = m - 1
    if df <= 0:
        return FitResult(coefficients, None, None, r2, None, None, n)
    sigma2 = ssr / df
    variances = sigma2 * np.diag(gram_inv)
    std_errors = tuple(math.sqrt(max(float(v), 0.0)) for v in variances)
    t_stats = tuple(c / s if s > 0.0 else math.nan for c, s in zip(coefficients, std_errors))
    adj = 1.0 - (1.0 - r2) * (n - 1) / df
    if p < 1:
        f_stat = None
    elif r2 >= 1.0:
        f_stat = math.inf
    else:
        f_stat = (r2 / p) / ((1.0 - r2) / df)
    return FitResult(coefficients, std_errors, t_stats, r2, adj, f_stat, n)


def ols(y: list[float], X) -> FitResult:
    """OLS of y on a design matrix whose first column is the intercept.

    Requires at least as many rows as columns; with exactly as many,
    coefficients are still solved but inference is unavailable.
    """
    y_arr = np.asarray(y, dtype=float)
    X_arr = np.asarray(X, dtype=float)
    if X_arr.ndim != 2:
        raise ValueError("design matrix must be two-dimensional")
    n, m = X_arr.shape
    if y_arr.ndim != 1 or y_arr.shape[0] != n:
        raise ValueError(f"response length {y_arr.shape} does not match {n} design rows")
    if n < m:
        raise ValueError(f"need at least as many observations as coefficients: {n} rows, {m} columns")
    beta, gram_inv, ssr, sst = _qr_solve(y_arr, X_arr)
    return _assemble_fit(beta, gram_inv, ssr, sst, n, m)


def fit_rank_curve(downloads: list[int]) -> FitResult:
    """Quadratic log-log fit of competition rank against downloads.

    Regresses ln(rank) on (1, ln d, ln^2 d).  All observations are kept,
    outliers included.  The squared-log column is mean-centered before
    solving and the coefficients mapped back, which conditions the Gram
    matrix without changing the reported estimates.
    """
    if len(downloads) < 10:
        raise ValueError(f"need at least 10 observations, got {len(downloads)}")
    if any(d < 1 for d in downloads):
        raise ValueError("downloads must be positive to fit on a log scale")
    ranks = rank_descending(list(downloads))
    x = np.log(np.asarray(downloads, dtype=float))
    y = np.log(np.asarray(ranks, dtype=float))
    x2 = x * x
    mean_x = float(x.mean())
    mean_x2 = float(x2.mean())
    centered = np.column_stack([np.ones_like(x), x - mean_x, x2 - mean_x2])
    beta_c, gram_inv_c, ssr, sst = _qr_solve(y, centered)
    # centered design = raw design times A; undo with beta = A beta_c
    A = np.array([[1.0, -mean_x, -mean_x2], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]])
    beta = A @ beta_c
    gram_inv = A @ gram_inv_c @ A.T
    return _assemble_fit(beta, gram_inv, ssr, sst, len(downloads), 3)


def inflection_points(a: float, b: float, c: float) -> tuple[float, float]:
    """Both downloads-scale concavity changes of r(x) = exp(a + b x + c x^2).

    Solves r''(x) = 0, i.e. (b + 2cx)^2 + 2c = 0, and exponentiates the
    two roots.  Requires c < 0; the level coefficient a cannot move the
    roots but is part of the fitted triple.  Returns (smaller, larger).
    """
    if not (c < 0.0):
        raise NoInflectionError(f"no inflection: curvature must be negative, got c={c!r}")
    disc = -2.0 * c
    root = math.sqrt(disc)
    x_lo = (b - root) / disc
    x_hi = (b + root) / disc
    return math.exp(x_lo), math.exp(x_hi)


def inflection_point(a: float, b: float, c: float) -> float:
    """Downloads value at the upper concavity change of the fitted rank curve.

    The larger of the two roots is the one inside the plotted data range
    for download-scale fits; the smaller is retrievable from
    inflection_points.
    """
    return inflection_points(a, b, c)[1]


# ---------------------------------------------------------------------------
# density estimation and Gaussian fit


@dataclass(frozen=True)
class DensityCurve:
    """Evenly spaced density estimate; grid strictly increasing."""

    grid: tuple[float, ...]
    values: tuple[float, ...]
    bandwidth: float


def kde(samples: list[float], grid_size: int = 512) -> DensityCurve:
    """Gaussian-kernel density estimate on an evenly spaced grid.

    Bandwidth is 0.9 * min(sd, IQR/1.34) * n^(-1/5); the grid spans
    [min - 3 bw, max + 3 bw] so the curve integrates to about 1.  A
    sample whose spread measure vanishes is rejected.
    """
    arr = np.asarray(samples, dtype=float)
    if arr.ndim != 1 or arr.size < 2:
        raise DegenerateDataError("need at least 2 samples")
    if grid_size < 2:
        raise ValueError(f"grid_size must be >= 2, got {grid_size}")
    sd = float(arr.std(ddof=1))
    q1 = quantile(arr.tolist(), 0.25)
    q3 = quantile(arr.tolist(), 0.75)
    spread = min(sd, (q3 - q1) / 1.34)
    bandwidth = 0.9 * spread * arr.size ** (-0.2)
    if not (bandwidth > 0.0):
        raise DegenerateDataError("sample spread is zero, no usable bandwidth")
    lo = float(arr.min()) - 3.0 * bandwidth
    hi = float(arr.max()) + 3.0 * bandwidth
    grid = np.linspace(lo, hi, grid_size)
    values = np.empty(grid_size)
    norm = 1.0 / (arr.size * bandwidth * math.sqrt(2.0 * math.pi))
    # chunk the grid so the (grid x samples) matrix stays small
    step = 128
    for start in range(0, grid_size, step):
        block = grid[start : start + step, None]
        z = (block - arr[None, :]) / bandwidth
        values[start : start + step] = norm * np.exp(-0.5 * z * z).sum(axis=1)
    return DensityCurve(tuple(float(g) for g in grid), tuple(float(v) for v in values), bandwidth)


@dataclass(frozen=True)
class GaussianFit:
    mean: float
    sd: float
    peak: float
    residual_sse: float


def _nelder_mead(objective, start: np.ndarray, max_iter: int, rel_tol: float = 1e-8):
    """Derivative-free simplex minimization.

    Converged when the simplex diameter shrinks below rel_tol relative
    to the best vertex's magnitude.  Returns (best point, best value,
    iterations used, converged flag).
    """
    dim = len(start)
    simplex = [np.array(start, dtype=float)]
    for j in range(dim):
        vertex = np.array(start, dtype=float)
        vertex[j] = vertex[j] * 1.05 if vertex[j] != 0.0 else 0.00025
        simplex.append(vertex)
    values = [objective(p) for p in simplex]
    iterations = 0
    while iterations < max_iter:
        order = sorted(range(dim + 1), key=lambda i: values[i])
        simplex = [simplex[i] for i in order]
        values = [values[i] for i in order]
        best = simplex[0]
        diameter = max(float(np.max(np.abs(p - best))) for p in simplex[1:])
        scale = max(1.0, float(np.max(np.abs(best))))
        if diameter <= rel_tol * scale:
            return best, values[0], iterations, True
        iterations += 1
        centroid = np.mean(simplex[:-1], axis=0)
        worst = simplex[-1]
        reflected = centroid + (centroid - worst)
        f_reflected = objective(reflected)
        if f_reflected < values[0]:
            expanded = centroid + 2.0 * (centroid - worst)
            f_expanded = objective(expanded)
            if f_expanded < f_reflected:
                simplex[-1], values[-1] = expanded, f_expanded
            else:
                simplex[-1], values[-1] = reflected, f_reflected
        elif f_reflected < values[-2]:
            simplex[-1], values[-1] = reflected, f_reflected
        else:
            if f_reflected < values[-1]:
                contracted = centroid + 0.5 * (reflected - centroid)
                f_contracted = objective(contracted)
                accept = f_contracted <= f_reflected
            else:
                contracted = centroid + 0.5 * (worst - centroid)
                f_contracted = objective(contracted)
                accept = f_contracted < values[-1]
            if accept:
                simplex[-1], values[-1] = contracted, f_contracted
            else:
                # shrink toward the best vertex
                for i in range(1, dim + 1):
                    simplex[i] = simplex[0] + 0.5 * (simplex[i] - simplex[0])
                    values[i] = objective(simplex[i])
    order = sorted(range(dim + 1), key=lambda i: values[i])
    return simplex[order[0]], values[order[0]], iterations, False


def fit_gaussian(curve: DensityCurve, max_iter: int = 10_000) -> GaussianFit:
    """Least-squares Gaussian through a density curve.

    Minimizes the summed squared difference between the curve and
    peak * exp(-(x - mean)^2 / (2 sd^2)) with a simplex search started
    at the curve's weighted mean, weighted sd and maximum value.  After
    a first convergence the search restarts once from the solution to
    step past simplex stagnation; iterations share one budget.
    """
    grid = np.asarray(curve.grid, dtype=float)
    vals = np.asarray(curve.values, dtype=float)
    if grid.size < 10:
        raise ValueError(f"need at least 10 grid points, got {grid.size}")
    weight = float(vals.sum())
    if not (weight > 0.0):
        raise DegenerateDataError("curve has no mass to fit")
    mean0 = float((grid * vals).sum() / weight)
    var0 = float((((grid - mean0) ** 2) * vals).sum() / weight)
    spacing = float(grid[1] - grid[0])
    sd0 = math.sqrt(var0) if var0 > 0.0 else spacing
    peak0 = float(vals.max())

    def objective(params: np.ndarray) -> float:
        mean, sd, peak = params
        if sd == 0.0:
            return math.inf
        resid = vals - peak * np.exp(-((grid - mean) ** 2) / (2.0 * sd * sd))
        return float(resid @ resid)

    start = np.array([mean0, sd0, peak0])
    best, best_value, used, converged = _nelder_mead(objective, start, max_iter)
    if not converged:
        fit = GaussianFit(float(best[0]), abs(float(best[1])), float(best[2]), best_value)
        raise FitConvergenceError(f"no convergence within {max_iter} iterations", fit)
    remaining = max_iter - used
    if remaining > 0:
        again, again_value, _, again_converged = _nelder_mead(objective, best, remaining)
        if again_converged and again_value < best_value:
            best, best_value = again, again_value
    fit = GaussianFit(float(best[0]), abs(float(best[1])), float(best[2]), best_value)
    if not (fit.sd > 0.0 and fit.peak > 0.0):
        raise FitConvergenceError("search collapsed to a non-curve", fit)
    return fit
