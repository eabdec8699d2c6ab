"""Portfolio indexes built on the integer part of log download counts.

A portfolio is a multiset of per-paper download counts.  The central
quantity is the largest k such that k papers each have at least k units
of log-downloads, together with a continuous interpolation of that
staircase and a cumulative-mean variant that credits concentrated
portfolios.  All indexes accept an optional scale factor applied to the
log before flooring; the default scale of 1 reproduces the plain
natural-log definitions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

# Near-integer guard for the floor of a log: counts are integers, so a
# scaled log landing within this distance of an integer is treated as
# sitting exactly on the threshold and floored to the level below.
FLOOR_TOL = 1e-9


def guarded_floor(x: float) -> int:
    nearest = round(x)
    if abs(x - nearest) <= FLOOR_TOL:
        return int(nearest) - 1
    return math.floor(x)


@dataclass(frozen=True)
class GammaConfig:
    """Scale factor applied to log counts before flooring.

    gamma=1.0 gives plain natural-log units.  Smaller gamma compresses
    the staircase (higher download thresholds per level), larger gamma
    stretches it.
    """

    gamma: float = 1.0

    def __post_init__(self) -> None:
        if not (self.gamma > 0.0 and math.isfinite(self.gamma)):
            raise ValueError(f"gamma must be a positive finite number, got {self.gamma!r}")


@dataclass(frozen=True)
class DownloadVector:
    """Download counts of one portfolio, held sorted in descending order.

    Accepts counts in any order; zeros are kept (they count toward the
    paper total but carry no log-credit), negatives are rejected.
    """

    counts: tuple[int, ...]

    def __init__(self, counts) -> None:
        cleaned = []
        for c in counts:
            if isinstance(c, bool):
                raise ValueError(f"download count must be an integer, got {c!r}")
            if isinstance(c, float):
                if not c.is_integer():
                    raise ValueError(f"download count must be an integer, got {c!r}")
                c = int(c)
            if not isinstance(c, int):
                raise ValueError(f"download count must be an integer, got {c!r}")
            if c < 0:
                raise ValueError(f"download count must be >= 0, got {c}")
            cleaned.append(c)
        cleaned.sort(reverse=True)
        object.__setattr__(self, "counts", tuple(cleaned))

    @property
    def positive(self) -> tuple[int, ...]:
        """Counts with zero entries dropped; still descending."""
        return tuple(c for c in self.counts if c > 0)

    @property
    def n_tot(self) -> int:
        return len(self.counts)

    @property
    def n_pos(self) -> int:
        return sum(1 for c in self.counts if c > 0)

    @property
    def d_tot(self) -> int:
        return sum(self.counts)


@dataclass(frozen=True)
class KResult:
    """Integer index k with its interpolated value and download equivalent.

    Invariant: k <= k_star < k + 1, and d_star = exp(k_star / gamma) is
    the download level whose scaled log equals k_star.
    """

    k: int
    k_star: float
    d_star: float


@dataclass(frozen=True)
class KappaResult:
    """Cumulative-mean counterpart of KResult.

    f_star = exp(kappa_star / gamma) is stated in mean-download units.
    """

    kappa: int
    kappa_star: float
    f_star: float


def log_counts(vector: DownloadVector, config: GammaConfig = GammaConfig()) -> list[int]:
    """Floor of gamma * ln(count) for each positive count, clamped at zero.

    The clamp makes a count of 1 contribute level 0 rather than a
    negative level when gamma * ln(1) - tolerance would floor below it.
    """
    return [max(0, guarded_floor(config.gamma * math.log(c))) for c in vector.positive]


def _staircase_max(levels: list[int]) -> int:
    # levels must be descending; the index is max_i min(level_i, i).
    best = 0
    for i, level in enumerate(levels, start=1):
        credit = min(level, i)
        if credit > best:
            best = credit
    return best


def k_index(vector: DownloadVector, config: GammaConfig = GammaConfig()) -> int:
    """Largest k such that k papers each have >= k floored log-downloads."""
    return _staircase_max(log_counts(vector, config))


def _prefix_means(positive: tuple[int, ...]) -> list[float]:
    means = []
    running = 0
    for i, c in enumerate(positive, start=1):
        running += c
        means.append(running / i)
    return means


def kappa_index(vector: DownloadVector, config: GammaConfig = GammaConfig()) -> int:
    """Same staircase as k_index, applied to prefix means of the counts.

    The prefix mean at rank i is the average of the i largest counts, so
    one dominant paper lifts every level below it.
    """
    levels = [max(0, guarded_floor(config.gamma * math.log(f))) for f in _prefix_means(vector.positive)]
    return _staircase_max(levels)


def _interpolate(k: int, levels: list[float]) -> float:
    """Continuous crossing point of the staircase through its integer index.

    levels[i-1] is the scaled (unfloored) log at rank i; the sequence is
    non-increasing.  For k >= 1 the crossing lies in [k, k+1).
    """
    n = len(levels)
    big = levels[k - 1]
    small = levels[k] if k < n else float(k)
    return ((k + 1) * big - k * small) / (1.0 + big - small)


def _clamp_unit(value: float, k: int) -> float:
    # Contract: k <= value < k + 1.  Floating-point noise near the
    # guard tolerance can land a hair outside; pin it back.
    lo = float(k)
    hi = math.nextafter(float(k + 1), lo)
    return min(max(value, lo), hi)


def k_star(vector: DownloadVector, config: GammaConfig = GammaConfig()) -> KResult:
    """Interpolated index between the integer steps.

    An empty portfolio (no positive counts) returns (0, 0.0, 1.0).  When
    the integer index is 0 but a positive count exists, the interpolation
    degenerates to the scaled log of the largest count.
    """
    positive = vector.positive
    if not positive:
        return KResult(k=0, k_star=0.0, d_star=1.0)
    k = k_index(vector, config)
    if k == 0:
        value = config.gamma * math.log(positive[0])
    else:
        levels = [config.gamma * math.log(c) for c in positive]
        value = _interpolate(k, levels)
    value = _clamp_unit(value, k)
    return KResult(k=k, k_star=value, d_star=math.exp(value / config.gamma))


def kappa_star(vector: DownloadVector, config: GammaConfig = GammaConfig()) -> KappaResult:
    """Interpolated cumulative-mean index, mirroring k_star."""
    positive = vector.positive
    if not positive:
        return KappaResult(kappa=0, kappa_star=0.0, f_star=1.0)
    kappa = kappa_index(vector, config)
    means = _prefix_means(positive)
    if kappa == 0:
        value = config.gamma * math.log(means[0])
    else:
        levels = [config.gamma * math.log(f) for f in means]
        value = _interpolate(kappa, levels)
    value = _clamp_unit(value, kappa)
    return KappaResult(kappa=kappa, kappa_star=value, f_star=math.exp(value / config.gamma))


def h_index(vector: DownloadVector) -> int:
    """Largest h such that h papers each have >= h raw downloads."""
    best = 0
    for i, c in enumerate(vector.positive, start=1):
        if c < i:
            break
        best = i
    return best


def g_index(vector: DownloadVector) -> int:
    """Largest g such that the top g papers together have >= g^2 downloads.

    Capped at the number of positive papers, so g never exceeds the
    portfolio size even when the total would support a larger square.
    """
    best = 0
    running = 0
    for i, c in enumerate(vector.positive, start=1):
        running += c
        if running >= i * i:
            best = i
    return best


def composite_index(k_result: KResult, kappa_result: KappaResult) -> float:
    """Geometric mean of the two interpolated indexes.

    Zero when either component is zero; between the two values otherwise.
    """
    return math.sqrt(k_result.k_star * kappa_result.kappa_star)
