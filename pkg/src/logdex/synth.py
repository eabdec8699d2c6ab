"""Seeded synthetic corpus generator.

Produces author portfolios whose download counts follow a log-normal
regime: per-author paper counts and quality levels are drawn on a log
scale, and each paper adds its own log-scale noise.  The random stream
comes from a self-contained 64-bit generator with published reference
output, so the same parameters yield byte-identical corpora on every
platform and in every implementation language.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .corpus import AuthorProfile, PaperEntry

_MASK64 = (1 << 64) - 1


class SplitMix64:
    """Splitmix-style 64-bit generator.

    One additive constant and two xor-multiply mixing rounds per output;
    the reference output vectors pinned in the tests define the stream.
    """

    def __init__(self, seed: int):
        self._state = seed & _MASK64

    def next_raw(self) -> int:
        self._state = (self._state + 0x9E3779B97F4A7C15) & _MASK64
        z = self._state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
        return (z ^ (z >> 31)) & _MASK64

    def uniform(self) -> float:
        # top 53 bits, centered in the bin: value sits strictly in (0, 1)
        return ((self.next_raw() >> 11) + 0.5) * 2.0 ** -53

    def normal(self, mean: float = 0.0, sd: float = 1.0) -> float:
        return mean + sd * normal_icdf(self.uniform())


# Rational minimax coefficients for the inverse normal CDF
# (central region and tails), accurate to ~1.15e-9 before refinement.
_ICDF_A = (-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
           1.383577518672690e+02, -3.066479806614716e+01, 2.506628277459239e+00)
_ICDF_B = (-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
           6.680131188771972e+01, -1.328068155288572e+01)
_ICDF_C = (-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
           -2.549732539343734e+00, 4.374664141464968e+00, 2.938163982698783e+00)
_ICDF_D = (7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
           3.754408661907416e+00)
_ICDF_SPLIT = 0.02425


def normal_icdf(p: float) -> float:
    """Inverse standard normal CDF.

    Rational approximation plus one Halley refinement step against the
    exact complementary error function, giving close to full double
    precision.  Deterministic: exactly one evaluation path per input.
    """
    if not (0.0 < p < 1.0):
        raise ValueError(f"p must be strictly inside (0, 1), got {p!r}")
    a, b, c, d = _ICDF_A, _ICDF_B, _ICDF_C, _ICDF_D
    if p < _ICDF_SPLIT:
        q = math.sqrt(-2.0 * math.log(p))
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) / \
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0)
    elif p <= 1.0 - _ICDF_SPLIT:
        q = p - 0.5
        r = q * q
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q / \
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0)
    else:
        q = math.sqrt(-2.0 * math.log(1.0 - p))
        x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) / \
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0)
    # Halley step: e is the CDF error at x, u its Newton correction
    e = 0.5 * math.erfc(-x / math.sqrt(2.0)) - p
    u = e * math.sqrt(2.0 * math.pi) * math.exp(x * x / 2.0)
    return x - u / (1.0 + x * u / 2.0)


@dataclass(frozen=True)
class SynthParams:
    """Generator knobs; all scales are on the log axis."""

    n_authors: int
    paper_count_mean_log: float
    paper_count_sd_log: float
    author_quality_mean: float
    author_quality_sd: float
    paper_noise_sd: float
    seed: int

    def __post_init__(self) -> None:
        if self.n_authors < 1:
            raise ValueError(f"n_authors must be >= 1, got {self.n_authors}")
        for field in ("paper_count_sd_log", "author_quality_sd", "paper_noise_sd"):
            if not (getattr(self, field) > 0.0):
                raise ValueError(f"{field} must be > 0, got {getattr(self, field)!r}")


def default_params() -> SynthParams:
    """Baseline parameter set producing a 30,000-author corpus."""
    return SynthParams(
        n_authors=30_000,
        paper_count_mean_log=2.0,
        paper_count_sd_log=1.0,
        author_quality_mean=5.35,
        author_quality_sd=1.0,
        paper_noise_sd=0.8,
        seed=42,
    )


def _round_half_up(x: float) -> int:
    return math.floor(x + 0.5)


def generate(params: SynthParams) -> list[AuthorProfile]:
    """Draw a corpus author by author from one sequential stream.

    Per author the draw order is fixed: paper count, quality, then one
    noise draw per paper.  Paper counts and downloads are at least 1.
    Declared totals equal the summed downloads, so the generated corpus
    always passes the sanity check.
    """
    rng = SplitMix64(params.seed)
    profiles = []
    for i in range(1, params.n_authors + 1):
        count_log = rng.normal(params.paper_count_mean_log, params.paper_count_sd_log)
        n_papers = max(1, _round_half_up(math.exp(count_log)))
        quality = rng.normal(params.author_quality_mean, params.author_quality_sd)
        author_id = f"A{i:06d}"
        papers = []
        total = 0
        for j in range(1, n_papers + 1):
            noise = rng.normal(0.0, params.paper_noise_sd)
            downloads = max(1, _round_half_up(math.exp(quality + noise)))
            total += downloads
            papers.append(PaperEntry(paper_id=f"{author_id}-P{j:04d}", downloads=downloads))
        profiles.append(AuthorProfile(
            author_id=author_id,
            name=f"Author {i:06d}",
            papers=tuple(papers),
            declared_total=total,
        ))
    return profiles
