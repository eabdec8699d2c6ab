"""Concentration and scale diagnostics that sit alongside the indexes.

These are ratios and per-paper quantities used to read a portfolio's
shape: how much of the total sits above the block the index certifies,
how the total relates to output volume, and a calibration heuristic for
the log-scale factor derived from a cross-section of such quantities.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .indexes import DownloadVector
from .stats import quantile


class UndefinedDiagnosticError(ValueError):
    """Raised when a diagnostic has no value for the given portfolio."""


class DegenerateCorpusError(ValueError):
    """Raised when a cross-section is too degenerate to calibrate from."""


@dataclass(frozen=True)
class DiagnosticSet:
    """Per-portfolio diagnostics; None marks an undefined value.

    w and omega require an index of at least 1, u and mu additionally a
    positive paper count, v a positive download total.  Undefined
    entries stay None so downstream writers can emit empty cells rather
    than fake zeros.
    """

    w: float | None
    omega: float | None
    u: float | None
    mu: float | None
    v: float | None
    n_pos: int
    n_tot: int


def w_ratio(vector: DownloadVector, k: int) -> float:
    """Total downloads over k times the k-th largest count.

    Reads how far the portfolio total exceeds the square block the
    integer index certifies; always >= 1 when k is the index of this
    vector.  Undefined for k < 1.
    """
    if k < 1:
        raise UndefinedDiagnosticError("w is undefined when the index is 0")
    positive = vector.positive
    if k > len(positive):
        raise UndefinedDiagnosticError(f"k={k} exceeds the {len(positive)} positive counts")
    return vector.d_tot / (k * positive[k - 1])


def omega_ratio(vector: DownloadVector, kappa: int) -> float:
    """Total downloads over kappa times the kappa-th prefix mean.

    The denominator equals the sum of the kappa largest counts, so the
    ratio is exactly 1 when kappa covers every positive paper and grows
    with the mass left outside the top block.  Undefined for kappa < 1.
    """
    if kappa < 1:
        raise UndefinedDiagnosticError("omega is undefined when the index is 0")
    positive = vector.positive
    if kappa > len(positive):
        raise UndefinedDiagnosticError(f"kappa={kappa} exceeds the {len(positive)} positive counts")
    return vector.d_tot / sum(positive[:kappa])


def v_quantity(d_tot: int, n_tot: int) -> float:
    """Log of mean downloads per paper, divided again by the paper count.

    Small for prolific authors regardless of volume; of order 1 only for
    compact portfolios.  Its cross-section median drives gamma_heuristic.
    """
    if n_tot < 1:
        raise UndefinedDiagnosticError("v is undefined for an empty portfolio")
    if d_tot < 1:
        raise UndefinedDiagnosticError("v is undefined without positive downloads")
    return math.log(d_tot / n_tot) / n_tot


def diagnostic_set(vector: DownloadVector, k: int, kappa: int) -> DiagnosticSet:
    """Assemble every diagnostic for one portfolio, None where undefined."""
    n_tot = vector.n_tot
    n_pos = vector.n_pos
    d_tot = vector.d_tot
    w = w_ratio(vector, k) if k >= 1 else None
    omega = omega_ratio(vector, kappa) if kappa >= 1 else None
    # k >= 1 implies at least one retained paper, so n_tot >= 1 here
    u = k / n_tot if k >= 1 and n_tot >= 1 else None
    mu = kappa / n_tot if kappa >= 1 and n_tot >= 1 else None
    v = v_quantity(d_tot, n_tot) if d_tot >= 1 and n_tot >= 1 else None
    return DiagnosticSet(w=w, omega=omega, u=u, mu=mu, v=v, n_pos=n_pos, n_tot=n_tot)


def gamma_heuristic(v_values: list[float]) -> float:
    """Reciprocal of the median v across a corpus.

    Calibrates the log-scale factor so a typical portfolio's v maps to
    one unit.  The median uses the same linear-interpolation convention
    as the summary statistics.
    """
    if not v_values:
        raise DegenerateCorpusError("cannot calibrate from an empty cross-section")
    med = quantile(v_values, 0.5)
    if not (med > 0.0):
        raise DegenerateCorpusError(f"median v must be positive, got {med!r}")
    return 1.0 / med


# sqrt(6) * ln(2) / pi: slope of the square-root rule below.
YONG_CONSTANT = math.sqrt(6.0) * math.log(2.0) / math.pi


def yong_estimate(c_tot: float) -> float:
    """Square-root rule of thumb for an h-style index given only a total count."""
    if c_tot < 0:
        raise ValueError(f"total must be >= 0, got {c_tot!r}")
    return YONG_CONSTANT * math.sqrt(c_tot)


def time_normalized(value: float, career_years: float) -> float:
    """Index per career year.

    Requires at least one year of history; shorter careers make the
    rate explode and are rejected.
    """
    if not (career_years >= 1.0):
        raise UndefinedDiagnosticError(f"career length must be >= 1 year, got {career_years!r}")
    return value / career_years
