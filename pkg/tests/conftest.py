"""Shared fixtures and independent brute-force references.

The brute_* functions restate the index definitions as literal
enumerations ("the largest k such that k papers have at least k
log-downloads") so the closed-form implementations are checked against
a second route, not against themselves.
"""

from __future__ import annotations

import math
import random

import pytest

from logdex import AuthorProfile, DownloadVector, PaperEntry, default_params, generate

# worked nine-paper vectors used across the suite
VEC_ONE = (47043, 7971, 7205, 6438, 6004, 5607, 5397, 5276, 3145)
VEC_TWO = (21609, 21148, 17194, 11034, 8930, 1308, 1134, 256, 231)


def seeded_vectors(count, seed, max_len=50):
    """Reproducible test vectors: mostly large counts, some zeros and ones."""
    rng = random.Random(seed)
    out = []
    for _ in range(count):
        n = rng.randint(1, max_len)
        counts = []
        for _ in range(n):
            roll = rng.random()
            if roll < 0.05:
                counts.append(0)
            elif roll < 0.15:
                counts.append(rng.randint(1, 5))
            else:
                counts.append(rng.randint(1, 10**6))
        out.append(counts)
    return out


def brute_k(counts, gamma: float = 1.0) -> int:
    """Largest k such that at least k papers have >= k floored log-downloads."""
    logs = [math.floor(gamma * math.log(c)) for c in counts if c > 0]
    best = 0
    for k in range(len(logs) + 1):
        if sum(1 for q in logs if q >= k) >= k:
            best = k
    return best


def brute_kappa(counts, gamma: float = 1.0) -> int:
    """Same enumeration on running means of the sorted counts."""
    ordered = sorted((c for c in counts if c > 0), reverse=True)
    if not ordered:
        return 0
    means = []
    running = 0
    for i, c in enumerate(ordered, start=1):
        running += c
        means.append(running / i)
    logs = [math.floor(gamma * math.log(f)) for f in means]
    best = 0
    for k in range(len(logs) + 1):
        if sum(1 for t in logs[:k] if t >= k) >= k:
            best = k
    return best


def brute_h(counts) -> int:
    positive = [c for c in counts if c > 0]
    best = 0
    for h in range(len(positive) + 1):
        if sum(1 for c in positive if c >= h) >= h:
            best = h
    return best


def brute_g(counts) -> int:
    ordered = sorted((c for c in counts if c > 0), reverse=True)
    best = 0
    for g in range(len(ordered) + 1):
        if sum(ordered[:g]) >= g * g:
            best = g
    return best


@pytest.fixture
def vec_one() -> DownloadVector:
    return DownloadVector(VEC_ONE)


@pytest.fixture
def vec_two() -> DownloadVector:
    return DownloadVector(VEC_TWO)


def make_profile(author_id: str, counts, name: str = "", declared: int | None = None) -> AuthorProfile:
    papers = tuple(
        PaperEntry(paper_id=f"{author_id}-P{i:03d}", downloads=c)
        for i, c in enumerate(counts, start=1)
    )
    return AuthorProfile(author_id=author_id, name=name or author_id, papers=papers, declared_total=declared)


@pytest.fixture(scope="session")
def default_corpus():
    """The 30,000-author seeded corpus; generated once per test session."""
    return generate(default_params())


@pytest.fixture(scope="session")
def default_reports(default_corpus):
    from logdex import build_reports

    return build_reports(default_corpus)
