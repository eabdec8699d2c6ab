"""Data model, ingestion and per-author report assembly.

The canonical interchange formats are a flat CSV (one row per paper)
and a JSON array of author objects.  Parsing normalizes everything into
AuthorProfile values; report assembly funnels a profile through
cleaning, the index family and the diagnostics into one flat record.
"""

from __future__ import annotations

import calendar
import csv
import io
import json
import math
import warnings
from contextlib import contextmanager
from dataclasses import dataclass, replace
from datetime import date
from enum import Enum
from pathlib import Path

from .diagnostics import diagnostic_set
from .indexes import (
    DownloadVector,
    GammaConfig,
    composite_index,
    g_index,
    h_index,
    k_star,
    kappa_star,
)
from .stats import SummarySix, summary_six


class CorpusFormatError(ValueError):
    """Malformed corpus input; the message carries the offending location."""


@dataclass(frozen=True)
class PaperEntry:
    """One paper row.  downloads=None means the field was empty, not zero."""

    paper_id: str
    downloads: int | None
    posted_date: date | None = None
    is_other: bool = False

    def __post_init__(self) -> None:
        if self.downloads is not None and self.downloads < 0:
            raise ValueError(f"downloads must be >= 0, got {self.downloads}")


@dataclass(frozen=True)
class AuthorProfile:
    author_id: str
    name: str
    papers: tuple[PaperEntry, ...]
    declared_total: int | None = None

    def __post_init__(self) -> None:
        if not self.author_id:
            raise ValueError("author_id must be non-empty")
        object.__setattr__(self, "papers", tuple(self.papers))


@dataclass(frozen=True)
class CleanResult:
    """Retained downloads plus the two paper counts derived from them."""

    vector: DownloadVector
    n_pos: int
    n_tot: int


class SanityStatus(Enum):
    PASSED = "passed"
    FAILED = "failed"
    SKIPPED = "skipped"


@dataclass(frozen=True)
class SanityResult:
    """Outcome of the declared-total check; delta = summed - declared."""

    status: SanityStatus
    delta: int | None


@dataclass(frozen=True)
class IndexReport:
    """Flat per-author record: totals, indexes, diagnostics, career length.

    Optional diagnostics are None when undefined and serialize as empty
    CSV cells or JSON nulls.  Field names equal the output column names.
    """

    author_id: str
    d_tot: int
    n_tot: int
    n_pos: int
    k: int
    k_star: float
    d_star: float
    kappa: int
    kappa_star: float
    f_star: float
    h: int
    g: int
    w: float | None
    omega: float | None
    u: float | None
    mu: float | None
    v: float | None
    T: float | None
    composite: float


REPORT_COLUMNS = (
    "author_id",
    "d_tot",
    "n_tot",
    "n_pos",
    "k",
    "k_star",
    "d_star",
    "kappa",
    "kappa_star",
    "f_star",
    "h",
    "g",
    "w",
    "omega",
    "u",
    "mu",
    "v",
    "T",
    "composite",
)

_REPORT_INT_FIELDS = {"d_tot", "n_tot", "n_pos", "k", "kappa", "h", "g"}
_REPORT_OPTIONAL_FIELDS = {"w", "omega", "u", "mu", "v", "T"}

CORPUS_COLUMNS = ("author_id", "author_name", "paper_id", "downloads", "posted_date", "is_other")


# ---------------------------------------------------------------------------
# stream plumbing


@contextmanager
def open_text(source, mode: str = "r"):
    """Yield a text stream for a path, text stream or byte stream."""
    if isinstance(source, (str, Path)):
        handle = open(source, mode, encoding="utf-8", newline="")
        try:
            yield handle
        finally:
            handle.close()
        return
    if not hasattr(source, "read") and not hasattr(source, "write"):
        raise TypeError(f"expected a path or stream, got {type(source).__name__}")
    probe = source.read(0) if "r" in mode and hasattr(source, "read") else None
    if isinstance(probe, bytes) or (probe is None and "b" in getattr(source, "mode", "")):
        wrapper = io.TextIOWrapper(source, encoding="utf-8", newline="")
        try:
            yield wrapper
        finally:
            wrapper.flush()
            wrapper.detach()  # leave the caller's byte stream open
        return
    yield source


# ---------------------------------------------------------------------------
# parsing


def _parse_downloads(raw: str, line_num: int) -> int | None:
    if raw == "":
        return None
    try:
        value = int(raw)
    except ValueError:
        raise CorpusFormatError(f"line {line_num}: downloads must be an integer, got {raw!r}") from None
    if value < 0:
        raise CorpusFormatError(f"line {line_num}: downloads must be >= 0, got {value}")
    return value


def _parse_date(raw: str, line_num: int) -> date | None:
    if raw == "":
        return None
    try:
        return date.fromisoformat(raw)
    except ValueError:
        raise CorpusFormatError(f"line {line_num}: posted_date must be YYYY-MM-DD, got {raw!r}") from None


def _parse_flag(raw: str, line_num: int) -> bool:
    lowered = raw.strip().lower()
    if lowered in ("", "false"):
        return False
    if lowered == "true":
        return True
    raise CorpusFormatError(f"line {line_num}: is_other must be true/false/empty, got {raw!r}")


def _parse_corpus_csv(stream) -> list[AuthorProfile]:
    reader = csv.reader(stream)
    try:
        header = next(reader)
    except StopIteration:
        raise CorpusFormatError("empty input: header row required") from None
    positions = {name: i for i, name in enumerate(header)}
    missing = [name for name in CORPUS_COLUMNS if name not in positions]
    if missing:
        raise CorpusFormatError(f"missing required column(s): {', '.join(missing)}")
    unknown = [name for name in header if name not in CORPUS_COLUMNS]
    if unknown:
        warnings.warn(f"ignored {len(unknown)} unknown column(s): {', '.join(unknown)}", stacklevel=3)

    names: dict[str, str] = {}
    papers: dict[str, list[PaperEntry]] = {}
    seen: set[tuple[str, str]] = set()
    for row in reader:
        if not row:
            continue
        line = reader.line_num
        if len(row) != len(header):
            raise CorpusFormatError(f"line {line}: expected {len(header)} fields, got {len(row)}")
        author_id = row[positions["author_id"]]
        paper_id = row[positions["paper_id"]]
        if not author_id:
            raise CorpusFormatError(f"line {line}: author_id must be non-empty")
        if not paper_id:
            raise CorpusFormatError(f"line {line}: paper_id must be non-empty")
        key = (author_id, paper_id)
        if key in seen:
            raise CorpusFormatError(f"line {line}: duplicate paper {paper_id!r} for author {author_id!r}")
        seen.add(key)
        entry = PaperEntry(
            paper_id=paper_id,
            downloads=_parse_downloads(row[positions["downloads"]], line),
            posted_date=_parse_date(row[positions["posted_date"]], line),
            is_other=_parse_flag(row[positions["is_other"]], line),
        )
        names.setdefault(author_id, row[positions["author_name"]])
        papers.setdefault(author_id, []).append(entry)

    profiles = []
    for author_id in sorted(papers):
        ordered = tuple(sorted(papers[author_id], key=lambda p: p.paper_id))
        profiles.append(AuthorProfile(author_id=author_id, name=names[author_id], papers=ordered))
    return profiles


def _require(condition: bool, where: str, message: str) -> None:
    if not condition:
        raise CorpusFormatError(f"{where}: {message}")


def _parse_corpus_json(stream) -> list[AuthorProfile]:
    try:
        data = json.load(stream)
    except json.JSONDecodeError as exc:
        raise CorpusFormatError(f"invalid JSON at line {exc.lineno}: {exc.msg}") from None
    _require(isinstance(data, list), "top level", "expected an array of author objects")
    profiles = []
    seen_authors: set[str] = set()
    for a_idx, obj in enumerate(data):
        where = f"author[{a_idx}]"
        _require(isinstance(obj, dict), where, "expected an object")
        author_id = obj.get("author_id")
        _require(isinstance(author_id, str) and author_id != "", where, "author_id must be a non-empty string")
        _require(author_id not in seen_authors, where, f"duplicate author_id {author_id!r}")
        seen_authors.add(author_id)
        name = obj.get("name", "")
        _require(isinstance(name, str), where, "name must be a string")
        declared = obj.get("declared_total")
        if declared is not None:
            _require(isinstance(declared, int) and not isinstance(declared, bool) and declared >= 0,
                     where, "declared_total must be a non-negative integer or null")
        raw_papers = obj.get("papers", [])
        _require(isinstance(raw_papers, list), where, "papers must be an array")
        entries = []
        seen_papers: set[str] = set()
        for p_idx, p in enumerate(raw_papers):
            p_where = f"{where}.papers[{p_idx}]"
            _require(isinstance(p, dict), p_where, "expected an object")
            paper_id = p.get("paper_id")
            _require(isinstance(paper_id, str) and paper_id != "", p_where, "paper_id must be a non-empty string")
            _require(paper_id not in seen_papers, p_where, f"duplicate paper_id {paper_id!r}")
            seen_papers.add(paper_id)
            downloads = p.get("downloads")
            if downloads is not None:
                _require(isinstance(downloads, int) and not isinstance(downloads, bool) and downloads >= 0,
                         p_where, "downloads must be a non-negative integer or null")
            raw_date = p.get("posted_date")
            posted = None
            if raw_date is not None:
                _require(isinstance(raw_date, str), p_where, "posted_date must be a YYYY-MM-DD string or null")
                try:
                    posted = date.fromisoformat(raw_date)
                except ValueError:
                    raise CorpusFormatError(f"{p_where}: posted_date must be YYYY-MM-DD, got {raw_date!r}") from None
            is_other = p.get("is_other", False)
            _require(isinstance(is_other, bool), p_where, "is_other must be a boolean")
            entries.append(PaperEntry(paper_id=paper_id, downloads=downloads, posted_date=posted, is_other=is_other))
        entries.sort(key=lambda p: p.paper_id)
        profiles.append(AuthorProfile(author_id=author_id, name=name, papers=tuple(entries), declared_total=declared))
    profiles.sort(key=lambda a: a.author_id)
    return profiles


def parse_corpus(source, format: str = "csv") -> list[AuthorProfile]:
    """Read author profiles from a path or stream.

    Profiles come back sorted by author_id with papers sorted by
    paper_id, so any row order in the input produces the same result.
    Empty downloads cells become None (absent), never 0.
    """
    if format not in ("csv", "json"):
        raise ValueError(f"unknown corpus format {format!r}")
    with open_text(source) as stream:
        if format == "csv":
            return _parse_corpus_csv(stream)
        return _parse_corpus_json(stream)


def parse_totals(source) -> dict[str, int]:
    """Read the optional author_id -> declared_total side file."""
    totals: dict[str, int] = {}
    with open_text(source) as stream:
        reader = csv.reader(stream)
        try:
            header = next(reader)
        except StopIteration:
            raise CorpusFormatError("empty totals input: header row required") from None
        if header[:2] != ["author_id", "declared_total"]:
            raise CorpusFormatError(f"totals header must be author_id,declared_total, got {','.join(header)}")
        for row in reader:
            if not row:
                continue
            line = reader.line_num
            if len(row) != 2:
                raise CorpusFormatError(f"line {line}: expected 2 fields, got {len(row)}")
            author_id, raw = row
            if not author_id:
                raise CorpusFormatError(f"line {line}: author_id must be non-empty")
            if author_id in totals:
                raise CorpusFormatError(f"line {line}: duplicate author_id {author_id!r}")
            try:
                value = int(raw)
            except ValueError:
                raise CorpusFormatError(f"line {line}: declared_total must be an integer, got {raw!r}") from None
            if value < 0:
                raise CorpusFormatError(f"line {line}: declared_total must be >= 0, got {value}")
            totals[author_id] = value
    return totals


def with_declared_totals(profiles: list[AuthorProfile], totals: dict[str, int]) -> list[AuthorProfile]:
    """Attach declared totals where present; authors not listed keep None."""
    return [
        replace(p, declared_total=totals[p.author_id]) if p.author_id in totals else p
        for p in profiles
    ]


# ---------------------------------------------------------------------------
# cleaning, sanity, career length


def clean(profile: AuthorProfile) -> CleanResult:
    """Drop flagged and absent-downloads papers; keep zero-download ones.

    n_tot counts every retained paper, n_pos only those with downloads
    above zero.  The vector stores all retained counts, zeros included.
    """
    retained = [p.downloads for p in profile.papers if not p.is_other and p.downloads is not None]
    vector = DownloadVector(retained)
    return CleanResult(vector=vector, n_pos=vector.n_pos, n_tot=len(retained))


def sanity_check(profile: AuthorProfile) -> SanityResult:
    """Compare summed retained downloads with the declared total.

    Skipped (not failed) when no total was declared.  delta is the
    signed difference summed - declared.
    """
    if profile.declared_total is None:
        return SanityResult(status=SanityStatus.SKIPPED, delta=None)
    summed = clean(profile).vector.d_tot
    delta = summed - profile.declared_total
    status = SanityStatus.PASSED if delta == 0 else SanityStatus.FAILED
    return SanityResult(status=status, delta=delta)


def _add_months(start: date, months: int) -> date:
    total = start.year * 12 + (start.month - 1) + months
    year, month = divmod(total, 12)
    month += 1
    day = min(start.day, calendar.monthrange(year, month)[1])
    return date(year, month, day)


def career_length(profile: AuthorProfile, as_of: date) -> float | None:
    """Years from the earliest posted date to as_of.

    Whole calendar months count 1/12 year each and leftover days 1/30
    month.  Every entry with a date participates, flagged papers too.
    None when no entry carries a date.
    """
    dated = [p.posted_date for p in profile.papers if p.posted_date is not None]
    if not dated:
        return None
    earliest = min(dated)
    latest = max(dated)
    if latest > as_of:
        raise ValueError(f"posted date {latest} is after as_of {as_of}")
    months = (as_of.year - earliest.year) * 12 + (as_of.month - earliest.month)
    if as_of.day < earliest.day:
        months -= 1
    days = (as_of - _add_months(earliest, months)).days
    return (months + days / 30.0) / 12.0


# ---------------------------------------------------------------------------
# report assembly


def build_report(profile: AuthorProfile, config: GammaConfig = GammaConfig(), as_of: date | None = None) -> IndexReport:
    """Run cleaning, every index and every diagnostic for one author."""
    cleaned = clean(profile)
    vector = cleaned.vector
    k_res = k_star(vector, config)
    kappa_res = kappa_star(vector, config)
    diagnostics = diagnostic_set(vector, k_res.k, kappa_res.kappa)
    career = career_length(profile, as_of) if as_of is not None else None
    return IndexReport(
        author_id=profile.author_id,
        d_tot=vector.d_tot,
        n_tot=cleaned.n_tot,
        n_pos=cleaned.n_pos,
        k=k_res.k,
        k_star=k_res.k_star,
        d_star=k_res.d_star,
        kappa=kappa_res.kappa,
        kappa_star=kappa_res.kappa_star,
        f_star=kappa_res.f_star,
        h=h_index(vector),
        g=g_index(vector),
        w=diagnostics.w,
        omega=diagnostics.omega,
        u=diagnostics.u,
        mu=diagnostics.mu,
        v=diagnostics.v,
        T=career,
        composite=composite_index(k_res, kappa_res),
    )


def build_reports(profiles: list[AuthorProfile], config: GammaConfig = GammaConfig(), as_of: date | None = None) -> list[IndexReport]:
    """Reports for a whole corpus, ascending author_id."""
    ordered = sorted(profiles, key=lambda p: p.author_id)
    return [build_report(p, config, as_of) for p in ordered]


def cross_section(reports: list[IndexReport]) -> dict[str, SummarySix | None]:
    """Summary rows over a corpus of reports.

    Each row summarizes one quantity across authors, leaving out absent
    values; a row with no defined values at all maps to None.  Log rows
    restrict to entries where the log argument is positive.
    """
    if not reports:
        raise ValueError("need at least one report")

    def gather(fn) -> list[float]:
        out = []
        for r in reports:
            value = fn(r)
            if value is not None:
                out.append(float(value))
        return out

    rows: dict[str, SummarySix | None] = {}
    extractors = [
        ("d_tot", lambda r: r.d_tot),
        ("ln_d_tot", lambda r: math.log(r.d_tot) if r.d_tot >= 1 else None),
        ("n_tot", lambda r: r.n_tot),
        ("ln_n_tot", lambda r: math.log(r.n_tot) if r.n_tot >= 1 else None),
        ("d_per_paper", lambda r: r.d_tot / r.n_tot if r.n_tot >= 1 else None),
        ("ln_d_per_paper", lambda r: math.log(r.d_tot / r.n_tot) if r.d_tot >= 1 and r.n_tot >= 1 else None),
        ("k_star", lambda r: r.k_star),
        ("u", lambda r: r.u),
        ("w", lambda r: r.w),
        ("ln_w", lambda r: math.log(r.w) if r.w is not None else None),
        ("v", lambda r: r.v),
        ("kappa_star", lambda r: r.kappa_star),
        ("mu", lambda r: r.mu),
        ("omega", lambda r: r.omega),
        ("ln_omega", lambda r: math.log(r.omega) if r.omega is not None else None),
    ]
    for name, fn in extractors:
        values = gather(fn)
        rows[name] = summary_six(values) if values else None
    return rows


# ---------------------------------------------------------------------------
# serialization


def _format_real(value: float | None) -> str:
    return "" if value is None else f"{value:.6g}"


def write_reports(reports: list[IndexReport], dest, format: str = "csv") -> None:
    """Write reports with the fixed column order; absent values stay empty.

    Reals carry 6 significant digits in CSV; JSON keeps full precision
    and uses nulls for absent values.
    """
    if format == "csv":
        with open_text(dest, "w") as stream:
            writer = csv.writer(stream, lineterminator="\n")
            writer.writerow(REPORT_COLUMNS)
            for r in reports:
                row = []
                for column in REPORT_COLUMNS:
                    value = getattr(r, column)
                    if column == "author_id":
                        row.append(value)
                    elif column in _REPORT_INT_FIELDS:
                        row.append(str(value))
                    else:
                        row.append(_format_real(value))
                writer.writerow(row)
        return
    if format == "json":
        payload = [{column: getattr(r, column) for column in REPORT_COLUMNS} for r in reports]
        with open_text(dest, "w") as stream:
            json.dump(payload, stream, indent=2)
            stream.write("\n")
        return
    raise ValueError(f"unknown report format {format!r}")


def read_reports(source, format: str = "csv") -> list[IndexReport]:
    """Read back a report file written by write_reports."""
    if format == "csv":
        with open_text(source) as stream:
            reader = csv.reader(stream)
            try:
                header = next(reader)
            except StopIteration:
                raise CorpusFormatError("empty report input: header row required") from None
            if tuple(header) != REPORT_COLUMNS:
                raise CorpusFormatError(f"unexpected report header: {','.join(header)}")
            reports = []
            for row in reader:
                if not row:
                    continue
                line = reader.line_num
                if len(row) != len(REPORT_COLUMNS):
                    raise CorpusFormatError(f"line {line}: expected {len(REPORT_COLUMNS)} fields, got {len(row)}")
                kwargs = {}
                for column, raw in zip(REPORT_COLUMNS, row):
                    if column == "author_id":
                        kwargs[column] = raw
                    elif column in _REPORT_INT_FIELDS:
                        try:
                            kwargs[column] = int(raw)
                        except ValueError:
                            raise CorpusFormatError(f"line {line}: {column} must be an integer, got {raw!r}") from None
                    elif raw == "":
                        if column not in _REPORT_OPTIONAL_FIELDS:
                            raise CorpusFormatError(f"line {line}: {column} must not be empty")
                        kwargs[column] = None
                    else:
                        try:
                            kwargs[column] = float(raw)
                        except ValueError:
                            raise CorpusFormatError(f"line {line}: {column} must be a number, got {raw!r}") from None
                reports.append(IndexReport(**kwargs))
            return reports
    if format == "json":
        with open_text(source) as stream:
            try:
                data = json.load(stream)
            except json.JSONDecodeError as exc:
                raise CorpusFormatError(f"invalid JSON at line {exc.lineno}: {exc.msg}") from None
        _require(isinstance(data, list), "top level", "expected an array of report objects")
        reports = []
        for idx, obj in enumerate(data):
            _require(isinstance(obj, dict), f"report[{idx}]", "expected an object")
            missing = [c for c in REPORT_COLUMNS if c not in obj]
            _require(not missing, f"report[{idx}]", f"missing field(s): {', '.join(missing)}")
            reports.append(IndexReport(**{c: obj[c] for c in REPORT_COLUMNS}))
        return reports
    raise ValueError(f"unknown report format {format!r}")


def write_corpus(profiles: list[AuthorProfile], dest, format: str = "csv") -> None:
    """Write profiles in the corpus interchange schema.

    The CSV form carries one row per paper, so an author without papers
    only survives a JSON round trip.
    """
    ordered = sorted(profiles, key=lambda p: p.author_id)
    if format == "csv":
        with open_text(dest, "w") as stream:
            writer = csv.writer(stream, lineterminator="\n")
            writer.writerow(CORPUS_COLUMNS)
            for profile in ordered:
                for paper in sorted(profile.papers, key=lambda p: p.paper_id):
                    writer.writerow([
                        profile.author_id,
                        profile.name,
                        paper.paper_id,
                        "" if paper.downloads is None else str(paper.downloads),
                        "" if paper.posted_date is None else paper.posted_date.isoformat(),
                        "true" if paper.is_other else "false",
                    ])
        return
    if format == "json":
        payload = []
        for profile in ordered:
            payload.append({
                "author_id": profile.author_id,
                "name": profile.name,
                "declared_total": profile.declared_total,
                "papers": [
                    {
                        "paper_id": p.paper_id,
                        "downloads": p.downloads,
                        "posted_date": None if p.posted_date is None else p.posted_date.isoformat(),
                        "is_other": p.is_other,
                    }
                    for p in sorted(profile.papers, key=lambda p: p.paper_id)
                ],
            })
        with open_text(dest, "w") as stream:
            json.dump(payload, stream, indent=2)
            stream.write("\n")
        return
    raise ValueError(f"unknown corpus format {format!r}")


def write_totals(profiles: list[AuthorProfile], dest) -> None:
    """Write the declared-totals side file for profiles that have one."""
    with open_text(dest, "w") as stream:
        writer = csv.writer(stream, lineterminator="\n")
        writer.writerow(["author_id", "declared_total"])
        for profile in sorted(profiles, key=lambda p: p.author_id):
            if profile.declared_total is not None:
                writer.writerow([profile.author_id, str(profile.declared_total)])
