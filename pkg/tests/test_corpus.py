"""Parsing, cleaning, sanity checks, career lengths, reports and files."""

import dataclasses
import io
import math
import random
from datetime import date

import pytest

from logdex import (
    AuthorProfile,
    CorpusFormatError,
    DownloadVector,
    PaperEntry,
    REPORT_COLUMNS,
    SanityStatus,
    build_report,
    build_reports,
    career_length,
    clean,
    cross_section,
    open_text,
    parse_corpus,
    parse_totals,
    read_reports,
    sanity_check,
    with_declared_totals,
    write_corpus,
    write_reports,
    write_totals,
)

from conftest import VEC_ONE, VEC_TWO, make_profile

CSV_TEXT = """\
author_id,author_name,paper_id,downloads,posted_date,is_other
a02,Briar B.,a02-P001,21609,2004-11-02,false
a01,Alder A.,a01-P002,150,2001-06-15,false
a01,Alder A.,a01-P001,300,1994-05-09,false
a01,Alder A.,a01-P004,60,2010-01-20,true
a01,Alder A.,a01-P003,,2008-03-05,false
a01,Alder A.,a01-P005,0,2012-09-30,false
"""

JSON_TEXT = """\
[
  {"author_id": "a02", "name": "Briar B.", "declared_total": null,
   "papers": [{"paper_id": "a02-P001", "downloads": 21609,
               "posted_date": "2004-11-02", "is_other": false}]},
  {"author_id": "a01", "name": "Alder A.", "declared_total": 450,
   "papers": [
     {"paper_id": "a01-P002", "downloads": 150, "posted_date": "2001-06-15"},
     {"paper_id": "a01-P001", "downloads": 300, "posted_date": "1994-05-09"},
     {"paper_id": "a01-P003", "downloads": null, "posted_date": "2008-03-05"}
   ]},
  {"author_id": "a03", "name": "Cole C.", "papers": []}
]
"""


def parse_text(text, **kwargs):
    return parse_corpus(io.StringIO(text), **kwargs)


class TestParseCorpusCsv:
    def test_groups_and_sorts(self):
        profiles = parse_text(CSV_TEXT)
        assert [p.author_id for p in profiles] == ["a01", "a02"]
        a01 = profiles[0]
        assert a01.name == "Alder A."
        assert [p.paper_id for p in a01.papers] == [f"a01-P00{i}" for i in range(1, 6)]
        assert a01.declared_total is None

    def test_field_values(self):
        a01 = parse_text(CSV_TEXT)[0]
        by_id = {p.paper_id: p for p in a01.papers}
        assert by_id["a01-P001"].downloads == 300
        assert by_id["a01-P001"].posted_date == date(1994, 5, 9)
        assert by_id["a01-P003"].downloads is None  # absent, not zero
        assert by_id["a01-P004"].is_other is True
        assert by_id["a01-P005"].downloads == 0

    def test_header_only_gives_empty_corpus(self):
        header = CSV_TEXT.splitlines()[0] + "\n"
        assert parse_text(header) == []

    def test_empty_input(self):
        with pytest.raises(CorpusFormatError, match="header row required"):
            parse_text("")

    def test_missing_column(self):
        text = "author_id,author_name,paper_id,downloads,posted_date\na,A,p,1,\n"
        with pytest.raises(CorpusFormatError, match="is_other"):
            parse_text(text)

    def test_unknown_column_warns_but_parses(self):
        text = (
            "author_id,author_name,paper_id,downloads,posted_date,is_other,extra\n"
            "a,A,p,5,,false,junk\n"
        )
        with pytest.warns(UserWarning, match="extra"):
            profiles = parse_text(text)
        assert profiles[0].papers[0].downloads == 5

    def test_duplicate_paper_reports_line(self):
        text = (
            "author_id,author_name,paper_id,downloads,posted_date,is_other\n"
            "a,A,p1,5,,false\n"
            "a,A,p1,6,,false\n"
        )
        with pytest.raises(CorpusFormatError, match="line 3"):
            parse_text(text)

    @pytest.mark.parametrize(
        "row,fragment",
        [
            ("a,A,p,x,,false", "downloads must be an integer"),
            ("a,A,p,-3,,false", "downloads must be >= 0"),
            ("a,A,p,5,2010-13-01,false", "posted_date"),
            ("a,A,p,5,,maybe", "is_other"),
            ("a,A,p,5,", "expected 6 fields"),
            (",A,p,5,,false", "author_id must be non-empty"),
            ("a,A,,5,,false", "paper_id must be non-empty"),
        ],
    )
    def test_bad_rows(self, row, fragment):
        text = "author_id,author_name,paper_id,downloads,posted_date,is_other\n" + row + "\n"
        with pytest.raises(CorpusFormatError, match=fragment):
            parse_text(text)

    def test_row_order_is_irrelevant(self):
        lines = CSV_TEXT.splitlines()
        header, rows = lines[0], lines[1:]
        random.Random(4).shuffle(rows)
        shuffled = "\n".join([header] + rows) + "\n"
        assert parse_text(shuffled) == parse_text(CSV_TEXT)


class TestParseCorpusJson:
    def test_parses_and_sorts(self):
        profiles = parse_text(JSON_TEXT, format="json")
        assert [p.author_id for p in profiles] == ["a01", "a02", "a03"]
        a01 = profiles[0]
        assert a01.declared_total == 450
        assert [p.paper_id for p in a01.papers] == ["a01-P001", "a01-P002", "a01-P003"]
        assert a01.papers[2].downloads is None
        assert profiles[2].papers == ()

    def test_invalid_json(self):
        with pytest.raises(CorpusFormatError, match="invalid JSON"):
            parse_text("{", format="json")

    def test_top_level_must_be_array(self):
        with pytest.raises(CorpusFormatError, match="top level"):
            parse_text("{}", format="json")

    def test_error_paths_name_the_author(self):
        with pytest.raises(CorpusFormatError, match=r"author\[1\]"):
            parse_text('[{"author_id": "a", "papers": []}, 5]', format="json")

    def test_error_paths_name_the_paper(self):
        text = '[{"author_id": "a", "papers": [{"paper_id": "p", "downloads": 1}, {"downloads": 2}]}]'
        with pytest.raises(CorpusFormatError, match=r"author\[0\]\.papers\[1\]"):
            parse_text(text, format="json")

    def test_duplicate_author(self):
        text = '[{"author_id": "a", "papers": []}, {"author_id": "a", "papers": []}]'
        with pytest.raises(CorpusFormatError, match="duplicate author_id"):
            parse_text(text, format="json")

    def test_boolean_totals_and_downloads_rejected(self):
        with pytest.raises(CorpusFormatError, match="declared_total"):
            parse_text('[{"author_id": "a", "papers": [], "declared_total": true}]', format="json")
        with pytest.raises(CorpusFormatError, match="downloads"):
            parse_text('[{"author_id": "a", "papers": [{"paper_id": "p", "downloads": true}]}]', format="json")


class TestSourceHandling:
    def test_unknown_format_checked_before_open(self):
        with pytest.raises(ValueError, match="unknown corpus format"):
            parse_corpus("/nonexistent/path.xml", format="xml")

    def test_path_and_stream_agree(self, tmp_path):
        path = tmp_path / "corpus.csv"
        path.write_text(CSV_TEXT, encoding="utf-8")
        assert parse_corpus(path) == parse_text(CSV_TEXT)
        assert parse_corpus(str(path)) == parse_text(CSV_TEXT)

    def test_byte_stream_left_open(self):
        stream = io.BytesIO(CSV_TEXT.encode("utf-8"))
        profiles = parse_corpus(stream)
        assert [p.author_id for p in profiles] == ["a01", "a02"]
        assert not stream.closed
        stream.seek(0)  # still usable

    def test_text_stream_left_open(self):
        stream = io.StringIO(CSV_TEXT)
        parse_corpus(stream)
        assert not stream.closed

    def test_unusable_source(self):
        with pytest.raises(TypeError):
            with open_text(42):
                pass


class TestClean:
    def test_drops_flagged_and_absent_keeps_zero(self):
        a01 = parse_text(CSV_TEXT)[0]
        result = clean(a01)
        assert result.vector == DownloadVector([300, 150, 0])
        assert result.n_tot == 3
        assert result.n_pos == 2

    def test_empty_profile(self):
        result = clean(AuthorProfile("z", "Z", ()))
        assert result.vector.counts == ()
        assert result.n_tot == 0 and result.n_pos == 0


class TestSanityCheck:
    def test_passes_on_matching_total(self):
        profile = make_profile("a", [10, 5], declared=15)
        result = sanity_check(profile)
        assert result.status is SanityStatus.PASSED
        assert result.delta == 0

    def test_fails_with_signed_delta(self):
        profile = make_profile("a", [10, 5], declared=20)
        result = sanity_check(profile)
        assert result.status is SanityStatus.FAILED
        assert result.delta == -5

    def test_skipped_without_declared_total(self):
        result = sanity_check(make_profile("a", [10, 5]))
        assert result.status is SanityStatus.SKIPPED
        assert result.delta is None

    def test_flagged_papers_do_not_count_toward_sum(self):
        papers = (
            PaperEntry("p1", 10),
            PaperEntry("p2", 99, is_other=True),
        )
        profile = AuthorProfile("a", "A", papers, declared_total=10)
        assert sanity_check(profile).status is SanityStatus.PASSED


class TestCareerLength:
    def test_long_career(self):
        a01 = parse_text(CSV_TEXT)[0]
        years = career_length(a01, date(2015, 8, 17))
        assert years == pytest.approx(21.272222222222222, rel=1e-12)

    def test_month_end_clamp(self):
        profile = AuthorProfile("a", "A", (PaperEntry("p", 1, date(2015, 1, 31)),))
        years = career_length(profile, date(2015, 3, 1))
        # one whole month (clamped to Feb 28) plus one leftover day
        assert years == pytest.approx((1 + 1 / 30) / 12, rel=1e-12)
        assert years == pytest.approx(0.08611111111111112, rel=1e-12)

    def test_same_day_is_zero(self):
        profile = AuthorProfile("a", "A", (PaperEntry("p", 1, date(2010, 6, 1)),))
        assert career_length(profile, date(2010, 6, 1)) == 0.0

    def test_none_without_dates(self):
        assert career_length(make_profile("a", [5, 3]), date(2020, 1, 1)) is None

    def test_future_posting_rejected(self):
        profile = AuthorProfile("a", "A", (PaperEntry("p", 1, date(2021, 1, 1)),))
        with pytest.raises(ValueError):
            career_length(profile, date(2020, 1, 1))

    def test_flagged_paper_dates_participate(self):
        papers = (
            PaperEntry("p1", 10, date(2010, 1, 1)),
            PaperEntry("p2", 5, date(2000, 1, 1), is_other=True),
        )
        profile = AuthorProfile("a", "A", papers)
        assert career_length(profile, date(2020, 1, 1)) == pytest.approx(20.0)


class TestBuildReport:
    def test_outlier_author(self):
        report = build_report(make_profile("a01", VEC_ONE))
        assert report.author_id == "a01"
        assert report.d_tot == 94086
        assert report.n_tot == report.n_pos == 9
        assert report.k == 8 and report.h == 9 and report.g == 9
        assert report.kappa == 9
        assert report.k_star == pytest.approx(8.376262483335151, abs=1e-9)
        assert report.w == pytest.approx(94086 / 42208, rel=1e-12)
        assert report.omega == 1.0
        assert report.u == pytest.approx(8 / 9)
        assert report.composite == pytest.approx(8.77991622216735, rel=1e-9)
        assert report.T is None

    def test_career_included_with_as_of(self):
        a01 = parse_text(CSV_TEXT)[0]
        report = build_report(a01, as_of=date(2015, 8, 17))
        assert report.T == pytest.approx(21.272222222222222, rel=1e-12)

    def test_empty_profile(self):
        report = build_report(AuthorProfile("z9", "Z", ()))
        assert report.d_tot == 0 and report.n_tot == 0 and report.n_pos == 0
        assert report.k == 0 and report.kappa == 0 and report.h == 0 and report.g == 0
        assert report.k_star == 0.0 and report.d_star == 1.0
        assert report.kappa_star == 0.0 and report.f_star == 1.0
        assert report.w is None and report.omega is None
        assert report.u is None and report.mu is None and report.v is None
        assert report.composite == 0.0

    def test_declared_total_matches_d_tot_when_sane(self):
        profile = make_profile("a", [40, 25, 10], declared=75)
        assert sanity_check(profile).status is SanityStatus.PASSED
        assert build_report(profile).d_tot == profile.declared_total


class TestBuildReports:
    def test_sorted_by_author_id(self):
        profiles = [make_profile("b", [10]), make_profile("a", [20]), make_profile("c", [5])]
        reports = build_reports(profiles)
        assert [r.author_id for r in reports] == ["a", "b", "c"]

    def test_block_index_dominates_threshold_index(self):
        rng = random.Random(55)
        profiles = [
            make_profile(f"x{i:03d}", [rng.randint(1, 10**5) for _ in range(rng.randint(1, 20))])
            for i in range(40)
        ]
        reports = build_reports(profiles)
        assert all(r.kappa >= r.k for r in reports)
        assert sum(r.k for r in reports) <= sum(r.kappa for r in reports)


CROSS_SECTION_KEYS = (
    "d_tot",
    "ln_d_tot",
    "n_tot",
    "ln_n_tot",
    "d_per_paper",
    "ln_d_per_paper",
    "k_star",
    "u",
    "w",
    "ln_w",
    "v",
    "kappa_star",
    "mu",
    "omega",
    "ln_omega",
)


class TestCrossSection:
    def test_rows_and_order(self):
        reports = build_reports([make_profile("a", VEC_ONE), make_profile("b", VEC_TWO)])
        rows = cross_section(reports)
        assert tuple(rows.keys()) == CROSS_SECTION_KEYS
        assert rows["d_tot"].min == 82844.0 and rows["d_tot"].max == 94086.0
        assert rows["ln_w"].min == pytest.approx(math.log(94086 / 42208), rel=1e-9)

    def test_single_report_collapses(self):
        rows = cross_section(build_reports([make_profile("a", VEC_ONE)]))
        for row in rows.values():
            assert row is not None
            assert row.min == row.max == row.mean

    def test_undefined_rows_are_none(self):
        # single-download authors never clear level 1, so the
        # concentration diagnostics have no defined values
        reports = build_reports([make_profile("a", [1]), make_profile("b", [1])])
        rows = cross_section(reports)
        for name in ("u", "w", "ln_w", "mu", "omega", "ln_omega"):
            assert rows[name] is None
        assert rows["k_star"] is not None
        assert rows["d_tot"].mean == 1.0

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            cross_section([])


@pytest.fixture
def two_reports():
    return build_reports([make_profile("a01", VEC_ONE), make_profile("a02", VEC_TWO)])


class TestReportFiles:
    def test_csv_cells(self, two_reports):
        buf = io.StringIO()
        write_reports(two_reports, buf)
        lines = buf.getvalue().splitlines()
        assert lines[0] == ",".join(REPORT_COLUMNS)
        cells = lines[1].split(",")
        assert cells[REPORT_COLUMNS.index("author_id")] == "a01"
        assert cells[REPORT_COLUMNS.index("d_tot")] == "94086"
        assert cells[REPORT_COLUMNS.index("k_star")] == "8.37626"
        assert cells[REPORT_COLUMNS.index("w")] == "2.2291"
        assert cells[REPORT_COLUMNS.index("u")] == "0.888889"
        assert cells[REPORT_COLUMNS.index("T")] == ""

    def test_csv_write_read_write_is_stable(self, two_reports):
        first = io.StringIO()
        write_reports(two_reports, first)
        back = read_reports(io.StringIO(first.getvalue()))
        assert [r.author_id for r in back] == ["a01", "a02"]
        assert back[0].T is None
        second = io.StringIO()
        write_reports(back, second)
        assert second.getvalue() == first.getvalue()

    def test_json_round_trip_is_exact(self, two_reports):
        buf = io.StringIO()
        write_reports(two_reports, buf, format="json")
        assert read_reports(io.StringIO(buf.getvalue()), format="json") == two_reports

    def test_unknown_format(self, two_reports):
        with pytest.raises(ValueError, match="unknown report format"):
            write_reports(two_reports, io.StringIO(), format="tsv")
        with pytest.raises(ValueError, match="unknown report format"):
            read_reports(io.StringIO(""), format="tsv")

    def test_read_errors(self, two_reports):
        buf = io.StringIO()
        write_reports(two_reports, buf)
        header, row1, row2 = buf.getvalue().splitlines()

        with pytest.raises(CorpusFormatError, match="header"):
            read_reports(io.StringIO("author_id,oops\n"))
        with pytest.raises(CorpusFormatError, match="header row required"):
            read_reports(io.StringIO(""))

        cells = row1.split(",")
        cells[REPORT_COLUMNS.index("k")] = "x"
        bad_int = "\n".join([header, ",".join(cells)]) + "\n"
        with pytest.raises(CorpusFormatError, match="must be an integer"):
            read_reports(io.StringIO(bad_int))

        cells = row1.split(",")
        cells[REPORT_COLUMNS.index("k_star")] = ""
        bad_empty = "\n".join([header, ",".join(cells)]) + "\n"
        with pytest.raises(CorpusFormatError, match="must not be empty"):
            read_reports(io.StringIO(bad_empty))

        short = "\n".join([header, row1 + ",9"]) + "\n"
        with pytest.raises(CorpusFormatError, match="expected 19 fields"):
            read_reports(io.StringIO(short))


class TestCorpusFiles:
    def test_csv_round_trip(self):
        profiles = parse_text(CSV_TEXT)
        buf = io.StringIO()
        write_corpus(profiles, buf)
        assert parse_text(buf.getvalue()) == profiles

    def test_json_round_trip_keeps_totals_and_empty_authors(self):
        profiles = parse_text(JSON_TEXT, format="json")
        buf = io.StringIO()
        write_corpus(profiles, buf, format="json")
        assert parse_text(buf.getvalue(), format="json") == profiles

    def test_csv_drops_totals_and_empty_authors(self):
        profiles = parse_text(JSON_TEXT, format="json")
        buf = io.StringIO()
        write_corpus(profiles, buf)
        back = parse_text(buf.getvalue())
        assert [p.author_id for p in back] == ["a01", "a02"]  # a03 has no rows
        assert all(p.declared_total is None for p in back)
        stripped = [
            dataclasses.replace(p, declared_total=None)
            for p in profiles
            if p.papers
        ]
        assert back == stripped

    def test_unknown_format(self):
        with pytest.raises(ValueError, match="unknown corpus format"):
            write_corpus([], io.StringIO(), format="tsv")


class TestTotalsFiles:
    def test_round_trip(self):
        profiles = [
            make_profile("a01", [10, 5], declared=15),
            make_profile("a02", [7]),
            make_profile("a03", [1, 1], declared=3),
        ]
        buf = io.StringIO()
        write_totals(profiles, buf)
        totals = parse_totals(io.StringIO(buf.getvalue()))
        assert totals == {"a01": 15, "a03": 3}
        reattached = with_declared_totals(
            [dataclasses.replace(p, declared_total=None) for p in profiles], totals
        )
        assert [p.declared_total for p in reattached] == [15, None, 3]

    @pytest.mark.parametrize(
        "text,fragment",
        [
            ("", "header row required"),
            ("author,total\n", "totals header"),
            ("author_id,declared_total\na,1,2\n", "expected 2 fields"),
            ("author_id,declared_total\n,5\n", "author_id must be non-empty"),
            ("author_id,declared_total\na,1\na,2\n", "duplicate author_id"),
            ("author_id,declared_total\na,x\n", "must be an integer"),
            ("author_id,declared_total\na,-1\n", "must be >= 0"),
        ],
    )
    def test_errors(self, text, fragment):
        with pytest.raises(CorpusFormatError, match=fragment):
            parse_totals(io.StringIO(text))


def test_with_declared_totals_leaves_unlisted_authors_alone():
    profiles = [make_profile("a", [5]), make_profile("b", [6])]
    updated = with_declared_totals(profiles, {"b": 6})
    assert updated[0].declared_total is None
    assert updated[1].declared_total == 6
    # originals untouched
    assert profiles[1].declared_total is None
