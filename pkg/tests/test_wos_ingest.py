import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rpys import WosFormatError, parse_cited_reference, parse_wos_file

TWO_RECORD_FILE = b"""FN Clarivate Analytics Web of Science
VR 1.0
PT J
AU ALONSO, S
TI h-index review
PY 2011
CR Hirsch JE, 2005, P NATL ACAD SCI USA, V102, P16569, DOI 10.1073/pnas.0507655102
   Egghe L, 2006, SCIENTOMETRICS, V69, P131
UT WOS:000000000000001
ER

PT J
AU OTHER, A
PY 2012
CR Priem J, 2010, Altmetrics Manifesto
ER
EF
"""


class TestParseWosFile:
    def test_two_record_file(self):
        result = parse_wos_file(TWO_RECORD_FILE)
        assert len(result.records) == 2
        first = result.records[0]
        assert first.py == 2011
        assert first.raw_cr_lines == [
            "Hirsch JE, 2005, P NATL ACAD SCI USA, V102, P16569, DOI 10.1073/pnas.0507655102",
            "Egghe L, 2006, SCIENTOMETRICS, V69, P131",
        ]
        assert first.record_id == "WOS:000000000000001"
        assert result.records[1].record_id.endswith("#2")
        assert not result.diagnostics

    def test_header_only_file(self):
        result = parse_wos_file(b"FN Clarivate\nVR 1.0\nEF\n")
        assert result.records == []
        assert result.diagnostics == []

    def test_unparseable_py_degrades_to_missing(self):
        data = b"PT J\nPY abcd\nCR X Y, 2000, Z\nER\nEF\n"
        result = parse_wos_file(data)
        assert len(result.records) == 1
        assert result.records[0].py is None
        assert len(result.diagnostics) == 1
        assert "abcd" in result.diagnostics[0]

    def test_er_without_pt_collects_diagnostic(self):
        data = b"ER\nPT J\nPY 2000\nCR A B, 1999, C\nER\nEF\n"
        result = parse_wos_file(data)
        assert len(result.records) == 1
        assert any("ER without matching PT" in d for d in result.diagnostics)

    def test_undecodable_bytes_fatal_with_offset(self):
        with pytest.raises(WosFormatError, match="offset 5"):
            parse_wos_file(b"PT J\n\xff\nER\nEF\n")

    def test_bom_and_crlf_accepted(self):
        data = "﻿PT J\r\nPY 2005\r\nCR A B, 2000, C\r\nER\r\nEF\r\n".encode("utf-8")
        result = parse_wos_file(data)
        assert result.records[0].py == 2005
        assert result.records[0].raw_cr_lines == ["A B, 2000, C"]

    def test_record_without_cr_field(self):
        result = parse_wos_file(b"PT J\nPY 2010\nER\nEF\n")
        assert result.records[0].raw_cr_lines == []

    def test_stops_at_ef(self):
        data = b"PT J\nPY 2010\nER\nEF\nPT J\nPY 2011\nER\n"
        result = parse_wos_file(data)
        assert len(result.records) == 1

    def test_unterminated_record_kept_with_diagnostic(self):
        result = parse_wos_file(b"PT J\nPY 2010\nCR A B, 2000, C\n")
        assert len(result.records) == 1
        assert any("unterminated" in d for d in result.diagnostics)

    def test_continuation_needs_two_spaces(self):
        data = b"PT J\nPY 2010\nCR first, 2000, X\n  second, 2001, Y\nER\nEF\n"
        result = parse_wos_file(data)
        assert result.records[0].raw_cr_lines == ["first, 2000, X", "second, 2001, Y"]

    def test_count_conservation_on_fixture(self, corpus_records, manifest):
        total = sum(len(r.raw_cr_lines) for r in corpus_records)
        assert total == manifest["stats"]["total_nondistinct_crs"]

    def test_no_empty_or_padded_cr_lines(self, corpus_records):
        for record in corpus_records:
            for line in record.raw_cr_lines:
                assert line == line.strip() and line


class TestParseCitedReference:
    def test_full_reference(self):
        ref = parse_cited_reference(
            "Hirsch, J. E., 2005, PNAS USA, V102, P16569, DOI 10.1073/pnas.0507655102"
        )
        assert ref.first_author == "Hirsch, J. E."
        assert ref.rpy == 2005
        assert ref.source == "PNAS USA"
        assert ref.volume == "102"
        assert ref.page == "16569"
        assert ref.dois == ["10.1073/pnas.0507655102"]

    def test_wos_style_author(self):
        ref = parse_cited_reference("Hirsch JE, 2005, P NATL ACAD SCI USA, V102, P16569")
        assert ref.first_author == "Hirsch JE"
        assert ref.source == "P NATL ACAD SCI USA"

    def test_no_markers(self):
        ref = parse_cited_reference("Priem, J., 2010, Altmetrics Manifesto")
        assert ref.first_author == "Priem, J."
        assert ref.rpy == 2010
        assert ref.source == "Altmetrics Manifesto"
        assert ref.volume is None and ref.page is None and ref.dois == []

    def test_bracketed_doi_list(self):
        ref = parse_cited_reference(
            "Newman, M. E. J., 2004, Phys. Rev. E, V69, "
            "DOI [10.1103/PhysRevE.69.026113, 10.1103/PhysRevE.69.066133]"
        )
        assert ref.dois == ["10.1103/physreve.69.026113", "10.1103/physreve.69.066133"]
        assert ref.volume == "69"

    def test_bracketed_doi_list_with_annotations(self):
        ref = parse_cited_reference(
            "Newman, M. E. J., 2004, Phys. Rev. E, V69, "
            "DOI [(I) 10.1103/PhysRevE.69.026113, (II) 10.1103/PhysRevE.69.066133]"
        )
        assert ref.dois == ["10.1103/physreve.69.026113", "10.1103/physreve.69.066133"]

    def test_first_four_digit_segment_wins(self):
        ref = parse_cited_reference("SMITH J, 2001, ANNALS, V1944, P3")
        assert ref.rpy == 2001
        assert ref.volume == "1944"

    def test_year_first_segment_means_no_author(self):
        ref = parse_cited_reference("1984, SOME REPORT")
        assert ref.rpy == 1984
        assert ref.first_author is None
        assert ref.source == "SOME REPORT"

    def test_out_of_range_year_not_a_year(self):
        ref = parse_cited_reference("DOE J, 3000, FUTURE J")
        assert ref.rpy is None

    def test_markers_are_case_sensitive(self):
        ref = parse_cited_reference("DOE J, 2000, J X, v102, p3")
        assert ref.volume is None and ref.page is None

    def test_dois_lowercased_and_slashed(self):
        ref = parse_cited_reference("DOE J, 2000, J X, DOI 10.1001/ABC.DEF")
        assert ref.dois == ["10.1001/abc.def"]
        ref = parse_cited_reference("DOE J, 2000, J X, DOI garbage")
        assert ref.dois == []

    def test_raw_roundtrip(self):
        raw = "  anything,   at all , 12, x  "
        assert parse_cited_reference(raw).raw == raw

    @given(st.text(alphabet=st.characters(codec="utf-8"), min_size=1, max_size=80))
    @settings(max_examples=300, deadline=None)
    def test_totality(self, raw):
        ref = parse_cited_reference(raw)
        assert ref.raw == raw
        if ref.rpy is not None:
            assert 1000 <= ref.rpy <= 2100
        for doi in ref.dois:
            assert doi == doi.lower() and "/" in doi
