"""Web of Science plain-text export parsing.

The WoS "Plain Text" export is a tagged flat file: a two-character field
tag at column 0, continuation lines indented by two or more spaces,
records delimited by ``PT`` ... ``ER``, the whole file terminated by
``EF``.  The ``CR`` field carries one cited reference per line; ``PY`` is
the publication year of the citing record.

Cited-reference strings themselves are comma-separated, e.g.::

    Hirsch JE, 2005, P NATL ACAD SCI USA, V102, P16569, DOI 10.1073/pnas.0507655102

``parse_cited_reference`` pulls the author, year, source, volume, page
and DOI segments out of that shape without ever failing: any string at
all yields a ``RawCitedReference`` with the raw text preserved verbatim.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field

YEAR_MIN = 1000
YEAR_MAX = 2100

_BOM = "﻿"
_YEAR_RE = re.compile(r"^\d{4}$")
_VOLUME_RE = re.compile(r"^V[0-9A-Za-z]+$")
_PAGE_RE = re.compile(r"^P[0-9A-Za-z]+$")
_DOI_ANNOTATION_RE = re.compile(r"^\([^)]*\)\s*")


class WosFormatError(ValueError):
    """The input cannot be read as a WoS plain-text export at all."""


@dataclass
class CitingRecord:
    """One publication from a database export.

    Attributes
    ----------
    record_id : str
        Accession id (``UT`` field) when present, else file name plus
        record ordinal.
    py : int or None
        Publication year of the citing record, if it parsed as a
        4-digit year.
    raw_cr_lines : list of str
        The record's cited-reference strings, stripped, in file order.
    """

    record_id: str
    py: int | None = None
    raw_cr_lines: list[str] = field(default_factory=list)


@dataclass
class RawCitedReference:
    """A cited-reference string split into its comma-separated segments.

    ``raw`` always equals the input line exactly; every other field may
    be absent when the corresponding segment is missing or unparseable.
    """

    raw: str
    first_author: str | None = None
    rpy: int | None = None
    source: str | None = None
    volume: str | None = None
    page: str | None = None
    dois: list[str] = field(default_factory=list)


@dataclass
class WosParseResult:
    records: list[CitingRecord]
    diagnostics: list[str] = field(default_factory=list)

    @property
    def total_cr_lines(self) -> int:
        return sum(len(r.raw_cr_lines) for r in self.records)


def _parse_year(text: str) -> int | None:
    text = text.strip()
    if _YEAR_RE.match(text) and YEAR_MIN <= int(text) <= YEAR_MAX:
        return int(text)
    return None


def parse_wos_file(data: bytes, source_name: str = "") -> WosParseResult:
    """Parse one WoS plain-text export into citing records.

    Parameters
    ----------
    data : bytes
        File contents; must decode as UTF-8 (a leading BOM is stripped).
    source_name : str, optional
        Used to build fallback record ids when a record has no ``UT``
        accession field.

    Returns
    -------
    WosParseResult
        Parsed records plus a list of non-fatal diagnostics (malformed
        records, unparseable years).  Records lacking a ``CR`` field get
        an empty ``raw_cr_lines``.

    Raises
    ------
    WosFormatError
        If the bytes do not decode as UTF-8; the message names the
        offending byte offset.
    """
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise WosFormatError(
            f"not valid UTF-8: undecodable byte at offset {exc.start}"
        ) from exc
    if text.startswith(_BOM):
        text = text[len(_BOM):]

    records: list[CitingRecord] = []
    diagnostics: list[str] = []
    prefix = source_name or "record"

    current: CitingRecord | None = None
    current_tag = ""
    ordinal = 0

    for line_no, line in enumerate(text.split("\n"), start=1):
        line = line.rstrip("\r")
        if not line.strip():
            continue
        indented = line.startswith("  ")
        if indented:
            tag, value = "", line.strip()
        else:
            tag, value = line[:2], line[3:]
            current_tag = tag

        if tag == "EF":
            break
        if tag in ("FN", "VR"):
            continue
        if tag == "PT":
            if current is not None:
                diagnostics.append(
                    f"line {line_no}: PT before previous record ended; starting new record"
                )
                records.append(current)
            ordinal += 1
            current = CitingRecord(record_id=f"{prefix}#{ordinal}")
            continue
        if tag == "ER":
            if current is None:
                diagnostics.append(f"line {line_no}: ER without matching PT")
            else:
                records.append(current)
                current = None
            continue
        if current is None:
            # field lines outside any record are ignorable header junk
            continue

        if indented:
            if current_tag == "CR":
                cr = line.strip()
                if cr:
                    current.raw_cr_lines.append(cr)
            continue

        if tag == "CR":
            cr = value.strip()
            if cr:
                current.raw_cr_lines.append(cr)
        elif tag == "PY":
            year = _parse_year(value)
            if year is None:
                diagnostics.append(
                    f"line {line_no}: unparseable PY {value.strip()!r} in {current.record_id}"
                )
            current.py = year
        elif tag == "UT":
            ut = value.strip()
            if ut:
                current.record_id = ut

    if current is not None:
        diagnostics.append(f"record {current.record_id}: unterminated (no ER before EOF)")
        records.append(current)

    return WosParseResult(records=records, diagnostics=diagnostics)


def _split_doi_segments(segments: list[str], start: int) -> tuple[list[str], int]:
    """Collect DOI values from ``segments[start:]``.

    ``segments[start]`` begins with ``"DOI "``.  A bracketed list
    (``DOI [a, b]``) was split apart by the comma split, so consume
    following segments until the closing bracket.  Returns the cleaned
    DOI values and the index one past the last consumed segment.
    """
    head = segments[start][4:].strip()
    if not head.startswith("["):
        return [head], start + 1

    parts = [head[1:]]
    end = start + 1
    if "]" not in head:
        while end < len(segments):
            seg = segments[end]
            end += 1
            if "]" in seg:
                parts.append(seg[: seg.index("]")])
                break
            parts.append(seg)
    else:
        parts = [head[1 : head.index("]")]]
    return parts, end


def _clean_doi(value: str) -> str | None:
    value = value.strip()
    if "]" in value:
        value = value[: value.index("]")]
    value = _DOI_ANNOTATION_RE.sub("", value).strip()
    value = value.lower()
    return value if "/" in value else None


def parse_cited_reference(raw: str) -> RawCitedReference:
    """Split one cited-reference string into structured parts.

    Segments are the ``", "``-separated pieces of ``raw``.  The first
    segment that is a plausible 4-digit year becomes ``rpy``; whatever
    precedes it is the author, segments between the year and the first
    V/P/DOI marker are the source.  ``V...`` / ``P...`` markers are
    case-sensitive.  Never raises: an unrecognizable string simply comes
    back with only ``raw`` set.
    """
    ref = RawCitedReference(raw=raw)
    segments = raw.split(", ")

    year_idx: int | None = None
    for i, seg in enumerate(segments):
        year = _parse_year(seg)
        if year is not None:
            year_idx = i
            ref.rpy = year
            break

    if year_idx is not None and year_idx > 0:
        ref.first_author = ", ".join(segments[:year_idx])

    scan_from = year_idx + 1 if year_idx is not None else 0
    source_parts: list[str] = []
    marker_seen = False
    i = scan_from
    while i < len(segments):
        seg = segments[i]
        if seg.startswith("DOI "):
            values, i = _split_doi_segments(segments, i)
            for v in values:
                doi = _clean_doi(v)
                if doi:
                    ref.dois.append(doi)
            marker_seen = True
            continue
        if _VOLUME_RE.match(seg):
            if ref.volume is None:
                ref.volume = seg[1:]
            marker_seen = True
        elif _PAGE_RE.match(seg):
            if ref.page is None:
                ref.page = seg[1:]
            marker_seen = True
        elif not marker_seen and year_idx is not None:
            source_parts.append(seg)
        i += 1

    if source_parts:
        ref.source = ", ".join(source_parts)
    return ref
