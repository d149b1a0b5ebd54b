"""Serialization of analysis results.

CSV exports are strict RFC-4180 (UTF-8, LF, minimal quoting) and byte
deterministic: repeating an export yields an identical file.  Session
state is saved to a versioned ``CRE`` container: the magic bytes
``CRE1``, a zlib-compressed JSON payload, and a trailing CRC-32 so a
truncated or corrupted file is rejected instead of half-loaded.
"""
from __future__ import annotations

import csv
import io
import json
import zlib
from pathlib import Path

from .indicators import indicator_rows
from .model import (
    CitedReference,
    Dataset,
    EmptyDatasetError,
    YearFilter,
    compute_stats,
)
from .spectroscopy import spectrogram
from .wos import CitingRecord, parse_cited_reference

CRE_MAGIC = b"CRE1"
CRE_FORMAT_VERSION = 1

CSV_CR_HEADER = ["CR", "RPY", "N_CR", "PERC_YR", "N_PYEARS", "N_TOP10", "N_TOP1", "N_TOP0_1"]
CSV_GRAPH_HEADER = ["RPY", "N_CR", "MEDIAN_DEVIATION", "PEAK"]


class CreFormatError(ValueError):
    """The file is not a loadable CRE container."""


def _real(value: float) -> str:
    return f"{value:.6f}"


def csv_cr_bytes(dataset: Dataset) -> bytes:
    """The per-reference indicator table as UTF-8 CSV bytes.

    One row per reference, most cited first (ties by raw string); reals
    carry six decimal places.
    """
    if dataset.is_empty:
        raise EmptyDatasetError("nothing to export: dataset is empty")
    rows = indicator_rows(dataset)
    ordered = sorted(dataset.references, key=lambda r: (-r.n_cr, r.raw))
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_CR_HEADER)
    for ref in ordered:
        row = rows[ref.cr_id]
        writer.writerow(
            [
                ref.raw,
                ref.rpy if ref.rpy is not None else "",
                row.n_cr,
                _real(row.perc_yr) if row.perc_yr is not None else "",
                row.n_pyears,
                row.n_top10,
                row.n_top1,
                row.n_top0_1,
            ]
        )
    return buf.getvalue().encode("utf-8")


def csv_graph_bytes(dataset: Dataset) -> bytes:
    """The spectrogram series as UTF-8 CSV bytes: one row per year of
    the filled span, with median deviation and peak flag."""
    if dataset.is_empty:
        raise EmptyDatasetError("nothing to export: dataset is empty")
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_GRAPH_HEADER)
    for row in spectrogram(dataset):
        writer.writerow([row.rpy, row.ncr, _real(row.median_dev), int(row.is_peak)])
    return buf.getvalue().encode("utf-8")


def export_csv_cr(dataset: Dataset, path: str | Path) -> None:
    """Write the indicator table; raises on an empty dataset before
    touching the file."""
    data = csv_cr_bytes(dataset)
    Path(path).write_bytes(data)


def export_csv_graph(dataset: Dataset, path: str | Path) -> None:
    data = csv_graph_bytes(dataset)
    Path(path).write_bytes(data)


def _dataset_payload(dataset: Dataset) -> dict:
    indicators = {}
    if not dataset.is_empty:
        indicators = {
            str(cr_id): {
                "n_cr": row.n_cr,
                "perc_yr": row.perc_yr,
                "n_pyears": row.n_pyears,
                "n_top10": row.n_top10,
                "n_top1": row.n_top1,
                "n_top0_1": row.n_top0_1,
            }
            for cr_id, row in indicator_rows(dataset).items()
        }
    return {
        "format_version": CRE_FORMAT_VERSION,
        "stats": compute_stats(dataset).as_dict() if not dataset.is_empty else None,
        "rpy_filter": list(dataset.rpy_filter),
        "py_filter": list(dataset.py_filter),
        "max_cr": dataset.max_cr,
        "citing_records": [
            {"record_id": r.record_id, "py": r.py, "raw_cr_lines": r.raw_cr_lines}
            for r in dataset.citing_records
        ],
        "references": [
            {
                "cr_id": r.cr_id,
                "raw": r.raw,
                "counts_by_citing_year": {str(y): c for y, c in sorted(r.counts_by_citing_year.items())},
                "cluster_id": r.cluster_id,
            }
            for r in dataset.references
        ],
        "indicators": indicators,
        "op_log": list(dataset.op_log),
    }


def cre_bytes(dataset: Dataset) -> bytes:
    """The full session state as CRE container bytes."""
    payload = json.dumps(_dataset_payload(dataset), sort_keys=True, separators=(",", ":"))
    compressed = zlib.compress(payload.encode("utf-8"), level=9)
    checksum = zlib.crc32(compressed).to_bytes(4, "big")
    return CRE_MAGIC + compressed + checksum


def save_cre(dataset: Dataset, path: str | Path) -> None:
    """Save the full session state to a CRE container file."""
    Path(path).write_bytes(cre_bytes(dataset))


def load_cre(path: str | Path) -> Dataset:
    """Load a CRE container back into a dataset.

    Raises :class:`CreFormatError` on bad magic, checksum mismatch or an
    unsupported format version; a corrupted file never yields a partial
    session.
    """
    blob = Path(path).read_bytes()
    if len(blob) < len(CRE_MAGIC) + 4 or not blob.startswith(CRE_MAGIC):
        raise CreFormatError("not a CRE file (bad magic)")
    compressed, checksum = blob[len(CRE_MAGIC):-4], blob[-4:]
    if zlib.crc32(compressed).to_bytes(4, "big") != checksum:
        raise CreFormatError("checksum failure: file is corrupted or truncated")
    try:
        payload = json.loads(zlib.decompress(compressed).decode("utf-8"))
    except (zlib.error, ValueError) as exc:
        raise CreFormatError(f"unreadable CRE payload: {exc}") from exc
    version = payload.get("format_version")
    if version != CRE_FORMAT_VERSION:
        raise CreFormatError(f"unsupported version {version!r}")

    records = [
        CitingRecord(
            record_id=r["record_id"],
            py=r["py"],
            raw_cr_lines=list(r["raw_cr_lines"]),
        )
        for r in payload["citing_records"]
    ]
    references = [
        CitedReference(
            cr_id=r["cr_id"],
            parsed=parse_cited_reference(r["raw"]),
            counts_by_citing_year={int(y): c for y, c in r["counts_by_citing_year"].items()},
            cluster_id=r["cluster_id"],
        )
        for r in payload["references"]
    ]
    return Dataset(
        citing_records=records,
        references=references,
        rpy_filter=YearFilter(*payload["rpy_filter"]),
        py_filter=YearFilter(*payload["py_filter"]),
        max_cr=payload["max_cr"],
        op_log=list(payload["op_log"]),
    )


def export_ui_bundle(dataset: Dataset) -> dict:
    """The explorer document: spectrogram rows, peak years, per-year
    top-5 references with their indicators, and dataset stats."""
    if dataset.is_empty:
        raise EmptyDatasetError("nothing to bundle: dataset is empty")
    rows = indicator_rows(dataset)
    spect = spectrogram(dataset)

    by_rpy: dict[int, list] = {}
    for ref in dataset.references:
        if ref.rpy is not None:
            by_rpy.setdefault(ref.rpy, []).append(ref)

    references_by_rpy = []
    for rpy in sorted(by_rpy):
        members = sorted(by_rpy[rpy], key=lambda r: (-r.n_cr, r.raw))[:5]
        references_by_rpy.append(
            {
                "rpy": rpy,
                "references": [
                    {
                        "cr_id": r.cr_id,
                        "raw": r.raw,
                        "n_cr": rows[r.cr_id].n_cr,
                        "perc_yr": rows[r.cr_id].perc_yr,
                        "n_top10": rows[r.cr_id].n_top10,
                        "n_pyears": rows[r.cr_id].n_pyears,
                    }
                    for r in members
                ],
            }
        )

    return {
        "stats": compute_stats(dataset).as_dict(),
        "spectrogram": [
            {
                "rpy": row.rpy,
                "ncr": row.ncr,
                "median_dev": row.median_dev,
                "is_peak": row.is_peak,
            }
            for row in spect
        ],
        "peak_years": [row.rpy for row in spect if row.is_peak],
        "references_by_rpy": references_by_rpy,
    }
