import json
from pathlib import Path

import pytest

from rpys import (
    CitedReference,
    CitingRecord,
    Dataset,
    YearFilter,
    build_dataset,
    parse_cited_reference,
    parse_wos_file,
)

FIXTURES = Path(__file__).parent / "fixtures"
SCRIPTS = FIXTURES / "scripts"
PART_FILES = ["corpus_part1.txt", "corpus_part2.txt", "corpus_part3.txt"]


@pytest.fixture(scope="session")
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture(scope="session")
def manifest() -> dict:
    return json.loads((FIXTURES / "manifest.json").read_text("utf-8"))


@pytest.fixture(scope="session")
def corpus_records():
    records = []
    for name in PART_FILES:
        result = parse_wos_file((FIXTURES / name).read_bytes(), source_name=name)
        assert not result.diagnostics
        records.extend(result.records)
    return records


@pytest.fixture()
def corpus_dataset(corpus_records) -> Dataset:
    return build_dataset(
        corpus_records,
        rpy_filter=YearFilter(1000, 2021, True),
        py_filter=YearFilter(1900, 2021, True),
    )


def dataset_from_counts(counts_by_raw: dict[str, dict[int, int]]) -> Dataset:
    """Build a dataset directly from {raw: {citing_year: count}}."""
    references = []
    years = set()
    for cr_id, (raw, counts) in enumerate(counts_by_raw.items()):
        references.append(
            CitedReference(
                cr_id=cr_id,
                parsed=parse_cited_reference(raw),
                counts_by_citing_year=dict(counts),
            )
        )
        years.update(counts)
    citing_records = [
        CitingRecord(record_id=f"synthetic#{y}", py=y) for y in sorted(years)
    ]
    return Dataset(
        citing_records=citing_records,
        references=references,
        rpy_filter=YearFilter(1000, 2100, True),
        py_filter=YearFilter(1000, 2100, True),
    )
