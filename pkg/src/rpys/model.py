"""Working dataset: import filters, the reference/count matrix, statistics.

A :class:`Dataset` is treated as a value: every operation returns a new
``Dataset`` and appends a line to its operation log, which makes
snapshot/undo and concurrent readers trivial.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, NamedTuple

from .wos import CitingRecord, RawCitedReference, parse_cited_reference


class EmptyDatasetError(ValueError):
    """An operation needed at least one cited reference and found none."""


class YearFilter(NamedTuple):
    """Inclusive year bounds plus whether missing years pass the filter."""

    lo: int
    hi: int
    include_missing: bool = True

    def admits(self, year: int | None) -> bool:
        if year is None:
            return self.include_missing
        return self.lo <= year <= self.hi


@dataclass
class CitedReference:
    """A distinct cited reference with its per-citing-year counts.

    ``n_cr`` is always the sum of ``counts_by_citing_year`` values.
    """

    cr_id: int
    parsed: RawCitedReference
    counts_by_citing_year: dict[int, int] = field(default_factory=dict)
    cluster_id: int | None = None

    @property
    def n_cr(self) -> int:
        return sum(self.counts_by_citing_year.values())

    @property
    def raw(self) -> str:
        return self.parsed.raw

    @property
    def rpy(self) -> int | None:
        return self.parsed.rpy

    def copy(self) -> "CitedReference":
        return CitedReference(
            cr_id=self.cr_id,
            parsed=self.parsed,
            counts_by_citing_year=dict(self.counts_by_citing_year),
            cluster_id=self.cluster_id,
        )


@dataclass
class Dataset:
    citing_records: list[CitingRecord]
    references: list[CitedReference]
    rpy_filter: YearFilter
    py_filter: YearFilter
    max_cr: int = 0
    op_log: list[str] = field(default_factory=list)

    def copy(self) -> "Dataset":
        return Dataset(
            citing_records=list(self.citing_records),
            references=[r.copy() for r in self.references],
            rpy_filter=self.rpy_filter,
            py_filter=self.py_filter,
            max_cr=self.max_cr,
            op_log=list(self.op_log),
        )

    @property
    def is_empty(self) -> bool:
        return not self.references

    def reference_by_id(self, cr_id: int) -> CitedReference:
        for ref in self.references:
            if ref.cr_id == cr_id:
                return ref
        raise KeyError(f"no reference with id {cr_id}")

    def citing_years(self) -> list[int]:
        """Distinct publication years of the citing records, sorted."""
        return sorted({r.py for r in self.citing_records if r.py is not None})


@dataclass(frozen=True)
class DatasetStats:
    """The summary quantities reported for an analysis run."""

    total_nondistinct_crs: int
    min_rpy: int
    max_rpy: int
    n_citing_pubs: int
    min_citing_year: int
    max_citing_year: int
    n_distinct_crs: int
    n_distinct_rpys: int
    n_distinct_citing_years: int

    def as_dict(self) -> dict[str, int]:
        return dict(self.__dict__)


def normalize_raw(raw: str) -> str:
    """Import-time identity of a reference string: whitespace collapsed,
    case preserved."""
    return " ".join(raw.split())


def build_dataset(
    records: Iterable[CitingRecord],
    rpy_filter: YearFilter = YearFilter(1000, 2100, True),
    py_filter: YearFilter = YearFilter(1000, 2100, True),
    max_cr: int = 0,
) -> Dataset:
    """Assemble the working dataset from parsed citing records.

    Citing records outside the PY bounds are dropped; cited-reference
    occurrences outside the RPY bounds are dropped; identical reference
    strings (after whitespace normalization) collapse into one
    ``CitedReference`` accumulating per-citing-year counts.  A positive
    ``max_cr`` keeps only that many references, preferring the most
    cited (ties broken by lexicographic raw string).

    Occurrences citing a record with no usable PY cannot be placed in
    the count matrix and are skipped; the record itself is kept when the
    PY filter admits missing years.

    Raises
    ------
    EmptyDatasetError
        If no cited reference survives the filters.
    """
    if rpy_filter.lo > rpy_filter.hi or py_filter.lo > py_filter.hi:
        raise ValueError("filter bounds must satisfy lo <= hi")
    if max_cr < 0:
        raise ValueError("max_cr must be >= 0")

    kept_records = [r for r in records if py_filter.admits(r.py)]

    by_key: dict[str, CitedReference] = {}
    for record in kept_records:
        if record.py is None:
            continue
        for raw in record.raw_cr_lines:
            parsed = parse_cited_reference(raw)
            if not rpy_filter.admits(parsed.rpy):
                continue
            key = normalize_raw(raw)
            ref = by_key.get(key)
            if ref is None:
                ref = CitedReference(cr_id=len(by_key), parsed=parsed)
                by_key[key] = ref
            counts = ref.counts_by_citing_year
            counts[record.py] = counts.get(record.py, 0) + 1

    references = list(by_key.values())
    if max_cr > 0:
        references = sorted(references, key=lambda r: (-r.n_cr, r.raw))[:max_cr]
        references.sort(key=lambda r: r.cr_id)

    if not references:
        raise EmptyDatasetError("import produced an empty dataset")

    op_log = [
        "import: {} citing records, {} distinct cited references, "
        "RPY [{}, {}, {}], PY [{}, {}, {}], maxCR {}".format(
            len(kept_records),
            len(references),
            rpy_filter.lo,
            rpy_filter.hi,
            str(rpy_filter.include_missing).lower(),
            py_filter.lo,
            py_filter.hi,
            str(py_filter.include_missing).lower(),
            max_cr,
        )
    ]
    return Dataset(
        citing_records=kept_records,
        references=references,
        rpy_filter=rpy_filter,
        py_filter=py_filter,
        max_cr=max_cr,
        op_log=op_log,
    )


def compute_stats(dataset: Dataset) -> DatasetStats:
    """Summary statistics of the current dataset state.

    Raises :class:`EmptyDatasetError` on a dataset with no references so
    downstream aggregates never divide by zero.
    """
    if dataset.is_empty:
        raise EmptyDatasetError("cannot compute statistics of an empty dataset")

    rpys = sorted({r.rpy for r in dataset.references if r.rpy is not None})
    citing_years = dataset.citing_years()
    return DatasetStats(
        total_nondistinct_crs=sum(r.n_cr for r in dataset.references),
        min_rpy=rpys[0] if rpys else 0,
        max_rpy=rpys[-1] if rpys else 0,
        n_citing_pubs=len(dataset.citing_records),
        min_citing_year=citing_years[0] if citing_years else 0,
        max_citing_year=citing_years[-1] if citing_years else 0,
        n_distinct_crs=len(dataset.references),
        n_distinct_rpys=len(rpys),
        n_distinct_citing_years=len(citing_years),
    )


def remove_by_ncr(dataset: Dataset, lo: int, hi: int) -> Dataset:
    """Drop every reference whose total count lies in ``[lo, hi]``.

    Removing rarely occurring references sharpens the spectrogram; the
    usual call removes ``[0, threshold - 1]``.  Removing everything is
    allowed; the next aggregate operation will raise.
    """
    if not 0 <= lo <= hi:
        raise ValueError("removal range must satisfy 0 <= lo <= hi")
    kept = [r.copy() for r in dataset.references if not lo <= r.n_cr <= hi]
    out = dataset.copy()
    out.references = kept
    out.op_log.append(
        f"removeCR: N_CR [{lo}, {hi}] removed {len(dataset.references) - len(kept)} references"
    )
    return out
