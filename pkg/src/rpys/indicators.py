"""Per-reference influence indicators.

N_CR is a reference's total count, PERC_YR its share of all citations
to its reference publication year, N_PYEARS the number of distinct
citing years, and N_TOP10 / N_TOP1 / N_TOP0_1 count the citing years in
which the reference's per-year count reaches that year's top decile /
percentile / permille (nearest-rank, ties included).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .model import Dataset, EmptyDatasetError

TOP_PERCENTS = (10, 1, 0.1)


class MissingRpyError(ValueError):
    """The reference has no usable reference publication year."""


@dataclass(frozen=True)
class IndicatorRow:
    cr_id: int
    n_cr: int
    perc_yr: float | None
    n_pyears: int
    n_top10: int
    n_top1: int
    n_top0_1: int


def ncr_by_rpy(dataset: Dataset) -> tuple[dict[int, int], int]:
    """Total citations per reference publication year.

    Returns the year -> NCR map plus the remainder: the summed counts of
    references whose year could not be parsed (they cannot be placed on
    the spectrogram).
    """
    if dataset.is_empty:
        raise EmptyDatasetError("cannot aggregate an empty dataset")
    by_rpy: dict[int, int] = {}
    missing = 0
    for ref in dataset.references:
        if ref.rpy is None:
            missing += ref.n_cr
        else:
            by_rpy[ref.rpy] = by_rpy.get(ref.rpy, 0) + ref.n_cr
    return by_rpy, missing


def perc_yr(dataset: Dataset, cr_id: int) -> float:
    """The reference's share of its year: N_CR / NCR(rpy), on the
    current (post-filter) dataset."""
    ref = dataset.reference_by_id(cr_id)
    if ref.rpy is None:
        raise MissingRpyError(f"reference {cr_id} has no RPY")
    by_rpy, _ = ncr_by_rpy(dataset)
    return ref.n_cr / by_rpy[ref.rpy]


def n_top_family(dataset: Dataset, p: float) -> dict[int, int]:
    """Number of citing years in which each reference sits in the top
    ``p`` percent of that year's per-reference counts.

    For each citing year the positive per-year counts form a multiset;
    the qualification threshold is the nearest-rank (100 - p)th
    percentile (1-based index ceil((1 - p/100) * N) of the ascending
    sort) and a reference qualifies when its count reaches it.  Ties can
    push membership past the nominal p percent.
    """
    if dataset.is_empty:
        raise EmptyDatasetError("cannot aggregate an empty dataset")
    keep = 1 - Fraction(str(p)) / 100
    scores = {ref.cr_id: 0 for ref in dataset.references}
    years: set[int] = set()
    for ref in dataset.references:
        years.update(ref.counts_by_citing_year)
    for year in years:
        counted = [
            (ref.cr_id, ref.counts_by_citing_year[year])
            for ref in dataset.references
            if ref.counts_by_citing_year.get(year, 0) > 0
        ]
        if not counted:
            continue
        ascending = sorted(c for _, c in counted)
        rank = max(1, math.ceil(keep * len(ascending)))
        threshold = ascending[rank - 1]
        for cr_id, count in counted:
            if count >= threshold:
                scores[cr_id] += 1
    return scores


def indicator_rows(dataset: Dataset) -> dict[int, IndicatorRow]:
    """All indicator values in one pass; keyed by reference id.

    ``perc_yr`` is None for references with no RPY.
    """
    by_rpy, _ = ncr_by_rpy(dataset)
    tops = {p: n_top_family(dataset, p) for p in TOP_PERCENTS}
    rows: dict[int, IndicatorRow] = {}
    for ref in dataset.references:
        share = ref.n_cr / by_rpy[ref.rpy] if ref.rpy is not None else None
        rows[ref.cr_id] = IndicatorRow(
            cr_id=ref.cr_id,
            n_cr=ref.n_cr,
            perc_yr=share,
            n_pyears=len(ref.counts_by_citing_year),
            n_top10=tops[10][ref.cr_id],
            n_top1=tops[1][ref.cr_id],
            n_top0_1=tops[0.1][ref.cr_id],
        )
    return rows


def highly_influential(dataset: Dataset) -> list[int]:
    """References whose N_TOP10 exceeds half the number of distinct
    citing years, most influential first."""
    n_years = len(dataset.citing_years())
    rows = indicator_rows(dataset)
    refs = {ref.cr_id: ref for ref in dataset.references}
    qualifying = [
        row for row in rows.values() if row.n_top10 > n_years / 2
    ]
    qualifying.sort(key=lambda r: (-r.n_top10, -r.n_cr, refs[r.cr_id].raw))
    return [row.cr_id for row in qualifying]
