"""Spectrogram series and peak detection.

The spectrogram plots citations per reference publication year (bars)
with the five-year median deviation as a line overlay; years whose
deviation clears the upper Tukey fence are flagged as important peaks.
"""
from __future__ import annotations

from dataclasses import dataclass
from statistics import median

from .indicators import indicator_rows, ncr_by_rpy
from .model import Dataset


@dataclass(frozen=True)
class SpectrogramRow:
    rpy: int
    ncr: int
    median_dev: float
    is_peak: bool


@dataclass(frozen=True)
class PeakReference:
    """One line of a peak report: a reference of the inspected year."""

    cr_id: int
    raw: str
    n_cr: int
    perc_yr: float
    suggested: bool


def median_deviation(series: dict[int, int]) -> dict[int, float]:
    """Deviation of each year from the median of its five-year window.

    The year range is filled: years missing from ``series`` count as 0.
    Windows are [y-2, y+2] clipped to the observed range (no padding
    beyond it), so a constant series deviates by 0 everywhere.
    """
    if not series:
        return {}
    lo, hi = min(series), max(series)
    filled = {y: series.get(y, 0) for y in range(lo, hi + 1)}
    devs: dict[int, float] = {}
    for y in range(lo, hi + 1):
        window = [filled[w] for w in range(max(lo, y - 2), min(hi, y + 2) + 1)]
        devs[y] = filled[y] - median(window)
    return devs


def tukey_upper_fence(values: list[float]) -> float:
    """Upper Tukey fence (hinge + 1.5 * IQR) of the values.

    Hinges follow Tukey's convention: each half includes the overall
    median position when the count is odd.
    """
    ordered = sorted(values)
    n = len(ordered)
    half = (n + 1) // 2
    lower_hinge = median(ordered[:half])
    upper_hinge = median(ordered[n - half:])
    return upper_hinge + 1.5 * (upper_hinge - lower_hinge)


def tukey_peaks(devs: dict[int, float]) -> set[int]:
    """Years whose median deviation strictly exceeds the upper fence.

    Fewer than four data points cannot support quartiles; the peak set
    is empty then.  Only the upper fence is applied: troughs are never
    flagged.
    """
    if len(devs) < 4:
        return set()
    fence = tukey_upper_fence(list(devs.values()))
    return {year for year, dev in devs.items() if dev > fence}


def spectrogram(dataset: Dataset) -> list[SpectrogramRow]:
    """The full spectrogram: one row per year of the filled span."""
    by_rpy, _ = ncr_by_rpy(dataset)
    if not by_rpy:
        return []
    devs = median_deviation(by_rpy)
    peaks = tukey_peaks(devs)
    return [
        SpectrogramRow(
            rpy=year,
            ncr=by_rpy.get(year, 0),
            median_dev=devs[year],
            is_peak=year in peaks,
        )
        for year in sorted(devs)
    ]


def peak_report(dataset: Dataset, year: int) -> list[PeakReference]:
    """References of one spectrogram year, most cited first, with a
    suggested selection cut.

    The cut sits at the largest drop between consecutive counts
    (earliest on ties), counting the drop from the last reference to
    zero; everything above the cut is marked suggested.
    """
    by_rpy, _ = ncr_by_rpy(dataset)
    if not by_rpy:
        raise ValueError("dataset has no references with an RPY")
    lo, hi = min(by_rpy), max(by_rpy)
    if not lo <= year <= hi:
        raise ValueError(f"year {year} outside the spectrogram span [{lo}, {hi}]")

    members = [r for r in dataset.references if r.rpy == year]
    if not members:
        return []
    members.sort(key=lambda r: (-r.n_cr, r.raw))
    counts = [r.n_cr for r in members]
    gaps = [
        counts[i] - (counts[i + 1] if i + 1 < len(counts) else 0)
        for i in range(len(counts))
    ]
    cut = max(range(len(gaps)), key=lambda i: (gaps[i], -i)) + 1

    rows = indicator_rows(dataset)
    return [
        PeakReference(
            cr_id=r.cr_id,
            raw=r.raw,
            n_cr=r.n_cr,
            perc_yr=rows[r.cr_id].perc_yr or 0.0,
            suggested=i < cut,
        )
        for i, r in enumerate(members)
    ]
