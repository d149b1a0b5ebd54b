#!/usr/bin/env python3
"""Walk through a full analysis with the library API.

Imports the bundled synthetic corpus, merges variant spellings, removes
rarely cited references, prints the spectrogram as a terminal bar chart
with peak markers, and lists the suggested references under each peak.

Run:  python demos/demo_spectrogram.py
"""
from pathlib import Path

from rpys import (
    ClusterConfig,
    Session,
    YearFilter,
    build_dataset,
    compute_stats,
    parse_wos_file,
    peak_report,
    spectrogram,
)

FIXTURES = Path(__file__).parent.parent / "tests" / "fixtures"
PARTS = ["corpus_part1.txt", "corpus_part2.txt", "corpus_part3.txt"]


def main() -> None:
    records = []
    for name in PARTS:
        result = parse_wos_file((FIXTURES / name).read_bytes(), source_name=name)
        records.extend(result.records)

    dataset = build_dataset(
        records,
        rpy_filter=YearFilter(1000, 2021, True),
        py_filter=YearFilter(1900, 2021, True),
    )
    session = Session(dataset)

    print("== imported ==")
    for key, value in compute_stats(session.dataset).as_dict().items():
        print(f"  {key}: {value}")

    n_clusters = session.cluster(ClusterConfig(threshold=0.75))
    n_distinct = session.merge()
    print(f"\n== clustered and merged: {n_clusters} clusters, "
          f"{n_distinct} distinct references ==")

    session.remove_ncr(0, 1)  # start by removing references cited only once
    print(f"removed singletons: {len(session.dataset.references)} references left")

    rows = spectrogram(session.dataset)
    scale = 40 / max(r.ncr for r in rows)
    print("\n== spectrogram (* marks Tukey peaks) ==")
    for row in rows:
        if row.ncr == 0:
            continue
        bar = "#" * max(1, int(row.ncr * scale))
        mark = " *" if row.is_peak else ""
        print(f"  {row.rpy}  {bar} {row.ncr} (dev {row.median_dev:+.1f}){mark}")

    for row in rows:
        if not row.is_peak:
            continue
        print(f"\n== peak {row.rpy}: suggested references ==")
        for entry in peak_report(session.dataset, row.rpy):
            if entry.suggested:
                print(f"  N_CR {entry.n_cr:>3}  PERC_YR {entry.perc_yr:.2f}  {entry.raw}")


if __name__ == "__main__":
    main()
