#!/usr/bin/env python3
"""Record real server payloads for the explorer's contract tests.

Creates a session over the bundled synthetic corpus, clusters and
merges, then walks the removal-threshold sweep 1..10, capturing the
stats / spectrogram / bundle responses after every step.  The vitest
suite replays these states through a fake transport, so every number
the UI renders in tests is a genuine server output.

Run from the repository root:  python frontend/tools/record_fixtures.py
"""
import json
from pathlib import Path

from fastapi.testclient import TestClient

from rpys.server import create_app

ROOT = Path(__file__).resolve().parents[2]
FIXTURES = ROOT / "tests" / "fixtures"
PART_FILES = ["corpus_part1.txt", "corpus_part2.txt", "corpus_part3.txt"]
OUT = Path(__file__).resolve().parents[1] / "test" / "fixtures" / "sweep.json"


def snapshot(client: TestClient, session_id: str, label: str, op=None) -> dict:
    stats = client.get(f"/sessions/{session_id}/stats")
    spectrogram = client.get(f"/sessions/{session_id}/spectrogram")
    bundle = client.get(f"/sessions/{session_id}/bundle")
    assert stats.status_code == spectrogram.status_code == bundle.status_code == 200
    return {
        "label": label,
        "op": op,
        "token": int(stats.headers["X-Op-Log-Length"]),
        "stats": stats.json(),
        "spectrogram": spectrogram.json(),
        "bundle": bundle.json(),
    }


def main() -> None:
    with TestClient(create_app()) as client:
        files = [
            ("files", (name, (FIXTURES / name).read_bytes(), "text/plain"))
            for name in PART_FILES
        ]
        created = client.post(
            "/sessions",
            files=files,
            data={"rpy": "[1000, 2021, true]", "py": "[1900, 2021, true]"},
        )
        assert created.status_code == 201, created.text
        session_id = created.json()["session_id"]

        for op in (
            {"op": "cluster", "threshold": 0.75, "volume": True, "page": True,
             "DOI": False},
            {"op": "merge"},
        ):
            assert client.post(f"/sessions/{session_id}/ops", json=op).status_code == 200

        states = [snapshot(client, session_id, "merged")]
        for threshold in range(1, 11):
            op = {"op": "removeCR", "lo": 0, "hi": threshold - 1}
            assert client.post(f"/sessions/{session_id}/ops", json=op).status_code == 200
            states.append(snapshot(client, session_id, f"min_ncr_{threshold}", op))

    OUT.parent.mkdir(parents=True, exist_ok=True)
    OUT.write_text(json.dumps({"states": states}, indent=1, sort_keys=True) + "\n",
                   encoding="utf-8")
    distinct = [s["stats"]["stats"]["n_distinct_crs"] for s in states]
    print(f"wrote {OUT.relative_to(ROOT)}; distinct counts along sweep: {distinct}")


if __name__ == "__main__":
    main()
