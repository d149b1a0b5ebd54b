import socket
import threading
import time

import httpx
import pytest
from fastapi.testclient import TestClient

from rpys.server import create_app
from rpys.exports import cre_bytes, csv_cr_bytes, csv_graph_bytes

from conftest import FIXTURES, PART_FILES


@pytest.fixture()
def client():
    with TestClient(create_app()) as c:
        yield c


def upload_files(names=PART_FILES):
    return [
        ("files", (name, (FIXTURES / name).read_bytes(), "text/plain"))
        for name in names
    ]


@pytest.fixture()
def session_id(client):
    response = client.post("/sessions", files=upload_files())
    assert response.status_code == 201
    return response.json()["session_id"]


class TestSessionLifecycle:
    def test_create_returns_handle(self, client):
        response = client.post("/sessions", files=upload_files())
        assert response.status_code == 201
        body = response.json()
        assert body["stats"]["n_citing_pubs"] == 30
        assert body["undo_depth"] == 0
        assert body["op_log_length"] == 1
        assert response.headers["X-Op-Log-Length"] == "1"
        assert body["diagnostics"] == []

    def test_create_with_filters(self, client):
        response = client.post(
            "/sessions",
            files=upload_files(),
            data={"rpy": "[1000, 2021, true]", "py": "[1900, 2021, true]"},
        )
        assert response.status_code == 201

    def test_create_without_files_is_400(self, client):
        assert client.post("/sessions", data={"py": "[1900, 2021, true]"}).status_code == 400

    def test_create_from_workdir_json(self, tmp_path):
        for name in PART_FILES:
            (tmp_path / name).write_bytes((FIXTURES / name).read_bytes())
        with TestClient(create_app(workdir=str(tmp_path))) as c:
            response = c.post("/sessions", json={"files": PART_FILES})
            assert response.status_code == 201
            assert response.json()["stats"]["n_citing_pubs"] == 30

    def test_unknown_session_404(self, client):
        assert client.get("/sessions/nope/stats").status_code == 404

    def test_stats_endpoint(self, client, session_id):
        response = client.get(f"/sessions/{session_id}/stats")
        assert response.status_code == 200
        assert response.json()["stats"]["n_distinct_crs"] == 120


class TestReads:
    def test_spectrogram_consistent(self, client, session_id):
        body = client.get(f"/sessions/{session_id}/spectrogram").json()
        assert body["total_ncr"] == sum(r["ncr"] for r in body["spectrogram"])
        years = [r["rpy"] for r in body["spectrogram"]]
        assert years == list(range(min(years), max(years) + 1))

    def test_year_references_limit(self, client, session_id):
        response = client.get(f"/sessions/{session_id}/years/2005/references?limit=5")
        rows = response.json()["references"]
        assert 0 < len(rows) <= 5
        for row in rows:
            assert {"perc_yr", "n_top10", "n_pyears", "n_cr", "raw"} <= set(row)

    def test_year_out_of_span_404(self, client, session_id):
        assert client.get(f"/sessions/{session_id}/years/1200/references").status_code == 404

    def test_references_sorted(self, client, session_id):
        body = client.get(
            f"/sessions/{session_id}/references", params={"sort": "n_cr", "desc": True}
        ).json()
        ncrs = [r["n_cr"] for r in body["references"]]
        assert ncrs == sorted(ncrs, reverse=True)
        body = client.get(
            f"/sessions/{session_id}/references", params={"sort": "n_top10", "desc": True}
        ).json()
        tops = [r["n_top10"] for r in body["references"]]
        assert tops == sorted(tops, reverse=True)

    def test_references_bad_sort_400(self, client, session_id):
        response = client.get(f"/sessions/{session_id}/references", params={"sort": "x"})
        assert response.status_code == 400

    def test_bundle(self, client, session_id):
        bundle = client.get(f"/sessions/{session_id}/bundle").json()
        assert {"stats", "spectrogram", "peak_years", "references_by_rpy"} <= set(bundle)


class TestMutations:
    def test_remove_then_undo_restores_bytes(self, client, session_id):
        stats_before = client.get(f"/sessions/{session_id}/stats").content
        spect_before = client.get(f"/sessions/{session_id}/spectrogram").content

        response = client.post(
            f"/sessions/{session_id}/ops", json={"op": "removeCR", "lo": 0, "hi": 4}
        )
        assert response.status_code == 200
        assert response.json()["undo_depth"] == 1
        changed = client.get(f"/sessions/{session_id}/stats").content
        assert changed != stats_before

        assert client.post(f"/sessions/{session_id}/undo").status_code == 200
        assert client.get(f"/sessions/{session_id}/stats").content == stats_before
        assert client.get(f"/sessions/{session_id}/spectrogram").content == spect_before

    def test_ncr_array_body_form(self, client, session_id):
        response = client.post(
            f"/sessions/{session_id}/ops", json={"op": "removeCR", "args": {"N_CR": [0, 1]}}
        )
        assert response.status_code == 200

    def test_cluster_then_merge(self, client, session_id):
        response = client.post(
            f"/sessions/{session_id}/ops",
            json={"op": "cluster", "threshold": 0.75, "volume": True, "page": True,
                  "DOI": False},
        )
        assert response.status_code == 200
        response = client.post(f"/sessions/{session_id}/ops", json={"op": "merge"})
        assert response.status_code == 200
        assert response.json()["stats"]["n_distinct_crs"] == 107

    def test_merge_before_cluster_409(self, client, session_id):
        response = client.post(f"/sessions/{session_id}/ops", json={"op": "merge"})
        assert response.status_code == 409

    def test_undo_empty_409(self, client, session_id):
        assert client.post(f"/sessions/{session_id}/undo").status_code == 409

    def test_unknown_op_400(self, client, session_id):
        response = client.post(f"/sessions/{session_id}/ops", json={"op": "explode"})
        assert response.status_code == 400

    def test_malformed_remove_400(self, client, session_id):
        response = client.post(f"/sessions/{session_id}/ops", json={"op": "removeCR"})
        assert response.status_code == 400

    def test_token_advances_with_mutations(self, client, session_id):
        t0 = int(client.get(f"/sessions/{session_id}/stats").headers["X-Op-Log-Length"])
        client.post(f"/sessions/{session_id}/ops", json={"op": "removeCR", "lo": 0, "hi": 0})
        t1 = int(client.get(f"/sessions/{session_id}/stats").headers["X-Op-Log-Length"])
        assert t1 == t0 + 1


class TestExports:
    def test_exports_match_library_bytes(self, client, corpus_dataset):
        # same import parameterization as the corpus_dataset fixture
        created = client.post(
            "/sessions",
            files=upload_files(),
            data={"rpy": "[1000, 2021, true]", "py": "[1900, 2021, true]"},
        )
        session_id = created.json()["session_id"]
        for export_type, expected in (
            ("CSV_CR", csv_cr_bytes(corpus_dataset)),
            ("CSV_GRAPH", csv_graph_bytes(corpus_dataset)),
            ("CRE", cre_bytes(corpus_dataset)),
        ):
            response = client.get(
                f"/sessions/{session_id}/export", params={"type": export_type}
            )
            assert response.status_code == 200
            assert response.content == expected
            assert "X-Op-Log-Length" in response.headers

    def test_bad_type_400(self, client, session_id):
        response = client.get(f"/sessions/{session_id}/export", params={"type": "XLS"})
        assert response.status_code == 400


def free_port() -> int:
    with socket.socket() as sock:
        sock.bind(("127.0.0.1", 0))
        return sock.getsockname()[1]


@pytest.fixture()
def live_server():
    import uvicorn

    port = free_port()
    config = uvicorn.Config(create_app(), host="127.0.0.1", port=port, log_level="error")
    server = uvicorn.Server(config)
    thread = threading.Thread(target=server.run, daemon=True)
    thread.start()
    deadline = time.time() + 10
    while not server.started:
        if time.time() > deadline:
            raise RuntimeError("server did not start")
        time.sleep(0.02)
    yield f"http://127.0.0.1:{port}"
    server.should_exit = True
    thread.join(timeout=5)


def test_concurrent_readers_see_consistent_snapshots(live_server):
    with httpx.Client(base_url=live_server, timeout=30) as client:
        session_id = client.post("/sessions", files=upload_files()).json()["session_id"]
        errors: list[str] = []
        stop = threading.Event()

        def reader():
            while not stop.is_set():
                body = client.get(f"/sessions/{session_id}/spectrogram").json()
                total = sum(r["ncr"] for r in body["spectrogram"])
                if total != body["total_ncr"]:
                    errors.append(f"torn read: {total} != {body['total_ncr']}")
                stats = client.get(f"/sessions/{session_id}/stats").json()
                if stats["stats"] is not None:
                    expected_distinct = stats["stats"]["n_distinct_crs"]
                    if expected_distinct <= 0:
                        errors.append("stats reported non-positive distinct count")

        threads = [threading.Thread(target=reader) for _ in range(4)]
        for t in threads:
            t.start()
        for _ in range(15):
            r = client.post(
                f"/sessions/{session_id}/ops", json={"op": "removeCR", "lo": 0, "hi": 2}
            )
            assert r.status_code == 200
            r = client.post(f"/sessions/{session_id}/undo")
            assert r.status_code == 200
        stop.set()
        for t in threads:
            t.join(timeout=10)
        assert errors == []
