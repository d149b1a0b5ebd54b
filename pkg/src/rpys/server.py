"""Local HTTP service exposing analysis sessions to the explorer UI.

Sessions live in process memory.  Mutations on a session are serialized
by a per-session lock and swap in a new dataset value, so concurrent
readers always see either the old or the new state, never a partial
one.  Every response carries the session's operation-log length in the
``X-Op-Log-Length`` header as a consistency token.
"""
from __future__ import annotations

import json
import threading
import uuid
from datetime import datetime, timezone
from pathlib import Path

from fastapi import FastAPI, HTTPException, Request, Response
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles
from starlette.datastructures import UploadFile

from .clustering import ClusterConfig
from .exports import export_ui_bundle
from .indicators import indicator_rows
from .model import Dataset, EmptyDatasetError, YearFilter, build_dataset, compute_stats
from .session import OperationOrderError, Session
from .spectroscopy import peak_report, spectrogram
from .scripting import EXPORT_TYPES
from .wos import parse_wos_file
from . import exports


class ServerSession:
    def __init__(self, dataset: Dataset):
        self.session_id = uuid.uuid4().hex
        self.created_at = datetime.now(timezone.utc).isoformat()
        self.session = Session(dataset)
        self.lock = threading.Lock()
        self.busy_with: str | None = None


def _year_filter(raw, name: str) -> YearFilter:
    try:
        lo, hi, missing = raw
        return YearFilter(int(lo), int(hi), bool(missing))
    except (TypeError, ValueError) as exc:
        raise HTTPException(400, f"{name} must be [lo, hi, includeMissing]") from exc


def create_app(workdir: str | None = None, ui_dir: str | None = None) -> FastAPI:
    app = FastAPI(title="rpys explorer API")
    sessions: dict[str, ServerSession] = {}

    def get(session_id: str) -> ServerSession:
        sess = sessions.get(session_id)
        if sess is None:
            raise HTTPException(404, f"unknown session {session_id!r}")
        return sess

    def token_response(sess: ServerSession, payload: dict, status_code: int = 200) -> JSONResponse:
        n = len(sess.session.dataset.op_log)
        payload = dict(payload)
        payload["op_log_length"] = n
        return JSONResponse(payload, status_code=status_code,
                            headers={"X-Op-Log-Length": str(n)})

    def handle_payload(sess: ServerSession) -> dict:
        ds = sess.session.snapshot()
        stats = None if ds.is_empty else compute_stats(ds).as_dict()
        return {
            "session_id": sess.session_id,
            "created_at": sess.created_at,
            "stats": stats,
            "undo_depth": sess.session.undo_depth,
        }

    @app.post("/sessions", status_code=201)
    async def create_session(request: Request):
        """Create a session from multipart file uploads, or (when the
        body is JSON) from files under the server's working directory."""
        named_data: list[tuple[str, bytes]] = []
        params: dict = {}
        content_type = request.headers.get("content-type", "")
        if content_type.startswith("application/json"):
            body = await request.json()
            params = body
            base = Path(workdir or ".")
            for name in body.get("files", []):
                path = base / name
                if not path.is_file():
                    raise HTTPException(400, f"no such file under workdir: {name}")
                named_data.append((name, path.read_bytes()))
        else:
            form = await request.form()
            for fieldname, item in form.multi_items():
                if isinstance(item, UploadFile):
                    named_data.append((item.filename or fieldname, await item.read()))
                elif item and item[0] in "[{":
                    try:
                        params[fieldname] = json.loads(item)
                    except ValueError as exc:
                        raise HTTPException(400, f"malformed {fieldname}: {exc}") from exc
                else:
                    params[fieldname] = item
        if not named_data:
            raise HTTPException(400, "provide at least one WoS export file")

        records = []
        diagnostics: list[str] = []
        for name, data in named_data:
            try:
                result = parse_wos_file(data, source_name=name)
            except ValueError as exc:
                raise HTTPException(400, f"{name}: {exc}") from exc
            records.extend(result.records)
            diagnostics.extend(result.diagnostics)
        rpy = _year_filter(params["rpy"], "rpy") if "rpy" in params else YearFilter(1000, 2100, True)
        py = _year_filter(params["py"], "py") if "py" in params else YearFilter(1000, 2100, True)
        try:
            max_cr = int(params.get("max_cr", 0))
            dataset = build_dataset(records, rpy_filter=rpy, py_filter=py, max_cr=max_cr)
        except (EmptyDatasetError, ValueError) as exc:
            raise HTTPException(400, str(exc)) from exc
        sess = ServerSession(dataset)
        sessions[sess.session_id] = sess
        payload = handle_payload(sess)
        payload["diagnostics"] = diagnostics
        return token_response(sess, payload, status_code=201)

    @app.get("/sessions/{session_id}/stats")
    def session_stats(session_id: str):
        sess = get(session_id)
        return token_response(sess, handle_payload(sess))

    @app.get("/sessions/{session_id}/progress")
    def session_progress(session_id: str):
        sess = get(session_id)
        return token_response(sess, {"busy": sess.busy_with is not None, "op": sess.busy_with})

    @app.get("/sessions/{session_id}/spectrogram")
    def session_spectrogram(session_id: str):
        sess = get(session_id)
        ds = sess.session.snapshot()
        if ds.is_empty:
            return token_response(sess, {"spectrogram": [], "peak_years": [], "total_ncr": 0})
        rows = spectrogram(ds)
        return token_response(
            sess,
            {
                "spectrogram": [
                    {"rpy": r.rpy, "ncr": r.ncr, "median_dev": r.median_dev, "is_peak": r.is_peak}
                    for r in rows
                ],
                "peak_years": [r.rpy for r in rows if r.is_peak],
                "total_ncr": sum(r.ncr for r in rows),
            },
        )

    @app.get("/sessions/{session_id}/bundle")
    def session_bundle(session_id: str):
        sess = get(session_id)
        ds = sess.session.snapshot()
        try:
            return token_response(sess, export_ui_bundle(ds))
        except EmptyDatasetError as exc:
            raise HTTPException(404, str(exc)) from exc

    @app.get("/sessions/{session_id}/years/{rpy}/references")
    def year_references(session_id: str, rpy: int, limit: int = 5):
        sess = get(session_id)
        ds = sess.session.snapshot()
        if ds.is_empty:
            raise HTTPException(404, "dataset is empty")
        try:
            report = peak_report(ds, rpy)
        except ValueError as exc:
            raise HTTPException(404, str(exc)) from exc
        rows = indicator_rows(ds)
        return token_response(
            sess,
            {
                "rpy": rpy,
                "references": [
                    {
                        "cr_id": r.cr_id,
                        "raw": r.raw,
                        "n_cr": r.n_cr,
                        "perc_yr": r.perc_yr,
                        "n_top10": rows[r.cr_id].n_top10,
                        "n_pyears": rows[r.cr_id].n_pyears,
                        "suggested": r.suggested,
                    }
                    for r in report[: max(limit, 0)]
                ],
            },
        )

    @app.get("/sessions/{session_id}/references")
    def list_references(session_id: str, sort: str = "n_cr", desc: bool = True,
                        limit: int = 100):
        sess = get(session_id)
        ds = sess.session.snapshot()
        if ds.is_empty:
            return token_response(sess, {"references": []})
        if sort not in ("n_cr", "n_top10"):
            raise HTTPException(400, "sort must be n_cr or n_top10")
        rows = indicator_rows(ds)
        refs = sorted(
            ds.references,
            key=lambda r: (getattr(rows[r.cr_id], sort), r.raw)
            if not desc
            else (-getattr(rows[r.cr_id], sort), r.raw),
        )
        return token_response(
            sess,
            {
                "references": [
                    {
                        "cr_id": r.cr_id,
                        "raw": r.raw,
                        "rpy": r.rpy,
                        "n_cr": rows[r.cr_id].n_cr,
                        "perc_yr": rows[r.cr_id].perc_yr,
                        "n_pyears": rows[r.cr_id].n_pyears,
                        "n_top10": rows[r.cr_id].n_top10,
                        "n_top1": rows[r.cr_id].n_top1,
                        "n_top0_1": rows[r.cr_id].n_top0_1,
                    }
                    for r in refs[: max(limit, 0)]
                ]
            },
        )

    @app.post("/sessions/{session_id}/ops")
    def apply_op(session_id: str, body: dict):
        sess = get(session_id)
        op = body.get("op") or body.get("name")
        args = body.get("args", {k: v for k, v in body.items() if k not in ("op", "name")})
        with sess.lock:
            sess.busy_with = op
            try:
                if op == "removeCR":
                    bounds = args.get("N_CR", [args.get("lo"), args.get("hi")])
                    try:
                        lo, hi = int(bounds[0]), int(bounds[1])
                    except (TypeError, ValueError, IndexError) as exc:
                        raise HTTPException(400, "removeCR needs lo/hi or N_CR: [lo, hi]") from exc
                    try:
                        sess.session.remove_ncr(lo, hi)
                    except ValueError as exc:
                        raise HTTPException(400, str(exc)) from exc
                elif op == "cluster":
                    try:
                        config = ClusterConfig(
                            threshold=float(args.get("threshold", 0.75)),
                            use_volume=bool(args.get("volume", True)),
                            use_page=bool(args.get("page", True)),
                            use_doi=bool(args.get("DOI", False)),
                        )
                        sess.session.cluster(config)
                    except (ValueError, EmptyDatasetError) as exc:
                        raise HTTPException(400, str(exc)) from exc
                elif op == "merge":
                    try:
                        sess.session.merge()
                    except OperationOrderError as exc:
                        raise HTTPException(409, str(exc)) from exc
                else:
                    raise HTTPException(400, f"unknown op {op!r}")
            finally:
                sess.busy_with = None
        return token_response(sess, handle_payload(sess))

    @app.post("/sessions/{session_id}/undo")
    def undo(session_id: str):
        sess = get(session_id)
        with sess.lock:
            try:
                sess.session.undo()
            except OperationOrderError as exc:
                raise HTTPException(409, str(exc)) from exc
        return token_response(sess, handle_payload(sess))

    @app.get("/sessions/{session_id}/export")
    def export(session_id: str, type: str = "CSV_CR"):
        sess = get(session_id)
        ds = sess.session.snapshot()
        try:
            if type == "CRE":
                data = exports.cre_bytes(ds)
                media, name = "application/octet-stream", f"{sess.session_id}.cre"
            elif type == "CSV_CR":
                data = exports.csv_cr_bytes(ds)
                media, name = "text/csv", f"{sess.session_id}_CR.csv"
            elif type == "CSV_GRAPH":
                data = exports.csv_graph_bytes(ds)
                media, name = "text/csv", f"{sess.session_id}_GRAPH.csv"
            else:
                raise HTTPException(400, f"type must be one of {EXPORT_TYPES + ('CRE',)}")
        except EmptyDatasetError as exc:
            raise HTTPException(400, str(exc)) from exc
        return Response(
            content=data,
            media_type=media,
            headers={
                "X-Op-Log-Length": str(len(ds.op_log)),
                "Content-Disposition": f'attachment; filename="{name}"',
            },
        )

    if ui_dir:
        app.mount("/", StaticFiles(directory=ui_dir, html=True), name="ui")

    return app
