"""Annotation HTTP API.

Endpoints:

    GET  /healthz
    POST /sessions?predictor=&threshold=&mode=      body: image bytes
    POST /sessions/{id}/gt                          body: mask PNG bytes
    GET  /sessions/{id}/prediction?format=obfmap|mask
    POST /sessions/{id}/scribbles?mode=sync|async   body: scribble JSON
    GET  /sessions/{id}/rounds/{token}              async poll
    GET  /sessions/{id}/ob?format=mask|obfmap[&round=n]
    POST /sessions/{id}/export                      zip archive

Requests for one session serialize on a per-session lock; distinct
sessions proceed concurrently. State is re-read from disk on every
request, so a restarted service resumes every session at its last
committed round.
"""

from __future__ import annotations

import io
import json
import threading
import uuid
import zipfile

import numpy as np
from fastapi import FastAPI, Query, Request, Response
from fastapi.responses import JSONResponse

from ..errors import MissingInputError, ObkitError, ParseError
from ..interaction import (
    parse_scribble_document,
    rasterize_strokes,
    refine,
    scribble_document,
)
from ..predictors import PredictorInput, parse_predictor_spec, predict
from ..raster import (
    ThresholdConfig,
    mask_png_bytes,
    morph_thin,
    nms_thin,
    obfmap_bytes,
    threshold,
    trace_segments,
)
from .store import SessionStore

__all__ = ["create_app"]


def _decode_image(blob: bytes) -> np.ndarray:
    from PIL import Image, UnidentifiedImageError

    try:
        with Image.open(io.BytesIO(blob)) as img:
            return np.asarray(img.convert("RGB"))
    except (UnidentifiedImageError, OSError) as e:
        raise ParseError(f"cannot decode image: {e}") from e


def create_app(session_dir, default_predictor: str = "gradient",
               ui_dir=None) -> FastAPI:
    app = FastAPI(title="obkit annotation service")
    if ui_dir is not None:
        from fastapi.staticfiles import StaticFiles

        app.mount("/app", StaticFiles(directory=ui_dir, html=True), name="ui")
    store = SessionStore(session_dir)
    pending: dict[str, dict] = {}
    pending_lock = threading.Lock()

    def _predict_for(state, fnfp, prev):
        spec = parse_predictor_spec(state.predictor)
        rgb = store.load_rgb(state)
        gt = store.load_gt(state)
        inp = PredictorInput(rgb=rgb, fnfp=fnfp, prev=prev)
        rng = np.random.default_rng(0)
        return predict(spec, inp, gt=gt, rng=rng, workdir=state.root / "extern")

    def _postprocess(state, refined):
        prob = nms_thin(refined)
        prev = threshold(prob, ThresholdConfig(T=state.threshold, mode=state.mode))
        if state.mode == "binary":
            prev = prev.astype(np.float32)
        ob = morph_thin(threshold(prob, ThresholdConfig(T=state.threshold, mode="binary")))
        return prob, prev, ob

    @app.get("/healthz")
    def healthz():
        return {"status": "ok"}

    @app.post("/sessions", status_code=201)
    async def create_session(
        request: Request,
        predictor: str = Query(default=None),
        threshold_q: float = Query(default=0.7, alias="threshold"),
        mode: str = Query(default="non-binary"),
    ):
        blob = await request.body()
        try:
            rgb = _decode_image(blob)
        except ParseError as e:
            return JSONResponse({"error": str(e)}, status_code=400)
        spec_text = predictor or default_predictor
        try:
            spec = parse_predictor_spec(spec_text)
            if mode not in ("binary", "non-binary"):
                raise ParseError(f"bad previous-output mode {mode!r}")
            ThresholdConfig(T=threshold_q, mode=mode)
        except (ParseError, ValueError) as e:
            return JSONResponse({"error": str(e)}, status_code=422)
        h, w = rgb.shape[:2]
        state = store.create(spec_text, w, h, threshold_q, mode)
        with store.lock(state.id):
            inp = PredictorInput.initial(rgb, (h, w))
            try:
                p0 = predict(spec, inp, gt=None, rng=np.random.default_rng(0),
                             workdir=state.root / "extern")
            except MissingInputError:
                # oracle sessions get their gt uploaded later; start cold
                p0 = np.zeros((h, w), dtype=np.float32)
            except ObkitError as e:
                return JSONResponse({"error": str(e)}, status_code=422)
            prob, prev, ob = _postprocess(state, p0)
            store.save_initial(state, blob, prob, prev, ob)
        return {
            "id": state.id,
            "width": w,
            "height": h,
            "prediction": f"/sessions/{state.id}/prediction",
            "ob": f"/sessions/{state.id}/ob",
        }

    @app.post("/sessions/{sid}/gt")
    async def upload_gt(sid: str, request: Request):
        state = store.get(sid)
        if state is None:
            return JSONResponse({"error": "unknown session"}, status_code=404)
        blob = await request.body()
        try:
            mask = _decode_image(blob)
        except ParseError as e:
            return JSONResponse({"error": str(e)}, status_code=400)
        if mask.shape[:2] != state.shape:
            return JSONResponse({"error": "gt dimensions do not match image"},
                                status_code=422)
        with store.lock(sid):
            (state.root / "gt.png").write_bytes(blob)
        return {"ok": True}

    @app.get("/sessions/{sid}/prediction")
    def get_prediction(sid: str, format: str = Query(default="obfmap")):
        state = store.get(sid)
        if state is None:
            return JSONResponse({"error": "unknown session"}, status_code=404)
        prob = store.load_initial(state)
        if format == "mask":
            ob = store.load_ob(state, round_n=0)
            return Response(mask_png_bytes(ob), media_type="image/png")
        return Response(obfmap_bytes(prob), media_type="application/octet-stream")

    def _run_round(state, doc_text: str):
        strokes = parse_scribble_document(doc_text)
        fnfp = rasterize_strokes(strokes, (state.width, state.height))
        prev = store.load_prev(state)
        candidate = _predict_for(state, fnfp, prev)
        refined = refine(prev, candidate, fnfp,
                         ThresholdConfig(T=state.threshold, mode=state.mode))
        prob, new_prev, ob = _postprocess(state, refined)
        n = store.commit_round(state, scribble_document(strokes), fnfp, prob, ob, new_prev)
        return n

    @app.post("/sessions/{sid}/scribbles")
    async def submit_scribbles(sid: str, request: Request,
                               mode: str = Query(default="sync")):
        state = store.get(sid)
        if state is None:
            return JSONResponse({"error": "unknown session"}, status_code=404)
        doc_text = (await request.body()).decode("utf-8", errors="replace")
        try:
            parse_scribble_document(doc_text)
        except ParseError as e:
            return JSONResponse({"error": str(e)}, status_code=422)
        if mode == "async":
            token = uuid.uuid4().hex[:12]
            with pending_lock:
                pending[token] = {"sid": sid, "status": "pending"}

            def work():
                try:
                    with store.lock(sid):
                        fresh = store.get(sid)
                        n = _run_round(fresh, doc_text)
                    with pending_lock:
                        pending[token] = {"sid": sid, "status": "done", "round": n}
                except Exception as e:  # surfaced on poll
                    with pending_lock:
                        pending[token] = {"sid": sid, "status": "error", "error": str(e)}

            threading.Thread(target=work, daemon=True).start()
            return JSONResponse({"token": token,
                                 "poll": f"/sessions/{sid}/rounds/{token}"},
                                status_code=202)
        try:
            with store.lock(sid):
                n = _run_round(state, doc_text)
        except ObkitError as e:
            return JSONResponse({"error": str(e)}, status_code=422)
        return {"round": n, "ob": f"/sessions/{sid}/ob"}

    @app.get("/sessions/{sid}/rounds/{token}")
    def poll_round(sid: str, token: str):
        with pending_lock:
            entry = pending.get(token)
        if entry is None or entry["sid"] != sid:
            return JSONResponse({"error": "unknown token"}, status_code=404)
        if entry["status"] == "pending":
            return JSONResponse({"status": "pending"}, status_code=202)
        if entry["status"] == "error":
            return JSONResponse({"status": "error", "error": entry["error"]},
                                status_code=500)
        return {"status": "done", "round": entry["round"],
                "ob": f"/sessions/{sid}/ob"}

    @app.get("/sessions/{sid}/ob")
    def get_ob(sid: str, format: str = Query(default="mask"),
               round: int = Query(default=None)):
        state = store.get(sid)
        if state is None:
            return JSONResponse({"error": "unknown session"}, status_code=404)
        n = state.rounds if round is None else round
        if n < 0 or n > state.rounds:
            return JSONResponse({"error": f"round {n} not available"}, status_code=404)
        ob = store.load_ob(state, round_n=n)
        if format == "obfmap":
            prob = store.load_initial(state) if n == 0 else None
            if prob is None:
                from ..raster import read_obfmap

                prob = read_obfmap(state.round_dir(n) / "prob.obfmap")
            return Response(obfmap_bytes(prob), media_type="application/octet-stream")
        return Response(mask_png_bytes(ob), media_type="image/png")

    @app.post("/sessions/{sid}/export")
    def export_session(sid: str):
        state = store.get(sid)
        if state is None:
            return JSONResponse({"error": "unknown session"}, status_code=404)
        if state.rounds < 1:
            return JSONResponse({"error": "no completed rounds to export"},
                                status_code=409)
        with store.lock(sid):
            ob = store.load_ob(state)
            segments = [
                {"points": seg.points.tolist()} for seg in trace_segments(ob)
            ]
            history = []
            for n in range(1, state.rounds + 1):
                rdir = state.round_dir(n)
                history.append({
                    "round": n,
                    "scribbles": json.loads((rdir / "scribbles.json").read_text()),
                    "ob_pixels": int(store.load_ob(state, n).sum()),
                })
            buf = io.BytesIO()
            with zipfile.ZipFile(buf, "w", zipfile.ZIP_DEFLATED) as zf:
                zf.writestr("ob.png", mask_png_bytes(ob))
                zf.writestr("segments.json", json.dumps({"segments": segments}))
                zf.writestr("log.json", json.dumps({
                    "id": state.id, "predictor": state.predictor,
                    "rounds": history,
                }))
        return Response(buf.getvalue(), media_type="application/zip",
                        headers={"Content-Disposition":
                                 f'attachment; filename="{sid}_export.zip"'})

    return app
