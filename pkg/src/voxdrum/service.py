"""HTTP + streaming service behind the browser UI.

Sessions are in-memory (this is a studio tool, not a multi-tenant
platform); each session serializes its own train/transcribe transitions
behind a lock, and a retrain swaps the model reference atomically so no
request ever sees a half-trained model. Model documents can optionally
be persisted under a data directory.

Wire formats: JSON everywhere except the SMF download (binary) and the
live stream, whose chunks carry a 9-byte big-endian header
(4-byte sequence, 4-byte payload length, 1-byte final flag) followed by
signed 16-bit little-endian mono PCM at 44100 Hz.
"""

from __future__ import annotations

import struct
import threading
import time
import uuid
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from fastapi import FastAPI, File, Form, HTTPException, Query, UploadFile, WebSocket
from fastapi.responses import PlainTextResponse, Response
from starlette.websockets import WebSocketDisconnect

from .audio import AudioError, load_wav_bytes
from .features import FEATURE_NAMES, FeatureConfig
from .midi import MidiError, MidiMapping, write_smf
from .onset import OnsetParams
from .pipeline import (
    ClassSpec,
    OnsetCountError,
    PipelineError,
    Transcription,
    UserModel,
    save_model,
    train_user_model,
    transcribe,
)
from .streaming import StreamingTranscriber

CHUNK_HEADER = struct.Struct(">IIB")


@dataclass
class Session:
    id: str
    created_at: float = field(default_factory=time.time)
    model: UserModel | None = None
    model_document: str | None = None
    last_transcription: Transcription | None = None
    lock: threading.Lock = field(default_factory=threading.Lock)

    @property
    def state(self) -> str:
        return "trained" if self.model is not None else "empty"


def create_app(data_dir: str | None = None, ui_dir: str | None = None) -> FastAPI:
    app = FastAPI(title="voxdrum service")
    sessions: dict[str, Session] = {}
    sessions_lock = threading.Lock()
    data_path = Path(data_dir) if data_dir else None
    if data_path:
        data_path.mkdir(parents=True, exist_ok=True)

    def get_session(session_id: str) -> Session:
        with sessions_lock:
            session = sessions.get(session_id)
        if session is None:
            raise HTTPException(status_code=404, detail="unknown session")
        return session

    @app.post("/api/sessions")
    def create_session():
        session = Session(id=uuid.uuid4().hex)
        with sessions_lock:
            sessions[session.id] = session
        return {"id": session.id}

    @app.post("/api/sessions/{session_id}/train")
    def train(session_id: str, audio: UploadFile = File(...), classes: str = Form(...),
              k: int = Form(1)):
        session = get_session(session_id)
        try:
            spec = ClassSpec.parse(classes)
            clip = load_wav_bytes(audio.file.read())
        except (PipelineError, AudioError) as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from exc
        with session.lock:
            try:
                model = train_user_model(clip, spec, FeatureConfig(), OnsetParams(), k)
            except OnsetCountError as exc:
                raise HTTPException(status_code=409, detail={
                    "error": "onset count mismatch",
                    "onsets_found": exc.found,
                    "expected": exc.expected,
                }) from exc
            except PipelineError as exc:
                raise HTTPException(status_code=400, detail=str(exc)) from exc
            document = save_model(model)
            session.model = model
            session.model_document = document
            session.last_transcription = None
            if data_path:
                (data_path / f"{session.id}.json").write_text(document)
        return {
            "onsets_found": spec.total,
            "expected": spec.total,
            "selected_features": [FEATURE_NAMES[i] for i in model.mask],
            "training_accuracy": model.training_accuracy,
        }

    @app.post("/api/sessions/{session_id}/transcribe")
    def transcribe_clip(session_id: str, audio: UploadFile = File(...)):
        session = get_session(session_id)
        model = session.model
        if model is None:
            raise HTTPException(status_code=409, detail="session is not trained yet")
        try:
            clip = load_wav_bytes(audio.file.read())
        except AudioError as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from exc
        with session.lock:
            result = transcribe(clip, model)
            session.last_transcription = result
        return {
            "events": [{"time": e.time, "label": e.label, "velocity": e.velocity}
                       for e in result.events],
            "duration": result.duration,
        }

    @app.get("/api/sessions/{session_id}/midi")
    def download_midi(session_id: str, tempo: float = Query(120.0), ppq: int = Query(480)):
        session = get_session(session_id)
        result = session.last_transcription
        if result is None:
            raise HTTPException(status_code=409, detail="no transcription available yet")
        try:
            data = write_smf(result, MidiMapping.for_classes(result.class_names), tempo, ppq)
        except MidiError as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from exc
        return Response(content=data, media_type="audio/midi",
                        headers={"Content-Disposition": "attachment; filename=transcription.mid"})

    @app.get("/api/sessions/{session_id}/model")
    def model_document(session_id: str):
        session = get_session(session_id)
        if session.model_document is None:
            raise HTTPException(status_code=409, detail="session is not trained yet")
        return PlainTextResponse(session.model_document, media_type="application/json")

    @app.websocket("/api/sessions/{session_id}/live")
    async def live(websocket: WebSocket, session_id: str):
        await websocket.accept()
        with sessions_lock:
            session = sessions.get(session_id)
        if session is None:
            await websocket.send_json({"type": "error", "detail": "unknown session"})
            await websocket.close(code=1008)
            return
        model = session.model
        if model is None:
            await websocket.send_json({"type": "error", "detail": "session is not trained yet"})
            await websocket.close(code=1008)
            return
        stream = StreamingTranscriber(model)
        expected_seq = 0
        try:
            while True:
                data = await websocket.receive_bytes()
                if len(data) < CHUNK_HEADER.size:
                    await websocket.send_json({"type": "error", "detail": "short chunk header"})
                    await websocket.close(code=1003)
                    return
                seq, length, final = CHUNK_HEADER.unpack_from(data)
                payload = data[CHUNK_HEADER.size:]
                if len(payload) != length or length % 2:
                    await websocket.send_json({"type": "error", "detail": "bad payload length"})
                    await websocket.close(code=1003)
                    return
                if seq != expected_seq:
                    await websocket.send_json({"type": "error",
                                               "detail": f"expected chunk {expected_seq}, got {seq}"})
                    await websocket.close(code=1003)
                    return
                expected_seq += 1
                samples = np.frombuffer(payload, dtype="<i2").astype(np.float64) / 32768.0
                for event in stream.push(samples):
                    await websocket.send_json({"type": "event", "time": event.time,
                                               "label": event.label, "velocity": event.velocity})
                if final:
                    for event in stream.finalize():
                        await websocket.send_json({"type": "event", "time": event.time,
                                                   "label": event.label, "velocity": event.velocity})
                    result = stream.transcription()
                    with session.lock:
                        session.last_transcription = result
                    await websocket.send_json({"type": "done",
                                               "event_count": len(result.events),
                                               "duration": result.duration})
                    await websocket.close()
                    return
        except WebSocketDisconnect:
            return

    if ui_dir:
        from fastapi.staticfiles import StaticFiles

        if not Path(ui_dir).is_dir():
            raise ValueError(f"ui directory does not exist: {ui_dir}")
        app.mount("/", StaticFiles(directory=ui_dir, html=True), name="ui")

    return app
