"""HTTP facade for the companion UI: upload audio, fetch spectrogram tiles,
and request sliding-window analyses.

Models are injected once at app construction and never swapped, so request
handling can share them freely across threads. Uploaded buffers live in a
bounded LRU session store.
"""

from __future__ import annotations

import hashlib
import threading
import uuid
from collections import OrderedDict
from dataclasses import dataclass

from fastapi import FastAPI, Request, Response
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from .analyzer import AnalysisRequest, analyze, annotate
from .audio import AudioBuffer, decode_wav, resample_linear, WORKING_SAMPLE_RATE
from .dsp import MelConfig, SpectrogramImage, StftConfig, render_mel_spectrogram
from .errors import DecodeError, SelectionError
from .pngio import rgb_to_png_bytes, to_png_bytes

MAX_UPLOAD_BYTES = 50 * 1024 * 1024


class LruStore:
    """Thread-safe id -> value map with least-recently-used eviction."""

    def __init__(self, capacity: int):
        if capacity < 1:
            raise ValueError("capacity must be >= 1")
        self.capacity = capacity
        self._items: OrderedDict = OrderedDict()
        self._lock = threading.Lock()

    def put(self, key, value):
        with self._lock:
            self._items[key] = value
            self._items.move_to_end(key)
            while len(self._items) > self.capacity:
                self._items.popitem(last=False)

    def get(self, key):
        with self._lock:
            if key not in self._items:
                return None
            self._items.move_to_end(key)
            return self._items[key]

    def __len__(self):
        with self._lock:
            return len(self._items)


@dataclass
class Session:
    buffer: AudioBuffer
    spectrogram: SpectrogramImage  # full-clip render at native columns


def create_app(
    svm_model=None,
    cnn_model=None,
    capacity: int = 32,
    max_upload_bytes: int = MAX_UPLOAD_BYTES,
    stft: StftConfig = StftConfig(),
    mel: MelConfig = MelConfig(),
) -> FastAPI:
    app = FastAPI(title="avra", docs_url=None, redoc_url=None)
    # the browser UI is served as static files from elsewhere
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"]
    )
    sessions = LruStore(capacity)
    analyses = LruStore(capacity)
    models = {"svm": svm_model, "cnn": cnn_model}

    def error(status: int, message: str) -> JSONResponse:
        return JSONResponse({"error": message}, status_code=status)

    @app.post("/audio")
    async def upload_audio(request: Request):
        body = await request.body()
        if len(body) > max_upload_bytes:
            return error(413, f"upload exceeds {max_upload_bytes} bytes")
        try:
            buf = decode_wav(body)
        except DecodeError as exc:
            return error(415, f"cannot decode WAV body: {exc}")
        if buf.sample_rate != WORKING_SAMPLE_RATE:
            buf = resample_linear(buf, WORKING_SAMPLE_RATE)
        if len(buf.samples) == 0:
            return error(415, "audio is empty after decoding")
        audio_id = uuid.uuid4().hex
        spec = render_mel_spectrogram(buf, stft, mel)
        sessions.put(audio_id, Session(buffer=buf, spectrogram=spec))
        return {
            "id": audio_id,
            "duration_s": buf.duration_s,
            "sample_rate": buf.sample_rate,
            "spectrogram_width": spec.width,
            "spectrogram_height": spec.height,
        }

    def resolve_range(session: Session, start_s, end_s):
        duration = session.buffer.duration_s
        start = 0.0 if start_s is None else float(start_s)
        end = duration if end_s is None else float(end_s)
        if not (0 <= start < end <= duration + 1e-9):
            raise SelectionError(f"bad range [{start}, {end}] for {duration:.3f} s clip")
        return start, end

    @app.get("/audio/{audio_id}/spectrogram")
    def get_spectrogram(audio_id: str, start_s: float | None = None, end_s: float | None = None):
        session = sessions.get(audio_id)
        if session is None:
            return error(404, f"unknown audio id {audio_id}")
        try:
            start, end = resolve_range(session, start_s, end_s)
        except SelectionError as exc:
            return error(400, str(exc))
        rate = session.buffer.sample_rate
        lo, hi = int(round(start * rate)), int(round(end * rate))
        segment = AudioBuffer(session.buffer.samples[lo:hi], rate)
        spec = render_mel_spectrogram(segment, stft, mel)
        return Response(
            content=to_png_bytes(spec),
            media_type="image/png",
            headers={
                "X-Spectrogram-Width": str(spec.width),
                "X-Spectrogram-Height": str(spec.height),
            },
        )

    @app.post("/analyze")
    async def run_analysis(request: Request):
        payload = await request.json()
        audio_id = payload.get("id")
        model_kind = payload.get("model", "svm")
        session = sessions.get(audio_id)
        if session is None:
            return error(404, f"unknown audio id {audio_id}")
        if model_kind not in models:
            return error(400, f"model must be one of {sorted(models)}")
        model = models[model_kind]
        if model is None:
            return error(409, f"{model_kind} model not loaded")
        try:
            start, end = resolve_range(session, payload.get("start_s"), payload.get("end_s"))
            result = analyze(
                AnalysisRequest(
                    buffer=session.buffer, start_s=start, end_s=end, stft=stft, mel=mel
                ),
                model,
            )
        except SelectionError as exc:
            return error(400, str(exc))

        key = hashlib.sha256(
            f"{audio_id}:{start:.9f}:{end:.9f}:{model_kind}".encode()
        ).hexdigest()[:24]
        analyses.put(key, rgb_to_png_bytes(annotate(result)))
        return {
            "id": audio_id,
            "model": model_kind,
            "start_s": start,
            "end_s": end,
            "width": result.spectrogram.width,
            "ticks": [
                {"x": t.x, "label": int(t.label), "confidence": t.confidence}
                for t in result.ticks
            ],
            "tick_lines": result.tick_lines(),
            "shift_markers": list(result.shift_markers),
            "annotated_png": f"/analyses/{key}.png",
        }

    @app.get("/analyses/{key}.png")
    def get_annotated(key: str):
        png = analyses.get(key)
        if png is None:
            return error(404, "no such analysis (it may have been evicted)")
        return Response(content=png, media_type="image/png")

    return app
