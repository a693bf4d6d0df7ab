"""HTTP service exposing samples, models, glyphs, Rashomon groupings,
live prediction and feedback capture to the dashboard."""

from __future__ import annotations

import base64
import binascii
import io
import json
import os
import threading
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path

import numpy as np
from fastapi import FastAPI, HTTPException, Request, Response
from PIL import Image

from .campaign import ModelMetadata, load_registry, metadata_to_record
from .glyph import map_features, render_svg
from .mnist_io import LabeledSet, load_split
from .nn import Architecture, TrainedModel, forward, load_weights
from .rashomon import (
    PredictionMatrix,
    RashomonSet,
    group_by_label,
    identify_rashomon_set,
    load_matrix,
)

VERDICTS = ("endorse", "reject", "unsure")


@dataclass(frozen=True)
class ServiceConfig:
    registry_path: str
    matrix_path: str
    test_image_path: str
    test_label_path: str
    feedback_path: str = "feedback.ndjson"
    epsilon: float = 0.05
    floor: float = 0.85
    host: str = "127.0.0.1"
    port: int = 8000

    def __post_init__(self):
        if not 1 <= self.port <= 65535:
            raise ValueError(f"port {self.port} out of range")


class _Journal:
    """Append-only newline-delimited JSON feedback log with one writer."""

    def __init__(self, path):
        self.path = Path(path)
        self._lock = threading.Lock()

    def append(self, record: dict) -> None:
        with self._lock:
            with open(self.path, "a", encoding="utf-8") as fh:
                fh.write(json.dumps(record) + "\n")
                fh.flush()
                os.fsync(fh.fileno())

    def records(self) -> list[dict]:
        if not self.path.exists():
            return []
        return [json.loads(line) for line in self.path.read_text().splitlines() if line.strip()]


def _png_base64(image: np.ndarray) -> str:
    buf = io.BytesIO()
    Image.fromarray(image, mode="L").save(buf, format="PNG")
    return base64.b64encode(buf.getvalue()).decode("ascii")


def create_app(config: ServiceConfig) -> FastAPI:
    base_dir = Path(config.registry_path).parent
    entries = load_registry(config.registry_path)
    by_id: dict[str, ModelMetadata] = {m.config.id: m for m in entries}
    matrix: PredictionMatrix = load_matrix(config.matrix_path)
    test_set: LabeledSet = load_split(config.test_image_path, config.test_label_path, "test")
    journal = _Journal(config.feedback_path)

    # loaded-model cache for live prediction; all healthy models stay resident
    models: dict[str, TrainedModel] = {}
    for meta in entries:
        if meta.status != "ok":
            continue
        arch = Architecture(
            hidden_layers=meta.config.hidden_layers,
            activation=meta.config.activation,
            dropout=meta.config.dropout,
        )
        models[meta.config.id] = load_weights(base_dir / meta.weights_path, arch)

    app = FastAPI(title="chorus")
    app.state.config = config
    app.state.journal = journal

    def rashomon(epsilon: float | None, floor: float | None) -> RashomonSet:
        return identify_rashomon_set(
            entries,
            config.epsilon if epsilon is None else epsilon,
            config.floor if floor is None else floor,
        )

    def groups_payload(rset, labels_for, conf_for) -> dict:
        groups = {str(label): [] for label in range(10)}
        for mid in rset.member_ids:
            label, conf = labels_for(mid), conf_for(mid)
            groups[str(label)].append({"model_id": mid, "confidence": conf})
        for bucket in groups.values():
            bucket.sort(key=lambda item: (-item["confidence"], item["model_id"]))
        return groups

    @app.get("/api/health")
    def health():
        return {"status": "ok"}

    @app.get("/api/models")
    def list_models():
        return [metadata_to_record(m) for m in entries]

    @app.get("/api/models/{model_id}")
    def get_model(model_id: str):
        if model_id not in by_id:
            raise HTTPException(status_code=404, detail=f"unknown model {model_id}")
        return metadata_to_record(by_id[model_id])

    @app.get("/api/models/{model_id}/glyph.svg")
    def get_glyph(model_id: str, confidence: float | None = None):
        if model_id not in by_id:
            raise HTTPException(status_code=404, detail=f"unknown model {model_id}")
        svg = render_svg(map_features(by_id[model_id], confidence))
        return Response(content=svg, media_type="image/svg+xml")

    @app.get("/api/rashomon")
    def get_rashomon(epsilon: float | None = None, floor: float | None = None):
        rset = rashomon(epsilon, floor)
        return {
            "members": list(rset.member_ids),
            "epsilon": rset.epsilon,
            "floor": rset.floor,
            "reference_accuracy": rset.reference_accuracy,
        }

    @app.get("/api/samples")
    def get_samples(offset: int = 0, limit: int = 20):
        if offset < 0 or limit < 0:
            raise HTTPException(status_code=400, detail="offset/limit must be >= 0")
        stop = min(offset + limit, len(test_set))
        samples = [
            {
                "index": i,
                "label": int(test_set.labels[i]),
                "png_base64": _png_base64(test_set.images[i]),
                "pixels": test_set.images[i].reshape(-1).tolist(),
            }
            for i in range(offset, stop)
        ]
        return {"total": len(test_set), "samples": samples}

    @app.get("/api/samples/{index}/groups")
    def get_sample_groups(index: int, epsilon: float | None = None,
                          floor: float | None = None):
        if not 0 <= index < matrix.sample_count:
            raise HTTPException(status_code=404, detail=f"unknown sample index {index}")
        rset = rashomon(epsilon, floor)
        grouped = group_by_label(matrix, index, rset)
        return {
            str(label): [
                {"model_id": mid, "confidence": conf} for mid, conf in bucket
            ]
            for label, bucket in grouped.items()
        }

    @app.post("/api/predict")
    async def predict(request: Request):
        try:
            body = json.loads(await request.body())
        except (json.JSONDecodeError, UnicodeDecodeError):
            raise HTTPException(status_code=400, detail="body must be JSON")
        if not isinstance(body, dict) or "image" not in body:
            raise HTTPException(status_code=400, detail="missing 'image' field")
        try:
            raw = base64.b64decode(body["image"], validate=True)
        except (binascii.Error, TypeError):
            raise HTTPException(status_code=400, detail="'image' is not valid base64")
        if len(raw) != 784:
            raise HTTPException(
                status_code=422, detail=f"image must be 784 bytes, got {len(raw)}"
            )
        image = np.frombuffer(raw, dtype=np.uint8).reshape(1, 784)
        rset = rashomon(None, None)
        predictions = {}
        for mid in rset.member_ids:
            probs = forward(models[mid], image)[0]
            predictions[mid] = (int(probs.argmax()), float(probs.max()))
        return groups_payload(
            rset,
            labels_for=lambda mid: predictions[mid][0],
            conf_for=lambda mid: predictions[mid][1],
        )

    @app.post("/api/feedback", status_code=201)
    async def feedback(request: Request):
        try:
            body = json.loads(await request.body())
        except (json.JSONDecodeError, UnicodeDecodeError):
            raise HTTPException(status_code=400, detail="body must be JSON")
        if not isinstance(body, dict):
            raise HTTPException(status_code=400, detail="body must be a JSON object")
        model_id = body.get("model_id")
        verdict = body.get("verdict")
        if model_id not in by_id:
            raise HTTPException(status_code=404, detail=f"unknown model {model_id}")
        if verdict not in VERDICTS:
            raise HTTPException(
                status_code=400, detail=f"verdict must be one of {VERDICTS}"
            )
        record = {
            "model_id": model_id,
            "sample_id": body.get("sample_id", "drawn"),
            "verdict": verdict,
            "note": str(body.get("note", "")),
            "timestamp": datetime.now(timezone.utc).isoformat(),
        }
        journal.append(record)
        return record

    return app
