"""Prediction matrix over the test set, Rashomon-set membership and
per-sample label groupings for the dashboard."""

from __future__ import annotations

import json
import struct
import zlib
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .campaign import ModelMetadata
from .mnist_io import LabeledSet
from .nn import Architecture, evaluate, load_weights

MATRIX_MAGIC = b"AISPECP1"


class MatrixFormatError(ValueError):
    """Corrupt or malformed prediction-matrix file."""


class CampaignCorrupt(RuntimeError):
    """A registry entry references weights that cannot be loaded."""


@dataclass(frozen=True)
class PredictionMatrix:
    model_ids: tuple[str, ...]
    labels: np.ndarray       # (n_models, n_samples) uint8
    confidences: np.ndarray  # (n_models, n_samples) float32

    def __post_init__(self):
        if self.labels.shape != self.confidences.shape:
            raise ValueError("label and confidence grids differ in shape")
        if self.labels.shape[0] != len(self.model_ids):
            raise ValueError("grid rows do not match model_ids")

    @property
    def sample_count(self) -> int:
        return self.labels.shape[1]

    def row(self, model_id: str) -> int:
        try:
            return self.model_ids.index(model_id)
        except ValueError:
            raise CampaignCorrupt(f"model {model_id!r} not in prediction matrix") from None


@dataclass(frozen=True)
class RashomonSet:
    member_ids: tuple[str, ...]
    epsilon: float
    floor: float
    reference_accuracy: float

    def __len__(self) -> int:
        return len(self.member_ids)


def build_prediction_matrix(entries: list[ModelMetadata], test_set: LabeledSet,
                            base_dir) -> PredictionMatrix:
    """Evaluate every non-failed registry model on the test set, in registry order."""
    base = Path(base_dir)
    ids, label_rows, conf_rows = [], [], []
    for meta in entries:
        if meta.status != "ok":
            continue
        arch = Architecture(
            hidden_layers=meta.config.hidden_layers,
            activation=meta.config.activation,
            dropout=meta.config.dropout,
        )
        try:
            model = load_weights(base / meta.weights_path, arch)
        except Exception as exc:
            raise CampaignCorrupt(f"model {meta.config.id}: {exc}") from exc
        _, preds, confs = evaluate(model, test_set.images, test_set.labels)
        ids.append(meta.config.id)
        label_rows.append(preds)
        conf_rows.append(confs)
    return PredictionMatrix(
        model_ids=tuple(ids),
        labels=np.stack(label_rows).astype(np.uint8),
        confidences=np.stack(conf_rows).astype(np.float32),
    )


def matrix_to_bytes(matrix: PredictionMatrix) -> bytes:
    n_models, n_samples = matrix.labels.shape
    body = (
        MATRIX_MAGIC
        + struct.pack("<II", n_models, n_samples)
        + np.ascontiguousarray(matrix.labels, dtype=np.uint8).tobytes()
        + np.ascontiguousarray(matrix.confidences, dtype="<f4").tobytes()
    )
    return body + struct.pack("<I", zlib.crc32(body))


def save_matrix(matrix: PredictionMatrix, path) -> None:
    """Write the binary grid plus the companion JSON row index."""
    path = Path(path)
    path.write_bytes(matrix_to_bytes(matrix))
    index_path = path.with_suffix(path.suffix + ".index.json")
    index_path.write_text(json.dumps({"model_ids": list(matrix.model_ids)}))


def matrix_from_bytes(data: bytes, model_ids: list[str]) -> PredictionMatrix:
    if len(data) < len(MATRIX_MAGIC) + 12:
        raise MatrixFormatError("file too short")
    if data[: len(MATRIX_MAGIC)] != MATRIX_MAGIC:
        raise MatrixFormatError("bad magic")
    (stored_crc,) = struct.unpack("<I", data[-4:])
    if zlib.crc32(data[:-4]) != stored_crc:
        raise MatrixFormatError("CRC mismatch")
    off = len(MATRIX_MAGIC)
    n_models, n_samples = struct.unpack_from("<II", data, off)
    off += 8
    expected = off + n_models * n_samples * 5 + 4
    if len(data) != expected:
        raise MatrixFormatError(f"length mismatch: expected {expected}, got {len(data)}")
    labels = np.frombuffer(data, dtype=np.uint8, count=n_models * n_samples, offset=off)
    off += n_models * n_samples
    confs = np.frombuffer(data, dtype="<f4", count=n_models * n_samples, offset=off)
    if len(model_ids) != n_models:
        raise MatrixFormatError(
            f"index lists {len(model_ids)} models, file has {n_models}"
        )
    return PredictionMatrix(
        model_ids=tuple(model_ids),
        labels=labels.reshape(n_models, n_samples).copy(),
        confidences=confs.reshape(n_models, n_samples).copy(),
    )


def load_matrix(path) -> PredictionMatrix:
    path = Path(path)
    index_path = path.with_suffix(path.suffix + ".index.json")
    try:
        index = json.loads(index_path.read_text())
    except OSError as exc:
        raise MatrixFormatError(f"missing companion index {index_path}: {exc}") from exc
    try:
        return matrix_from_bytes(path.read_bytes(), index["model_ids"])
    except MatrixFormatError as exc:
        raise MatrixFormatError(f"{path}: {exc}") from exc


def identify_rashomon_set(entries: list[ModelMetadata], epsilon: float,
                          floor: float) -> RashomonSet:
    """Keep models with accuracy >= max(best - epsilon, floor)."""
    if epsilon < 0:
        raise ValueError("epsilon must be >= 0")
    scored = [(m.config.id, m.test_accuracy) for m in entries
              if m.status == "ok" and m.test_accuracy is not None]
    if not scored:
        raise ValueError("registry holds no evaluated models")
    best = max(acc for _, acc in scored)
    threshold = max(best - epsilon, floor)
    members = tuple(mid for mid, acc in scored if acc >= threshold)
    return RashomonSet(member_ids=members, epsilon=epsilon, floor=floor,
                       reference_accuracy=best)


def group_by_label(matrix: PredictionMatrix, sample_index: int,
                   rset: RashomonSet) -> dict[int, list[tuple[str, float]]]:
    """Assign each member to the bar of its predicted label for one sample.

    Bars are ordered by descending confidence, ties by model id; every label
    0..9 is present, possibly empty.
    """
    if not 0 <= sample_index < matrix.sample_count:
        raise IndexError(f"sample index {sample_index} out of range")
    groups: dict[int, list[tuple[str, float]]] = {label: [] for label in range(10)}
    for mid in rset.member_ids:
        row = matrix.row(mid)
        label = int(matrix.labels[row, sample_index])
        conf = float(matrix.confidences[row, sample_index])
        groups[label].append((mid, conf))
    for label in groups:
        groups[label].sort(key=lambda item: (-item[1], item[0]))
    return groups


def disagreement_report(matrix: PredictionMatrix,
                        rset: RashomonSet) -> list[tuple[int, float]]:
    """(sample index, largest-bar share) pairs, most contested first."""
    if len(rset) == 0:
        return []
    rows = [matrix.row(mid) for mid in rset.member_ids]
    labels = matrix.labels[rows]
    ratios = []
    for s in range(matrix.sample_count):
        counts = np.bincount(labels[:, s], minlength=10)
        ratios.append((s, float(counts.max() / len(rows))))
    ratios.sort(key=lambda item: (item[1], item[0]))
    return ratios
