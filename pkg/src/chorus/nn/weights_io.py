"""Bit-exact weights file format.

Layout: ASCII magic "AISPECW1"; little-endian u32 layer_count; per layer
u32 rows, u32 cols, rows*cols float32 row-major, u32 bias_len, bias
float32; trailing u32 CRC32 of everything before it.
"""

from __future__ import annotations

import struct
import zlib
from pathlib import Path

import numpy as np

from .network import Architecture, TrainedModel

MAGIC = b"AISPECW1"


class WeightsFormatError(ValueError):
    """Corrupt or malformed weights file."""


def weights_to_bytes(model: TrainedModel) -> bytes:
    parts = [MAGIC, struct.pack("<I", len(model.weights))]
    for w, b in zip(model.weights, model.biases):
        rows, cols = w.shape
        parts.append(struct.pack("<II", rows, cols))
        parts.append(np.ascontiguousarray(w, dtype="<f4").tobytes())
        parts.append(struct.pack("<I", len(b)))
        parts.append(np.ascontiguousarray(b, dtype="<f4").tobytes())
    body = b"".join(parts)
    return body + struct.pack("<I", zlib.crc32(body))


def save_weights(model: TrainedModel, path) -> None:
    Path(path).write_bytes(weights_to_bytes(model))


def weights_from_bytes(data: bytes, architecture: Architecture | None = None) -> TrainedModel:
    if len(data) < len(MAGIC) + 8:
        raise WeightsFormatError(f"file too short: {len(data)} bytes")
    if data[: len(MAGIC)] != MAGIC:
        raise WeightsFormatError("bad magic")
    stored_crc = struct.unpack("<I", data[-4:])[0]
    if zlib.crc32(data[:-4]) != stored_crc:
        raise WeightsFormatError("CRC mismatch")
    off = len(MAGIC)
    (layer_count,) = struct.unpack_from("<I", data, off)
    off += 4
    weights, biases = [], []
    try:
        for _ in range(layer_count):
            rows, cols = struct.unpack_from("<II", data, off)
            off += 8
            w = np.frombuffer(data, dtype="<f4", count=rows * cols, offset=off)
            weights.append(w.reshape(rows, cols).copy())
            off += 4 * rows * cols
            (bias_len,) = struct.unpack_from("<I", data, off)
            off += 4
            biases.append(np.frombuffer(data, dtype="<f4", count=bias_len, offset=off).copy())
            off += 4 * bias_len
    except (struct.error, ValueError) as exc:
        raise WeightsFormatError(f"truncated payload: {exc}") from exc
    if off != len(data) - 4:
        raise WeightsFormatError(
            f"length mismatch: header implies {off + 4} bytes, file has {len(data)}"
        )
    for i in range(layer_count - 1):
        if weights[i].shape[1] != weights[i + 1].shape[0]:
            raise WeightsFormatError(f"layer shapes do not chain at layer {i}")
    if architecture is None:
        architecture = Architecture(
            hidden_layers=max(1, layer_count - 1),
            input_dim=weights[0].shape[0],
            hidden_width=weights[0].shape[1] if layer_count > 1 else 128,
            output_dim=weights[-1].shape[1],
        )
    return TrainedModel(architecture=architecture, weights=weights, biases=biases)


def load_weights(path, architecture: Architecture | None = None) -> TrainedModel:
    """Load a weights file; the format carries shapes only, so callers that
    know the activation/dropout settings should pass the architecture."""
    try:
        data = Path(path).read_bytes()
    except OSError as exc:
        raise WeightsFormatError(f"cannot read {path}: {exc}") from exc
    try:
        return weights_from_bytes(data, architecture)
    except WeightsFormatError as exc:
        raise WeightsFormatError(f"{path}: {exc}") from exc
