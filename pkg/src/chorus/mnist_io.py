"""IDX (MNIST container) parsing, validation and serialization.

Only the canonical 28x28 grayscale layout is accepted. Files may be
gzip-compressed; this is detected by the 0x1F 0x8B prefix.
"""

from __future__ import annotations

import gzip
import struct
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

IMAGE_MAGIC = 0x00000803
LABEL_MAGIC = 0x00000801
ROWS = 28
COLS = 28


class IdxError(ValueError):
    """Malformed IDX byte stream."""


@dataclass(frozen=True)
class LabeledSet:
    """Paired images and labels for one split.

    images: (n, 28, 28) uint8, labels: (n,) uint8 with values in [0, 9].
    """

    images: np.ndarray
    labels: np.ndarray
    split: str = field(default="train")

    def __post_init__(self):
        if len(self.images) != len(self.labels):
            raise IdxError(
                f"image/label count mismatch: {len(self.images)} vs {len(self.labels)}"
            )
        if self.split not in ("train", "test"):
            raise ValueError(f"unknown split {self.split!r}")
        self.images.setflags(write=False)
        self.labels.setflags(write=False)

    def __len__(self) -> int:
        return len(self.labels)


def _maybe_decompress(data: bytes) -> bytes:
    if data[:2] == b"\x1f\x8b":
        return gzip.decompress(data)
    return data


def parse_idx_images(data: bytes) -> np.ndarray:
    """Parse an IDX image file into a (n, 28, 28) uint8 array."""
    data = _maybe_decompress(data)
    if len(data) < 16:
        raise IdxError(f"image header truncated: {len(data)} bytes")
    magic, count, rows, cols = struct.unpack(">IIII", data[:16])
    if magic != IMAGE_MAGIC:
        raise IdxError(f"bad image magic 0x{magic:08x}, expected 0x{IMAGE_MAGIC:08x}")
    if rows != ROWS or cols != COLS:
        raise IdxError(f"unsupported image dimensions {rows}x{cols}, expected 28x28")
    expected = 16 + count * ROWS * COLS
    if len(data) != expected:
        raise IdxError(f"image payload length {len(data)}, expected {expected}")
    pixels = np.frombuffer(data, dtype=np.uint8, offset=16)
    return pixels.reshape(count, ROWS, COLS).copy()


def parse_idx_labels(data: bytes) -> np.ndarray:
    """Parse an IDX label file into a (n,) uint8 array of digits."""
    data = _maybe_decompress(data)
    if len(data) < 8:
        raise IdxError(f"label header truncated: {len(data)} bytes")
    magic, count = struct.unpack(">II", data[:8])
    if magic != LABEL_MAGIC:
        raise IdxError(f"bad label magic 0x{magic:08x}, expected 0x{LABEL_MAGIC:08x}")
    expected = 8 + count
    if len(data) != expected:
        raise IdxError(f"label payload length {len(data)}, expected {expected}")
    labels = np.frombuffer(data, dtype=np.uint8, offset=8).copy()
    if count and labels.max() > 9:
        bad = int(np.argmax(labels > 9))
        raise IdxError(f"label {labels[bad]} at index {bad} out of range [0, 9]")
    return labels


def images_to_idx(images: np.ndarray) -> bytes:
    """Serialize a (n, 28, 28) uint8 array back to IDX bytes."""
    n = len(images)
    header = struct.pack(">IIII", IMAGE_MAGIC, n, ROWS, COLS)
    return header + np.ascontiguousarray(images, dtype=np.uint8).tobytes()


def labels_to_idx(labels: np.ndarray) -> bytes:
    header = struct.pack(">II", LABEL_MAGIC, len(labels))
    return header + np.ascontiguousarray(labels, dtype=np.uint8).tobytes()


def _read(path) -> bytes:
    try:
        return Path(path).read_bytes()
    except OSError as exc:
        raise IdxError(f"cannot read {path}: {exc}") from exc


def load_split(image_path, label_path, split: str) -> LabeledSet:
    try:
        images = parse_idx_images(_read(image_path))
    except IdxError as exc:
        raise IdxError(f"{image_path}: {exc}") from exc
    try:
        labels = parse_idx_labels(_read(label_path))
    except IdxError as exc:
        raise IdxError(f"{label_path}: {exc}") from exc
    if len(images) != len(labels):
        raise IdxError(
            f"{image_path} has {len(images)} images but {label_path} has "
            f"{len(labels)} labels"
        )
    return LabeledSet(images=images, labels=labels, split=split)


def load_dataset(
    train_image_path, train_label_path, test_image_path, test_label_path
) -> tuple[LabeledSet, LabeledSet]:
    """Load the train and test splits from four IDX files (optionally .gz)."""
    train = load_split(train_image_path, train_label_path, "train")
    test = load_split(test_image_path, test_label_path, "test")
    return train, test
