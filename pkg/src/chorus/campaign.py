"""Sampling, training and bookkeeping for a population of varied models.

Each model gets its own config drawn uniformly from the per-parameter
value sets (with the no-training-data combination rejected and redrawn),
its own training dataset assembled from the outlier partition, and an
isolated seed so parallel scheduling cannot change results. Metadata is
journaled to a newline-delimited JSON registry.
"""

from __future__ import annotations

import concurrent.futures
import hashlib
import json
import math
import os
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from .augment import (
    CONTRAST_FACTORS,
    PROPORTIONS,
    ROTATIONS,
    TRANSLATIONS,
    AugmentationSpec,
    apply_spec,
)
from .mnist_io import LabeledSet
from .nn import (
    BATCH_SIZES,
    ACTIVATION_KINDS,
    OPTIMIZER_KINDS,
    Architecture,
    TrainingDiverged,
    TrainingPlan,
    evaluate,
    save_weights,
    train,
)
from .outliers import OutlierPartition

POOL_PCTS = (0.0, 0.2, 0.4, 0.6, 0.8, 1.0)
HIDDEN_LAYER_CHOICES = (1, 2, 3)
MAX_REDRAWS = 1000

REGISTRY_FIELDS = (
    "id", "seed", "outlier_pct", "typical_pct", "hidden_layers", "dropout",
    "activation", "batch_size", "optimizer", "use_validation", "dx", "dy",
    "rotation_deg", "contrast_factor", "contrast_proportion",
    "inversion_proportion", "test_accuracy", "epochs_trained", "weights_path",
    "weights_hash", "status", "created_at",
)


class RegistryError(ValueError):
    """Registry entry fails schema or hash validation."""


@dataclass(frozen=True)
class ModelConfig:
    id: str
    seed: int
    outlier_pct: float
    typical_pct: float
    hidden_layers: int
    dropout: bool
    activation: str
    batch_size: int
    optimizer: str
    use_validation: bool
    augmentation: AugmentationSpec

    def __post_init__(self):
        if self.outlier_pct == 0.0 and self.typical_pct == 0.0:
            raise ValueError("outlier_pct and typical_pct cannot both be 0")
        if self.outlier_pct not in POOL_PCTS or self.typical_pct not in POOL_PCTS:
            raise ValueError("pool percentages must come from the 0..1 step-0.2 grid")
        if self.hidden_layers not in HIDDEN_LAYER_CHOICES:
            raise ValueError(f"hidden_layers {self.hidden_layers} not allowed")
        if self.activation not in ACTIVATION_KINDS:
            raise ValueError(f"unknown activation {self.activation!r}")
        if self.batch_size not in BATCH_SIZES:
            raise ValueError(f"batch_size {self.batch_size} not allowed")
        if self.optimizer not in OPTIMIZER_KINDS:
            raise ValueError(f"unknown optimizer {self.optimizer!r}")

    def value_key(self) -> tuple:
        """Everything except id/seed, for duplicate detection."""
        return (
            self.outlier_pct, self.typical_pct, self.hidden_layers, self.dropout,
            self.activation, self.batch_size, self.optimizer, self.use_validation,
            self.augmentation,
        )


@dataclass
class ModelMetadata:
    config: ModelConfig
    test_accuracy: float | None = None
    epochs_trained: int = 0
    weights_path: str = ""
    weights_hash: str = ""
    status: str = "ok"
    created_at: str = ""


@dataclass(frozen=True)
class AugmentedDataset:
    images: np.ndarray
    labels: np.ndarray
    provenance: str = ""


def _draw_config(rng: np.random.Generator, config_id: str, seed: int) -> ModelConfig:
    for _ in range(MAX_REDRAWS):
        outlier_pct = float(rng.choice(POOL_PCTS))
        typical_pct = float(rng.choice(POOL_PCTS))
        hidden_layers = int(rng.choice(HIDDEN_LAYER_CHOICES))
        dropout = bool(rng.integers(2))
        activation = str(rng.choice(ACTIVATION_KINDS))
        batch_size = int(rng.choice(BATCH_SIZES))
        optimizer = str(rng.choice(OPTIMIZER_KINDS))
        use_validation = bool(rng.integers(2))
        aug = AugmentationSpec(
            dx=int(rng.choice(TRANSLATIONS)),
            dy=int(rng.choice(TRANSLATIONS)),
            rotation_deg=int(rng.choice(ROTATIONS)),
            contrast_factor=float(rng.choice(CONTRAST_FACTORS)),
            contrast_proportion=float(rng.choice(PROPORTIONS)),
            inversion_proportion=float(rng.choice(PROPORTIONS)),
        )
        if outlier_pct == 0.0 and typical_pct == 0.0:
            continue  # no training data; redraw the whole set
        return ModelConfig(
            id=config_id, seed=seed, outlier_pct=outlier_pct,
            typical_pct=typical_pct, hidden_layers=hidden_layers,
            dropout=dropout, activation=activation, batch_size=batch_size,
            optimizer=optimizer, use_validation=use_validation, augmentation=aug,
        )
    raise RuntimeError("config rejection loop exceeded 1000 redraws")


def sample_config(seed: int, config_id: str = "m000") -> ModelConfig:
    rng = np.random.default_rng(seed)
    return _draw_config(rng, config_id, seed)


def _round_half_up(x: float) -> int:
    return int(math.floor(x + 0.5))


def build_training_set(config: ModelConfig, train_set: LabeledSet,
                       partition: OutlierPartition) -> AugmentedDataset:
    """Mix per-class outlier/typical pools, shuffle, then augment."""
    seq = np.random.SeedSequence([config.seed, 0xDA7A])
    pick_rng, shuffle_rng, aug_rng = (np.random.default_rng(s) for s in seq.spawn(3))
    chosen = []
    for cls in partition.classes():
        out_pool = partition.outliers[cls]
        typ_pool = partition.typicals[cls]
        k_out = _round_half_up(config.outlier_pct * len(out_pool))
        k_typ = _round_half_up(config.typical_pct * len(typ_pool))
        if k_out:
            chosen.append(pick_rng.choice(out_pool, size=k_out, replace=False))
        if k_typ:
            chosen.append(pick_rng.choice(typ_pool, size=k_typ, replace=False))
    if not chosen:
        raise ValueError(f"config {config.id} selects no training data")
    idx = np.concatenate(chosen)
    shuffle_rng.shuffle(idx)
    images = train_set.images[idx].copy()
    labels = train_set.labels[idx].copy()
    aug_seed = int(aug_rng.integers(0, 2 ** 63))
    images = apply_spec(images, config.augmentation, aug_seed)
    return AugmentedDataset(images=images, labels=labels, provenance=config.id)


# ---------------------------------------------------------------------------
# registry persistence (newline-delimited JSON)

def metadata_to_record(meta: ModelMetadata) -> dict:
    cfg, aug = meta.config, meta.config.augmentation
    return {
        "id": cfg.id, "seed": cfg.seed,
        "outlier_pct": cfg.outlier_pct, "typical_pct": cfg.typical_pct,
        "hidden_layers": cfg.hidden_layers, "dropout": cfg.dropout,
        "activation": cfg.activation, "batch_size": cfg.batch_size,
        "optimizer": cfg.optimizer, "use_validation": cfg.use_validation,
        "dx": aug.dx, "dy": aug.dy, "rotation_deg": aug.rotation_deg,
        "contrast_factor": aug.contrast_factor,
        "contrast_proportion": aug.contrast_proportion,
        "inversion_proportion": aug.inversion_proportion,
        "test_accuracy": meta.test_accuracy,
        "epochs_trained": meta.epochs_trained,
        "weights_path": meta.weights_path,
        "weights_hash": meta.weights_hash,
        "status": meta.status,
        "created_at": meta.created_at,
    }


def record_to_metadata(record: dict) -> ModelMetadata:
    missing = [f for f in REGISTRY_FIELDS if f not in record]
    if missing:
        raise RegistryError(f"entry {record.get('id', '?')!r} missing fields {missing}")
    aug = AugmentationSpec(
        dx=record["dx"], dy=record["dy"], rotation_deg=record["rotation_deg"],
        contrast_factor=record["contrast_factor"],
        contrast_proportion=record["contrast_proportion"],
        inversion_proportion=record["inversion_proportion"],
    )
    config = ModelConfig(
        id=record["id"], seed=record["seed"], outlier_pct=record["outlier_pct"],
        typical_pct=record["typical_pct"], hidden_layers=record["hidden_layers"],
        dropout=record["dropout"], activation=record["activation"],
        batch_size=record["batch_size"], optimizer=record["optimizer"],
        use_validation=record["use_validation"], augmentation=aug,
    )
    return ModelMetadata(
        config=config, test_accuracy=record["test_accuracy"],
        epochs_trained=record["epochs_trained"],
        weights_path=record["weights_path"], weights_hash=record["weights_hash"],
        status=record["status"], created_at=record["created_at"],
    )


def file_sha256(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def append_entry(path, meta: ModelMetadata) -> None:
    line = json.dumps(metadata_to_record(meta)) + "\n"
    with open(path, "a", encoding="utf-8") as fh:
        fh.write(line)
        fh.flush()
        os.fsync(fh.fileno())


def write_registry(path, entries: list[ModelMetadata]) -> None:
    """Atomic full rewrite (temp file + rename)."""
    tmp = Path(str(path) + ".tmp")
    with open(tmp, "w", encoding="utf-8") as fh:
        for meta in entries:
            fh.write(json.dumps(metadata_to_record(meta)) + "\n")
        fh.flush()
        os.fsync(fh.fileno())
    tmp.replace(path)


def load_registry(path, verify_hashes: bool = True) -> list[ModelMetadata]:
    """Parse and validate the registry; hash mismatches flag the entry corrupt."""
    entries = []
    base = Path(path).parent
    text = Path(path).read_text(encoding="utf-8") if Path(path).exists() else ""
    for line_no, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            record = json.loads(line)
        except json.JSONDecodeError as exc:
            raise RegistryError(f"{path}:{line_no}: invalid JSON: {exc}") from exc
        try:
            meta = record_to_metadata(record)
        except (RegistryError, ValueError, TypeError) as exc:
            raise RegistryError(f"{path}:{line_no}: {exc}") from exc
        if verify_hashes and meta.status == "ok" and meta.weights_path:
            wpath = base / meta.weights_path
            if not wpath.exists() or file_sha256(wpath) != meta.weights_hash:
                meta.status = "corrupt"
        entries.append(meta)
    return entries


# ---------------------------------------------------------------------------
# campaign orchestration

def derive_model_seed(master_seed: int, index: int) -> int:
    return int(np.random.SeedSequence(master_seed, spawn_key=(index,)).generate_state(1)[0])


def sample_campaign_configs(n: int, master_seed: int) -> list[ModelConfig]:
    """n distinct configs; duplicates by value are resampled with fresh seeds."""
    configs: list[ModelConfig] = []
    seen: set[tuple] = set()
    counter = 0
    while len(configs) < n:
        if counter > MAX_REDRAWS + n:
            raise RuntimeError("could not sample enough distinct configs")
        seed = derive_model_seed(master_seed, counter)
        counter += 1
        config = sample_config(seed, config_id=f"m{len(configs):04d}")
        if config.value_key() in seen:
            continue
        seen.add(config.value_key())
        configs.append(config)
    return configs


def train_one(config: ModelConfig, train_set: LabeledSet,
              partition: OutlierPartition, test_set: LabeledSet,
              out_dir, max_epochs: int = 100) -> ModelMetadata:
    """Train, evaluate and persist a single model; failures are recorded."""
    out_dir = Path(out_dir)
    created = datetime.now(timezone.utc).isoformat()
    try:
        dataset = build_training_set(config, train_set, partition)
        arch = Architecture(
            hidden_layers=config.hidden_layers,
            activation=config.activation,
            dropout=config.dropout,
        )
        plan = TrainingPlan(
            batch_size=config.batch_size,
            optimizer=config.optimizer,
            use_validation=config.use_validation,
            max_epochs=max_epochs,
            seed=config.seed,
        )
        model = train(arch, plan, dataset.images, dataset.labels)
        accuracy, _, _ = evaluate(model, test_set.images, test_set.labels)
    except (TrainingDiverged, FloatingPointError, ValueError) as exc:
        return ModelMetadata(config=config, status=f"failed: {exc}", created_at=created)
    weights_rel = f"weights/{config.id}.w1"
    weights_abs = out_dir / weights_rel
    weights_abs.parent.mkdir(parents=True, exist_ok=True)
    save_weights(model, weights_abs)
    return ModelMetadata(
        config=config,
        test_accuracy=accuracy,
        epochs_trained=model.epochs_trained,
        weights_path=weights_rel,
        weights_hash=file_sha256(weights_abs),
        created_at=created,
    )


def run_campaign(n: int, master_seed: int, train_set: LabeledSet,
                 partition: OutlierPartition, test_set: LabeledSet,
                 out_dir, parallelism: int = 1,
                 max_epochs: int = 100) -> list[ModelMetadata]:
    """Train n distinct sampled configs and journal metadata to the registry."""
    if n < 1:
        raise ValueError("n must be >= 1")
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    registry_path = out_dir / "registry.ndjson"
    configs = sample_campaign_configs(n, master_seed)

    results: dict[str, ModelMetadata] = {}
    if parallelism <= 1:
        for config in configs:
            meta = train_one(config, train_set, partition, test_set, out_dir,
                             max_epochs=max_epochs)
            results[config.id] = meta
            append_entry(registry_path, meta)
    else:
        with concurrent.futures.ProcessPoolExecutor(max_workers=parallelism) as pool:
            futures = {
                pool.submit(train_one, config, train_set, partition, test_set,
                            out_dir, max_epochs): config
                for config in configs
            }
            for future in concurrent.futures.as_completed(futures):
                meta = future.result()
                results[meta.config.id] = meta
                append_entry(registry_path, meta)

    ordered = [results[c.id] for c in configs]
    write_registry(registry_path, ordered)
    return ordered
