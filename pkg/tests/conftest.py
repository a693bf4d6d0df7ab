import os
from pathlib import Path

import numpy as np
import pytest

from chorus.mnist_io import LabeledSet

# Canonical MNIST is not bundled; tests that need it look here and skip
# when the files are absent.
MNIST_DIR = Path(os.environ.get("CHORUS_MNIST_DIR", "/root/pkg/data/mnist"))

MNIST_FILES = (
    "train-images-idx3-ubyte",
    "train-labels-idx1-ubyte",
    "t10k-images-idx3-ubyte",
    "t10k-labels-idx1-ubyte",
)


def mnist_paths():
    paths = []
    for stem in MNIST_FILES:
        for candidate in (MNIST_DIR / stem, MNIST_DIR / (stem + ".gz")):
            if candidate.exists():
                paths.append(candidate)
                break
    return paths if len(paths) == 4 else None


requires_mnist = pytest.mark.skipif(
    mnist_paths() is None,
    reason=f"canonical MNIST files not found under {MNIST_DIR} "
    "(set CHORUS_MNIST_DIR to enable)",
)


def _upsampled_digits():
    """28x28 stand-in dataset built from sklearn's 8x8 digits.

    Used wherever real MNIST would be too slow or is unavailable; keeps the
    full 784-pixel interface of the pipeline.
    """
    from sklearn.datasets import load_digits

    digits = load_digits()
    images = np.kron(digits.images, np.ones((3, 3)))  # 8x8 -> 24x24
    images = np.pad(images, ((0, 0), (2, 2), (2, 2)))
    images = np.clip(images * 15.0, 0, 255).astype(np.uint8)
    labels = digits.target.astype(np.uint8)
    rng = np.random.default_rng(1234)
    order = rng.permutation(len(images))
    return images[order], labels[order]


@pytest.fixture(scope="session")
def digit_sets():
    """(train, test) LabeledSets of synthetic 28x28 digits: 1500 / 297."""
    images, labels = _upsampled_digits()
    train = LabeledSet(images=images[:1500].copy(), labels=labels[:1500].copy(),
                       split="train")
    test = LabeledSet(images=images[1500:].copy(), labels=labels[1500:].copy(),
                      split="test")
    return train, test


@pytest.fixture(scope="session")
def small_digit_sets(digit_sets):
    """Smaller (train, test) pair for fast campaign/server tests: 600 / 200."""
    train, test = digit_sets
    small_train = LabeledSet(images=train.images[:600].copy(),
                             labels=train.labels[:600].copy(), split="train")
    small_test = LabeledSet(images=test.images[:200].copy(),
                            labels=test.labels[:200].copy(), split="test")
    return small_train, small_test


@pytest.fixture(scope="session")
def small_campaign(small_digit_sets, tmp_path_factory):
    """A trained six-model campaign shared by rashomon/server/CLI tests."""
    from chorus.campaign import load_registry, run_campaign
    from chorus.outliers import IsolationForestParams, partition_by_label

    train, test = small_digit_sets
    out_dir = tmp_path_factory.mktemp("campaign")
    params = IsolationForestParams(tree_count=25, subsample_size=64, seed=7)
    partition = partition_by_label(train, params)
    entries = run_campaign(6, master_seed=99, train_set=train,
                           partition=partition, test_set=test,
                           out_dir=out_dir, parallelism=1, max_epochs=8)
    return {
        "out_dir": out_dir,
        "entries": entries,
        "registry_path": out_dir / "registry.ndjson",
        "partition": partition,
        "train": train,
        "test": test,
    }
