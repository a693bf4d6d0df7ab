"""Command-line entry points: train a model population, identify Rashomon
sets, render glyphs, and serve the dashboard API."""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from .campaign import load_registry, run_campaign
from .glyph import map_features, render_svg
from .mnist_io import IdxError, load_dataset
from .outliers import IsolationForestParams, partition_by_label, save_partition
from .rashomon import build_prediction_matrix, identify_rashomon_set, save_matrix
from .server import ServiceConfig, create_app

_IMAGE_NAMES = ("train-images-idx3-ubyte", "t10k-images-idx3-ubyte")
_LABEL_NAMES = ("train-labels-idx1-ubyte", "t10k-labels-idx1-ubyte")


def _find_file(data_dir: Path, stem: str) -> Path:
    for candidate in (data_dir / stem, data_dir / (stem + ".gz")):
        if candidate.exists():
            return candidate
    click.echo(f"error: missing MNIST file {data_dir / stem}[.gz]", err=True)
    sys.exit(2)


def _load_data(data_dir: str):
    data_dir = Path(data_dir)
    paths = [
        _find_file(data_dir, _IMAGE_NAMES[0]),
        _find_file(data_dir, _LABEL_NAMES[0]),
        _find_file(data_dir, _IMAGE_NAMES[1]),
        _find_file(data_dir, _LABEL_NAMES[1]),
    ]
    try:
        return load_dataset(*paths)
    except IdxError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(2)


@click.group()
def main():
    """Model-multiplicity workbench."""


@main.command("train")
@click.option("--n", type=int, default=20, show_default=True, help="models to train")
@click.option("--seed", "master_seed", type=int, default=0, show_default=True)
@click.option("--data-dir", required=True, type=click.Path())
@click.option("--out-dir", required=True, type=click.Path())
@click.option("--parallelism", type=int, default=1, show_default=True)
@click.option("--subset", type=int, default=0,
              help="train on only the first N images (0 = all)")
def cli_train(n, master_seed, data_dir, out_dir, parallelism, subset):
    """Partition the training set by outlier score, then train N varied models."""
    train_set, test_set = _load_data(data_dir)
    if subset:
        from .mnist_io import LabeledSet
        train_set = LabeledSet(
            images=train_set.images[:subset].copy(),
            labels=train_set.labels[:subset].copy(),
            split="train",
        )
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    params = IsolationForestParams(seed=master_seed)
    click.echo(f"partitioning {len(train_set)} training images by outlier score...")
    partition = partition_by_label(train_set, params)
    save_partition(partition, params, out / "partition.json")
    click.echo(f"training {n} models (parallelism={parallelism})...")
    entries = run_campaign(n, master_seed, train_set, partition, test_set,
                           out, parallelism=parallelism)
    ok = [m for m in entries if m.status == "ok"]
    click.echo(f"done: {len(ok)}/{len(entries)} models trained; "
               f"registry at {out / 'registry.ndjson'}")


@main.command("rashomon")
@click.option("--registry", required=True, type=click.Path(exists=True))
@click.option("--data-dir", required=True, type=click.Path())
@click.option("--matrix-out", required=True, type=click.Path())
@click.option("--epsilon", type=float, default=0.05, show_default=True)
@click.option("--floor", type=float, default=0.85, show_default=True)
def cli_rashomon(registry, data_dir, matrix_out, epsilon, floor):
    """Build the prediction matrix and report Rashomon-set membership."""
    _, test_set = _load_data(data_dir)
    entries = load_registry(registry)
    matrix = build_prediction_matrix(entries, test_set, Path(registry).parent)
    save_matrix(matrix, matrix_out)
    rset = identify_rashomon_set(entries, epsilon, floor)
    accuracy = {m.config.id: m.test_accuracy for m in entries}
    if not rset.member_ids:
        click.echo("empty set: no model meets the accuracy bound")
    for mid in rset.member_ids:
        click.echo(f"{mid}\t{accuracy[mid]:.4f}")
    manifest = {
        "members": list(rset.member_ids),
        "epsilon": rset.epsilon,
        "floor": rset.floor,
        "reference_accuracy": rset.reference_accuracy,
    }
    manifest_path = Path(str(matrix_out) + ".rashomon.json")
    manifest_path.write_text(json.dumps(manifest, indent=2))
    click.echo(f"matrix at {matrix_out}, manifest at {manifest_path}")


@main.command("render")
@click.option("--registry", required=True, type=click.Path(exists=True))
@click.option("--model-id", required=True)
@click.option("--out", "out_path", required=True, type=click.Path())
def cli_render(registry, model_id, out_path):
    """Write one model's glyph as SVG (no confidence cheeks)."""
    entries = load_registry(registry, verify_hashes=False)
    match = [m for m in entries if m.config.id == model_id]
    if not match:
        click.echo(f"error: unknown model id {model_id}", err=True)
        sys.exit(3)
    Path(out_path).write_text(render_svg(map_features(match[0])))
    click.echo(f"wrote {out_path}")


@main.command("serve")
@click.option("--config", "config_path", type=click.Path(exists=True),
              help="JSON file with ServiceConfig fields")
@click.option("--registry", type=click.Path())
@click.option("--matrix", type=click.Path())
@click.option("--data-dir", type=click.Path())
@click.option("--feedback", type=click.Path(), default="feedback.ndjson")
@click.option("--epsilon", type=float, default=0.05, show_default=True)
@click.option("--floor", type=float, default=0.85, show_default=True)
@click.option("--port", type=int, default=8000, show_default=True)
@click.option("--host", default="127.0.0.1", show_default=True)
def cli_serve(config_path, registry, matrix, data_dir, feedback, epsilon,
              floor, port, host):
    """Serve the dashboard API over HTTP."""
    if config_path:
        config = ServiceConfig(**json.loads(Path(config_path).read_text()))
    else:
        if not (registry and matrix and data_dir):
            click.echo("error: --registry, --matrix and --data-dir are required "
                       "unless --config is given", err=True)
            sys.exit(2)
        data = Path(data_dir)
        config = ServiceConfig(
            registry_path=registry,
            matrix_path=matrix,
            test_image_path=str(_find_file(data, _IMAGE_NAMES[1])),
            test_label_path=str(_find_file(data, _LABEL_NAMES[1])),
            feedback_path=feedback,
            epsilon=epsilon,
            floor=floor,
            host=host,
            port=port,
        )
    import uvicorn

    uvicorn.run(create_app(config), host=config.host, port=config.port)


if __name__ == "__main__":
    main()
