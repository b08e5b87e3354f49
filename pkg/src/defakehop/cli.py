"""Command-line surface: train, predict, eval, params, gen-synth.

Exit codes: 0 ok, 2 input error, 3 data error, 4 model error.
"""
import functools
import json
import sys
import time

import click
import numpy as np

from . import store, synth
from .config import PipelineConfig, load_config
from .ensemble import REGIONS, auc
from .errors import DataError, DefakeHopError
from .manifest import load_frames, load_manifest
from .pipeline import predict_frames, train_model


def _handle_errors(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except DefakeHopError as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(exc.exit_code)

    return wrapper


def _get_config(config_path):
    return load_config(config_path) if config_path else PipelineConfig()


def _check_train_regions(manifest_path):
    entries = [e for e in load_manifest(manifest_path) if e.split == "train"]
    present = {e.region for e in entries}
    missing = [r for r in REGIONS if r not in present]
    if missing:
        raise DataError(
            f"train split is missing region(s): {', '.join(missing)}"
        )


@click.group()
def main():
    """Light-weight deepfake patch classifier."""


@main.command()
@click.option("--manifest", required=True, type=click.Path(), help="Dataset manifest (JSONL).")
@click.option("--config", "config_path", type=click.Path(), help="key=value config file.")
@click.option("--out", "-o", "out_model", required=True, type=click.Path(), help="Output model file (DFHM).")
@click.option("--workers", default=1, show_default=True, help="Worker threads for patch transforms.")
@_handle_errors
def train(manifest, config_path, out_model, workers):
    """Train a model from the manifest's train split."""
    cfg = _get_config(config_path)
    _check_train_regions(manifest)
    t0 = time.perf_counter()
    frames, n_dropped = load_frames(manifest, "train", drop_incomplete=True)
    click.echo(f"loaded {len(frames)} training frames"
               + (f" ({n_dropped} incomplete frames dropped)" if n_dropped else ""))
    model = train_model(frames, cfg, workers=workers, log=click.echo)
    store.save(model, out_model)
    click.echo(f"model written to {out_model} "
               f"({time.perf_counter() - t0:.1f}s total)")


def _score(model_path, manifest, split, workers):
    model = store.load(model_path)
    frames, _ = load_frames(manifest, split, drop_incomplete=False)
    return predict_frames(model, frames, workers=workers)


def _write_scores(path, videos, ordered, probs, per_frame):
    with open(path, "w", encoding="utf-8") as fh:
        for vs in videos:
            fh.write(json.dumps({
                "video_id": vs.video_id,
                "video_prob": vs.video_prob,
                "frame_count": len(vs.frame_probs),
            }, sort_keys=True) + "\n")
        if per_frame:
            for fr, p in zip(ordered, probs):
                fh.write(json.dumps({
                    "video_id": fr.video_id,
                    "frame_index": fr.frame_index,
                    "frame_prob": float(p),
                }, sort_keys=True) + "\n")


@main.command()
@click.option("--model", "model_path", required=True, type=click.Path())
@click.option("--manifest", required=True, type=click.Path())
@click.option("--out", "-o", "out_scores", required=True, type=click.Path(), help="Output scores (JSONL).")
@click.option("--split", default="test", show_default=True)
@click.option("--per-frame", is_flag=True, help="Also emit one line per frame.")
@click.option("--workers", default=1, show_default=True)
@_handle_errors
def predict(model_path, manifest, out_scores, split, per_frame, workers):
    """Score videos in a manifest split with a trained model."""
    videos, ordered, probs = _score(model_path, manifest, split, workers)
    _write_scores(out_scores, videos, ordered, probs, per_frame)
    click.echo(f"scored {len(videos)} videos ({len(ordered)} frames) "
               f"-> {out_scores}")


@main.command()
@click.option("--model", "model_path", required=True, type=click.Path())
@click.option("--manifest", required=True, type=click.Path())
@click.option("--out", "-o", "out_metrics", type=click.Path(), help="Write the metrics JSON here too.")
@click.option("--split", default="test", show_default=True)
@click.option("--workers", default=1, show_default=True)
@_handle_errors
def eval(model_path, manifest, out_metrics, split, workers):
    """Frame-level and video-level AUC on a manifest split."""
    videos, ordered, probs = _score(model_path, manifest, split, workers)
    frame_labels = np.asarray([fr.label for fr in ordered])
    metrics = {
        "frame_auc": auc(probs, frame_labels),
        "video_auc": auc([v.video_prob for v in videos],
                         [v.label for v in videos]),
        "n_videos": len(videos),
        "n_frames": len(ordered),
    }
    text = json.dumps(metrics, sort_keys=True)
    click.echo(text)
    if out_metrics:
        with open(out_metrics, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")


@main.command()
@click.option("--model", "model_path", type=click.Path(), help="Report counts of a trained model.")
@click.option("--paper-upper-bound", is_flag=True,
              help="Report the upper-bound budget implied by the default caps.")
@click.option("--config", "config_path", type=click.Path())
@_handle_errors
def params(model_path, paper_upper_bound, config_path):
    """Parameter-count report."""
    if not model_path and not paper_upper_bound:
        raise click.UsageError("pass --model and/or --paper-upper-bound")
    if paper_upper_bound:
        report = store.paper_upper_bound_report(_get_config(config_path))
        click.echo("Parameter budget (upper-bound mode)")
        for name, count in report["rows"]:
            click.echo(f"  {name:<22} {count:>8,}")
        click.echo(f"  {'Total':<22} {report['total']:>8,}")
        click.echo(
            "  note: the Hop-2 spatial PCA is budgeted as 49 x 25 "
            "coefficients; the 90% energy target alone can keep up to ~30."
        )
    if model_path:
        report = store.model_report(store.load(model_path))
        click.echo("Trained model parameter counts (actual / full-shape)")
        for region, rows in report["per_region"].items():
            click.echo(f"  region {region}:")
            for name, actual, full in rows:
                extra = f" / {full:,}" if full is not None else ""
                click.echo(f"    {name:<22} {actual:>8,}{extra}")
        fa, ff = report["final_booster"]
        click.echo(f"  {'Final booster':<24} {fa:>8,} / {ff:,}")
        click.echo(f"  {'Total (actual)':<24} {report['total_actual']:>8,}")


@main.command("gen-synth")
@click.option("--out", "-o", "out_dir", required=True, type=click.Path())
@click.option("--videos", default=250, show_default=True)
@click.option("--test-videos", default=50, show_default=True)
@click.option("--frames", default=10, show_default=True)
@click.option("--amplitude", default=synth.CALIBRATED_AMPLITUDE, show_default=True,
              help="Artifact amplitude; 0 makes the classes indistinguishable.")
@click.option("--noise-sigma", default=0.05, show_default=True)
@click.option("--seed", default=0, show_default=True)
@_handle_errors
def gen_synth(out_dir, videos, test_videos, frames, amplitude, noise_sigma, seed):
    """Generate a synthetic benchmark dataset."""
    cfg = synth.SynthConfig(
        n_videos=videos,
        n_test_videos=test_videos,
        frames_per_video=frames,
        artifact_amplitude=amplitude,
        noise_sigma=noise_sigma,
        seed=seed,
    )
    manifest_path = synth.generate(cfg, out_dir)
    click.echo(f"wrote {videos} videos x {frames} frames x {len(REGIONS)} regions "
               f"-> {manifest_path}")


if __name__ == "__main__":
    main()
