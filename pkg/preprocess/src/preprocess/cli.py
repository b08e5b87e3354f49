"""Command-line surface: extract.

Exit codes: 0 ok, 2 input error, 3 data error.
"""
import functools
import sys

import click

from .errors import PreprocessError
from .extract import extract_video
from .landmarks import ColorMarkerBackend

_BACKENDS = {"color-marker": ColorMarkerBackend}


def _handle_errors(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except PreprocessError as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(exc.exit_code)

    return wrapper


@click.group()
def main():
    """Turn videos into defakehop patch datasets."""


@main.command()
@click.option("--video", "video_path", required=True, type=click.Path(),
              help="Input video file.")
@click.option("--video-id", required=True, help="Video id for the manifest.")
@click.option("--label", required=True, type=int, help="0 real, 1 fake.")
@click.option("--out", "out_dir", required=True, type=click.Path(),
              help="Dataset directory (created if missing).")
@click.option("--sample-rate", default=1, show_default=True,
              help="Take every Nth frame.")
@click.option("--split", default="train", show_default=True,
              type=click.Choice(["train", "test"]))
@click.option("--backend", "backend_name", default="color-marker",
              show_default=True, type=click.Choice(sorted(_BACKENDS)),
              help="68-point landmark backend.")
@_handle_errors
def extract(video_path, video_id, label, out_dir, sample_rate, split,
            backend_name):
    """Extract aligned region patches from one video into a dataset."""
    backend = _BACKENDS[backend_name]()
    result = extract_video(
        video_path, out_dir, video_id, label, backend,
        sample_rate=sample_rate, split=split,
        log=lambda msg: click.echo(msg, err=True),
    )
    click.echo(
        f"{video_id}: {result.n_frames_written} frames extracted "
        f"({len(result.skipped_frames)} skipped of "
        f"{result.n_frames_sampled} sampled) -> {result.manifest_path}")


if __name__ == "__main__":
    main()
