"""Command-line entry points: corpus generation, training, evaluation,
region analysis, and the HTTP service."""

from __future__ import annotations

import sys
from pathlib import Path

import click

from .analyzer import AnalysisRequest, analyze, annotate
from .audio import decode_wav, resample_linear, WORKING_SAMPLE_RATE
from .cnn import CnnConfig
from .corpus import SyntheticCorpusConfig, generate_synthetic_corpus
from .dataset import read_manifest
from .dsp import MelConfig, StftConfig
from .errors import AvraError
from .evaluate import render_text
from .modelio import load_model, save_cnn, save_svm
from .pngio import rgb_to_png_bytes
from .pipeline import evaluate_model, run_cnn_training, run_svm_training
from .report import write_epoch_report, write_eval_report
from .svm import SvmTrainConfig

_seed_option = click.option(
    "--seed", type=int, default=0, envvar="AVRA_SEED", show_default=True,
    help="Global seed (falls back to AVRA_SEED).",
)


def _mel_options(f):
    f = click.option("--fmax", type=float, default=20000.0, show_default=True)(f)
    f = click.option("--fmin", type=float, default=0.0, show_default=True)(f)
    f = click.option("--gain-db", type=float, default=20.0, show_default=True)(f)
    f = click.option("--range-db", type=float, default=80.0, show_default=True)(f)
    f = click.option("--n-mels", type=int, default=128, show_default=True)(f)
    f = click.option("--fft-size", type=int, default=2048, show_default=True)(f)
    f = click.option("--hop", type=int, default=512, show_default=True)(f)
    return f


def _build_configs(fft_size, hop, n_mels, fmin, fmax, gain_db, range_db):
    stft = StftConfig(fft_size=fft_size, hop=hop)
    mel = MelConfig(n_mels=n_mels, f_min=fmin, f_max=fmax, gain_db=gain_db, range_db=range_db)
    return stft, mel


@click.group()
def main():
    """Vocal register analysis toolkit."""


@main.command("gen-corpus")
@click.option("--per-class", type=int, default=100, show_default=True)
@click.option("--out", "out_dir", type=click.Path(path_type=Path), required=True)
@click.option("--clip-seconds", type=float, default=None,
              help="Clip length; defaults to one model window (~1.78 s).")
@click.option("--wavs/--no-wavs", default=False, help="Also write the source WAV clips.")
@_mel_options
@_seed_option
def cmd_gen_corpus(per_class, out_dir, clip_seconds, wavs, seed, **mel_kwargs):
    """Generate the deterministic synthetic register corpus."""
    stft, mel = _build_configs(**mel_kwargs)
    cfg = SyntheticCorpusConfig(
        per_class=per_class, seed=seed, clip_seconds=clip_seconds, stft=stft, mel=mel
    )
    manifest = generate_synthetic_corpus(cfg, out_dir, write_wavs=wavs)
    click.echo(f"wrote {len(manifest.entries)} images under {out_dir}")


@main.command("train")
@click.option("--model-kind", type=click.Choice(["svm", "cnn"]), required=True)
@click.option("--manifest", type=click.Path(exists=True, path_type=Path), required=True)
@click.option("--out", "out_dir", type=click.Path(path_type=Path), required=True)
@click.option("--c", "c_value", type=float, default=2.5e-6, show_default=True,
              help="SVM regularization strength.")
@click.option("--tolerance", type=float, default=1e-4, show_default=True)
@click.option("--max-epochs", type=int, default=1000, show_default=True,
              help="SVM solver pass limit.")
@click.option("--epochs", type=int, default=6, show_default=True, help="CNN training epochs.")
@click.option("--lr", type=float, default=0.01, show_default=True)
@click.option("--momentum", type=float, default=0.9, show_default=True)
@click.option("--batch-size", type=int, default=32, show_default=True)
@_seed_option
def cmd_train(model_kind, manifest, out_dir, c_value, tolerance, max_epochs,
              epochs, lr, momentum, batch_size, seed):
    """Train a classifier on a corpus manifest and evaluate the held-out split."""
    mf = read_manifest(manifest, split_seed=seed)
    root = manifest.parent
    out_dir.mkdir(parents=True, exist_ok=True)

    if model_kind == "svm":
        cfg = SvmTrainConfig(C=c_value, max_epochs=max_epochs, tolerance=tolerance, seed=seed)
        outcome = run_svm_training(mf, root, cfg, split_seed=seed)
        save_svm(outcome.model, out_dir / "model.avra")
    else:
        cfg = CnnConfig(
            learning_rate=lr, momentum=momentum, batch_size=batch_size, epochs=epochs, seed=seed
        )
        outcome = run_cnn_training(mf, root, cfg, split_seed=seed)
        save_cnn(outcome.model, out_dir / "model.avra")
        write_epoch_report(outcome.epochs, out_dir)

    write_eval_report(outcome.report, out_dir)
    counts = outcome.counts
    click.echo(
        f"trained {model_kind} on {counts.n_train_augmented} samples "
        f"({counts.n_train_original} originals x6), tested on {counts.n_test}; "
        f"test accuracy {outcome.report.accuracy:.3f}"
    )
    click.echo(f"model and reports written to {out_dir}")


@main.command("eval")
@click.option("--model", "model_path", type=click.Path(exists=True, path_type=Path), required=True)
@click.option("--manifest", type=click.Path(exists=True, path_type=Path), required=True)
@click.option("--out", "out_dir", type=click.Path(path_type=Path), default=None)
def cmd_eval(model_path, manifest, out_dir):
    """Evaluate a saved model against every image in a manifest."""
    model = load_model(model_path)
    mf = read_manifest(manifest)
    report = evaluate_model(model, mf, manifest.parent)
    click.echo(render_text(report), nl=False)
    if out_dir is not None:
        write_eval_report(report, out_dir)
        click.echo(f"reports written to {out_dir}")


@main.command("analyze")
@click.option("--in", "wav_path", type=click.Path(exists=True, path_type=Path), required=True)
@click.option("--model", "model_path", type=click.Path(exists=True, path_type=Path), required=True)
@click.option("--start", type=float, default=0.0, show_default=True)
@click.option("--end", type=float, default=None)
@click.option("--out", "out_path", type=click.Path(path_type=Path), required=True)
@_mel_options
def cmd_analyze(wav_path, model_path, start, end, out_path, **mel_kwargs):
    """Label a WAV selection every 10 spectrogram columns; writes the
    annotated PNG plus a .ticks.txt beside it."""
    stft, mel = _build_configs(**mel_kwargs)
    model = load_model(model_path)
    buf = decode_wav(wav_path.read_bytes())
    if buf.sample_rate != WORKING_SAMPLE_RATE:
        buf = resample_linear(buf, WORKING_SAMPLE_RATE)
    request = AnalysisRequest(buffer=buf, start_s=start, end_s=end, stft=stft, mel=mel)
    result = analyze(request, model)

    out_path.parent.mkdir(parents=True, exist_ok=True)
    out_path.write_bytes(rgb_to_png_bytes(annotate(result)))
    ticks_path = out_path.with_suffix(".ticks.txt")
    ticks_path.write_text("\n".join(result.tick_lines()) + "\n")
    for line in result.tick_lines():
        click.echo(line)
    click.echo(f"annotated image: {out_path}; ticks: {ticks_path}")


@main.command("serve")
@click.option("--listen", default="127.0.0.1:8000", show_default=True)
@click.option("--svm", "svm_path", type=click.Path(exists=True, path_type=Path), default=None)
@click.option("--cnn", "cnn_path", type=click.Path(exists=True, path_type=Path), default=None)
@click.option("--capacity", type=int, default=32, show_default=True,
              help="Session store size (LRU).")
def cmd_serve(listen, svm_path, cnn_path, capacity):
    """Serve the HTTP analysis API (models are loaded once at startup)."""
    import uvicorn

    from .modelio import load_cnn, load_svm
    from .service import create_app

    svm_model = load_svm(svm_path) if svm_path else None
    cnn_model = load_cnn(cnn_path) if cnn_path else None
    app = create_app(svm_model=svm_model, cnn_model=cnn_model, capacity=capacity)
    host, _, port = listen.rpartition(":")
    uvicorn.run(app, host=host or "127.0.0.1", port=int(port))


def run():
    """Entry point: usage errors exit 2 (click), runtime errors exit 1."""
    try:
        main()
    except (AvraError, ValueError, OSError) as err:
        click.echo(f"error: {err}", err=True)
        sys.exit(1)


if __name__ == "__main__":
    run()
