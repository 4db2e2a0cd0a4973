"""Render evaluation reports and training curves to text and figure files."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .evaluate import CLASS_NAMES, EvalReport, render_kv, render_text

# savefig metadata is pinned so repeated runs produce byte-identical PNGs
_PNG_META = {"Software": "avra"}


def write_eval_report(report: EvalReport, out_dir: str | Path) -> list[Path]:
    """Write report.txt, report.kv, and confusion.png under out_dir."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    txt = out_dir / "report.txt"
    kv = out_dir / "report.kv"
    txt.write_text(render_text(report))
    kv.write_text(render_kv(report))
    fig_path = out_dir / "confusion.png"
    save_confusion_figure(report, fig_path)
    return [txt, kv, fig_path]


def save_confusion_figure(report: EvalReport, path: str | Path) -> None:
    counts = report.confusion.counts
    fig, ax = plt.subplots(figsize=(5, 4.2))
    im = ax.imshow(counts, cmap="Blues")
    ax.set_xticks(range(len(CLASS_NAMES)), CLASS_NAMES)
    ax.set_yticks(range(len(CLASS_NAMES)), CLASS_NAMES)
    ax.set_xlabel("Predicted")
    ax.set_ylabel("Actual")
    threshold = counts.max() / 2 if counts.max() else 0.5
    for i in range(counts.shape[0]):
        for j in range(counts.shape[1]):
            color = "white" if counts[i, j] > threshold else "black"
            ax.text(j, i, str(int(counts[i, j])), ha="center", va="center", color=color)
    fig.colorbar(im, ax=ax)
    ax.set_title(f"Accuracy {report.accuracy:.2f}")
    fig.tight_layout()
    fig.savefig(path, metadata=_PNG_META)
    plt.close(fig)


def write_epoch_report(epochs, out_dir: str | Path) -> list[Path]:
    """Write epochs.txt, epochs.kv, and loss_curve.png for CNN training stats."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    header = (
        f"{'Epoch':>5}{'TrainLoss':>11}{'Min':>9}{'Max':>9}{'ValLoss':>9}{'ValAcc':>8}"
    )
    rows = [header]
    kv_lines = []
    for e in epochs:
        rows.append(
            f"{e.epoch:>5}{e.train_loss:>11.6f}{e.train_loss_min:>9.6f}"
            f"{e.train_loss_max:>9.6f}{e.val_loss:>9.6f}{e.val_accuracy:>8.3f}"
        )
        kv_lines += [
            f"epoch.{e.epoch}.train_loss={e.train_loss:.6f}",
            f"epoch.{e.epoch}.train_loss_min={e.train_loss_min:.6f}",
            f"epoch.{e.epoch}.train_loss_max={e.train_loss_max:.6f}",
            f"epoch.{e.epoch}.val_loss={e.val_loss:.6f}",
            f"epoch.{e.epoch}.val_accuracy={e.val_accuracy:.6f}",
        ]
    txt = out_dir / "epochs.txt"
    kv = out_dir / "epochs.kv"
    txt.write_text("\n".join(rows) + "\n")
    kv.write_text("\n".join(kv_lines) + "\n")

    fig_path = out_dir / "loss_curve.png"
    xs = [e.epoch for e in epochs]
    fig, ax = plt.subplots(figsize=(5.5, 4))
    ax.plot(xs, [e.train_loss for e in epochs], marker="o", label="train loss")
    ax.plot(xs, [e.val_loss for e in epochs], marker="s", label="validation loss")
    ax2 = ax.twinx()
    ax2.plot(
        xs, [e.val_accuracy for e in epochs], marker="^", color="tab:green", label="val accuracy"
    )
    ax2.set_ylim(0, 1.05)
    ax2.set_ylabel("validation accuracy")
    ax.set_xlabel("epoch")
    ax.set_ylabel("loss")
    ax.set_xticks(xs)
    handles, labels = ax.get_legend_handles_labels()
    h2, l2 = ax2.get_legend_handles_labels()
    ax.legend(handles + h2, labels + l2, loc="center right")
    fig.tight_layout()
    fig.savefig(fig_path, metadata=_PNG_META)
    plt.close(fig)
    return [txt, kv, fig_path]
