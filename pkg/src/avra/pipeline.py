"""Training and evaluation recipes tying the dataset, SVM, and CNN together.

Augmentation happens after the stratified split and only on the training
side, so the test split stays leak-free.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import cnn as cnn_mod
from . import svm as svm_mod
from .cnn import CnnConfig, CnnModel, EpochStats
from .dataset import (
    DatasetManifest,
    RegisterLabel,
    augment,
    flatten,
    split_train_test,
    standardize,
)
from .dsp import SpectrogramImage
from .evaluate import EvalReport, confusion, metrics
from .pngio import read_png
from .svm import SvmModel, SvmTrainConfig


@dataclass(frozen=True)
class SplitCounts:
    n_original: int
    n_train_original: int
    n_train_augmented: int
    n_test: int


def load_manifest_images(
    manifest: DatasetManifest, root: str | Path
) -> tuple[list[SpectrogramImage], list[RegisterLabel]]:
    root = Path(root)
    images, labels = [], []
    for rel, label in manifest.entries:
        images.append(standardize(read_png(root / rel)))
        labels.append(label)
    return images, labels


def augment_training_set(images, labels):
    out_images, out_labels = [], []
    for img, label in zip(images, labels):
        for variant in augment(img):
            out_images.append(variant)
            out_labels.append(label)
    return out_images, out_labels


def feature_matrix(images) -> np.ndarray:
    return np.stack([flatten(img) for img in images])


def tensor_batch(images) -> np.ndarray:
    return np.stack([img.pixels[None] for img in images])


def _split_and_augment(manifest: DatasetManifest, root, split_seed: int):
    images, labels = load_manifest_images(manifest, root)
    train_idx, test_idx = split_train_test(images, labels, 0.8, seed=split_seed)
    train_images = [images[i] for i in train_idx]
    train_labels = [labels[i] for i in train_idx]
    test_images = [images[i] for i in test_idx]
    test_labels = [labels[i] for i in test_idx]
    aug_images, aug_labels = augment_training_set(train_images, train_labels)
    counts = SplitCounts(
        n_original=len(images),
        n_train_original=len(train_images),
        n_train_augmented=len(aug_images),
        n_test=len(test_images),
    )
    return aug_images, aug_labels, test_images, test_labels, counts


@dataclass
class SvmOutcome:
    model: SvmModel
    report: EvalReport
    counts: SplitCounts


def run_svm_training(
    manifest: DatasetManifest,
    root: str | Path,
    cfg: SvmTrainConfig = SvmTrainConfig(),
    split_seed: int = 0,
) -> SvmOutcome:
    aug_images, aug_labels, test_images, test_labels, counts = _split_and_augment(
        manifest, root, split_seed
    )
    X_train = feature_matrix(aug_images)
    model = svm_mod.train_one_vs_rest(X_train, aug_labels, cfg)
    report = evaluate_svm(model, test_images, test_labels)
    return SvmOutcome(model=model, report=report, counts=counts)


@dataclass
class CnnOutcome:
    model: CnnModel
    epochs: list[EpochStats]
    report: EvalReport
    counts: SplitCounts


def run_cnn_training(
    manifest: DatasetManifest,
    root: str | Path,
    cfg: CnnConfig = CnnConfig(),
    split_seed: int = 0,
) -> CnnOutcome:
    aug_images, aug_labels, test_images, test_labels, counts = _split_and_augment(
        manifest, root, split_seed
    )
    model = CnnModel(cfg)
    stats = cnn_mod.train(
        model,
        tensor_batch(aug_images),
        np.array([int(l) for l in aug_labels]),
        tensor_batch(test_images),
        np.array([int(l) for l in test_labels]),
        cfg,
    )
    report = evaluate_cnn(model, test_images, test_labels)
    return CnnOutcome(model=model, epochs=stats, report=report, counts=counts)


def evaluate_svm(model: SvmModel, images, labels) -> EvalReport:
    predicted = svm_mod.predict(model, feature_matrix(images))
    return metrics(confusion([int(l) for l in labels], predicted))


def evaluate_cnn(model: CnnModel, images, labels) -> EvalReport:
    predicted = cnn_mod.predict(model, tensor_batch(images))
    return metrics(confusion([int(l) for l in labels], predicted))


def evaluate_model(model, manifest: DatasetManifest, root: str | Path) -> EvalReport:
    images, labels = load_manifest_images(manifest, root)
    if isinstance(model, SvmModel):
        return evaluate_svm(model, images, labels)
    return evaluate_cnn(model, images, labels)
