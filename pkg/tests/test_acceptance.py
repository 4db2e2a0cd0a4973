"""Acceptance criteria, one test per criterion.

Run with `pytest tests/test_acceptance.py`; a PASS/FAIL line per criterion
is printed in the terminal summary. The corpus/training fixtures are
session-scoped, so "learning contract" cost is paid once.
"""

import io
import time

import numpy as np
import pytest
from fastapi.testclient import TestClient
from PIL import Image

from avra.analyzer import AnalysisRequest, analyze, label_run_lengths
from avra.audio import encode_wav
from avra.cnn import CnnConfig, CnnModel, Conv2d, Linear, MaxPool2x2, Relu, loss_softmax_ce
from avra.corpus import SyntheticCorpusConfig, synth_register_clip
from avra.dataset import (
    FEATURE_DIM,
    RegisterLabel,
    augment,
    flatten,
    hflip,
    reshape,
    split_train_test,
    standardize,
)
from avra.dsp import SpectrogramImage, fft
from avra.evaluate import ConfusionMatrix, metrics
from avra.modelio import load_cnn, load_svm, save_cnn, save_svm
from avra.service import create_app
from avra.svm import SvmTrainConfig, primal_objective, train_binary

from test_cnn import numeric_grad, rel_err
from test_eval import PUB_CONFUSION, PUB_METRICS
from test_svm import grid_min_objective

LN4 = float(np.log(4.0))

pytestmark = pytest.mark.acceptance


def test_table3_to_table2_oracle():
    """Published confusion matrix reproduces every published metric cell
    within +/-0.005, in under a second."""
    t0 = time.time()
    report = metrics(ConfusionMatrix(PUB_CONFUSION))
    for c in range(4):
        assert abs(report.precision[c] - PUB_METRICS["precision"][c]) <= 0.005
        assert abs(report.recall[c] - PUB_METRICS["recall"][c]) <= 0.005
        assert abs(report.f1[c] - PUB_METRICS["f1"][c]) <= 0.005
    assert abs(report.accuracy - PUB_METRICS["accuracy"]) <= 0.005
    assert time.time() - t0 < 1.0


def test_fft_correctness():
    """Radix-2 FFT matches a naive DFT within 1e-9 relative error for all
    power-of-two sizes 2..4096, in under 30 seconds."""
    t0 = time.time()
    rng = np.random.default_rng(2024)
    size = 2
    while size <= 4096:
        x = rng.normal(size=size) + 1j * rng.normal(size=size)
        got = fft(x)
        ks = np.arange(size)
        want = np.array([np.sum(x * np.exp(-2j * np.pi * k * ks / size)) for k in range(size)])
        rel = np.max(np.abs(got - want)) / np.max(np.abs(want))
        assert rel < 1e-9, f"size {size}: relative error {rel}"
        size *= 2
    assert time.time() - t0 < 30.0


def test_cnn_gradient_checks():
    """Analytic gradients match central finite differences (eps=1e-5) within
    1e-4 relative error for every layer and the composed network."""
    t0 = time.time()
    rng = np.random.default_rng(99)

    def check(layer, x):
        rand = np.random.default_rng(100)
        weight_r = rand.normal(size=layer.forward(x).shape)

        def objective():
            return float(np.sum(layer.forward(x) * weight_r))

        layer.forward(x)
        dx = layer.backward(weight_r)
        assert np.max(rel_err(dx, numeric_grad(objective, x))) < 1e-4
        if isinstance(layer, (Conv2d, Linear)):
            layer.forward(x)
            layer.backward(weight_r)
            aw, ab = layer.grad_weight.copy(), layer.grad_bias.copy()
            assert np.max(rel_err(aw, numeric_grad(objective, layer.weight))) < 1e-4
            assert np.max(rel_err(ab, numeric_grad(objective, layer.bias))) < 1e-4

    check(Conv2d(2, 3, 3, pad=1, rng=rng), rng.normal(size=(2, 2, 6, 7)))
    check(Linear(10, 5, rng=rng), rng.normal(size=(4, 10)))
    relu_in = rng.normal(size=(3, 4, 5))
    check(Relu(), np.where(np.abs(relu_in) < 0.1, 0.4, relu_in))
    pool_in = rng.normal(size=(2, 2, 6, 6)) + np.arange(144).reshape(2, 2, 6, 6) * 1e-3
    check(MaxPool2x2(), pool_in)

    # composed 3-conv / 2-fc network
    model = CnnModel(CnnConfig(conv_channels=(2, 3, 4), fc_hidden=8, input_shape=(1, 16, 20)))
    final = model.param_layers()[-1]
    final.weight += rng.normal(0, 0.3, final.weight.shape)
    final.bias += rng.normal(0, 0.3, final.bias.shape)
    x = rng.normal(size=(2, 1, 16, 20)) * 0.5
    labels = [0, 2]

    def net_objective():
        return loss_softmax_ce(model.forward(x), labels)[0]

    _, dlogits = loss_softmax_ce(model.forward(x), labels)
    model.backward(dlogits)
    for layer in model.param_layers():
        aw, ab = layer.grad_weight.copy(), layer.grad_bias.copy()
        assert np.max(rel_err(aw, numeric_grad(net_objective, layer.weight))) < 1e-4
        assert np.max(rel_err(ab, numeric_grad(net_objective, layer.bias))) < 1e-4
    assert time.time() - t0 < 60.0


def test_svm_solver_oracle():
    """Dual coordinate descent matches a brute-force grid oracle within 1e-3
    on micro-problems, and its objective decreases monotonically."""
    problems = [
        (np.array([-1.0, 0.5, 2.0]), np.array([-1.0, -1.0, 1.0]), 1.0),
        (np.array([-2.0, 0.0, 0.4, 1.5]), np.array([-1.0, -1.0, 1.0, 1.0]), 0.5),
        (np.array([0.0, 1.0, 3.0, 4.0, 6.0]), np.array([-1.0, -1.0, -1.0, 1.0, 1.0]), 2.0),
        (np.array([-0.5, 0.1, 0.9]), np.array([-1.0, 1.0, 1.0]), 3.0),
    ]
    for x1d, y, c in problems:
        costs = np.full(len(y), c)
        labels = ((y + 1) // 2).astype(int)
        w, b, trace = train_binary(
            x1d.reshape(-1, 1), labels, 1, SvmTrainConfig(C=c, tolerance=1e-8)
        )
        solver_obj = primal_objective(w, b, x1d.reshape(-1, 1), y, costs)
        oracle_obj, _, _ = grid_min_objective(x1d, y, costs)
        assert solver_obj == pytest.approx(oracle_obj, abs=1e-3)
        assert np.all(np.diff(trace) <= 1e-9)


@pytest.mark.slow
def test_synthetic_corpus_learning_contract(acceptance_corpus, acceptance_svm, acceptance_cnn):
    """With default configs and seed on the per_class=100 corpus: SVM test
    accuracy >= 0.95; CNN validation accuracy >= 0.95 within 6 epochs;
    CNN epoch-1 mean loss within 0.15 of ln(4); training loss strictly
    decreasing; total corpus+training wall time under 10 minutes."""
    _, _, _, gen_seconds = acceptance_corpus
    svm_outcome, svm_seconds = acceptance_svm
    cnn_outcome, cnn_seconds = acceptance_cnn

    assert svm_outcome.report.accuracy >= 0.95
    epochs = cnn_outcome.epochs
    assert len(epochs) <= 6
    assert epochs[-1].val_accuracy >= 0.95
    assert abs(epochs[0].train_loss - LN4) <= 0.15
    losses = [e.train_loss for e in epochs]
    assert all(b < a for a, b in zip(losses, losses[1:]))
    assert gen_seconds + svm_seconds + cnn_seconds < 600.0


def test_pipeline_invariants(small_svm, small_cnn, tmp_path):
    """Feature length 19712; augmentation multiplicity 6 with label
    preservation; hflip involution; standardize idempotence; stratified
    split within +/-1 per class; bit-exact model round-trips."""
    rng = np.random.default_rng(5)
    img = SpectrogramImage(rng.uniform(size=(128, 154)))

    assert FEATURE_DIM == 19712
    assert flatten(img).shape == (19712,)
    np.testing.assert_array_equal(reshape(flatten(img)).pixels, img.pixels)

    variants = augment(img)
    assert len(variants) == 6
    for v in variants:
        assert v.pixels.min() >= 0.0 and v.pixels.max() <= 1.0

    np.testing.assert_array_equal(hflip(hflip(img)).pixels, img.pixels)

    odd = SpectrogramImage(rng.uniform(size=(77, 300)))
    once = standardize(odd)
    np.testing.assert_array_equal(standardize(once).pixels, once.pixels)

    labels = [RegisterLabel(c) for c in range(4) for _ in range(13)]
    train_idx, test_idx = split_train_test(list(range(52)), labels, 0.8, seed=3)
    for cls in range(4):
        n_train = sum(1 for i in train_idx if labels[i] == cls)
        assert abs(n_train - 0.8 * 13) <= 1
    assert sorted(train_idx + test_idx) == list(range(52))

    svm_path, cnn_path = tmp_path / "svm.avra", tmp_path / "cnn.avra"
    save_svm(small_svm.model, svm_path)
    back = load_svm(svm_path)
    np.testing.assert_array_equal(back.weights, small_svm.model.weights)
    np.testing.assert_array_equal(back.biases, small_svm.model.biases)
    np.testing.assert_array_equal(back.calib_a, small_svm.model.calib_a)
    np.testing.assert_array_equal(back.calib_b, small_svm.model.calib_b)

    save_cnn(small_cnn.model, cnn_path)
    back_cnn = load_cnn(cnn_path)
    for mine, theirs in zip(small_cnn.model.param_layers(), back_cnn.param_layers()):
        np.testing.assert_array_equal(mine.weight, theirs.weight)
        np.testing.assert_array_equal(mine.bias, theirs.bias)


@pytest.mark.slow
def test_analyzer_contract(acceptance_svm):
    """Ticks exactly 10 px apart; a constant-register clip yields one uniform
    label run with zero shift markers; runs cover all ticks exactly once."""
    t0 = time.time()
    svm_outcome, _ = acceptance_svm
    cfg = SyntheticCorpusConfig(per_class=100, seed=0, clip_seconds=3.0)
    clip = synth_register_clip(RegisterLabel.HEAD_MIX, 0, cfg)
    result = analyze(AnalysisRequest(clip), svm_outcome.model)

    xs = [t.x for t in result.ticks]
    assert xs == list(range(0, result.spectrogram.width, 10))
    assert all(b - a == 10 for a, b in zip(xs, xs[1:]))

    assert {t.label for t in result.ticks} == {RegisterLabel.HEAD_MIX}
    assert result.shift_markers == ()

    runs = label_run_lengths(result)
    assert runs == [(RegisterLabel.HEAD_MIX, 0, xs[-1])]
    covered = []
    for label, start_x, end_x in runs:
        covered.extend(range(start_x, end_x + 10, 10))
    assert covered == xs
    assert time.time() - t0 < 60.0


@pytest.mark.slow
def test_service_end_to_end(acceptance_svm):
    """Upload synthetic WAV -> spectrogram PNG of height 128 -> analysis with
    a well-formed tick list; identical requests return identical bytes."""
    svm_outcome, _ = acceptance_svm
    app = create_app(svm_model=svm_outcome.model)
    cfg = SyntheticCorpusConfig(per_class=100, seed=0, clip_seconds=3.0)
    clip = synth_register_clip(RegisterLabel.MIX, 2, cfg)
    wav = encode_wav(clip)

    with TestClient(app) as client:
        uploaded = client.post("/audio", content=wav)
        assert uploaded.status_code == 200
        audio_id = uploaded.json()["id"]

        png = client.get(f"/audio/{audio_id}/spectrogram")
        assert png.status_code == 200
        assert Image.open(io.BytesIO(png.content)).height == 128

        request = {"id": audio_id, "model": "svm"}
        first = client.post("/analyze", json=request)
        assert first.status_code == 200
        body = first.json()
        xs = [t["x"] for t in body["ticks"]]
        assert xs == list(range(0, body["width"], 10))
        for tick in body["ticks"]:
            assert tick["label"] in (0, 1, 2, 3)
            assert 0.0 <= tick["confidence"] <= 1.0
        assert len({t["label"] for t in body["ticks"]}) == 1  # constant register

        again = client.post("/analyze", json=request)
        assert again.content == first.content

        png2 = client.get(f"/audio/{audio_id}/spectrogram")
        assert png2.content == png.content