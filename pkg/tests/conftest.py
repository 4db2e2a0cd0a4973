import time

import pytest

from avra.cnn import CnnConfig
from avra.corpus import SyntheticCorpusConfig, generate_synthetic_corpus
from avra.pipeline import run_cnn_training, run_svm_training
from avra.svm import SvmTrainConfig


@pytest.fixture(scope="session")
def small_corpus(tmp_path_factory):
    """Quick 8-per-class corpus of 1-second clips for plumbing tests."""
    root = tmp_path_factory.mktemp("corpus_small")
    cfg = SyntheticCorpusConfig(per_class=8, seed=13, clip_seconds=1.0)
    manifest = generate_synthetic_corpus(cfg, root, write_wavs=True)
    return root, manifest, cfg


@pytest.fixture(scope="session")
def small_svm(small_corpus):
    root, manifest, _ = small_corpus
    return run_svm_training(manifest, root, SvmTrainConfig(seed=1), split_seed=1)


@pytest.fixture(scope="session")
def small_cnn(small_corpus):
    root, manifest, _ = small_corpus
    cfg = CnnConfig(conv_channels=(2, 4, 8), fc_hidden=16, epochs=2, seed=1)
    return run_cnn_training(manifest, root, cfg, split_seed=1)


# --- acceptance-scale fixtures (shared by tests/test_acceptance.py) ---------

ACCEPTANCE_SEED = 0
ACCEPTANCE_PER_CLASS = 100


@pytest.fixture(scope="session")
def acceptance_corpus(tmp_path_factory):
    root = tmp_path_factory.mktemp("corpus_acceptance")
    cfg = SyntheticCorpusConfig(per_class=ACCEPTANCE_PER_CLASS, seed=ACCEPTANCE_SEED)
    t0 = time.time()
    manifest = generate_synthetic_corpus(cfg, root, write_wavs=False)
    return root, manifest, cfg, time.time() - t0


@pytest.fixture(scope="session")
def acceptance_svm(acceptance_corpus):
    root, manifest, _, _ = acceptance_corpus
    t0 = time.time()
    outcome = run_svm_training(manifest, root, SvmTrainConfig(), split_seed=ACCEPTANCE_SEED)
    return outcome, time.time() - t0


@pytest.fixture(scope="session")
def acceptance_cnn(acceptance_corpus):
    root, manifest, _, _ = acceptance_corpus
    t0 = time.time()
    outcome = run_cnn_training(manifest, root, CnnConfig(), split_seed=ACCEPTANCE_SEED)
    return outcome, time.time() - t0


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """Print one PASS/FAIL line per acceptance criterion at the end of a run."""
    lines = []
    for status in ("passed", "failed", "error"):
        for report in terminalreporter.stats.get(status, []):
            if getattr(report, "when", None) != "call":
                continue
            if "acceptance" not in getattr(report, "keywords", {}):
                continue
            name = report.nodeid.split("::")[-1]
            verdict = "PASS" if status == "passed" else "FAIL"
            lines.append(f"  [{verdict}] {name}")
    if lines:
        terminalreporter.write_sep("=", "acceptance criteria")
        for line in sorted(lines):
            terminalreporter.write_line(line)
