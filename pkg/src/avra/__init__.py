"""Vocal register analysis: spectrogram rendering, classifiers, and the
region analyzer behind the AVRA tool."""

from .audio import AudioBuffer, ClipSpec, decode_wav, encode_wav, resample_linear, slice_clips
from .analyzer import AnalysisRequest, AnalysisResult, analyze, annotate, label_run_lengths
from .cnn import CnnConfig, CnnModel
from .corpus import SyntheticCorpusConfig, generate_synthetic_corpus, synth_register_clip
from .dataset import (
    FEATURE_DIM,
    DatasetManifest,
    RegisterLabel,
    Sample,
    augment,
    brightness,
    flatten,
    hflip,
    split_train_test,
    standardize,
)
from .dsp import MelConfig, SpectrogramImage, StftConfig, fft, hann_window, render_mel_spectrogram
from .evaluate import ConfusionMatrix, EvalReport, confusion, metrics
from .modelio import load_cnn, load_model, load_svm, save_cnn, save_svm
from .svm import SvmModel, SvmTrainConfig, balanced_class_weights, train_one_vs_rest

__version__ = "0.1.0"
