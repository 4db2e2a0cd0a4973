"""One-vs-rest linear SVM trained by dual coordinate descent, with Platt scaling.

The solver minimizes, per binary head,

    0.5 * ||w_aug||^2 + sum_i cost_i * max(0, 1 - y_i * w_aug . x_aug_i)

where x_aug appends a constant bias_scale column, so the bias rides inside
the regularized weight vector (the usual linear-SVM augmentation) and
cost_i = C * balanced_weight(class of i). Optimization runs in the dual with
single-coordinate Newton steps and LIBLINEAR-style shrinking; the tracked
objective is the (negated) dual, which single-coordinate exact minimization
decreases monotonically. At convergence it meets the primal value above.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dataset import N_CLASSES, RegisterLabel
from .errors import CalibrationError, ConfigError, ShapeError, TrainingError


@dataclass(frozen=True)
class SvmTrainConfig:
    C: float = 2.5e-6
    max_epochs: int = 1000
    tolerance: float = 1e-4
    class_weighting: bool = True
    seed: int = 0
    bias_scale: float = 1.0

    def __post_init__(self):
        if self.C <= 0:
            raise ConfigError("C must be > 0")
        if self.tolerance <= 0:
            raise ConfigError("tolerance must be > 0")
        if self.max_epochs < 1:
            raise ConfigError("max_epochs must be >= 1")


@dataclass(frozen=True)
class SvmModel:
    weights: np.ndarray  # (4, feature_dim)
    biases: np.ndarray  # (4,)
    calib_a: np.ndarray  # (4,) sigmoid slope per class
    calib_b: np.ndarray  # (4,) sigmoid offset per class

    @property
    def feature_dim(self) -> int:
        return self.weights.shape[1]

    def __post_init__(self):
        for arr in (self.weights, self.biases, self.calib_a, self.calib_b):
            if not np.all(np.isfinite(arr)):
                raise ValueError("model parameters must be finite")
        if self.weights.shape[0] != N_CLASSES or self.biases.shape != (N_CLASSES,):
            raise ShapeError("model must carry one (w, b) head per class")


def balanced_class_weights(counts) -> np.ndarray:
    """weight_c = N_total / (K * N_c) with K = 4 classes."""
    counts = np.asarray(counts, dtype=np.float64)
    if counts.shape != (N_CLASSES,):
        raise ValueError(f"expected {N_CLASSES} class counts")
    if np.any(counts < 1):
        raise ValueError("every class count must be >= 1")
    return counts.sum() / (N_CLASSES * counts)


def _dual_cd(X: np.ndarray, y: np.ndarray, costs: np.ndarray, cfg: SvmTrainConfig):
    """Dual coordinate descent for the L1-hinge SVM on bias-augmented rows.

    Returns (w_aug, objective_trace) where the trace holds the negated dual
    objective 0.5*||w||^2 - sum(alpha) after each outer pass.
    """
    n = X.shape[0]
    q_diag = np.einsum("ij,ij->i", X, X) + cfg.bias_scale**2
    alpha = np.zeros(n)
    w = np.zeros(X.shape[1] + 1)
    rng = np.random.default_rng(cfg.seed)
    bias = cfg.bias_scale

    active = np.arange(n)
    pg_max_old, pg_min_old = np.inf, -np.inf
    trace = []
    for _ in range(cfg.max_epochs):
        rng.shuffle(active)
        pg_max, pg_min = -np.inf, np.inf
        keep = []
        for i in active:
            g = y[i] * (X[i] @ w[:-1] + bias * w[-1]) - 1.0
            if alpha[i] == 0.0:
                if g > pg_max_old:
                    continue  # shrink: optimal at the lower bound by margin
                pg = min(g, 0.0)
            elif alpha[i] == costs[i]:
                if g < pg_min_old:
                    continue
                pg = max(g, 0.0)
            else:
                pg = g
            keep.append(i)
            pg_max = max(pg_max, pg)
            pg_min = min(pg_min, pg)
            if pg != 0.0:
                old = alpha[i]
                alpha[i] = min(max(old - g / q_diag[i], 0.0), costs[i])
                step = (alpha[i] - old) * y[i]
                if step != 0.0:
                    w[:-1] += step * X[i]
                    w[-1] += step * bias
        trace.append(0.5 * (w @ w) - alpha.sum())

        violation = max(abs(pg_max), abs(pg_min)) if keep else 0.0
        if violation < cfg.tolerance:
            if len(active) == n:
                break
            # shrunk problem converged: re-activate everything and confirm
            active = np.arange(n)
            pg_max_old, pg_min_old = np.inf, -np.inf
            continue
        active = np.array(keep)
        pg_max_old = pg_max if pg_max > 0 else np.inf
        pg_min_old = pg_min if pg_min < 0 else -np.inf
    return w, trace


def primal_objective(w: np.ndarray, b: float, X, y, costs, bias_scale: float = 1.0) -> float:
    """Objective the solver minimizes, for oracle comparisons."""
    margins = 1.0 - y * (X @ w + b)
    hinge = np.maximum(0.0, margins)
    return 0.5 * (w @ w + (b / bias_scale) ** 2) + float(costs @ hinge)


def train_binary(
    X: np.ndarray,
    labels,
    positive: int,
    cfg: SvmTrainConfig = SvmTrainConfig(),
    sample_costs=None,
):
    """Train one one-vs-rest head; returns (w, b, objective_trace)."""
    labels = np.asarray([int(l) for l in labels])
    y = np.where(labels == int(positive), 1.0, -1.0)
    if np.all(y == 1.0) or np.all(y == -1.0):
        raise TrainingError(
            f"training head for class {int(positive)} needs positives and negatives"
        )
    if sample_costs is None:
        sample_costs = np.full(len(y), cfg.C)
    else:
        sample_costs = np.asarray(sample_costs, dtype=np.float64)
    w_aug, trace = _dual_cd(np.asarray(X, dtype=np.float64), y, sample_costs, cfg)
    return w_aug[:-1], float(w_aug[-1] * cfg.bias_scale), trace


def _per_sample_costs(labels: np.ndarray, cfg: SvmTrainConfig) -> np.ndarray:
    if not cfg.class_weighting:
        return np.full(len(labels), cfg.C)
    counts = np.bincount(labels, minlength=N_CLASSES)
    weights = balanced_class_weights(counts)
    return cfg.C * weights[labels]


def train_one_vs_rest(
    X: np.ndarray,
    labels,
    cfg: SvmTrainConfig = SvmTrainConfig(),
    calibration_folds: int = 3,
) -> SvmModel:
    """Train all four heads plus Platt calibration.

    Calibration sigmoids are fitted on out-of-fold decision values from a
    3-fold internal split of the training data, then the final heads are
    trained on the full set.
    """
    X = np.asarray(X, dtype=np.float64)
    labels = np.asarray([int(l) for l in labels])
    costs = _per_sample_costs(labels, cfg)

    def fit_heads(rows):
        heads = []
        for cls in range(N_CLASSES):
            head_cfg = SvmTrainConfig(
                C=cfg.C,
                max_epochs=cfg.max_epochs,
                tolerance=cfg.tolerance,
                class_weighting=cfg.class_weighting,
                seed=cfg.seed * N_CLASSES + cls,
                bias_scale=cfg.bias_scale,
            )
            w, b, _ = train_binary(X[rows], labels[rows], cls, head_cfg, costs[rows])
            heads.append((w, b))
        return heads

    all_rows = np.arange(len(labels))
    heads = fit_heads(all_rows)
    weights = np.stack([w for w, _ in heads])
    biases = np.array([b for _, b in heads])

    # out-of-fold decision values for calibration
    folds = _stratified_folds(labels, calibration_folds, cfg.seed)
    oof_scores = np.zeros((len(labels), N_CLASSES))
    for k, fold in enumerate(folds):
        train_rows = np.setdiff1d(all_rows, fold)
        fold_heads = fit_heads(train_rows)
        for cls, (w, b) in enumerate(fold_heads):
            oof_scores[fold, cls] = X[fold] @ w + b

    calib_a, calib_b = np.zeros(N_CLASSES), np.zeros(N_CLASSES)
    for cls in range(N_CLASSES):
        calib_a[cls], calib_b[cls] = fit_platt_sigmoid(oof_scores[:, cls], labels == cls)

    return SvmModel(weights=weights, biases=biases, calib_a=calib_a, calib_b=calib_b)


def _stratified_folds(labels: np.ndarray, n_folds: int, seed: int) -> list[np.ndarray]:
    folds = [[] for _ in range(n_folds)]
    for cls in range(N_CLASSES):
        cls_rows = np.flatnonzero(labels == cls)
        rng = np.random.default_rng([seed, 1000 + cls])
        perm = rng.permutation(cls_rows)
        for j, row in enumerate(perm):
            folds[j % n_folds].append(row)
    return [np.sort(np.array(f, dtype=np.int64)) for f in folds]


def fit_platt_sigmoid(scores, positives, max_iter: int = 100, min_step: float = 1e-10):
    """Fit P(y=1 | f) = 1 / (1 + exp(A*f + B)) by regularized maximum likelihood.

    Newton iterations with backtracking on prior-adjusted targets; raises
    CalibrationError when one side is missing.
    """
    scores = np.asarray(scores, dtype=np.float64)
    positives = np.asarray(positives, dtype=bool)
    n_pos = int(positives.sum())
    n_neg = len(positives) - n_pos
    if n_pos == 0 or n_neg == 0:
        raise CalibrationError("calibration needs both positive and negative examples")

    hi = (n_pos + 1.0) / (n_pos + 2.0)
    lo = 1.0 / (n_neg + 2.0)
    targets = np.where(positives, hi, lo)
    a, b = 0.0, float(np.log((n_neg + 1.0) / (n_pos + 1.0)))
    sigma = 1e-12

    def objective(a_, b_):
        f = scores * a_ + b_
        pos = f >= 0
        return float(
            np.sum(
                np.where(
                    pos,
                    targets * f + np.log1p(np.exp(-np.abs(f))),
                    (targets - 1.0) * f + np.log1p(np.exp(-np.abs(f))),
                )
            )
        )

    fval = objective(a, b)
    for _ in range(max_iter):
        f = scores * a + b
        # stable evaluation of p = P(y=1) = 1/(1+exp(f))
        p = np.where(f >= 0, np.exp(-np.abs(f)) / (1 + np.exp(-np.abs(f))), 1 / (1 + np.exp(-np.abs(f))))
        q = 1.0 - p
        d2 = p * q
        h11 = float(scores @ (scores * d2)) + sigma
        h22 = float(d2.sum()) + sigma
        h21 = float(scores @ d2)
        d1 = targets - p
        g1 = float(scores @ d1)
        g2 = float(d1.sum())
        if abs(g1) < 1e-5 and abs(g2) < 1e-5:
            break
        det = h11 * h22 - h21 * h21
        da = -(h22 * g1 - h21 * g2) / det
        db = -(-h21 * g1 + h11 * g2) / det
        gd = g1 * da + g2 * db
        step = 1.0
        while step >= min_step:
            na, nb = a + step * da, b + step * db
            nf = objective(na, nb)
            if nf < fval + 1e-4 * step * gd:
                a, b, fval = na, nb, nf
                break
            step /= 2
        else:
            break
    return float(a), float(b)


def decision_values(model: SvmModel, x: np.ndarray) -> np.ndarray:
    """Per-class scores w_c . x + b_c for one vector or a batch."""
    x = np.asarray(x, dtype=np.float64)
    if x.shape[-1] != model.feature_dim:
        raise ShapeError(f"expected {model.feature_dim} features, got {x.shape[-1]}")
    return x @ model.weights.T + model.biases


def predict(model: SvmModel, x: np.ndarray) -> RegisterLabel | np.ndarray:
    """Argmax over decision values; exact ties resolve to the lowest code."""
    scores = decision_values(model, x)
    if scores.ndim == 1:
        return RegisterLabel(int(np.argmax(scores)))
    return np.argmax(scores, axis=-1)


def predict_proba(model: SvmModel, x: np.ndarray) -> np.ndarray:
    """Calibrated per-class probabilities, renormalized to sum to 1."""
    scores = decision_values(model, x)
    f = scores * model.calib_a + model.calib_b
    p = np.where(f >= 0, np.exp(-np.abs(f)) / (1 + np.exp(-np.abs(f))), 1 / (1 + np.exp(-np.abs(f))))
    return p / p.sum(axis=-1, keepdims=True)
