"""Training for the concept heads and the sparse interpretable classifier.

The backbone features are frozen inputs; training happens in three stages:

1. motion head on binary labels, multi-label binary cross entropy
   (mean over concepts, sigmoid per concept), full-batch gradient descent
   with momentum;
2. object/scene heads on soft labels, negative cosine similarity between
   elementwise-cubed activations and labels, same optimizer;
3. final classifier on standardized activations, cross entropy plus an
   elastic-net penalty, solved by proximal gradient descent (ISTA) with
   backtracking so weights reach exact zeros and the objective never
   increases.

Everything is plain numpy in float64 and bit-reproducible for a fixed seed.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, ValidationError
from .model import ACT_STD_FLOOR, DanceModel

log = logging.getLogger(__name__)


@dataclass
class TrainConfig:
    learning_rate: float = 1.0
    momentum: float = 0.9
    epochs: int = 400
    batch_size: int = 0          # 0 = full batch; the optimizer is full-batch by design
    lam: float = 1e-4            # elastic-net strength
    alpha: float = 0.99          # L1 share of the penalty
    seed: int = 0
    cosine_cubed_axis: str = "per_concept"   # or "per_sample"
    classifier_max_iter: int = 3000
    classifier_tol: float = 1e-9

    def __post_init__(self) -> None:
        if self.lam < 0:
            raise ConfigError(f"lam must be >= 0, got {self.lam}")
        if not 0.0 <= self.alpha <= 1.0:
            raise ConfigError(f"alpha must be in [0, 1], got {self.alpha}")
        if self.cosine_cubed_axis not in ("per_concept", "per_sample"):
            raise ConfigError(f"unknown cosine_cubed_axis {self.cosine_cubed_axis!r}")


@dataclass
class HeadResult:
    weights: np.ndarray
    final_loss: float
    loss_history: list[float] = field(default_factory=list)


@dataclass
class ClassifierResult:
    weights: np.ndarray
    bias: np.ndarray
    objective_history: list[float] = field(default_factory=list)
    final_step: float = 0.0
    iterations: int = 0


# ---------------------------------------------------------------------------
# losses
# ---------------------------------------------------------------------------

def bce_loss_and_grad(weights: np.ndarray, features: np.ndarray, labels: np.ndarray):
    """Multi-label BCE over logits z = W x, averaged over concepts then samples.

    Returns (loss, gradient w.r.t. weights).  Uses the softplus identity
    softplus(z) - c*z for numerical stability at saturated logits.
    """
    z = features @ weights.T
    n, m = z.shape
    loss = float(np.sum(np.logaddexp(0.0, z) - labels * z) / (n * m))
    sig = 1.0 / (1.0 + np.exp(-z))
    grad = (sig - labels).T @ features / (n * m)
    return loss, grad


def _cubed_cosine_terms(acts: np.ndarray, labels: np.ndarray, axis: str):
    """Loss and d(loss)/d(acts) for the cubed-cosine objective.

    per_concept compares, for each concept, its activation pattern across the
    batch with the label pattern; per_sample compares each sample's activation
    vector with its label vector.  Vectors whose labels (or activations) are
    all zero are skipped.
    """
    u = acts**3
    t = labels**3
    ax = 0 if axis == "per_concept" else 1
    nu = np.linalg.norm(u, axis=ax)
    nt = np.linalg.norm(t, axis=ax)
    dots = np.sum(u * t, axis=ax)
    active = (nt > 0) & (nu > 0)
    n_active = int(active.sum())
    if n_active == 0:
        return 0.0, np.zeros_like(acts), 0
    cos = np.zeros_like(nu)
    cos[active] = dots[active] / (nu[active] * nt[active])
    loss = float(-cos[active].mean())

    inv = np.zeros_like(nu)
    inv[active] = 1.0 / (nu[active] * nt[active])
    scale = np.zeros_like(nu)
    scale[active] = dots[active] / (nu[active] ** 3 * nt[active])
    if ax == 0:
        g_u = -t * inv[None, :] + u * scale[None, :]
    else:
        g_u = -t * inv[:, None] + u * scale[:, None]
    d_acts = g_u * 3.0 * acts**2 / n_active
    return loss, d_acts, n_active


def cosine_cubed_loss_and_grad(
    weights: np.ndarray, features: np.ndarray, soft_labels: np.ndarray, axis: str = "per_concept"
):
    """Cubed-cosine loss over activations z = W x, with gradient w.r.t. weights."""
    acts = features @ weights.T
    loss, d_acts, n_active = _cubed_cosine_terms(acts, soft_labels, axis)
    if n_active == 0:
        log.warning("cubed-cosine loss: every %s vector is zero; nothing to fit", axis)
    grad = d_acts.T @ features
    return loss, grad


# ---------------------------------------------------------------------------
# concept heads
# ---------------------------------------------------------------------------

def _momentum_descent(loss_and_grad, shape, cfg: TrainConfig) -> HeadResult:
    rng = np.random.default_rng(cfg.seed)
    weights = rng.normal(0.0, 0.01, size=shape)
    velocity = np.zeros(shape)
    history = []
    loss = float("nan")
    for _ in range(cfg.epochs):
        loss, grad = loss_and_grad(weights)
        velocity = cfg.momentum * velocity - cfg.learning_rate * grad
        weights = weights + velocity
        history.append(loss)
    final_loss, _ = loss_and_grad(weights)
    history.append(final_loss)
    return HeadResult(weights=weights, final_loss=final_loss, loss_history=history)


def train_motion_head(features: np.ndarray, labels: np.ndarray, cfg: TrainConfig) -> HeadResult:
    """Fit the motion concept projection on binary presence labels."""
    labels = np.asarray(labels, dtype=np.float64)
    if labels.ndim != 2 or labels.shape[0] != features.shape[0]:
        raise ValidationError(f"labels must be N x M_m aligned with features, got {labels.shape}")
    if not np.all(np.isin(labels, (0.0, 1.0))):
        raise ValidationError("motion labels must be binary")
    shape = (labels.shape[1], features.shape[1])
    return _momentum_descent(lambda w: bce_loss_and_grad(w, features, labels), shape, cfg)


def train_context_head(features: np.ndarray, soft_labels: np.ndarray, cfg: TrainConfig) -> HeadResult:
    """Fit an object or scene concept projection on soft similarity labels."""
    soft_labels = np.asarray(soft_labels, dtype=np.float64)
    if soft_labels.ndim != 2 or soft_labels.shape[0] != features.shape[0]:
        raise ValidationError(f"labels must be N x M aligned with features, got {soft_labels.shape}")
    shape = (soft_labels.shape[1], features.shape[1])
    return _momentum_descent(
        lambda w: cosine_cubed_loss_and_grad(w, features, soft_labels, cfg.cosine_cubed_axis),
        shape,
        cfg,
    )


# ---------------------------------------------------------------------------
# activation standardization
# ---------------------------------------------------------------------------

def standardize_activations(acts: np.ndarray):
    """Per-concept mean/std over the batch; std floored to stay invertible.

    Returns (mean, std, standardized activations).
    """
    acts = np.asarray(acts, dtype=np.float64)
    if acts.ndim != 2 or acts.shape[0] < 2:
        raise ValidationError(f"standardization needs an N x M batch with N >= 2, got {acts.shape}")
    mean = acts.mean(axis=0)
    std = np.maximum(acts.std(axis=0), ACT_STD_FLOOR)
    return mean, std, (acts - mean) / std


# ---------------------------------------------------------------------------
# sparse classifier (ISTA)
# ---------------------------------------------------------------------------

def _softmax(logits: np.ndarray) -> np.ndarray:
    shifted = logits - logits.max(axis=-1, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=-1, keepdims=True)


def _cross_entropy(z_std, y_onehot, weights, bias) -> float:
    logits = z_std @ weights.T + bias
    logp = logits - logits.max(axis=1, keepdims=True)
    logp = logp - np.log(np.exp(logp).sum(axis=1, keepdims=True))
    k = y_onehot.shape[1]
    return float(-np.sum(y_onehot * logp) / (z_std.shape[0] * k))


def classifier_objective(z_std, y_onehot, weights, bias, lam, alpha) -> float:
    """Cross entropy (scaled by 1/K per sample) plus the elastic-net penalty."""
    penalty = lam * ((1.0 - alpha) * 0.5 * np.sum(weights**2) + alpha * np.sum(np.abs(weights)))
    return _cross_entropy(z_std, y_onehot, weights, bias) + penalty


def soft_threshold(values: np.ndarray, threshold: float) -> np.ndarray:
    return np.sign(values) * np.maximum(np.abs(values) - threshold, 0.0)


def train_classifier(
    z_std: np.ndarray,
    y: np.ndarray,
    lam: float,
    alpha: float,
    cfg: TrainConfig,
    num_classes: int | None = None,
) -> ClassifierResult:
    """Solve the elastic-net softmax classifier by ISTA with backtracking.

    Each iteration takes a gradient step on the smooth part (cross entropy +
    ridge term) followed by elementwise soft thresholding with step*lam*alpha;
    the bias is unpenalized.  Backtracking halves the step until the standard
    quadratic majorization holds, which makes the full objective monotonically
    non-increasing and leaves exact zeros in the weights.
    """
    if lam < 0:
        raise ConfigError(f"lam must be >= 0, got {lam}")
    if not 0.0 <= alpha <= 1.0:
        raise ConfigError(f"alpha must be in [0, 1], got {alpha}")
    y = np.asarray(y, dtype=np.int64)
    n, m = z_std.shape
    k = int(num_classes if num_classes is not None else y.max() + 1)
    if np.any(y < 0) or np.any(y >= k):
        raise ValidationError(f"labels outside 0..{k - 1}")
    y_onehot = np.zeros((n, k))
    y_onehot[np.arange(n), y] = 1.0

    def smooth_value_and_grad(w, b):
        logits = z_std @ w.T + b
        p = _softmax(logits)
        g = (p - y_onehot) / (n * k)
        grad_w = g.T @ z_std + (1.0 - alpha) * lam * w
        grad_b = g.sum(axis=0)
        value = _cross_entropy(z_std, y_onehot, w, b) + 0.5 * (1.0 - alpha) * lam * np.sum(w**2)
        return value, grad_w, grad_b

    weights = np.zeros((k, m))
    bias = np.zeros(k)
    step = 1.0
    history = [classifier_objective(z_std, y_onehot, weights, bias, lam, alpha)]
    iterations = 0
    for iterations in range(1, cfg.classifier_max_iter + 1):
        value, grad_w, grad_b = smooth_value_and_grad(weights, bias)
        step = min(step * 2.0, 1e6)  # let the step recover between iterations
        while True:
            w_new = soft_threshold(weights - step * grad_w, step * lam * alpha)
            b_new = bias - step * grad_b
            dw, db = w_new - weights, b_new - bias
            quad = value + np.sum(grad_w * dw) + np.sum(grad_b * db) + (np.sum(dw**2) + np.sum(db**2)) / (2.0 * step)
            smooth_new = _cross_entropy(z_std, y_onehot, w_new, b_new) + 0.5 * (1.0 - alpha) * lam * np.sum(w_new**2)
            if smooth_new <= quad + 1e-15 or step < 1e-12:
                break
            step *= 0.5
        move = max(float(np.max(np.abs(dw))), float(np.max(np.abs(db))))
        weights, bias = w_new, b_new
        history.append(classifier_objective(z_std, y_onehot, weights, bias, lam, alpha))
        if move <= cfg.classifier_tol * max(step, 1e-12):
            break
    return ClassifierResult(
        weights=weights, bias=bias, objective_history=history, final_step=step, iterations=iterations
    )


# ---------------------------------------------------------------------------
# inference
# ---------------------------------------------------------------------------

@dataclass
class Prediction:
    probs: np.ndarray        # length K, sums to 1
    logits: np.ndarray       # length K
    activations: np.ndarray  # raw concept activations z, length M
    standardized: np.ndarray  # z' consumed by the classifier, length M

    @property
    def predicted_class(self) -> int:
        return int(np.argmax(self.probs))


def predict(model: DanceModel, x: np.ndarray) -> Prediction:
    """Forward pass: concept activations, standardization, softmax classifier."""
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (model.feature_dim,):
        raise ValidationError(f"feature vector must have shape ({model.feature_dim},), got {x.shape}")
    z = model.concept_weights() @ x
    z_std = (z - model.act_mean) / model.act_std
    logits = model.w_classifier @ z_std + model.bias
    return Prediction(probs=_softmax(logits), logits=logits, activations=z, standardized=z_std)


def predict_batch(model: DanceModel, features: np.ndarray) -> np.ndarray:
    """Argmax predictions for an N x D feature matrix."""
    features = np.asarray(features, dtype=np.float64)
    if features.ndim != 2 or features.shape[1] != model.feature_dim:
        raise ValidationError(f"features must be N x {model.feature_dim}, got {features.shape}")
    z = features @ model.concept_weights().T
    z_std = (z - model.act_mean) / model.act_std
    logits = z_std @ model.w_classifier.T + model.bias
    return np.argmax(logits, axis=1)
