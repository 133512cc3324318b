"""Per-pixel softmax segmentation and image-level classification heads.

Both heads are linear models over the handcrafted fused features, trained
with mini-batch SGD (momentum + weight decay + step learning-rate decay).
Training is bit-deterministic for a fixed random_state: images with no
valid pixels are dropped before shuffling, the shuffle order comes from a
seeded generator, and gradients are accumulated in dataset order within
each batch.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .features import feature_spec, fused_features, n_channels
from .guided_filter import refine_probmap
from .selection import binarize
from .validation import check_mask

__all__ = [
    "softmax",
    "cross_entropy",
    "pixel_loss",
    "pixel_loss_grad",
    "gap_pool",
    "image_loss",
    "image_loss_grad",
    "ModelParams",
    "save_model",
    "load_model",
    "PixelSoftmaxClassifier",
    "ImageLevelClassifier",
]

LOG_CLAMP = 1e-12  # floor inside log(); below every test tolerance


def softmax(logits: np.ndarray) -> np.ndarray:
    """Stable softmax over the last axis."""
    shifted = logits - logits.max(axis=-1, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=-1, keepdims=True)


def cross_entropy(probs: np.ndarray, target: np.ndarray, valid: np.ndarray | None = None) -> float:
    """Mean negative log-likelihood of the target class per pixel.

    Averages over all h*w pixels, or over the valid ones when a validity
    mask is given. Probabilities are clamped at 1e-12 inside the log.
    """
    probs = np.asarray(probs, dtype=np.float64)
    target = check_mask(target, "target", n_classes=probs.shape[-1])
    if probs.shape[:2] != target.shape:
        raise ValueError(f"probs {probs.shape[:2]} vs target {target.shape}")
    picked = np.take_along_axis(probs, target[:, :, None], axis=2)[:, :, 0]
    logs = np.log(np.maximum(picked, LOG_CLAMP))
    if valid is None:
        return float(-logs.mean())
    valid = np.asarray(valid, dtype=bool)
    if valid.shape != target.shape:
        raise ValueError(f"valid {valid.shape} vs target {target.shape}")
    n = int(valid.sum())
    if n == 0:
        raise ValueError("no valid pixels")
    return float(-logs[valid].sum() / n)


def pixel_loss(
    weights: np.ndarray,
    bias: np.ndarray,
    feats: np.ndarray,
    target: np.ndarray,
    valid: np.ndarray | None = None,
) -> float:
    """Cross-entropy of the linear softmax head on one feature stack."""
    probs = softmax(feats @ weights.T + bias)
    return cross_entropy(probs, target, valid)


def pixel_loss_grad(
    weights: np.ndarray,
    bias: np.ndarray,
    feats: np.ndarray,
    target: np.ndarray,
    valid: np.ndarray | None = None,
) -> tuple[float, np.ndarray, np.ndarray]:
    """Loss plus analytic gradients w.r.t. weights and bias."""
    target = check_mask(target, "target", n_classes=weights.shape[0])
    probs = softmax(feats @ weights.T + bias)
    loss = cross_entropy(probs, target, valid)
    n_classes = weights.shape[0]
    delta = probs.copy()
    rows = np.arange(target.shape[0])[:, None]
    cols = np.arange(target.shape[1])[None, :]
    delta[rows, cols, target] -= 1.0
    if valid is None:
        n = target.size
    else:
        valid = np.asarray(valid, dtype=bool)
        delta[~valid] = 0.0
        n = int(valid.sum())
    delta /= n
    flat_feats = feats.reshape(-1, feats.shape[2])
    flat_delta = delta.reshape(-1, n_classes)
    return loss, flat_delta.T @ flat_feats, flat_delta.sum(axis=0)


def gap_pool(stack: np.ndarray) -> np.ndarray:
    """Global average pool: spatial mean of each feature channel."""
    return np.asarray(stack, dtype=np.float64).mean(axis=(0, 1))


def image_loss(weights: np.ndarray, bias: np.ndarray, pooled: np.ndarray, label: int) -> float:
    """Cross-entropy of the image-level head on one pooled feature vector."""
    probs = softmax(weights @ pooled + bias)
    return float(-np.log(max(probs[label], LOG_CLAMP)))


def image_loss_grad(
    weights: np.ndarray, bias: np.ndarray, pooled: np.ndarray, label: int
) -> tuple[float, np.ndarray, np.ndarray]:
    probs = softmax(weights @ pooled + bias)
    loss = float(-np.log(max(probs[label], LOG_CLAMP)))
    delta = probs.copy()
    delta[label] -= 1.0
    return loss, np.outer(delta, pooled), delta


@dataclass(frozen=True)
class ModelParams:
    """Flat parameter record for both heads, the unit of serialization.

    Either head may be empty (zero rows); the feature-channel count and
    recipe string must agree across whatever is present.
    """

    weights: np.ndarray      # (n_classes, n_features) pixel head
    bias: np.ndarray         # (n_classes,)
    gap_weights: np.ndarray  # (n_image_classes, n_features) image head
    gap_bias: np.ndarray     # (n_image_classes,)
    feature_spec: str

    def __post_init__(self):
        w, b = self.weights, self.bias
        gw, gb = self.gap_weights, self.gap_bias
        if w.ndim != 2 or gw.ndim != 2 or b.shape != (w.shape[0],) or gb.shape != (gw.shape[0],):
            raise ValueError("parameter blocks have inconsistent shapes")
        if w.shape[1] != gw.shape[1]:
            raise ValueError(f"feature counts disagree: {w.shape[1]} vs {gw.shape[1]}")
        for block in (w, b, gw, gb):
            if block.size and not np.isfinite(block).all():
                raise ValueError("parameters must be finite")

    @property
    def n_features(self) -> int:
        return self.weights.shape[1]

    @property
    def high_radius(self) -> int:
        # recipe strings look like "lowhigh-v1/r4"
        return int(self.feature_spec.rsplit("/r", 1)[1])


_MAGIC = b"PXSEGMDL"
_VERSION = 1


def save_model(params: ModelParams, path) -> None:
    """Write a self-describing little-endian binary record, bit-exact."""
    spec = params.feature_spec.encode("utf-8")
    with open(path, "wb") as fh:
        fh.write(_MAGIC)
        fh.write(
            struct.pack(
                "<IIIII",
                _VERSION,
                params.weights.shape[0],
                params.gap_weights.shape[0],
                params.n_features,
                len(spec),
            )
        )
        fh.write(spec)
        for block in (params.weights, params.bias, params.gap_weights, params.gap_bias):
            fh.write(np.ascontiguousarray(block, dtype="<f8").tobytes())


def load_model(path) -> ModelParams:
    with open(path, "rb") as fh:
        data = fh.read()
    if data[:8] != _MAGIC:
        raise ValueError(f"{path}: not a model file")
    version, n_cls, n_img, n_feat, spec_len = struct.unpack_from("<IIIII", data, 8)
    if version != _VERSION:
        raise ValueError(f"{path}: unsupported model version {version}")
    pos = 28
    spec = data[pos : pos + spec_len].decode("utf-8")
    pos += spec_len
    blocks = []
    for count in (n_cls * n_feat, n_cls, n_img * n_feat, n_img):
        nbytes = count * 8
        if pos + nbytes > len(data):
            raise ValueError(f"{path}: truncated model file")
        blocks.append(np.frombuffer(data, dtype="<f8", count=count, offset=pos).astype(np.float64))
        pos += nbytes
    return ModelParams(
        weights=blocks[0].reshape(n_cls, n_feat),
        bias=blocks[1],
        gap_weights=blocks[2].reshape(n_img, n_feat),
        gap_bias=blocks[3],
        feature_spec=spec,
    )


def _lr_at(epoch: int, lr0: float, every: int, factor: float) -> float:
    return lr0 / factor ** (epoch // every)


class PixelSoftmaxClassifier(BaseEstimator):
    """Linear softmax segmenter over fused handcrafted features.

    fit() consumes (image, mask) pairs with optional per-pixel validity
    masks; predict_proba() runs the full pipeline, including guided-filter
    refinement of the softmax posteriors against the gated guidance plane.

    Defaults follow the standard schedule: lr 0.007 divided by 10 every
    5 epochs, momentum 0.9, weight decay 2e-4, mini-batches of 8 images.
    """

    def __init__(
        self,
        n_classes: int = 2,
        learning_rate: float = 0.007,
        momentum: float = 0.9,
        weight_decay: float = 0.0002,
        batch_size: int = 8,
        epochs: int = 10,
        lr_decay_every: int = 5,
        lr_decay_factor: float = 10.0,
        high_radius: int = 4,
        gf_radius: int = 2,
        gf_eps: float = 0.01,
        binarize_tau: float = 0.5,
        warm_start: bool = False,
        random_state: int = 0,
    ):
        self.n_classes = n_classes
        self.learning_rate = learning_rate
        self.momentum = momentum
        self.weight_decay = weight_decay
        self.batch_size = batch_size
        self.epochs = epochs
        self.lr_decay_every = lr_decay_every
        self.lr_decay_factor = lr_decay_factor
        self.high_radius = high_radius
        self.gf_radius = gf_radius
        self.gf_eps = gf_eps
        self.binarize_tau = binarize_tau
        self.warm_start = warm_start
        self.random_state = random_state

    def _check_config(self):
        if self.n_classes < 2:
            raise ValueError("n_classes must be >= 2")
        if not self.learning_rate > 0:
            raise ValueError("learning_rate must be > 0")
        if not 0.0 <= self.momentum < 1.0:
            raise ValueError("momentum must lie in [0, 1)")
        if self.weight_decay < 0:
            raise ValueError("weight_decay must be >= 0")
        if self.batch_size < 1 or self.epochs < 0:
            raise ValueError("batch_size must be >= 1 and epochs >= 0")
        if self.lr_decay_every < 1 or not self.lr_decay_factor >= 1:
            raise ValueError("lr_decay_every must be >= 1 and lr_decay_factor >= 1")

    def fit(self, images, masks, valid_masks=None):
        """Mini-batch SGD on the pixel cross-entropy, valid pixels only.

        Images whose validity mask is entirely False are dropped up front,
        so their presence cannot perturb batch composition or the result.
        """
        self._check_config()
        if len(images) == 0 or len(images) != len(masks):
            raise ValueError("need a non-empty, aligned list of images and masks")
        if valid_masks is None:
            valid_masks = [None] * len(images)
        if len(valid_masks) != len(images):
            raise ValueError("valid_masks length mismatch")

        feats, targets, valids = [], [], []
        for img, mask, valid in zip(images, masks, valid_masks):
            mask = check_mask(mask, "mask", self.n_classes)
            if valid is not None:
                valid = np.asarray(valid, dtype=bool)
                if valid.shape != mask.shape:
                    raise ValueError("validity mask shape mismatch")
                if not valid.any():
                    continue
            fused, _ = fused_features(img, self.high_radius)
            feats.append(fused)
            targets.append(mask)
            valids.append(valid)
        if not feats:
            raise ValueError("no valid pixels in the entire dataset")

        n_feat = feats[0].shape[2]
        if self.warm_start and hasattr(self, "weights_"):
            if self.weights_.shape != (self.n_classes, n_feat):
                raise ValueError("warm start shape mismatch")
            weights = self.weights_.copy()
            bias = self.bias_.copy()
        else:
            weights = np.zeros((self.n_classes, n_feat))
            bias = np.zeros(self.n_classes)

        vel_w = np.zeros_like(weights)
        vel_b = np.zeros_like(bias)
        rng = np.random.default_rng(self.random_state)
        curve = []
        for epoch in range(self.epochs):
            lr = _lr_at(epoch, self.learning_rate, self.lr_decay_every, self.lr_decay_factor)
            order = rng.permutation(len(feats))
            epoch_loss = 0.0
            for start in range(0, len(order), self.batch_size):
                batch = order[start : start + self.batch_size]
                grad_w = np.zeros_like(weights)
                grad_b = np.zeros_like(bias)
                for i in batch:
                    loss, gw, gb = pixel_loss_grad(weights, bias, feats[i], targets[i], valids[i])
                    grad_w += gw
                    grad_b += gb
                    epoch_loss += loss
                grad_w /= len(batch)
                grad_b /= len(batch)
                vel_w = self.momentum * vel_w + lr * (grad_w + self.weight_decay * weights)
                vel_b = self.momentum * vel_b + lr * grad_b
                weights = weights - vel_w
                bias = bias - vel_b
            curve.append(epoch_loss / len(feats))

        self.weights_ = weights
        self.bias_ = bias
        self.n_features_ = n_feat
        self.loss_curve_ = curve
        return self

    def predict_proba(self, image, refine: bool = True, gf_radius=None, gf_eps=None) -> np.ndarray:
        """Per-pixel class distribution: softmax posteriors, optionally
        guided-filter refined against the gated guidance plane."""
        check_is_fitted(self, "weights_")
        fused, guide = fused_features(image, self.high_radius)
        if fused.shape[2] != self.weights_.shape[1]:
            raise ValueError("feature count does not match the trained model")
        probs = softmax(fused @ self.weights_.T + self.bias_)
        if refine:
            r = self.gf_radius if gf_radius is None else gf_radius
            e = self.gf_eps if gf_eps is None else gf_eps
            probs = refine_probmap(guide, probs, r, e)
        return probs

    def predict(self, image, gf_radius=None, gf_eps=None) -> np.ndarray:
        return binarize(self.predict_proba(image, True, gf_radius, gf_eps), self.binarize_tau)

    def to_params(self) -> ModelParams:
        check_is_fitted(self, "weights_")
        return ModelParams(
            weights=self.weights_.copy(),
            bias=self.bias_.copy(),
            gap_weights=np.zeros((0, self.n_features_)),
            gap_bias=np.zeros(0),
            feature_spec=feature_spec(self.high_radius),
        )

    @classmethod
    def from_params(cls, params: ModelParams, **kwargs) -> "PixelSoftmaxClassifier":
        if params.weights.shape[0] < 2:
            raise ValueError("model record holds no pixel head")
        if params.n_features != n_channels():
            raise ValueError("model feature count does not match the feature recipe")
        est = cls(
            n_classes=params.weights.shape[0], high_radius=params.high_radius, **kwargs
        )
        est.weights_ = params.weights.copy()
        est.bias_ = params.bias.copy()
        est.n_features_ = params.n_features
        est.loss_curve_ = []
        return est


class ImageLevelClassifier(BaseEstimator):
    """Image-level softmax head over globally averaged fused features.

    Exposes class activation maps: the per-pixel dot product of each
    class row with the fused features, min-max normalised per class.
    """

    def __init__(
        self,
        n_classes: int = 2,
        learning_rate: float = 0.007,
        momentum: float = 0.9,
        weight_decay: float = 0.0002,
        batch_size: int = 8,
        epochs: int = 10,
        lr_decay_every: int = 5,
        lr_decay_factor: float = 10.0,
        high_radius: int = 4,
        random_state: int = 0,
    ):
        self.n_classes = n_classes
        self.learning_rate = learning_rate
        self.momentum = momentum
        self.weight_decay = weight_decay
        self.batch_size = batch_size
        self.epochs = epochs
        self.lr_decay_every = lr_decay_every
        self.lr_decay_factor = lr_decay_factor
        self.high_radius = high_radius
        self.random_state = random_state

    def fit(self, images, labels):
        if len(images) == 0:
            raise ValueError("need a non-empty list of images")
        labels = np.asarray(labels)
        if labels.shape != (len(images),):
            raise ValueError("labels must align with images")
        if labels.min() < 0 or labels.max() >= self.n_classes:
            raise ValueError(f"labels must lie in [0, {self.n_classes})")
        if self.n_classes < 2:
            raise ValueError("n_classes must be >= 2")

        pooled = [gap_pool(fused_features(img, self.high_radius)[0]) for img in images]
        n_feat = pooled[0].shape[0]
        weights = np.zeros((self.n_classes, n_feat))
        bias = np.zeros(self.n_classes)
        vel_w = np.zeros_like(weights)
        vel_b = np.zeros_like(bias)
        rng = np.random.default_rng(self.random_state)
        curve = []
        for epoch in range(self.epochs):
            lr = _lr_at(epoch, self.learning_rate, self.lr_decay_every, self.lr_decay_factor)
            order = rng.permutation(len(pooled))
            epoch_loss = 0.0
            for start in range(0, len(order), self.batch_size):
                batch = order[start : start + self.batch_size]
                grad_w = np.zeros_like(weights)
                grad_b = np.zeros_like(bias)
                for i in batch:
                    loss, gw, gb = image_loss_grad(weights, bias, pooled[i], int(labels[i]))
                    grad_w += gw
                    grad_b += gb
                    epoch_loss += loss
                grad_w /= len(batch)
                grad_b /= len(batch)
                vel_w = self.momentum * vel_w + lr * (grad_w + self.weight_decay * weights)
                vel_b = self.momentum * vel_b + lr * grad_b
                weights = weights - vel_w
                bias = bias - vel_b
            curve.append(epoch_loss / len(pooled))

        self.weights_ = weights
        self.bias_ = bias
        self.n_features_ = n_feat
        self.loss_curve_ = curve
        return self

    def decision_function(self, image) -> np.ndarray:
        check_is_fitted(self, "weights_")
        pooled = gap_pool(fused_features(image, self.high_radius)[0])
        return self.weights_ @ pooled + self.bias_

    def predict(self, images) -> np.ndarray:
        return np.array([int(np.argmax(self.decision_function(img))) for img in images])

    def class_activation_maps(self, image) -> np.ndarray:
        """Per-class activation planes, each min-max normalised to [0, 1].

        A spatially constant activation normalises to all zeros.
        """
        check_is_fitted(self, "weights_")
        fused, _ = fused_features(image, self.high_radius)
        act = fused @ self.weights_.T
        lo = act.min(axis=(0, 1), keepdims=True)
        hi = act.max(axis=(0, 1), keepdims=True)
        span = hi - lo
        out = np.zeros_like(act)
        np.divide(act - lo, span, out=out, where=span > 0)
        return out

    def to_params(self) -> ModelParams:
        check_is_fitted(self, "weights_")
        return ModelParams(
            weights=np.zeros((0, self.n_features_)),
            bias=np.zeros(0),
            gap_weights=self.weights_.copy(),
            gap_bias=self.bias_.copy(),
            feature_spec=feature_spec(self.high_radius),
        )
