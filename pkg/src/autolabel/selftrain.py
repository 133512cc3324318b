"""Pseudo-label bootstrapping and the iterative self-training loop.

Three bootstrap routes produce initial masks for an unlabelled target set
(transfer from a labelled source, thresholding of easy images, or class
activation maps). `SelfTrainingLabeler` then alternates: keep the masks
whose area ratio looks plausible, train the segmenter on them, re-predict
every target, and score a held-out validation split — stopping once the
validation mIoU stops growing and returning the best round.
"""

from __future__ import annotations

import copy
from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .classifier import ImageLevelClassifier, PixelSoftmaxClassifier
from .core import to_grayscale
from .guided_filter import refine_probmap
from .metrics import miou
from .otsu import otsu_mask
from .selection import SelectionPolicy, binarize, select_reliable

__all__ = [
    "IterationReport",
    "bootstrap_transfer",
    "bootstrap_simple_to_complex",
    "bootstrap_cam",
    "SelfTrainingLabeler",
    "sweep_filter_params",
]


@dataclass(frozen=True)
class IterationReport:
    """One self-training round: validation score and selection counts."""

    round: int
    miou: float
    n_selected: int
    n_rejected: int
    checkpoint: str

    def line(self) -> str:
        return f"{self.round} {self.miou:.6f} {self.n_selected} {self.n_rejected}"


def bootstrap_transfer(classifier, source_images, source_masks, target_images):
    """Train on the labelled source domain, predict masks for the targets."""
    if len(source_images) == 0:
        raise ValueError("source dataset is empty")
    classifier.fit(source_images, source_masks)
    return [classifier.predict(img) for img in target_images]


def bootstrap_simple_to_complex(classifier, simple_images, complex_images, polarity="auto"):
    """Threshold the easy images, train on those masks, predict the hard ones."""
    if len(simple_images) == 0:
        raise ValueError("no simple images to bootstrap from")
    masks = [otsu_mask(img, polarity) for img in simple_images]
    classifier.fit(simple_images, masks)
    return [classifier.predict(img) for img in complex_images]


def bootstrap_cam(
    image_classifier: ImageLevelClassifier,
    images,
    labels,
    cam_tau: float = 0.2,
    gf_radius: int = 2,
    gf_eps: float = 0.01,
):
    """Initial masks from class activation maps.

    Pixels take class argmax(activation) + 1 where the peak normalised
    activation reaches `cam_tau`, else background; the hard map is then
    guided-filter refined against the grayscale image and re-binarized.
    Requires at least two image-level classes.
    """
    labels = np.asarray(labels)
    if len(images) == 0:
        raise ValueError("no images to bootstrap from")
    if np.unique(labels).size < 2:
        raise ValueError("activation-map bootstrapping needs >= 2 image-level classes")
    if not 0.0 < cam_tau < 1.0:
        raise ValueError(f"cam_tau must lie in (0, 1), got {cam_tau}")
    image_classifier.fit(images, labels)
    n_img_classes = image_classifier.n_classes
    out = []
    for img in images:
        act = image_classifier.class_activation_maps(img)
        peak = act.max(axis=2)
        hard = np.where(peak >= cam_tau, np.argmax(act, axis=2) + 1, 0)
        probs = np.zeros(hard.shape + (n_img_classes + 1,))
        h_idx, w_idx = np.indices(hard.shape)
        probs[h_idx, w_idx, hard] = 1.0
        refined = refine_probmap(to_grayscale(img), probs, gf_radius, gf_eps)
        out.append(binarize(refined))
    return out


class SelfTrainingLabeler(BaseEstimator):
    """Iterative pseudo-label refinement around a pixel classifier.

    Parameters
    ----------
    classifier : PixelSoftmaxClassifier, optional
        Configured (optionally pre-fitted) segmenter. A deep copy is
        trained, so the caller's instance is untouched. When the copy is
        already fitted and `reinit` is False, round 1 fine-tunes the
        bootstrap weights.
    lo, hi : float
        Area-ratio band for pseudo-label selection, bounds inclusive.
    binarize_tau : float
        Foreground threshold when hardening two-class probability maps.
    max_rounds : int
        Upper bound on training rounds.
    patience : int
        Stop after this many consecutive rounds without a new best
        validation mIoU.
    reinit : bool
        Retrain from scratch each round instead of fine-tuning the
        previous round's weights.
    """

    def __init__(
        self,
        classifier=None,
        lo: float = 0.1,
        hi: float = 0.9,
        binarize_tau: float = 0.5,
        max_rounds: int = 8,
        patience: int = 1,
        reinit: bool = False,
    ):
        self.classifier = classifier
        self.lo = lo
        self.hi = hi
        self.binarize_tau = binarize_tau
        self.max_rounds = max_rounds
        self.patience = patience
        self.reinit = reinit

    def _predict_mask(self, clf, image):
        return binarize(clf.predict_proba(image), self.binarize_tau)

    def fit(self, images, initial_masks, val_images, val_masks, callback=None):
        """Run the refinement loop; `callback(report, masks)` fires per round."""
        if self.max_rounds < 1 or self.patience < 1:
            raise ValueError("max_rounds and patience must be >= 1")
        if len(images) != len(initial_masks):
            raise ValueError("initial_masks must align with images")
        if len(val_images) == 0 or len(val_images) != len(val_masks):
            raise ValueError("need a non-empty validation split with ground truth")
        policy = SelectionPolicy(self.lo, self.hi, self.binarize_tau)
        clf = copy.deepcopy(self.classifier) if self.classifier is not None else PixelSoftmaxClassifier()
        clf.set_params(warm_start=not self.reinit)

        masks = list(initial_masks)
        reports: list[IterationReport] = []
        best = None  # (miou, round, params, masks)
        stop_reason = "max_rounds"
        no_improve = 0
        for rnd in range(1, self.max_rounds + 1):
            selected, rejected = select_reliable(masks, policy)
            if not selected:
                stop_reason = "no_selected"
                break
            clf.fit([images[i] for i in selected], [masks[i] for i in selected])
            masks = [self._predict_mask(clf, img) for img in images]
            val_pred = [self._predict_mask(clf, img) for img in val_images]
            score = miou(val_pred, val_masks, clf.n_classes)
            report = IterationReport(rnd, score, len(selected), len(rejected), f"round_{rnd:02d}")
            reports.append(report)
            if callback is not None:
                callback(report, masks)
            if best is None or score > best[0]:
                best = (score, rnd, clf.to_params(), masks)
                no_improve = 0
            else:
                no_improve += 1
                if no_improve >= self.patience:
                    stop_reason = "no_growth"
                    break
        if best is None:
            raise ValueError("no round selected any pseudo labels; nothing was trained")

        self.reports_ = reports
        self.stop_reason_ = stop_reason
        self.best_miou_, self.best_round_, self.best_params_, self.masks_ = best
        self.classifier_ = PixelSoftmaxClassifier.from_params(
            self.best_params_,
            gf_radius=clf.gf_radius,
            gf_eps=clf.gf_eps,
            binarize_tau=self.binarize_tau,
        )
        return self

    def predict(self, image):
        check_is_fitted(self, "classifier_")
        return self._predict_mask(self.classifier_, image)


def sweep_filter_params(classifier, val_images, val_masks, radii, epsilons):
    """Grid-search the refinement radius and regularizer on a validation split.

    Returns (results, best): `results` holds one (radius, eps, miou) per
    combination in grid order; `best` is the first highest-scoring entry.
    """
    check_is_fitted(classifier, "weights_")
    radii = list(radii)
    epsilons = list(epsilons)
    if not radii or not epsilons:
        raise ValueError("need at least one radius and one eps candidate")
    if len(val_images) == 0 or len(val_images) != len(val_masks):
        raise ValueError("need a non-empty validation split with ground truth")
    results = []
    for r in radii:
        for eps in epsilons:
            preds = [
                classifier.predict(img, gf_radius=r, gf_eps=eps) for img in val_images
            ]
            results.append((r, eps, miou(preds, val_masks, classifier.n_classes)))
    best = max(results, key=lambda t: t[2])
    return results, best
