"""Automatic pixel-level mask generation.

Bootstraps coarse object masks (domain transfer, threshold-on-easy-images,
or class activation maps), refines them with an edge-preserving guided
filter, and self-trains a pixel classifier on area-ratio-selected pseudo
labels until the validation mIoU stops improving.
"""

from .classifier import (
    ImageLevelClassifier,
    ModelParams,
    PixelSoftmaxClassifier,
    cross_entropy,
    load_model,
    save_model,
    softmax,
)
from .core import box_mean, integral_image, to_grayscale
from .features import extract_features, fused_features
from .fusion import add_boundary_detail, multiply_features
from .guided_filter import (
    guided_filter,
    guided_filter_naive,
    guided_filter_weights,
    refine_probmap,
)
from .metrics import format_metrics, iou, miou, per_class_iou, pixel_accuracy
from .morphology import PoolSpec, boundary_map, pool
from .otsu import otsu_mask, otsu_threshold
from .pnm import PnmError, load_mask, load_pnm, save_mask, save_pnm
from .selection import SelectionPolicy, area_ratio, binarize, select_reliable
from .selftrain import (
    IterationReport,
    SelfTrainingLabeler,
    bootstrap_cam,
    bootstrap_simple_to_complex,
    bootstrap_transfer,
    sweep_filter_params,
)
from .synth import SceneSpec, gen_complex, gen_samples, gen_simple

__version__ = "0.1.0"

__all__ = [
    "ImageLevelClassifier",
    "IterationReport",
    "ModelParams",
    "PixelSoftmaxClassifier",
    "PnmError",
    "PoolSpec",
    "SceneSpec",
    "SelectionPolicy",
    "SelfTrainingLabeler",
    "add_boundary_detail",
    "area_ratio",
    "binarize",
    "bootstrap_cam",
    "bootstrap_simple_to_complex",
    "bootstrap_transfer",
    "boundary_map",
    "box_mean",
    "cross_entropy",
    "extract_features",
    "format_metrics",
    "fused_features",
    "gen_complex",
    "gen_samples",
    "gen_simple",
    "guided_filter",
    "guided_filter_naive",
    "guided_filter_weights",
    "integral_image",
    "iou",
    "load_mask",
    "load_model",
    "load_pnm",
    "miou",
    "multiply_features",
    "otsu_mask",
    "otsu_threshold",
    "per_class_iou",
    "pixel_accuracy",
    "pool",
    "refine_probmap",
    "save_mask",
    "save_model",
    "save_pnm",
    "select_reliable",
    "softmax",
    "sweep_filter_params",
    "to_grayscale",
]
