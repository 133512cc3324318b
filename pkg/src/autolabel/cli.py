"""Command-line interface.

Subcommands cover the full pipeline: synthetic dataset generation,
mask bootstrapping, iterative refinement, evaluation, parameter sweeps,
and single-shot utilities (thresholding, boundary maps, guided filtering,
overlay rendering).

Exit codes: 0 ok, 1 usage error, 2 runtime error.
"""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from .classifier import ImageLevelClassifier, PixelSoftmaxClassifier, load_model, save_model
from .config import load_config, resolve
from .core import to_grayscale
from .dataset import load_dataset, read_manifest, write_dataset
from .guided_filter import guided_filter, refine_probmap
from .metrics import format_metrics
from .morphology import PoolSpec, boundary_map
from .otsu import otsu_mask
from .pnm import load_mask, load_pnm, save_mask, save_pnm
from .selftrain import (
    SelfTrainingLabeler,
    bootstrap_cam,
    bootstrap_simple_to_complex,
    bootstrap_transfer,
    sweep_filter_params,
)
from .synth import SceneSpec, gen_samples

SEED_ENV = "AUTOLABEL_SEED"

# inspection palette for overlay rendering, one colour per class id - 1
_PALETTE = np.array(
    [
        [0.9, 0.1, 0.1],
        [0.1, 0.6, 0.9],
        [0.95, 0.8, 0.1],
        [0.5, 0.1, 0.8],
        [0.1, 0.8, 0.3],
    ]
)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.exit(1, f"usage error: {message}\n")


def _resolve_seed(flag, cfg: dict[str, str]) -> int:
    if flag is not None:
        return int(flag)
    if "seed" in cfg:
        return int(cfg["seed"])
    return int(os.environ.get(SEED_ENV, "0"))


def _mask_name(image_path: str) -> str:
    return os.path.splitext(os.path.basename(image_path))[0] + ".pgm"


def _classifier_from_config(cfg: dict[str, str], seed: int) -> PixelSoftmaxClassifier:
    return PixelSoftmaxClassifier(
        n_classes=int(cfg.get("classes", 2)),
        learning_rate=float(cfg.get("learning_rate", 0.007)),
        momentum=float(cfg.get("momentum", 0.9)),
        weight_decay=float(cfg.get("weight_decay", 0.0002)),
        batch_size=int(cfg.get("batch_size", 8)),
        epochs=int(cfg.get("epochs", 10)),
        lr_decay_every=int(cfg.get("lr_decay_every", 5)),
        lr_decay_factor=float(cfg.get("lr_decay_factor", 10.0)),
        high_radius=int(cfg.get("high_radius", 4)),
        gf_radius=int(cfg.get("gf_radius", 2)),
        gf_eps=float(cfg.get("gf_eps", 0.01)),
        binarize_tau=float(cfg.get("binarize_tau", 0.5)),
        random_state=seed,
    )


def _split_target(cfg: dict[str, str]):
    """Target dataset -> (pool images, pool paths, val images, val gt masks)."""
    target_dir = cfg.get("target")
    if not target_dir:
        raise ValueError("config key 'target' is required")
    records = read_manifest(target_dir)
    val_count = int(cfg.get("val_count", 0))
    if not 0 <= val_count < len(records):
        raise ValueError(f"val_count must lie in [0, {len(records)}), got {val_count}")
    pool, val = records[: len(records) - val_count], records[len(records) - val_count :]
    pool_images = [load_pnm(p) for p, _, _ in pool]
    pool_paths = [p for p, _, _ in pool]
    val_images = [load_pnm(p) for p, _, _ in val]
    val_masks = []
    for _, mask_path, _ in val:
        if mask_path is None:
            raise ValueError("validation records need ground-truth masks")
        val_masks.append(load_mask(mask_path))
    return pool_images, pool_paths, val_images, val_masks


def cmd_gen(args) -> int:
    seed = _resolve_seed(args.seed, {})
    spec = SceneSpec(side=args.side, seed=seed)
    samples = gen_samples(spec, args.n, args.mode)
    write_dataset(args.out, [(img, mask) for img, mask, _ in samples], [s for _, _, s in samples])
    print(f"wrote {args.n} {args.mode} samples to {args.out}")
    return 0


def cmd_otsu(args) -> int:
    img = load_pnm(args.input)
    if img.ndim != 3:
        raise ValueError("otsu expects a PPM image")
    save_mask(otsu_mask(img, args.polarity), args.out)
    return 0


def cmd_boundary(args) -> int:
    arr = load_pnm(args.input)
    plane = to_grayscale(arr) if arr.ndim == 3 else arr
    spec = PoolSpec(kernel=args.kernel, stride=1, padding=(args.kernel - 1) // 2)
    save_pnm(np.clip(boundary_map(plane, spec), 0.0, 1.0), args.out)
    return 0


def cmd_guide(args) -> int:
    img = load_pnm(args.image)
    if img.ndim != 3:
        raise ValueError("guide expects a PPM guidance image")
    guide = to_grayscale(img)
    in_paths = args.prob.split(",")
    out_paths = args.out.split(",")
    if len(in_paths) != len(out_paths):
        raise ValueError(f"{len(in_paths)} inputs but {len(out_paths)} outputs")
    planes = [load_pnm(p) for p in in_paths]
    if any(p.ndim != 2 for p in planes):
        raise ValueError("probability inputs must be PGM planes")
    if len(planes) == 1:
        results = [np.clip(guided_filter(guide, planes[0], args.r, args.eps), 0.0, 1.0)]
    else:
        probs = np.stack(planes, axis=2)
        sums = probs.sum(axis=2, keepdims=True)
        if (sums == 0).any():
            raise ValueError("probability planes sum to zero at some pixel")
        refined = refine_probmap(guide, probs / sums, args.r, args.eps)
        results = [refined[:, :, c] for c in range(refined.shape[2])]
    for plane, path in zip(results, out_paths):
        save_pnm(plane, path)
    return 0


def cmd_overlay(args) -> int:
    img = load_pnm(args.image)
    if img.ndim != 3:
        raise ValueError("overlay expects a PPM image")
    mask = load_mask(args.mask)
    if mask.shape != img.shape[:2]:
        raise ValueError(f"mask {mask.shape} does not match image {img.shape[:2]}")
    out = img.copy()
    fg = mask > 0
    colors = _PALETTE[(mask[fg] - 1) % len(_PALETTE)]
    out[fg] = 0.5 * img[fg] + 0.5 * colors
    save_pnm(out, args.out)
    return 0


def cmd_eval(args) -> int:
    names = sorted(n for n in os.listdir(args.pred) if n.endswith(".pgm"))
    if not names:
        raise ValueError(f"no .pgm masks under {args.pred}")
    preds, gts = [], []
    for name in names:
        gt_path = os.path.join(args.gt, name)
        if not os.path.exists(gt_path):
            raise ValueError(f"missing ground truth for {name}")
        preds.append(load_mask(os.path.join(args.pred, name)))
        gts.append(load_mask(gt_path))
    print(format_metrics(preds, gts, args.classes))
    return 0


def cmd_bootstrap(args) -> int:
    cfg = load_config(args.config)
    strategy = resolve(args.strategy, cfg, "strategy", "simple2complex")
    seed = _resolve_seed(args.seed, cfg)
    if strategy not in ("transfer", "simple2complex", "cam"):
        raise ValueError(f"unknown strategy {strategy!r}")

    target_dir = cfg.get("target")
    if not target_dir:
        raise ValueError("config key 'target' is required")
    records = read_manifest(target_dir)
    target_images = [load_pnm(p) for p, _, _ in records]
    target_paths = [p for p, _, _ in records]

    if strategy == "transfer":
        source_dir = cfg.get("source")
        if not source_dir:
            raise ValueError("transfer strategy needs config key 'source'")
        src_images, src_masks, _ = load_dataset(source_dir)
        if any(m is None for m in src_masks):
            raise ValueError("source dataset must be fully labelled")
        clf = _classifier_from_config(cfg, seed)
        masks = bootstrap_transfer(clf, src_images, src_masks, target_images)
        params = clf.to_params()
    elif strategy == "simple2complex":
        simple_dir = cfg.get("simple")
        if not simple_dir:
            raise ValueError("simple2complex strategy needs config key 'simple'")
        simple_images, _, _ = load_dataset(simple_dir)
        clf = _classifier_from_config(cfg, seed)
        masks = bootstrap_simple_to_complex(
            clf, simple_images, target_images, cfg.get("polarity", "auto")
        )
        params = clf.to_params()
    else:
        labels = [lbl for _, _, lbl in records]
        if any(lbl is None for lbl in labels):
            raise ValueError("cam strategy needs image-level labels in the target manifest")
        img_clf = ImageLevelClassifier(
            n_classes=int(cfg.get("image_classes", max(labels) + 1)),
            learning_rate=float(cfg.get("learning_rate", 0.007)),
            momentum=float(cfg.get("momentum", 0.9)),
            weight_decay=float(cfg.get("weight_decay", 0.0002)),
            batch_size=int(cfg.get("batch_size", 8)),
            epochs=int(cfg.get("epochs", 10)),
            lr_decay_every=int(cfg.get("lr_decay_every", 5)),
            lr_decay_factor=float(cfg.get("lr_decay_factor", 10.0)),
            high_radius=int(cfg.get("high_radius", 4)),
            random_state=seed,
        )
        masks = bootstrap_cam(
            img_clf,
            target_images,
            labels,
            cam_tau=float(cfg.get("cam_tau", 0.2)),
            gf_radius=int(cfg.get("gf_radius", 2)),
            gf_eps=float(cfg.get("gf_eps", 0.01)),
        )
        params = img_clf.to_params()

    mask_dir = os.path.join(args.out, "masks")
    os.makedirs(mask_dir, exist_ok=True)
    for path, mask in zip(target_paths, masks):
        save_mask(mask, os.path.join(mask_dir, _mask_name(path)))
    save_model(params, os.path.join(args.out, "model.bin"))
    print(f"bootstrap strategy={strategy} masks={len(masks)} out={args.out}")
    return 0


def cmd_iterate(args) -> int:
    cfg = load_config(args.config)
    seed = _resolve_seed(args.seed, cfg)
    rounds = resolve(args.rounds, cfg, "rounds", 8, int)
    pool_images, pool_paths, val_images, val_masks = _split_target(cfg)
    if not val_images:
        raise ValueError("iterate needs val_count > 0 for validation scoring")

    masks_dir = cfg.get("masks")
    if not masks_dir:
        raise ValueError("config key 'masks' is required (bootstrap output)")
    initial = [load_mask(os.path.join(masks_dir, _mask_name(p))) for p in pool_paths]

    clf = _classifier_from_config(cfg, seed)
    model_path = cfg.get("model")
    if model_path:
        params = load_model(model_path)
        clf = PixelSoftmaxClassifier.from_params(params, **{
            k: v for k, v in clf.get_params().items()
            if k not in ("n_classes", "high_radius")
        })

    os.makedirs(args.out, exist_ok=True)
    report_lines = []

    def emit(report, masks):
        round_dir = os.path.join(args.out, f"round_{report.round:02d}")
        os.makedirs(round_dir, exist_ok=True)
        for path, mask in zip(pool_paths, masks):
            save_mask(mask, os.path.join(round_dir, _mask_name(path)))
        report_lines.append(report.line())
        print(report.line())

    labeler = SelfTrainingLabeler(
        classifier=clf,
        lo=float(cfg.get("select_lo", 0.1)),
        hi=float(cfg.get("select_hi", 0.9)),
        binarize_tau=float(cfg.get("binarize_tau", 0.5)),
        max_rounds=rounds,
        patience=int(cfg.get("patience", 1)),
        reinit=cfg.get("reinit", "false").lower() in ("1", "true", "yes"),
    )
    labeler.fit(pool_images, initial, val_images, val_masks, callback=emit)

    with open(os.path.join(args.out, "report.txt"), "w") as fh:
        fh.write("\n".join(report_lines) + "\n")
    save_model(labeler.best_params_, os.path.join(args.out, "model.bin"))
    print(f"best_round={labeler.best_round_} miou={labeler.best_miou_:.6f} stop={labeler.stop_reason_}")
    return 0


def cmd_sweep(args) -> int:
    cfg = load_config(args.config)
    radii_raw = resolve(args.r_list, cfg, "r_list", "1,2,4")
    eps_raw = resolve(args.eps_list, cfg, "eps_list", "0.0001,0.01,1.0")
    radii = [int(tok) for tok in str(radii_raw).split(",") if tok]
    epsilons = [float(tok) for tok in str(eps_raw).split(",") if tok]

    model_path = cfg.get("model")
    if not model_path:
        raise ValueError("config key 'model' is required (a trained model to sweep)")
    clf = PixelSoftmaxClassifier.from_params(load_model(model_path))
    _, _, val_images, val_masks = _split_target(cfg)
    if not val_images:
        raise ValueError("sweep needs val_count > 0 in the target dataset")

    results, best = sweep_filter_params(clf, val_images, val_masks, radii, epsilons)
    for r, eps, score in results:
        print(f"r={r} eps={eps:g} miou={score:.6f}")
    print(f"best r={best[0]} eps={best[1]:g} miou={best[2]:.6f}")
    return 0


def build_parser() -> _Parser:
    parser = _Parser(prog="autolabel", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate a synthetic dataset")
    p.add_argument("--mode", choices=("simple", "complex"), required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--side", type=int, default=32)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("otsu", help="threshold an image into a binary mask")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--polarity", choices=("auto", "fg-bright", "fg-dark"), default="auto")
    p.set_defaults(func=cmd_otsu)

    p = sub.add_parser("boundary", help="pooling-difference boundary map")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--kernel", type=int, default=3)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_boundary)

    p = sub.add_parser("guide", help="guided-filter planes against an image")
    p.add_argument("--image", required=True)
    p.add_argument("--prob", required=True, help="comma-separated PGM planes")
    p.add_argument("--r", type=int, default=2)
    p.add_argument("--eps", type=float, default=0.01)
    p.add_argument("--out", required=True, help="comma-separated output paths")
    p.set_defaults(func=cmd_guide)

    p = sub.add_parser("bootstrap", help="generate initial masks for a target dataset")
    p.add_argument("--strategy", choices=("transfer", "simple2complex", "cam"), default=None)
    p.add_argument("--config", required=True)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_bootstrap)

    p = sub.add_parser("iterate", help="iteratively refine pseudo labels")
    p.add_argument("--config", required=True)
    p.add_argument("--rounds", type=int, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_iterate)

    p = sub.add_parser("eval", help="mIoU of predicted masks against ground truth")
    p.add_argument("--pred", required=True)
    p.add_argument("--gt", required=True)
    p.add_argument("--classes", type=int, required=True)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("sweep", help="grid-search guided-filter parameters")
    p.add_argument("--r-list", default=None)
    p.add_argument("--eps-list", default=None)
    p.add_argument("--config", required=True)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("overlay", help="alpha-blend a mask over its image")
    p.add_argument("--image", required=True)
    p.add_argument("--mask", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_overlay)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 1
    try:
        return args.func(args)
    except Exception as exc:  # contract violations -> one-line diagnostic
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
