"""Bootstrap routes and the self-training loop contracts."""

import numpy as np
import pytest

from autolabel.classifier import ImageLevelClassifier, PixelSoftmaxClassifier
from autolabel.metrics import iou, miou
from autolabel.selftrain import (
    SelfTrainingLabeler,
    bootstrap_cam,
    bootstrap_simple_to_complex,
    bootstrap_transfer,
    sweep_filter_params,
)
from autolabel.synth import SceneSpec, gen_complex, gen_simple

FAST = dict(
    high_radius=1,
    gf_radius=1,
    gf_eps=1e-3,
    momentum=0.85,
    learning_rate=0.15,
    epochs=6,
    lr_decay_every=3,
    lr_decay_factor=3.0,
)


def _split(pairs):
    return [im for im, _ in pairs], [m for _, m in pairs]


def test_transfer_same_family_quality():
    data = gen_complex(SceneSpec(seed=51), 90)
    src_im, src_gt = _split(data[:60])
    tgt_im, tgt_gt = _split(data[60:])
    clf = PixelSoftmaxClassifier(random_state=0, **{**FAST, "epochs": 12, "lr_decay_every": 4})
    masks = bootstrap_transfer(clf, src_im, src_gt, tgt_im)
    assert miou(masks, tgt_gt, 2) >= 0.5


def test_transfer_empty_target():
    data = gen_complex(SceneSpec(seed=52), 6)
    clf = PixelSoftmaxClassifier(random_state=0, **{**FAST, "epochs": 1})
    assert bootstrap_transfer(clf, *_split(data), []) == []


def test_transfer_empty_source():
    clf = PixelSoftmaxClassifier(random_state=0)
    with pytest.raises(ValueError):
        bootstrap_transfer(clf, [], [], [])


def test_transfer_deterministic():
    data = gen_complex(SceneSpec(seed=53), 12)
    src_im, src_gt = _split(data[:8])
    tgt_im, _ = _split(data[8:])
    runs = []
    for _ in range(2):
        clf = PixelSoftmaxClassifier(random_state=5, **{**FAST, "epochs": 2})
        runs.append(bootstrap_transfer(clf, src_im, src_gt, tgt_im))
    for a, b in zip(*runs):
        np.testing.assert_array_equal(a, b)


def test_simple_to_complex_requires_simple_images():
    clf = PixelSoftmaxClassifier(random_state=0)
    with pytest.raises(ValueError):
        bootstrap_simple_to_complex(clf, [], [])


def test_simple_to_complex_beats_otsu_on_complex():
    from autolabel.otsu import otsu_mask

    simple_im, _ = _split(gen_simple(SceneSpec(seed=54), 64))
    cplx = gen_complex(SceneSpec(seed=55), 30)
    cplx_im, cplx_gt = _split(cplx)
    clf = PixelSoftmaxClassifier(random_state=0, **FAST)
    masks = bootstrap_simple_to_complex(clf, simple_im, cplx_im)
    learned = miou(masks, cplx_gt, 2)
    thresholded = miou([otsu_mask(im) for im in cplx_im], cplx_gt, 2)
    assert learned > thresholded


def _color_toy(n, seed):
    pairs = gen_simple(SceneSpec(seed=seed), n)
    images, gts, labels = [], [], []
    for i, (img, mask) in enumerate(pairs):
        img = img.copy()
        cls = i % 3
        if cls == 1:
            img[mask > 0] = img[mask > 0][:, [1, 0, 2]]
        elif cls == 2:
            img[mask > 0] = img[mask > 0][:, [2, 1, 0]]
        images.append(img)
        gts.append(mask)
        labels.append(cls)
    return images, gts, labels


def test_cam_requires_two_classes():
    images, _, _ = _color_toy(4, 56)
    clf = ImageLevelClassifier(n_classes=2, random_state=0)
    with pytest.raises(ValueError):
        bootstrap_cam(clf, images, [0, 0, 0, 0])
    with pytest.raises(ValueError):
        bootstrap_cam(clf, [], [])


def test_cam_localizes_objects():
    images, gts, labels = _color_toy(45, 57)
    clf = ImageLevelClassifier(
        n_classes=3, learning_rate=0.5, epochs=30, lr_decay_every=10,
        lr_decay_factor=3.0, high_radius=1, random_state=0,
    )
    masks = bootstrap_cam(clf, images, labels, cam_tau=0.2, gf_radius=1, gf_eps=1e-3)
    own = [iou((m == lbl + 1).astype(int), g, 1) for m, g, lbl in zip(masks, gts, labels)]
    assert np.mean(own) >= 0.3


def test_cam_deterministic():
    images, _, labels = _color_toy(9, 58)
    runs = []
    for _ in range(2):
        clf = ImageLevelClassifier(n_classes=3, epochs=3, learning_rate=0.3, random_state=4)
        runs.append(bootstrap_cam(clf, images, labels))
    for a, b in zip(*runs):
        np.testing.assert_array_equal(a, b)


def _loop_fixture(n_pool=24, n_val=10):
    simple_im, _ = _split(gen_simple(SceneSpec(seed=59), 48))
    data = gen_complex(SceneSpec(seed=60), n_pool + n_val)
    pool_im, _ = _split(data[:n_pool])
    val_im, val_gt = _split(data[n_pool:])
    clf = PixelSoftmaxClassifier(random_state=0, **FAST)
    initial = bootstrap_simple_to_complex(clf, simple_im, pool_im)
    return clf, pool_im, initial, val_im, val_gt


def test_single_round_loop():
    clf, pool_im, initial, val_im, val_gt = _loop_fixture()
    labeler = SelfTrainingLabeler(classifier=clf, max_rounds=1)
    labeler.fit(pool_im, initial, val_im, val_gt)
    assert len(labeler.reports_) == 1
    assert labeler.best_round_ == 1
    assert len(labeler.masks_) == len(pool_im)


def test_loop_returns_argmax_round():
    clf, pool_im, initial, val_im, val_gt = _loop_fixture()
    labeler = SelfTrainingLabeler(classifier=clf, max_rounds=4, patience=4)
    labeler.fit(pool_im, initial, val_im, val_gt)
    scores = [r.miou for r in labeler.reports_]
    assert labeler.best_miou_ == max(scores)
    assert labeler.best_round_ == scores.index(max(scores)) + 1
    # selected + rejected always partitions the pool
    for r in labeler.reports_:
        assert r.n_selected + r.n_rejected == len(pool_im)
        assert 0.0 <= r.miou <= 1.0


def test_loop_deterministic():
    runs = []
    for _ in range(2):
        clf, pool_im, initial, val_im, val_gt = _loop_fixture()
        labeler = SelfTrainingLabeler(classifier=clf, max_rounds=2, patience=2)
        labeler.fit(pool_im, initial, val_im, val_gt)
        runs.append(labeler)
    assert [r.line() for r in runs[0].reports_] == [r.line() for r in runs[1].reports_]
    for a, b in zip(runs[0].masks_, runs[1].masks_):
        np.testing.assert_array_equal(a, b)
    np.testing.assert_array_equal(runs[0].best_params_.weights, runs[1].best_params_.weights)


def test_loop_stops_without_selection():
    clf, pool_im, _, val_im, val_gt = _loop_fixture()
    empty = [np.zeros(im.shape[:2], dtype=int) for im in pool_im]
    labeler = SelfTrainingLabeler(classifier=clf, max_rounds=3)
    with pytest.raises(ValueError):
        labeler.fit(pool_im, empty, val_im, val_gt)


def test_loop_callback_fires_per_round():
    clf, pool_im, initial, val_im, val_gt = _loop_fixture()
    seen = []
    labeler = SelfTrainingLabeler(classifier=clf, max_rounds=2, patience=2)
    labeler.fit(pool_im, initial, val_im, val_gt, callback=lambda rep, masks: seen.append((rep.round, len(masks))))
    assert seen == [(1, len(pool_im)), (2, len(pool_im))]


def test_loop_does_not_mutate_caller_classifier():
    clf, pool_im, initial, val_im, val_gt = _loop_fixture()
    w_before = clf.weights_.copy()
    labeler = SelfTrainingLabeler(classifier=clf, max_rounds=1)
    labeler.fit(pool_im, initial, val_im, val_gt)
    np.testing.assert_array_equal(clf.weights_, w_before)


def test_loop_validates_arguments():
    clf, pool_im, initial, val_im, val_gt = _loop_fixture()
    with pytest.raises(ValueError):
        SelfTrainingLabeler(classifier=clf, max_rounds=0).fit(pool_im, initial, val_im, val_gt)
    with pytest.raises(ValueError):
        SelfTrainingLabeler(classifier=clf).fit(pool_im, initial[:-1], val_im, val_gt)
    with pytest.raises(ValueError):
        SelfTrainingLabeler(classifier=clf).fit(pool_im, initial, [], [])


def test_sweep_grid_order_and_best():
    clf, pool_im, initial, val_im, val_gt = _loop_fixture()
    results, best = sweep_filter_params(clf, val_im, val_gt, [1, 2], [1e-3, 1e-1])
    assert [(r, e) for r, e, _ in results] == [(1, 1e-3), (1, 1e-1), (2, 1e-3), (2, 1e-1)]
    assert best == max(results, key=lambda t: t[2])
    with pytest.raises(ValueError):
        sweep_filter_params(clf, val_im, val_gt, [], [1e-3])
