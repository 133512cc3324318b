"""The handcrafted feature recipe: channel contract and composition."""

import numpy as np

from autolabel.core import box_mean
from autolabel.features import extract_features, feature_spec, fused_features, n_channels
from autolabel.fusion import add_boundary_detail, multiply_features


def test_channel_counts_match():
    img = np.random.default_rng(0).random((8, 8, 3))
    low, high = extract_features(img)
    assert low.shape == high.shape == (8, 8, n_channels())


def test_constant_image_flat_channels():
    img = np.full((6, 6, 3), 0.5)
    low, _ = extract_features(img)
    # colour and gray channels constant, the edge channel exactly zero
    for c in range(4):
        assert np.ptp(low[:, :, c]) == 0.0
    assert (low[:, :, 4] == 0).all()


def test_high_is_box_mean_of_low(rng):
    img = rng.random((9, 7, 3))
    low, high = extract_features(img, high_radius=3)
    for c in range(low.shape[2]):
        assert np.abs(high[:, :, c] - box_mean(low[:, :, c], 3)).max() < 1e-12


def test_coordinate_channels(rng):
    img = rng.random((4, 8, 3))
    low, _ = extract_features(img)
    assert low[0, 0, 5] == 0.0 and low[0, 0, 6] == 0.0
    assert low[0, 7, 5] == 7 / 8
    assert low[3, 0, 6] == 3 / 4


def test_fused_composition(rng):
    img = rng.random((6, 6, 3))
    low, high = extract_features(img, 2)
    gated = multiply_features(high, low)
    expected = add_boundary_detail(high, gated)
    fused, guide = fused_features(img, 2)
    np.testing.assert_array_equal(fused, expected)
    np.testing.assert_array_equal(guide, gated[:, :, 0])


def test_guide_is_smoothed_red_times_red(rng):
    img = rng.random((5, 5, 3))
    _, guide = fused_features(img, 2)
    expected = box_mean(img[:, :, 0], 2) * img[:, :, 0]
    assert np.abs(guide - expected).max() < 1e-12


def test_feature_spec_encodes_radius():
    assert feature_spec(4) != feature_spec(2)
    assert feature_spec(4).endswith("r4")


def test_deterministic(rng):
    img = rng.random((8, 8, 3))
    a = extract_features(img)
    b = extract_features(img)
    np.testing.assert_array_equal(a[0], b[0])
    np.testing.assert_array_equal(a[1], b[1])
