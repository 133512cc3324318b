"""Threshold selection against a brute-force oracle, and mask polarity."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from autolabel.otsu import otsu_mask, otsu_threshold, quantize_bins


def _otsu_brute_force(hist):
    """Evaluate the between-class variance at every threshold with exact
    integer statistics and track the first maximum."""
    counts = [int(c) for c in hist]
    total = sum(counts)
    weighted = sum(b * c for b, c in zip(range(256), counts))
    best_t, best_var = 0, -1.0
    n0 = s0 = 0
    for t in range(256):
        n0 += counts[t]
        s0 += t * counts[t]
        n1 = total - n0
        s1 = weighted - s0
        if n0 == 0 or n1 == 0:
            var = 0.0
        else:
            m0 = s0 / n0
            m1 = s1 / n1
            var = (n0 / total) * (n1 / total) * (m0 - m1) ** 2
        if var > best_var:
            best_t, best_var = t, var
    return best_t


def test_two_point_histogram_tie_break():
    hist = np.zeros(256, dtype=int)
    hist[10] = 5
    hist[200] = 7
    assert otsu_threshold(hist) == 10


def test_single_bin_degenerate():
    hist = np.zeros(256, dtype=int)
    hist[128] = 50
    assert otsu_threshold(hist) == 0


def test_empty_histogram():
    with pytest.raises(ValueError):
        otsu_threshold(np.zeros(256, dtype=int))


def test_matches_brute_force(rng):
    for _ in range(200):
        hist = rng.integers(0, 50, 256)
        assert otsu_threshold(hist) == _otsu_brute_force(hist)


def test_sparse_histograms_match_brute_force(rng):
    for _ in range(100):
        hist = np.zeros(256, dtype=int)
        idx = rng.choice(256, size=rng.integers(1, 6), replace=False)
        hist[idx] = rng.integers(1, 100, idx.size)
        assert otsu_threshold(hist) == _otsu_brute_force(hist)


@given(shift=st.integers(1, 60))
@settings(max_examples=30, deadline=None)
def test_monotone_shift(shift):
    rng = np.random.default_rng(99)
    hist = np.zeros(256, dtype=int)
    hist[20:120] = rng.integers(0, 30, 100)
    hist[20] = 5  # keep mass at the edges so the argmax is interior
    base = otsu_threshold(hist)
    shifted = np.zeros(256, dtype=int)
    shifted[20 + shift : 120 + shift] = hist[20:120]
    assert otsu_threshold(shifted) == base + shift


def _two_tone(frac_fg=0.3, lo=0.2, hi=0.8):
    img = np.full((20, 20, 3), hi)
    n_fg = int(frac_fg * 400)
    img.reshape(-1, 3)[:n_fg] = lo
    return img, (np.arange(400) < n_fg).reshape(20, 20).astype(int)


def test_mask_dark_disk_auto():
    img = np.ones((16, 16, 3)) * 0.9
    yy, xx = np.mgrid[0:16, 0:16]
    disk = (yy - 8) ** 2 + (xx - 8) ** 2 <= 16
    img[disk] = 0.1
    mask = otsu_mask(img, "auto")
    np.testing.assert_array_equal(mask, disk.astype(int))


def test_mask_uniform_image_all_background():
    img = np.full((8, 8, 3), 0.5)
    assert (otsu_mask(img, "auto") == 0).all()


def test_mask_two_tone_exact():
    img, gt = _two_tone()
    np.testing.assert_array_equal(otsu_mask(img, "auto"), gt)


def test_mask_polarity_flip():
    img, gt = _two_tone()
    np.testing.assert_array_equal(otsu_mask(img, "fg-dark"), gt)
    np.testing.assert_array_equal(otsu_mask(img, "fg-bright"), 1 - gt)


def test_mask_pixel_permutation_threshold_invariant(rng):
    img = rng.random((10, 10, 3))
    flat = img.reshape(-1, 3).copy()
    rng.shuffle(flat, axis=0)
    shuffled = flat.reshape(10, 10, 3)
    assert otsu_mask(img).sum() == otsu_mask(shuffled).sum()


def test_quantize_round_half_up():
    assert quantize_bins(np.array([[0.0, 1.0, 0.5, 127.4 / 255.0, 127.6 / 255.0]])).tolist() == [
        [0, 255, 128, 127, 128]
    ]
