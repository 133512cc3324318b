"""Binary PGM/PPM round-trips and malformed-file errors."""

import numpy as np
import pytest

from autolabel.pnm import (
    PnmHeaderError,
    PnmMaxvalError,
    PnmPayloadError,
    load_mask,
    load_pnm,
    save_mask,
    save_pnm,
)


def test_load_p5_scales_bytes(tmp_path):
    path = tmp_path / "a.pgm"
    path.write_bytes(b"P5\n2 2\n255\n" + bytes([0, 255, 128, 64]))
    plane = load_pnm(path)
    assert plane.shape == (2, 2)
    np.testing.assert_array_equal(plane, np.array([[0, 255], [128, 64]]) / 255.0)


def test_load_p6_pure_red(tmp_path):
    path = tmp_path / "a.ppm"
    path.write_bytes(b"P6\n1 1\n255\n" + bytes([255, 0, 0]))
    img = load_pnm(path)
    assert img.shape == (1, 1, 3)
    np.testing.assert_array_equal(img[0, 0], [1.0, 0.0, 0.0])


def test_unsupported_magic(tmp_path):
    path = tmp_path / "a.pnm"
    path.write_bytes(b"P7\n1 1\n255\n\x00")
    with pytest.raises(PnmHeaderError):
        load_pnm(path)


def test_malformed_header_token(tmp_path):
    path = tmp_path / "a.pgm"
    path.write_bytes(b"P5\n2 x\n255\n\x00\x00\x00\x00")
    with pytest.raises(PnmHeaderError):
        load_pnm(path)


def test_truncated_payload(tmp_path):
    path = tmp_path / "a.pgm"
    path.write_bytes(b"P5\n2 2\n255\n\x00\x00")
    with pytest.raises(PnmPayloadError):
        load_pnm(path)


def test_unsupported_maxval(tmp_path):
    path = tmp_path / "a.pgm"
    path.write_bytes(b"P5\n1 1\n65535\n\x00\x00")
    with pytest.raises(PnmMaxvalError):
        load_pnm(path)


def test_header_comment_allowed(tmp_path):
    path = tmp_path / "a.pgm"
    path.write_bytes(b"P5\n# remark\n1 1\n255\n\x7f")
    assert load_pnm(path)[0, 0] == 127 / 255.0


def test_roundtrip_quantization_bound(tmp_path, rng):
    plane = rng.random((8, 8))
    save_pnm(plane, tmp_path / "p.pgm")
    back = load_pnm(tmp_path / "p.pgm")
    assert np.abs(plane - back).max() <= 1.0 / 510.0


def test_roundtrip_image(tmp_path, rng):
    img = rng.random((5, 7, 3))
    save_pnm(img, tmp_path / "i.ppm")
    back = load_pnm(tmp_path / "i.ppm")
    assert back.shape == (5, 7, 3)
    assert np.abs(img - back).max() <= 1.0 / 510.0


def test_save_zeros_payload(tmp_path):
    save_pnm(np.zeros((3, 4)), tmp_path / "z.pgm")
    data = (tmp_path / "z.pgm").read_bytes()
    assert data.endswith(b"\x00" * 12)


def test_save_ones_image_payload(tmp_path):
    save_pnm(np.ones((2, 2, 3)), tmp_path / "o.ppm")
    data = (tmp_path / "o.ppm").read_bytes()
    assert data.endswith(b"\xff" * 12)


def test_save_rejects_out_of_range(tmp_path):
    with pytest.raises(ValueError):
        save_pnm(np.full((2, 2), 1.5), tmp_path / "bad.pgm")


def test_mask_bytes_unscaled(tmp_path, rng):
    mask = rng.integers(0, 5, (6, 9))
    save_mask(mask, tmp_path / "m.pgm")
    np.testing.assert_array_equal(load_mask(tmp_path / "m.pgm"), mask)
    payload = (tmp_path / "m.pgm").read_bytes().split(b"255\n", 1)[1]
    assert payload == mask.astype(np.uint8).tobytes()


def test_mask_id_cap(tmp_path):
    with pytest.raises(ValueError):
        save_mask(np.full((2, 2), 255, dtype=np.int64), tmp_path / "m.pgm")


def test_missing_file():
    with pytest.raises(FileNotFoundError):
        load_pnm("/nonexistent/path.pgm")
