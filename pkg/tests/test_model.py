import numpy as np
import pytest

from comply.errors import CheckpointError
from comply.model import (
    ComplexWeights,
    ModelMeta,
    WeightMode,
    init_weights,
    load_model,
    save_model,
)


def meta(seed=7, epochs=3):
    return ModelMeta(seed=seed, trained_epochs=epochs, vocab_hash=bytes(32))


def test_init_deterministic():
    a = init_weights(4, 10, WeightMode.COMPLEX, seed=7)
    b = init_weights(4, 10, WeightMode.COMPLEX, seed=7)
    assert np.array_equal(a.re, b.re) and np.array_equal(a.im, b.im)


def test_init_real_mode_contract():
    w = init_weights(4, 10, WeightMode.REAL_FLYVEC, seed=7)
    assert not np.any(w.im)
    assert w.re.shape == (4, 20)  # context + target blocks
    assert w.vocab_size == 10


def test_init_phases_cover_both_half_planes():
    # Gaussian components put each quadrant at probability 1/4; over 400
    # entries both signs of the imaginary part must appear many times.
    w = init_weights(8, 50, WeightMode.COMPLEX, seed=1)
    assert (w.im > 0).sum() > 50
    assert (w.im < 0).sum() > 50


def test_init_no_zero_rows():
    for seed in range(5):
        w = init_weights(6, 4, WeightMode.COMPLEX, seed=seed)
        norms = np.hypot(w.re, w.im).sum(axis=1)
        assert (norms > 0).all()


def test_init_distribution_scale():
    w = init_weights(20, 200, WeightMode.COMPLEX, seed=0)
    assert abs(float(w.re.std()) - 0.1) < 0.005
    assert abs(float(w.im.mean())) < 0.005


def test_param_count_parity():
    c = init_weights(4, 10, WeightMode.COMPLEX, seed=0)
    r = init_weights(4, 10, WeightMode.REAL_FLYVEC, seed=0)
    assert c.param_count == r.param_count == 2 * 4 * 10


def test_real_mode_rejects_nonzero_im():
    with pytest.raises(ValueError):
        ComplexWeights(
            mode=WeightMode.REAL_FLYVEC,
            re=np.ones((2, 4), dtype=np.float32),
            im=np.ones((2, 4), dtype=np.float32),
        )


def test_round_trip_bitwise(tmp_path):
    w = init_weights(5, 13, WeightMode.COMPLEX, seed=3)
    # make the payload look trained
    w.re[2, 7] = np.float32(0.123456789)
    path = tmp_path / "m.cply"
    save_model(w, meta(), path)
    loaded, m = load_model(path)
    assert np.array_equal(loaded.re, w.re)
    assert np.array_equal(loaded.im, w.im)
    assert loaded.re.dtype == np.float32
    assert (m.seed, m.trained_epochs, m.vocab_hash) == (7, 3, bytes(32))


def test_round_trip_real_mode(tmp_path):
    w = init_weights(3, 6, WeightMode.REAL_FLYVEC, seed=9)
    path = tmp_path / "m.cply"
    save_model(w, meta(), path)
    loaded, _ = load_model(path)
    assert loaded.mode == WeightMode.REAL_FLYVEC
    assert loaded.re.shape == (3, 12)
    assert np.array_equal(loaded.re, w.re)


def test_load_rejects_bad_magic(tmp_path):
    w = init_weights(2, 3, WeightMode.COMPLEX, seed=0)
    path = tmp_path / "m.cply"
    save_model(w, meta(), path)
    blob = bytearray(path.read_bytes())
    blob[:4] = b"XXXX"
    path.write_bytes(bytes(blob))
    with pytest.raises(CheckpointError, match="magic"):
        load_model(path)


def test_load_rejects_truncation(tmp_path):
    w = init_weights(2, 3, WeightMode.COMPLEX, seed=0)
    path = tmp_path / "m.cply"
    save_model(w, meta(), path)
    blob = path.read_bytes()
    path.write_bytes(blob[:-1])
    with pytest.raises(CheckpointError):
        load_model(path)


def test_load_rejects_corruption(tmp_path):
    w = init_weights(2, 3, WeightMode.COMPLEX, seed=0)
    path = tmp_path / "m.cply"
    save_model(w, meta(), path)
    blob = bytearray(path.read_bytes())
    blob[60] ^= 0xFF
    path.write_bytes(bytes(blob))
    with pytest.raises(CheckpointError, match="CRC"):
        load_model(path)


def test_load_rejects_bad_version(tmp_path):
    w = init_weights(2, 3, WeightMode.COMPLEX, seed=0)
    path = tmp_path / "m.cply"
    save_model(w, meta(), path)
    blob = bytearray(path.read_bytes())
    blob[4] = 99  # version field, little-endian u32 after magic
    path.write_bytes(bytes(blob))
    with pytest.raises(CheckpointError, match="version"):
        load_model(path)


def test_load_missing_file(tmp_path):
    with pytest.raises(CheckpointError):
        load_model(tmp_path / "nope.cply")
