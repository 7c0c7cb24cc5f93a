import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ccmap.errors import DataError, FormatError, ShapeError
from ccmap.evaluation import (
    FieldSnapshot,
    RandomConvEncoder,
    dumps,
    encode_field,
    evaluate,
    feature_mmd,
    load_field,
    load_field_dir,
    pdf_js,
    save_field,
)

ENC = RandomConvEncoder(seed=0)


def _fields(seed, count=10, shape=(16, 16), loc=0.0, scale=1.0):
    rng = np.random.default_rng(seed)
    return [FieldSnapshot(rng.normal(loc, scale, shape)) for _ in range(count)]


def _conv_oracle(x, w):
    """Direct loop convolution: stride 2, zero padding 1."""
    c, h, wd = x.shape
    o = w.shape[0]
    ho, wo = (h + 1) // 2, (wd + 1) // 2
    out = np.zeros((o, ho, wo))
    for oc in range(o):
        for i in range(ho):
            for j in range(wo):
                acc = 0.0
                for ic in range(c):
                    for di in range(3):
                        for dj in range(3):
                            r, s = 2 * i + di - 1, 2 * j + dj - 1
                            if 0 <= r < h and 0 <= s < wd:
                                acc += w[oc, ic, di, dj] * x[ic, r, s]
                out[oc, i, j] = acc
    return out


def _encode_oracle(e, grid):
    x = grid[None]
    for w in e.weights:
        x = np.maximum(_conv_oracle(x, w), 0.0)
    return x.mean(axis=(1, 2))


def _mmd_oracle(F, G):
    Z = np.vstack([F, G])
    d = [np.linalg.norm(Z[i] - Z[j]) for i in range(len(Z)) for j in range(i + 1, len(Z))]
    s = float(np.median(d))
    k = lambda a, b: np.exp(-np.sum((a - b) ** 2) / (2 * s * s))
    kff = sum(k(a, b) for a in F for b in F) / len(F) ** 2
    kgg = sum(k(a, b) for a in G for b in G) / len(G) ** 2
    kfg = sum(k(a, b) for a in F for b in G) / (len(F) * len(G))
    return kff + kgg - 2 * kfg


def test_field_validation():
    with pytest.raises(ShapeError):
        FieldSnapshot(np.zeros(5))
    with pytest.raises(DataError):
        FieldSnapshot(np.array([[np.nan, 0.0]]))
    f = FieldSnapshot(np.zeros((3, 4)))
    assert (f.height, f.width) == (3, 4)
    with pytest.raises(ValueError):
        f.grid[0, 0] = 1.0


def test_pdf_js_identity_and_disjoint():
    real = _fields(0)
    assert pdf_js(real, real) == 0.0
    zeros = [FieldSnapshot(np.zeros((8, 8)))] * 3
    ones = [FieldSnapshot(np.ones((8, 8)))] * 3
    v = pdf_js(zeros, ones)
    assert v == pytest.approx(1.0, abs=1e-9)
    assert not v.degenerate
    same = pdf_js(zeros, zeros)
    assert same == 0.0 and same.degenerate


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_pdf_js_symmetric_and_bounded(seed):
    a = _fields(seed, 3, (8, 8))
    b = _fields(seed + 1, 3, (8, 8), loc=0.5)
    v = pdf_js(a, b)
    assert 0.0 <= v <= 1.0
    assert v == pytest.approx(pdf_js(b, a), abs=1e-15)


def test_encoder_matches_loop_oracle():
    e = RandomConvEncoder(seed=3, channels=(4, 6, 8))
    grid = np.random.default_rng(1).normal(size=(9, 11))
    np.testing.assert_allclose(encode_field(e, FieldSnapshot(grid)), _encode_oracle(e, grid), atol=1e-12)


def test_encoder_properties():
    z = encode_field(ENC, FieldSnapshot(np.zeros((16, 16))))
    assert z.shape == (32,) and np.all(z == 0.0)
    f = _fields(2, 1)[0]
    a = encode_field(ENC, f)
    assert np.array_equal(a, encode_field(RandomConvEncoder(seed=0), f))
    np.testing.assert_allclose(encode_field(ENC, FieldSnapshot(2.0 * f.grid)), 2.0 * a, rtol=1e-12, atol=1e-15)
    assert not np.array_equal(a, encode_field(RandomConvEncoder(seed=1), f))
    with pytest.raises(ShapeError):
        encode_field(ENC, FieldSnapshot(np.zeros((7, 16))))
    with pytest.raises(ValueError):
        ENC.weights[0][0, 0, 0, 0] = 1.0


def test_encoder_weight_scale():
    e = RandomConvEncoder(seed=5, channels=(64, 64))
    w = e.weights[1]
    assert abs(w.std() * np.sqrt(64 * 9) - 1.0) < 0.05
    assert abs(w.mean()) < 0.01


def test_feature_mmd_oracle_and_identity():
    real = _fields(0)
    gen = _fields(1, loc=3.0)
    F = np.array([encode_field(ENC, f) for f in real])
    G = np.array([encode_field(ENC, g) for g in gen])
    assert abs(feature_mmd(real, gen, ENC) - _mmd_oracle(F, G)) <= 1e-9
    assert feature_mmd(real, real, ENC) <= 1e-15
    assert feature_mmd(real, real, RandomConvEncoder(seed=9)) <= 1e-15


def test_feature_mmd_separated_clusters():
    # tight clusters: the pooled median is the cross distance, so k_cross = exp(-1/2)
    real = _fields(0, loc=0.0, scale=0.01)
    gen = _fields(1, loc=50.0, scale=0.01)
    v = feature_mmd(real, gen, ENC)
    assert v == pytest.approx(2.0 * (1.0 - np.exp(-0.5)), abs=1e-2)


def test_feature_mmd_shuffle_invariant():
    real, gen = _fields(3), _fields(4, loc=1.0)
    v = feature_mmd(real, gen, ENC)
    assert feature_mmd(real[::-1], gen[3:] + gen[:3], ENC) == pytest.approx(v, abs=1e-12)


def test_degenerate_feature_mmd():
    z = [FieldSnapshot(np.zeros((8, 8)))] * 2
    v = feature_mmd(z, z, ENC)
    assert v == 0.0 and v.degenerate
    with pytest.raises(DataError):
        feature_mmd([], z, ENC)


def test_field_io(tmp_path):
    f = _fields(7, 1, (9, 12))[0]
    a = load_field(save_field(f, tmp_path / "a.csv"))
    b = load_field(save_field(f, tmp_path / "b.fld", binary=True))
    assert np.array_equal(a.grid, f.grid) and np.array_equal(b.grid, f.grid)
    assert len(load_field_dir(tmp_path)) == 2
    (tmp_path / "bad.fld").write_bytes(b"FLD1" + np.array([3, 3], "<u4").tobytes() + b"\0" * 8)
    with pytest.raises(FormatError):
        load_field(tmp_path / "bad.fld")
    with pytest.raises(DataError):
        load_field_dir(tmp_path / "nothing") if (tmp_path / "nothing").mkdir() is None else None


def test_evaluate_report():
    real, gen = _fields(0, 4), _fields(1, 4)
    out = json.loads(dumps(evaluate(real, gen, ENC)))
    assert set(out) == {"pdf_js", "feature_mmd", "degenerate", "config"}
    assert out["config"]["encoder"]["channels"] == [8, 16, 32]
    assert out["config"]["nReal"] == 4
