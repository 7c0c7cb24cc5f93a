import numpy as np
import pytest
from scipy.special import expit

from ccmap.datasets import BitDataset, bits_to_index
from ccmap.errors import CapacityError, ShapeError
from ccmap.rbm import (
    RbmModel,
    default_hidden,
    exact_marginal,
    free_energy,
    rbm_init,
    rbm_latent_interpolate,
    rbm_sample,
    rbm_train,
)
from ccmap.walsh import index_to_bits

MODE = np.array([1, 0, 1, 1, 0, 0], dtype=np.uint8)


def _single_mode(m=500):
    return BitDataset(np.tile(MODE, (m, 1)))


def _random_data(n=6, m=400, seed=0):
    return BitDataset(np.random.default_rng(seed).integers(0, 2, size=(m, n), dtype=np.uint8))


def test_flat_layout_roundtrip(tmp_path):
    m = rbm_init(4, 3, seed=1)
    flat = m.flat()
    assert flat.size == m.size == 4 * 3 + 4 + 3
    assert np.array_equal(flat[:12], m.weights.ravel())
    assert RbmModel.from_flat(4, 3, flat) == m
    assert RbmModel.load(m.save(tmp_path / "m.json")) == m
    with pytest.raises(ShapeError):
        RbmModel.from_flat(4, 3, flat[:-1])


def test_default_hidden():
    assert default_hidden(18) == 631
    assert abs(default_hidden(18) * 19 + 18 - 12000) <= 19


def test_free_energy_matches_brute_force():
    m = rbm_init(3, 2, seed=4, scale=0.7)
    m = m.with_flat(m.flat() + np.random.default_rng(0).normal(size=m.size) * 0.3)
    hs = index_to_bits(np.arange(4), 2).astype(float)
    for v in index_to_bits(np.arange(8), 3).astype(float):
        energies = [-(v @ m.visible_bias) - h @ m.hidden_bias - v @ m.weights @ h for h in hs]
        assert free_energy(m, v) == pytest.approx(-np.log(np.sum(np.exp(-np.array(energies)))), abs=1e-12)
    assert exact_marginal(m).sum() == pytest.approx(1.0, abs=1e-12)
    with pytest.raises(CapacityError):
        exact_marginal(rbm_init(21, 1, 0))


def test_frozen_all_returns_init():
    d = _random_data()
    init = rbm_init(6, 4, seed=2)
    out = rbm_train(d, 4, epochs=3, init=init, frozen=range(init.size))
    assert out == init


def test_frozen_subset_untouched():
    d = _random_data()
    init = rbm_init(6, 4, seed=2)
    frozen = list(range(0, init.size, 3))
    out = rbm_train(d, 4, epochs=3, init=init, frozen=frozen)
    assert np.array_equal(out.flat()[frozen], init.flat()[frozen])
    assert not out == init


def test_width_mismatch():
    with pytest.raises(ShapeError):
        rbm_train(_random_data(5), 4, init=rbm_init(6, 4, 0))


def test_single_mode_reproduced():
    log = []
    m = rbm_train(_single_mode(), 8, epochs=30, lr=0.1, seed=0, log=log.append)
    s = rbm_sample(m, 2000, seed=1)
    freq = np.mean(np.all(s.bits == MODE, axis=1))
    assert freq > 0.9
    # mode probability from the exact marginal agrees with the sampler
    p = exact_marginal(m)[bits_to_index(MODE[None])[0]]
    assert abs(p - freq) < 0.05
    fe = [r["freeEnergy"] for r in log]
    rises = sum(b > a for a, b in zip(fe, fe[1:]))
    assert rises <= 0.1 * (len(fe) - 1)


def test_zero_model_fair_bits():
    m = RbmModel.from_flat(6, 3, np.zeros(6 * 3 + 9))
    s = rbm_sample(m, 20_000, seed=0)
    np.testing.assert_allclose(s.bits.mean(0), 0.5, atol=0.02)


def test_visible_bias_logistic():
    flat = np.zeros(4 * 2 + 6)
    flat[8] = 3.0  # visible bias of bit 0
    m = RbmModel.from_flat(4, 2, flat)
    s = rbm_sample(m, 20_000, seed=3)
    assert s.bits[:, 0].mean() == pytest.approx(expit(3.0), abs=0.01)


def test_sampler_deterministic():
    m = rbm_init(5, 3, seed=0, scale=0.5)
    assert rbm_sample(m, 300, seed=4) == rbm_sample(m, 300, seed=4)
    with pytest.raises(ValueError):
        rbm_sample(m, 0)


def test_latent_interpolation():
    core = rbm_init(4, 2, seed=0)
    a0, a1 = np.zeros(5), np.full(5, 2.0)
    anchors = [(1, a0), (100, a1)]
    assert np.array_equal(rbm_latent_interpolate(anchors, core, 1).flat()[:5], a0)
    assert np.array_equal(rbm_latent_interpolate(anchors, core, 100).flat()[:5], a1)
    mid = rbm_latent_interpolate(anchors, core, 50.5)
    np.testing.assert_allclose(mid.flat()[:5], 1.0)
    assert np.array_equal(mid.flat()[5:], core.flat()[5:])
