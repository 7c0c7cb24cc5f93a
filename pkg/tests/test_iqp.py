import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ccmap.datasets import empirical_pmf
from ccmap.errors import CapacityError
from ccmap.iqp import (
    IqpCircuit,
    all_z_expectations,
    exact_distribution,
    full_circuit,
    merge_thetas,
    random_circuit,
    sample,
)
from ccmap.walsh import index_to_bits

from conftest import chi, dense_iqp_probs


def test_random_circuit_examples():
    c = random_circuit(16, 140, 4, seed=3)
    assert c.size == 140 and len(set(c.subsets)) == 140
    assert c.max_locality() <= 4
    assert np.all(np.abs(c.thetas) <= math.pi / 8)
    c2 = random_circuit(2, 3, 2, seed=0)
    assert c2.subsets == ((0,), (1,), (0, 1))
    assert random_circuit(16, 140, 4, seed=3) == c
    with pytest.raises(CapacityError):
        random_circuit(3, 8, 2, seed=0)


def test_replacement_merges_repeats():
    c = random_circuit(8, 150, 2, seed=1, replace=True)
    assert c.size <= 36
    small = random_circuit(8, 20, 2, seed=1, replace=True)
    assert set(small.subsets) <= set(c.subsets)


def test_validation():
    with pytest.raises(ValueError):
        IqpCircuit(2, ((0,), (0,)), [0.1, 0.2])
    with pytest.raises(ValueError):
        IqpCircuit(2, ((0, 1), (0,)), [0.1, 0.2])
    with pytest.raises(ValueError):
        IqpCircuit(2, ((2,),), [0.1])
    c = IqpCircuit.from_generators(3, [((1, 2), 0.3), ((0,), 0.1)])
    assert c.subsets == ((0,), (1, 2))


def test_zero_angles_point_mass():
    c = full_circuit(4, 2)
    p = exact_distribution(c).probs
    assert p[0] == pytest.approx(1.0) and p[1:].sum() == pytest.approx(0.0, abs=1e-15)
    np.testing.assert_allclose(all_z_expectations(c), 1.0)
    assert np.all(sample(c, 50, 0).bits == 0)


def test_single_qubit_closed_form():
    for theta in (0.0, 0.3, math.pi / 4, 1.2):
        c = IqpCircuit(1, ((0,),), [theta])
        p = exact_distribution(c).probs
        np.testing.assert_allclose(p, [math.cos(theta) ** 2, math.sin(theta) ** 2], atol=1e-15)
        assert all_z_expectations(c)[1] == pytest.approx(math.cos(2 * theta), abs=1e-15)


def test_dense_matrix_oracle_two_qubits():
    gens = [((0,), math.pi / 4), ((0, 1), math.pi / 3)]
    c = IqpCircuit.from_generators(2, gens)
    np.testing.assert_allclose(exact_distribution(c).probs, dense_iqp_probs(2, gens), atol=1e-12)


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 4), st.integers(0, 2**31))
def test_dense_matrix_oracle_random(n, seed):
    c = random_circuit(n, min(4, 2**n - 1), n, seed, angle_scale=math.pi)
    gens = list(zip(c.subsets, c.thetas))
    np.testing.assert_allclose(exact_distribution(c).probs, dense_iqp_probs(n, gens), atol=1e-10)


def test_single_qubit_sampling():
    d = sample(IqpCircuit(1, ((0,),), [math.pi / 4]), 100_000, 0)
    assert abs(d.bits.mean() - 0.5) <= 0.01


def test_sampling_tv():
    c = random_circuit(8, 30, 3, 2, angle_scale=1.0)
    p = exact_distribution(c).probs
    d = sample(c, 1_000_000, 5)
    tv = 0.5 * np.abs(empirical_pmf(d).dense() - p).sum()
    assert tv <= 0.01
    assert sample(c, 100, 9) == sample(c, 100, 9)


def test_z_expectations_direct_sum():
    n = 6
    c = random_circuit(n, 20, 3, 4, angle_scale=1.0)
    p = exact_distribution(c).probs
    E = all_z_expectations(c)
    x = index_to_bits(np.arange(1 << n), n)
    for s in range(1 << n):
        sb = index_to_bits(np.array([s]), n)[0]
        direct = sum(p[i] * chi(sb, x[i]) for i in range(1 << n))
        assert E[s] == pytest.approx(direct, abs=1e-12)
    assert E[0] == pytest.approx(1.0)


@pytest.mark.parametrize("n", range(1, 13))
def test_normalization(n):
    for seed in range(3):
        c = random_circuit(n, min(20, 2**n - 1), min(n, 4), seed, angle_scale=math.pi)
        from ccmap.iqp import amplitudes

        _, A = amplitudes(c)
        assert np.sum(np.abs(A) ** 2) == pytest.approx(1.0, abs=1e-9)


def test_periodicity_and_zero_generator():
    c = random_circuit(5, 10, 3, 1, angle_scale=1.0)
    p = exact_distribution(c).probs
    for shift in (2 * math.pi, math.pi):
        th = c.thetas.copy()
        th[3] += shift
        np.testing.assert_allclose(exact_distribution(c.with_thetas(th)).probs, p, atol=1e-12)
    extra = [(s, t) for s, t in zip(c.subsets, c.thetas)]
    missing = next(s for s in full_circuit(5, 3).subsets if s not in c.subsets)
    c2 = IqpCircuit.from_generators(5, extra + [(missing, 0.0)])
    np.testing.assert_allclose(exact_distribution(c2).probs, p, atol=1e-14)


def test_capacity_limit():
    with pytest.raises(CapacityError):
        exact_distribution(IqpCircuit(21, ((0,),), [0.1]))


def test_serialization_roundtrip(tmp_path):
    c = random_circuit(6, 12, 3, 2)
    path = c.save(tmp_path / "c.json")
    assert IqpCircuit.load(path) == c
    gens = c.to_dict()["generators"]
    assert {"mask", "qubits", "theta"} <= set(gens[0])


def test_merge_thetas():
    c = full_circuit(3, 2)
    m = merge_thetas(c, [0, 4], [1.0, 2.0])
    assert m.thetas[0] == 1.0 and m.thetas[4] == 2.0 and m.thetas[1] == 0.0
