"""Shared brute-force oracles and the acceptance summary hook."""
from __future__ import annotations

import itertools
import math

import numpy as np
import pytest

ACCEPTANCE: list[tuple[int, bool, str]] = []


def report(criterion: int, passed: bool, detail: str):
    ACCEPTANCE.append((criterion, bool(passed), detail))
    print(f"CRITERION {criterion:2d}: {'PASS' if passed else 'FAIL'}  {detail}")


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k, ok, detail in sorted(ACCEPTANCE):
        terminalreporter.write_line(f"criterion {k:2d}: {'PASS' if ok else 'FAIL'}  {detail}")


def chi(s_bits, x_bits) -> int:
    """Parity character on explicit bit tuples."""
    return -1 if sum(a & b for a, b in zip(s_bits, x_bits)) % 2 else 1


def all_bits(n):
    return list(itertools.product((0, 1), repeat=n))


def brute_walsh_power(p: dict, n: int) -> dict:
    """P(s) by direct summation over outcomes, keyed by bit tuples."""
    out = {}
    for s in all_bits(n):
        acc = sum(w * chi(s, x) for x, w in p.items())
        out[s] = (acc / 2**n) ** 2
    return out


def dense_iqp_probs(n: int, generators) -> np.ndarray:
    """H^n diag(exp(i sum theta Z_s)) H^n |0>, built from explicit Kronecker products."""
    I2 = np.eye(2)
    Z = np.diag([1.0, -1.0])
    H1 = np.array([[1.0, 1.0], [1.0, -1.0]]) / math.sqrt(2)
    H = np.array([[1.0]])
    for _ in range(n):
        H = np.kron(H, H1)
    gen = np.zeros((2**n, 2**n))
    for subset, theta in generators:
        op = np.array([[1.0]])
        for q in range(n):
            op = np.kron(op, Z if q in subset else I2)
        gen = gen + theta * op
    U = H @ np.diag(np.exp(1j * np.diag(gen))) @ H
    psi = U[:, 0]
    return np.abs(psi) ** 2


def brute_mmd(a: np.ndarray, b: np.ndarray, sigma: float) -> float:
    def k(x, y):
        return math.exp(-int(np.sum(x != y)) / (2 * sigma**2))

    aa = sum(k(x, y) for x in a for y in a) / len(a) ** 2
    bb = sum(k(x, y) for x in b for y in b) / len(b) ** 2
    ab = sum(k(x, y) for x in a for y in b) / (len(a) * len(b))
    return aa + bb - 2 * ab


def spanning_trees(n: int):
    """Every spanning tree of K_n as a sorted edge tuple (exhaustive)."""
    edges = list(itertools.combinations(range(n), 2))
    for combo in itertools.combinations(edges, n - 1):
        parent = list(range(n))

        def find(x):
            while parent[x] != x:
                x = parent[x]
            return x

        ok = True
        for i, j in combo:
            ri, rj = find(i), find(j)
            if ri == rj:
                ok = False
                break
            parent[ri] = rj
        if ok:
            yield combo


def random_pmf(n: int, rng, sparsity: float = 0.0) -> np.ndarray:
    p = rng.random(2**n) ** 3
    if sparsity:
        p[rng.random(2**n) < sparsity] = 0.0
        if p.sum() == 0:
            p[0] = 1.0
    return p / p.sum()


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(scope="session")
def coupling_rows():
    """The desk-scale QCLI-maximisation cloud; shared because it takes ~35 s."""
    from ccmap.experiments import preset, run_coupling_study

    return run_coupling_study(preset("fig5-desk")[1])
