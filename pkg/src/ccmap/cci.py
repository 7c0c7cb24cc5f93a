"""Total correlation, Chow-Liu trees and the CCI indicator.

All information quantities are plug-in estimates in bits.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .datasets import BitDataset, EmpiricalPmf, empirical_pmf
from .errors import CapacityError, InsufficientDataError
from .walsh import DENSE_LIMIT, bits_to_index, index_to_bits

DEGENERATE_TC = 1e-9


def _xlogx(p: np.ndarray) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    out = np.zeros_like(p)
    nz = p > 0
    out[nz] = p[nz] * np.log2(p[nz])
    return out


def _support(x) -> tuple[np.ndarray, np.ndarray]:
    if isinstance(x, EmpiricalPmf):
        return x.support, x.probs
    pmf = empirical_pmf(x)
    return pmf.support, pmf.probs


def _entropy(p: np.ndarray) -> float:
    return float(-_xlogx(p).sum())


def _binary_entropy(p1: np.ndarray) -> np.ndarray:
    return -(_xlogx(p1) + _xlogx(1.0 - p1))


@dataclass(frozen=True)
class MutualInfoMatrix:
    n: int
    mi: np.ndarray


@dataclass(frozen=True)
class TreeModel:
    n: int
    edges: tuple[tuple[int, int, float], ...]

    @property
    def tree_tc(self) -> float:
        return float(sum(w for _, _, w in self.edges))


@dataclass(frozen=True)
class CciReport:
    total_tc: float
    tree_tc: float
    cci: float
    M: int
    support_size: int
    tree: TreeModel

    def as_dict(self) -> dict:
        return {
            "totalTc": self.total_tc,
            "treeTc": self.tree_tc,
            "cci": self.cci,
            "M": self.M,
            "supportSize": self.support_size,
        }


def mutual_info_matrix(d: BitDataset | EmpiricalPmf) -> MutualInfoMatrix:
    """Pairwise mutual information from univariate and pairwise marginals."""
    if isinstance(d, BitDataset) and d.M < 2:
        raise InsufficientDataError("mutual information needs at least two samples")
    X, w = _support(d)
    X = X.astype(float)
    p1 = w @ X
    p11 = (X * w[:, None]).T @ X
    p10 = p1[:, None] - p11
    p01 = p1[None, :] - p11
    p00 = 1.0 - p11 - p10 - p01
    joint = np.stack([p00, p01, p10, p11])
    joint = np.clip(joint, 0.0, 1.0)
    h1 = _binary_entropy(p1)
    h2 = -_xlogx(joint).sum(axis=0)
    mi = h1[:, None] + h1[None, :] - h2
    mi = np.where(mi < 0, 0.0, mi)
    np.fill_diagonal(mi, 0.0)
    mi = 0.5 * (mi + mi.T)
    return MutualInfoMatrix(X.shape[1], mi)


class _DisjointSet:
    def __init__(self, n):
        self.parent = list(range(n))

    def find(self, x):
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, a, b) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        self.parent[max(ra, rb)] = min(ra, rb)
        return True


def chow_liu_tree(mi: MutualInfoMatrix) -> TreeModel:
    """Maximum-weight spanning tree (Kruskal).

    Equal weights are resolved in favour of the lexicographically smallest
    ``(i, j)`` pair.
    """
    n = mi.n
    if n < 2:
        raise ValueError("a tree needs at least two variables")
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    pairs.sort(key=lambda e: (-mi.mi[e], e))
    ds = _DisjointSet(n)
    edges = []
    for i, j in pairs:
        if ds.union(i, j):
            edges.append((i, j, float(mi.mi[i, j])))
            if len(edges) == n - 1:
                break
    return TreeModel(n, tuple(edges))


def total_correlation(p: EmpiricalPmf | BitDataset) -> float:
    """``sum_i H(X_i) - H(X)`` in bits."""
    n = p.n
    if n > DENSE_LIMIT:
        raise CapacityError(f"joint entropy needs n <= {DENSE_LIMIT}, got {n}")
    X, w = _support(p)
    marg = w @ X.astype(float)
    return float(_binary_entropy(marg).sum() - _entropy(w))


def cci(d: BitDataset | EmpiricalPmf) -> CciReport:
    """Fraction of total correlation left unexplained by the Chow-Liu tree.

    A total correlation below ``1e-9`` bits is reported as ``cci = 0``.
    """
    pmf = d if isinstance(d, EmpiricalPmf) else empirical_pmf(d)
    total = total_correlation(pmf)
    tree = chow_liu_tree(mutual_info_matrix(pmf))
    tree_tc = tree.tree_tc
    value = 0.0 if total < DEGENERATE_TC else 1.0 - tree_tc / total
    M = d.M if isinstance(d, BitDataset) else 0
    return CciReport(total, tree_tc, float(min(max(value, 0.0), 1.0)), M, len(pmf.probs), tree)


def tree_distribution(p: EmpiricalPmf, t: TreeModel) -> np.ndarray:
    """Dense tree-factorised distribution built from the marginals of ``p``."""
    n = p.n
    if n > 16:
        raise CapacityError(f"explicit tree distribution needs n <= 16, got {n}")
    X, w = p.support.astype(float), p.probs
    allx = index_to_bits(np.arange(1 << n), n).astype(np.int64)
    p1 = w @ X
    marg = np.stack([1.0 - p1, p1], axis=1)
    # states with a zero marginal give -inf - -inf; they carry no mass
    with np.errstate(divide="ignore", invalid="ignore"):
        logp = np.log2(marg[np.arange(n), allx]).sum(axis=1)
        for i, j, _ in t.edges:
            pij = np.zeros((2, 2))
            np.add.at(pij, (p.support[:, i], p.support[:, j]), w)
            logp += (np.log2(pij[allx[:, i], allx[:, j]])
                     - np.log2(marg[i, allx[:, i]]) - np.log2(marg[j, allx[:, j]]))
    return np.nan_to_num(np.exp2(logp), nan=0.0)


def tree_kl_check(p: EmpiricalPmf, t: TreeModel) -> tuple[float, float]:
    """Direct ``D_KL(p || p_T)`` and its gap to ``I_TC - I_TC^tree``."""
    pT = tree_distribution(p, t)
    q = pT[bits_to_index(p.support)]
    kl = float(np.sum(p.probs * (np.log2(p.probs) - np.log2(q))))
    return kl, abs(kl - (total_correlation(p) - t.tree_tc))
