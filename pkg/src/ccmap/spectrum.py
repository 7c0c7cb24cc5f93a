"""Walsh power spectrum, correlation-order aggregation and the QCLI indicator."""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from math import comb, log

import numpy as np

from .datasets import BitDataset, EmpiricalPmf, empirical_pmf
from .errors import BudgetError, CapacityError, UndefinedSpectrumError
from .walsh import DENSE_LIMIT, fwht, orders

CLIP_EPS = 1e-12
DEFAULT_BUDGET = 20_000


@dataclass(frozen=True)
class OrderSpectrum:
    """Fraction of spectral power at each correlation order ``k = 0..n``.

    ``counts`` is filled by the Monte-Carlo estimator with the number of
    subsets evaluated per order.
    """

    n: int
    m: np.ndarray
    counts: np.ndarray | None = field(default=None, compare=False)

    def __post_init__(self):
        m = np.asarray(self.m, dtype=float)
        if m.shape != (self.n + 1,):
            raise ValueError(f"expected {self.n + 1} order fractions, got shape {m.shape}")
        object.__setattr__(self, "m", m)


def _as_vector(x) -> np.ndarray:
    return x.m if isinstance(x, OrderSpectrum) else np.asarray(x, dtype=float)


def walsh_power(p: EmpiricalPmf | np.ndarray) -> np.ndarray:
    """``P(s) = (2**-n sum_x p(x) chi_s(x))**2`` for every subset mask ``s``."""
    if isinstance(p, EmpiricalPmf):
        if p.n > DENSE_LIMIT:
            raise CapacityError(f"n={p.n} exceeds the dense limit {DENSE_LIMIT}; use qcli_mc")
        dense = p.dense()
    else:
        dense = np.asarray(p, dtype=float)
    n = dense.size.bit_length() - 1
    coeff = fwht(dense) / 2.0**n
    return coeff * coeff


def order_spectrum(powers: np.ndarray) -> OrderSpectrum:
    powers = np.asarray(powers, dtype=float)
    n = powers.size.bit_length() - 1
    total = powers.sum()
    if not total > 0:
        raise UndefinedSpectrumError("spectrum has no power")
    by_order = np.bincount(orders(n), weights=powers, minlength=n + 1)
    return OrderSpectrum(n, by_order / total)


def binomial_baseline(n: int) -> OrderSpectrum:
    if n < 1:
        raise ValueError("n must be positive")
    return OrderSpectrum(n, np.array([comb(n, k) / 2.0**n for k in range(n + 1)]))


def _clip(v: np.ndarray, eps: float) -> np.ndarray:
    v = np.maximum(v, eps)
    return v / v.sum()


def js_divergence(m, b, eps: float = CLIP_EPS) -> float:
    """Jensen-Shannon divergence in bits after clipping both inputs at ``eps``.

    Written with ``log1p`` of the relative difference so that tiny deviations
    keep full relative precision.
    """
    m, b = _as_vector(m), _as_vector(b)
    if m.shape != b.shape:
        raise ValueError("spectra must have the same length")
    m, b = _clip(m, eps), _clip(b, eps)
    r = (m - b) / (m + b)
    nats = 0.5 * np.sum(m * np.log1p(r)) + 0.5 * np.sum(b * np.log1p(-r))
    return float(min(max(nats / log(2), 0.0), 1.0))


def second_order_js(m, b) -> float:
    """Quadratic approximation ``sum (m_k - b_k)**2 / b_k / (8 ln 2)``."""
    m, b = _as_vector(m), _as_vector(b)
    return float(np.sum((m - b) ** 2 / b) / (8 * log(2)))


def tv_distance(m, b) -> float:
    m, b = _as_vector(m), _as_vector(b)
    return float(0.5 * np.abs(m - b).sum())


def exact_order_spectrum(d: BitDataset) -> OrderSpectrum:
    return order_spectrum(walsh_power(empirical_pmf(d)))


def qcli_from_spectrum(spec: OrderSpectrum) -> float:
    return js_divergence(spec, binomial_baseline(spec.n))


def qcli_exact(d: BitDataset) -> float:
    return qcli_from_spectrum(exact_order_spectrum(d))


def qcli_of_distribution(probs: np.ndarray) -> float:
    """QCLI of a dense probability vector (no sampling)."""
    return qcli_from_spectrum(order_spectrum(walsh_power(probs)))


# ------------------------------------------------------------ Monte Carlo

def allocate_budget(n: int, L: int) -> np.ndarray:
    """Equal-per-order subset counts capped at ``C(n, k)``.

    Budget left over by capped orders goes one subset at a time to the
    uncapped orders with the most subsets (ties to the lower order).
    """
    if L < n + 1:
        raise BudgetError(f"budget {L} is below the {n + 1} orders")
    sizes = np.array([comb(n, k) for k in range(n + 1)], dtype=object)
    alloc = np.array([min(L // (n + 1), s) for s in sizes], dtype=object)
    left = L - int(sum(alloc))
    priority = sorted(range(n + 1), key=lambda k: (-sizes[k], k))
    while left > 0:
        open_orders = [k for k in priority if alloc[k] < sizes[k]]
        if not open_orders:
            break
        for k in open_orders:
            if left == 0:
                break
            alloc[k] += 1
            left -= 1
    return np.array([int(a) for a in alloc], dtype=np.int64)


def _unrank(rank: int, n: int, k: int) -> tuple[int, ...]:
    """Lexicographic combination of ``range(n)`` with the given rank."""
    out = []
    start = 0
    for slots in range(k, 0, -1):
        for i in range(start, n):
            c = comb(n - i - 1, slots - 1)
            if rank < c:
                out.append(i)
                start = i + 1
                break
            rank -= c
    return tuple(out)


def sample_subsets(n: int, k: int, count: int, rng: np.random.Generator) -> np.ndarray:
    """``count`` distinct ``k``-subsets, uniformly without replacement, as bit rows."""
    total = comb(n, k)
    if count > total:
        raise ValueError(f"cannot draw {count} distinct {k}-subsets of {n}")
    if count == total:
        chosen = list(combinations(range(n), k))
    elif total <= 10_000_000:
        ranks = rng.choice(total, size=count, replace=False)
        chosen = [_unrank(int(r), n, k) for r in np.sort(ranks)]
    else:
        seen: set[tuple[int, ...]] = set()
        chosen = []
        while len(chosen) < count:
            s = tuple(sorted(rng.choice(n, size=k, replace=False).tolist()))
            if s not in seen:
                seen.add(s)
                chosen.append(s)
    rows = np.zeros((len(chosen), n), dtype=np.uint8)
    for r, s in enumerate(chosen):
        rows[r, list(s)] = 1
    return rows


def _squared_char_means(support: np.ndarray, weights: np.ndarray, subsets: np.ndarray) -> np.ndarray:
    """``(sum_x p(x) chi_s(x))**2`` for each subset row, from the sample support."""
    out = np.empty(subsets.shape[0])
    if subsets.shape[0] == 0:
        return out
    X = support.astype(np.float32)
    chunk = max(1, 4_000_000 // max(1, X.shape[0]))
    for lo in range(0, subsets.shape[0], chunk):
        S = subsets[lo:lo + chunk].astype(np.float32)
        parity = np.rint(X @ S.T).astype(np.int64) & 1
        mean = weights @ (1.0 - 2.0 * parity)
        out[lo:lo + chunk] = mean * mean
    return out


def qcli_mc(d: BitDataset, budget: int = DEFAULT_BUDGET, seed: int = 0) -> tuple[float, OrderSpectrum]:
    """Monte-Carlo QCLI from stratified subset sampling.

    Within order ``k`` the sum of sampled powers is scaled by ``C(n,k)/count``.
    The common factor ``2**(-2n)`` in every power cancels in the order shares
    and is left out.  Each order draws from its own child seed, so the result
    does not depend on evaluation order.
    """
    n = d.n
    counts = allocate_budget(n, budget)
    pmf = empirical_pmf(d)
    streams = np.random.SeedSequence(seed).spawn(n + 1)
    A = np.zeros(n + 1)
    for k in range(n + 1):
        rng = np.random.default_rng(streams[k])
        subsets = sample_subsets(n, k, int(counts[k]), rng)
        powers = _squared_char_means(pmf.support, pmf.probs, subsets)
        A[k] = comb(n, k) / counts[k] * powers.sum()
    total = A.sum()
    if not total > 0:
        raise UndefinedSpectrumError("estimated spectrum has no power")
    spec = OrderSpectrum(n, A / total, counts)
    return qcli_from_spectrum(spec), spec


def qcli(d: BitDataset, budget: int = DEFAULT_BUDGET, seed: int = 0, exact_limit: int = 20) -> float:
    """Exact QCLI up to ``exact_limit`` bits, Monte Carlo above."""
    if d.n <= exact_limit:
        return qcli_exact(d)
    return qcli_mc(d, budget, seed)[0]
