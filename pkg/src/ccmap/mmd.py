"""Hamming-Gaussian MMD in sample form and in parity (Pauli-Z) form.

With ``k(x, y) = exp(-d_H(x, y) / (2 sigma**2))`` and ``q = exp(-1/(2 sigma**2))``
the kernel factorises per bit, and its Walsh expansion has weight
``lambda_k = ((1 - q)/2)**k * ((1 + q)/2)**(n - k)`` on every parity of order
``k``.  The squared MMD is then ``sum_s lambda_|s| (<Z_s>_p - <Z_s>_q)**2``.
"""
from __future__ import annotations

from dataclasses import dataclass
from math import exp, sqrt

import numpy as np

from .datasets import BitDataset
from .errors import ShapeError
from .iqp import IqpCircuit, amplitudes
from .walsh import fwht, orders


def default_sigma(n: int) -> float:
    """Bandwidth with ``sigma**2 = n / 4``."""
    return sqrt(n / 4.0)


@dataclass(frozen=True)
class KernelSpec:
    sigma: float
    form: str = "pauli"

    def __post_init__(self):
        if not self.sigma > 0:
            raise ValueError("sigma must be positive")
        if self.form not in ("raw", "pauli"):
            raise ValueError(f"unknown kernel form {self.form!r}")


@dataclass(frozen=True)
class PauliCoefficients:
    n: int
    lambda_by_order: np.ndarray

    def per_mask(self) -> np.ndarray:
        cached = self.__dict__.get("_per_mask")
        if cached is None:
            cached = self.lambda_by_order[orders(self.n)]
            cached.setflags(write=False)
            object.__setattr__(self, "_per_mask", cached)
        return cached


def pauli_coefficients(n: int, sigma: float) -> PauliCoefficients:
    if not sigma > 0:
        raise ValueError("sigma must be positive")
    q = exp(-1.0 / (2.0 * sigma * sigma))
    k = np.arange(n + 1)
    lam = ((1.0 - q) / 2.0) ** k * ((1.0 + q) / 2.0) ** (n - k)
    return PauliCoefficients(n, lam)


def _unique(d: BitDataset) -> tuple[np.ndarray, np.ndarray]:
    rows, counts = np.unique(d.bits, axis=0, return_counts=True)
    return rows.astype(np.float64), counts.astype(np.float64)


def _kernel_sum(X, wx, Y, wy, sigma) -> float:
    """``sum_ij wx_i wy_j k(x_i, y_j)`` in row blocks."""
    total = 0.0
    block = max(1, 2_000_000 // max(1, Y.shape[0]))
    ones_y = 1.0 - Y
    for lo in range(0, X.shape[0], block):
        Xb = X[lo:lo + block]
        ham = Xb @ ones_y.T + (1.0 - Xb) @ Y.T
        total += float(wx[lo:lo + block] @ np.exp(-ham / (2.0 * sigma * sigma)) @ wy)
    return total


def mmd_raw(a: BitDataset, b: BitDataset, kernel: KernelSpec, unbiased: bool = False) -> float:
    """Squared MMD between two samples from pairwise kernel sums.

    The default is the biased V-statistic (diagonal terms included).
    """
    if a.n != b.n:
        raise ShapeError(f"width mismatch: {a.n} vs {b.n}")
    Xa, ca = _unique(a)
    Xb, cb = _unique(b)
    s = kernel.sigma
    kaa = _kernel_sum(Xa, ca, Xa, ca, s)
    kbb = _kernel_sum(Xb, cb, Xb, cb, s)
    kab = _kernel_sum(Xa, ca, Xb, cb, s)
    Ma, Mb = a.M, b.M
    if unbiased:
        if Ma < 2 or Mb < 2:
            raise ValueError("the unbiased estimator needs at least two samples per side")
        return (kaa - Ma) / (Ma * (Ma - 1)) + (kbb - Mb) / (Mb * (Mb - 1)) - 2.0 * kab / (Ma * Mb)
    return kaa / Ma**2 + kbb / Mb**2 - 2.0 * kab / (Ma * Mb)


def mmd_pauli(exp_a: np.ndarray, exp_b: np.ndarray, coeffs: PauliCoefficients) -> float:
    exp_a, exp_b = np.asarray(exp_a), np.asarray(exp_b)
    full = 1 << coeffs.n
    if exp_a.shape != (full,) or exp_b.shape != (full,):
        raise ShapeError(
            f"expectation tables must cover all {full} subsets; "
            "use mmd_pauli_truncated for partial families"
        )
    diff = exp_a - exp_b
    return float(np.sum(coeffs.per_mask() * diff * diff))


def mmd_pauli_truncated(exp_a, exp_b, coeffs: PauliCoefficients, masks) -> float:
    """Approximate loss restricted to the parity family ``masks``."""
    masks = np.asarray(masks, dtype=np.int64)
    diff = np.asarray(exp_a)[masks] - np.asarray(exp_b)[masks]
    return float(np.sum(coeffs.lambda_by_order[np.bitwise_count(masks)] * diff * diff))


def mmd_loss_and_gradient(
    c: IqpCircuit, data_exp: np.ndarray, coeffs: PauliCoefficients
) -> tuple[float, np.ndarray]:
    """Exact loss and its gradient with respect to every generator angle.

    With ``A = 2**-n WHT(f)``, ``f = exp(i phi)`` and parity weights
    ``w = WHT(2 c (E - D))``, the gradient for generator ``g`` is
    ``WHT(G)[g]`` where ``G = -2 Im(f * 2**-n WHT(w * conj(A)))``.
    """
    f, A = amplitudes(c)
    probs = A.real**2 + A.imag**2
    E = fwht(probs)
    cm = coeffs.per_mask()
    diff = E - data_exp
    loss = float(np.sum(cm * diff * diff))
    w = fwht(2.0 * cm * diff)
    B = fwht(w * np.conj(A)) / float(1 << c.n)
    G = -2.0 * np.imag(f * B)
    grad = fwht(G)[c.masks]
    return loss, grad


def mmd_gradient(c: IqpCircuit, data_exp: np.ndarray, coeffs: PauliCoefficients) -> np.ndarray:
    return mmd_loss_and_gradient(c, data_exp, coeffs)[1]


def exact_mmd_to_data(probs: np.ndarray, data_exp: np.ndarray, coeffs: PauliCoefficients) -> float:
    """Loss between a dense model distribution and data expectations."""
    return mmd_pauli(fwht(np.asarray(probs, dtype=float)), data_exp, coeffs)
