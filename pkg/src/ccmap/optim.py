"""Plain numpy Adam and SPSA with support for frozen coordinates."""
from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import Callable

import numpy as np


@dataclass(frozen=True)
class OptimizerConfig:
    """Optimiser settings.

    ``learning_rate`` is Adam's step size and SPSA's gain ``a``.
    ``loss`` selects the exact parity-form loss or a sampled raw MMD
    estimate with ``batch_samples`` draws per evaluation (SPSA only).
    """

    method: str = "adam"
    steps: int = 5000
    learning_rate: float = 1e-4
    spsa_perturbation: float = 0.1
    spsa_stability: float = 10.0
    seed: int = 0
    batch_samples: int = 500
    loss: str = "exact"
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8

    def __post_init__(self):
        if self.method not in ("adam", "spsa"):
            raise ValueError(f"unknown optimiser {self.method!r}")
        if self.steps < 0:
            raise ValueError("steps must be nonnegative")
        if not self.learning_rate > 0:
            raise ValueError("learning rate must be positive")
        if self.loss not in ("exact", "sampled"):
            raise ValueError(f"unknown loss mode {self.loss!r}")

    def replace(self, **kw) -> "OptimizerConfig":
        return OptimizerConfig(**{**asdict(self), **kw})

    def as_dict(self) -> dict:
        return asdict(self)


def _free_mask(size: int, frozen) -> np.ndarray:
    free = np.ones(size, dtype=bool)
    if frozen is not None:
        free[list(frozen)] = False
    return free


class Adam:
    def __init__(self, size: int, lr: float, beta1=0.9, beta2=0.999, eps=1e-8, frozen=None):
        self.lr, self.beta1, self.beta2, self.eps = lr, beta1, beta2, eps
        self.free = _free_mask(size, frozen)
        self.m = np.zeros(size)
        self.v = np.zeros(size)
        self.t = 0

    def step(self, params: np.ndarray, grad: np.ndarray) -> np.ndarray:
        self.t += 1
        g = np.where(self.free, grad, 0.0)
        self.m = self.beta1 * self.m + (1 - self.beta1) * g
        self.v = self.beta2 * self.v + (1 - self.beta2) * g * g
        mhat = self.m / (1 - self.beta1**self.t)
        vhat = self.v / (1 - self.beta2**self.t)
        out = np.array(params, dtype=float)
        out[self.free] -= (self.lr * mhat / (np.sqrt(vhat) + self.eps))[self.free]
        return out


class SPSA:
    """Two-sided simultaneous perturbation with standard gain decay.

    ``a_k = a / (k + 1 + A)**0.602`` and ``c_k = c / (k + 1)**0.101``.
    """

    alpha = 0.602
    gamma = 0.101

    def __init__(self, size: int, a: float, c: float, A: float, seed: int, frozen=None):
        self.a, self.c, self.A = a, c, A
        self.free = _free_mask(size, frozen)
        self.rng = np.random.default_rng(seed)
        self.k = 0

    def step(self, params: np.ndarray, loss: Callable[[np.ndarray], float]) -> tuple[np.ndarray, float]:
        """One update; returns the new parameters and the mean of the two probes."""
        ak = self.a / (self.k + 1 + self.A) ** self.alpha
        ck = self.c / (self.k + 1) ** self.gamma
        self.k += 1
        delta = np.where(self.free, self.rng.choice((-1.0, 1.0), size=params.size), 0.0)
        plus = loss(params + ck * delta)
        minus = loss(params - ck * delta)
        out = np.array(params, dtype=float)
        ghat = (plus - minus) / (2.0 * ck) * delta
        out[self.free] -= ak * ghat[self.free]
        return out, 0.5 * (plus + minus)
