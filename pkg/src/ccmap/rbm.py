"""Binary RBM baseline trained with contrastive divergence, plus latent-block interpolation.

Parameters are exposed through one flat vector: weights row-major, then the
visible bias, then the hidden bias.  The latent block is a prefix of it.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Sequence

import numpy as np
from scipy.special import expit, logsumexp

from .datasets import BitDataset
from .errors import CapacityError, NumericError, ShapeError
from .train import interpolation_weights
from .walsh import index_to_bits

FLAT_ORDER = "weights-row-major,visible-bias,hidden-bias"
EXACT_LIMIT = 20


@dataclass(frozen=True)
class RbmModel:
    n_visible: int
    n_hidden: int
    weights: np.ndarray
    visible_bias: np.ndarray
    hidden_bias: np.ndarray

    def __post_init__(self):
        W = np.array(self.weights, dtype=float)
        a = np.array(self.visible_bias, dtype=float)
        b = np.array(self.hidden_bias, dtype=float)
        if W.shape != (self.n_visible, self.n_hidden) or a.shape != (self.n_visible,) or b.shape != (self.n_hidden,):
            raise ShapeError("parameter shapes do not match (n_visible, n_hidden)")
        for arr in (W, a, b):
            if not np.all(np.isfinite(arr)):
                raise NumericError("non-finite RBM parameters")
            arr.setflags(write=False)
        object.__setattr__(self, "weights", W)
        object.__setattr__(self, "visible_bias", a)
        object.__setattr__(self, "hidden_bias", b)

    @property
    def size(self) -> int:
        return self.n_visible * self.n_hidden + self.n_visible + self.n_hidden

    def flat(self) -> np.ndarray:
        return np.concatenate([self.weights.ravel(), self.visible_bias, self.hidden_bias])

    @classmethod
    def from_flat(cls, n_visible: int, n_hidden: int, flat) -> "RbmModel":
        flat = np.asarray(flat, dtype=float)
        nw = n_visible * n_hidden
        if flat.shape != (nw + n_visible + n_hidden,):
            raise ShapeError(f"flat vector has length {flat.size}, expected {nw + n_visible + n_hidden}")
        return cls(n_visible, n_hidden, flat[:nw].reshape(n_visible, n_hidden), flat[nw : nw + n_visible], flat[nw + n_visible :])

    def with_flat(self, flat) -> "RbmModel":
        return RbmModel.from_flat(self.n_visible, self.n_hidden, flat)

    def __eq__(self, other):
        if not isinstance(other, RbmModel):
            return NotImplemented
        return (self.n_visible, self.n_hidden) == (other.n_visible, other.n_hidden) and np.array_equal(self.flat(), other.flat())

    def to_dict(self) -> dict:
        return {"nVisible": self.n_visible, "nHidden": self.n_hidden, "flatOrder": FLAT_ORDER, "params": self.flat().tolist()}

    @classmethod
    def from_dict(cls, obj: dict) -> "RbmModel":
        if obj.get("flatOrder", FLAT_ORDER) != FLAT_ORDER:
            raise ValueError(f"unsupported flat order {obj['flatOrder']!r}")
        return cls.from_flat(obj["nVisible"], obj["nHidden"], obj["params"])

    def save(self, path) -> Path:
        path = Path(path)
        path.write_text(json.dumps(self.to_dict()) + "\n")
        return path

    @classmethod
    def load(cls, path) -> "RbmModel":
        return cls.from_dict(json.loads(Path(path).read_text()))


def rbm_init(n_visible: int, n_hidden: int, seed: int, scale: float = 0.01) -> RbmModel:
    rng = np.random.default_rng(seed)
    return RbmModel(n_visible, n_hidden, rng.normal(0.0, scale, (n_visible, n_hidden)), np.zeros(n_visible), np.zeros(n_hidden))


def default_hidden(n_visible: int, target_params: int = 12000) -> int:
    """Hidden units giving roughly ``target_params`` parameters."""
    return max(1, round((target_params - n_visible) / (n_visible + 1)))


def free_energy(m: RbmModel, v: np.ndarray) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    return -(v @ m.visible_bias) - np.logaddexp(0.0, v @ m.weights + m.hidden_bias).sum(axis=-1)


def exact_marginal(m: RbmModel) -> np.ndarray:
    """Visible distribution by enumeration, indexed like ``bits_to_index``."""
    if m.n_visible > EXACT_LIMIT:
        raise CapacityError(f"exact RBM marginal limited to {EXACT_LIMIT} visible units")
    allv = index_to_bits(np.arange(1 << m.n_visible), m.n_visible)
    logits = -free_energy(m, allv)
    return np.exp(logits - logsumexp(logits))


def _gibbs_step(m: RbmModel, v: np.ndarray, rng) -> np.ndarray:
    ph = expit(v @ m.weights + m.hidden_bias)
    h = (rng.random(ph.shape) < ph).astype(float)
    pv = expit(h @ m.weights.T + m.visible_bias)
    return (rng.random(pv.shape) < pv).astype(float)


def rbm_train(
    d: BitDataset,
    n_hidden: int,
    epochs: int = 20,
    lr: float = 0.05,
    cd_steps: int = 1,
    seed: int = 0,
    frozen: Sequence[int] = (),
    batch_size: int = 100,
    init: RbmModel | None = None,
    log: Callable[[dict], None] | None = None,
) -> RbmModel:
    """CD-k training; flat indices in ``frozen`` keep their initial values."""
    rng = np.random.default_rng(seed)
    m = init if init is not None else rbm_init(d.n, n_hidden, int(rng.integers(0, 2**63)))
    if m.n_visible != d.n:
        raise ShapeError(f"data width {d.n} does not match {m.n_visible} visible units")
    theta = m.flat()
    free = np.ones(theta.size, dtype=bool)
    if len(frozen):
        free[list(frozen)] = False
    data = d.bits.astype(float)
    nv, nh = m.n_visible, m.n_hidden
    for epoch in range(epochs):
        order = rng.permutation(d.M)
        for start in range(0, d.M, batch_size):
            v0 = data[order[start : start + batch_size]]
            W, a, b = theta[: nv * nh].reshape(nv, nh), theta[nv * nh : nv * nh + nv], theta[nv * nh + nv :]
            ph0 = expit(v0 @ W + b)
            cur = RbmModel(nv, nh, W, a, b)
            vk = v0
            for _ in range(cd_steps):
                vk = _gibbs_step(cur, vk, rng)
            phk = expit(vk @ W + b)
            B = len(v0)
            gW = (v0.T @ ph0 - vk.T @ phk) / B
            grad = np.concatenate([gW.ravel(), (v0 - vk).mean(0), (ph0 - phk).mean(0)])
            theta = np.where(free, theta + lr * grad, theta)
            if not np.all(np.isfinite(theta)):
                raise NumericError(f"non-finite RBM parameters in epoch {epoch}", state={"epoch": epoch})
        if log is not None:
            fe = float(free_energy(m.with_flat(theta), data).mean())
            log({"epoch": epoch, "freeEnergy": fe})
    return m.with_flat(theta)


def rbm_sample(m: RbmModel, shots: int, burn_in: int = 200, thin: int = 5, seed: int = 0, chains: int = 100) -> BitDataset:
    """Block Gibbs sampling from parallel chains started at uniform random states."""
    if shots < 1:
        raise ValueError("shots must be positive")
    rng = np.random.default_rng(seed)
    chains = min(chains, shots)
    v = (rng.random((chains, m.n_visible)) < 0.5).astype(float)
    for _ in range(burn_in):
        v = _gibbs_step(m, v, rng)
    out = []
    collected = 0
    while collected < shots:
        for _ in range(thin):
            v = _gibbs_step(m, v, rng)
        out.append(v.copy())
        collected += chains
    return BitDataset(np.vstack(out)[:shots].astype(np.uint8))


def rbm_latent_interpolate(anchors, core: RbmModel, tau: float) -> RbmModel:
    """Model whose flat prefix is the interpolated latent vector; the rest is ``core``."""
    times = [t for t, _ in anchors]
    k, alpha, _ = interpolation_weights(times, tau)
    lo, hi = np.asarray(anchors[k][1], float), np.asarray(anchors[k + 1][1], float)
    if alpha == 0.0:
        lat = lo
    elif alpha == 1.0:
        lat = hi
    else:
        lat = (1.0 - alpha) * lo + alpha * hi
    flat = core.flat()
    flat[: lat.size] = lat
    return core.with_flat(flat)
