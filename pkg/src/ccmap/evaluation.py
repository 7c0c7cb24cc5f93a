"""Snapshot-level metrics: pooled-histogram JS and feature MMD under a random conv encoder."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import DataError, FormatError, ShapeError
from .spectrum import js_divergence

MIN_GRID = 8


@dataclass(frozen=True)
class FieldSnapshot:
    grid: np.ndarray

    def __post_init__(self):
        g = np.array(self.grid, dtype=float)
        if g.ndim != 2:
            raise ShapeError(f"field must be 2D, got shape {g.shape}")
        if not np.all(np.isfinite(g)):
            raise DataError("field contains non-finite values")
        g.setflags(write=False)
        object.__setattr__(self, "grid", g)

    @property
    def height(self) -> int:
        return self.grid.shape[0]

    @property
    def width(self) -> int:
        return self.grid.shape[1]


class MetricResult(float):
    """A float carrying a ``degenerate`` flag."""

    degenerate: bool

    def __new__(cls, value, degenerate=False):
        obj = super().__new__(cls, value)
        obj.degenerate = degenerate
        return obj


def pdf_js(real, gen, bins: int = 50, eps: float = 1e-12) -> MetricResult:
    if not real or not gen:
        raise DataError("both snapshot lists must be nonempty")
    a = np.concatenate([f.grid.ravel() for f in real])
    b = np.concatenate([f.grid.ravel() for f in gen])
    lo = min(a.min(), b.min())
    hi = max(a.max(), b.max())
    if hi == lo:
        return MetricResult(0.0, True)
    ha, _ = np.histogram(a, bins=bins, range=(lo, hi))
    hb, _ = np.histogram(b, bins=bins, range=(lo, hi))
    return MetricResult(js_divergence(ha / ha.sum(), hb / hb.sum(), eps))


def _conv_stride2(x: np.ndarray, w: np.ndarray) -> np.ndarray:
    """3x3 convolution with stride 2 and zero padding 1; x is (C, H, W), w is (O, C, 3, 3)."""
    c, h, wd = x.shape
    xp = np.pad(x, ((0, 0), (1, 1), (1, 1)))
    ho, wo = (h + 1) // 2, (wd + 1) // 2
    k = w.shape[-1]
    cols = np.empty((c, k, k, ho, wo))
    for i in range(k):
        for j in range(k):
            cols[:, i, j] = xp[:, i : i + 2 * ho : 2, j : j + 2 * wo : 2]
    return np.einsum("ocij,cijhw->ohw", w, cols, optimize=True)


@dataclass(frozen=True)
class RandomConvEncoder:
    seed: int = 0
    channels: tuple[int, ...] = (8, 16, 32)
    kernel: int = 3
    weights: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        rng = np.random.default_rng(self.seed)
        ws, fan = [], 1
        for out in self.channels:
            w = rng.normal(0.0, 1.0 / np.sqrt(fan * self.kernel**2), size=(out, fan, self.kernel, self.kernel))
            w.setflags(write=False)
            ws.append(w)
            fan = out
        object.__setattr__(self, "weights", tuple(ws))

    @property
    def dim(self) -> int:
        return self.channels[-1]

    def config(self) -> dict:
        return {
            "seed": self.seed,
            "channels": list(self.channels),
            "kernel": self.kernel,
            "stride": 2,
            "padding": 1,
            "bias": 0.0,
            "weightStd": "1/sqrt(fan_in)",
            "pooling": "global-mean",
        }


def encode_field(e: RandomConvEncoder, f: FieldSnapshot) -> np.ndarray:
    if min(f.height, f.width) < MIN_GRID:
        raise ShapeError(f"grid {f.height}x{f.width} too small, need at least {MIN_GRID}x{MIN_GRID}")
    x = f.grid[None]
    for w in e.weights:
        x = np.maximum(_conv_stride2(x, w), 0.0)
    return x.mean(axis=(1, 2))


def feature_mmd(real, gen, encoder: RandomConvEncoder) -> MetricResult:
    """Biased Gaussian-kernel MMD^2 between encoded snapshot sets.

    The bandwidth is the median of all pairwise distances in the pooled set.
    """
    if not real or not gen:
        raise DataError("both snapshot lists must be nonempty")
    F = np.array([encode_field(encoder, f) for f in real])
    G = np.array([encode_field(encoder, g) for g in gen])
    Z = np.vstack([F, G])
    sq = np.maximum(((Z[:, None, :] - Z[None, :, :]) ** 2).sum(-1), 0.0)
    iu = np.triu_indices(len(Z), 1)
    sigma = float(np.median(np.sqrt(sq[iu]))) if iu[0].size else 0.0
    if sigma == 0.0:
        return MetricResult(0.0, True)
    K = np.exp(-sq / (2.0 * sigma**2))
    nf = len(F)
    kff = K[:nf, :nf].mean()
    kgg = K[nf:, nf:].mean()
    kfg = K[:nf, nf:].mean()
    return MetricResult(max(kff + kgg - 2.0 * kfg, 0.0))


# ------------------------------------------------------------------ loading

_FIELD_MAGIC = b"FLD1"


def load_field(path) -> FieldSnapshot:
    """Read a CSV grid or a packed float64 file (magic, height, width, data)."""
    path = Path(path)
    raw = path.read_bytes()
    if raw[:4] == _FIELD_MAGIC:
        h, w = np.frombuffer(raw[4:12], dtype="<u4")
        data = np.frombuffer(raw[12:], dtype="<f8")
        if data.size != int(h) * int(w):
            raise FormatError(f"{path}: payload does not match header {h}x{w}")
        return FieldSnapshot(data.reshape(int(h), int(w)))
    try:
        grid = np.loadtxt(path, delimiter=",", ndmin=2)
    except ValueError as exc:
        raise FormatError(f"{path}: {exc}") from None
    return FieldSnapshot(grid)


def save_field(f: FieldSnapshot, path, binary: bool = False) -> Path:
    path = Path(path)
    if binary:
        header = _FIELD_MAGIC + np.array([f.height, f.width], dtype="<u4").tobytes()
        path.write_bytes(header + f.grid.astype("<f8").tobytes())
    else:
        np.savetxt(path, f.grid, delimiter=",", fmt="%.17g")
    return path


def load_field_dir(directory) -> list[FieldSnapshot]:
    directory = Path(directory)
    files = sorted(p for p in directory.iterdir() if p.is_file() and p.suffix in (".csv", ".fld"))
    if not files:
        raise DataError(f"no .csv or .fld snapshots in {directory}")
    return [load_field(p) for p in files]


def evaluate(real, gen, encoder: RandomConvEncoder, bins: int = 50) -> dict:
    js = pdf_js(real, gen, bins)
    mmd = feature_mmd(real, gen, encoder)
    return {
        "pdf_js": float(js),
        "feature_mmd": float(mmd),
        "degenerate": {"pdf_js": js.degenerate, "feature_mmd": mmd.degenerate},
        "config": {"bins": bins, "encoder": encoder.config(), "nReal": len(real), "nGen": len(gen)},
    }


def dumps(result: dict) -> str:
    return json.dumps(result, sort_keys=True)
