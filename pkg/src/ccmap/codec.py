"""Uniform float-to-bitstring quantisation and its inverse.

A value ``v`` in ``[a, b]`` falls in bin ``k = floor(2**N (v - a) / (b - a)) + 1``
and is written as the ``N``-bit big-endian encoding of ``k - 1``, so the lowest
bin is ``00..0`` and the highest ``11..1``.  Decoding returns the bin centre.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .datasets import BitDataset
from .errors import ShapeError
from .walsh import index_to_bits, bits_to_index


@dataclass
class QuantizerSpec:
    bits: int
    ranges: list[tuple[float, float]]
    clamped: int = field(default=0, compare=False)

    def __post_init__(self):
        if self.bits < 1:
            raise ValueError("need at least one bit per coordinate")
        self.ranges = [(float(a), float(b)) for a, b in self.ranges]
        for a, b in self.ranges:
            if not b > a:
                raise ValueError(f"empty range [{a}, {b}]")

    @property
    def coords(self) -> int:
        return len(self.ranges)

    @property
    def width(self) -> int:
        return self.coords * self.bits

    def step(self, coord: int = 0) -> float:
        a, b = self.ranges[coord]
        return (b - a) / 2**self.bits

    @classmethod
    def fit(cls, samples: np.ndarray, bits: int) -> "QuantizerSpec":
        """Ranges taken from the per-coordinate min and max of ``samples``."""
        samples = np.atleast_2d(np.asarray(samples, dtype=float))
        lo, hi = samples.min(axis=0), samples.max(axis=0)
        hi = np.where(hi > lo, hi, lo + 1.0)
        return cls(bits, list(zip(lo.tolist(), hi.tolist())))

    def to_json(self) -> str:
        return json.dumps({"bits": self.bits, "ranges": self.ranges, "coords": self.coords})

    @classmethod
    def from_json(cls, text: str) -> "QuantizerSpec":
        obj = json.loads(text)
        return cls(obj["bits"], [tuple(r) for r in obj["ranges"]])

    def save(self, path) -> Path:
        path = Path(path)
        path.write_text(self.to_json() + "\n")
        return path


def quantize(v, a: float, b: float, N: int, counter: QuantizerSpec | None = None) -> np.ndarray:
    """Zero-based bin indices ``k - 1`` for values ``v``, clamped to ``[0, 2**N - 1]``."""
    v = np.asarray(v, dtype=float)
    if not np.isfinite(v).all():
        raise ValueError("cannot quantise non-finite values")
    if counter is not None:
        counter.clamped += int(np.count_nonzero((v < a) | (v > b)))
    k = np.floor(2**N * (np.clip(v, a, b) - a) / (b - a)).astype(np.int64)
    return np.clip(k, 0, 2**N - 1)


def encode_value(v: float, bounds: tuple[float, float], N: int) -> str:
    k = int(quantize(v, bounds[0], bounds[1], N))
    return format(k, f"0{N}b")


def decode_bits(bits: str, bounds: tuple[float, float]) -> float:
    a, b = bounds
    N = len(bits)
    k = int(bits, 2) + 1
    return a + (k - 0.5) * (b - a) / 2**N


def encode_sample(p, spec: QuantizerSpec) -> str:
    if len(p) != spec.coords:
        raise ShapeError(f"sample has {len(p)} coordinates, spec expects {spec.coords}")
    return "".join(encode_value(v, r, spec.bits) for v, r in zip(p, spec.ranges))


def decode_sample(w: str, spec: QuantizerSpec) -> tuple[float, ...]:
    if len(w) % spec.coords or len(w) != spec.width:
        raise ShapeError(f"bit width {len(w)} does not split into {spec.coords} x {spec.bits}")
    N = spec.bits
    return tuple(decode_bits(w[i * N:(i + 1) * N], r) for i, r in enumerate(spec.ranges))


def encode_array(samples: np.ndarray, spec: QuantizerSpec) -> BitDataset:
    """Vectorised encoding of a ``(M, coords)`` float array."""
    samples = np.atleast_2d(np.asarray(samples, dtype=float))
    if samples.shape[1] != spec.coords:
        raise ShapeError(f"samples have {samples.shape[1]} coordinates, spec expects {spec.coords}")
    blocks = [
        index_to_bits(quantize(samples[:, c], a, b, spec.bits, counter=spec), spec.bits)
        for c, (a, b) in enumerate(spec.ranges)
    ]
    return BitDataset(np.concatenate(blocks, axis=1))


def decode_array(d: BitDataset, spec: QuantizerSpec) -> np.ndarray:
    if d.n % spec.coords or d.n != spec.width:
        raise ShapeError(f"bit width {d.n} does not split into {spec.coords} x {spec.bits}")
    N = spec.bits
    out = np.empty((d.M, spec.coords))
    for c, (a, b) in enumerate(spec.ranges):
        k = bits_to_index(d.bits[:, c * N:(c + 1) * N]) + 1
        out[:, c] = a + (k - 0.5) * (b - a) / 2**N
    return out


@dataclass
class FloatDataset:
    """Continuous samples (rows of coordinates) with per-coordinate bounds."""

    samples: np.ndarray
    ranges: list[tuple[float, float]]

    def __post_init__(self):
        self.samples = np.atleast_2d(np.asarray(self.samples, dtype=float))
        if self.samples.shape[1] != len(self.ranges):
            raise ShapeError("one range per coordinate is required")

    def clamped(self) -> "FloatDataset":
        lo = np.array([a for a, _ in self.ranges])
        hi = np.array([b for _, b in self.ranges])
        return FloatDataset(np.clip(self.samples, lo, hi), self.ranges)

    def encode(self, bits: int) -> tuple[BitDataset, QuantizerSpec]:
        spec = QuantizerSpec(bits, self.ranges)
        return encode_array(self.samples, spec), spec
