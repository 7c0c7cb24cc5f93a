"""Bitstring datasets: ingestion, persistence and empirical probabilities."""
from __future__ import annotations

import csv
import hashlib
import json
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import CapacityError, FormatError, ParseError, ShapeError
from .walsh import DENSE_LIMIT, bits_to_index

FORMATS = ("text-lines", "packed-binary", "csv")
_MAGIC = b"BITS"
_HEADER = struct.Struct("<4sIQ")  # magic, n, M


@dataclass(frozen=True, eq=False)
class BitDataset:
    """``M`` samples of ``n``-bit strings stored as a ``(M, n)`` uint8 array.

    Column ``i`` is character ``i`` of the string form (most significant bit first).
    """

    bits: np.ndarray

    def __post_init__(self):
        bits = np.asarray(self.bits)
        if bits.ndim != 2:
            raise ShapeError(f"expected a (M, n) array, got shape {bits.shape}")
        if bits.shape[0] < 1:
            raise FormatError("a dataset needs at least one sample")
        if bits.shape[1] < 1:
            raise FormatError("samples must have at least one bit")
        if bits.size and not np.isin(bits, (0, 1)).all():
            raise ParseError("bit values must be 0 or 1")
        bits = np.ascontiguousarray(bits, dtype=np.uint8)
        bits.setflags(write=False)
        object.__setattr__(self, "bits", bits)

    @property
    def n(self) -> int:
        return self.bits.shape[1]

    @property
    def M(self) -> int:
        return self.bits.shape[0]

    @classmethod
    def from_strings(cls, samples) -> "BitDataset":
        samples = list(samples)
        if not samples:
            raise FormatError("a dataset needs at least one sample")
        width = len(samples[0])
        rows = []
        for lineno, s in enumerate(samples, 1):
            if len(s) != width:
                raise FormatError(f"row {lineno} has width {len(s)}, expected {width}")
            if set(s) - {"0", "1"}:
                raise ParseError(f"row {lineno} contains characters outside {{0,1}}: {s!r}")
            rows.append([c == "1" for c in s])
        return cls(np.array(rows, dtype=np.uint8).reshape(len(rows), width))

    @classmethod
    def from_indices(cls, index, n: int) -> "BitDataset":
        from .walsh import index_to_bits

        return cls(index_to_bits(np.asarray(index, dtype=np.int64), n))

    def strings(self) -> list[str]:
        return ["".join("1" if b else "0" for b in row) for row in self.bits]

    def indices(self) -> np.ndarray:
        if self.n > 62:
            raise CapacityError(f"integer indexing needs n <= 62, got {self.n}")
        return bits_to_index(self.bits)

    def __eq__(self, other):
        return isinstance(other, BitDataset) and np.array_equal(self.bits, other.bits)

    def __len__(self):
        return self.M


@dataclass(frozen=True, eq=False)
class EmpiricalPmf:
    """Probability mass over observed ``n``-bit strings.

    ``support`` holds the distinct strings as a ``(K, n)`` bit array and
    ``probs`` their masses.  :meth:`dense` materialises all ``2**n`` entries.
    """

    n: int
    support: np.ndarray
    probs: np.ndarray

    @property
    def mass(self) -> dict[str, float]:
        return {"".join(map(str, row)): float(p) for row, p in zip(self.support, self.probs)}

    def dense(self) -> np.ndarray:
        if self.n > DENSE_LIMIT:
            raise CapacityError(f"dense pmf needs n <= {DENSE_LIMIT}, got {self.n}")
        out = np.zeros(1 << self.n)
        np.add.at(out, bits_to_index(self.support), self.probs)
        return out

    @classmethod
    def from_dense(cls, probs: np.ndarray) -> "EmpiricalPmf":
        probs = np.asarray(probs, dtype=float)
        n = int(probs.size).bit_length() - 1
        if probs.size != 1 << n:
            raise ShapeError("dense pmf length must be a power of two")
        if (probs < 0).any() or abs(probs.sum() - 1.0) > 1e-12:
            raise ValueError("masses must be nonnegative and sum to 1")
        idx = np.flatnonzero(probs)
        from .walsh import index_to_bits

        return cls(n, index_to_bits(idx, n), probs[idx])


def empirical_pmf(d: BitDataset) -> EmpiricalPmf:
    rows, counts = np.unique(d.bits, axis=0, return_counts=True)
    return EmpiricalPmf(d.n, rows, counts / d.M)


def iid_uniform(n: int, M: int, seed: int) -> BitDataset:
    """Independent fair bits; the null model for the spectral indicator."""
    if n < 1 or M < 1:
        raise ValueError("n and M must be positive")
    rng = np.random.default_rng(seed)
    return BitDataset(rng.integers(0, 2, size=(M, n), dtype=np.uint8))


def even_parity(n: int, M: int, seed: int) -> BitDataset:
    """Uniform draws from the strings with an even number of ones."""
    rng = np.random.default_rng(seed)
    bits = rng.integers(0, 2, size=(M, n), dtype=np.uint8)
    bits[:, -1] = bits[:, :-1].sum(axis=1) % 2
    return BitDataset(bits)


# ---------------------------------------------------------------- file I/O

def _infer_format(path: Path) -> str:
    suffix = path.suffix.lower()
    if suffix == ".csv":
        return "csv"
    if suffix in (".bin", ".pbits"):
        return "packed-binary"
    return "text-lines"


def load_bit_dataset(path, format: str | None = None) -> BitDataset:
    path = Path(path)
    format = format or _infer_format(path)
    if format == "text-lines":
        lines = [ln.strip() for ln in path.read_text().splitlines()]
        return BitDataset.from_strings([ln for ln in lines if ln])
    if format == "csv":
        with path.open(newline="") as fh:
            rows = [r for r in csv.reader(fh) if r]
        if not rows:
            raise FormatError(f"{path}: empty file")
        return BitDataset.from_strings(["".join(c.strip() for c in r) for r in rows])
    if format == "packed-binary":
        raw = path.read_bytes()
        if len(raw) < _HEADER.size:
            raise FormatError(f"{path}: truncated header")
        magic, n, M = _HEADER.unpack_from(raw)
        if magic != _MAGIC:
            raise FormatError(f"{path}: bad magic {magic!r}")
        row_bytes = (n + 7) // 8
        body = np.frombuffer(raw, dtype=np.uint8, offset=_HEADER.size)
        if body.size != M * row_bytes:
            raise FormatError(f"{path}: expected {M * row_bytes} payload bytes, got {body.size}")
        bits = np.unpackbits(body.reshape(M, row_bytes), axis=1, bitorder="little")[:, :n]
        return BitDataset(bits)
    raise FormatError(f"unknown format {format!r}; expected one of {FORMATS}")


def save_bit_dataset(d: BitDataset, path, format: str | None = None) -> Path:
    path = Path(path)
    format = format or _infer_format(path)
    if format == "text-lines":
        path.write_text("\n".join(d.strings()) + "\n")
    elif format == "csv":
        with path.open("w", newline="") as fh:
            csv.writer(fh).writerows(d.bits.tolist())
    elif format == "packed-binary":
        packed = np.packbits(d.bits, axis=1, bitorder="little")
        path.write_bytes(_HEADER.pack(_MAGIC, d.n, d.M) + packed.tobytes())
    else:
        raise FormatError(f"unknown format {format!r}; expected one of {FORMATS}")
    return path


def file_checksum(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def write_manifest(d: BitDataset, path, source=None) -> Path:
    """Write ``<path>.json`` recording width, size, source and checksum."""
    path = Path(path)
    manifest = {
        "n": d.n,
        "M": d.M,
        "source": str(source if source is not None else path),
        "sha256": file_checksum(path),
    }
    out = path.with_name(path.name + ".json")
    out.write_text(json.dumps(manifest, indent=2) + "\n")
    return out
