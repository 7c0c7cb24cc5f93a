"""Walsh-Hadamard transform and subset-mask helpers.

Bitstrings are stored as integers with the first character as the most
significant bit, so character position ``i`` of an ``n``-bit string maps to
integer bit ``n - 1 - i``.  Subset masks use the same convention, which makes
the parity character ``chi_s(x) = (-1)**popcount(s & x)`` and lets the
unnormalised transform below produce ``sum_x f(x) chi_s(x)`` at index ``s``.
"""
from __future__ import annotations

from itertools import combinations
from math import comb
from typing import Iterable, Sequence

import numpy as np
from scipy.linalg import hadamard

DENSE_LIMIT = 24


_BLOCK_BITS = 4
_HADAMARD = {g: hadamard(1 << g).astype(float) for g in range(1, _BLOCK_BITS + 1)}


def fwht(values: np.ndarray) -> np.ndarray:
    """Unnormalised fast Walsh-Hadamard transform along the last axis.

    Returns a new array ``out[..., s] = sum_x values[..., x] * (-1)**popcount(s & x)``.
    Works for real and complex input in ``O(N log N)``.  The transform is a
    tensor product over bits, so it is applied a few bits at a time as a small
    dense Hadamard matmul, which keeps the number of numpy passes low.
    """
    a = np.asarray(values)
    size = a.shape[-1]
    if size < 1 or size & (size - 1):
        raise ValueError(f"transform length must be a power of two, got {size}")
    if not np.issubdtype(a.dtype, np.inexact):
        a = a.astype(float)
    n = size.bit_length() - 1
    rows = a.size // size
    out = a.reshape(rows, 1, size).copy()
    lo, done = 1, 0
    while done < n:
        g = min(_BLOCK_BITS, n - done)
        blk = 1 << g
        out = np.matmul(_HADAMARD[g], out.reshape(rows * (size // (lo * blk)), blk, lo))
        lo *= blk
        done += g
    return out.reshape(a.shape)


def popcount(x: np.ndarray) -> np.ndarray:
    return np.bitwise_count(np.asarray(x, dtype=np.uint64)).astype(np.int64)


def orders(n: int) -> np.ndarray:
    """Hamming weight of every subset mask of ``[n]``."""
    return popcount(np.arange(1 << n, dtype=np.uint64))


def subset_to_mask(subset: Iterable[int], n: int) -> int:
    mask = 0
    for i in subset:
        if not 0 <= i < n:
            raise ValueError(f"qubit index {i} outside [0, {n})")
        mask |= 1 << (n - 1 - i)
    return mask


def mask_to_subset(mask: int, n: int) -> tuple[int, ...]:
    return tuple(i for i in range(n) if mask >> (n - 1 - i) & 1)


def canonical_subsets(n: int, max_order: int, include_empty: bool = False) -> list[tuple[int, ...]]:
    """Subsets ordered by increasing size, then lexicographically."""
    out: list[tuple[int, ...]] = [()] if include_empty else []
    for k in range(1, max_order + 1):
        out.extend(combinations(range(n), k))
    return out


def count_subsets(n: int, max_order: int) -> int:
    return sum(comb(n, k) for k in range(1, max_order + 1))


def bits_to_index(bits: np.ndarray) -> np.ndarray:
    """Rows of 0/1 (MSB first) to integer indices."""
    bits = np.asarray(bits)
    n = bits.shape[-1]
    weights = (1 << np.arange(n - 1, -1, -1, dtype=np.uint64)).astype(np.uint64)
    return (bits.astype(np.uint64) * weights).sum(axis=-1).astype(np.int64)


def index_to_bits(index: np.ndarray, n: int) -> np.ndarray:
    index = np.asarray(index, dtype=np.int64)
    shifts = np.arange(n - 1, -1, -1, dtype=np.int64)
    return ((index[..., None] >> shifts) & 1).astype(np.uint8)


def masks_to_bits(masks: Sequence[int], n: int) -> np.ndarray:
    return index_to_bits(np.asarray(masks, dtype=np.int64), n)
