"""IQP circuits ``H^n exp(i sum_s theta_s Z_s) H^n`` and their exact output laws.

The output probability of ``z`` is the squared normalised Walsh-Hadamard
transform of ``exp(i phi(x))`` with ``phi(x) = sum_s theta_s chi_s(x)``,
so everything here is a handful of dense transforms over ``2**n`` entries.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from math import pi
from pathlib import Path
from typing import Sequence

import numpy as np

from .datasets import BitDataset
from .errors import CapacityError
from .walsh import canonical_subsets, fwht, mask_to_subset, subset_to_mask

SIM_LIMIT = 20
INIT_SCALE = pi / 8


def _canonical_key(subset: tuple[int, ...]):
    return (len(subset), subset)


@dataclass(frozen=True, eq=False)
class IqpCircuit:
    """Generators ``(subset, theta)`` on ``n`` qubits.

    ``subsets`` are sorted tuples of qubit indices; ``thetas`` is aligned with
    them.  When ``canonical`` is set the generators are ordered by size and
    then lexicographically, which is the order the latent/core split uses.
    """

    n: int
    subsets: tuple[tuple[int, ...], ...]
    thetas: np.ndarray
    canonical: bool = True

    def __post_init__(self):
        subsets = tuple(tuple(sorted(s)) for s in self.subsets)
        thetas = np.array(self.thetas, dtype=float).reshape(-1)
        if len(subsets) != thetas.size:
            raise ValueError("one angle per generator is required")
        if len(set(subsets)) != len(subsets):
            raise ValueError("duplicate generators are not allowed")
        for s in subsets:
            if any(not 0 <= q < self.n for q in s):
                raise ValueError(f"generator {s} is not a subset of [0, {self.n})")
        if self.canonical and list(subsets) != sorted(subsets, key=_canonical_key):
            raise ValueError("generators are not in canonical order")
        thetas.setflags(write=False)
        masks = np.array([subset_to_mask(s, self.n) for s in subsets], dtype=np.int64)
        masks.setflags(write=False)
        object.__setattr__(self, "subsets", subsets)
        object.__setattr__(self, "thetas", thetas)
        object.__setattr__(self, "_masks", masks)

    @classmethod
    def from_generators(cls, n: int, generators, canonical: bool = True) -> "IqpCircuit":
        gens = [(tuple(sorted(s)), float(t)) for s, t in generators]
        if canonical:
            gens.sort(key=lambda g: _canonical_key(g[0]))
        return cls(n, tuple(s for s, _ in gens), np.array([t for _, t in gens]), canonical)

    @property
    def size(self) -> int:
        return len(self.subsets)

    @property
    def masks(self) -> np.ndarray:
        return self._masks

    def with_thetas(self, thetas) -> "IqpCircuit":
        """Same structure with new angles; skips re-validating the generators."""
        thetas = np.array(thetas, dtype=float).reshape(-1)
        if thetas.size != self.size:
            raise ValueError(f"expected {self.size} angles, got {thetas.size}")
        thetas.setflags(write=False)
        out = object.__new__(IqpCircuit)
        for name, value in (("n", self.n), ("subsets", self.subsets), ("thetas", thetas),
                            ("canonical", self.canonical), ("_masks", self._masks)):
            object.__setattr__(out, name, value)
        return out

    def max_locality(self) -> int:
        return max((len(s) for s in self.subsets), default=0)

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "canonical": self.canonical,
            "generators": [
                {"mask": int(m), "qubits": list(s), "theta": float(t)}
                for m, s, t in zip(self.masks, self.subsets, self.thetas)
            ],
        }

    @classmethod
    def from_dict(cls, obj: dict) -> "IqpCircuit":
        n = obj["n"]
        subsets = [mask_to_subset(g["mask"], n) for g in obj["generators"]]
        thetas = [g["theta"] for g in obj["generators"]]
        return cls(n, tuple(subsets), np.array(thetas), obj.get("canonical", True))

    def save(self, path) -> Path:
        path = Path(path)
        path.write_text(json.dumps(self.to_dict(), indent=1) + "\n")
        return path

    @classmethod
    def load(cls, path) -> "IqpCircuit":
        return cls.from_dict(json.loads(Path(path).read_text()))

    def __eq__(self, other):
        return (
            isinstance(other, IqpCircuit)
            and self.n == other.n
            and self.subsets == other.subsets
            and np.array_equal(self.thetas, other.thetas)
        )


@dataclass(frozen=True)
class OutputDistribution:
    n: int
    probs: np.ndarray


def random_circuit(
    n: int,
    gate_count: int,
    max_locality: int,
    seed: int,
    replace: bool = False,
    angle_scale: float = INIT_SCALE,
) -> IqpCircuit:
    """Random generators of size ``1..max_locality`` with angles in ``[-scale, scale]``.

    With ``replace=False`` the subsets are distinct.  With ``replace=True``
    ``gate_count`` gates are drawn independently and repeated subsets are
    merged by adding their angles (commuting gates compose additively); the
    gate sequence for a smaller count is then a prefix of a larger one.
    """
    pool = canonical_subsets(n, max_locality)
    sub_stream, ang_stream = np.random.SeedSequence(seed).spawn(2)
    rs, ra = np.random.default_rng(sub_stream), np.random.default_rng(ang_stream)
    if replace:
        picks = rs.integers(0, len(pool), size=gate_count)
        angles = ra.uniform(-angle_scale, angle_scale, size=gate_count)
        merged: dict[int, float] = {}
        for i, t in zip(picks.tolist(), angles.tolist()):
            merged[i] = merged.get(i, 0.0) + t
        gens = [(pool[i], merged[i]) for i in sorted(merged)]
        return IqpCircuit.from_generators(n, gens)
    if gate_count > len(pool):
        raise CapacityError(
            f"{gate_count} distinct gates requested but only {len(pool)} subsets "
            f"of size <= {max_locality} exist on {n} qubits"
        )
    picks = np.sort(rs.choice(len(pool), size=gate_count, replace=False))
    angles = ra.uniform(-angle_scale, angle_scale, size=gate_count)
    return IqpCircuit(n, tuple(pool[i] for i in picks), angles)


def full_circuit(n: int, max_locality: int, thetas=None) -> IqpCircuit:
    """Every subset of size ``1..max_locality`` in canonical order."""
    subsets = tuple(canonical_subsets(n, max_locality))
    thetas = np.zeros(len(subsets)) if thetas is None else thetas
    return IqpCircuit(n, subsets, thetas)


def _check_size(n: int):
    if n > SIM_LIMIT:
        raise CapacityError(f"dense IQP simulation needs n <= {SIM_LIMIT}, got {n}")


def phase_function(c: IqpCircuit) -> np.ndarray:
    _check_size(c.n)
    coeffs = np.zeros(1 << c.n)
    np.add.at(coeffs, c.masks, c.thetas)
    return fwht(coeffs)


def amplitudes(c: IqpCircuit) -> tuple[np.ndarray, np.ndarray]:
    """``(f, A)`` with ``f = exp(i phi)`` and ``A = 2**-n WHT(f)`` the output amplitudes."""
    f = np.exp(1j * phase_function(c))
    return f, fwht(f) / float(1 << c.n)


def exact_distribution(c: IqpCircuit) -> OutputDistribution:
    _, A = amplitudes(c)
    probs = A.real**2 + A.imag**2
    probs /= probs.sum()
    return OutputDistribution(c.n, probs)


def sample(c: IqpCircuit, shots: int, seed: int) -> BitDataset:
    """I.i.d. draws from the exact output distribution by inverse CDF."""
    return sample_distribution(exact_distribution(c).probs, shots, seed)


def sample_distribution(probs: np.ndarray, shots: int, seed: int) -> BitDataset:
    n = probs.size.bit_length() - 1
    cdf = np.cumsum(probs)
    cdf /= cdf[-1]
    u = np.random.default_rng(seed).random(shots)
    idx = np.minimum(np.searchsorted(cdf, u, side="right"), probs.size - 1)
    return BitDataset.from_indices(idx, n)


def z_expectations_of(probs: np.ndarray) -> np.ndarray:
    """``<Z_s> = sum_z p(z) chi_s(z)`` for every mask ``s``."""
    return fwht(np.asarray(probs, dtype=float))


def all_z_expectations(c: IqpCircuit) -> np.ndarray:
    return z_expectations_of(exact_distribution(c).probs)


def data_z_expectations(d: BitDataset) -> np.ndarray:
    """Empirical ``<Z_s>`` of a dataset for every mask."""
    _check_size(d.n)
    counts = np.bincount(d.indices(), minlength=1 << d.n)
    return fwht(counts / d.M)


def merge_thetas(template: IqpCircuit, indices: Sequence[int], values) -> IqpCircuit:
    thetas = np.array(template.thetas)
    thetas[list(indices)] = values
    return template.with_thetas(thetas)
