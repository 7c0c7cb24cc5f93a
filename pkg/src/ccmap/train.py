"""MMD training, QCLI maximisation and latent-block adaptation of IQP circuits."""
from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, NamedTuple, Sequence

import numpy as np

from .cci import cci
from .datasets import BitDataset
from .errors import InsufficientDataError, NumericError, ShapeError
from .iqp import IqpCircuit, data_z_expectations, exact_distribution, sample
from .mmd import (
    KernelSpec,
    mmd_loss_and_gradient,
    mmd_pauli,
    mmd_raw,
    pauli_coefficients,
)
from .iqp import all_z_expectations
from .optim import SPSA, Adam, OptimizerConfig
from .spectrum import qcli


def param_checksum(thetas: np.ndarray) -> str:
    return hashlib.sha256(np.ascontiguousarray(thetas, dtype=np.float64).tobytes()).hexdigest()[:16]


class JsonlLog:
    """Append-only JSON-lines run log."""

    def __init__(self, path):
        self.path = Path(path)
        self.fh = self.path.open("a")

    def __call__(self, record: dict):
        self.fh.write(json.dumps(record) + "\n")
        self.fh.flush()

    def close(self):
        self.fh.close()


def _check_finite(value, step, thetas):
    if not np.isfinite(value):
        raise NumericError(
            f"non-finite loss at step {step}",
            state={"step": step, "loss": repr(value), "thetas": np.asarray(thetas).tolist()},
        )


def exact_loss(c: IqpCircuit, data: BitDataset, kernel: KernelSpec) -> float:
    coeffs = pauli_coefficients(c.n, kernel.sigma)
    return mmd_pauli(all_z_expectations(c), data_z_expectations(data), coeffs)


def train_mmd(
    c: IqpCircuit,
    data: BitDataset,
    kernel: KernelSpec,
    opt: OptimizerConfig,
    frozen: Sequence[int] = (),
    log: Callable[[dict], None] | None = None,
) -> tuple[IqpCircuit, list[float]]:
    """Fit generator angles to ``data`` by minimising the MMD loss.

    The history holds the loss before each update and, last, the loss of the
    returned circuit.  Angles listed in ``frozen`` are never modified.
    """
    if data.n != c.n:
        raise ShapeError(f"data width {data.n} does not match circuit width {c.n}")
    frozen = sorted(set(frozen))
    if frozen and not 0 <= frozen[0] <= frozen[-1] < c.size:
        raise ValueError("frozen indices out of range")
    coeffs = pauli_coefficients(c.n, kernel.sigma)
    target = data_z_expectations(data)
    thetas = np.array(c.thetas)
    history: list[float] = []

    def record(step, loss):
        _check_finite(loss, step, thetas)
        history.append(loss)
        if log is not None:
            log({"step": step, "loss": loss, "paramChecksum": param_checksum(thetas)})

    if opt.method == "adam":
        adam = Adam(c.size, opt.learning_rate, opt.beta1, opt.beta2, opt.eps, frozen)
        for step in range(opt.steps):
            loss, grad = mmd_loss_and_gradient(c.with_thetas(thetas), target, coeffs)
            record(step, loss)
            thetas = adam.step(thetas, grad)
        record(opt.steps, mmd_loss_and_gradient(c.with_thetas(thetas), target, coeffs)[0])
        return c.with_thetas(thetas), history

    spsa = SPSA(c.size, opt.learning_rate, opt.spsa_perturbation, opt.spsa_stability, opt.seed, frozen)
    eval_seeds = np.random.default_rng(np.random.SeedSequence([opt.seed, 1]))
    kernel_raw = KernelSpec(kernel.sigma, "raw")

    def objective(t: np.ndarray) -> float:
        circ = c.with_thetas(t)
        if opt.loss == "exact":
            return mmd_pauli(all_z_expectations(circ), target, coeffs)
        s1, s2 = eval_seeds.integers(0, 2**63, size=2)
        model = sample(circ, opt.batch_samples, int(s1))
        pick = np.random.default_rng(int(s2)).choice(data.M, size=min(opt.batch_samples, data.M), replace=False)
        return mmd_raw(model, BitDataset(data.bits[pick]), kernel_raw)

    for step in range(opt.steps):
        record(step, mmd_pauli(all_z_expectations(c.with_thetas(thetas)), target, coeffs))
        thetas, probe = spsa.step(thetas, objective)
        _check_finite(probe, step, thetas)
    record(opt.steps, mmd_pauli(all_z_expectations(c.with_thetas(thetas)), target, coeffs))
    return c.with_thetas(thetas), history


@dataclass(frozen=True)
class TrajectoryPoint:
    step: int
    qcli: float
    cci: float


def maximize_qcli(
    c: IqpCircuit,
    opt: OptimizerConfig,
    shots_per_eval: int,
) -> tuple[IqpCircuit, list[TrajectoryPoint]]:
    """SPSA ascent on the QCLI of freshly sampled data.

    The objective sees only QCLI.  CCI is measured on a separate sample after
    every step purely for logging.
    """
    if opt.method != "spsa":
        raise ValueError("QCLI of sampled data is not differentiable; use method='spsa'")
    objective_seeds = np.random.default_rng(np.random.SeedSequence([opt.seed, 2]))
    log_seeds = np.random.default_rng(np.random.SeedSequence([opt.seed, 3]))

    def objective(t: np.ndarray) -> float:
        data = sample(c.with_thetas(t), shots_per_eval, int(objective_seeds.integers(0, 2**63)))
        return -qcli(data)

    def observe(step: int, t: np.ndarray) -> TrajectoryPoint:
        data = sample(c.with_thetas(t), shots_per_eval, int(log_seeds.integers(0, 2**63)))
        return TrajectoryPoint(step, qcli(data), cci(data).cci)

    thetas = np.array(c.thetas)
    trajectory = [observe(0, thetas)]
    spsa = SPSA(c.size, opt.learning_rate, opt.spsa_perturbation, opt.spsa_stability, opt.seed)
    for step in range(1, opt.steps + 1):
        thetas, probe = spsa.step(thetas, objective)
        _check_finite(probe, step, thetas)
        trajectory.append(observe(step, thetas))
    return c.with_thetas(thetas), trajectory


# ---------------------------------------------------------- latent adaptation

@dataclass(frozen=True)
class ParamPartition:
    """Latent block = first ``d_lat`` generators in canonical order; core = the rest."""

    latent_indices: tuple[int, ...]
    core_indices: tuple[int, ...]

    @classmethod
    def first(cls, size: int, d_lat: int) -> "ParamPartition":
        if not 0 < d_lat < size:
            raise ValueError(f"latent size {d_lat} must lie in (0, {size})")
        return cls(tuple(range(d_lat)), tuple(range(d_lat, size)))

    @classmethod
    def for_circuit(cls, c: IqpCircuit, d_lat: int) -> "ParamPartition":
        if not c.canonical:
            raise ValueError("latent partition requires a canonically ordered circuit")
        return cls.first(c.size, d_lat)

    @property
    def d_lat(self) -> int:
        return len(self.latent_indices)

    def assemble(self, core: np.ndarray, latent: np.ndarray) -> np.ndarray:
        out = np.empty(self.d_lat + len(self.core_indices))
        out[list(self.latent_indices)] = latent
        out[list(self.core_indices)] = core
        return out


class CoreFit(NamedTuple):
    core: np.ndarray
    latent_init: np.ndarray
    history: list
    circuit: IqpCircuit


def fit_core(
    template: IqpCircuit,
    data: BitDataset,
    partition: ParamPartition,
    kernel: KernelSpec,
    opt: OptimizerConfig,
) -> CoreFit:
    """Train only the core angles; the latent block keeps its initial values."""
    trained, history = train_mmd(template, data, kernel, opt, frozen=partition.latent_indices)
    core = trained.thetas[list(partition.core_indices)]
    latent = trained.thetas[list(partition.latent_indices)]
    return CoreFit(core, latent, history, trained)


def interpolation_weights(times: Sequence[float], tau: float) -> tuple[int, float, bool]:
    """Segment index ``k`` and ``alpha`` with ``tau = (1-alpha) t_k + alpha t_{k+1}``.

    Outside the anchor range the nearest segment is extended linearly and the
    returned flag is set.
    """
    times = list(times)
    if len(times) < 2:
        raise InsufficientDataError("interpolation needs at least two anchors")
    if tau < times[0]:
        k, extrapolated = 0, True
    elif tau > times[-1]:
        k, extrapolated = len(times) - 2, True
    else:
        k = min(int(np.searchsorted(times, tau, side="right")) - 1, len(times) - 2)
        extrapolated = False
    alpha = (tau - times[k]) / (times[k + 1] - times[k])
    return k, float(alpha), extrapolated


@dataclass
class LatentTrajectory:
    """Time-ordered latent anchors sharing one frozen core and circuit template."""

    template: IqpCircuit
    partition: ParamPartition
    core: np.ndarray
    anchors: list[tuple[float, np.ndarray]] = field(default_factory=list)

    def __post_init__(self):
        self.core = np.array(self.core, dtype=float)
        for i in range(1, len(self.anchors)):
            if not self.anchors[i][0] > self.anchors[i - 1][0]:
                raise ValueError("anchor times must be strictly increasing")

    @property
    def times(self) -> list[float]:
        return [t for t, _ in self.anchors]

    def appended(self, t: float, latent: np.ndarray) -> "LatentTrajectory":
        latent = np.array(latent, dtype=float)
        if latent.shape != (self.partition.d_lat,):
            raise ShapeError(f"latent vector must have length {self.partition.d_lat}")
        if self.anchors and not t > self.anchors[-1][0]:
            raise ValueError(f"anchor time {t} does not follow {self.anchors[-1][0]}")
        return LatentTrajectory(self.template, self.partition, self.core, [*self.anchors, (t, latent)])

    def circuit(self, latent: np.ndarray) -> IqpCircuit:
        return self.template.with_thetas(self.partition.assemble(self.core, latent))

    def to_dict(self) -> dict:
        return {
            "template": self.template.to_dict(),
            "latentIndices": list(self.partition.latent_indices),
            "coreIndices": list(self.partition.core_indices),
            "core": self.core.tolist(),
            "anchors": [{"t": t, "thetaLat": v.tolist()} for t, v in self.anchors],
        }

    @classmethod
    def from_dict(cls, obj: dict) -> "LatentTrajectory":
        return cls(
            IqpCircuit.from_dict(obj["template"]),
            ParamPartition(tuple(obj["latentIndices"]), tuple(obj["coreIndices"])),
            np.array(obj["core"]),
            [(a["t"], np.array(a["thetaLat"])) for a in obj["anchors"]],
        )

    def save(self, path) -> Path:
        path = Path(path)
        path.write_text(json.dumps(self.to_dict()) + "\n")
        return path

    @classmethod
    def load(cls, path) -> "LatentTrajectory":
        return cls.from_dict(json.loads(Path(path).read_text()))


def start_trajectory(template: IqpCircuit, partition: ParamPartition, fit: CoreFit, t: float = 1) -> LatentTrajectory:
    return LatentTrajectory(template, partition, fit.core).appended(t, fit.latent_init)


def adapt_latent(
    traj: LatentTrajectory,
    t: float,
    data: BitDataset,
    kernel: KernelSpec,
    opt: OptimizerConfig,
) -> tuple[LatentTrajectory, list[float]]:
    """Fit only the latent block to ``data``, warm-started from the last anchor."""
    if not traj.anchors:
        raise InsufficientDataError("adaptation needs an existing anchor")
    start = traj.circuit(traj.anchors[-1][1])
    trained, history = train_mmd(start, data, kernel, opt, frozen=traj.partition.core_indices)
    latent = trained.thetas[list(traj.partition.latent_indices)]
    return traj.appended(t, latent), history


def interpolate_latent(traj: LatentTrajectory, tau: float) -> tuple[np.ndarray, bool]:
    """Piecewise-linear latent vector at time ``tau`` and an extrapolation flag."""
    k, alpha, extrapolated = interpolation_weights(traj.times, tau)
    lo, hi = traj.anchors[k][1], traj.anchors[k + 1][1]
    if alpha == 0.0:
        return lo.copy(), extrapolated
    if alpha == 1.0:
        return hi.copy(), extrapolated
    return (1.0 - alpha) * lo + alpha * hi, extrapolated


def generate_snapshot(traj: LatentTrajectory, tau: float, shots: int, seed: int) -> BitDataset:
    latent, _ = interpolate_latent(traj, tau)
    return sample(traj.circuit(latent), shots, seed)


def snapshot_distribution(traj: LatentTrajectory, tau: float) -> np.ndarray:
    latent, _ = interpolate_latent(traj, tau)
    return exact_distribution(traj.circuit(latent)).probs
