"""Reproducible study pipelines: mismatch sweep, QCLI/CCI coupling, temporal adaptation.

Every row is a pure function of (config, seed), so any single row can be
recomputed in isolation.  Presets ending in ``-desk`` are sized for a laptop;
the others follow the full-scale settings and take hours.
"""
from __future__ import annotations

import hashlib
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields, is_dataclass
from importlib import resources
from pathlib import Path
from typing import Callable

import numpy as np
from scipy.stats import spearmanr

from .datasets import BitDataset, iid_uniform
from .errors import CcmapError, ConfigError
from .iqp import (
    all_z_expectations,
    data_z_expectations,
    exact_distribution,
    full_circuit,
    random_circuit,
    sample,
    sample_distribution,
    z_expectations_of,
)
from .mmd import KernelSpec, default_sigma, mmd_pauli, pauli_coefficients
from .optim import OptimizerConfig
from .rbm import RbmModel, default_hidden, exact_marginal, rbm_init, rbm_latent_interpolate, rbm_train
from .spectrum import qcli_exact
from .train import (
    ParamPartition,
    adapt_latent,
    fit_core,
    interpolate_latent,
    maximize_qcli,
    start_trajectory,
    train_mmd,
)
from .walsh import count_subsets, index_to_bits


def _plain(obj):
    if is_dataclass(obj):
        return {f.name: _plain(getattr(obj, f.name)) for f in fields(obj)}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, dict):
        return {k: _plain(v) for k, v in obj.items()}
    return obj


def config_hash(cfg) -> str:
    """sha256 of the canonical JSON form of a config."""
    blob = json.dumps(_plain(cfg), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()


def _substream(*key: int) -> int:
    return int(np.random.SeedSequence(list(key)).generate_state(1, np.uint64)[0] >> 1)


def _map(fn: Callable, jobs: list, workers: int) -> list:
    if workers <= 1 or len(jobs) <= 1:
        return [fn(*j) for j in jobs]
    with ProcessPoolExecutor(workers) as pool:
        return list(pool.map(fn, *zip(*jobs)))


def _from_dict(cls, obj: dict):
    kw = {}
    for f in fields(cls):
        if f.name not in obj:
            continue
        v = obj[f.name]
        if f.name.endswith("opt") or f.name == "train":
            v = OptimizerConfig(**v) if isinstance(v, dict) else v
        elif isinstance(v, list):
            v = tuple(v)
        kw[f.name] = v
    unknown = set(obj) - {f.name for f in fields(cls)}
    if unknown:
        raise ConfigError(f"unknown config keys for {cls.__name__}: {sorted(unknown)}")
    return cls(**kw)


def terciles(x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Indices of the bottom and top thirds of ``x`` (stable order)."""
    order = np.argsort(x, kind="stable")
    k = len(x) // 3
    return order[:k], order[len(x) - k :]


# ------------------------------------------------------------ mismatch sweep

@dataclass(frozen=True)
class SweepConfig:
    n: int = 10
    generator_gates: tuple = (40, 80)
    generator_locality: int = 4
    # cycled by seed so targets cover a wide QCLI range
    generator_angle_scales: tuple = (math.pi / 16, math.pi / 8, math.pi / 4, math.pi / 2, math.pi)
    learner_gates: tuple = (30, 60)
    learner_locality: int = 2
    learner_angle_scale: float = math.pi / 8
    seeds: tuple = tuple(range(20))
    samples: int = 10000
    boost_steps: int = 0
    boost_lr: float = 0.2
    boost_shots: int = 2000
    qcli_min: float = 0.0
    qcli_max: float = 1.0
    train: OptimizerConfig = OptimizerConfig(steps=500, learning_rate=0.05)

    def __post_init__(self):
        if not self.learner_locality < self.generator_locality:
            raise ConfigError("learner locality must be below generator locality")
        if self.n > 16:
            raise ConfigError("sweep is limited to n <= 16")
        if not self.generator_angle_scales:
            raise ConfigError("need at least one generator angle scale")

    @classmethod
    def from_dict(cls, obj: dict) -> "SweepConfig":
        return _from_dict(cls, obj)


def sweep_point(cfg: SweepConfig, seed: int, gates: int) -> list[dict]:
    """Rows for one generator circuit, one per learner size."""
    h = config_hash(cfg)
    base = {"seed": seed, "generatorGates": gates, "configHash": h}
    try:
        scale = cfg.generator_angle_scales[seed % len(cfg.generator_angle_scales)]
        gen = random_circuit(cfg.n, gates, cfg.generator_locality, _substream(seed, gates, 1), angle_scale=scale)
        if cfg.boost_steps:
            boost = OptimizerConfig(method="spsa", steps=cfg.boost_steps, learning_rate=cfg.boost_lr, seed=_substream(seed, gates, 2))
            gen, _ = maximize_qcli(gen, boost, cfg.boost_shots)
        target = sample(gen, cfg.samples, _substream(seed, gates, 3))
        q = qcli_exact(target)
        if not cfg.qcli_min <= q <= cfg.qcli_max:
            return [{**base, "targetQcli": q, "status": "filtered"}]
        kernel = KernelSpec(default_sigma(cfg.n))
        rows = []
        for lg in cfg.learner_gates:
            replace = lg > count_subsets(cfg.n, cfg.learner_locality)
            learner = random_circuit(cfg.n, lg, cfg.learner_locality, _substream(seed, gates, 4, lg), replace=replace, angle_scale=cfg.learner_angle_scale)
            _, history = train_mmd(learner, target, kernel, cfg.train)
            rows.append({
                **base,
                "targetQcli": q,
                "learnerGates": lg,
                "learnerParams": learner.size,
                "initialMmd": history[0],
                "achievedMmd": history[-1],
                "status": "ok",
            })
        return rows
    except CcmapError as exc:
        return [{**base, "status": "failed", "error": f"{type(exc).__name__}: {exc}"}]


def run_mismatch_sweep(cfg: SweepConfig, workers: int = 1) -> list[dict]:
    jobs = [(cfg, s, g) for s in cfg.seeds for g in cfg.generator_gates]
    return [row for rows in _map(sweep_point, jobs, workers) for row in rows]


def sweep_trend(rows: list[dict], learner_gates) -> dict:
    """Mean achieved MMD in the bottom and top QCLI terciles per learner size."""
    ok = [r for r in rows if r["status"] == "ok"]
    out = {}
    for lg in learner_gates:
        sel = [r for r in ok if r["learnerGates"] == lg]
        q = np.array([r["targetQcli"] for r in sel])
        m = np.array([r["achievedMmd"] for r in sel])
        lo, hi = terciles(q)
        if lo.size == 0:
            out[lg] = {"points": len(sel), "bottom": None, "top": None}
            continue
        out[lg] = {"points": len(sel), "bottom": float(m[lo].mean()), "top": float(m[hi].mean())}
    return out


# ------------------------------------------------------------ coupling study

@dataclass(frozen=True)
class CouplingConfig:
    n: int = 8
    gates: int = 150
    locality: int = 2
    angle_scale: float = math.pi / 8
    seeds: tuple = tuple(range(20))
    steps: int = 99
    shots: int = 2000
    learning_rate: float = 0.1
    perturbation: float = 0.1

    @classmethod
    def from_dict(cls, obj: dict) -> "CouplingConfig":
        return _from_dict(cls, obj)

    @property
    def logged(self) -> int:
        return len(self.seeds) * (self.steps + 1)


def coupling_trajectory(cfg: CouplingConfig, seed: int) -> list[dict]:
    replace = cfg.gates > count_subsets(cfg.n, cfg.locality)
    c = random_circuit(cfg.n, cfg.gates, cfg.locality, _substream(seed, 1), replace=replace, angle_scale=cfg.angle_scale)
    opt = OptimizerConfig(
        method="spsa",
        steps=cfg.steps,
        learning_rate=cfg.learning_rate,
        spsa_perturbation=cfg.perturbation,
        seed=_substream(seed, 2),
    )
    _, traj = maximize_qcli(c, opt, cfg.shots)
    h = config_hash(cfg)
    return [{"n": cfg.n, "seed": seed, "step": p.step, "qcli": p.qcli, "cci": p.cci, "configHash": h} for p in traj]


def run_coupling_study(cfg: CouplingConfig, workers: int = 1) -> list[dict]:
    return [row for rows in _map(coupling_trajectory, [(cfg, s) for s in cfg.seeds], workers) for row in rows]


def coupling_summary(rows: list[dict]) -> dict:
    q = [r["qcli"] for r in rows]
    c = [r["cci"] for r in rows]
    res = spearmanr(q, c)
    return {"points": len(rows), "spearman": float(res.statistic), "pvalue": float(res.pvalue)}


# ------------------------------------------------------------ temporal study

@dataclass(frozen=True)
class TemporalConfig:
    """Drifting two-component product mixture.

    At time ``t`` the data are drawn from ``(1-w) A + w B`` where ``A`` and
    ``B`` are product distributions with bit-one probabilities ``p_a`` and
    ``p_b`` and ``w`` moves linearly from 0 at the first anchor to 1 at the last.
    """

    n: int = 10
    max_order: int = 3
    d_lat: int = 50
    anchors: tuple = (1, 100, 200, 300, 400, 500, 600, 700, 800, 900, 1000)
    p_a: tuple = (0.15, 0.2, 0.25, 0.3, 0.35, 0.65, 0.7, 0.75, 0.8, 0.85)
    p_b: tuple = (0.85, 0.8, 0.75, 0.7, 0.65, 0.35, 0.3, 0.25, 0.2, 0.15)
    samples: int = 5000
    heldout: int = 20
    seeds: tuple = tuple(range(10))
    init_scale: float = math.pi / 8
    core_opt: OptimizerConfig = OptimizerConfig(steps=400, learning_rate=0.05)
    adapt_opt: OptimizerConfig = OptimizerConfig(steps=150, learning_rate=0.02)
    rbm_hidden: int = 16
    rbm_epochs: int = 30
    rbm_adapt_epochs: int = 10
    rbm_lr: float = 0.05

    def __post_init__(self):
        if len(self.p_a) != self.n or len(self.p_b) != self.n:
            raise ConfigError("component marginals must have length n")
        if len(self.anchors) < 2 or any(b <= a for a, b in zip(self.anchors, self.anchors[1:])):
            raise ConfigError("anchors must be at least two strictly increasing times")

    @classmethod
    def from_dict(cls, obj: dict) -> "TemporalConfig":
        return _from_dict(cls, obj)

    def weight(self, t: float) -> float:
        t0, t1 = self.anchors[0], self.anchors[-1]
        return float(np.clip((t - t0) / (t1 - t0), 0.0, 1.0))


def mixture_distribution(cfg: TemporalConfig, t: float) -> np.ndarray:
    x = index_to_bits(np.arange(1 << cfg.n), cfg.n).astype(float)
    pa, pb = np.array(cfg.p_a), np.array(cfg.p_b)
    qa = np.prod(np.where(x == 1, pa, 1 - pa), axis=1)
    qb = np.prod(np.where(x == 1, pb, 1 - pb), axis=1)
    w = cfg.weight(t)
    return (1 - w) * qa + w * qb


def mixture_snapshot(cfg: TemporalConfig, t: float, seed: int) -> BitDataset:
    return sample_distribution(mixture_distribution(cfg, t), cfg.samples, seed)


def heldout_times(cfg: TemporalConfig, seed: int) -> list[int]:
    rng = np.random.default_rng(_substream(seed, 7))
    pool = np.setdiff1d(np.arange(cfg.anchors[0], cfg.anchors[-1] + 1), cfg.anchors)
    return sorted(int(t) for t in rng.choice(pool, size=cfg.heldout, replace=False))


def nearest_anchor(anchors, tau: float) -> int:
    """Index of the closest anchor; ties go to the earlier one."""
    d = [abs(tau - a) for a in anchors]
    return int(np.argmin(d))


def _report_row(seed, taus, interp, nearest, anchor_loss, anchor_gap) -> dict:
    return {
        "seed": seed,
        "taus": taus,
        "interpMmd": interp,
        "nearestMmd": nearest,
        "meanInterpMmd": float(np.mean(interp)),
        "meanNearestMmd": float(np.mean(nearest)),
        "anchorLoss": anchor_loss,
        "anchorGap": anchor_gap,
        "success": bool(np.mean(interp) < np.mean(nearest)),
    }


def temporal_seed_iqp(cfg: TemporalConfig, seed: int) -> dict:
    n = cfg.n
    kernel = KernelSpec(default_sigma(n))
    coeffs = pauli_coefficients(n, kernel.sigma)
    init = np.random.default_rng(_substream(seed, 1)).uniform(-cfg.init_scale, cfg.init_scale, count_subsets(n, cfg.max_order))
    template = full_circuit(n, cfg.max_order, init)
    part = ParamPartition.for_circuit(template, cfg.d_lat)
    data = [mixture_snapshot(cfg, t, _substream(seed, 2, t)) for t in cfg.anchors]
    fit = fit_core(template, data[0], part, kernel, cfg.core_opt)
    traj = start_trajectory(template, part, fit, cfg.anchors[0])
    losses = [fit.history[-1]]
    for t, d in zip(cfg.anchors[1:], data[1:]):
        traj, hist = adapt_latent(traj, t, d, kernel, cfg.adapt_opt)
        losses.append(hist[-1])
    # anchor consistency: the model at an anchor reproduces its fitted loss
    gap = 0.0
    for (t, lat), d, loss in zip(traj.anchors, data, losses):
        probs = exact_distribution(traj.circuit(lat)).probs
        gap = max(gap, abs(mmd_pauli(z_expectations_of(probs), data_z_expectations(d), coeffs) - loss))
    taus = heldout_times(cfg, seed)
    interp, nearest = [], []
    for tau in taus:
        target = data_z_expectations(mixture_snapshot(cfg, tau, _substream(seed, 3, tau)))
        lat, _ = interpolate_latent(traj, tau)
        interp.append(mmd_pauli(all_z_expectations(traj.circuit(lat)), target, coeffs))
        near = traj.anchors[nearest_anchor(cfg.anchors, tau)][1]
        nearest.append(mmd_pauli(all_z_expectations(traj.circuit(near)), target, coeffs))
    return _report_row(seed, taus, interp, nearest, losses, gap)


def temporal_seed_rbm(cfg: TemporalConfig, seed: int) -> dict:
    n = cfg.n
    kernel = KernelSpec(default_sigma(n))
    coeffs = pauli_coefficients(n, kernel.sigma)

    def loss_of(m: RbmModel, exp) -> float:
        return mmd_pauli(z_expectations_of(exact_marginal(m)), exp, coeffs)

    model = rbm_init(n, cfg.rbm_hidden, _substream(seed, 11))
    lat_idx = list(range(cfg.d_lat))
    core_idx = list(range(cfg.d_lat, model.size))
    data = [mixture_snapshot(cfg, t, _substream(seed, 2, t)) for t in cfg.anchors]
    model = rbm_train(data[0], cfg.rbm_hidden, cfg.rbm_epochs, cfg.rbm_lr, 1, _substream(seed, 12), frozen=lat_idx, init=model)
    anchors = [(cfg.anchors[0], model.flat()[: cfg.d_lat])]
    losses = [loss_of(model, data_z_expectations(data[0]))]
    for i, (t, d) in enumerate(zip(cfg.anchors[1:], data[1:]), start=1):
        model = rbm_train(d, cfg.rbm_hidden, cfg.rbm_adapt_epochs, cfg.rbm_lr, 1, _substream(seed, 13, i), frozen=core_idx, init=model)
        anchors.append((t, model.flat()[: cfg.d_lat]))
        losses.append(loss_of(model, data_z_expectations(d)))
    core = model
    taus = heldout_times(cfg, seed)
    interp, nearest = [], []
    for tau in taus:
        target = data_z_expectations(mixture_snapshot(cfg, tau, _substream(seed, 3, tau)))
        interp.append(loss_of(rbm_latent_interpolate(anchors, core, tau), target))
        k = nearest_anchor(cfg.anchors, tau)
        nearest.append(loss_of(rbm_latent_interpolate(anchors, core, cfg.anchors[k]), target))
    return _report_row(seed, taus, interp, nearest, losses, 0.0)


def run_temporal_study(cfg: TemporalConfig, workers: int = 1, baseline: bool = True) -> dict:
    h = config_hash(cfg)
    out = {"configHash": h, "config": _plain(cfg), "reports": []}
    models = [("iqp", temporal_seed_iqp)] + ([("rbm", temporal_seed_rbm)] if baseline else [])
    for name, fn in models:
        rows = _map(fn, [(cfg, s) for s in cfg.seeds], workers)
        out["reports"].append({
            "model": name,
            "seeds": rows,
            "successes": sum(r["success"] for r in rows),
            "trials": len(rows),
        })
    return out


# ------------------------------------------------------------ null calibration

NULL_FILE = "null_threshold.json"


def calibrate_null(n: int = 16, M: int = 10000, seeds=range(1000, 1100), sigmas: float = 5.0) -> dict:
    values = [qcli_exact(iid_uniform(n, M, s)) for s in seeds]
    mean, std = float(np.mean(values)), float(np.std(values, ddof=1))
    return {
        "n": n,
        "M": M,
        "seeds": [min(seeds), max(seeds)],
        "count": len(values),
        "mean": mean,
        "std": std,
        "sigmas": sigmas,
        "threshold": mean + sigmas * std,
    }


def null_threshold() -> dict:
    return json.loads(resources.files("ccmap").joinpath("data", NULL_FILE).read_text())


# ------------------------------------------------------------ presets

LONG_RUNNING = {"fig4-full", "fig5-full-8", "fig5-full-12", "fig5-full-16", "temporal-full"}

PRESETS: dict[str, tuple[str, object]] = {
    "fig4-desk": ("sweep", SweepConfig()),
    "fig5-desk": ("coupling", CouplingConfig()),
    "temporal-desk": ("temporal", TemporalConfig()),
    "fig4-full": (
        "sweep",
        SweepConfig(
            n=16,
            generator_gates=(140, 350, 700, 1050),
            learner_gates=(50, 100, 150),
            learner_angle_scale=math.pi / 8,
            seeds=tuple(range(50)),
            boost_steps=200,
            train=OptimizerConfig(steps=5000, learning_rate=1e-4),
        ),
    ),
    "fig5-full-8": ("coupling", CouplingConfig(n=8, seeds=tuple(range(200)), shots=20000)),
    "fig5-full-12": ("coupling", CouplingConfig(n=12, seeds=tuple(range(200)), shots=20000)),
    "fig5-full-16": ("coupling", CouplingConfig(n=16, seeds=tuple(range(200)), shots=20000)),
    "temporal-full": (
        "temporal",
        TemporalConfig(
            samples=50000,
            heldout=200,
            core_opt=OptimizerConfig(method="spsa", steps=30000, learning_rate=0.05, loss="sampled", batch_samples=500),
        ),
    ),
}


def preset(name: str):
    try:
        return PRESETS[name]
    except KeyError:
        raise ConfigError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}") from None
