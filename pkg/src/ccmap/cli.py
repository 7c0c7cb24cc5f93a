"""Command-line entry point: ``ccmap <subcommand> ...``.

Every run writes a manifest (command, config hash, seeds, input checksums,
outputs, version) atomically before any result file.  Exit codes: 0 success,
2 configuration error, 3 data error, 4 numeric failure.
"""
from __future__ import annotations

import argparse
import csv
import hashlib
import json
import math
import os
import sys
import tempfile
from pathlib import Path

import numpy as np

from . import __version__
from .cci import cci
from .codec import FloatDataset, QuantizerSpec, decode_array, encode_array
from .datasets import FORMATS, file_checksum, load_bit_dataset, save_bit_dataset, write_manifest
from .envelope import frontier_envelope, map_point, write_envelope_csv, write_map_csv
from .errors import CcmapError, ConfigError, DataError, NumericError
from .evaluation import RandomConvEncoder, evaluate, load_field_dir
from .experiments import (
    CouplingConfig,
    LONG_RUNNING,
    PRESETS,
    SweepConfig,
    TemporalConfig,
    config_hash,
    coupling_summary,
    preset,
    run_coupling_study,
    run_mismatch_sweep,
    run_temporal_study,
    sweep_trend,
)
from .iqp import IqpCircuit, full_circuit, random_circuit
from .mmd import KernelSpec, default_sigma
from .optim import OptimizerConfig
from .plots import scatter_svg, write_svg
from .spectrum import DEFAULT_BUDGET, binomial_baseline, exact_order_spectrum, qcli_from_spectrum, qcli_mc
from .train import (
    JsonlLog,
    LatentTrajectory,
    ParamPartition,
    adapt_latent,
    fit_core,
    generate_snapshot,
    interpolate_latent,
    start_trajectory,
    train_mmd,
)

CACHE_ENV = "CCMAP_CACHE_DIR"


# ------------------------------------------------------------------ helpers

def _atomic_write(path: Path, text: str):
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    with os.fdopen(fd, "w") as fh:
        fh.write(text)
    os.replace(tmp, path)


def _cache_dir() -> Path:
    return Path(os.environ.get(CACHE_ENV) or Path.home() / ".cache" / "ccmap")


def _settings(args) -> dict:
    skip = {"func", "command"}
    return {k: (str(v) if isinstance(v, Path) else v) for k, v in sorted(vars(args).items()) if k not in skip}


def _inputs_of(args) -> list[Path]:
    paths = []
    for key in ("input", "inputs", "circuit", "trajectory", "spec", "config", "real", "gen"):
        v = getattr(args, key, None)
        if v is None:
            continue
        for p in v if isinstance(v, list) else [v]:
            paths.append(Path(p))
    return paths


def _checksums(paths) -> dict:
    out = {}
    for p in paths:
        if p.is_file():
            out[str(p)] = file_checksum(p)
        elif p.is_dir():
            h = hashlib.sha256()
            for f in sorted(q for q in p.iterdir() if q.is_file()):
                h.update(f.name.encode())
                h.update(bytes.fromhex(file_checksum(f)))
            out[str(p)] = h.hexdigest()
        else:
            raise DataError(f"input not found: {p}")
    return out


def write_run_manifest(args, outputs: list[Path], seeds) -> Path:
    settings = _settings(args)
    chash = config_hash(settings)
    if outputs:
        path = outputs[0].with_name(outputs[0].name + ".manifest.json")
    else:
        path = _cache_dir() / "manifests" / f"{args.command}-{chash[:16]}.json"
    manifest = {
        "command": args.command,
        "configHash": chash,
        "config": settings,
        "seeds": seeds,
        "inputs": _checksums(_inputs_of(args)),
        "outputs": [str(p) for p in outputs],
        "version": __version__,
    }
    _atomic_write(path, json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    return path


def _emit(args, result: dict, manifest: Path):
    result = {**result, "manifest": str(manifest)}
    text = json.dumps(result, sort_keys=True) + "\n"
    if getattr(args, "json_out", None):
        _atomic_write(Path(args.json_out), text)
    else:
        sys.stdout.write(text)


def _load(path, fmt=None):
    p = Path(path)
    if not p.is_file():
        raise DataError(f"input not found: {p}")
    return load_bit_dataset(p, fmt)


def _read_json(path) -> dict:
    p = Path(path)
    if not p.is_file():
        raise ConfigError(f"config file not found: {p}")
    try:
        return json.loads(p.read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{p}: invalid JSON ({exc})") from None


def _opt_from(args) -> OptimizerConfig:
    try:
        return OptimizerConfig(
            method=args.method,
            steps=args.steps,
            learning_rate=args.lr,
            spsa_perturbation=args.spsa_c,
            spsa_stability=args.spsa_A,
            seed=args.seed,
            batch_samples=args.batch_samples,
            loss=args.loss,
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def _kernel(args, n: int) -> KernelSpec:
    sigma = args.sigma if args.sigma is not None else default_sigma(n)
    return KernelSpec(sigma)


# ------------------------------------------------------------------ commands

def cmd_encode(args):
    path = Path(args.input)
    if not path.is_file():
        raise DataError(f"input not found: {path}")
    try:
        samples = np.loadtxt(path, delimiter=",", ndmin=2)
    except ValueError as exc:
        raise DataError(f"{path}: {exc}") from None
    if args.spec:
        spec = QuantizerSpec.from_json(Path(args.spec).read_text())
    elif args.ranges:
        ranges = []
        for item in args.ranges.split(","):
            a, b = item.split(":")
            ranges.append((float(a), float(b)))
        spec = QuantizerSpec(args.bits, ranges)
    else:
        spec = QuantizerSpec.fit(samples, args.bits)
    out = Path(args.out)
    spec_path = out.with_name(out.name + ".spec.json")
    manifest = write_run_manifest(args, [out, spec_path], [])
    d = encode_array(samples, spec)
    save_bit_dataset(d, out, args.format)
    spec.save(spec_path)
    write_manifest(d, out, source=path)
    _emit(args, {"n": d.n, "M": d.M, "clamped": spec.clamped, "spec": str(spec_path)}, manifest)


def cmd_decode(args):
    d = _load(args.input, args.format)
    spec = QuantizerSpec.from_json(Path(args.spec).read_text())
    out = Path(args.out)
    manifest = write_run_manifest(args, [out], [])
    values = decode_array(d, spec)
    np.savetxt(out, values, delimiter=",", fmt="%.17g")
    _emit(args, {"M": d.M, "coords": spec.coords, "out": str(out)}, manifest)


def cmd_qcli(args):
    d = _load(args.input, args.format)
    use_mc = args.mc or (not args.exact and d.n > 20)
    outputs = [Path(p) for p in (args.json_out, args.csv) if p]
    manifest = write_run_manifest(args, outputs, [args.seed] if use_mc else [])
    if use_mc:
        value, spec = qcli_mc(d, args.budget, args.seed)
        result = {"qcli": value, "m": spec.m.tolist(), "counts": spec.counts.tolist(), "method": "mc", "budget": args.budget, "seed": args.seed}
    else:
        spec = exact_order_spectrum(d)
        result = {"qcli": qcli_from_spectrum(spec), "m": spec.m.tolist(), "method": "exact"}
    b = binomial_baseline(d.n).m
    result.update(n=d.n, M=d.M, b=b.tolist())
    if args.csv:
        _write_csv(Path(args.csv), [{"k": k, "m_k": float(mk), "b_k": float(bk), "abs_diff": float(abs(mk - bk))} for k, (mk, bk) in enumerate(zip(result["m"], b))], ["k", "m_k", "b_k", "abs_diff"])
    _emit(args, result, manifest)


def cmd_cci(args):
    d = _load(args.input, args.format)
    outputs = [Path(p) for p in (args.json_out, args.edges) if p]
    manifest = write_run_manifest(args, outputs, [])
    report = cci(d)
    if args.edges:
        _write_csv(Path(args.edges), [{"i": i, "j": j, "weight": w} for i, j, w in report.tree.edges], ["i", "j", "weight"])
    _emit(args, report.as_dict(), manifest)


def cmd_map(args):
    labels = args.labels or [Path(p).stem for p in args.inputs]
    if len(labels) != len(args.inputs):
        raise ConfigError("one label per input is required")
    prov = args.provenance or ["classical"] * len(args.inputs)
    if len(prov) == 1:
        prov = prov * len(args.inputs)
    out = Path(args.out)
    outputs = [out] + ([Path(args.svg)] if args.svg else [])
    manifest = write_run_manifest(args, outputs, [args.seed])
    points = [map_point(_load(p, args.format), lab, pv, args.budget, args.seed) for p, lab, pv in zip(args.inputs, labels, prov)]
    write_map_csv(points, out)
    if args.svg:
        series: dict = {}
        for p in points:
            series.setdefault(p.provenance, []).append((p.qcli, p.cci))
        write_svg(args.svg, scatter_svg(series, xlabel="QCLI", ylabel="CCI", title="correlation-complexity map"))
    _emit(args, {"points": len(points), "out": str(out)}, manifest)


def _initial_circuit(args, n: int) -> IqpCircuit:
    if args.circuit:
        c = IqpCircuit.load(args.circuit)
        if c.n != n:
            raise ConfigError(f"circuit has {c.n} qubits but data has width {n}")
        return c
    return random_circuit(n, args.gates, args.locality, args.init_seed, replace=args.replace)


def cmd_train(args):
    d = _load(args.input, args.format)
    c = _initial_circuit(args, d.n)
    opt = _opt_from(args)
    out = Path(args.out)
    outputs = [out] + ([Path(args.log)] if args.log else [])
    manifest = write_run_manifest(args, outputs, [args.seed, args.init_seed])
    log = JsonlLog(args.log) if args.log else None
    try:
        trained, history = train_mmd(c, d, _kernel(args, d.n), opt, frozen=args.frozen or (), log=log)
    finally:
        if log is not None:
            log.close()
    trained.save(out)
    _emit(args, {"initialLoss": history[0], "finalLoss": history[-1], "steps": opt.steps, "out": str(out), "optimizer": opt.as_dict()}, manifest)


def cmd_adapt(args):
    d = _load(args.input, args.format)
    opt = _opt_from(args)
    kernel = _kernel(args, d.n)
    out = Path(args.out)
    manifest = write_run_manifest(args, [out], [args.seed, args.init_seed])
    if args.trajectory:
        traj = LatentTrajectory.load(args.trajectory)
        if traj.template.n != d.n:
            raise DataError(f"data width {d.n} does not match trajectory circuit width {traj.template.n}")
        traj, history = adapt_latent(traj, args.time, d, kernel, opt)
        stage = "latent"
    else:
        init = np.random.default_rng(args.init_seed).uniform(-math.pi / 8, math.pi / 8, size=len(full_circuit(d.n, args.order).subsets))
        template = full_circuit(d.n, args.order, init)
        part = ParamPartition.for_circuit(template, args.d_lat)
        fit = fit_core(template, d, part, kernel, opt)
        traj, history = start_trajectory(template, part, fit, args.time), fit.history
        stage = "core"
    traj.save(out)
    _emit(args, {"stage": stage, "anchors": traj.times, "initialLoss": history[0], "finalLoss": history[-1], "out": str(out)}, manifest)


def cmd_generate(args):
    path = Path(args.trajectory)
    if not path.is_file():
        raise DataError(f"trajectory not found: {path}")
    traj = LatentTrajectory.load(path)
    out = Path(args.out)
    manifest = write_run_manifest(args, [out], [args.seed])
    _, extrapolated = interpolate_latent(traj, args.tau)
    d = generate_snapshot(traj, args.tau, args.shots, args.seed)
    save_bit_dataset(d, out, args.format)
    write_manifest(d, out, source=path)
    _emit(args, {"tau": args.tau, "shots": args.shots, "extrapolated": extrapolated, "out": str(out)}, manifest)


def cmd_eval(args):
    real, gen = load_field_dir(args.real), load_field_dir(args.gen)
    if args.limit:
        real, gen = real[: args.limit], gen[: args.limit]
    outputs = [Path(args.json_out)] if args.json_out else []
    manifest = write_run_manifest(args, outputs, [args.encoder_seed])
    _emit(args, evaluate(real, gen, RandomConvEncoder(args.encoder_seed), args.bins), manifest)


def _study_config(args, kind: str, cls):
    if args.config:
        return cls.from_dict(_read_json(args.config))
    name = args.preset
    study, cfg = preset(name)
    if study != kind:
        raise ConfigError(f"preset {name!r} belongs to the {study} study")
    if name in LONG_RUNNING:
        print(f"note: preset {name} is long-running", file=sys.stderr)
    return cfg


def _write_csv(path: Path, rows: list[dict], columns: list[str]):
    with path.open("w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=columns, extrasaction="ignore")
        w.writeheader()
        for r in rows:
            w.writerow({k: (repr(v) if isinstance(v, float) else v) for k, v in r.items()})


def _write_jsonl(path: Path, rows):
    with path.open("w") as fh:
        for r in rows:
            fh.write(json.dumps(r, sort_keys=True) + "\n")


def cmd_sweep(args):
    cfg = _study_config(args, "sweep", SweepConfig)
    outdir = Path(args.out_dir)
    outdir.mkdir(parents=True, exist_ok=True)
    files = [outdir / "sweep.csv", outdir / "sweep.svg", outdir / "sweep.jsonl"]
    manifest = write_run_manifest(args, files, list(cfg.seeds))
    rows = run_mismatch_sweep(cfg, args.workers)
    _write_csv(files[0], rows, ["seed", "generatorGates", "targetQcli", "learnerGates", "learnerParams", "initialMmd", "achievedMmd", "status", "configHash", "error"])
    series = {f"G={lg}": [(r["targetQcli"], r["achievedMmd"]) for r in rows if r.get("learnerGates") == lg] for lg in cfg.learner_gates}
    write_svg(files[1], scatter_svg(series, xlabel="QCLI", ylabel="MMD", title="QCLI vs achieved MMD"))
    _write_jsonl(files[2], rows)
    trend = sweep_trend(rows, cfg.learner_gates)
    _emit(args, {"rows": len(rows), "configHash": config_hash(cfg), "trend": {str(k): v for k, v in trend.items()}, "outDir": str(outdir)}, manifest)


def cmd_coupling(args):
    cfg = _study_config(args, "coupling", CouplingConfig)
    outdir = Path(args.out_dir)
    outdir.mkdir(parents=True, exist_ok=True)
    files = [outdir / "coupling.csv", outdir / "coupling.svg", outdir / "coupling.jsonl"]
    manifest = write_run_manifest(args, files, list(cfg.seeds))
    rows = run_coupling_study(cfg, args.workers)
    _write_csv(files[0], rows, ["n", "seed", "step", "qcli", "cci", "configHash"])
    pts = [(r["qcli"], r["cci"]) for r in rows]
    lines = {}
    try:
        lines["frontier"] = list(frontier_envelope(pts).smoothed)
    except CcmapError:
        pass
    write_svg(files[1], scatter_svg({"quantum": pts}, lines, xlabel="QCLI", ylabel="CCI", title=f"{cfg.n} qubits"))
    _write_jsonl(files[2], rows)
    _emit(args, {**coupling_summary(rows), "configHash": config_hash(cfg), "outDir": str(outdir)}, manifest)


def cmd_temporal(args):
    cfg = _study_config(args, "temporal", TemporalConfig)
    outdir = Path(args.out_dir)
    outdir.mkdir(parents=True, exist_ok=True)
    files = [outdir / "temporal.json", outdir / "temporal.csv", outdir / "temporal.svg"]
    manifest = write_run_manifest(args, files, list(cfg.seeds))
    report = run_temporal_study(cfg, args.workers, baseline=not args.no_baseline)
    files[0].write_text(json.dumps(report, indent=1) + "\n")
    flat = [
        {"model": rep["model"], "seed": r["seed"], "tau": tau, "interpMmd": a, "nearestMmd": b}
        for rep in report["reports"] for r in rep["seeds"] for tau, a, b in zip(r["taus"], r["interpMmd"], r["nearestMmd"])
    ]
    _write_csv(files[1], flat, ["model", "seed", "tau", "interpMmd", "nearestMmd"])
    series = {f"{f['model']} interp": [] for f in flat}
    for f in flat:
        series[f"{f['model']} interp"].append((f["tau"], f["interpMmd"]))
    write_svg(files[2], scatter_svg(series, xlabel="tau", ylabel="exact MMD", title="held-out snapshots"))
    summary = {rep["model"]: {"successes": rep["successes"], "trials": rep["trials"]} for rep in report["reports"]}
    _emit(args, {"configHash": report["configHash"], "summary": summary, "outDir": str(outdir)}, manifest)


# ------------------------------------------------------------------ parser

def _add_format(p):
    p.add_argument("--format", choices=FORMATS, default=None, help="bit file format (inferred from suffix when omitted)")


def _add_json_out(p):
    p.add_argument("--json-out", default=None, help="write the JSON result here instead of stdout")


def _add_optimizer(p, steps=5000, lr=1e-4):
    g = p.add_argument_group("optimizer")
    g.add_argument("--method", choices=("adam", "spsa"), default="adam")
    g.add_argument("--steps", type=int, default=steps)
    g.add_argument("--lr", type=float, default=lr, help="Adam step size or SPSA gain a")
    g.add_argument("--spsa-c", type=float, default=0.1, help="SPSA perturbation c")
    g.add_argument("--spsa-A", type=float, default=10.0, help="SPSA stability constant A")
    g.add_argument("--loss", choices=("exact", "sampled"), default="exact")
    g.add_argument("--batch-samples", type=int, default=500, help="samples per sampled-loss evaluation")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--sigma", type=float, default=None, help="kernel bandwidth (default sqrt(n/4))")


class _HelpFormatter(argparse.ArgumentDefaultsHelpFormatter):
    """Show the default of every optional flag, including those without help text."""

    def _format_action(self, action):
        if action.help is None and action.option_strings and action.default is not argparse.SUPPRESS:
            action.help = "(default: %(default)s)"
        return super()._format_action(action)


def build_parser() -> argparse.ArgumentParser:
    fmt = _HelpFormatter
    parser = argparse.ArgumentParser(prog="ccmap", description=__doc__.splitlines()[0], formatter_class=fmt)
    parser.add_argument("--version", action="version", version=f"ccmap {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("encode", help="quantise float samples to bitstrings", formatter_class=fmt)
    p.add_argument("--input", required=True, help="CSV of float samples, one row per sample")
    p.add_argument("--bits", type=int, default=6, help="bits per coordinate")
    p.add_argument("--ranges", default=None, help="per-coordinate bounds a:b,a:b,... (default: data min/max)")
    p.add_argument("--spec", default=None, help="existing quantiser spec JSON")
    p.add_argument("--out", required=True)
    _add_format(p)
    _add_json_out(p)
    p.set_defaults(func=cmd_encode)

    p = sub.add_parser("decode", help="map bitstrings back to bin centres", formatter_class=fmt)
    p.add_argument("--input", required=True)
    p.add_argument("--spec", required=True)
    p.add_argument("--out", required=True)
    _add_format(p)
    _add_json_out(p)
    p.set_defaults(func=cmd_decode)

    p = sub.add_parser("qcli", help="order spectrum and QCLI of a bit dataset", formatter_class=fmt)
    p.add_argument("--input", required=True)
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--exact", action="store_true", help="dense transform (default up to 20 bits)")
    mode.add_argument("--mc", action="store_true", help="stratified Monte Carlo estimate")
    p.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--csv", default=None, help="write the per-order table (k, m_k, b_k, |m_k-b_k|)")
    _add_format(p)
    _add_json_out(p)
    p.set_defaults(func=cmd_qcli)

    p = sub.add_parser("cci", help="total correlation, Chow-Liu tree and CCI", formatter_class=fmt)
    p.add_argument("--input", required=True)
    p.add_argument("--edges", default=None, help="write the Chow-Liu tree as an edge-list CSV")
    _add_format(p)
    _add_json_out(p)
    p.set_defaults(func=cmd_cci)

    p = sub.add_parser("map", help="place datasets on the QCLI/CCI map", formatter_class=fmt)
    p.add_argument("--inputs", nargs="+", required=True)
    p.add_argument("--labels", nargs="+", default=None)
    p.add_argument("--provenance", nargs="+", choices=("classical", "quantum"), default=None)
    p.add_argument("--out", required=True, help="CSV with one row per dataset")
    p.add_argument("--svg", default=None)
    p.add_argument("--budget", type=int, default=DEFAULT_BUDGET, help="Monte Carlo budget above 20 bits")
    p.add_argument("--seed", type=int, default=0)
    _add_format(p)
    _add_json_out(p)
    p.set_defaults(func=cmd_map)

    p = sub.add_parser("train", help="fit an IQP circuit to data by MMD", formatter_class=fmt)
    p.add_argument("--input", required=True)
    p.add_argument("--circuit", default=None, help="initial circuit JSON (else random)")
    p.add_argument("--gates", type=int, default=50)
    p.add_argument("--locality", type=int, default=2)
    p.add_argument("--replace", action="store_true", help="draw gates with replacement and merge repeats")
    p.add_argument("--init-seed", type=int, default=0)
    p.add_argument("--frozen", type=int, nargs="*", default=None, help="generator indices to keep fixed")
    p.add_argument("--out", required=True)
    p.add_argument("--log", default=None, help="JSON-lines run log")
    _add_optimizer(p)
    _add_format(p)
    _add_json_out(p)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("adapt", help="fit the core at the first time, then latent anchors", formatter_class=fmt)
    p.add_argument("--input", required=True)
    p.add_argument("--time", type=float, required=True)
    p.add_argument("--trajectory", default=None, help="existing trajectory; omit to fit the core")
    p.add_argument("--order", type=int, default=3, help="template locality when fitting the core")
    p.add_argument("--d-lat", type=int, default=50)
    p.add_argument("--init-seed", type=int, default=0)
    p.add_argument("--out", required=True)
    _add_optimizer(p)
    _add_format(p)
    _add_json_out(p)
    p.set_defaults(func=cmd_adapt)

    p = sub.add_parser("generate", help="sample at an interpolated time", formatter_class=fmt)
    p.add_argument("--trajectory", required=True)
    p.add_argument("--tau", type=float, required=True)
    p.add_argument("--shots", type=int, default=100000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    _add_format(p)
    _add_json_out(p)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("eval", help="PDF-JS and feature MMD between snapshot folders", formatter_class=fmt)
    p.add_argument("--real", required=True, help="folder of .csv or .fld snapshots")
    p.add_argument("--gen", required=True)
    p.add_argument("--bins", type=int, default=50)
    p.add_argument("--encoder-seed", type=int, default=0)
    p.add_argument("--limit", type=int, default=200, help="snapshots used per side")
    _add_json_out(p)
    p.set_defaults(func=cmd_eval)

    for name, func, default in (("sweep", cmd_sweep, "fig4-desk"), ("coupling", cmd_coupling, "fig5-desk"), ("temporal", cmd_temporal, "temporal-desk")):
        p = sub.add_parser(name, help=f"run the {name} study", formatter_class=fmt)
        src = p.add_mutually_exclusive_group()
        src.add_argument("--preset", choices=sorted(PRESETS), default=default)
        src.add_argument("--config", default=None, help="JSON config file")
        p.add_argument("--out-dir", required=True)
        p.add_argument("--workers", type=int, default=1)
        if name == "temporal":
            p.add_argument("--no-baseline", action="store_true", help="skip the RBM baseline")
        _add_json_out(p)
        p.set_defaults(func=func)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.func(args)
    except CcmapError as exc:
        diag = {"error": type(exc).__name__, "message": str(exc), "exitCode": exc.exit_code}
        state = getattr(exc, "state", None)
        if state:
            diag["state"] = state
        sys.stderr.write(json.dumps(diag, default=str) + "\n")
        return exc.exit_code
    except (TypeError, ValueError) as exc:
        sys.stderr.write(json.dumps({"error": type(exc).__name__, "message": str(exc), "exitCode": 2}) + "\n")
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
