"""Acceptance gate: one test per criterion, each printing a PASS/FAIL line."""
import math
import time

import numpy as np
import pytest

from ccmap.cci import cci, chow_liu_tree, mutual_info_matrix, total_correlation, tree_distribution
from ccmap.codec import QuantizerSpec, decode_array, decode_bits, encode_array, encode_value
from ccmap.datasets import BitDataset, EmpiricalPmf, even_parity, iid_uniform
from ccmap.evaluation import FieldSnapshot, RandomConvEncoder, encode_field, feature_mmd, pdf_js
from ccmap.experiments import (
    coupling_summary,
    null_threshold,
    preset,
    run_mismatch_sweep,
    run_temporal_study,
    sweep_trend,
)
from ccmap.iqp import amplitudes, data_z_expectations, exact_distribution, random_circuit
from ccmap.mmd import (
    KernelSpec,
    default_sigma,
    exact_mmd_to_data,
    mmd_loss_and_gradient,
    mmd_pauli,
    mmd_raw,
    pauli_coefficients,
)
from ccmap.spectrum import binomial_baseline, js_divergence, qcli_exact, qcli_mc, second_order_js, tv_distance
from ccmap.walsh import index_to_bits

from conftest import dense_iqp_probs, random_pmf, report


def test_criterion_01_pauli_raw_equivalence():
    rng = np.random.default_rng(1)
    t0 = time.perf_counter()
    worst = 0.0
    for _ in range(100):
        n = int(rng.integers(2, 13))
        ma, mb = (int(v) for v in rng.integers(20, 300, 2))
        pa, pb = rng.uniform(0.1, 0.9, 2)
        a = BitDataset((rng.random((ma, n)) < pa).astype(np.uint8))
        b = BitDataset((rng.random((mb, n)) < pb).astype(np.uint8))
        sigma = float(rng.uniform(0.5, 3.0))
        pauli = mmd_pauli(data_z_expectations(a), data_z_expectations(b), pauli_coefficients(n, sigma))
        worst = max(worst, abs(pauli - mmd_raw(a, b, KernelSpec(sigma))))
    elapsed = time.perf_counter() - t0
    ok = worst <= 1e-9 and elapsed <= 60
    report(1, ok, f"max |pauli - raw| = {worst:.2e} over 100 pairs, {elapsed:.1f}s")
    assert ok


def test_criterion_02_chow_liu_kl_identity():
    rng = np.random.default_rng(2)
    t0 = time.perf_counter()
    worst = 0.0
    for i in range(50):
        n = 2 + i % 9
        p = random_pmf(n, rng, sparsity=0.3 if i % 2 else 0.0)
        pmf = EmpiricalPmf.from_dense(p)
        tree = chow_liu_tree(mutual_info_matrix(pmf))
        q = tree_distribution(pmf, tree)
        nz = p > 0
        kl = float(np.sum(p[nz] * np.log2(p[nz] / q[nz])))
        tc = total_correlation(pmf)
        worst = max(worst, abs(kl - (tc - tree.tree_tc)))
    elapsed = time.perf_counter() - t0
    ok = worst <= 1e-9 and elapsed <= 60
    report(2, ok, f"max |KL - (TC - TC_tree)| = {worst:.2e} over 50 pmfs, {elapsed:.1f}s")
    assert ok


def test_criterion_03_cci_extremes():
    x = index_to_bits(np.arange(8), 3)
    parity = (x.sum(1) % 2 == 0).astype(float)
    chain = np.zeros(8)
    chain[0] = chain[7] = 0.5
    c_par = cci(EmpiricalPmf.from_dense(parity / parity.sum())).cci
    c_chain = cci(EmpiricalPmf.from_dense(chain)).cci
    ok = abs(c_par - 1.0) <= 1e-9 and abs(c_chain) <= 1e-9
    report(3, ok, f"parity cci = {c_par:.12f}, chain cci = {c_chain:.12f}")
    assert ok


def test_criterion_04_qcli_null():
    t0 = time.perf_counter()
    thr = null_threshold()["threshold"]
    mean = float(np.mean([qcli_exact(iid_uniform(16, 10_000, s)) for s in range(10)]))
    structured = qcli_exact(even_parity(16, 10_000, 0))
    elapsed = time.perf_counter() - t0
    ok = mean < thr and mean < structured and elapsed <= 300
    report(4, ok, f"iid mean {mean:.5f} < threshold {thr:.5f}; parity {structured:.5f}; {elapsed:.1f}s")
    assert ok


def test_criterion_05_mc_fidelity():
    t0 = time.perf_counter()
    errs = {}
    for name, d in (("iid", iid_uniform(14, 10_000, 3)), ("parity", even_parity(14, 10_000, 4))):
        exact = qcli_exact(d)
        mc = np.mean([qcli_mc(d, 20_000, s)[0] for s in range(10)])
        errs[name] = abs(mc - exact)
    elapsed = time.perf_counter() - t0
    ok = max(errs.values()) <= 0.02 and elapsed <= 300
    report(5, ok, f"|mean mc - exact|: iid {errs['iid']:.2e}, parity {errs['parity']:.2e}; {elapsed:.1f}s")
    assert ok


def test_criterion_06_second_order_and_tv():
    rng = np.random.default_rng(6)
    b = binomial_baseline(16).m
    worst_rel, worst_tv = 0.0, 0.0
    for _ in range(100):
        delta = rng.uniform(-1, 1, 17)
        delta -= delta.mean()
        delta *= 0.01 * b.min() / np.abs(delta).max()
        m = b + delta
        js = js_divergence(m, b)
        worst_rel = max(worst_rel, abs(js - second_order_js(m, b)) / js)
        worst_tv = max(worst_tv, tv_distance(m, b) / math.sqrt(2 * math.log(2) * js))
    ok = worst_rel <= 0.05 and worst_tv <= 1.05
    report(6, ok, f"max relative error {worst_rel:.2e}; max tv / sqrt(2 ln2 js) = {worst_tv:.3f}")
    assert ok


def test_criterion_07_simulator():
    rng = np.random.default_rng(7)
    dense_err = 0.0
    for i in range(40):
        n = 1 + i % 4
        c = random_circuit(n, min(5, 2**n - 1), n, i, angle_scale=math.pi)
        gens = list(zip(c.subsets, c.thetas))
        dense_err = max(dense_err, float(np.max(np.abs(exact_distribution(c).probs - dense_iqp_probs(n, gens)))))
    norm_err = 0.0
    for i in range(100):
        n = 1 + i % 12
        c = random_circuit(n, min(25, 2**n - 1), min(n, 4), 100 + i, angle_scale=math.pi)
        _, amp = amplitudes(c)
        norm_err = max(norm_err, abs(float(np.sum(np.abs(amp) ** 2)) - 1.0))
    grad_err = 0.0
    for n in (2, 4, 6, 8, 10):
        c = random_circuit(n, min(12, 2**n - 1), min(n, 3), 200 + n, angle_scale=1.0)
        data = BitDataset((rng.random((400, n)) < 0.3).astype(np.uint8))
        exp = data_z_expectations(data)
        coeffs = pauli_coefficients(n, default_sigma(n))
        _, g = mmd_loss_and_gradient(c, exp, coeffs)
        fd = np.zeros(c.size)
        h = 1e-5
        for i in range(c.size):
            tp, tm = c.thetas.copy(), c.thetas.copy()
            tp[i] += h
            tm[i] -= h
            fd[i] = (
                exact_mmd_to_data(exact_distribution(c.with_thetas(tp)).probs, exp, coeffs)
                - exact_mmd_to_data(exact_distribution(c.with_thetas(tm)).probs, exp, coeffs)
            ) / (2 * h)
        grad_err = max(grad_err, float(np.linalg.norm(g - fd) / np.linalg.norm(fd)))
    ok = dense_err <= 1e-10 and norm_err <= 1e-9 and grad_err <= 1e-5
    report(7, ok, f"dense {dense_err:.1e}, normalisation {norm_err:.1e}, gradient rel {grad_err:.1e}")
    assert ok


@pytest.mark.slow
def test_criterion_08_temporal_benefit():
    kind, cfg = preset("temporal-desk")
    assert kind == "temporal" and len(cfg.anchors) == 11 and cfg.d_lat == 50 and cfg.n == 10
    t0 = time.perf_counter()
    out = run_temporal_study(cfg, baseline=False)
    elapsed = time.perf_counter() - t0
    (iqp,) = out["reports"]
    ok = iqp["successes"] >= 7 and iqp["trials"] == 10 and elapsed <= 1200
    report(8, ok, f"interpolation beats nearest anchor in {iqp['successes']}/{iqp['trials']} seeds; {elapsed:.0f}s")
    assert ok


@pytest.mark.slow
def test_criterion_09_coupling_sign(coupling_rows):
    kind, cfg = preset("fig5-desk")
    assert kind == "coupling" and cfg.n == 8 and cfg.gates == 150 and cfg.locality == 2
    s = coupling_summary(coupling_rows)
    ok = s["points"] == 2000 and s["spearman"] > 0 and s["pvalue"] < 0.01
    report(9, ok, f"Spearman {s['spearman']:.3f} (p = {s['pvalue']:.1e}) over {s['points']} circuits")
    assert ok


@pytest.mark.slow
def test_criterion_10_sweep_trend():
    kind, cfg = preset("fig4-desk")
    assert kind == "sweep" and cfg.n == 10 and cfg.generator_locality == 4 and cfg.learner_locality == 2
    assert tuple(cfg.learner_gates) == (30, 60)
    t0 = time.perf_counter()
    rows = run_mismatch_sweep(cfg)
    elapsed = time.perf_counter() - t0
    points = len({(r["seed"], r["generatorGates"]) for r in rows if r["status"] == "ok"})
    trend = sweep_trend(rows, cfg.learner_gates)
    small, large = trend[30], trend[60]
    ok = (
        points >= 40
        and all(t["top"] <= t["bottom"] for t in trend.values())
        and large["bottom"] <= small["bottom"]
        and large["top"] <= small["top"]
        and elapsed <= 3600
    )
    detail = " ".join(f"G={g}: bottom {t['bottom']:.2e} top {t['top']:.2e};" for g, t in trend.items())
    report(10, ok, f"{points} points; {detail} {elapsed:.0f}s")
    assert ok


def test_criterion_11_codec():
    rng = np.random.default_rng(11)
    N = 6
    ranges = [(0.0, 1.0), (-3.0, 7.0), (-1e3, 1e3)]
    spec = QuantizerSpec(N, ranges)
    v = np.column_stack([rng.uniform(a, b, 100_000) for a, b in ranges])
    back = decode_array(encode_array(v, spec), spec)
    worst = max(float(np.max(np.abs(back[:, i] - v[:, i]))) / (spec.step(i) / 2) for i in range(len(ranges)))
    bijective = True
    for a, b in ranges:
        centres = [decode_bits(format(j, "06b"), (a, b)) for j in range(2**N)]
        bijective &= [encode_value(c, (a, b), N) for c in centres] == [format(j, "06b") for j in range(2**N)]
    ok = worst <= 1.0 + 1e-12 and bijective
    report(11, ok, f"max |decode(encode(v)) - v| / (delta/2) = {worst:.6f}; 64 centres bijective: {bijective}")
    assert ok


def _hist_js_oracle(a, b, bins, eps=1e-12):
    lo, hi = min(a.min(), b.min()), max(a.max(), b.max())
    ha, hb = np.zeros(bins), np.zeros(bins)
    for arr, h in ((a, ha), (b, hb)):
        for v in arr:
            j = min(int((v - lo) / (hi - lo) * bins), bins - 1)
            h[j] += 1
    p, q = ha / ha.sum(), hb / hb.sum()
    p = np.maximum(p, eps)
    q = np.maximum(q, eps)
    p, q = p / p.sum(), q / q.sum()
    js = 0.0
    for x, y in zip(p, q):
        m = 0.5 * (x + y)
        js += 0.5 * x * math.log2(x / m) + 0.5 * y * math.log2(y / m)
    return js


def _mmd_loop_oracle(F, G):
    Z = np.vstack([F, G])
    d = [math.dist(Z[i], Z[j]) for i in range(len(Z)) for j in range(i + 1, len(Z))]
    s = float(np.median(d))
    k = lambda x, y: math.exp(-math.dist(x, y) ** 2 / (2 * s * s))
    kff = sum(k(x, y) for x in F for y in F) / len(F) ** 2
    kgg = sum(k(x, y) for x in G for y in G) / len(G) ** 2
    kfg = sum(k(x, y) for x in F for y in G) / (len(F) * len(G))
    return kff + kgg - 2 * kfg


def test_criterion_12_evaluation():
    rng = np.random.default_rng(12)
    real = [FieldSnapshot(rng.normal(0.0, 1.0, (16, 16))) for _ in range(10)]
    gen = [FieldSnapshot(rng.normal(0.4, 1.3, (16, 16))) for _ in range(10)]
    enc = RandomConvEncoder(seed=0)
    a = np.concatenate([f.grid.ravel() for f in real])
    b = np.concatenate([f.grid.ravel() for f in gen])
    js_err = abs(pdf_js(real, gen) - _hist_js_oracle(a, b, 50))
    F = np.array([encode_field(enc, f) for f in real])
    G = np.array([encode_field(enc, f) for f in gen])
    mmd_err = abs(feature_mmd(real, gen, enc) - _mmd_loop_oracle(F, G))
    zeros = (pdf_js(real, real), feature_mmd(real, real, enc))
    ok = js_err <= 1e-9 and mmd_err <= 1e-9 and zeros == (0.0, 0.0)
    report(12, ok, f"pdf_js err {js_err:.1e}, feature_mmd err {mmd_err:.1e}, identical inputs -> {zeros}")
    assert ok
