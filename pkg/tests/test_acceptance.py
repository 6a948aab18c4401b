"""Acceptance criteria, each run at its stated tolerance.

A summary line per criterion is printed at the end of the session.  The
desk-scale Monte Carlo (criteria 5 and 6) takes about half an hour on one
core; its per-replication estimates are cached under ``tests/.cache`` keyed
by a hash of the full experiment config, and set ``SPDE_DAMPING_RECOMPUTE=1``
to ignore the cache.
"""

import hashlib
import json
import math
import os
import time
from pathlib import Path

import numpy as np
import pytest

from conftest import ACCEPTANCE_LINES
from spde_damping import __version__
from spde_damping.estimator import QuadraticVariationPair, alpha_hat, estimate_from_field
from spde_damping.harness import (
    TABLE_B,
    TABLE_M1,
    ExperimentConfig,
    _sample_sd,
    check_bessel_identity,
    check_g_closed_form,
    check_oracle_mc,
    check_psi_grid,
    check_psi_scaling,
    emit_table,
    run_experiment,
    step1_gaps,
)
from spde_damping.model import NoiseSpec, SpdeCoefficients
from spde_damping.sampling import build_design
from spde_damping.simulate import simulate_dataset

CACHE = Path(__file__).parent / ".cache"


def report(n, passed, detail):
    ACCEPTANCE_LINES.append(f"criterion {n}: {'PASS' if passed else 'FAIL'}  {detail}")


def test_criterion_1_estimator_identities():
    t0 = time.perf_counter()
    coeffs = SpdeCoefficients(0.0, 0.2, 0.2, 0.2, 1.0)
    d = build_design(0.1, 8, 40)
    fld = simulate_dataset(coeffs, NoiseSpec(0.5, -19.5, 32, 32), d, seed=1)
    base = estimate_from_field(fld, d).alpha_hat
    scaled = {c: estimate_from_field(fld.scaled(c), d).alpha_hat for c in (-2.0, 1e-3, 1e3)}
    # -2 scales exactly in floating point; 1e-3 and 1e3 round every field value, so
    # equality holds up to the rounding of the input
    ok_scale = scaled[-2.0] == base and all(abs(v - base) <= 1e-14 for v in scaled.values())
    ratios = {r: alpha_hat(QuadraticVariationPair(1.0, r, 1, 1, 1, 1)).alpha_hat for r in (4.0, 1.0, 2.0)}
    ok_ratio = ratios == {4.0: 1.0, 1.0: 0.0, 2.0: 0.5}
    elapsed = time.perf_counter() - t0
    diffs = {c: abs(v - base) for c, v in scaled.items()}
    passed = ok_scale and ok_ratio and elapsed < 1.0
    report(1, passed, f"scale diffs {diffs}, ratio alphas {ratios}, {elapsed:.2f}s")
    assert passed


def test_criterion_2_oracle_equivalence():
    t0 = time.perf_counter()
    check = check_oracle_mc(replications=500, trunc=64, N=100, m1=10, b=0.1)
    elapsed = time.perf_counter() - t0
    det = check.detail
    passed = check.passed and elapsed < 120
    report(2, passed, f"MC mean {det['mc_mean']:.6f} vs series {det['series']:.6f}, z = {det['z']:.2f}, {elapsed:.1f}s")
    assert passed


def test_criterion_3_step1_convergence():
    t0 = time.perf_counter()
    gaps = step1_gaps(trunc=2000, b=0.1, pairs=((100, 20), (400, 40)))
    factor = gaps[0]["rel_gap"] / gaps[1]["rel_gap"]
    elapsed = time.perf_counter() - t0
    passed = 2.5 <= factor <= 6.0 and elapsed < 300
    report(
        3,
        passed,
        f"gap N=100 {gaps[0]['rel_gap']:.6f}, N=400 {gaps[1]['rel_gap']:.6f}, factor {factor:.3f} (window [2.5, 6]), {elapsed:.1f}s",
    )
    assert passed


def test_criterion_4_psi_and_g():
    t0 = time.perf_counter()
    checks = [*check_psi_grid(1e-8), check_psi_scaling(1e-8), *check_bessel_identity(), check_g_closed_form()]
    elapsed = time.perf_counter() - t0
    passed = all(c.passed for c in checks) and elapsed < 30
    summary = ", ".join(f"{c.name}={'ok' if c.passed else 'FAIL'}" for c in checks)
    report(4, passed, f"{summary}, {elapsed:.1f}s")
    assert passed


def _desk_config():
    return ExperimentConfig(
        noise=NoiseSpec(0.5, -19.5, 1000, 1000), N=1000, b_values=[0.1], m1_values=[20, 40], replications=50
    )


@pytest.fixture(scope="module")
def desk():
    cfg = _desk_config()
    key = hashlib.sha256(json.dumps({"config": cfg.to_dict(), "version": __version__}, sort_keys=True).encode()).hexdigest()[:16]
    path = CACHE / f"desk-{key}.json"
    if path.exists() and not os.environ.get("SPDE_DAMPING_RECOMPUTE"):
        cells = json.loads(path.read_text())["cells"]
        return {(c["b"], c["m1"]): c["alpha_hats"] for c in cells}
    res = run_experiment(cfg)
    assert not res.interrupted
    CACHE.mkdir(exist_ok=True)
    cells = [{"b": c.b, "m1": c.m1, "alpha_hats": c.alpha_hats, "seconds": c.elapsed_seconds} for c in res.cells]
    path.write_text(json.dumps({"config": cfg.to_dict(), "cells": cells}, indent=1))
    return {(c.b, c.m1): c.alpha_hats for c in res.cells}


def _stats(xs):
    return math.fsum(xs) / len(xs), _sample_sd(xs)


@pytest.mark.slow
def test_criterion_5_table_desk_scale(desk):
    m20, sd20 = _stats(desk[(0.1, 20)])
    m40, sd40 = _stats(desk[(0.1, 40)])
    parts = {
        "m1=20 mean within 0.05 of 0.452": abs(m20 - 0.452) <= 0.05,
        "m1=20 sd < 0.05": sd20 < 0.05,
        "m1=40 mean within 0.05 of 0.476": abs(m40 - 0.476) <= 0.05,
        "m1=40 closer to 0.5 than m1=20": abs(m40 - 0.5) < abs(m20 - 0.5),
    }
    passed = all(parts.values())
    flags = "; ".join(f"{k}: {'ok' if v else 'FAIL'}" for k, v in parts.items())
    report(5, passed, f"mean/sd m1=20 {m20:.4f}/{sd20:.4f}, m1=40 {m40:.4f}/{sd40:.4f}; {flags}")
    assert passed


@pytest.mark.slow
def test_criterion_6_rate(desk):
    _, sd20 = _stats(desk[(0.1, 20)])
    _, sd40 = _stats(desk[(0.1, 40)])
    factor = sd20 / sd40
    passed = 1.5 <= factor <= 2.7
    report(6, passed, f"sd m1=20 {sd20:.5f}, m1=40 {sd40:.5f}, factor {factor:.3f} (window [1.5, 2.7])")
    assert passed


def test_criterion_7_determinism(tmp_path):
    t0 = time.perf_counter()
    cfg = dict(noise=NoiseSpec(0.5, -19.5, 128, 128), N=200, b_values=TABLE_B, m1_values=TABLE_M1, replications=4, seed=77)
    outputs = []
    for workers in (1, 8):
        path = tmp_path / f"w{workers}.csv"
        emit_table(run_experiment(ExperimentConfig(workers=workers, **cfg)), path)
        outputs.append(path.read_bytes())
    elapsed = time.perf_counter() - t0
    passed = outputs[0] == outputs[1] and len(outputs[0].splitlines()) == 41 and elapsed < 120
    report(7, passed, f"workers 1 vs 8 byte-identical: {outputs[0] == outputs[1]}, {len(outputs[0].splitlines())} lines, {elapsed:.1f}s")
    assert passed
