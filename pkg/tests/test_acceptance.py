"""Acceptance criteria 1-10, each at its stated tolerance and runtime budget.

Every test records one PASS/FAIL line; they are printed together in the
"acceptance criteria" section of the pytest summary.
"""

import os
import time

import numpy as np
import pytest

from conftest import lp_wasserstein, riemann_dtm
from dtmsig.analytic import UniformShape, dtm_min
from dtmsig.dtm import dtm_at, dtm_values
from dtmsig.isomorphism_test import TestParams, estimate_level_power, run_test
from dtmsig.measure_space import FiniteMeasureSpace
from dtmsig.signature import rigid_motion, signature_full
from dtmsig.synth import GeneratorSpec, graph_pair, sample_uniform_shape
from dtmsig.wasserstein1d import Discrete1D, transport_lp_oracle, w1

DESK = TestParams(m=0.05, n=20, n_mc=200, alpha=0.05, seed=2024)
SPIRAL10 = GeneratorSpec("spiral", n=500, params={"v": 10})
SPIRAL20 = GeneratorSpec("spiral", n=500, params={"v": 20})


def test_c01_counter_example(record):
    t0 = time.perf_counter()
    mu, nu = graph_pair()
    gaps = {m: w1(signature_full(mu, m).dist, signature_full(nu, m).dist) for m in (0.1, 1 / 3, 0.5, 0.9)}
    elapsed = time.perf_counter() - t0
    ok = max(gaps.values()) < 1e-12 and elapsed < 1.0
    record("C1 counter-example equality", ok, f"max w1 {max(gaps.values()):.2e}, {elapsed:.3f}s")
    assert ok


def test_c02_dilation_identity(record):
    rng = np.random.default_rng(2)
    t0 = time.perf_counter()
    worst = 0.0
    for _ in range(50):
        N, d = int(rng.integers(2, 201)), int(rng.integers(1, 4))
        space = FiniteMeasureSpace(coords=rng.normal(size=(N, d)) * rng.uniform(0.1, 10))
        m = rng.uniform(0.01, 1)
        sig = signature_full(space, m)
        for lam in (0.5, 2.0, 3.0):
            big = signature_full(space.scaled(lam), m)
            worst = max(worst, abs(w1(sig.dist, big.dist) - abs(1 - lam) * sig.mean()))
    elapsed = time.perf_counter() - t0
    ok = worst < 1e-9 and elapsed < 10
    record("C2 dilation identity", ok, f"max error {worst:.2e}, {elapsed:.2f}s")
    assert ok


def test_c03_w1_oracle(record):
    rng = np.random.default_rng(3)
    t0 = time.perf_counter()
    worst = 0.0
    for _ in range(200):
        pair = []
        for _ in range(2):
            k = int(rng.integers(1, 21))
            w = rng.uniform(0.01, 1, k)
            pair.append(Discrete1D(rng.normal(size=k) * 3, w / w.sum()))
        worst = max(worst, abs(w1(*pair) - transport_lp_oracle(*pair)))
    elapsed = time.perf_counter() - t0
    ok = worst < 1e-10 and elapsed < 5
    record("C3 W1 oracle equivalence", ok, f"max error {worst:.2e}, {elapsed:.2f}s")
    assert ok


def test_c04_dtm_integral_oracle(record):
    rng = np.random.default_rng(4)
    t0 = time.perf_counter()
    worst = 0.0
    for _ in range(100):
        N, d = int(rng.integers(1, 13)), int(rng.integers(1, 4))
        X = rng.normal(size=(N, d))
        weighted = rng.random() < 0.5
        w = rng.uniform(0.05, 1, N) if weighted else None
        space = FiniteMeasureSpace.from_unnormalized(w, coords=X) if weighted else FiniteMeasureSpace(coords=X)
        m = rng.uniform(0.001, 1)
        q = rng.normal(size=d)
        ref = riemann_dtm(space.distances_to(q), space.weights, m, steps=1_000_000)
        worst = max(worst, abs(dtm_at(space, q, m) - ref))
    elapsed = time.perf_counter() - t0
    ok = worst < 1e-5 and elapsed < 30
    record("C4 DTM integral oracle", ok, f"max error {worst:.2e}, {elapsed:.2f}s")
    assert ok


def _stability_pair(P, Q, x, y, m, w1_pq):
    sig_gap = w1(signature_full(P, m).dist, signature_full(Q, m).dist)
    union = np.vstack([x, y])
    dtm_gap = np.max(np.abs(dtm_values(P, m, queries=union) - dtm_values(Q, m, queries=union)))
    return sig_gap - ((1 + 1 / m) * w1_pq + 1e-9), dtm_gap - (w1_pq / m + 1e-9)


def test_c05_stability_bounds(record):
    rng = np.random.default_rng(5)
    slack_sig, slack_dtm = [], []
    for _ in range(100):
        x = rng.normal(size=(int(rng.integers(2, 60)), 1))
        y = rng.normal(size=(int(rng.integers(2, 60)), 1)) * rng.uniform(0.5, 2) + rng.uniform(-1, 1)
        w1_pq = w1(Discrete1D(x[:, 0]), Discrete1D(y[:, 0]))
        a, b = _stability_pair(FiniteMeasureSpace(coords=x), FiniteMeasureSpace(coords=y), x, y,
                               rng.uniform(0.02, 1), w1_pq)
        slack_sig.append(a)
        slack_dtm.append(b)
    for _ in range(20):
        x = rng.normal(size=(int(rng.integers(2, 9)), 2))
        y = rng.normal(size=(int(rng.integers(2, 9)), 2)) + rng.uniform(-1, 1, 2)
        w1_pq = lp_wasserstein(x, np.full(len(x), 1 / len(x)), y, np.full(len(y), 1 / len(y)))
        a, b = _stability_pair(FiniteMeasureSpace(coords=x), FiniteMeasureSpace(coords=y), x, y,
                               rng.uniform(0.05, 1), w1_pq)
        slack_sig.append(a)
        slack_dtm.append(b)
    ok = max(slack_sig) <= 0 and max(slack_dtm) <= 0
    record("C5 stability bounds", ok,
           f"120 pairs, worst margin signature {max(slack_sig):.2e}, DTM {max(slack_dtm):.2e}")
    assert ok


def test_c06_dmin_convergence(record):
    disc = UniformShape.ball(2)
    t0 = time.perf_counter()
    space = FiniteMeasureSpace(coords=sample_uniform_shape(disc, 5000, np.random.default_rng(0)))
    g = np.linspace(-1, 1, 100)
    grid = np.array(np.meshgrid(g, g)).reshape(2, -1).T
    emp = dtm_values(space, 0.1, queries=grid).min()
    elapsed = time.perf_counter() - t0
    target = dtm_min(disc, 0.1)
    rel = abs(emp - target) / target
    ok = rel < 0.05 and elapsed < 60
    record("C6 d_min convergence", ok,
           f"grid min {emp:.4f} vs {target:.4f}, relative error {rel:.3f}, {elapsed:.2f}s")
    assert ok


@pytest.fixture(scope="module")
def level_runs():
    t0 = time.perf_counter()
    serial = estimate_level_power(SPIRAL10, SPIRAL10, DESK, reps=200, n_jobs=1)
    elapsed = time.perf_counter() - t0
    threaded = estimate_level_power(SPIRAL10, SPIRAL10, DESK, reps=200, n_jobs=4)
    return serial, threaded, elapsed


@pytest.fixture(scope="module")
def power_runs():
    t0 = time.perf_counter()
    serial = estimate_level_power(SPIRAL10, SPIRAL20, DESK, reps=100, n_jobs=1)
    elapsed = time.perf_counter() - t0
    threaded = estimate_level_power(SPIRAL10, SPIRAL20, DESK, reps=100, n_jobs=4)
    return serial, threaded, elapsed


def test_c07_level(record, level_runs):
    res, _, elapsed = level_runs
    ok = 0.02 <= res.rate <= 0.10 and elapsed < 600
    record("C7 level calibration", ok,
           f"rate {res.rate:.3f} CI [{res.ci[0]:.3f}, {res.ci[1]:.3f}] over {res.reps} reps, {elapsed:.1f}s")
    assert ok


def test_c08_power(record, power_runs):
    res, _, elapsed = power_runs
    ok = res.rate >= 0.5 and res.rate > res.ks_rate and elapsed < 600
    record("C8 power ordering", ok, f"DTM {res.rate:.3f} vs KS {res.ks_rate:.3f}, {elapsed:.1f}s")
    assert ok


def test_c09_determinism(record, level_runs, power_runs):
    same = all(a.to_dict() == b.to_dict() for a, b, _ in (level_runs, power_runs))
    record("C9 determinism", same, "1 vs 4 threads: identical rates and per-rep p-values"
           if same else "reports differ between thread counts")
    assert same


def test_c10_isometry_invariance(record):
    rng = np.random.default_rng(10)
    worst, flips = 0.0, 0
    params = TestParams(m=0.1, n=10, n_mc=100, seed=77)
    for _ in range(20):
        N, d = int(rng.integers(30, 120)), int(rng.integers(1, 4))
        X = rng.normal(size=(N, d))
        Y = rng.normal(size=(N, d)) * rng.uniform(0.8, 1.5)
        perm = rng.permutation(N)
        Y2 = rigid_motion(Y, rng)[perm]
        Q, Q2 = FiniteMeasureSpace(coords=Y), FiniteMeasureSpace(coords=Y2)
        a, b = signature_full(Q, 0.1).dist, signature_full(Q2, 0.1).dist
        diff = np.max(np.abs(np.sort(np.repeat(a.atoms, np.round(a.weights * N).astype(int)))
                             - np.sort(np.repeat(b.atoms, np.round(b.weights * N).astype(int)))))
        worst = max(worst, diff, w1(a, b))
        P = FiniteMeasureSpace(coords=X)
        flips += run_test(P, Q, params, with_ks=False).reject != run_test(P, Q2, params, with_ks=False).reject
    ok = worst < 1e-12 and flips == 0
    record("C10 isometry invariance", ok, f"max signature gap {worst:.2e}, decision flips {flips}/20")
    assert ok


FULL_TABLE = {15: (0.050, 0.525, 0.768), 20: (0.049, 0.884, 0.402), 30: (0.051, 0.987, 0.465),
              40: (0.044, 0.977, 0.414), 100: (0.051, 0.985, 0.422)}


@pytest.mark.slow
@pytest.mark.skipif(os.environ.get("DTMSIG_FULL") != "1", reason="full-scale table; set DTMSIG_FULL=1 (hours)")
@pytest.mark.parametrize("v", sorted(FULL_TABLE))
def test_full_scale_table(record, v):
    level, power, ks_power = FULL_TABLE[v]
    params = TestParams(m=0.05, n=20, n_mc=1000, alpha=0.05, seed=v)
    base = GeneratorSpec("spiral", n=2000, params={"v": 10})
    alt = GeneratorSpec("spiral", n=2000, params={"v": v})
    workers = os.cpu_count() or 1
    h0 = estimate_level_power(alt, alt, params, reps=1000, n_jobs=workers)
    h1 = estimate_level_power(base, alt, params, reps=1000, n_jobs=workers)
    gaps = (abs(h0.rate - level), abs(h1.rate - power), abs(h1.ks_rate - ks_power))
    ok = max(gaps) <= 0.05
    record(f"full table v={v}", ok,
           f"type I {h0.rate:.3f} ({level}), power {h1.rate:.3f} ({power}), KS {h1.ks_rate:.3f} ({ks_power})")
    assert ok
