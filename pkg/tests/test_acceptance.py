"""Acceptance criteria, one test each, at the stated tolerances.

Every test records a PASS/FAIL line that pytest prints in an
"acceptance criteria" section at the end of the run. The two throughput sweeps
run once per session at the default slot counts.
"""

import math
import time

import numpy as np
import pytest

from cogmac.config import NetworkConfig
from cogmac.distcheck import run_checks
from cogmac.dual import ConstraintBudget, solve_duals
from cogmac.fading import FadingModel
from cogmac.oracle import closed_form_objective, discretize, optimality_gap, solve_relaxed
from cogmac.sim import simulate_slots, estimate
from cogmac.sweep import asymptote, slope_fit, sweep, tail_exponent

P_DB, Q_DB = 15.0, 0.0
P_AVE, Q_AVE = 10 ** (P_DB / 10), 10 ** (Q_DB / 10)
N_LIST = list(range(100, 1001, 100))
SETTINGS = {
    "weibull_rayleigh": ("weibull:4", "rayleigh"),
    "rayleigh_nakagami": ("rayleigh", "nakagami:0.5"),
}


@pytest.fixture(scope="session")
def sweeps():
    out = {}
    for name, (mh, mg) in SETTINGS.items():
        start = time.perf_counter()
        rows = sweep(FadingModel.parse(mh), FadingModel.parse(mg), P_AVE, Q_AVE, N_LIST, seed=0)
        out[name] = (rows, time.perf_counter() - start)
    return out


def _band_check(rows, model_h):
    worst = 0.0
    for r in rows:
        if r.n_users >= 300:
            worst = max(worst, abs(r.throughput - asymptote(r.n_users, model_h, P_AVE)))
    return worst


def test_criterion_1_weibull_rayleigh_band(sweeps, record_criterion):
    rows, seconds = sweeps["weibull_rayleigh"]
    assert not any(r.failed for r in rows)
    worst = _band_check(rows, FadingModel.parse("weibull:4"))
    se = max(r.stderr for r in rows)
    ok = worst <= 0.15 and se <= 0.03
    record_criterion("1 Weibull c=4 / Rayleigh band", ok,
                     f"max |R - asymptote| over N>=300 = {worst:.4f} (<= 0.15), "
                     f"max stderr = {se:.4f} (<= 0.03), sweep {seconds:.0f} s")
    assert ok


def test_criterion_2_rayleigh_nakagami_band(sweeps, record_criterion):
    rows, seconds = sweeps["rayleigh_nakagami"]
    assert not any(r.failed for r in rows)
    worst = _band_check(rows, FadingModel.parse("rayleigh"))
    ok = worst <= 0.15
    record_criterion("2 Rayleigh / Nakagami m=0.5 band", ok,
                     f"max |R - asymptote| over N>=300 = {worst:.4f} (<= 0.15), sweep {seconds:.0f} s")
    assert ok


def test_criterion_3_slope(sweeps, record_criterion):
    results = []
    for name, (mh, _) in SETTINGS.items():
        want = 1 / (math.e * tail_exponent(FadingModel.parse(mh)))
        got = slope_fit(sweeps[name][0])
        results.append((name, got, want, abs(got / want - 1)))
    ok = all(rel <= 0.25 for *_, rel in results)
    record_criterion("3 scaling slope", ok, "; ".join(
        f"{n}: slope {g:.4f} vs {w:.4f} ({100 * r:.1f}%)" for n, g, w, r in results))
    assert ok


def test_criterion_4_p_an(sweeps, record_criterion):
    mh, mg = (FadingModel.parse(m) for m in SETTINGS["weibull_rayleigh"])
    cfg = NetworkConfig(100, P_AVE, Q_AVE)
    stats = estimate(cfg, solve_duals(cfg, mh, mg), mh, mg, 100_000, seed=0)
    last = next(r for r in sweeps["weibull_rayleigh"][0] if r.n_users == 1000)
    ok100 = abs(stats.p_an - 0.3697) <= 0.01
    ok1000 = abs(last.p_an - 1 / math.e) <= 0.01 and last.slots == 100_000
    record_criterion("4 P(A_N)", ok100 and ok1000,
                     f"N=100: {stats.p_an:.4f} (0.3697 +- 0.01); "
                     f"N=1000: {last.p_an:.4f} (1/e = 0.3679 +- 0.01)")
    assert ok100 and ok1000


def test_criterion_5_lambda_limit(record_criterion):
    target = 1 / P_AVE
    parts, ok = [], True
    for name, (mh, mg) in SETTINGS.items():
        mh, mg = FadingModel.parse(mh), FadingModel.parse(mg)
        lam_big = solve_duals(NetworkConfig(1000, P_AVE, Q_AVE), mh, mg).lam
        lam_small = solve_duals(NetworkConfig(10, P_AVE, Q_AVE), mh, mg).lam
        rel = abs(lam_big / target - 1)
        closer = abs(lam_big - target) < abs(lam_small - target)
        ok &= rel <= 0.10 and closer
        parts.append(f"{name}: lam(1000) = {lam_big:.6f}, {100 * rel:.2f}% from 1/P_ave "
                     f"(<= 10%), closer than lam(10) = {lam_small:.6f}: {closer}")
    record_criterion("5 lambda limit", ok, "; ".join(parts))
    assert ok


def test_criterion_6_oracle(record_criterion):
    rng = np.random.default_rng(2024)
    names = ["rayleigh", "rician:1", "nakagami:0.5", "nakagami:2", "weibull:1.5", "weibull:4"]
    start = time.perf_counter()
    worst_gap, worst_dir, count = 0.0, math.inf, 6
    for _ in range(count):
        mh, mg = (FadingModel.parse(str(m)) for m in rng.choice(names, 2))
        nh, ng = (int(k) for k in rng.integers(2, 6, 2))
        d = discretize(mh, mg, nh, ng)
        budget = ConstraintBudget(float(rng.uniform(0.1, 2.0)), float(rng.uniform(0.05, 1.0)))
        p = float(rng.uniform(0.1, 0.9))
        rel = solve_relaxed(d, budget, p, seed=int(rng.integers(1 << 31))).objective
        cf = closed_form_objective(d, budget, p)
        worst_gap = max(worst_gap, optimality_gap(rel, cf))
        worst_dir = min(worst_dir, rel - cf)
    seconds = time.perf_counter() - start
    ok = worst_gap <= 1e-3 and worst_dir >= -1e-9 and seconds <= 60
    record_criterion("6 oracle equivalence", ok,
                     f"{count} instances, max gap {worst_gap:.2e} (<= 1e-3), "
                     f"min(relaxed - closed) {worst_dir:.2e} (>= -1e-9), {seconds:.1f} s (<= 60)")
    assert ok


def test_criterion_7_feasibility(sweeps, record_criterion):
    feasible, active = True, []
    for name, (mh, mg) in SETTINGS.items():
        for r in sweeps[name][0]:
            feasible &= r.avg_power <= P_AVE + 3 * r.power_stderr
            feasible &= r.avg_interference <= Q_AVE + 3 * r.interference_stderr
            if r.slots >= 1_000_000:
                used, budget = (r.avg_interference, Q_AVE) if r.mu > 0 else (r.avg_power, P_AVE)
                active.append((name, r.n_users, used / budget - 1))
    ok_active = bool(active) and all(abs(dev) <= 0.02 for *_, dev in active)
    ok = feasible and ok_active
    record_criterion("7 feasibility", ok,
                     f"all rows within budget + 3 stderr: {feasible}; active constraint at "
                     f"10^6 slots: " + ", ".join(f"{n} N={k} {100 * dev:+.2f}%"
                                                  for n, k, dev in active))
    assert ok


def test_criterion_8_estimator_identity(record_criterion):
    mh, mg = (FadingModel.parse(m) for m in SETTINGS["weibull_rayleigh"])
    cfg = NetworkConfig(100, P_AVE, Q_AVE)
    rec = simulate_slots(cfg, solve_duals(cfg, mh, mg), mh, mg, 100_000, seed=0)
    same = bool(np.array_equal(rec.rate, rec.rate_orderstat))
    diff = int((rec.rate != rec.rate_orderstat).sum())
    record_criterion("8 estimator identity", same,
                     f"{rec.rate.size} slots, {diff} slots differ bitwise")
    assert same


def test_criterion_9_distributions(record_criterion):
    checks = run_checks()
    failed = [c for c in checks if not c.passed]
    record_criterion("9 distribution suite", not failed,
                     f"{len(checks) - len(failed)}/{len(checks)} checks pass"
                     + "".join(f"; failed {c.model} {c.name} = {c.value:.4g} "
                               f"(bound {c.bound:.3g})" for c in failed))
    assert not failed
