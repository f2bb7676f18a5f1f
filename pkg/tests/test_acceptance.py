"""Acceptance gate: one test per package-level guarantee, each printing a
single pass/fail line with the measured quantities it is held to."""

import os
import time
from datetime import date, timedelta
from pathlib import Path

import numpy as np
import pytest

from noveldyn.config import load_config
from noveldyn.distances import BIASED, energy_distance, median_heuristic_gamma, mmd2
from noveldyn.ingest import DailyBucket
from noveldyn.lp import cumulative_lp, joint_pretrend_wald, local_projection
from noveldyn.novelty import NoveltyConfig, daily_novelty
from noveldyn.pipeline import build_exposure, load_frame, run_all
from noveldyn.regression import RegressionSpec, ardl, hac_covariance
from noveldyn.whitening import apply_whitener, fit_whitener, unit_normalize

Z95 = 1.959963984540054


def _report(capsys, name, ok, detail=""):
    with capsys.disabled():
        mark = "PASS" if ok else "FAIL"
        suffix = f" [{detail}]" if detail else ""
        print(f"acceptance {mark}: {name}{suffix}", flush=True)
    assert ok, f"{name}{': ' + detail if detail else ''}"


# ---------------------------------------------------------------------------
# independent oracles (plain double loops, no shared code with the package)
# ---------------------------------------------------------------------------


def _energy_oracle(a, b, within):
    def mean_cross(x, z):
        total = 0.0
        for u in x:
            for v in z:
                total += float(np.linalg.norm(u - v))
        return total / (len(x) * len(z))

    def mean_within(x):
        m = len(x)
        if within == BIASED:
            return mean_cross(x, x)
        if m == 1:
            return 0.0
        total = 0.0
        for i in range(m):
            for j in range(i + 1, m):
                total += float(np.linalg.norm(x[i] - x[j]))
        return total / (m * (m - 1) / 2)

    return 2.0 * mean_cross(a, b) - mean_within(a) - mean_within(b)


def _mmd_oracle(a, b, gamma, within):
    def k(u, v):
        d = u - v
        return float(np.exp(-gamma * float(d @ d)))

    def mean_cross(x, z):
        return sum(k(u, v) for u in x for v in z) / (len(x) * len(z))

    def mean_within(x):
        m = len(x)
        if within == BIASED:
            return mean_cross(x, x)
        if m == 1:
            return 1.0  # k(x, x)
        total = sum(k(x[i], x[j]) for i in range(m) for j in range(i + 1, m))
        return total / (m * (m - 1) / 2)

    return mean_within(a) + mean_within(b) - 2.0 * mean_cross(a, b)


def test_distance_oracles(capsys):
    started = time.monotonic()
    rng = np.random.default_rng(42)
    worst = 0.0
    for _ in range(200):
        dim = int(rng.integers(1, 9))
        a = rng.normal(size=(int(rng.integers(1, 7)), dim))
        b = rng.normal(size=(int(rng.integers(1, 7)), dim))
        gamma = median_heuristic_gamma(np.vstack([a, b]))
        for within in ("unbiased", BIASED):
            worst = max(worst, abs(
                energy_distance(a, b, within=within) - _energy_oracle(a, b, within)
            ))
            worst = max(worst, abs(
                mmd2(a, b, gamma=gamma, within=within) - _mmd_oracle(a, b, gamma, within)
            ))
    # exact zero on identical samples holds for the all-pairs (V-statistic)
    # within-sample convention
    worst_same = 0.0
    for _ in range(50):
        a = rng.normal(size=(int(rng.integers(1, 7)), int(rng.integers(1, 9))))
        worst_same = max(worst_same, abs(energy_distance(a, a.copy(), within=BIASED)))
        worst_same = max(worst_same, abs(mmd2(a, a.copy(), gamma=0.5, within=BIASED)))
    elapsed = time.monotonic() - started
    ok = worst <= 1e-12 and worst_same <= 1e-12 and elapsed < 5.0
    _report(
        capsys, "distance oracles", ok,
        f"200 pairs, max |diff| {worst:.2e}; identical-sample max {worst_same:.2e}; "
        f"{elapsed:.2f}s",
    )


def test_whitening(capsys):
    rng = np.random.default_rng(7)
    x = rng.normal(size=(500, 32)) @ rng.normal(size=(32, 32)) + rng.normal(size=32)
    model = fit_whitener(x)
    z = apply_whitener(model, x).values
    cov = (z - z.mean(axis=0)).T @ (z - z.mean(axis=0)) / (z.shape[0] - 1)
    dev = float(np.max(np.abs(cov - np.eye(z.shape[1]))))
    low_rank = rng.normal(size=(500, 5)) @ rng.normal(size=(5, 8))
    kept = fit_whitener(low_rank).scale.size
    ok = dev < 1e-6 and kept == 5
    _report(
        capsys, "whitening", ok,
        f"500x32 max |cov - I| {dev:.2e}; rank-5 input keeps {kept} of 8 directions",
    )


def test_hac_covariance(capsys):
    X = np.column_stack([np.ones(6), np.arange(6.0)])
    y = np.array([1.0, 3.0, 2.0, 5.0, 4.0, 7.0])
    beta = np.linalg.lstsq(X, y, rcond=None)[0]
    resid = y - X @ beta
    H = 2
    omega = np.zeros((2, 2))
    for t in range(6):
        for s in range(6):
            lag = abs(t - s)
            if lag <= H:
                w = 1.0 - lag / (H + 1.0)
                omega += w * resid[t] * resid[s] * np.outer(X[t], X[s])
    bread = np.linalg.inv(X.T @ X)
    oracle = bread @ omega @ bread
    diff = float(np.max(np.abs(hac_covariance(X, resid, H) - oracle)))

    # H=0 must equal the heteroskedasticity-only sandwich computed the same way
    xe = X * resid[:, None]
    meat = xe.T @ xe
    xtx = X.T @ X
    inner = np.linalg.solve(xtx, meat)
    hc0 = np.linalg.solve(xtx, inner.T).T
    hc0 = (hc0 + hc0.T) / 2.0
    exact = bool(np.array_equal(hac_covariance(X, resid, 0), hc0))
    ok = diff <= 1e-12 and exact
    _report(
        capsys, "hac covariance", ok,
        f"6-obs double-sum max |diff| {diff:.2e}; H=0 equals HC0 exactly: {exact}",
    )


BETAS = (0.10, 0.08, 0.06, 0.04)


def _simulate_dgp(seed, n=300, burn=50):
    rng = np.random.default_rng(seed)
    total = n + burn
    e = rng.normal(size=total)
    eps = rng.normal(size=total)
    y = np.zeros(total)
    for t in range(1, total):
        lagged = sum(b * e[t - j] for j, b in enumerate(BETAS) if t - j >= 0)
        y[t] = 0.3 * y[t - 1] + lagged + eps[t]
    return y[burn:], e[burn:]


def test_dgp_recovery(capsys):
    started = time.monotonic()
    spec = RegressionSpec(p=7, q=3, hac_bandwidth=7)
    lead_spec = RegressionSpec(p=7, q=3, lead_order=3, hac_bandwidth=7)
    truth = sum(BETAS)
    covered = delta_rejections = pretrend_rejections = 0
    seeds = 200
    for seed in range(seeds):
        y, e = _simulate_dgp(seed)
        b = ardl(y, e, None, spec).beta_sum
        if b.estimate - Z95 * b.se <= truth <= b.estimate + Z95 * b.se:
            covered += 1
        if ardl(y, e, None, lead_spec).delta_sum.p < 0.05:
            delta_rejections += 1
        # the pre-trend regression omits the exposure terms, so its residual
        # is MA(3) under this process; bandwidth 3 matches that structure
        if joint_pretrend_wald(y, e, None, p=7, H=3).p < 0.05:
            pretrend_rejections += 1
    elapsed = time.monotonic() - started
    coverage = covered / seeds
    delta_rate = delta_rejections / seeds
    pre_rate = pretrend_rejections / seeds
    ok = coverage >= 0.90 and delta_rate <= 0.10 and pre_rate <= 0.10 and elapsed < 60.0
    _report(
        capsys, "dgp recovery", ok,
        f"beta_sum coverage {coverage:.1%} (need >=90%); delta rejects "
        f"{delta_rate:.1%}, pre-trend rejects {pre_rate:.1%} (need <=10%); "
        f"{elapsed:.1f}s of 60s",
    )


def test_lp_consistency(capsys):
    y, e = _simulate_dgp(11)
    lp = local_projection(y, e, None, 0, p=7, H=7)
    contemporaneous = ardl(
        y, e, None, RegressionSpec(p=7, q=0, hac_bandwidth=7)
    ).result.coef_by_label("E_lag0")
    window = cumulative_lp(y, e, None, 0, 0, p=7, H=7)
    theta_exact = lp.theta == contemporaneous
    window_exact = window.estimate == lp.theta and window.se == lp.se
    ok = theta_exact and window_exact
    _report(
        capsys, "lp consistency", ok,
        f"theta_0 == ARDL(q=0) E_lag0: {theta_exact}; "
        f"cumulative(0,0) == lp(0): {window_exact}",
    )


def test_gating(capsys):
    counts = [5, 4, 0, 2, 6, 5, 1, 7, 5, 5]
    rng = np.random.default_rng(3)
    rows = []
    buckets = []
    next_row = 0
    for t, count in enumerate(counts):
        day_rows = tuple(range(next_row, next_row + count))
        next_row += count
        buckets.append(DailyBucket(date(2025, 3, 1) + timedelta(days=t), count, day_rows))
        rows.extend(day_rows)
    unit = unit_normalize(rng.normal(size=(next_row, 6)))
    config = NoveltyConfig(window_days=3, min_day_posts=3, min_ref_posts=8)
    series = daily_novelty(buckets, unit, config)

    expected = []
    for t, count in enumerate(counts):
        ref = sum(counts[max(0, t - 3):t])
        if count == 0:
            expected.append("zero_post")
        elif count < 3 or ref < 8:
            expected.append("low_sample")
        else:
            expected.append("ok")
    flags_match = list(series.gate_flags) == expected
    values_match = all(
        np.isfinite(series.values[t]) == (flag == "ok")
        for t, flag in enumerate(expected)
    )
    ok = flags_match and values_match
    _report(
        capsys, "gating", ok,
        f"flags match direct scan: {flags_match}; N_t exists only on ok days: "
        f"{values_match} ({expected.count('ok')}/{len(counts)} ok)",
    )


def test_replication(capsys):
    rep_dir = os.environ.get("NOVELDYN_REPLICATION_DIR", "")
    config_path = Path(rep_dir) / "config.yaml" if rep_dir else None
    if not rep_dir or not config_path.is_file():
        with capsys.disabled():
            print(
                "acceptance SKIP: replication "
                "(set NOVELDYN_REPLICATION_DIR to the public inputs)",
                flush=True,
            )
        pytest.skip("replication inputs not supplied")
    config = load_config(config_path)
    frame, _ = load_frame(config)
    cache = {}
    e = build_exposure(config, config.primary_exposure, cache).aligned_z(frame.dates)
    spec = next(
        s for s in config.specs
        if s.q == 3 and s.lead_order == 0 and not s.include_trend
    )
    main = ardl(frame.novelty_z, e, frame.controls, spec)
    leads = ardl(frame.novelty_z, e, frame.controls, config.leads_spec)
    placebo = sorted(
        ardl(
            frame.novelty_z,
            build_exposure(config, name, cache).aligned_z(frame.dates),
            frame.controls,
            spec,
        ).beta_sum.estimate
        for name in config.falsification
    )
    wald = joint_pretrend_wald(
        frame.novelty_z, e, frame.controls, p=spec.p, H=spec.hac_bandwidth
    )
    expected_placebo = sorted([-0.136, 0.026])
    checks = {
        "beta_sum": abs(main.beta_sum.estimate - 0.285) <= 0.01,
        "n": main.result.n == 256,
        "delta_sum": abs(leads.delta_sum.estimate - (-0.042)) <= 0.01,
        "falsification": len(placebo) == 2
        and all(abs(a - b) <= 0.01 for a, b in zip(placebo, expected_placebo)),
        "wald": abs(wald.statistic - 3.090) <= 0.05 and wald.df == 5,
    }
    detail = (
        f"beta_sum {main.beta_sum.estimate:.3f} (0.285±0.01), n {main.result.n} (=256), "
        f"delta_sum {leads.delta_sum.estimate:.3f} (-0.042±0.01), "
        f"falsification {['%.3f' % v for v in placebo]}, "
        f"wald {wald.statistic:.3f} df {wald.df} (3.090±0.05, df 5)"
    )
    _report(capsys, "replication", all(checks.values()), detail)


def test_determinism(capsys, fixture_root, tmp_path):
    outputs = []
    for run in ("a", "b"):
        config = load_config(
            fixture_root / "config.yaml",
            overrides={"output_dir": str(tmp_path / run)},
        )
        run_all(config)
        outputs.append({
            str(p.relative_to(tmp_path / run)): p.read_bytes()
            for p in sorted((tmp_path / run).rglob("*"))
            if p.is_file()
        })
    identical = outputs[0] == outputs[1]
    ok = identical and len(outputs[0]) > 0
    _report(
        capsys, "determinism", ok,
        f"two full runs, {len(outputs[0])} files byte-identical: {identical}",
    )
