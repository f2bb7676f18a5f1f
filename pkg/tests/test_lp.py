"""Local projections: equivalences with the distributed-lag model, window
aggregation identities, and size/power on simulated dynamics."""

from datetime import date, timedelta

import numpy as np
import pytest

from noveldyn.ingest import calendar_controls
from noveldyn.lp import (
    cumulative_lp,
    irf,
    joint_pretrend_wald,
    local_projection,
)
from noveldyn.regression import RegressionError, RegressionSpec, ardl


def simulate(n, seed, beta=(0.10, 0.08, 0.06, 0.04), rho=0.3, noise=1.0):
    """AR(1)-with-distributed-lag daily DGP used across the dynamic tests."""
    rng = np.random.default_rng(seed)
    e = rng.normal(size=n)
    y = np.zeros(n)
    for t in range(n):
        acc = rho * y[t - 1] if t >= 1 else 0.0
        for j, b in enumerate(beta):
            if t - j >= 0:
                acc += b * e[t - j]
        y[t] = acc + noise * rng.normal()
    return y, e


def dates_for(n, start=date(2025, 1, 1)):
    return tuple(start + timedelta(days=i) for i in range(n))


def test_theta0_equals_contemporaneous_ardl_coefficient():
    # LP at h=0 and ARDL with q=0 share design row-for-row, so the
    # exposure coefficient and its HAC se must agree exactly
    y, e = simulate(220, seed=0)
    dates = dates_for(220)
    controls = calendar_controls(dates)
    est = local_projection(y, e, controls, h=0, p=7, H=7)
    fit_a = ardl(y, e, controls, RegressionSpec(p=7, q=0, hac_bandwidth=7))
    assert est.theta == fit_a.result.coef_by_label("E_lag0")
    assert est.se == fit_a.result.se_by_label("E_lag0")
    assert est.n == fit_a.result.n


def test_cumulative_window_00_equals_h0():
    y, e = simulate(180, seed=1)
    controls = calendar_controls(dates_for(180))
    win = cumulative_lp(y, e, controls, 0, 0, p=7, H=7)
    est = local_projection(y, e, controls, h=0, p=7, H=7)
    assert win.estimate == est.theta
    assert win.se == est.se
    assert win.window == (0, 0)


def test_cumulative_outcome_is_summed_levels():
    # with no controls and p=0 the window regression outcome is the plain
    # sum of y over the horizon range; verify via a hand-built regression
    y, e = simulate(150, seed=2, rho=0.0)
    win = cumulative_lp(y, e, None, 0, 2, p=0, H=0)
    n = len(y)
    outcome = y[:-2] + y[1:-1] + y[2:]
    X = np.column_stack([np.ones(n - 2), e[: n - 2]])
    coef = np.linalg.lstsq(X, outcome, rcond=None)[0]
    assert win.estimate == pytest.approx(coef[1], abs=1e-12)


def test_negative_horizon_uses_leads_form():
    # h=-2 regresses Y_t on E_{t+2}: identical to a direct construction
    y, e = simulate(160, seed=3)
    est = local_projection(y, e, None, h=-2, p=2, H=3)
    n = len(y)
    outcome = y[: n - 2]
    lead = e[2:]
    lag1 = np.concatenate([[np.nan], y[: n - 3]])
    lag2 = np.concatenate([[np.nan, np.nan], y[: n - 4]])
    keep = np.isfinite(lag1) & np.isfinite(lag2)
    X = np.column_stack([np.ones(keep.sum()), lead[keep], lag1[keep], lag2[keep]])
    coef = np.linalg.lstsq(X, outcome[keep], rcond=None)[0]
    assert est.theta == pytest.approx(coef[1], abs=1e-10)
    assert est.n == int(keep.sum())


def test_pre_window_cumulative_shifts_anchor():
    # window (-2, -1): outcome y_{t-2} + y_{t-1} regressed on e_{t-2+2}=e_t
    # after the internal anchor shift; equivalent direct check with p=0
    y, e = simulate(140, seed=4, rho=0.0)
    win = cumulative_lp(y, e, None, -2, -1, p=0, H=0)
    n = len(y)
    outcome = y[:-1] + y[1:]           # sums at anchor t' = t - 2: y_{t'} + y_{t'+1}
    expo = e[2:]                        # e_{t'+2}
    X = np.column_stack([np.ones(n - 2), expo])
    coef = np.linalg.lstsq(X, outcome[: n - 2], rcond=None)[0]
    assert win.estimate == pytest.approx(coef[1], abs=1e-12)


def test_irf_grid_matches_pointwise_calls():
    y, e = simulate(200, seed=5)
    res = irf(y, e, None, h_min=-2, h_max=3, p=3, H=3)
    assert res.horizons == (-2, -1, 0, 1, 2, 3)
    for i, h in enumerate(res.horizons):
        est = local_projection(y, e, None, h, p=3, H=3)
        assert res.theta[i] == est.theta
        assert res.se[i] == est.se
        assert res.n[i] == est.n


def test_window_bounds_checked():
    y, e = simulate(100, seed=6)
    with pytest.raises(RegressionError, match="exceeds end"):
        cumulative_lp(y, e, None, 2, 1)


def test_pretrend_requires_negative_horizons():
    y, e = simulate(100, seed=7)
    with pytest.raises(RegressionError, match="negative"):
        joint_pretrend_wald(y, e, None, horizons=(-2, 0))


def test_pretrend_wald_null_size():
    # exposure independent of the outcome: rejection rate within 0.05 +/- 0.03
    # across 500 seeds; the chi-square(5) limit of the HAC Wald needs n of
    # this order before its size settles (it over-rejects near n=300)
    rejections = 0
    reps = 500
    for seed in range(reps):
        rng = np.random.default_rng(1000 + seed)
        y = rng.normal(size=1000)
        e = rng.normal(size=1000)
        test = joint_pretrend_wald(y, e, None, p=3, H=3)
        assert test.df == 5
        rejections += test.p < 0.05
    assert 0.02 <= rejections / reps <= 0.08


def test_pretrend_wald_power_against_reverse_causality():
    # when the exposure follows the outcome (E_t driven by Y_{t-1}),
    # leads of E predict Y, and the test should catch it
    rejections = 0
    reps = 60
    for seed in range(reps):
        rng = np.random.default_rng(2000 + seed)
        n = 300
        y = rng.normal(size=n)
        e = np.zeros(n)
        for t in range(1, n):
            e[t] = 0.8 * y[t - 1] + 0.3 * rng.normal()
        test = joint_pretrend_wald(y, e, None, p=3, H=3)
        rejections += test.p < 0.05
    assert rejections / reps > 0.8


def test_lp_recovers_contemporaneous_effect():
    # theta_0 should concentrate near beta_0 = 0.10 across simulations
    thetas = []
    for seed in range(40):
        y, e = simulate(400, seed=3000 + seed, noise=0.5)
        est = local_projection(y, e, None, h=0, p=7, H=7)
        thetas.append(est.theta)
    assert abs(np.mean(thetas) - 0.10) < 0.02


def test_insufficient_overlap_raises():
    y, e = simulate(12, seed=8)
    with pytest.raises(RegressionError, match="insufficient overlap"):
        local_projection(y, e, None, h=9, p=7, H=2)
