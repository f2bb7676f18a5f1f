"""Local-projection impulse responses, cumulative windows, and the joint
pre-trend Wald test.

At nonnegative horizons the regression is Y_{t+h} on E_t with p lags of Y
and calendar controls dated t. At negative horizons the same-sample-shape
regression would make the outcome one of its own lag regressors, so the
pre-trend estimate is the equivalent leads form: Y_t on E_{t+|h|} with
lags and controls dated t.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import stats

from .regression import (
    Design,
    LinearComboTest,
    RegressionError,
    drop_degenerate_controls,
    fit,
    linear_combo,
    shift,
)


@dataclass(frozen=True)
class LpEstimate:
    horizon: int
    theta: float
    se: float
    t: float
    p: float
    n: int


@dataclass(frozen=True)
class WindowEstimate:
    window: tuple[int, int]
    estimate: float
    se: float
    t: float
    p: float
    n: int


@dataclass(frozen=True)
class IrfResult:
    horizons: tuple[int, ...]
    theta: np.ndarray
    se: np.ndarray
    n: np.ndarray


@dataclass(frozen=True)
class WaldTest:
    statistic: float
    df: int
    p: float
    n: int


def _lp_design(y, e, controls, exposure_shift: int, outcome_leads, p: int) -> Design:
    """Shared builder: regress the (possibly summed) outcome leads on a
    single shifted exposure column, Y lags 1..p, and controls."""
    y = np.asarray(y, dtype=float)
    e = np.asarray(e, dtype=float)
    if y.shape != e.shape:
        raise RegressionError("outcome and exposure must share the daily index")
    n = y.shape[0]
    stacked = np.vstack([shift(y, -j) for j in outcome_leads])
    outcome = stacked.sum(axis=0)
    outcome[~np.all(np.isfinite(stacked), axis=0)] = np.nan
    # column order mirrors the distributed-lag design so the h=0 projection
    # is the same matrix (hence bit-identical estimates) as ARDL with q=0
    cols = [np.ones(n)]
    labels = ["const"]
    is_control = [False]
    for i in range(1, p + 1):
        cols.append(shift(y, i))
        labels.append(f"Y_lag{i}")
        is_control.append(False)
    cols.append(shift(e, exposure_shift))
    labels.append("E")
    is_control.append(False)
    if controls is not None:
        if controls.values.shape[0] != n:
            raise RegressionError("control matrix does not span the daily index")
        for name, col in zip(controls.columns, controls.values.T):
            cols.append(np.asarray(col, dtype=float))
            labels.append(name)
            is_control.append(True)
    X = np.column_stack(cols)
    keep = np.isfinite(outcome) & np.all(np.isfinite(X), axis=1)
    X, yk = X[keep], outcome[keep]
    X, labels = drop_degenerate_controls(X, labels, is_control)
    if X.shape[0] < X.shape[1]:
        raise RegressionError(
            f"insufficient overlap: {X.shape[0]} rows for {X.shape[1]} columns"
        )
    return Design(X=X, y=yk, labels=tuple(labels))


def local_projection(y, e, controls, h: int, p: int = 7, H: int = 7) -> LpEstimate:
    """Per-horizon impulse response of the outcome to the exposure."""
    if h >= 0:
        design = _lp_design(y, e, controls, exposure_shift=0, outcome_leads=[h], p=p)
    else:
        design = _lp_design(y, e, controls, exposure_shift=h, outcome_leads=[0], p=p)
    result = fit(design, H)
    test = linear_combo(result, _unit_weight(result, "E"))
    return LpEstimate(horizon=h, theta=test.estimate, se=test.se, t=test.t, p=test.p, n=result.n)


def cumulative_lp(y, e, controls, a: int, b: int, p: int = 7, H: int = 7) -> WindowEstimate:
    """Single regression of the summed outcome over horizons a..b on the
    exposure, with the h=0-style control set (dated at the window start
    when the window begins before the shock)."""
    if a > b:
        raise RegressionError(f"window start {a} exceeds end {b}")
    m = max(0, -a)  # shift so every summed outcome is a lead
    design = _lp_design(
        y, e, controls,
        exposure_shift=-m,
        outcome_leads=range(a + m, b + m + 1),
        p=p,
    )
    result = fit(design, H)
    test = linear_combo(result, _unit_weight(result, "E"))
    return WindowEstimate(
        window=(a, b), estimate=test.estimate, se=test.se, t=test.t, p=test.p, n=result.n
    )


def irf(y, e, controls, h_min: int = -5, h_max: int = 14, p: int = 7, H: int = 7) -> IrfResult:
    horizons = tuple(range(h_min, h_max + 1))
    estimates = [local_projection(y, e, controls, h, p=p, H=H) for h in horizons]
    return IrfResult(
        horizons=horizons,
        theta=np.array([est.theta for est in estimates]),
        se=np.array([est.se for est in estimates]),
        n=np.array([est.n for est in estimates], dtype=int),
    )


def joint_pretrend_wald(
    y, e, controls, horizons=(-5, -4, -3, -2, -1), p: int = 7, H: int = 7
) -> WaldTest:
    """Wald test that the exposure-lead coefficients are jointly zero in a
    single multi-lead regression of Y_t (chi-square limiting distribution)."""
    horizons = tuple(sorted(horizons))
    if any(h >= 0 for h in horizons):
        raise RegressionError("pre-trend horizons must all be negative")
    y = np.asarray(y, dtype=float)
    e = np.asarray(e, dtype=float)
    n = y.shape[0]
    cols = [np.ones(n)]
    labels = ["const"]
    is_control = [False]
    lead_labels = []
    for h in horizons:
        cols.append(shift(e, h))  # h < 0: lead |h|
        labels.append(f"E_lead{-h}")
        lead_labels.append(f"E_lead{-h}")
        is_control.append(False)
    for i in range(1, p + 1):
        cols.append(shift(y, i))
        labels.append(f"Y_lag{i}")
        is_control.append(False)
    if controls is not None:
        for name, col in zip(controls.columns, controls.values.T):
            cols.append(np.asarray(col, dtype=float))
            labels.append(name)
            is_control.append(True)
    X = np.column_stack(cols)
    keep = np.isfinite(y) & np.all(np.isfinite(X), axis=1)
    X, yk = X[keep], y[keep]
    X, labels = drop_degenerate_controls(X, labels, is_control)
    if X.shape[0] < X.shape[1]:
        raise RegressionError("insufficient overlap for the pre-trend regression")
    design = Design(X=X, y=yk, labels=tuple(labels))
    result = fit(design, H)
    idx = [result.column_labels.index(lbl) for lbl in lead_labels]
    beta = result.coef[idx]
    vee = result.hac_cov[np.ix_(idx, idx)]
    eigvals = np.linalg.eigvalsh(vee)
    if eigvals[0] <= 1e-14 * max(eigvals[-1], 1.0):
        raise RegressionError("singular covariance block in the pre-trend Wald test")
    statistic = float(beta @ np.linalg.solve(vee, beta))
    df = len(idx)
    return WaldTest(
        statistic=statistic, df=df, p=float(stats.chi2.sf(statistic, df)), n=result.n
    )


def _unit_weight(result, label: str) -> np.ndarray:
    w = np.zeros(len(result.column_labels))
    w[result.column_labels.index(label)] = 1.0
    return w
