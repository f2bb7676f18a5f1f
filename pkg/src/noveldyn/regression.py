"""ARDL design construction, OLS, Newey-West HAC covariance, and Wald-style
linear-combination tests.

Rows are consumed in time order (HAC autocovariances are defined on the
retained-row sequence); any row with a missing outcome, lag/lead, or
control is dropped listwise.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from datetime import date

import numpy as np
from scipy import stats

log = logging.getLogger(__name__)

LABEL_CONST = "const"
LABEL_TREND = "trend"


class RegressionError(ValueError):
    pass


@dataclass(frozen=True)
class RegressionSpec:
    p: int = 7                 # outcome lag order
    q: int = 3                 # exposure lag order (lags 0..q)
    lead_order: int = 0        # exposure leads 1..L (timing placebo)
    hac_bandwidth: int = 7
    controls: tuple[str, ...] | None = None  # None = every control column
    include_trend: bool = False

    def __post_init__(self):
        if min(self.p, self.q, self.lead_order, self.hac_bandwidth) < 0:
            raise RegressionError("lag/lead/bandwidth orders must be >= 0")

    def label(self) -> str:
        parts = [f"p{self.p}", f"q{self.q}"]
        if self.lead_order:
            parts.append(f"L{self.lead_order}")
        if self.include_trend:
            parts.append("trend")
        return "_".join(parts)


@dataclass(frozen=True)
class Design:
    X: np.ndarray
    y: np.ndarray
    labels: tuple[str, ...]
    dates: tuple[date, ...] | None = None  # retained rows, ascending


@dataclass
class RegressionResult:
    coef: np.ndarray
    residuals: np.ndarray
    n: int
    r2: float
    column_labels: tuple[str, ...]
    hac_cov: np.ndarray | None = None
    hac_bandwidth: int | None = None

    def coef_by_label(self, label: str) -> float:
        return float(self.coef[self.column_labels.index(label)])

    def se_by_label(self, label: str) -> float:
        if self.hac_cov is None:
            raise RegressionError("HAC covariance has not been computed")
        i = self.column_labels.index(label)
        return float(np.sqrt(self.hac_cov[i, i]))


@dataclass(frozen=True)
class LinearComboTest:
    estimate: float
    se: float
    t: float
    p: float


def shift(x: np.ndarray, k: int) -> np.ndarray:
    """x_{t-k} aligned at position t (k < 0 yields the k-step lead)."""
    x = np.asarray(x, dtype=float)
    out = np.full(x.shape, np.nan)
    if k == 0:
        out[:] = x
    elif k > 0:
        out[k:] = x[:-k]
    else:
        out[:k] = x[-k:]
    return out


def exposure_lag_labels(q: int) -> list[str]:
    return [f"E_lag{j}" for j in range(q + 1)]


def exposure_lead_labels(L: int) -> list[str]:
    return [f"E_lead{h}" for h in range(1, L + 1)]


def build_design(y, e, controls, spec: RegressionSpec, dates=None) -> Design:
    """Assemble the aligned ARDL design: intercept, Y lags 1..p, E lags
    0..q, E leads 1..L, controls, optional linear trend."""
    y = np.asarray(y, dtype=float)
    e = np.asarray(e, dtype=float)
    if y.shape != e.shape:
        raise RegressionError("outcome and exposure must share the daily index")
    n = y.shape[0]
    cols: list[np.ndarray] = [np.ones(n)]
    labels: list[str] = [LABEL_CONST]
    is_control: list[bool] = [False]
    for i in range(1, spec.p + 1):
        cols.append(shift(y, i))
        labels.append(f"Y_lag{i}")
        is_control.append(False)
    for j in range(spec.q + 1):
        cols.append(shift(e, j))
        labels.append(f"E_lag{j}")
        is_control.append(False)
    for h in range(1, spec.lead_order + 1):
        cols.append(shift(e, -h))
        labels.append(f"E_lead{h}")
        is_control.append(False)
    if controls is not None:
        selected = controls if spec.controls is None else controls.select(spec.controls)
        if selected.values.shape[0] != n:
            raise RegressionError("control matrix does not span the daily index")
        for name, col in zip(selected.columns, selected.values.T):
            cols.append(np.asarray(col, dtype=float))
            labels.append(name)
            is_control.append(True)
    if spec.include_trend:
        cols.append(np.arange(n, dtype=float))
        labels.append(LABEL_TREND)
        is_control.append(False)
    X = np.column_stack(cols)
    keep = np.isfinite(y) & np.all(np.isfinite(X), axis=1)
    X, yk = X[keep], y[keep]
    X, labels = drop_degenerate_controls(X, labels, is_control)
    if X.shape[0] < X.shape[1]:
        raise RegressionError(
            f"underdetermined: {X.shape[0]} rows for {X.shape[1]} columns"
        )
    kept_dates = tuple(d for d, k in zip(dates, keep) if k) if dates is not None else None
    return Design(X=X, y=yk, labels=tuple(labels), dates=kept_dates)


def drop_degenerate_controls(X, labels, is_control) -> tuple[np.ndarray, tuple[str, ...]]:
    """Remove control columns with no variation on the retained rows
    (dummies for levels the sample never visits, or that saturate it)."""
    keep_cols = []
    dropped = []
    for j, label in enumerate(labels):
        if is_control[j] and X.shape[0] > 0 and np.ptp(X[:, j]) == 0.0:
            dropped.append(label)
        else:
            keep_cols.append(j)
    if dropped:
        log.debug("dropping constant control column(s): %s", ", ".join(dropped))
    return X[:, keep_cols], tuple(labels[j] for j in keep_cols)


def _collinear_labels(X: np.ndarray, labels) -> list[str]:
    """Columns linearly dependent on their predecessors."""
    bad = []
    rank = 0
    for j in range(X.shape[1]):
        r = np.linalg.matrix_rank(X[:, : j + 1])
        if r == rank:
            bad.append(labels[j])
        rank = r
    return bad


def ols(design: Design) -> RegressionResult:
    """Least-squares fit; centered R^2; no covariance attached yet."""
    X, y = design.X, design.y
    s = np.linalg.svd(X, compute_uv=False)
    if s[-1] <= 1e-10 * s[0]:
        raise RegressionError(
            f"rank-deficient design; collinear columns: "
            f"{_collinear_labels(X, design.labels)}"
        )
    coef, _, _, _ = np.linalg.lstsq(X, y, rcond=None)
    residuals = y - X @ coef
    ssr = float(residuals @ residuals)
    sst = float(((y - y.mean()) ** 2).sum())
    r2 = 1.0 - ssr / sst if sst > 0 else float("nan")
    return RegressionResult(
        coef=coef,
        residuals=residuals,
        n=X.shape[0],
        r2=r2,
        column_labels=design.labels,
    )


def hac_covariance(X: np.ndarray, residuals: np.ndarray, H: int) -> np.ndarray:
    """Newey-West sandwich with Bartlett weights w_l = 1 - l/(H+1) and no
    small-sample degrees-of-freedom correction."""
    X = np.asarray(X, dtype=float)
    residuals = np.asarray(residuals, dtype=float)
    n = X.shape[0]
    if H >= n:
        raise RegressionError(f"HAC bandwidth {H} >= sample size {n}")
    xe = X * residuals[:, None]
    omega = xe.T @ xe
    for lag in range(1, H + 1):
        w = 1.0 - lag / (H + 1.0)
        gamma = xe[lag:].T @ xe[:-lag]
        omega += w * (gamma + gamma.T)
    xtx = X.T @ X
    inner = np.linalg.solve(xtx, omega)
    cov = np.linalg.solve(xtx, inner.T).T
    return (cov + cov.T) / 2.0


def fit(design: Design, H: int) -> RegressionResult:
    result = ols(design)
    result.hac_cov = hac_covariance(design.X, result.residuals, H)
    result.hac_bandwidth = H
    return result


def linear_combo(result: RegressionResult, weights) -> LinearComboTest:
    """w'beta with HAC se and a two-sided normal p-value."""
    weights = np.asarray(weights, dtype=float)
    if weights.shape != result.coef.shape:
        raise RegressionError(
            f"weights length {weights.shape[0]} != {result.coef.shape[0]} coefficients"
        )
    if result.hac_cov is None:
        raise RegressionError("HAC covariance has not been computed")
    estimate = float(weights @ result.coef)
    var = float(weights @ result.hac_cov @ weights)
    if var <= 0.0:
        raise RegressionError("non-positive variance for the linear combination")
    se = float(np.sqrt(var))
    t = estimate / se
    return LinearComboTest(estimate=estimate, se=se, t=t, p=2.0 * float(stats.norm.sf(abs(t))))


def sum_weights(result: RegressionResult, labels) -> np.ndarray:
    w = np.zeros(len(result.column_labels))
    for label in labels:
        w[result.column_labels.index(label)] = 1.0
    return w


@dataclass(frozen=True)
class ArdlFit:
    spec: RegressionSpec
    design: Design
    result: RegressionResult
    beta_sum: LinearComboTest
    delta_sum: LinearComboTest | None


def ardl(y, e, controls, spec: RegressionSpec, dates=None) -> ArdlFit:
    """One ARDL estimation: OLS + HAC, the cumulative exposure effect over
    lags 0..q, and the lead-sum placebo when leads are included."""
    design = build_design(y, e, controls, spec, dates=dates)
    result = fit(design, spec.hac_bandwidth)
    beta = linear_combo(result, sum_weights(result, exposure_lag_labels(spec.q)))
    delta = None
    if spec.lead_order > 0:
        delta = linear_combo(
            result, sum_weights(result, exposure_lead_labels(spec.lead_order))
        )
    return ArdlFit(spec=spec, design=design, result=result, beta_sum=beta, delta_sum=delta)
