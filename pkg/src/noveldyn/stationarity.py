"""ADF and KPSS stationarity diagnostics against embedded critical values.

Statistics are compared to tabulated 1/5/10% critical values; exact
p-value response surfaces are out of scope.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

CONSTANT = "constant"
CONSTANT_TREND = "constant+trend"

# MacKinnon (2010) asymptotic Dickey-Fuller tau critical values
ADF_CRITICAL = {
    CONSTANT: {0.01: -3.43, 0.05: -2.86, 0.10: -2.57},
    CONSTANT_TREND: {0.01: -3.96, 0.05: -3.41, 0.10: -3.12},
}
# Kwiatkowski-Phillips-Schmidt-Shin (1992) Table 1
KPSS_CRITICAL = {
    CONSTANT: {0.01: 0.739, 0.05: 0.463, 0.10: 0.347},
    CONSTANT_TREND: {0.01: 0.216, 0.05: 0.146, 0.10: 0.119},
}


class StationarityError(ValueError):
    pass


@dataclass(frozen=True)
class AdfTest:
    statistic: float
    lags: int
    nobs: int
    deterministic: str
    critical_values: dict
    reject_at: dict  # level -> unit root rejected

    @property
    def decision(self) -> str:
        return "reject_unit_root" if self.reject_at[0.05] else "unit_root_not_rejected"


@dataclass(frozen=True)
class KpssTest:
    statistic: float
    bandwidth: int
    nobs: int
    deterministic: str
    critical_values: dict
    reject_at: dict  # level -> stationarity rejected

    @property
    def decision(self) -> str:
        return "reject_stationarity" if self.reject_at[0.05] else "stationarity_not_rejected"


@dataclass(frozen=True)
class StationarityReport:
    name: str
    deterministic: str
    adf: AdfTest
    kpss: KpssTest


def _clean_series(series) -> np.ndarray:
    x = np.asarray(series, dtype=float)
    x = x[np.isfinite(x)]
    if x.size < 25:
        raise StationarityError("need at least 25 observations")
    if np.ptp(x) == 0.0:
        raise StationarityError("constant series")
    return x


def _det_columns(n: int, deterministic: str) -> np.ndarray:
    if deterministic == CONSTANT:
        return np.ones((n, 1))
    if deterministic == CONSTANT_TREND:
        return np.column_stack([np.ones(n), np.arange(1, n + 1, dtype=float)])
    raise StationarityError(f"unknown deterministic case {deterministic!r}")


def _adf_regression(x: np.ndarray, k: int, deterministic: str, start: int):
    """Dickey-Fuller regression with k augmentation lags, observations
    from index ``start`` (>= k+1) onward; returns (tau, ssr, nobs, nparams)."""
    dx = np.diff(x)
    rows = np.arange(start, x.size)  # indices of y_t in levels
    y = dx[rows - 1]
    cols = [x[rows - 1]]  # y_{t-1}
    for i in range(1, k + 1):
        cols.append(dx[rows - 1 - i])
    X = np.column_stack([_det_columns(rows.size, deterministic)] + [np.column_stack(cols)])
    coef, _, _, _ = np.linalg.lstsq(X, y, rcond=None)
    resid = y - X @ coef
    ssr = float(resid @ resid)
    nobs, nparams = X.shape
    sigma2 = ssr / (nobs - nparams)
    xtx_inv = np.linalg.inv(X.T @ X)
    level_idx = _det_columns(1, deterministic).shape[1]  # y_{t-1} follows the det terms
    tau = float(coef[level_idx] / np.sqrt(sigma2 * xtx_inv[level_idx, level_idx]))
    return tau, ssr, nobs, nparams


def adf_test(series, deterministic: str = CONSTANT, max_lags: int = 12) -> AdfTest:
    """Augmented Dickey-Fuller test with AIC lag selection over 0..max_lags.

    Candidate lag orders are compared on a common sample; the chosen
    order is refit on the longest sample it allows.
    """
    x = _clean_series(series)
    max_lags = min(max_lags, (x.size - 1) // 2 - 2)
    if max_lags < 0:
        raise StationarityError("series too short for the ADF regression")
    best_k, best_aic = 0, np.inf
    common_start = max_lags + 1
    for k in range(max_lags + 1):
        _, ssr, nobs, nparams = _adf_regression(x, k, deterministic, common_start)
        aic = nobs * np.log(ssr / nobs) + 2.0 * nparams
        if aic < best_aic:
            best_k, best_aic = k, aic
    tau, _, nobs, _ = _adf_regression(x, best_k, deterministic, best_k + 1)
    crits = ADF_CRITICAL[deterministic]
    reject = {level: tau < cv for level, cv in crits.items()}
    return AdfTest(
        statistic=tau,
        lags=best_k,
        nobs=nobs,
        deterministic=deterministic,
        critical_values=dict(crits),
        reject_at=reject,
    )


def kpss_test(series, deterministic: str = CONSTANT) -> KpssTest:
    """KPSS test with Bartlett long-run variance, bandwidth
    floor(4 * (n/100)^(1/4))."""
    x = _clean_series(series)
    n = x.size
    det = _det_columns(n, deterministic)
    coef, _, _, _ = np.linalg.lstsq(det, x, rcond=None)
    resid = x - det @ coef
    s = np.cumsum(resid)
    bandwidth = int(4.0 * (n / 100.0) ** 0.25)
    lrv = float(resid @ resid) / n
    for lag in range(1, bandwidth + 1):
        w = 1.0 - lag / (bandwidth + 1.0)
        lrv += 2.0 * w * float(resid[lag:] @ resid[:-lag]) / n
    if lrv <= 0.0:
        raise StationarityError("non-positive long-run variance")
    statistic = float((s @ s) / (n * n * lrv))
    crits = KPSS_CRITICAL[deterministic]
    reject = {level: statistic > cv for level, cv in crits.items()}
    return KpssTest(
        statistic=statistic,
        bandwidth=bandwidth,
        nobs=n,
        deterministic=deterministic,
        critical_values=dict(crits),
        reject_at=reject,
    )


def stationarity_report(series, name: str, deterministic: str = CONSTANT) -> StationarityReport:
    return StationarityReport(
        name=name,
        deterministic=deterministic,
        adf=adf_test(series, deterministic),
        kpss=kpss_test(series, deterministic),
    )
