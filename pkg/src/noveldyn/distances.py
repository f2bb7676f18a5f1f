"""Two-sample distributional distances: energy distance and RBF-kernel MMD^2.

Within-sample expectations follow the ``unbiased`` convention by default
(means over distinct unordered pairs); the degenerate singleton within
term is 0 for the energy distance and k(x,x)=1 for MMD^2, so identical
singletons score exactly 0 under both metrics. The ``biased`` convention
(V-statistic, means over all ordered pairs including the diagonal) is
nonnegative for every input and exactly 0 on identical multisets.
"""

from __future__ import annotations

import numpy as np
from scipy.spatial.distance import cdist, pdist

UNBIASED = "unbiased"
BIASED = "biased"

# gamma = f(median pairwise distance m); alternates are one-line config changes
GAMMA_RULES = {
    "inv_two_m_sq": lambda m: 1.0 / (2.0 * m * m),
    "inv_m_sq": lambda m: 1.0 / (m * m),
}
DEFAULT_GAMMA_RULE = "inv_two_m_sq"


class DistanceError(ValueError):
    pass


def _sample(x) -> np.ndarray:
    arr = np.asarray(x, dtype=np.float64)
    if arr.ndim == 1:
        arr = arr[None, :]
    if arr.ndim != 2 or arr.shape[0] == 0:
        raise DistanceError("empty sample")
    return arr


def _within_mean_distance(x: np.ndarray, within: str) -> float:
    n = x.shape[0]
    if within == UNBIASED:
        if n < 2:
            return 0.0
        return float(pdist(x).mean())
    if within == BIASED:
        if n < 2:
            return 0.0
        # all n^2 ordered pairs; the zero diagonal stays in the mean
        return float(pdist(x).sum() * 2.0 / (n * n))
    raise DistanceError(f"unknown within-sample convention {within!r}")


def energy_distance(a, b, within: str = UNBIASED) -> float:
    """2 E||a-b|| - E||a-a'|| - E||b-b'|| between two vector samples."""
    a, b = _sample(a), _sample(b)
    if a.shape[1] != b.shape[1]:
        raise DistanceError("samples have different dimensions")
    cross = float(cdist(a, b).mean())
    return 2.0 * cross - _within_mean_distance(a, within) - _within_mean_distance(b, within)


def median_heuristic_gamma(combined, rule: str = DEFAULT_GAMMA_RULE) -> float:
    """RBF bandwidth from the median pairwise distance of the pooled sample.

    The median over distinct unordered pairs uses the mean of the two
    middle order statistics for even pair counts.
    """
    x = _sample(combined)
    if x.shape[0] < 2:
        raise DistanceError("need at least 2 points for the median heuristic")
    m = float(np.median(pdist(x)))
    if m <= 0.0:
        raise DistanceError("degenerate bandwidth: median pairwise distance is 0")
    try:
        return GAMMA_RULES[rule](m)
    except KeyError:
        raise DistanceError(f"unknown gamma rule {rule!r}") from None


def _within_mean_kernel(x: np.ndarray, gamma: float, within: str) -> float:
    n = x.shape[0]
    if within == UNBIASED:
        if n < 2:
            return 1.0  # k(x,x) for the singleton within term
        return float(np.exp(-gamma * pdist(x, "sqeuclidean")).mean())
    if within == BIASED:
        off = np.exp(-gamma * pdist(x, "sqeuclidean")).sum() if n > 1 else 0.0
        return float((2.0 * off + n) / (n * n))  # diagonal contributes k=1
    raise DistanceError(f"unknown within-sample convention {within!r}")


def mmd2(
    a,
    b,
    gamma: float | None = None,
    within: str = UNBIASED,
    gamma_rule: str = DEFAULT_GAMMA_RULE,
) -> float:
    """Squared MMD with RBF kernel k(x,y) = exp(-gamma ||x-y||^2).

    When ``gamma`` is None it is set per call by the median heuristic on
    the pooled sample.
    """
    a, b = _sample(a), _sample(b)
    if a.shape[1] != b.shape[1]:
        raise DistanceError("samples have different dimensions")
    if gamma is None:
        gamma = median_heuristic_gamma(np.vstack([a, b]), rule=gamma_rule)
    cross = float(np.exp(-gamma * cdist(a, b, "sqeuclidean")).mean())
    return (
        _within_mean_kernel(a, gamma, within)
        + _within_mean_kernel(b, gamma, within)
        - 2.0 * cross
    )
