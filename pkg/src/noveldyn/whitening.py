"""PCA whitening and unit normalization for post embeddings.

Raw sentence embeddings are anisotropic; a whitening transform fitted on
the whole corpus maps them to identity sample covariance, after which
rows are L2-normalized so distances live on the unit hypersphere.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

RANK_TOLERANCE = 1e-10  # singular values below tol * s_max are dropped

STAGE_RAW = "raw"
STAGE_WHITENED = "whitened"
STAGE_UNIT = "unit"


class WhiteningError(ValueError):
    pass


@dataclass(frozen=True)
class EmbeddingMatrix:
    values: np.ndarray  # n_posts x dim
    stage: str = STAGE_RAW

    @property
    def n_posts(self) -> int:
        return self.values.shape[0]

    @property
    def dim(self) -> int:
        return self.values.shape[1]

    def row_sample(self, rows) -> np.ndarray:
        return self.values[np.asarray(rows, dtype=int)]


@dataclass(frozen=True)
class WhiteningModel:
    mean: np.ndarray   # dim
    basis: np.ndarray  # dim x k
    scale: np.ndarray  # k, inverse singular-value factors
    k: int


def _as_array(vectors) -> np.ndarray:
    if isinstance(vectors, EmbeddingMatrix):
        vectors = vectors.values
    arr = np.asarray(vectors, dtype=np.float64)
    if arr.ndim == 1:
        arr = arr[None, :]
    if arr.ndim != 2:
        raise WhiteningError("expected a 2-D array of row vectors")
    if not np.all(np.isfinite(arr)):
        raise WhiteningError("non-finite embedding entries")
    return arr


def fit_whitener(raw) -> WhiteningModel:
    """Fit the corpus-level whitening transform.

    Retains the k components with non-negligible singular values; the
    transformed fitting matrix has sample covariance I_k and mean 0.
    """
    x = _as_array(raw)
    n = x.shape[0]
    if n < 2:
        raise WhiteningError("need at least 2 rows to fit a whitener")
    mean = x.mean(axis=0)
    centered = x - mean
    _, s, vt = np.linalg.svd(centered, full_matrices=False)
    # centering a constant direction leaves pure summation noise behind
    # (the rounded mean offsets every row equally); singular values at
    # that scale carry no cross-row variance and must not be whitened
    noise_floor = (
        np.finfo(np.float64).eps
        * (np.log2(n) + 2.0)
        * np.sqrt(x.size)
        * float(np.max(np.abs(x), initial=0.0))
    )
    if s.size == 0 or s[0] <= noise_floor:
        raise WhiteningError("rank-0 matrix: all rows identical")
    keep = s >= max(RANK_TOLERANCE * s[0], noise_floor)
    k = int(keep.sum())
    basis = vt[keep].T
    with np.errstate(over="raise"):
        try:
            scale = np.sqrt(n - 1) / s[keep]
        except FloatingPointError:
            raise WhiteningError("singular values too small to whiten") from None
    return WhiteningModel(mean=mean, basis=basis, scale=scale, k=k)


def apply_whitener(model: WhiteningModel, vectors) -> EmbeddingMatrix:
    """Project onto retained components and rescale: scale * basis^T (x - mean)."""
    x = _as_array(vectors)
    if x.shape[1] != model.mean.shape[0]:
        raise WhiteningError(
            f"dimension mismatch: vectors have dim {x.shape[1]}, "
            f"model expects {model.mean.shape[0]}"
        )
    out = (x - model.mean) @ model.basis * model.scale
    return EmbeddingMatrix(out, stage=STAGE_WHITENED)


def unit_normalize(vectors, tolerance: float = 1e-12) -> EmbeddingMatrix:
    x = _as_array(vectors)
    norms = np.linalg.norm(x, axis=1)
    bad = np.nonzero(norms <= tolerance)[0]
    if bad.size:
        raise WhiteningError(f"zero-norm row at index {int(bad[0])}")
    return EmbeddingMatrix(x / norms[:, None], stage=STAGE_UNIT)
