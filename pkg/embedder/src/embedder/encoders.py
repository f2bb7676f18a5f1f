"""Text encoders, selected by model id string.

Two families:

* ``sentence-transformers/...`` (or any other id) loads a SentenceTransformer
  checkpoint; the default is the 384-dimensional MiniLM sentence encoder.
* ``hashing:<dim>`` is a dependency-free deterministic fallback: every
  token maps to a fixed Gaussian vector seeded from its sha256 digest and
  a text encodes to the mean of its token vectors. It carries no semantics
  beyond bag-of-tokens identity, but it is reproducible across machines
  and needs no downloads, which makes it the right backend for tests and
  air-gapped runs.

Encoder output is written to the embedding file as-is; no normalization
happens here.
"""

from __future__ import annotations

from typing import Protocol, Sequence

import hashlib

import numpy as np

DEFAULT_MODEL = "sentence-transformers/all-MiniLM-L6-v2"
_HASHING_PREFIX = "hashing:"


class EncoderError(RuntimeError):
    pass


class Encoder(Protocol):
    model_id: str
    dim: int

    def encode(self, texts: Sequence[str], batch_size: int = 32) -> np.ndarray: ...


class HashingEncoder:
    """Deterministic bag-of-tokens encoder: mean of sha256-seeded Gaussians."""

    def __init__(self, dim: int) -> None:
        if dim < 1:
            raise EncoderError(f"hashing encoder needs dim >= 1, got {dim}")
        self.dim = int(dim)
        self.model_id = f"{_HASHING_PREFIX}{self.dim}"
        self.truncation: int | None = None  # whole-text encoder, nothing dropped
        self._token_cache: dict[str, np.ndarray] = {}

    def _token_vector(self, token: str) -> np.ndarray:
        cached = self._token_cache.get(token)
        if cached is None:
            digest = hashlib.sha256(token.encode("utf-8")).digest()
            seed = int.from_bytes(digest[:8], "little")
            cached = np.random.default_rng(seed).standard_normal(self.dim)
            self._token_cache[token] = cached
        return cached

    def encode(self, texts: Sequence[str], batch_size: int = 32) -> np.ndarray:
        out = np.empty((len(texts), self.dim), dtype=np.float64)
        for i, text in enumerate(texts):
            # empty text still gets a fixed vector (the empty-token Gaussian);
            # summing in sorted order keeps the bag-of-tokens mean exact
            # under token reordering despite float non-associativity
            tokens = text.split() or [""]
            acc = np.zeros(self.dim, dtype=np.float64)
            for token in sorted(tokens):
                acc += self._token_vector(token)
            out[i] = acc / len(tokens)
        return out


class SentenceTransformerEncoder:
    """Wrapper around a SentenceTransformer checkpoint, inference-only."""

    def __init__(self, model_id: str) -> None:
        try:
            from sentence_transformers import SentenceTransformer
        except ImportError as exc:
            raise EncoderError(
                f"model {model_id!r} needs the sentence-transformers package"
            ) from exc
        try:
            model = SentenceTransformer(model_id, device="cpu")
        except Exception as exc:
            raise EncoderError(f"could not load model {model_id!r}: {exc}") from exc
        model.eval()
        self._model = model
        self.model_id = model_id
        self.dim = int(model.get_sentence_embedding_dimension())
        limit = getattr(model, "max_seq_length", None)
        self.truncation: int | None = int(limit) if limit else None

    def encode(self, texts: Sequence[str], batch_size: int = 32) -> np.ndarray:
        vectors = self._model.encode(
            list(texts),
            batch_size=batch_size,
            convert_to_numpy=True,
            normalize_embeddings=False,
            show_progress_bar=False,
        )
        return np.asarray(vectors, dtype=np.float64).reshape(len(texts), self.dim)


def get_encoder(model_id: str = DEFAULT_MODEL) -> Encoder:
    """Build the encoder named by ``model_id``."""
    if model_id.startswith(_HASHING_PREFIX):
        spec = model_id[len(_HASHING_PREFIX):]
        try:
            dim = int(spec)
        except ValueError as exc:
            raise EncoderError(f"bad hashing encoder id {model_id!r}") from exc
        return HashingEncoder(dim)
    return SentenceTransformerEncoder(model_id)
