"""Embedding jobs: posts file in, embedding file plus warnings sidecar out.

The job reads posts in file order, strips markup (unless told not to),
encodes every post, and writes the vectors under a header that ties them
to the corpus hash of the raw posts. Posts whose text is empty once the
markup is gone are still encoded (as the empty string) so row k always
matches post k, but their ids land in the sidecar warnings list.

The sidecar ``<output>.warnings.json`` is written on every run. Besides
warnings it records the model id and the encoder's input-truncation
limit, because the header format has no field for truncation behavior.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from embedder.embfile import EmbeddingHeader, corpus_content_hash, write_embeddings
from embedder.encoders import DEFAULT_MODEL, get_encoder
from embedder.markup import strip_markup
from embedder.posts import read_posts


@dataclass(frozen=True)
class EmbedJob:
    """What to embed and how."""

    posts_path: Path
    output_path: Path
    model_id: str = DEFAULT_MODEL
    batch_size: int = 32
    strip_markup: bool = True
    binary: bool = True

    def __post_init__(self):
        if self.batch_size < 1:
            raise ValueError(f"batch_size must be >= 1, got {self.batch_size}")
        object.__setattr__(self, "posts_path", Path(self.posts_path))
        object.__setattr__(self, "output_path", Path(self.output_path))


@dataclass(frozen=True)
class EmbedWarning:
    row: int
    post_id: str
    reason: str


@dataclass(frozen=True)
class EmbedResult:
    output_path: Path
    sidecar_path: Path
    header: EmbeddingHeader
    warnings: tuple[EmbedWarning, ...] = field(default=())


def sidecar_path_for(output_path) -> Path:
    return Path(f"{output_path}.warnings.json")


def embed_posts(job: EmbedJob) -> EmbedResult:
    """Run one embedding job and return what was written."""
    posts = read_posts(job.posts_path)
    encoder = get_encoder(job.model_id)

    texts = []
    warnings: list[EmbedWarning] = []
    for row, post in enumerate(posts):
        text = strip_markup(post.content) if job.strip_markup else post.content
        if not text:
            warnings.append(
                EmbedWarning(row, post.id, "empty text after markup stripping")
            )
        texts.append(text)

    if texts:
        vectors = encoder.encode(texts, batch_size=job.batch_size)
    else:
        vectors = np.empty((0, encoder.dim), dtype=np.float64)
    if vectors.shape != (len(posts), encoder.dim):
        raise RuntimeError(
            f"encoder returned shape {vectors.shape}, "
            f"expected {(len(posts), encoder.dim)}"
        )

    # the hash covers raw content so it matches what the posts file holds
    corpus_hash = corpus_content_hash((p.id, p.content) for p in posts)
    write_embeddings(
        job.output_path, vectors, corpus_hash, encoder.model_id, binary=job.binary
    )

    sidecar = sidecar_path_for(job.output_path)
    payload = {
        "model_id": encoder.model_id,
        "truncation_limit_tokens": getattr(encoder, "truncation", None),
        "warnings": [
            {"row": w.row, "id": w.post_id, "reason": w.reason} for w in warnings
        ],
    }
    sidecar.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")

    header = EmbeddingHeader(
        len(posts), encoder.dim, corpus_hash, encoder.model_id
    )
    return EmbedResult(job.output_path, sidecar, header, tuple(warnings))
