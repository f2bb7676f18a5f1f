"""Embedding file format: header + one float64 vector per post.

Two encodings share an identical UTF-8 header line so readers can sniff
the format from the first token:

    EMBBIN <count> <dim> <corpus_hash> [<model_id>]\n
    ... count*dim little-endian float64, row-major ...

    EMBTXT <count> <dim> <corpus_hash> [<model_id>]\n
    ... count lines of dim space-separated floats ...

``corpus_hash`` ties the vectors to the posts file they were computed
from: sha256 over ``id \\x00 content \\x00`` for each record in file
order (ids and raw, unstripped content, UTF-8).
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from pathlib import Path

import numpy as np

_MAGIC_BIN = "EMBBIN"
_MAGIC_TXT = "EMBTXT"


class EmbeddingFileError(ValueError):
    pass


@dataclass(frozen=True)
class EmbeddingHeader:
    count: int
    dim: int
    corpus_hash: str
    model_id: str | None = None


def corpus_content_hash(ids_and_texts) -> str:
    """sha256 linking an embedding file to the post corpus it encodes."""
    h = hashlib.sha256()
    for post_id, text in ids_and_texts:
        h.update(post_id.encode("utf-8"))
        h.update(b"\x00")
        h.update(text.encode("utf-8"))
        h.update(b"\x00")
    return h.hexdigest()


def _format_header(magic: str, header: EmbeddingHeader) -> bytes:
    fields = [magic, str(header.count), str(header.dim), header.corpus_hash]
    if header.model_id is not None:
        fields.append(header.model_id)
    return (" ".join(fields) + "\n").encode("utf-8")


def _parse_header(line: str) -> tuple[str, EmbeddingHeader]:
    fields = line.strip().split(" ")
    if len(fields) not in (4, 5) or fields[0] not in (_MAGIC_BIN, _MAGIC_TXT):
        raise EmbeddingFileError(f"not an embedding file header: {line[:60]!r}")
    try:
        count, dim = int(fields[1]), int(fields[2])
    except ValueError as exc:
        raise EmbeddingFileError(f"bad count/dim in header: {line!r}") from exc
    model = fields[4] if len(fields) == 5 else None
    return fields[0], EmbeddingHeader(count, dim, fields[3], model)


def write_embeddings(
    path,
    vectors: np.ndarray,
    corpus_hash: str,
    model_id: str | None = None,
    binary: bool = True,
) -> None:
    vectors = np.asarray(vectors, dtype=np.float64)
    if vectors.ndim != 2:
        raise EmbeddingFileError("vectors must be a 2-D array")
    header = EmbeddingHeader(vectors.shape[0], vectors.shape[1], corpus_hash, model_id)
    path = Path(path)
    if binary:
        with open(path, "wb") as fh:
            fh.write(_format_header(_MAGIC_BIN, header))
            fh.write(vectors.astype("<f8").tobytes(order="C"))
    else:
        with open(path, "wb") as fh:
            fh.write(_format_header(_MAGIC_TXT, header))
            for row in vectors:
                fh.write((" ".join(repr(float(v)) for v in row) + "\n").encode("utf-8"))


def read_header(path) -> EmbeddingHeader:
    with open(path, "rb") as fh:
        line = fh.readline().decode("utf-8", errors="replace")
    _, header = _parse_header(line)
    return header


def read_embeddings(path) -> tuple[EmbeddingHeader, np.ndarray]:
    path = Path(path)
    with open(path, "rb") as fh:
        magic, header = _parse_header(fh.readline().decode("utf-8", errors="replace"))
        if magic == _MAGIC_BIN:
            payload = fh.read()
            expected = header.count * header.dim * 8
            if len(payload) != expected:
                raise EmbeddingFileError(
                    f"{path}: payload is {len(payload)} bytes, "
                    f"header implies {expected}"
                )
            values = np.frombuffer(payload, dtype="<f8").reshape(
                header.count, header.dim
            )
            return header, np.ascontiguousarray(values, dtype=np.float64)
        rows = []
        for lineno, raw in enumerate(fh, start=2):
            text = raw.decode("utf-8").strip()
            if not text:
                continue
            try:
                row = np.array([float(v) for v in text.split()], dtype=np.float64)
            except ValueError as exc:
                raise EmbeddingFileError(f"{path}:{lineno}: bad float") from exc
            if row.size != header.dim:
                raise EmbeddingFileError(
                    f"{path}:{lineno}: expected {header.dim} values, got {row.size}"
                )
            rows.append(row)
        if len(rows) != header.count:
            raise EmbeddingFileError(
                f"{path}: {len(rows)} vectors, header says {header.count}"
            )
        values = np.vstack(rows) if rows else np.empty((0, header.dim))
        return header, values
