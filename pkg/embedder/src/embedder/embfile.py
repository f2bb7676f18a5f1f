"""Embedding file format: one header line, then one float64 vector per post.

The first token of the header names the payload encoding; both variants
share the same UTF-8 header fields:

    EMBBIN <count> <dim> <corpus_hash> [<model_id>]\n
    ... count*dim little-endian float64 values, row-major ...

    EMBTXT <count> <dim> <corpus_hash> [<model_id>]\n
    ... count lines, each dim space-separated floats ...

``corpus_hash`` is sha256 over ``id \\x00 content \\x00`` per post in
file order (UTF-8, raw content before any markup stripping), so a reader
can prove the vectors belong to the posts file sitting next to them.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable

import numpy as np

from embedder.posts import PostsError, read_posts

MAGIC_BINARY = "EMBBIN"
MAGIC_TEXT = "EMBTXT"
_MAX_LISTED_BAD_ROWS = 10


class EmbeddingFileError(ValueError):
    pass


@dataclass(frozen=True)
class EmbeddingHeader:
    count: int
    dim: int
    corpus_hash: str
    model_id: str | None = None


@dataclass(frozen=True)
class VerifyReport:
    """Outcome of checking an embedding file against its posts file."""

    path: str
    header: EmbeddingHeader | None
    problems: tuple[str, ...]

    @property
    def ok(self) -> bool:
        return not self.problems

    def lines(self) -> list[str]:
        if self.ok:
            assert self.header is not None
            return [
                f"ok: {self.path} ({self.header.count} vectors, "
                f"dim {self.header.dim})"
            ]
        return [f"problem: {p}" for p in self.problems]


def corpus_content_hash(ids_and_contents: Iterable[tuple[str, str]]) -> str:
    """sha256 binding an embedding file to the corpus it was computed from."""
    digest = hashlib.sha256()
    for post_id, content in ids_and_contents:
        digest.update(post_id.encode("utf-8"))
        digest.update(b"\x00")
        digest.update(content.encode("utf-8"))
        digest.update(b"\x00")
    return digest.hexdigest()


def _header_bytes(magic: str, header: EmbeddingHeader) -> bytes:
    parts = [magic, str(header.count), str(header.dim), header.corpus_hash]
    if header.model_id is not None:
        parts.append(header.model_id)
    return (" ".join(parts) + "\n").encode("utf-8")


def _parse_header_line(line: str) -> tuple[str, EmbeddingHeader]:
    parts = line.strip().split(" ")
    if len(parts) not in (4, 5) or parts[0] not in (MAGIC_BINARY, MAGIC_TEXT):
        raise EmbeddingFileError(f"not an embedding file header: {line[:60]!r}")
    try:
        count, dim = int(parts[1]), int(parts[2])
    except ValueError as exc:
        raise EmbeddingFileError(f"bad count/dim in header: {line!r}") from exc
    if count < 0 or dim < 1:
        raise EmbeddingFileError(f"bad count/dim in header: {line!r}")
    model = parts[4] if len(parts) == 5 else None
    return parts[0], EmbeddingHeader(count, dim, parts[3], model)


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
    magic = MAGIC_BINARY if binary else MAGIC_TEXT
    with open(Path(path), "wb") as fh:
        fh.write(_header_bytes(magic, header))
        if binary:
            fh.write(vectors.astype("<f8").tobytes(order="C"))
        else:
            for row in vectors:
                line = " ".join(repr(float(v)) for v in row)
                fh.write((line + "\n").encode("utf-8"))


def read_header(path) -> EmbeddingHeader:
    with open(path, "rb") as fh:
        first = fh.readline().decode("utf-8", errors="replace")
    return _parse_header_line(first)[1]


def read_embeddings(path) -> tuple[EmbeddingHeader, np.ndarray]:
    """Strict reader: raises EmbeddingFileError on any structural defect."""
    path = Path(path)
    with open(path, "rb") as fh:
        magic, header = _parse_header_line(
            fh.readline().decode("utf-8", errors="replace")
        )
        if magic == MAGIC_BINARY:
            payload = fh.read()
            expected = header.count * header.dim * 8
            if len(payload) != expected:
                raise EmbeddingFileError(
                    f"{path}: payload is {len(payload)} bytes, header implies {expected}"
                )
            values = np.frombuffer(payload, dtype="<f8")
            return header, values.reshape(header.count, header.dim).copy()
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
                    f"{path}:{lineno}: {row.size} values, expected {header.dim}"
                )
            rows.append(row)
        if len(rows) != header.count:
            raise EmbeddingFileError(
                f"{path}: {len(rows)} vectors, header says {header.count}"
            )
        values = np.vstack(rows) if rows else np.empty((0, header.dim))
        return header, values


def _collect_vectors(path: Path, problems: list[str]):
    """Lenient read for verification: returns (header, rows or None)."""
    with open(path, "rb") as fh:
        first = fh.readline().decode("utf-8", errors="replace")
        try:
            magic, header = _parse_header_line(first)
        except EmbeddingFileError as exc:
            problems.append(str(exc))
            return None, None
        if magic == MAGIC_BINARY:
            payload = fh.read()
            row_bytes = header.dim * 8
            full_rows, leftover = divmod(len(payload), row_bytes)
            if full_rows != header.count:
                problems.append(
                    f"count mismatch: header says {header.count} vectors, "
                    f"payload holds {full_rows} complete rows"
                )
            if leftover:
                problems.append(
                    f"payload has {leftover} trailing bytes beyond the last "
                    f"complete row (dim {header.dim})"
                )
            values = np.frombuffer(
                payload[: full_rows * row_bytes], dtype="<f8"
            ).reshape(full_rows, header.dim)
            return header, values
        rows = []
        for lineno, raw in enumerate(fh, start=2):
            text = raw.decode("utf-8", errors="replace").strip()
            if not text:
                continue
            try:
                row = np.array([float(v) for v in text.split()], dtype=np.float64)
            except ValueError:
                problems.append(f"line {lineno}: unparseable vector row")
                continue
            if row.size != header.dim:
                problems.append(
                    f"line {lineno}: {row.size} values, expected dim {header.dim}"
                )
                continue
            rows.append(row)
        if len(rows) != header.count:
            problems.append(
                f"count mismatch: header says {header.count} vectors, "
                f"file holds {len(rows)} readable rows"
            )
        values = np.vstack(rows) if rows else np.empty((0, header.dim))
        return header, values


def verify_embedding_file(path, posts_path) -> VerifyReport:
    """Check count, dimension, corpus hash, and finiteness; itemize failures."""
    path = Path(path)
    problems: list[str] = []
    if not path.exists():
        return VerifyReport(str(path), None, (f"missing embedding file {path}",))
    header, vectors = _collect_vectors(path, problems)
    posts = None
    try:
        posts = read_posts(posts_path)
    except OSError as exc:
        problems.append(f"posts file unreadable: {exc}")
    except PostsError as exc:
        problems.append(f"posts file invalid: {exc}")
    if header is not None and posts is not None:
        if header.count != len(posts):
            problems.append(
                f"count mismatch: header says {header.count} vectors, "
                f"posts file has {len(posts)} posts"
            )
        expected_hash = corpus_content_hash((p.id, p.content) for p in posts)
        if header.corpus_hash != expected_hash:
            problems.append(
                "corpus hash mismatch: header carries "
                f"{header.corpus_hash[:12]}..., posts file hashes to "
                f"{expected_hash[:12]}..."
            )
    if vectors is not None and vectors.size:
        bad_rows = np.flatnonzero(~np.isfinite(vectors).all(axis=1))
        for k in bad_rows[:_MAX_LISTED_BAD_ROWS]:
            problems.append(f"non-finite at row {int(k)}")
        if bad_rows.size > _MAX_LISTED_BAD_ROWS:
            extra = bad_rows.size - _MAX_LISTED_BAD_ROWS
            problems.append(f"... and {extra} more rows with non-finite values")
    return VerifyReport(str(path), header, tuple(problems))
