"""Posts file reader: one JSON record per line, kept in file order.

Each record carries ``id``, ``created_at`` (ISO-8601 with a UTC offset),
and ``content`` (markup allowed; stripping is the embedder's job, not the
reader's). File order matters because the embedding file pairs row ``k``
with the ``k``-th post, so the reader never sorts.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from datetime import datetime
from pathlib import Path


class PostsError(ValueError):
    pass


@dataclass(frozen=True)
class Post:
    id: str
    created_at: str
    content: str


def _check_timestamp(value: str, where: str) -> None:
    text = value[:-1] + "+00:00" if value.endswith(("Z", "z")) else value
    try:
        parsed = datetime.fromisoformat(text)
    except ValueError as exc:
        raise PostsError(f"{where}: bad created_at {value!r}") from exc
    if parsed.tzinfo is None:
        raise PostsError(f"{where}: created_at {value!r} lacks a UTC offset")


def read_posts(path) -> list[Post]:
    """Parse a JSONL posts file, validating fields and id uniqueness."""
    path = Path(path)
    posts: list[Post] = []
    seen: set[str] = set()
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line:
                continue
            where = f"{path}:{lineno}"
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise PostsError(f"{where}: not valid JSON") from exc
            if not isinstance(record, dict):
                raise PostsError(f"{where}: record is not an object")
            for key in ("id", "created_at", "content"):
                if not isinstance(record.get(key), str):
                    raise PostsError(f"{where}: missing or non-string {key!r}")
            post_id = record["id"]
            if post_id in seen:
                raise PostsError(f"{where}: duplicate post id {post_id!r}")
            seen.add(post_id)
            _check_timestamp(record["created_at"], where)
            posts.append(Post(post_id, record["created_at"], record["content"]))
    return posts
