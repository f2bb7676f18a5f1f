"""Shared fixtures for the embedder test suite."""

import os
import sys

import pytest

# keep model loading from touching the network during tests; a locally
# cached checkpoint still loads under this flag
os.environ.setdefault("HF_HUB_OFFLINE", "1")
os.environ.setdefault("TRANSFORMERS_OFFLINE", "1")

sys.path.insert(0, os.path.dirname(__file__))

from _fixtures import THREE_POSTS, write_posts_file  # noqa: E402


@pytest.fixture
def posts_file(tmp_path):
    return write_posts_file(tmp_path / "posts.jsonl", THREE_POSTS)
