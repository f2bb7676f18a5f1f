"""Standalone adapter that turns a posts file into an embedding file.

The package speaks to the analysis pipeline only through files: it reads
the JSONL posts format and writes the header-plus-float64-rows embedding
format, so neither side imports the other.
"""

from embedder.core import EmbedJob, EmbedResult, embed_posts
from embedder.embfile import (
    EmbeddingFileError,
    EmbeddingHeader,
    VerifyReport,
    corpus_content_hash,
    read_embeddings,
    read_header,
    verify_embedding_file,
    write_embeddings,
)
from embedder.encoders import DEFAULT_MODEL, EncoderError, get_encoder
from embedder.markup import strip_markup
from embedder.posts import Post, PostsError, read_posts

__all__ = [
    "DEFAULT_MODEL",
    "EmbedJob",
    "EmbedResult",
    "EmbeddingFileError",
    "EmbeddingHeader",
    "EncoderError",
    "Post",
    "PostsError",
    "VerifyReport",
    "corpus_content_hash",
    "embed_posts",
    "get_encoder",
    "read_embeddings",
    "read_header",
    "read_posts",
    "strip_markup",
    "verify_embedding_file",
    "write_embeddings",
]

__version__ = "0.1.0"
