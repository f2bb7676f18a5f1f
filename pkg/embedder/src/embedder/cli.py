"""Command line front end.

    embedder embed --in posts.jsonl --out embeddings.bin [--model ID]
                   [--batch-size N] [--text] [--keep-markup]
    embedder verify --embeddings embeddings.bin --posts posts.jsonl

``embed`` exits nonzero on any input or encoder failure; ``verify`` exits
nonzero when the embedding file does not match its posts file, printing
one line per problem.
"""

from __future__ import annotations

import argparse
import sys

from embedder.core import EmbedJob, embed_posts
from embedder.embfile import EmbeddingFileError, verify_embedding_file
from embedder.encoders import DEFAULT_MODEL, EncoderError
from embedder.posts import PostsError


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="embedder",
        description="Embed a posts file into the pipeline's embedding format",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    embed = sub.add_parser("embed", help="encode posts into an embedding file")
    embed.add_argument("--in", dest="posts", required=True, metavar="POSTS",
                       help="posts file (JSONL: id, created_at, content)")
    embed.add_argument("--out", dest="output", required=True, metavar="EMB",
                       help="embedding file to write")
    embed.add_argument("--model", default=DEFAULT_MODEL,
                       help=f"encoder model id (default {DEFAULT_MODEL})")
    embed.add_argument("--batch-size", type=int, default=32)
    embed.add_argument("--text", action="store_true",
                       help="write the delimited-text encoding instead of binary")
    embed.add_argument("--keep-markup", action="store_true",
                       help="encode raw content without stripping markup")

    verify = sub.add_parser("verify", help="check an embedding file against posts")
    verify.add_argument("--embeddings", required=True, metavar="EMB")
    verify.add_argument("--posts", required=True, metavar="POSTS")
    return parser


def _run_embed(args) -> int:
    job = EmbedJob(
        posts_path=args.posts,
        output_path=args.output,
        model_id=args.model,
        batch_size=args.batch_size,
        strip_markup=not args.keep_markup,
        binary=not args.text,
    )
    result = embed_posts(job)
    print(
        f"[embed] wrote {result.output_path} "
        f"({result.header.count} vectors, dim {result.header.dim}, "
        f"model {result.header.model_id})"
    )
    for warning in result.warnings:
        print(f"[embed] warning: post {warning.post_id!r} {warning.reason}")
    return 0


def _run_verify(args) -> int:
    report = verify_embedding_file(args.embeddings, args.posts)
    for line in report.lines():
        print(line)
    return 0 if report.ok else 1


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "embed":
            return _run_embed(args)
        return _run_verify(args)
    except (PostsError, EncoderError, EmbeddingFileError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
