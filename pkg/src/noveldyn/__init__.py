"""Daily distributional novelty of an embedded text corpus and its dynamic
response to media-attention exposure series."""

__version__ = "0.1.0"
