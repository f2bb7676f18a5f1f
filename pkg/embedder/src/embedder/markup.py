"""Markup stripping: drop tags, decode entities, collapse whitespace.

Post content may arrive as HTML fragments. Encoders should see the text a
reader would, so stripping removes tags (including everything inside
``<script>`` and ``<style>``), decodes character references, and collapses
runs of whitespace to single spaces. Plain text passes through unchanged
apart from the whitespace collapse, which makes stripped and plain
variants of the same sentence encode identically.
"""

from __future__ import annotations

from html.parser import HTMLParser

_SKIP_CONTENT = frozenset({"script", "style"})

# tags that render as visual breaks; inline tags like <b> or <a> do not
# separate words, so only these contribute whitespace
_BLOCK_TAGS = frozenset({
    "address", "article", "aside", "blockquote", "br", "div", "dd", "dl",
    "dt", "fieldset", "figcaption", "figure", "footer", "form", "h1", "h2",
    "h3", "h4", "h5", "h6", "header", "hr", "li", "main", "nav", "ol", "p",
    "pre", "section", "table", "tbody", "td", "tfoot", "th", "thead", "tr",
    "ul",
})


class _TextExtractor(HTMLParser):
    def __init__(self) -> None:
        # convert_charrefs decodes &amp; and friends inside data chunks
        super().__init__(convert_charrefs=True)
        self._chunks: list[str] = []
        self._skip_depth = 0

    def _break(self, tag):
        if tag in _BLOCK_TAGS and not self._skip_depth:
            self._chunks.append("\n")

    def handle_starttag(self, tag, attrs):
        if tag in _SKIP_CONTENT:
            self._skip_depth += 1
        self._break(tag)

    def handle_endtag(self, tag):
        if tag in _SKIP_CONTENT and self._skip_depth:
            self._skip_depth -= 1
        self._break(tag)

    def handle_data(self, data):
        if not self._skip_depth:
            self._chunks.append(data)

    def text(self) -> str:
        return "".join(self._chunks)


def strip_markup(content: str) -> str:
    """Return the visible text of an HTML fragment, whitespace-collapsed."""
    parser = _TextExtractor()
    parser.feed(content)
    parser.close()
    return " ".join(parser.text().split())
