"""Serialize a selected subtree as an HTML fragment, plain text, or JSON."""

from __future__ import annotations

import enum
import html
import json

from .cnr import AnnotatedTree
from .dom import Element, Text, node_path

_VOID_TAGS = frozenset({
    "area", "base", "br", "col", "embed", "hr", "img", "input", "link",
    "meta", "param", "source", "track", "wbr",
})

_RAW_TEXT_TAGS = frozenset({"script", "style"})

# Elements whose boundaries separate text with a newline in plain-text output.
_BLOCK_TAGS = frozenset({
    "address", "article", "aside", "blockquote", "br", "caption", "dd",
    "details", "div", "dl", "dt", "fieldset", "figcaption", "figure",
    "footer", "form", "h1", "h2", "h3", "h4", "h5", "h6", "header", "hr",
    "li", "main", "menu", "nav", "ol", "p", "pre", "section", "summary",
    "table", "tbody", "td", "tfoot", "th", "thead", "tr", "ul",
})


class RenderFormat(enum.Enum):
    HTML_FRAGMENT = "html"
    PLAIN_TEXT = "text"
    JSON_REPORT = "json"


def render(atree: AnnotatedTree, n: int, format: RenderFormat) -> bytes:
    """Render the subtree rooted at n in the requested format, as UTF-8 bytes.

    HTML fragments round-trip tags and attributes, keeping non-content
    descendants (images and the like belong to their block). Plain text joins
    text nodes in document order with single newlines at block boundaries and
    omits text inside non-content elements. The JSON report bundles the node's
    annotation with both renderings.
    """
    atree.tree._check(n)
    if format is RenderFormat.HTML_FRAGMENT:
        return html_fragment(atree, n).encode("utf-8")
    if format is RenderFormat.PLAIN_TEXT:
        return plain_text(atree, n).encode("utf-8")
    tree = atree.tree
    ann = atree.annotation(n)
    kind = tree.kind(n)
    report = {
        "nodeId": n,
        "path": node_path(tree, n),
        "tag": kind.tag if isinstance(kind, Element) else "#text",
        "weight": ann.weight,
        "textLength": ann.text_length,
        "cnr": ann.cnr,
        "html": html_fragment(atree, n),
        "text": plain_text(atree, n),
    }
    return json.dumps(report, ensure_ascii=False, indent=2).encode("utf-8")


def html_fragment(atree: AnnotatedTree, n: int) -> str:
    tree = atree.tree
    out: list[str] = []
    # Explicit stack; a ("close", tag) entry emits the end tag after children.
    stack: list[tuple[str, object]] = [("node", n)]
    raw_depth = 0
    while stack:
        op, payload = stack.pop()
        if op == "close":
            tag = payload
            out.append(f"</{tag}>")
            if tag in _RAW_TEXT_TAGS:
                raw_depth -= 1
            continue
        kind = tree.kind(payload)
        if isinstance(kind, Text):
            if raw_depth:
                out.append(kind.content)
            else:
                out.append(html.escape(kind.content, quote=False))
            continue
        attrs = "".join(
            f' {name}="{html.escape(value, quote=True)}"'
            for name, value in kind.attributes.items()
        )
        kids = tree.children(payload)
        if kind.tag in _VOID_TAGS and not kids:
            out.append(f"<{kind.tag}{attrs}>")
            continue
        out.append(f"<{kind.tag}{attrs}>")
        if kind.tag in _RAW_TEXT_TAGS:
            raw_depth += 1
        stack.append(("close", kind.tag))
        for child in reversed(kids):
            stack.append(("node", child))
    return "".join(out)


def plain_text(atree: AnnotatedTree, n: int) -> str:
    tree = atree.tree
    non_content = atree.config.non_content_tags
    ancestor = tree.parent(n)
    while ancestor is not None:
        if tree.kind(ancestor).tag in non_content:
            return ""  # n's text is non-content text; matches its annotation
        ancestor = tree.parent(ancestor)
    parts: list[str] = []
    pending_break = False
    stack: list[tuple[str, object]] = [("node", n)]
    while stack:
        op, payload = stack.pop()
        if op == "break":
            if parts:
                pending_break = True
            continue
        kind = tree.kind(payload)
        if isinstance(kind, Text):
            if pending_break:
                parts.append("\n")
                pending_break = False
            parts.append(kind.content)
            continue
        is_block = kind.tag in _BLOCK_TAGS
        if is_block:
            stack.append(("break", None))
        if kind.tag not in non_content:
            for child in reversed(tree.children(payload)):
                stack.append(("node", child))
        if is_block:
            stack.append(("break", None))
    return "".join(parts)
