"""Simplified DOM trees: tag nodes and text nodes parsed out of real-world HTML.

The tree is immutable once built. Node ids are assigned by document-order
preorder numbering, which makes every subtree a contiguous id interval and
keeps ancestor checks O(1).
"""

from __future__ import annotations

import codecs
import enum
import re
from dataclasses import dataclass, field
from html.parser import HTMLParser
from pathlib import Path

from .errors import ManifestError, UnknownNode

# Tags that never contribute countable text: no visible text (img, br, ...),
# navigation chrome (nav, a, form controls), or metadata (head, meta, ...).
DEFAULT_NON_CONTENT_TAGS = frozenset({
    "script", "style", "noscript", "template", "iframe", "object", "embed",
    "svg", "video", "audio", "canvas", "img", "picture", "source", "track",
    "map", "area", "br", "hr", "nav", "a", "button", "input", "select",
    "textarea", "form", "link", "meta", "head", "title", "base",
})

_VOID_TAGS = frozenset({
    "area", "base", "br", "col", "embed", "hr", "img", "input", "link",
    "meta", "param", "source", "track", "wbr",
})

_HEAD_TAGS = frozenset({
    "base", "link", "meta", "noscript", "script", "style", "template", "title",
})

# Start tags that implicitly close an open <p>.
_P_CLOSERS = frozenset({
    "address", "article", "aside", "blockquote", "details", "div", "dl",
    "fieldset", "figcaption", "figure", "footer", "form", "h1", "h2", "h3",
    "h4", "h5", "h6", "header", "hr", "main", "menu", "nav", "ol", "p",
    "pre", "section", "table", "ul",
})


@dataclass(frozen=True)
class ClassifierConfig:
    """Which element tags are treated as non-content during annotation."""

    non_content_tags: frozenset[str] = DEFAULT_NON_CONTENT_TAGS

    @classmethod
    def from_file(cls, path: str | Path) -> "ClassifierConfig":
        """Load a tag set from a plain-text file, one tag per line.

        Blank lines and lines starting with '#' are skipped; tags are
        lowercased.
        """
        tags = set()
        for line in Path(path).read_text(encoding="utf-8").splitlines():
            line = line.strip().lower()
            if line and not line.startswith("#"):
                tags.add(line)
        return cls(non_content_tags=frozenset(tags))


class NodeClass(enum.Enum):
    """Classification of a node for text counting."""

    TEXT = "text"
    NON_CONTENT = "non_content"
    CONTENT = "content"


@dataclass(frozen=True)
class Text:
    """A text node; always a leaf."""

    content: str


@dataclass(frozen=True)
class Element:
    """A tag node with its (lowercased) tag name and attributes as parsed."""

    tag: str
    attributes: dict[str, str] = field(default_factory=dict)


class DomTree:
    """Immutable document tree over dense preorder node ids.

    Invariants: exactly one root (id 0); children are in document order;
    text nodes are leaves; whitespace-only text nodes never exist.
    """

    __slots__ = ("_kinds", "_parents", "_children", "_sizes", "_depths")

    def __init__(
        self,
        kinds: list[Text | Element],
        parents: list[int | None],
        children: list[tuple[int, ...]],
    ):
        self._kinds = tuple(kinds)
        self._parents = tuple(parents)
        self._children = tuple(children)
        n = len(kinds)
        sizes = [1] * n
        depths = [0] * n
        for i in range(n - 1, 0, -1):
            sizes[parents[i]] += sizes[i]
        for i in range(1, n):
            depths[i] = depths[parents[i]] + 1
        self._sizes = tuple(sizes)
        self._depths = tuple(depths)

    @property
    def root(self) -> int:
        return 0

    @property
    def node_count(self) -> int:
        return len(self._kinds)

    def __len__(self) -> int:
        return len(self._kinds)

    def __repr__(self) -> str:
        return f"DomTree(nodes={len(self._kinds)})"

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, DomTree):
            return NotImplemented
        return (
            self._kinds == other._kinds
            and self._parents == other._parents
            and self._children == other._children
        )

    def __hash__(self):
        return hash((self._kinds, self._parents))

    def _check(self, n: int) -> int:
        if not isinstance(n, int) or isinstance(n, bool) or not 0 <= n < len(self._kinds):
            raise UnknownNode(f"node id {n!r} is not in this tree")
        return n

    def kind(self, n: int) -> Text | Element:
        return self._kinds[self._check(n)]

    def parent(self, n: int) -> int | None:
        return self._parents[self._check(n)]

    def children(self, n: int) -> tuple[int, ...]:
        return self._children[self._check(n)]

    def depth(self, n: int) -> int:
        return self._depths[self._check(n)]

    def subtree_size(self, n: int) -> int:
        return self._sizes[self._check(n)]

    def is_ancestor(self, a: int, b: int) -> bool:
        """True iff a == b or a is a proper ancestor of b (reflexive closure)."""
        self._check(a)
        self._check(b)
        # Preorder contiguity: a's subtree is exactly [a, a + size(a)).
        return a <= b < a + self._sizes[a]

    def subtree_nodes(self, n: int) -> set[int]:
        """All node ids in the subtree rooted at n, including n itself."""
        self._check(n)
        return set(range(n, n + self._sizes[n]))

    def tag(self, n: int) -> str | None:
        """Tag name for element nodes, None for text nodes."""
        k = self.kind(n)
        return k.tag if isinstance(k, Element) else None

    def text(self, n: int) -> str | None:
        """Text content for text nodes, None for element nodes."""
        k = self.kind(n)
        return k.content if isinstance(k, Text) else None


def classify(tree: DomTree, node: int, config: ClassifierConfig | None = None) -> NodeClass:
    """Classify one node: text, non-content element, or content element."""
    config = config or ClassifierConfig()
    kind = tree.kind(node)
    if isinstance(kind, Text):
        return NodeClass.TEXT
    if kind.tag in config.non_content_tags:
        return NodeClass.NON_CONTENT
    return NodeClass.CONTENT


# ---------------------------------------------------------------------------
# Parsing


class _BuildNode:
    __slots__ = ("tag", "attributes", "children")

    def __init__(self, tag, attributes=None):
        self.tag = tag
        self.attributes = attributes or {}
        self.children = []  # _BuildNode or str (text)


class _TreeBuilder(HTMLParser):
    """Recovering tree construction on top of the stdlib tokenizer.

    Implements the recovery rules this tool needs: implied html/head/body,
    void elements, auto-closing (p, li, dd/dt, table cells/rows, option),
    unmatched end tags skipped, comments/doctype/PIs dropped, and
    whitespace-only text runs discarded. script/style content arrives raw
    (stdlib CDATA mode) and is kept as the element's text.
    """

    def __init__(self):
        super().__init__(convert_charrefs=True)
        self.root = _BuildNode("html")
        self._head: _BuildNode | None = None
        self._body: _BuildNode | None = None
        self._stack: list[_BuildNode] = [self.root]
        self._text: list[str] = []

    # -- insertion helpers

    def _append_text(self, s: str):
        parent = self._stack[-1]
        if parent.children and isinstance(parent.children[-1], str):
            parent.children[-1] += s
        else:
            parent.children.append(s)

    def _flush_text(self):
        if not self._text:
            return
        data = "".join(self._text)
        self._text.clear()
        if data.strip() == "":
            return
        if len(self._stack) == 1:
            self._enter_body()
        self._append_text(data)

    def _enter_head(self):
        if self._head is None:
            self._head = _BuildNode("head")
            self.root.children.append(self._head)
        if self._head not in self._stack:
            self._stack.append(self._head)

    def _enter_body(self):
        # Leave head open elements behind if any.
        if self._head is not None and self._head in self._stack:
            del self._stack[self._stack.index(self._head):]
        if self._body is None:
            self._body = _BuildNode("body")
            self.root.children.append(self._body)
        if self._body not in self._stack:
            self._stack.append(self._body)

    def _close_in_scope(self, targets: frozenset[str], stops: frozenset[str]):
        for i in range(len(self._stack) - 1, 0, -1):
            tag = self._stack[i].tag
            if tag in targets:
                del self._stack[i:]
                return
            if tag in stops:
                return

    _LI_STOPS = frozenset({"ul", "ol", "menu", "body", "html"})
    _DL_STOPS = frozenset({"dl", "body", "html"})
    _CELL_STOPS = frozenset({"tr", "table", "body", "html"})
    _ROW_STOPS = frozenset({"table", "tbody", "thead", "tfoot", "body", "html"})
    _SECT_STOPS = frozenset({"table", "body", "html"})
    _P_STOPS = frozenset({"html", "body", "table", "td", "th", "caption", "template"})
    _OPT_STOPS = frozenset({"select", "body", "html"})

    def _close_implied(self, tag: str):
        if tag in _P_CLOSERS:
            self._close_in_scope(frozenset({"p"}), self._P_STOPS)
        if tag == "li":
            self._close_in_scope(frozenset({"li"}), self._LI_STOPS)
        elif tag in ("dd", "dt"):
            self._close_in_scope(frozenset({"dd", "dt"}), self._DL_STOPS)
        elif tag in ("td", "th"):
            self._close_in_scope(frozenset({"td", "th"}), self._CELL_STOPS)
        elif tag == "tr":
            self._close_in_scope(frozenset({"tr"}), self._ROW_STOPS)
        elif tag in ("tbody", "thead", "tfoot"):
            self._close_in_scope(frozenset({"tbody", "thead", "tfoot"}), self._SECT_STOPS)
        elif tag in ("option", "optgroup"):
            self._close_in_scope(frozenset({"option"}), self._OPT_STOPS)

    # -- tokenizer callbacks

    def handle_starttag(self, tag, attrs):
        self._flush_text()
        attributes = {}
        for name, value in attrs:
            if name not in attributes:
                attributes[name] = value if value is not None else ""

        if tag == "html":
            for k, v in attributes.items():
                self.root.attributes.setdefault(k, v)
            return
        if tag == "head":
            if self._head is None and self._body is None:
                self._enter_head()
                self._head.attributes.update(attributes)
            return
        if tag == "body":
            if self._body is not None:
                for k, v in self._body.attributes.items():
                    attributes.setdefault(k, v)
                self._body.attributes = attributes
            self._enter_body()
            if self._body.attributes == {} and attributes:
                self._body.attributes = attributes
            return

        in_head = self._head is not None and self._head in self._stack
        if in_head and tag not in _HEAD_TAGS:
            self._enter_body()
        elif len(self._stack) == 1:
            if tag in _HEAD_TAGS and self._body is None:
                self._enter_head()
            else:
                self._enter_body()

        self._close_implied(tag)
        node = _BuildNode(tag, attributes)
        self._stack[-1].children.append(node)
        if tag not in _VOID_TAGS:
            self._stack.append(node)

    def handle_endtag(self, tag):
        self._flush_text()
        if tag == "html" or tag == "body":
            del self._stack[1:]
            return
        if tag == "head":
            if self._head is not None and self._head in self._stack:
                del self._stack[self._stack.index(self._head):]
            return
        for i in range(len(self._stack) - 1, 0, -1):
            node = self._stack[i]
            if node.tag == tag:
                del self._stack[i:]
                return
            if node is self._body or node is self._head:
                return
        # No matching open element: ignore the stray end tag.

    def handle_startendtag(self, tag, attrs):
        self.handle_starttag(tag, attrs)
        if tag not in _VOID_TAGS and tag not in ("html", "head", "body"):
            self.handle_endtag(tag)

    def handle_data(self, data):
        if data:
            self._text.append(data)

    # Comments, doctype, and processing instructions are dropped.
    def handle_comment(self, data):
        self._flush_text()

    def handle_decl(self, decl):
        self._flush_text()

    def handle_pi(self, data):
        self._flush_text()

    def unknown_decl(self, data):
        self._flush_text()

    def finish(self) -> _BuildNode:
        self.close()
        self._flush_text()
        return self.root


_BOMS = (
    (codecs.BOM_UTF8, "utf-8"),
    (codecs.BOM_UTF32_LE, "utf-32-le"),
    (codecs.BOM_UTF32_BE, "utf-32-be"),
    (codecs.BOM_UTF16_LE, "utf-16-le"),
    (codecs.BOM_UTF16_BE, "utf-16-be"),
)


def _decode(data: bytes, encoding: str | None) -> str:
    for bom, bom_enc in _BOMS:
        if data.startswith(bom):
            return data[len(bom):].decode(bom_enc, errors="replace")
    if encoding is not None:
        try:
            return data.decode(encoding, errors="replace")
        except LookupError:
            pass
    return data.decode("utf-8", errors="replace")


def parse_html(data: bytes | str, *, encoding: str | None = None) -> DomTree:
    """Parse an HTML document (possibly malformed) into a DomTree.

    Bytes are decoded as UTF-8 with replacement unless `encoding` overrides
    it (a leading BOM always wins). Markup is repaired, never rejected.
    """
    if isinstance(data, bytes):
        text = _decode(data, encoding)
    else:
        text = data
    if text.startswith("﻿"):
        text = text[1:]
    builder = _TreeBuilder()
    builder.feed(text)
    return _flatten(builder.finish())


def _flatten(root: _BuildNode) -> DomTree:
    kinds: list[Text | Element] = []
    parents: list[int | None] = []
    children: list = []
    stack = [(root, None)]
    while stack:
        node, parent = stack.pop()
        nid = len(kinds)
        parents.append(parent)
        if parent is not None:
            children[parent].append(nid)
        if isinstance(node, str):
            kinds.append(Text(node))
            children.append(())
        else:
            kinds.append(Element(node.tag, node.attributes))
            children.append([])
            for child in reversed(node.children):
                stack.append((child, nid))
    children = [tuple(c) for c in children]
    return DomTree(kinds, parents, children)


def build_tree(spec) -> DomTree:
    """Build a DomTree from a nested literal structure (mainly for tests).

    An element is ("tag", {attrs}, [children]) or ("tag", [children]) or
    ("tag",); a text node is a plain string. Whitespace-only strings are
    dropped, matching the parser's behavior.
    """
    root = _build_node(spec)
    if isinstance(root, str):
        if root.strip() == "":
            raise ValueError("root text node must not be whitespace-only")
        return DomTree([Text(root)], [None], [()])
    if root is None:
        raise ValueError("root must not be whitespace-only")
    return _flatten(root)


def _build_node(spec) -> _BuildNode | str | None:
    if isinstance(spec, str):
        return spec if spec.strip() != "" else None
    if not isinstance(spec, tuple) or not spec or not isinstance(spec[0], str):
        raise ValueError(f"bad node spec: {spec!r}")
    tag = spec[0].lower()
    attrs: dict[str, str] = {}
    kids = []
    for part in spec[1:]:
        if isinstance(part, dict):
            attrs = {k.lower(): v for k, v in part.items()}
        elif isinstance(part, list):
            kids = part
        else:
            raise ValueError(f"bad node spec part: {part!r}")
    node = _BuildNode(tag, attrs)
    for kid in kids:
        built = _build_node(kid)
        if built is None:
            continue
        if isinstance(built, str) and node.children and isinstance(node.children[-1], str):
            node.children[-1] += built
        else:
            node.children.append(built)
    return node


# ---------------------------------------------------------------------------
# Node paths ("/0/1/2" with optional "tag#id" segments)


def node_path(tree: DomTree, n: int) -> str:
    """Slash-separated child-index path from the root to n ("/" for the root)."""
    tree._check(n)
    parts = []
    while True:
        parent = tree.parent(n)
        if parent is None:
            break
        parts.append(tree.children(parent).index(n))
        n = parent
    if not parts:
        return "/"
    return "/" + "/".join(str(i) for i in reversed(parts))


_SEGMENT_RE = re.compile(r"^([a-zA-Z][a-zA-Z0-9-]*)#(.+)$")


def resolve_path(tree: DomTree, path: str) -> int:
    """Resolve a node path to a node id.

    Segments are either child indexes ("/0/1/2") or "tag#id" pairs resolved
    by id attribute against the current node's subtree; a "tag#id" segment
    must match exactly one node. Raises ManifestError when unresolvable.
    """
    if not isinstance(path, str) or not path.startswith("/"):
        raise ManifestError(f"bad node path {path!r}: must start with '/'")
    current = tree.root
    for segment in path.strip("/").split("/"):
        if segment == "":
            continue
        if segment.isdigit():
            kids = tree.children(current)
            index = int(segment)
            if index >= len(kids):
                raise ManifestError(
                    f"path {path!r}: node {current} has no child {index}"
                )
            current = kids[index]
            continue
        m = _SEGMENT_RE.match(segment)
        if not m:
            raise ManifestError(f"bad path segment {segment!r} in {path!r}")
        tag, ident = m.group(1).lower(), m.group(2)
        matches = [
            i
            for i in range(current, current + tree.subtree_size(current))
            if isinstance(tree.kind(i), Element)
            and tree.kind(i).tag == tag
            and tree.kind(i).attributes.get("id") == ident
        ]
        if len(matches) != 1:
            raise ManifestError(
                f"path {path!r}: segment {segment!r} matched {len(matches)} nodes"
            )
        current = matches[0]
    return current
