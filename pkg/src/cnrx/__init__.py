"""Main-content extraction for HTML documents via chars-nodes ratios.

Typical use:

    from cnrx import parse_html, compute_cnr, extract_main, render, RenderFormat

    tree = parse_html(html_bytes)
    atree = compute_cnr(tree)
    main = extract_main(atree)
    text = render(atree, main, RenderFormat.PLAIN_TEXT).decode()
"""

from . import errors
from .blocks import (
    BlockSet,
    MenuConfig,
    SelectionConfig,
    detect_menus,
    enumerate_blocks,
    expand,
    extract_main,
    identify_blocks,
    select_main_block,
    select_top_nodes,
    shrink,
)
from .cnr import AnnotatedTree, NodeAnnotation, cnr_of, compute_cnr, text_length
from .dom import (
    DEFAULT_NON_CONTENT_TAGS,
    ClassifierConfig,
    DomTree,
    Element,
    NodeClass,
    Text,
    build_tree,
    classify,
    node_path,
    parse_html,
    resolve_path,
)
from .evaluate import (
    CorpusResult,
    EvalReport,
    GoldAnnotation,
    f1_score,
    load_manifest,
    run_corpus,
    score,
)
from .render import RenderFormat, html_fragment, plain_text, render

__version__ = "0.1.0"

__all__ = [
    "AnnotatedTree",
    "BlockSet",
    "ClassifierConfig",
    "CorpusResult",
    "DEFAULT_NON_CONTENT_TAGS",
    "DomTree",
    "Element",
    "EvalReport",
    "GoldAnnotation",
    "MenuConfig",
    "NodeAnnotation",
    "NodeClass",
    "RenderFormat",
    "SelectionConfig",
    "Text",
    "build_tree",
    "classify",
    "cnr_of",
    "compute_cnr",
    "detect_menus",
    "enumerate_blocks",
    "errors",
    "expand",
    "extract_main",
    "f1_score",
    "html_fragment",
    "identify_blocks",
    "load_manifest",
    "node_path",
    "parse_html",
    "plain_text",
    "render",
    "resolve_path",
    "run_corpus",
    "score",
    "select_main_block",
    "select_top_nodes",
    "shrink",
    "text_length",
]
