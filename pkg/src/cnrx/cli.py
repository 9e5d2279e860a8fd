"""Command-line interface: extract, annotate, blocks, eval, and menus.

Exit codes: 0 success, 1 usage error, 2 extraction failure (no content),
3 fetch/IO failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import re
import sys
from pathlib import Path
from urllib.parse import urlsplit

from . import blocks as blocks_mod
from .cnr import compute_cnr
from .dom import ClassifierConfig, Element, node_path, parse_html
from .errors import CnrxError, EmptyDocument, ManifestError
from .evaluate import report_to_dict, run_corpus
from .render import RenderFormat, render

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_NO_CONTENT = 2
EXIT_IO = 3

NON_CONTENT_TAGS_ENV = "CNR_NONCONTENT_TAGS"

_META_CHARSET_RE = re.compile(
    rb"""<meta[^>]+charset\s*=\s*["']?([a-zA-Z0-9_.:-]+)""", re.IGNORECASE
)


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with status 2 on bad usage; this tool reserves 2 for
    # extraction failures, so remap through an exception.
    def error(self, message):
        raise _UsageError(f"{self.prog}: error: {message}")


def _build_parser() -> _Parser:
    parser = _Parser(prog="cnrx", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, with_input=True):
        if with_input:
            p.add_argument(
                "input",
                help="file path, http(s) URL, or '-' for standard input",
            )
        p.add_argument("--noncontent-tags", metavar="FILE", default=None,
                       help="file with one non-content tag per line")
        p.add_argument("--out", metavar="FILE", default=None,
                       help="write output to FILE instead of stdout")
        p.add_argument("--timeout", metavar="SECS", type=float, default=30.0,
                       help="fetch timeout for URL inputs (default 30)")

    def add_selection(p):
        p.add_argument("--quantile", type=float, default=0.90,
                       help="CNR quantile for candidate selection (default 0.90)")
        p.add_argument("--min-candidates", type=int, default=3,
                       help="minimum number of candidate nodes (default 3)")

    p_extract = sub.add_parser("extract", help="extract the main content block")
    add_common(p_extract)
    add_selection(p_extract)
    p_extract.add_argument("--format", choices=["html", "text", "json"],
                           default="html", help="output format (default html)")
    p_extract.add_argument("--expand", type=int, default=0, metavar="N",
                           help="widen the extracted node N parent steps")
    p_extract.add_argument("--shrink", type=int, default=0, metavar="N",
                           help="narrow the extracted node N highest-CNR-child steps")

    p_annotate = sub.add_parser("annotate", help="dump per-node CNR annotations")
    add_common(p_annotate)

    p_blocks = sub.add_parser("blocks", help="list detected content blocks")
    add_common(p_blocks)
    add_selection(p_blocks)
    p_blocks.add_argument("--k", type=int, default=0, metavar="N",
                          help="enumerate the top N blocks iteratively")

    p_eval = sub.add_parser("eval", help="score extraction against a gold corpus")
    p_eval.add_argument("corpus", help="directory with documents and gold.json")
    add_common(p_eval, with_input=False)
    add_selection(p_eval)
    p_eval.add_argument("--csv", action="store_true",
                        help="emit CSV instead of JSON lines")

    p_menus = sub.add_parser("menus", help="detect link concentrations (experimental)")
    add_common(p_menus)

    return parser


def _fetch(url: str, timeout: float) -> tuple[bytes, str | None]:
    import requests

    session = requests.Session()
    session.max_redirects = 5
    try:
        response = session.get(url, timeout=timeout, allow_redirects=True)
        response.raise_for_status()
    except requests.RequestException as exc:
        raise OSError(f"fetch failed: {exc}") from exc
    charset = None
    content_type = response.headers.get("content-type", "")
    m = re.search(r"charset=([^;\s]+)", content_type, re.IGNORECASE)
    if m:
        charset = m.group(1).strip("\"'")
    else:
        meta = _META_CHARSET_RE.search(response.content[:2048])
        if meta:
            charset = meta.group(1).decode("ascii", errors="replace")
    return response.content, charset


def _read_input(source: str, timeout: float) -> tuple[bytes, str | None]:
    if urlsplit(source).scheme in ("http", "https"):
        return _fetch(source, timeout)
    if source == "-":
        return sys.stdin.buffer.read(), None
    return Path(source).read_bytes(), None


def _classifier(args, env) -> ClassifierConfig:
    path = args.noncontent_tags or env.get(NON_CONTENT_TAGS_ENV)
    if path:
        return ClassifierConfig.from_file(path)
    return ClassifierConfig()


def _node_stats(atree, n) -> dict:
    kind = atree.tree.kind(n)
    ann = atree.annotation(n)
    return {
        "nodeId": n,
        "path": node_path(atree.tree, n),
        "tag": kind.tag if isinstance(kind, Element) else "#text",
        "weight": ann.weight,
        "textLength": ann.text_length,
        "cnr": ann.cnr,
    }


def run(argv=None, env=None, stdout=None, stderr=None) -> int:
    """Run the CLI and return its exit status."""
    env = env if env is not None else os.environ
    stderr = stderr or sys.stderr
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        if getattr(args, "expand", 0) and getattr(args, "shrink", 0):
            raise _UsageError("cnrx: error: --expand and --shrink are mutually exclusive")
        if getattr(args, "expand", 0) < 0 or getattr(args, "shrink", 0) < 0:
            raise _UsageError("cnrx: error: --expand/--shrink must be >= 0")
    except _UsageError as exc:
        print(str(exc), file=stderr)
        return EXIT_USAGE

    try:
        classifier = _classifier(args, env)
    except OSError as exc:
        print(f"cnrx: cannot read tag file: {exc}", file=stderr)
        return EXIT_IO

    try:
        output = _dispatch(args, classifier)
    except _UsageError as exc:
        print(str(exc), file=stderr)
        return EXIT_USAGE
    except EmptyDocument as exc:
        print(f"cnrx: {exc}", file=stderr)
        return EXIT_NO_CONTENT
    except ManifestError as exc:
        print(f"cnrx: {exc}", file=stderr)
        return EXIT_IO
    except CnrxError as exc:
        print(f"cnrx: {exc}", file=stderr)
        return EXIT_NO_CONTENT
    except OSError as exc:
        print(f"cnrx: {exc}", file=stderr)
        return EXIT_IO

    try:
        if args.out:
            Path(args.out).write_bytes(output)
        else:
            out = stdout if stdout is not None else sys.stdout.buffer
            out.write(output)
            out.flush()
    except OSError as exc:
        print(f"cnrx: cannot write output: {exc}", file=stderr)
        return EXIT_IO
    return EXIT_OK


def _selection(args) -> blocks_mod.SelectionConfig:
    try:
        return blocks_mod.SelectionConfig(
            quantile=args.quantile, min_candidates=args.min_candidates
        )
    except ValueError as exc:
        raise _UsageError(f"cnrx: error: {exc}") from exc


def _dispatch(args, classifier: ClassifierConfig) -> bytes:
    if args.command == "eval":
        return _run_eval(args, classifier)

    data, charset = _read_input(args.input, args.timeout)
    tree = parse_html(data, encoding=charset)
    atree = compute_cnr(tree, classifier)

    if args.command == "extract":
        node = blocks_mod.extract_main(atree, _selection(args))
        for _ in range(args.expand):
            node = blocks_mod.expand(atree, node)
        for _ in range(args.shrink):
            node = blocks_mod.shrink(atree, node)
        fmt = RenderFormat(args.format)
        out = render(atree, node, fmt)
        if fmt is not RenderFormat.HTML_FRAGMENT and not out.endswith(b"\n"):
            out += b"\n"
        return out

    if args.command == "annotate":
        stats = [_node_stats(atree, n) for n in range(tree.node_count)]
        return (json.dumps(stats, ensure_ascii=False, indent=1) + "\n").encode("utf-8")

    if args.command == "blocks":
        if args.k:
            ranked = blocks_mod.enumerate_blocks(atree, _selection(args), args.k)
            payload = {"blocks": [_node_stats(atree, n) for n in ranked]}
        else:
            found = blocks_mod.identify_blocks(
                atree, blocks_mod.select_top_nodes(atree, _selection(args))
            )
            main = blocks_mod.select_main_block(atree, found)
            payload = {
                "main": main,
                "blocks": [_node_stats(atree, n) for n in sorted(found)],
            }
        return (json.dumps(payload, ensure_ascii=False, indent=1) + "\n").encode("utf-8")

    if args.command == "menus":
        found = blocks_mod.detect_menus(atree)
        payload = {"menus": [_node_stats(atree, n) for n in sorted(found)]}
        return (json.dumps(payload, ensure_ascii=False, indent=1) + "\n").encode("utf-8")

    raise AssertionError(f"unhandled command {args.command}")


def _run_eval(args, classifier: ClassifierConfig) -> bytes:
    result = run_corpus(args.corpus, _selection(args), classifier)
    if args.csv:
        buf = io.StringIO()
        writer = csv.writer(buf)
        writer.writerow(
            ["document", "dom_nodes", "main_block_nodes", "recall", "precision", "f1"]
        )
        for r in result.reports:
            writer.writerow(
                [r.document_id, r.dom_nodes, r.main_block_nodes,
                 f"{r.recall:.4f}", f"{r.precision:.4f}", f"{r.f1:.4f}"]
            )
        writer.writerow(
            ["mean", "", "", f"{result.mean_recall:.4f}",
             f"{result.mean_precision:.4f}", f"{result.mean_f1:.4f}"]
        )
        return buf.getvalue().encode("utf-8")
    lines = [json.dumps(report_to_dict(r), ensure_ascii=False) for r in result.reports]
    lines.append(json.dumps({
        "meanRecall": result.mean_recall,
        "meanPrecision": result.mean_precision,
        "meanF1": result.mean_f1,
        "documents": len(result.reports),
        "failures": [{"documentId": d, "error": m} for d, m in result.failures],
    }, ensure_ascii=False))
    return ("\n".join(lines) + "\n").encode("utf-8")


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
