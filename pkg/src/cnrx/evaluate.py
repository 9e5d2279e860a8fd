"""Score extraction against gold annotations with node-level recall/precision/F1.

A corpus is a directory of HTML documents plus a gold.json manifest mapping
each document id (file name) to the node path of its gold main block.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from .blocks import SelectionConfig, extract_main
from .cnr import compute_cnr
from .dom import ClassifierConfig, DomTree, parse_html, resolve_path
from .errors import CnrxError, ManifestError

GOLD_MANIFEST_NAME = "gold.json"


@dataclass(frozen=True)
class GoldAnnotation:
    document_id: str
    gold_path: str


@dataclass(frozen=True)
class EvalReport:
    document_id: str
    dom_nodes: int
    main_block_nodes: int
    recall: float
    precision: float
    f1: float


@dataclass(frozen=True)
class CorpusResult:
    reports: tuple[EvalReport, ...]
    mean_recall: float
    mean_precision: float
    mean_f1: float
    failures: tuple[tuple[str, str], ...]  # (document_id, message)


def f1_score(precision: float, recall: float) -> float:
    """Harmonic mean 2PR/(P+R), defined as 0 when both inputs are 0."""
    if precision + recall == 0:
        return 0.0
    return (2 * precision * recall) / (precision + recall)


def score(tree: DomTree, retrieved: int, gold: int, document_id: str = "") -> EvalReport:
    """Node-set recall/precision/F1 of a retrieved block against the gold block.

    Both sides count whole subtrees (non-content descendants included).
    """
    retrieved_set = tree.subtree_nodes(retrieved)
    gold_set = tree.subtree_nodes(gold)
    relevant_retrieved = len(retrieved_set & gold_set)
    recall = relevant_retrieved / len(gold_set)
    precision = relevant_retrieved / len(retrieved_set)
    return EvalReport(
        document_id=document_id,
        dom_nodes=tree.node_count,
        main_block_nodes=len(retrieved_set),
        recall=recall,
        precision=precision,
        f1=f1_score(precision, recall),
    )


def load_manifest(corpus_dir: str | Path) -> list[GoldAnnotation]:
    """Read gold.json and return annotations sorted by document id."""
    manifest_path = Path(corpus_dir) / GOLD_MANIFEST_NAME
    try:
        raw = json.loads(manifest_path.read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise ManifestError(f"no {GOLD_MANIFEST_NAME} in {corpus_dir}") from None
    except (OSError, json.JSONDecodeError) as exc:
        raise ManifestError(f"cannot read {manifest_path}: {exc}") from exc
    if not isinstance(raw, dict) or not all(
        isinstance(k, str) and isinstance(v, str) for k, v in raw.items()
    ):
        raise ManifestError(f"{manifest_path} must map document ids to node paths")
    return [GoldAnnotation(doc, path) for doc, path in sorted(raw.items())]


def run_corpus(
    corpus_dir: str | Path,
    config: SelectionConfig | None = None,
    classifier: ClassifierConfig | None = None,
) -> CorpusResult:
    """Parse, annotate, extract, and score every document in the corpus.

    Per-document failures (unresolvable gold path, empty document, missing
    file) are collected and the run continues; aggregate means cover the
    successfully scored documents.
    """
    corpus_dir = Path(corpus_dir)
    reports: list[EvalReport] = []
    failures: list[tuple[str, str]] = []
    for gold in load_manifest(corpus_dir):
        try:
            data = (corpus_dir / gold.document_id).read_bytes()
        except OSError as exc:
            failures.append((gold.document_id, f"cannot read document: {exc}"))
            continue
        tree = parse_html(data)
        try:
            retrieved = extract_main(compute_cnr(tree, classifier), config)
            gold_node = resolve_path(tree, gold.gold_path)
        except CnrxError as exc:
            failures.append((gold.document_id, str(exc)))
            continue
        reports.append(score(tree, retrieved, gold_node, document_id=gold.document_id))

    count = len(reports)
    return CorpusResult(
        reports=tuple(reports),
        mean_recall=sum(r.recall for r in reports) / count if count else 0.0,
        mean_precision=sum(r.precision for r in reports) / count if count else 0.0,
        mean_f1=sum(r.f1 for r in reports) / count if count else 0.0,
        failures=tuple(failures),
    )


def report_to_dict(report: EvalReport) -> dict:
    """JSON-lines record shape for one document."""
    return {
        "documentId": report.document_id,
        "domNodes": report.dom_nodes,
        "mainBlockNodes": report.main_block_nodes,
        "recall": report.recall,
        "precision": report.precision,
        "f1": report.f1,
    }
