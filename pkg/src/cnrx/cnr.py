"""Chars-nodes ratio annotation: weight, text length, and CNR per node.

One bottom-up pass assigns every node (weight, textLength, CNR) where weight
is the node count of its subtree, textLength counts non-whitespace characters,
and CNR = textLength / weight. Non-content elements are truncated: they weigh
1, contribute no text, and their descendants are annotated (1, 0, 0) and kept
out of any accumulation.
"""

from __future__ import annotations

from dataclasses import dataclass

from .dom import ClassifierConfig, DomTree, NodeClass, Text, classify


def text_length(s: str) -> int:
    """Number of non-whitespace characters in s (Unicode scalar values)."""
    return sum(1 for ch in s if not ch.isspace())


@dataclass(frozen=True)
class NodeAnnotation:
    weight: int
    text_length: int
    cnr: float


@dataclass(frozen=True)
class AnnotatedTree:
    """A DomTree plus one NodeAnnotation per node.

    `excluded_roots` is set only by block enumeration, which logically removes
    already-extracted subtrees; those subtrees contribute nothing anywhere.
    """

    tree: DomTree
    annotations: tuple[NodeAnnotation, ...]
    config: ClassifierConfig
    excluded_roots: frozenset[int] = frozenset()

    def annotation(self, n: int) -> NodeAnnotation:
        self.tree._check(n)
        return self.annotations[n]

    def cnr_of(self, n: int) -> float:
        self.tree._check(n)
        return self.annotations[n].cnr


def cnr_of(atree: AnnotatedTree, n: int) -> float:
    return atree.cnr_of(n)


def compute_cnr(tree: DomTree, config: ClassifierConfig | None = None) -> AnnotatedTree:
    """Annotate every node of the tree in a single O(N) bottom-up pass."""
    return _annotate(tree, config or ClassifierConfig(), frozenset())


def _annotate(
    tree: DomTree,
    config: ClassifierConfig,
    excluded_roots: frozenset[int],
) -> AnnotatedTree:
    n = tree.node_count
    classes = [classify(tree, i, config) for i in range(n)]

    # Forward sweep over preorder ids: mark subtrees that are cut (logically
    # removed) or dead (descendants of a non-content element). Preorder
    # contiguity turns both into interval sweeps.
    cut = bytearray(n)
    dead = bytearray(n)
    cut_end = -1
    dead_end = -1
    for i in range(n):
        if i <= cut_end:
            cut[i] = 1
        elif i in excluded_roots:
            cut[i] = 1
            cut_end = max(cut_end, i + tree.subtree_size(i) - 1)
        if i <= dead_end:
            dead[i] = 1
        elif not cut[i] and classes[i] is NodeClass.NON_CONTENT:
            dead_end = max(dead_end, i + tree.subtree_size(i) - 1)

    weights = [1] * n
    texts = [0] * n
    children = tree._children
    kinds = tree._kinds
    for i in range(n - 1, -1, -1):
        if cut[i] or dead[i]:
            continue
        cls = classes[i]
        if cls is NodeClass.TEXT:
            texts[i] = text_length(kinds[i].content)
        elif cls is NodeClass.CONTENT:
            w = 1
            t = 0
            for c in children[i]:
                if not cut[c]:
                    w += weights[c]
                    t += texts[c]
            weights[i] = w
            texts[i] = t
        # Non-content nodes keep the (1, 0) defaults.

    annotations = tuple(
        NodeAnnotation(weights[i], texts[i], texts[i] / weights[i])
        for i in range(n)
    )
    return AnnotatedTree(tree, annotations, config, excluded_roots)
