"""Block detection: pick text-dense nodes, merge them bottom-up into container
blocks, and choose the block with the most text.

The merge keeps a set of candidate nodes as an antichain: descendants of other
candidates are pruned, and whenever two candidates share a parent they are
replaced by that parent, deepest parents first, until a fix point is reached.
"""

from __future__ import annotations

import heapq
import math
from bisect import bisect_right, insort
from dataclasses import dataclass

from .cnr import AnnotatedTree, _annotate, text_length
from .dom import Element
from .errors import AtRoot, EmptyBlockSet, EmptyDocument, NoChildren


@dataclass(frozen=True)
class SelectionConfig:
    """Candidate selection knobs.

    quantile: CNR quantile (over the positive-CNR pool) above which nodes are
    selected; min_candidates: floor on how many nodes are taken regardless.
    """

    quantile: float = 0.90
    min_candidates: int = 3

    def __post_init__(self):
        if not 0.0 < self.quantile <= 1.0:
            raise ValueError(f"quantile must be in (0, 1], got {self.quantile}")
        if self.min_candidates < 1:
            raise ValueError("min_candidates must be >= 1")


@dataclass(frozen=True)
class MenuConfig:
    """Thresholds for the experimental link-concentration (menu) detector."""

    lnr_threshold: float = 0.5
    max_chars_per_link: float = 25.0


@dataclass(frozen=True)
class BlockSet:
    """A set of candidate block node ids over one annotated tree."""

    members: frozenset[int]

    def __iter__(self):
        return iter(self.members)

    def __len__(self):
        return len(self.members)

    def __contains__(self, n):
        return n in self.members


def _quantile(sorted_values: list[float], q: float) -> float:
    """Quantile by linear interpolation between closest ranks."""
    last = len(sorted_values) - 1
    pos = q * last
    lo = math.floor(pos)
    frac = pos - lo
    if frac == 0.0 or lo >= last:
        return sorted_values[lo]
    return sorted_values[lo] + (sorted_values[lo + 1] - sorted_values[lo]) * frac


def _barred(atree: AnnotatedTree, n: int) -> bool:
    # Proper ancestors of logically removed subtrees cannot be candidates or
    # merge targets; their block would overlap the removed block.
    tree = atree.tree
    return any(n != r and tree.is_ancestor(n, r) for r in atree.excluded_roots)


def select_top_nodes(atree: AnnotatedTree, config: SelectionConfig | None = None) -> BlockSet:
    """Select the nodes whose CNR reaches the configured quantile.

    The pool is every node with positive CNR; at least
    min(min_candidates, |pool|) nodes are returned, taken in descending
    (cnr, then ascending node id) order. Raises EmptyDocument on an all-zero
    document.
    """
    config = config or SelectionConfig()
    ann = atree.annotations
    if atree.excluded_roots:
        pool = [
            n for n in range(atree.tree.node_count)
            if ann[n].cnr > 0.0 and not _barred(atree, n)
        ]
    else:
        pool = [n for n in range(atree.tree.node_count) if ann[n].cnr > 0.0]
    if not pool:
        raise EmptyDocument("document contains no countable text")
    values = sorted(ann[n].cnr for n in pool)
    threshold = _quantile(values, config.quantile)
    above = sum(1 for v in values if v >= threshold)
    take = max(above, min(config.min_candidates, len(pool)))
    ranked = sorted(pool, key=lambda n: (-ann[n].cnr, n))
    return BlockSet(frozenset(ranked[:take]))


def identify_blocks(atree: AnnotatedTree, s: BlockSet) -> BlockSet:
    """Merge candidate nodes bottom-up into container blocks.

    Candidates that are descendants of other candidates are dropped; then,
    while two candidates share a parent, all candidate children of that parent
    are replaced by the parent (deepest parents first, then smallest id).
    Descendant pruning is re-applied after every merge, so the result is an
    antichain in which no two members share a parent.
    """
    tree = atree.tree
    for m in s:
        tree._check(m)

    # Initial descendant pruning: preorder ids make each subtree an interval,
    # so one ascending sweep keeps exactly the outermost candidates.
    members: list[int] = []
    interval_end = -1
    for m in sorted(set(s)):
        if m > interval_end:
            members.append(m)
            interval_end = m + tree.subtree_size(m) - 1
    member_set = set(members)

    groups: dict[int, set[int]] = {}
    heap: list[tuple[int, int]] = []
    for m in members:
        p = tree.parent(m)
        if p is not None:
            groups.setdefault(p, set()).add(m)
    for p, group in groups.items():
        if len(group) >= 2:
            heapq.heappush(heap, (-tree.depth(p), p))

    def remove(m: int):
        member_set.discard(m)
        members.pop(bisect_right(members, m) - 1)
        p = tree.parent(m)
        if p is not None and p in groups:
            groups[p].discard(m)

    while heap:
        _, parent = heapq.heappop(heap)
        group = groups.get(parent)
        if not group or len(group) < 2:
            continue
        if atree.excluded_roots and _barred(atree, parent):
            continue
        for child in sorted(group):
            remove(child)
        # The merged parent may now dominate other members; swallow them.
        end = parent + tree.subtree_size(parent) - 1
        lo = bisect_right(members, parent)
        for inner in members[lo:bisect_right(members, end)]:
            remove(inner)
        insort(members, parent)
        member_set.add(parent)
        gp = tree.parent(parent)
        if gp is not None:
            gp_group = groups.setdefault(gp, set())
            gp_group.add(parent)
            if len(gp_group) >= 2:
                heapq.heappush(heap, (-tree.depth(gp), gp))

    return BlockSet(frozenset(member_set))


def select_main_block(atree: AnnotatedTree, blocks: BlockSet) -> int:
    """The block whose subtree holds the most text; ties go to the smaller id."""
    if not blocks.members:
        raise EmptyBlockSet("no blocks to choose from")
    ann = atree.annotations
    for m in blocks:
        atree.tree._check(m)
    return max(blocks.members, key=lambda n: (ann[n].text_length, -n))


def extract_main(atree: AnnotatedTree, config: SelectionConfig | None = None) -> int:
    """Full pipeline: select top-CNR nodes, merge into blocks, pick the best."""
    return select_main_block(atree, identify_blocks(atree, select_top_nodes(atree, config)))


def expand(atree: AnnotatedTree, current: int) -> int:
    """Widen the selection to the parent of the current node."""
    parent = atree.tree.parent(current)
    if parent is None:
        raise AtRoot("cannot expand past the document root")
    return parent


def shrink(atree: AnnotatedTree, current: int) -> int:
    """Narrow the selection to the child with the highest CNR."""
    kids = atree.tree.children(current)
    if not kids:
        raise NoChildren(f"node {current} has no children to shrink into")
    ann = atree.annotations
    return max(kids, key=lambda c: (ann[c].cnr, -c))


def enumerate_blocks(
    atree: AnnotatedTree,
    config: SelectionConfig | None = None,
    k: int = 1,
) -> list[int]:
    """Extract up to k blocks in relevance order.

    Each round runs the full pipeline, then logically removes the winning
    subtree and re-annotates the remainder; rounds stop early once no text is
    left. Results are node ids of the original tree with pairwise-disjoint
    subtrees, and the first equals extract_main on the full document.
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    results: list[int] = []
    current = atree
    for _ in range(k):
        try:
            block = extract_main(current, config)
        except EmptyDocument:
            if not results:
                raise
            break
        results.append(block)
        current = _annotate(
            atree.tree, atree.config, frozenset(results) | atree.excluded_roots
        )
    return results


def detect_menus(atree: AnnotatedTree, config: MenuConfig | None = None) -> BlockSet:
    """Experimental: find link concentrations (menus) by links-nodes ratio.

    Anchors count as single marker nodes (their subtrees add no weight); a
    node qualifies when anchors/weight reaches lnr_threshold and the mean
    non-whitespace characters per contained anchor stays at or below
    max_chars_per_link. Qualifying nodes are merged like content blocks.
    """
    config = config or MenuConfig()
    tree = atree.tree
    n = tree.node_count
    non_content = atree.config.non_content_tags

    # Raw text length of every full subtree (no truncation), bottom-up.
    raw = [0] * n
    for i in range(n - 1, -1, -1):
        kind = tree._kinds[i]
        if isinstance(kind, Element):
            raw[i] = sum(raw[c] for c in tree._children[i])
        else:
            raw[i] = text_length(kind.content)

    anchors = [0] * n
    weight = [1] * n
    chars = [0] * n  # text inside contained anchors
    for i in range(n - 1, -1, -1):
        kind = tree._kinds[i]
        if not isinstance(kind, Element):
            continue
        if kind.tag == "a":
            anchors[i] = 1
            chars[i] = raw[i]
        elif kind.tag in non_content:
            pass  # truncated: weight 1, no links counted through it
        else:
            a = 0
            w = 1
            c = 0
            for child in tree._children[i]:
                a += anchors[child]
                w += weight[child]
                c += chars[child]
            anchors[i] = a
            weight[i] = w
            chars[i] = c

    candidates = [
        i
        for i in range(n)
        if anchors[i] > 0
        and anchors[i] / weight[i] >= config.lnr_threshold
        and chars[i] / anchors[i] <= config.max_chars_per_link
    ]
    return identify_blocks(atree, BlockSet(frozenset(candidates)))
