"""Subtree similarity and the threshold-equivalence partition.

Two subtrees are compared through a base measure f (Jaccard over the
property names they contain, or normalized Levenshtein over their child
label sequences) blended with the same measure on their enclosing
subtrees: one level above weighs 1/2, two levels 1/3, and so on, up to
the shallower anchor's depth.  The τ-equivalence classes are the
connected components of the graph linking pairs whose blended score
reaches τ, which is exactly a single-link clustering cut.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .tree import PROP, NodeLabel, Position, Subtree, Tree, format_position

__all__ = [
    "F_KINDS",
    "SimilarityConfig",
    "EquivPartition",
    "base_similarity",
    "contextual_similarity",
    "equivalence_partition",
    "dendrogram",
]

F_KINDS = ("jaccard_props", "levenshtein_labels")


@dataclass(frozen=True)
class SimilarityConfig:
    f_kind: str = "jaccard_props"
    tau: float = 0.7

    def __post_init__(self) -> None:
        if self.f_kind not in F_KINDS:
            raise ValueError(f"unknown base similarity {self.f_kind!r}")
        if not 0.0 <= self.tau <= 1.0:
            raise ValueError(f"threshold must lie in [0, 1], got {self.tau}")


@dataclass(frozen=True)
class EquivPartition:
    """Equivalence classes over candidate positions, in document order."""

    classes: tuple[frozenset[Position], ...]
    class_of: dict[Position, int] = field(default_factory=dict, compare=False)

    def __len__(self) -> int:
        return len(self.classes)


def _jaccard(a: frozenset[str], b: frozenset[str]) -> float:
    if not a and not b:
        return 1.0
    return len(a & b) / len(a | b)


def _levenshtein(a: list[NodeLabel], b: list[NodeLabel]) -> int:
    # Classic two-row DP over label sequences.
    if len(a) < len(b):
        a, b = b, a
    previous = list(range(len(b) + 1))
    for i, x in enumerate(a, start=1):
        current = [i]
        for j, y in enumerate(b, start=1):
            cost = 0 if x == y else 1
            current.append(min(previous[j] + 1, current[j - 1] + 1, previous[j - 1] + cost))
        previous = current
    return previous[-1]


class _PairScorer:
    """Caches per-position features so repeated pair scores stay cheap."""

    def __init__(self, t: Tree, f_kind: str) -> None:
        self.tree = t
        self.f_kind = f_kind
        self._props: dict[Position, frozenset[str]] = {}
        self._labels: dict[Position, list[NodeLabel]] = {}
        self._pairs: dict[tuple[Position, Position], float] = {}
        if f_kind == "jaccard_props":
            for u in reversed(t.positions()):
                names = frozenset().union(*(self._props[c] for c in t.children(u))) if t.num_children(u) else frozenset()
                label = t.label(u)
                if label.kind == PROP:
                    names = names | {label.text}
                self._props[u] = names

    def _child_labels(self, u: Position) -> list[NodeLabel]:
        found = self._labels.get(u)
        if found is None:
            found = [self.tree.label(c) for c in self.tree.children(u)]
            self._labels[u] = found
        return found

    def base(self, u: Position, v: Position) -> float:
        if u == v:
            return 1.0
        key = (u, v) if u <= v else (v, u)
        score = self._pairs.get(key)
        if score is None:
            if self.f_kind == "jaccard_props":
                score = _jaccard(self._props[u], self._props[v])
            else:
                a, b = self._child_labels(u), self._child_labels(v)
                longest = max(len(a), len(b))
                score = 1.0 if longest == 0 else 1.0 - _levenshtein(a, b) / longest
            self._pairs[key] = score
        return score

    def blended(self, u: Position, v: Position) -> float:
        depth = min(len(u), len(v))
        numerator = 0.0
        denominator = 0.0
        for i in range(depth + 1):
            weight = 1.0 / (i + 1)
            numerator += weight * self.base(u[: len(u) - i], v[: len(v) - i])
            denominator += weight
        return numerator / denominator


def base_similarity(cfg: SimilarityConfig, x: Subtree, y: Subtree) -> float:
    """Score two subtrees by the configured base measure alone."""
    if x.base is not y.base:
        raise ValueError("subtrees must share one underlying tree")
    return _PairScorer(x.base, cfg.f_kind).base(x.anchor, y.anchor)


def contextual_similarity(cfg: SimilarityConfig, x: Subtree, y: Subtree) -> float:
    """Blend the base measure over the two anchors and their ancestors."""
    if x.base is not y.base:
        raise ValueError("subtrees must share one underlying tree")
    return _PairScorer(x.base, cfg.f_kind).blended(x.anchor, y.anchor)


def equivalence_partition(
    cfg: SimilarityConfig, t: Tree, candidates: set[Position]
) -> EquivPartition:
    """Partition candidates into components of the τ-similarity graph."""
    ordered = sorted(candidates)
    parent = {u: u for u in ordered}

    def find(u: Position) -> Position:
        root = u
        while parent[root] != root:
            root = parent[root]
        while parent[u] != root:
            parent[u], u = root, parent[u]
        return root

    scorer = _PairScorer(t, cfg.f_kind)
    for i, u in enumerate(ordered):
        for v in ordered[i + 1 :]:
            if find(u) != find(v):
                if scorer.blended(u, v) >= cfg.tau:
                    parent[find(v)] = find(u)
    grouped: dict[Position, list[Position]] = {}
    for u in ordered:
        grouped.setdefault(find(u), []).append(u)
    classes = tuple(
        frozenset(members) for members in sorted(grouped.values(), key=lambda ms: min(ms))
    )
    class_of = {u: i for i, members in enumerate(classes) for u in members}
    return EquivPartition(classes=classes, class_of=class_of)


def dendrogram(cfg: SimilarityConfig, t: Tree, candidates: set[Position]) -> list[dict]:
    """Single-link merge trace (for offline plotting), highest scores first."""
    scorer = _PairScorer(t, cfg.f_kind)
    clusters: list[tuple[Position, ...]] = [(u,) for u in sorted(candidates)]
    merges: list[dict] = []
    while len(clusters) > 1:
        best: tuple[float, int, int] | None = None
        for i in range(len(clusters)):
            for j in range(i + 1, len(clusters)):
                link = max(
                    scorer.blended(u, v) for u in clusters[i] for v in clusters[j]
                )
                if best is None or link > best[0]:
                    best = (link, i, j)
        assert best is not None
        link, i, j = best
        merges.append(
            {
                "left": [format_position(u) for u in clusters[i]],
                "right": [format_position(u) for u in clusters[j]],
                "similarity": link,
            }
        )
        clusters[i] = clusters[i] + clusters[j]
        del clusters[j]
    return merges
