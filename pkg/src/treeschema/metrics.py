"""Quality measures for a structuring run, plus the naive baseline.

Data loss is measured by property coverage; semantic loss by comparing
the clustering induced by parent equivalence classes before structuring
with the clustering induced by parent labels after it (adjusted mutual
information and completeness); schema quality by group overlap and by
value redundancy inside group tables under discovered functional
dependencies.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from sklearn import metrics as _skm

from .grammar import Grammar, extract_grammar
from .similarity import EquivPartition
from .tree import (
    GRP,
    PROP,
    TOKEN,
    Nested,
    Position,
    Tree,
    build_tree,
    format_position,
    grp,
    lam,
    to_nested,
)

__all__ = [
    "Clustering",
    "GroupTable",
    "MetricsReport",
    "MetricUndefined",
    "coverage_score",
    "ami_score",
    "completeness_score",
    "semantic_clusterings",
    "group_overlap",
    "build_group_tables",
    "confidence_score",
    "dependency_score",
    "redundancy_score",
    "naive_baseline",
    "compute_metrics",
    "metrics_csv",
]

Clustering = dict

REDUNDANCY_COLUMN_CAP = 12


class MetricUndefined(Exception):
    """The metric has no value on this input (empty effective table)."""


def _prop_positions(t: Tree) -> list[Position]:
    return [u for u in t.positions() if t.label(u).kind == PROP]


def coverage_score(initial: Tree, final: Tree) -> float:
    """Fraction of property instances that survived structuring."""
    before = len(_prop_positions(initial))
    after = len(_prop_positions(final))
    if before == 0:
        return 1.0
    return min(1.0, after / before)


def _paired_labels(a: Clustering, b: Clustering) -> tuple[list, list]:
    if set(a) != set(b):
        raise ValueError("clusterings cover different item sets")
    items = sorted(a)
    return [a[u] for u in items], [b[u] for u in items]


def ami_score(a: Clustering, b: Clustering) -> float:
    """Adjusted mutual information between two clusterings of one item set."""
    left, right = _paired_labels(a, b)
    if not left:
        return 1.0
    return float(_skm.adjusted_mutual_info_score(left, right, average_method="arithmetic"))


def completeness_score(classes: Clustering, clusters: Clustering) -> float:
    """Do all members of each class land in a single cluster?"""
    left, right = _paired_labels(classes, clusters)
    if not left:
        return 1.0
    return float(_skm.completeness_score(left, right))


def _token_texts(t: Tree, u: Position) -> tuple[str, ...]:
    texts: list[str] = []
    stack = [u]
    while stack:
        v = stack.pop()
        if t.label(v).kind == TOKEN:
            texts.append(t.label(v).text)
        stack.extend(reversed(t.children(v)))
    return tuple(texts)


def _content_key(t: Tree, u: Position) -> tuple[str, tuple[str, ...]]:
    return (t.label(u).text, _token_texts(t, u))


def semantic_clusterings(
    initial: Tree, final: Tree, part: EquivPartition
) -> tuple[Clustering, Clustering]:
    """Two clusterings of the initial property instances.

    The first labels each instance by its parent's equivalence class, the
    second by its parent's label in the final tree.  Final instances are
    matched back by property name and token text, in document order;
    instances that did not survive become singletons.
    """
    items = _prop_positions(initial)
    before: Clustering = {}
    for u in items:
        parent = u[:-1]
        if parent in part.class_of:
            before[u] = f"c{part.class_of[parent]}"
        else:
            before[u] = f"p:{format_position(parent)}"

    remaining: dict[tuple[str, tuple[str, ...]], list[str]] = {}
    for v in _prop_positions(final):
        remaining.setdefault(_content_key(final, v), []).append(final.label(v[:-1]).display)
    after: Clustering = {}
    for u in items:
        queue = remaining.get(_content_key(initial, u))
        if queue:
            after[u] = queue.pop(0)
        else:
            after[u] = f"dropped:{format_position(u)}"
    return before, after


def group_overlap(g: Grammar) -> float:
    """Mean pairwise Jaccard overlap of group property sets."""
    prop_sets = [
        frozenset(item.symbol.text for item in rule.rhs if item.symbol.kind == PROP)
        for rule in g.rules_of_kind(GRP)
    ]
    if len(prop_sets) < 2:
        return 0.0
    total = 0.0
    pairs = 0
    for a, b in itertools.combinations(prop_sets, 2):
        union = a | b
        total += len(a & b) / len(union) if union else 1.0
        pairs += 1
    return total / pairs


@dataclass(frozen=True)
class GroupTable:
    name: str
    columns: tuple[str, ...]
    rows: tuple[dict[str, str], ...]


def build_group_tables(instance: Tree, g: Grammar) -> list[GroupTable]:
    """One table per group rule; one row per group node in the instance."""
    occurrences: dict[str, list[Position]] = {}
    for u in instance.positions():
        label = instance.label(u)
        if label.kind == GRP:
            occurrences.setdefault(label.text, []).append(u)
    tables: list[GroupTable] = []
    for rule in g.rules_of_kind(GRP):
        columns = tuple(item.symbol.text for item in rule.rhs if item.symbol.kind == PROP)
        rows: list[dict[str, str]] = []
        for u in occurrences.get(rule.lhs.text, []):
            row: dict[str, str] = {}
            for c in instance.children(u):
                child = instance.label(c)
                if child.kind == PROP and child.text not in row:
                    row[child.text] = " ".join(_token_texts(instance, c))
            rows.append(row)
        tables.append(GroupTable(name=rule.lhs.text, columns=columns, rows=tuple(rows)))
    return tables


def _effective_rows(tab: GroupTable, needed: frozenset[str]) -> list[dict[str, str]]:
    return [row for row in tab.rows if needed <= row.keys()]


def confidence_score(tab: GroupTable, x: frozenset[str], y: frozenset[str]) -> float:
    """Median conditional frequency of y-values given x-values.

    Rows missing any needed cell are ignored entirely.  The median is the
    lower median for even counts.
    """
    if not x or not y or x & y:
        raise ValueError("column sets must be disjoint and non-empty")
    xs = sorted(x)
    ys = sorted(y)
    rows = _effective_rows(tab, x | y)
    if not rows:
        raise MetricUndefined(f"no complete rows over {sorted(x | y)}")
    support_x: dict[tuple[str, ...], int] = {}
    support_xy: dict[tuple[tuple[str, ...], tuple[str, ...]], int] = {}
    for row in rows:
        vx = tuple(row[c] for c in xs)
        vy = tuple(row[c] for c in ys)
        support_x[vx] = support_x.get(vx, 0) + 1
        support_xy[(vx, vy)] = support_xy.get((vx, vy), 0) + 1
    values = sorted(support_xy[(vx, vy)] / support_x[vx] for vx, vy in support_xy)
    return values[(len(values) - 1) // 2]


def dependency_score(tab: GroupTable, x: frozenset[str]) -> float:
    """Strength of the strongest single-column dependency inside x."""
    if len(x) < 2:
        raise ValueError("need at least two columns")
    best: float | None = None
    for column in sorted(x):
        try:
            score = confidence_score(tab, x - {column}, frozenset({column}))
        except MetricUndefined:
            continue
        if best is None or score > best:
            best = score
    if best is None:
        raise MetricUndefined(f"no complete rows over {sorted(x)}")
    return best


def redundancy_score(
    tab: GroupTable, alpha: float, max_columns: int = REDUNDANCY_COLUMN_CAP
) -> float:
    """Fraction of rows duplicated on some column set with dependency ≥ alpha."""
    if len(tab.columns) > max_columns:
        raise ValueError(
            f"table {tab.name} has {len(tab.columns)} columns, cap is {max_columns}"
        )
    if not tab.rows:
        return 0.0
    duplicated: set[int] = set()
    for size in range(2, len(tab.columns) + 1):
        for subset in itertools.combinations(sorted(tab.columns), size):
            x = frozenset(subset)
            try:
                if dependency_score(tab, x) < alpha:
                    continue
            except MetricUndefined:
                continue
            groups: dict[tuple[str, ...], list[int]] = {}
            for i, row in enumerate(tab.rows):
                if not x <= row.keys():
                    continue
                groups.setdefault(tuple(row[c] for c in subset), []).append(i)
            for indices in groups.values():
                if len(indices) > 1:
                    duplicated.update(indices)
    return len(duplicated) / len(tab.rows)


def naive_baseline(forest: list[Tree]) -> tuple[Grammar, Tree]:
    """One group per sentence from its distinct property names.

    Takes the per-sentence enriched trees.  Sentences sharing the same
    property-name set share one group rule; property subtrees are kept
    (first occurrence per name) so values stay queryable.  Sentences
    without properties contribute nothing.
    """
    group_ids: dict[frozenset[str], str] = {}
    kids: list[Nested] = []
    for t in forest:
        props: list[tuple[str, Position]] = []
        seen: set[str] = set()
        covered: Position | None = None
        for u in t.positions():
            if covered is not None and u[: len(covered)] == covered:
                continue
            covered = None
            if t.label(u).kind == PROP:
                covered = u
                if t.label(u).text not in seen:
                    seen.add(t.label(u).text)
                    props.append((t.label(u).text, u))
        if not props:
            continue
        names = frozenset(name for name, _ in props)
        if names not in group_ids:
            group_ids[names] = str(len(group_ids) + 1)
        kids.append((grp(group_ids[names]), [to_nested(t, u) for _, u in props]))
    instance = build_tree((lam(), kids))
    return extract_grammar(instance), instance




@dataclass(frozen=True)
class MetricsReport:
    coverage: float
    ami: float
    completeness: float
    rule_count: int
    group_overlap: float
    redundancy: dict[float, float] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "coverage": self.coverage,
            "ami": self.ami,
            "completeness": self.completeness,
            "rule_count": self.rule_count,
            "group_overlap": self.group_overlap,
            "redundancy": {str(alpha): value for alpha, value in self.redundancy.items()},
        }


def compute_metrics(
    initial: Tree,
    final: Tree,
    part: EquivPartition,
    grammar: Grammar,
    alphas: tuple[float, ...] = (1.0, 0.5),
) -> MetricsReport:
    """Score a structured instance against the enriched initial instance."""
    before, after = semantic_clusterings(initial, final, part)
    tables = [
        tab
        for tab in build_group_tables(final, grammar)
        if len(tab.columns) <= REDUNDANCY_COLUMN_CAP
    ]
    redundancy: dict[float, float] = {}
    for alpha in alphas:
        duplicated = 0
        total = 0
        for tab in tables:
            duplicated += round(redundancy_score(tab, alpha) * len(tab.rows))
            total += len(tab.rows)
        redundancy[alpha] = duplicated / total if total else 0.0
    return MetricsReport(
        coverage=coverage_score(initial, final),
        ami=ami_score(before, after),
        completeness=completeness_score(before, after),
        rule_count=len(grammar.rules),
        group_overlap=group_overlap(grammar),
        redundancy=redundancy,
    )


def metrics_csv(report: MetricsReport, tau: float, min_support: int) -> str:
    """One-row CSV in the comparison-table column order."""
    columns = [
        "tau",
        "min_support",
        "coverage",
        "redundancy_1.0",
        "redundancy_0.5",
        "ami",
        "completeness",
        "rules",
        "group_overlap",
    ]
    row = [
        repr(tau),
        str(min_support),
        repr(report.coverage),
        repr(report.redundancy.get(1.0, 0.0)),
        repr(report.redundancy.get(0.5, 0.0)),
        repr(report.ami),
        repr(report.completeness),
        str(report.rule_count),
        repr(report.group_overlap),
    ]
    return ",".join(columns) + "\n" + ",".join(row) + "\n"
