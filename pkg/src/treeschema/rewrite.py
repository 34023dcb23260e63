"""Iterative instance rewriting toward a valid schema grammar.

Each pass relabels or restructures nodes by six rules, applied in order:
form groups over all-property nodes (R1), unify group names inside one
equivalence class (R2), turn two-group nodes into binary relations (R3),
split many-group stars into pairwise relations (R4), collect repeated
same-name groups or relations (R5), and flatten leftover syntactic
wrappers (R6).  The loop re-extracts and re-validates the grammar after
every pass and stops on validity or after a fixed number of passes.

Group and collection names are numeric ids.  A class reuses the smallest
id already present among its members; a class without one draws the next
unused id.  Relation names join their two group ids ("Rel_1_2").
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .grammar import Grammar, extract_grammar
from .similarity import EquivPartition, SimilarityConfig, equivalence_partition
from .tree import (
    COLL,
    EPSILON,
    GRP,
    PROP,
    REL,
    STRUCTURAL_KINDS,
    SYN,
    Nested,
    Position,
    Tree,
    build_tree,
    coll,
    grp,
    lam,
    rel,
    syn,
    to_nested,
)
from .validation import ValidationReport, validate_grammar

__all__ = [
    "RewriteConfig",
    "IterationRecord",
    "StructuringResult",
    "candidate_positions",
    "rewrite_step",
    "merge_forest",
    "structure_corpus",
]

SENTENCE_TAG = "SENT"


@dataclass(frozen=True)
class RewriteConfig:
    similarity: SimilarityConfig = field(default_factory=SimilarityConfig)
    min_support: int = 2
    max_iterations: int = 10

    def __post_init__(self) -> None:
        if self.min_support < 1:
            raise ValueError(f"min_support must be at least 1, got {self.min_support}")
        if self.max_iterations < 1:
            raise ValueError(f"max_iterations must be at least 1, got {self.max_iterations}")


@dataclass(frozen=True)
class IterationRecord:
    step: int
    productions: int
    groups: int
    relations: int
    collections: int
    equivalence_classes: int


@dataclass(frozen=True)
class StructuringResult:
    grammar: Grammar
    instance: Tree
    report: ValidationReport
    log: tuple[IterationRecord, ...]
    converged: bool


def candidate_positions(t: Tree) -> set[Position]:
    """Internal non-property, non-root nodes covering at least one property."""
    has_prop: dict[Position, bool] = {}
    out: set[Position] = set()
    for u in reversed(t.positions()):
        covered = any(
            t.label(c).kind == PROP or has_prop[c] for c in t.children(u)
        )
        has_prop[u] = covered
        if u != EPSILON and t.num_children(u) > 0 and t.label(u).kind != PROP and covered:
            out.add(u)
    return out


def _name_key(name: str) -> tuple[int, int, str]:
    # Numeric ids sort before and among themselves by value; other names
    # (from hand-written grammars) sort after, alphabetically.
    if name.isdigit():
        return (0, int(name), "")
    return (1, 0, name)


def _next_numeric_id(node: Nested, kind: str) -> int:
    highest = 0

    def walk(n: Nested) -> None:
        nonlocal highest
        label, kids = n
        if label.kind == kind and label.text.isdigit():
            highest = max(highest, int(label.text))
        for k in kids:
            walk(k)

    walk(node)
    return highest + 1


def _copy(node: Nested) -> Nested:
    label, kids = node
    return (label, [_copy(k) for k in kids])


def _form_and_merge_groups(t: Tree, part: EquivPartition, min_support: int) -> Nested:
    """R1 and R2: relabel class members to a shared group name.

    Only nodes whose children are all properties can be turned into a
    group; nodes that already are groups just adopt the class name.  A
    class with no named member mints a fresh id only when its frequency
    reaches min_support.
    """
    labels = {u: t.label(u) for u in t.positions()}
    next_id = 1
    for u, label in labels.items():
        if label.kind == GRP and label.text.isdigit():
            next_id = max(next_id, int(label.text) + 1)
    formed: set[Position] = set()
    for members in part.classes:
        named = sorted(
            {labels[u].text for u in members if labels[u].kind == GRP}, key=_name_key
        )
        formable = [
            u
            for u in sorted(members)
            if labels[u].kind == SYN
            and t.num_children(u) > 0
            and all(t.label(c).kind == PROP for c in t.children(u))
        ]
        if named:
            target = named[0]
        elif formable and len(members) >= min_support:
            target = str(next_id)
            next_id += 1
        else:
            continue
        for u in formable:
            labels[u] = grp(target)
            formed.add(u)
        for u in members:
            if labels[u].kind == GRP and labels[u].text != target:
                labels[u] = grp(target)

    def nest(u: Position) -> Nested:
        kids = [nest(c) for c in t.children(u)]
        if u in formed:
            seen: set[str] = set()
            kept = []
            for c, kid in zip(t.children(u), kids):
                name = t.label(c).text
                if name in seen:
                    continue
                seen.add(name)
                kept.append(kid)
            kids = kept
        return (labels[u], kids)

    return nest(EPSILON)


def _relation_name(a: str, b: str) -> str:
    first, second = sorted([a, b], key=_name_key)
    return f"{first}_{second}"


def _relabel_relations(node: Nested) -> Nested:
    """R3: a two-group node with distinct names becomes a relation."""
    label, kids = node
    kids = [_relabel_relations(k) for k in kids]
    if label.kind == SYN and len(kids) == 2:
        a, b = kids[0][0], kids[1][0]
        if a.kind == GRP and b.kind == GRP and a.text != b.text:
            label = rel(_relation_name(a.text, b.text))
    return (label, kids)


def _decompose_stars(node: Nested) -> Nested:
    """R4: split a many-group node into pairwise relations.

    The leftmost group is the hub; it is copied into each pair, so the
    property multiset can grow here (the hub's values fan out, as rows of
    a join table would).  Nodes repeating the hub's name are left alone
    for a later pass.
    """
    label, kids = node
    kids = [_decompose_stars(k) for k in kids]
    out: list[Nested] = []
    for kid in kids:
        out.extend(_star_expansion(kid))
    return (label, out)


def _star_expansion(node: Nested) -> list[Nested]:
    label, kids = node
    if label.kind != SYN or len(kids) < 3:
        return [node]
    child_labels = [k[0] for k in kids]
    if any(l.kind != GRP for l in child_labels):
        return [node]
    names = [l.text for l in child_labels]
    if len(set(names)) < 2 or names[0] in names[1:]:
        return [node]
    hub = kids[0]
    pairs: list[Nested] = []
    for kid in kids[1:]:
        left = hub if not pairs else _copy(hub)
        pairs.append((rel(_relation_name(names[0], kid[0].text)), [left, kid]))
    return pairs


def _member_signature(node: Nested) -> tuple[str, str] | None:
    label = node[0]
    if label.kind in (GRP, REL):
        return (label.kind, label.text)
    return None


def _collection_signature(node: Nested) -> tuple[str, str] | None:
    label, kids = node
    if label.kind != COLL or not kids:
        return None
    signatures = {_member_signature(k) for k in kids}
    if len(signatures) == 1 and None not in signatures:
        return signatures.pop()
    return None


def _form_collections(node: Nested, counter: list[int]) -> Nested:
    """R5 on inner nodes: same-name group or relation runs become one collection."""
    label, kids = node
    kids = [_form_collections(k, counter) for k in kids]
    if label.kind == SYN and len(kids) >= 2:
        signatures = {_member_signature(k) for k in kids}
        if len(signatures) == 1 and None not in signatures:
            label = coll(str(counter[0]))
            counter[0] += 1
    return (label, kids)


def _gather_root_collections(node: Nested, counter: list[int]) -> Nested:
    """R5 at the root: wrap repeated structures, merge same-member collections."""
    label, kids = node
    runs: dict[tuple[str, str], list[int]] = {}
    for i, kid in enumerate(kids):
        signature = _member_signature(kid)
        if signature is not None:
            runs.setdefault(signature, []).append(i)
    wrapped: dict[int, Nested] = {}
    consumed: set[int] = set()
    for signature, indices in runs.items():
        if len(indices) >= 2:
            fresh = coll(str(counter[0]))
            counter[0] += 1
            wrapped[indices[0]] = (fresh, [kids[i] for i in indices])
            consumed.update(indices[1:])
    gathered = [
        wrapped.get(i, kid) for i, kid in enumerate(kids) if i not in consumed
    ]
    merged: list[Nested] = []
    slot_of: dict[tuple[str, str], int] = {}
    for kid in gathered:
        signature = _collection_signature(kid)
        if signature is None:
            merged.append(kid)
            continue
        slot = slot_of.get(signature)
        if slot is None:
            slot_of[signature] = len(merged)
            merged.append(kid)
        else:
            host = merged[slot]
            name = min(host[0].text, kid[0].text, key=_name_key)
            merged[slot] = (coll(name), host[1] + kid[1])
    return (label, merged)


def _flatten(node: Nested) -> Nested:
    """R6: drop single-child wrappers, splice all-structural wrappers at depth 1."""

    def collapse(n: Nested) -> Nested:
        label, kids = n
        kids = [collapse(k) for k in kids]
        if label.kind == SYN and len(kids) == 1:
            return kids[0]
        return (label, kids)

    label, kids = collapse(node)
    spliced: list[Nested] = []
    for kid in kids:
        kid_label, kid_kids = kid
        if (
            kid_label.kind == SYN
            and kid_kids
            and all(c[0].kind in STRUCTURAL_KINDS for c in kid_kids)
        ):
            spliced.extend(kid_kids)
        else:
            spliced.append(kid)
    return (label, spliced)


def rewrite_step(t: Tree, part: EquivPartition, cfg: RewriteConfig) -> Tree:
    """Apply R1..R6 once, in order, and return the rewritten instance."""
    node = _form_and_merge_groups(t, part, cfg.min_support)
    node = _relabel_relations(node)
    node = _decompose_stars(node)
    counter = [_next_numeric_id(node, COLL)]
    node = _form_collections(node, counter)
    node = _gather_root_collections(node, counter)
    node = _flatten(node)
    return build_tree(node)


def merge_forest(forest: list[Tree]) -> Tree:
    """Join sentence trees under one shared root.

    Each sentence root is relabelled to a plain sentence wrapper so the
    merged tree keeps per-sentence boundaries until flattening removes
    them.  Sentences left empty by pruning carry no schema signal and are
    skipped.
    """
    kids: list[Nested] = []
    for t in forest:
        label, sentence_kids = to_nested(t)
        if sentence_kids:
            kids.append((syn(SENTENCE_TAG), sentence_kids))
    return build_tree((lam(), kids))


def structure_corpus(forest: list[Tree], cfg: RewriteConfig) -> StructuringResult:
    """Run the rewrite loop until the grammar validates or the cap is hit."""
    instance = merge_forest(forest)
    grammar = extract_grammar(instance)
    report = validate_grammar(grammar)
    log: list[IterationRecord] = []
    step = 0
    while not report.valid and step < cfg.max_iterations:
        candidates = candidate_positions(instance)
        part = equivalence_partition(cfg.similarity, instance, candidates)
        instance = rewrite_step(instance, part, cfg)
        grammar = extract_grammar(instance)
        report = validate_grammar(grammar)
        log.append(
            IterationRecord(
                step=step,
                productions=len(grammar.rules),
                groups=len(grammar.rules_of_kind(GRP)),
                relations=len(grammar.rules_of_kind(REL)),
                collections=len(grammar.rules_of_kind(COLL)),
                equivalence_classes=len(part),
            )
        )
        step += 1
    return StructuringResult(
        grammar=grammar,
        instance=instance,
        report=report,
        log=tuple(log),
        converged=report.valid,
    )
