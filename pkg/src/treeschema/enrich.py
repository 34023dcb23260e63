"""Entity incorporation and tree reduction.

Turns a parsed sentence plus its named-entity spans into a tree whose
database-relevant content sits under Prop nodes, then strips everything
else:

* :func:`enrich` inserts one Prop node per entity span,
* :func:`simplify` deletes branches that carry no Prop and collapses
  single-child chains,
* :func:`reduce` flattens part-of-speech nodes inside Prop subtrees so
  property values are bare token children.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .tree import (
    LAMBDA,
    PROP,
    SYN,
    TOKEN,
    Nested,
    Tree,
    build_tree,
    prop,
    syn,
    to_nested,
)


class EnrichmentError(Exception):
    """Raised when an entity span cannot be placed in the tree."""


@dataclass(frozen=True)
class EntitySpan:
    """A half-open token range ``[start, end)`` carrying a property name."""

    start: int
    end: int
    label: str
    sentence_id: str = ""


@dataclass
class AnnotatedSentence:
    id: str
    tree: Tree
    entities: list[EntitySpan] = field(default_factory=list)


# Children considered coordination separators by the optional pre-pass.
_SEPARATOR_TAGS = {"CC", ",", ":", "CONJ"}
_SEPARATOR_TOKENS = {",", ";", "and", "or", "et", "ou"}


def _token_paths(node: Nested) -> list[tuple[int, ...]]:
    paths: list[tuple[int, ...]] = []

    def walk(n: Nested, path: tuple[int, ...]) -> None:
        label, children = n
        if not children:
            if label.kind == TOKEN:
                paths.append(path)
            return
        for i, child in enumerate(children):
            walk(child, path + (i,))

    walk(node, ())
    return paths


def _node_at(root: Nested, path: tuple[int, ...]) -> Nested:
    node = root
    for i in path:
        node = node[1][i]
    return node


def _common_prefix(paths: list[tuple[int, ...]]) -> tuple[int, ...]:
    first, last = paths[0], paths[-1]
    prefix = []
    for a, b in zip(first, last):
        if a != b:
            break
        prefix.append(a)
    return tuple(prefix)


def enrich(s: AnnotatedSentence, mode: str = "strict", align_conj: bool = False) -> Tree:
    """Insert a Prop node for every entity span of the sentence.

    Spans are inserted longest first so nested entities end up inside the
    Prop nodes of their enclosing entities.  A span must align with whole
    sibling subtrees under the lowest common ancestor of its tokens; in
    ``"strict"`` mode a misaligned span raises :class:`EnrichmentError`,
    in ``"lenient"`` mode only the fully covered siblings are wrapped
    (the span is skipped when none are).
    """
    if mode not in ("strict", "lenient"):
        raise ValueError(f"unknown span mode {mode!r}")
    t = align_conjunctions(s.tree) if align_conj else s.tree
    root = to_nested(t)

    spans = sorted(
        set(s.entities),
        key=lambda e: (-(e.end - e.start), e.start, e.label, e.sentence_id),
    )
    for span in spans:
        tok_paths = _token_paths(root)
        n = len(tok_paths)
        if not (0 <= span.start < span.end <= n):
            raise EnrichmentError(
                f"span {span.label}[{span.start},{span.end}) out of range for {n} tokens"
            )
        span_paths = tok_paths[span.start : span.end]
        lca = _common_prefix(span_paths)
        under = [i for i, p in enumerate(tok_paths) if p[: len(lca)] == lca]

        if under == list(range(span.start, span.end)):
            # The span is exactly one node's leaf set: wrap that node.
            if lca == ():
                parent_path: tuple[int, ...] = ()
                lo, hi = 0, len(root[1]) - 1
            else:
                parent_path, lo, hi = lca[:-1], lca[-1], lca[-1]
        else:
            parent_path = lca
            child_of = {i: tok_paths[i][len(lca)] for i in under}
            lo, hi = child_of[span.start], child_of[span.end - 1]

            def covered(k: int) -> bool:
                return all(
                    span.start <= i < span.end for i in under if child_of[i] == k
                )

            if not covered(lo) or not covered(hi):
                if mode == "strict":
                    raise EnrichmentError(
                        f"span {span.label}[{span.start},{span.end}) does not align "
                        "with sibling subtree boundaries"
                    )
                while lo <= hi and not covered(lo):
                    lo += 1
                while hi >= lo and not covered(hi):
                    hi -= 1
                if lo > hi:
                    continue

        parent = _node_at(root, parent_path)
        wrapped = parent[1][lo : hi + 1]
        parent[1][lo : hi + 1] = [(prop(span.label), wrapped)]

    return build_tree(root)


def simplify(t: Tree) -> Tree:
    """Delete Prop-free branches, then collapse single-child chains.

    Deletion never descends into a Prop subtree (its content is data).
    The collapse replaces any non-Prop, non-root node that has exactly
    one child by that child, applied bottom-up to a fixpoint.
    """
    root = to_nested(t)

    def prune(node: Nested) -> Nested | None:
        label, children = node
        if label.kind == PROP:
            return node
        kept = [c for c in (prune(child) for child in children) if c is not None]
        if label.kind == LAMBDA:
            return (label, kept)
        return (label, kept) if kept else None

    pruned = prune(root)
    assert pruned is not None
    return build_tree(_collapse(pruned))


def _collapse(node: Nested) -> Nested:
    label, children = node
    children = [_collapse(c) for c in children]
    if label.kind not in (PROP, LAMBDA) and len(children) == 1:
        return children[0]
    return (label, children)


def reduce(t: Tree) -> Tree:
    """Flatten PoS nodes inside Prop subtrees; re-collapse outside.

    After this, a Prop node's children are its value tokens (plus any
    nested Prop nodes, which are kept intact).
    """
    root = to_nested(t)

    def flatten(node: Nested, inside_prop: bool) -> Nested:
        label, children = node
        inside = inside_prop or label.kind == PROP
        new_children: list[Nested] = []
        for child in children:
            flat = flatten(child, inside)
            if inside and flat[0].kind == SYN:
                new_children.extend(flat[1])
            else:
                new_children.append(flat)
        return (label, new_children)

    return build_tree(_collapse(flatten(root, False)))


def align_conjunctions(t: Tree) -> Tree:
    """Optional pre-pass: wrap coordinated same-tag phrases under CONJ.

    A maximal child run ``X sep X (sep X)*`` where the X's share one Syn
    tag and separators are coordination tags or tokens is re-attached
    under a single ``CONJ`` node.  Off by default in :func:`enrich`.
    """
    root = to_nested(t)

    def is_separator(node: Nested) -> bool:
        label, children = node
        if label.kind == SYN and label.text in _SEPARATOR_TAGS:
            return True
        return label.kind == TOKEN and label.text in _SEPARATOR_TOKENS

    def rewrap(node: Nested) -> Nested:
        label, children = node
        children = [rewrap(c) for c in children]
        if label.kind == SYN and label.text == "CONJ":
            return (label, children)
        out: list[Nested] = []
        i = 0
        while i < len(children):
            head = children[i]
            if head[0].kind != SYN or is_separator(head):
                out.append(head)
                i += 1
                continue
            # Greedily extend a run: head (sep+ same-tag phrase)*
            j = i
            run_end = i
            while True:
                k = j + 1
                while k < len(children) and is_separator(children[k]):
                    k += 1
                if (
                    k < len(children)
                    and k > j + 1
                    and children[k][0].kind == SYN
                    and children[k][0].text == head[0].text
                ):
                    j = k
                    run_end = k
                else:
                    break
            if run_end > i:
                out.append((syn("CONJ"), children[i : run_end + 1]))
                i = run_end + 1
            else:
                out.append(head)
                i += 1
        return (label, out)

    return build_tree(rewrap(root))
