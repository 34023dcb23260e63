"""Ordered labelled trees over integer-sequence positions.

A tree is a prefix-closed, sibling-closed set of positions (tuples of
child indices, the empty tuple being the root) together with a label for
each position.  The root label is always ``lam()``; token labels appear
only at leaves.  Trees are immutable values: every transformation in this
package builds a new tree.

The bracketed text format mirrors treebank conventions::

    (λ (NP (DT The) (NN heart) (NN rate)) (VP (VBD was) ...))

Inner tags become syntactic labels, bare words become tokens, and tags of
the form ``Prop_X``, ``Grp_X``, ``Rel_X`` or ``Coll_X`` become structural
labels.  The top node is always the root and is relabelled ``λ``.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Iterable, Iterator, Mapping

Position = tuple[int, ...]

EPSILON: Position = ()

# Label kinds.
LAMBDA = "lambda"
SYN = "syn"
PROP = "prop"
GRP = "grp"
REL = "rel"
COLL = "coll"
TOKEN = "token"

STRUCTURAL_KINDS = (PROP, GRP, REL, COLL)

_KIND_PREFIX = {PROP: "Prop_", GRP: "Grp_", REL: "Rel_", COLL: "Coll_"}
_PREFIX_KIND = {v: k for k, v in _KIND_PREFIX.items()}

LAMBDA_TEXT = "λ"


class TreeError(Exception):
    """Base error for tree construction and parsing problems."""


class ParseError(TreeError):
    """Raised on malformed bracketed text; carries the byte offset."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (byte offset {offset})")
        self.offset = offset


class PositionError(TreeError):
    """Raised when a position is outside a tree's domain."""


def parse_position(text: str) -> Position:
    """Parse a dotted position such as ``"1.1.0"``; ``""`` or ``"ε"`` is the root."""
    if text in ("", "ε"):
        return EPSILON
    try:
        parts = tuple(int(p) for p in text.split("."))
    except ValueError:
        raise PositionError(f"malformed position {text!r}") from None
    if any(p < 0 for p in parts):
        raise PositionError(f"negative index in position {text!r}")
    return parts


def format_position(pos: Position) -> str:
    return ".".join(str(i) for i in pos) if pos else "ε"


@dataclass(frozen=True)
class NodeLabel:
    """A node label: kind plus its text (tag, name or token content).

    ``repeated`` marks quotient-tree labels that stand for a repeatable
    child slot; instance trees never carry it.
    """

    kind: str
    text: str = ""
    repeated: bool = False

    @property
    def is_structural(self) -> bool:
        return self.kind in STRUCTURAL_KINDS

    @property
    def display(self) -> str:
        if self.kind == LAMBDA:
            base = LAMBDA_TEXT
        elif self.kind in _KIND_PREFIX:
            base = _KIND_PREFIX[self.kind] + self.text
        else:
            base = self.text
        return base + "+" if self.repeated else base

    def with_mark(self, repeated: bool = True) -> "NodeLabel":
        return replace(self, repeated=repeated)

    def __repr__(self) -> str:  # keep test failures readable
        return f"NodeLabel({self.display!r})"


def lam() -> NodeLabel:
    return NodeLabel(LAMBDA)


def syn(tag: str) -> NodeLabel:
    return NodeLabel(SYN, tag)


def prop(name: str) -> NodeLabel:
    return NodeLabel(PROP, name)


def grp(name: str) -> NodeLabel:
    return NodeLabel(GRP, name)


def rel(name: str) -> NodeLabel:
    return NodeLabel(REL, name)


def coll(name: str) -> NodeLabel:
    return NodeLabel(COLL, name)


def token(text: str) -> NodeLabel:
    return NodeLabel(TOKEN, text)


def label_from_tag(tag: str) -> NodeLabel:
    """Map an inner-node tag from bracketed text to a label."""
    repeated = tag.endswith("+") and len(tag) > 1
    if repeated:
        tag = tag[:-1]
    if tag == LAMBDA_TEXT:
        base = lam()
    else:
        for prefix, kind in _PREFIX_KIND.items():
            if tag.startswith(prefix):
                name = tag[len(prefix):]
                if not name:
                    raise TreeError(f"structural tag {tag!r} has an empty name")
                base = NodeLabel(kind, name)
                break
        else:
            base = syn(tag)
    return base.with_mark(True) if repeated else base


@dataclass(frozen=True)
class TreeViolation:
    """A single violated tree invariant, reported by validate_domain."""

    kind: str  # prefix | sibling | root_label | lambda_position | token_position
    position: Position
    message: str


class Tree:
    """An immutable ordered labelled tree.

    The constructor stores the mapping as given and performs no checks;
    use :func:`validate_domain` to audit arbitrary mappings, or build
    trees through :func:`build_tree` / :func:`parse_bracketed` which only
    produce valid ones.
    """

    __slots__ = ("_labels", "_nchildren", "_order")

    def __init__(self, labels: Mapping[Position, NodeLabel]):
        order = sorted(labels)  # tuple order == pre-order
        self._labels: dict[Position, NodeLabel] = {u: labels[u] for u in order}
        self._order: tuple[Position, ...] = tuple(order)
        counts: dict[Position, int] = {u: 0 for u in order}
        for u in order:
            if u:
                parent = u[:-1]
                if parent in counts:
                    counts[parent] += 1
        self._nchildren = counts

    @property
    def domain(self) -> frozenset[Position]:
        return frozenset(self._labels)

    def positions(self) -> tuple[Position, ...]:
        """All positions in pre-order (document order)."""
        return self._order

    def __len__(self) -> int:
        return len(self._labels)

    def __contains__(self, pos: Position) -> bool:
        return pos in self._labels

    def label(self, pos: Position) -> NodeLabel:
        try:
            return self._labels[pos]
        except KeyError:
            raise PositionError(f"position {format_position(pos)} not in tree") from None

    def num_children(self, pos: Position) -> int:
        if pos not in self._labels:
            raise PositionError(f"position {format_position(pos)} not in tree")
        return self._nchildren[pos]

    def children(self, pos: Position) -> list[Position]:
        return [pos + (i,) for i in range(self.num_children(pos))]

    def is_leaf(self, pos: Position) -> bool:
        return self.num_children(pos) == 0

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Tree):
            return NotImplemented
        return self._labels == other._labels

    def __repr__(self) -> str:
        try:
            return f"Tree({serialize_bracketed(self)!r})"
        except TreeError:
            return f"Tree(<{len(self)} positions>)"


Nested = tuple[NodeLabel, list]  # (label, [children...]), leaves have []


def build_tree(nested: Nested) -> Tree:
    """Build a tree from nested ``(label, children)`` pairs.

    The top label is forced to ``λ`` so the result satisfies the root
    invariant regardless of what the caller passed.
    """
    labels: dict[Position, NodeLabel] = {}

    def walk(node: Nested, pos: Position) -> None:
        label, children = node
        labels[pos] = label if pos else lam()
        for i, child in enumerate(children):
            walk(child, pos + (i,))

    walk(nested, EPSILON)
    return Tree(labels)


def to_nested(t: Tree, root: Position = EPSILON) -> Nested:
    """Inverse of :func:`build_tree`, from any anchor downwards."""
    return (t.label(root), [to_nested(t, c) for c in t.children(root)])


def validate_domain(t: Tree) -> list[TreeViolation]:
    """Report every violated closure or label-placement invariant.

    Empty result iff the tree is valid: domain prefix- and sibling-closed,
    root labelled λ, λ nowhere else, tokens only at leaves.
    """
    violations: list[TreeViolation] = []
    domain = t.domain
    for u in sorted(domain):
        if u and u[:-1] not in domain:
            violations.append(
                TreeViolation("prefix", u, f"parent {format_position(u[:-1])} missing")
            )
        if u and u[-1] > 0:
            left = u[:-1] + (u[-1] - 1,)
            if left not in domain:
                violations.append(
                    TreeViolation("sibling", u, f"left sibling {format_position(left)} missing")
                )
        label = t.label(u)
        if u == EPSILON:
            if label.kind != LAMBDA:
                violations.append(TreeViolation("root_label", u, "root must be labelled λ"))
        elif label.kind == LAMBDA:
            violations.append(TreeViolation("lambda_position", u, "λ may only label the root"))
        if label.kind == TOKEN and t.num_children(u) > 0:
            violations.append(TreeViolation("token_position", u, "token labels only leaves"))
    return violations


def leaves(t: Tree) -> list[tuple[Position, NodeLabel]]:
    """Leaf positions with labels, in document order."""
    return [(u, t.label(u)) for u in t.positions() if t.is_leaf(u)]


def token_leaves(t: Tree) -> list[Position]:
    """Positions of token-labelled leaves, in document order."""
    return [u for u, lab in leaves(t) if lab.kind == TOKEN]


@dataclass(frozen=True)
class Subtree:
    """A view of the positions of ``base`` at or below ``anchor``.

    Positions keep their absolute paths, so a subtree is generally not a
    tree itself; it is the unit the similarity measures compare.
    """

    base: Tree
    anchor: Position

    def positions(self) -> Iterator[Position]:
        stack = [self.anchor]
        while stack:
            u = stack.pop()
            yield u
            stack.extend(reversed(self.base.children(u)))

    def label(self) -> NodeLabel:
        return self.base.label(self.anchor)

    def depth(self) -> int:
        return len(self.anchor)

    def prop_names(self) -> frozenset[str]:
        """Names of all Prop nodes within the view."""
        return frozenset(
            self.base.label(u).text for u in self.positions() if self.base.label(u).kind == PROP
        )

    def child_labels(self) -> list[NodeLabel]:
        return [self.base.label(c) for c in self.base.children(self.anchor)]


def subtree_at(t: Tree, pos: Position) -> Subtree:
    if pos not in t:
        raise PositionError(f"position {format_position(pos)} not in tree")
    return Subtree(t, pos)


def tree_ancestor(s: Subtree, i: int) -> Subtree:
    """The i-th tree-ancestor: drop the last ``i`` steps of the anchor."""
    if i < 0 or i > len(s.anchor):
        raise PositionError(
            f"ancestor level {i} out of range for anchor {format_position(s.anchor)}"
        )
    return Subtree(s.base, s.anchor[: len(s.anchor) - i] if i else s.anchor)


def _tokenize(text: str) -> Iterator[tuple[str, int]]:
    """Yield (token, char_offset); tokens are parens or runs of plain chars."""
    i, n = 0, len(text)
    while i < n:
        c = text[i]
        if c.isspace():
            i += 1
        elif c in "()":
            yield c, i
            i += 1
        else:
            j = i
            while j < n and not text[j].isspace() and text[j] not in "()":
                j += 1
            yield text[i:j], i
            i = j


def _byte_offset(text: str, char_offset: int) -> int:
    return len(text[:char_offset].encode("utf-8"))


def parse_bracketed(text: str) -> Tree:
    """Parse bracketed treebank text into a tree.

    Whitespace between tokens is insignificant.  Raises
    :class:`ParseError` with a byte offset on unbalanced or empty forms.
    """
    tokens = list(_tokenize(text))
    if not tokens:
        raise ParseError("empty input", 0)

    pos_iter = iter(tokens)
    stack: list[Nested] = []
    root: Nested | None = None

    for tok, off in pos_iter:
        boff = _byte_offset(text, off)
        if tok == "(":
            try:
                head, head_off = next(pos_iter)
            except StopIteration:
                raise ParseError("form ends after '('", _byte_offset(text, len(text)))
            if head in "()":
                raise ParseError("expected a tag after '('", _byte_offset(text, head_off))
            if root is not None and not stack:
                raise ParseError("trailing content after top form", boff)
            node: Nested = (label_from_tag(head), [])
            if stack:
                stack[-1][1].append(node)
            else:
                root = node
            stack.append(node)
        elif tok == ")":
            if not stack:
                raise ParseError("unbalanced ')'", boff)
            stack.pop()
        else:
            if not stack:
                raise ParseError(f"word {tok!r} outside any form", boff)
            stack[-1][1].append((token(tok), []))

    if stack:
        raise ParseError("unbalanced '(': form never closed", _byte_offset(text, len(text)))
    assert root is not None
    for pos_label, _ in _iter_nested(root):
        if pos_label.kind == LAMBDA and pos_label is not root[0]:
            raise ParseError("λ may only label the top form", 0)
    return build_tree(root)


def _iter_nested(node: Nested) -> Iterator[Nested]:
    yield node
    for child in node[1]:
        yield from _iter_nested(child)


def serialize_bracketed(t: Tree, root: Position = EPSILON) -> str:
    """Render the tree in the bracketed format (single line).

    Inverse of :func:`parse_bracketed` for trees whose tokens contain no
    whitespace or parentheses.
    """
    def render(u: Position) -> str:
        label = t.label(u)
        if label.kind == TOKEN:
            if not label.text or any(c.isspace() or c in "()" for c in label.text):
                raise TreeError(f"token {label.text!r} cannot be serialized")
            return label.text
        parts = [label.display] + [render(c) for c in t.children(u)]
        return "(" + " ".join(parts) + ")"

    label = t.label(root)
    if label.kind == TOKEN:
        raise TreeError("cannot serialize a bare token as a tree")
    return render(root)
