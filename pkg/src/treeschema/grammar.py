"""Condensed context-free grammars and their extraction from trees.

A condensed CFG allows right-hand-side items of the form ``X+`` (one or
more ``X``).  Extraction works label-wise: all positions sharing a label
form one class, the classes form a quotient tree, and every internal
class yields a single rule whose right side is the union of observed
child labels.  Prop nodes are the boundary between structure and data:
their contents become cell values, not grammar rules.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .tree import (
    COLL,
    GRP,
    LAMBDA,
    PROP,
    REL,
    SYN,
    TOKEN,
    LAMBDA_TEXT,
    Nested,
    NodeLabel,
    Position,
    Tree,
    build_tree,
    lam,
)

TERMINAL = "terminal"

_PREFIXES = {"Prop_": PROP, "Grp_": GRP, "Rel_": REL, "Coll_": COLL}
_SYMBOL_PREFIX = {v: k for k, v in _PREFIXES.items()}


class GrammarError(Exception):
    """Raised on malformed grammar text or rule construction."""


@dataclass(frozen=True)
class Symbol:
    """A grammar symbol: a non-Token node label kind, or a terminal."""

    kind: str
    text: str = ""

    @property
    def is_terminal(self) -> bool:
        return self.kind == TERMINAL

    @property
    def display(self) -> str:
        if self.kind == LAMBDA:
            return LAMBDA_TEXT
        if self.kind in _SYMBOL_PREFIX:
            return _SYMBOL_PREFIX[self.kind] + self.text
        return self.text

    def __repr__(self) -> str:
        return f"Symbol({self.display!r})"


def symbol_from_label(label: NodeLabel) -> Symbol:
    if label.kind == TOKEN:
        return Symbol(TERMINAL, label.text)
    return Symbol(label.kind, label.text)


START = Symbol(LAMBDA)


@dataclass(frozen=True)
class RhsItem:
    symbol: Symbol
    repeated: bool = False

    @property
    def display(self) -> str:
        return self.symbol.display + ("+" if self.repeated else "")


@dataclass(frozen=True)
class Rule:
    lhs: Symbol
    rhs: tuple[RhsItem, ...]

    def __post_init__(self):
        if self.lhs.is_terminal:
            raise GrammarError(f"terminal {self.lhs.display} cannot head a rule")
        if not self.rhs:
            raise GrammarError(f"rule for {self.lhs.display} has an empty right side")

    @property
    def display(self) -> str:
        return f"{self.lhs.display} -> {' '.join(item.display for item in self.rhs)}"


@dataclass(frozen=True)
class Grammar:
    """An ordered rule list with a λ start symbol.

    Well-formedness beyond rule shape (single root rule, definedness of
    referenced names, and so on) is the validation module's job, so that
    invalid grammars can be represented and reported on.
    """

    rules: tuple[Rule, ...]
    start: Symbol = START

    def rules_for(self, lhs: Symbol) -> list[Rule]:
        return [r for r in self.rules if r.lhs == lhs]

    def rules_of_kind(self, kind: str) -> list[Rule]:
        return [r for r in self.rules if r.lhs.kind == kind]

    @property
    def nonterminals(self) -> set[Symbol]:
        found = {r.lhs for r in self.rules}
        for rule in self.rules:
            for item in rule.rhs:
                if not item.symbol.is_terminal:
                    found.add(item.symbol)
        return found

    @property
    def terminals(self) -> set[Symbol]:
        return {
            item.symbol for rule in self.rules for item in rule.rhs if item.symbol.is_terminal
        }

    def to_text(self) -> str:
        return "\n".join(rule.display for rule in self.rules) + ("\n" if self.rules else "")


@dataclass(frozen=True)
class LabelPartition:
    """Positions grouped by node label (the relation x R_l y iff l(x) = l(y))."""

    classes: dict[NodeLabel, frozenset[Position]] = field(default_factory=dict)

    def class_of(self, label: NodeLabel) -> frozenset[Position]:
        return self.classes[label]


def label_classes(t: Tree) -> LabelPartition:
    groups: dict[NodeLabel, set[Position]] = {}
    for u in t.positions():
        groups.setdefault(t.label(u), set()).add(u)
    return LabelPartition({label: frozenset(ps) for label, ps in groups.items()})


def _base(label: NodeLabel) -> NodeLabel:
    return label.with_mark(False) if label.repeated else label


def _edge_table(t: Tree):
    """First-occurrence child order and repetition marks per label edge.

    Keys are mark-stripped labels.  An edge is marked when some position
    of the parent label has two or more children of the child label, when
    the child label itself carries a mark (quotient input), or when the
    parent is a Coll node (collections denote extents, so their members
    are repeatable by definition).
    """
    order: dict[NodeLabel, list[NodeLabel]] = {}
    marks: dict[tuple[NodeLabel, NodeLabel], bool] = {}
    for u in t.positions():
        parent = _base(t.label(u))
        children = t.children(u)
        if not children:
            continue
        seq = order.setdefault(parent, [])
        counts: dict[NodeLabel, int] = {}
        for c in children:
            raw = t.label(c)
            child = _base(raw)
            if child not in seq:
                seq.append(child)
            counts[child] = counts.get(child, 0) + 1
            if raw.repeated:
                marks[(parent, child)] = True
        for child, k in counts.items():
            if k >= 2 or parent.kind == COLL:
                marks[(parent, child)] = True
    return order, marks


def quotient_tree(t: Tree) -> Tree:
    """Collapse label classes into a single tree of class representatives.

    Each class appears once under every parent class that reaches it (a
    multi-parent class is duplicated), children ordered by first
    occurrence in a pre-order scan.  Edges observed with sibling
    duplicates carry the ``+`` mark on the child label.  A class already
    being expanded on the current path is emitted without children, so
    self-nesting labels cannot recurse.
    """
    order, marks = _edge_table(t)

    def expand(label: NodeLabel, path: frozenset[NodeLabel]) -> Nested:
        children: list[Nested] = []
        if label not in path:
            for child in order.get(label, []):
                marked = marks.get((label, child), False)
                sub_label, sub_children = expand(child, path | {label})
                children.append((sub_label.with_mark(marked), sub_children))
        return (label, children)

    return build_tree(expand(_base(t.label(())), frozenset()))


def extract_grammar(t: Tree) -> Grammar:
    """Read the condensed grammar off a tree via its label classes.

    One rule per internal non-Prop label, ordered by the label's first
    internal occurrence; the right side is the union of child labels over
    all positions of the class.  Token children become terminals.  Prop
    nodes produce no rules: what is below them is instance data.
    """
    order, marks = _edge_table(t)
    lhs_order: list[NodeLabel] = []
    for u in t.positions():
        label = _base(t.label(u))
        if t.num_children(u) == 0 or label.kind == PROP:
            continue
        if label not in lhs_order:
            lhs_order.append(label)

    rules = []
    for lhs in lhs_order:
        items = tuple(
            RhsItem(symbol_from_label(child), marks.get((lhs, child), False))
            for child in order[lhs]
        )
        rules.append(Rule(symbol_from_label(lhs), items))
    return Grammar(tuple(rules))


def parse_grammar_text(text: str) -> Grammar:
    """Parse the one-rule-per-line format produced by ``Grammar.to_text``.

    A bare right-side word is taken as a Syn non-terminal when some rule
    defines it and as a terminal otherwise.
    """
    raw: list[tuple[str, list[tuple[str, bool]]]] = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line:
            continue
        if "->" not in line:
            raise GrammarError(f"line {lineno}: missing '->'")
        lhs_text, rhs_text = line.split("->", 1)
        lhs_text = lhs_text.strip()
        if not lhs_text:
            raise GrammarError(f"line {lineno}: empty left side")
        rhs_tokens = rhs_text.split()
        if not rhs_tokens:
            raise GrammarError(f"line {lineno}: empty right side")
        rhs = []
        for tok in rhs_tokens:
            repeated = tok.endswith("+") and len(tok) > 1
            rhs.append((tok[:-1] if repeated else tok, repeated))
        raw.append((lhs_text, rhs))

    defined = {lhs for lhs, _ in raw}

    def to_symbol(word: str, is_lhs: bool) -> Symbol:
        if word == LAMBDA_TEXT:
            return START
        for prefix, kind in _PREFIXES.items():
            if word.startswith(prefix) and len(word) > len(prefix):
                return Symbol(kind, word[len(prefix):])
        if is_lhs or word in defined:
            return Symbol(SYN, word)
        return Symbol(TERMINAL, word)

    rules = tuple(
        Rule(
            to_symbol(lhs, True),
            tuple(RhsItem(to_symbol(word, False), rep) for word, rep in rhs),
        )
        for lhs, rhs in raw
    )
    return Grammar(rules)
