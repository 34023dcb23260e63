"""Synthesized-attribute evaluation over derivation trees.

An attribute grammar pairs a condensed CFG with one semantic function per
rule.  Evaluation walks a derivation tree bottom-up: token leaves yield a
``{"text": ...}`` environment, inner nodes yield whatever their rule's
semantic function computes from the child environments.  Only synthesized
(leaf-to-root) attributes are supported.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

from .grammar import TERMINAL, Grammar, Rule, RhsItem, Symbol, symbol_from_label
from .tree import (
    LAMBDA,
    SYN,
    TOKEN,
    Nested,
    Position,
    Tree,
    build_tree,
    format_position,
    lam,
    syn,
    token,
)

__all__ = [
    "AttrEnv",
    "SemanticRule",
    "TokenMatcher",
    "EvaluationError",
    "AttributeGrammar",
    "evaluate_synthesized",
    "binary_number_grammar",
    "binary_derivation",
]

AttrEnv = dict[str, object]
SemanticRule = Callable[[list[AttrEnv]], AttrEnv]
TokenMatcher = Callable[[Symbol, str], bool]


class EvaluationError(Exception):
    """No rule of the grammar derives the children found at some node."""


def _text_equals(symbol: Symbol, text: str) -> bool:
    return symbol.text == text


@dataclass(frozen=True)
class AttributeGrammar:
    """A condensed CFG plus per-rule semantic functions.

    ``semantics`` may omit rules; omitted rules contribute an empty
    environment.  ``token_matcher`` decides whether a terminal symbol in a
    rule body accepts a given token text (exact text equality by default).
    """

    base: Grammar
    semantics: dict[Rule, SemanticRule] = field(default_factory=dict)
    token_matcher: TokenMatcher = _text_equals


def _match_rhs(
    ag: AttributeGrammar,
    rhs: tuple[RhsItem, ...],
    children: Sequence[Symbol | str],
) -> bool:
    """Does the child sequence spell out the rule body?

    Token children are given as their text and matched through the
    grammar's token matcher; other children as their symbols.  Repeated
    items absorb one or more children, with backtracking.
    """

    def accepts(item: RhsItem, child: Symbol | str) -> bool:
        if isinstance(child, str):
            return item.symbol.is_terminal and ag.token_matcher(item.symbol, child)
        return item.symbol == child

    def walk(i: int, j: int) -> bool:
        if i == len(rhs):
            return j == len(children)
        item = rhs[i]
        if not item.repeated:
            return j < len(children) and accepts(item, children[j]) and walk(i + 1, j + 1)
        k = j
        while k < len(children) and accepts(item, children[k]):
            k += 1
            if walk(i + 1, k):
                return True
        return False

    return walk(0, 0)


def evaluate_synthesized(ag: AttributeGrammar, d: Tree) -> AttrEnv:
    """Evaluate a derivation tree bottom-up and return the root environment.

    ``d`` is rooted at the top marker node.  When the grammar's start symbol
    is the top marker itself the whole tree is one derivation; otherwise the
    root must have exactly one child labelled with the start symbol and
    evaluation happens there.
    """
    if ag.base.start.kind == LAMBDA:
        return _eval_at(ag, d, ())
    roots = [u for u in d.children(()) if symbol_from_label(d.label(u)) == ag.base.start]
    if len(roots) != 1:
        raise EvaluationError(
            f"expected one child labelled {ag.base.start.display} under the root, "
            f"found {len(roots)}"
        )
    return _eval_at(ag, d, roots[0])


def _eval_at(ag: AttributeGrammar, d: Tree, u: Position) -> AttrEnv:
    label = d.label(u)
    if label.kind == TOKEN:
        return {"text": label.text}
    lhs = symbol_from_label(label)
    children = d.children(u)
    shapes: list[Symbol | str] = []
    for c in children:
        cl = d.label(c)
        shapes.append(cl.text if cl.kind == TOKEN else symbol_from_label(cl))
    for rule in ag.base.rules_for(lhs):
        if _match_rhs(ag, rule.rhs, shapes):
            envs = [_eval_at(ag, d, c) for c in children]
            fn = ag.semantics.get(rule)
            return fn(envs) if fn is not None else {}
    raise EvaluationError(
        f"no rule for {lhs.display} matches the children at {format_position(u)}"
    )


def binary_number_grammar() -> AttributeGrammar:
    """Left-recursive grammar of binary numerals with a ``value`` attribute.

    P -> 0 | 1 | P 0 | P 1, where appending a bit doubles the value and
    adds the bit.
    """
    p = Symbol(SYN, "P")
    zero = Symbol(TERMINAL, "0")
    one = Symbol(TERMINAL, "1")
    r_zero = Rule(p, (RhsItem(zero),))
    r_one = Rule(p, (RhsItem(one),))
    r_shift0 = Rule(p, (RhsItem(p), RhsItem(zero)))
    r_shift1 = Rule(p, (RhsItem(p), RhsItem(one)))
    semantics: dict[Rule, SemanticRule] = {
        r_zero: lambda envs: {"value": 0},
        r_one: lambda envs: {"value": 1},
        r_shift0: lambda envs: {"value": 2 * int(envs[0]["value"])},  # type: ignore[call-overload]
        r_shift1: lambda envs: {"value": 2 * int(envs[0]["value"]) + 1},  # type: ignore[call-overload]
    }
    grammar = Grammar(rules=(r_zero, r_one, r_shift0, r_shift1), start=p)
    return AttributeGrammar(base=grammar, semantics=semantics)


def binary_derivation(word: str) -> Tree:
    """Build the left-linear derivation tree of a binary word."""
    if not word or any(ch not in "01" for ch in word):
        raise ValueError(f"not a binary word: {word!r}")
    node: Nested = (syn("P"), [(token(word[0]), [])])
    for ch in word[1:]:
        node = (syn("P"), [node, (token(ch), [])])
    return build_tree((lam(), [node]))
