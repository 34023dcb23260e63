"""A grammar of grammars, run through the generic attribute evaluator.

The shape of a well-formed schema grammar can itself be described by an
S-attributed grammar: a root rule followed by structure rules, where each
list step checks name uniqueness and definedness and passes accumulated
name sets upward.  ``conforms_to_meta`` re-derives a grammar under that
meta-grammar and evaluates its validity attribute, giving an independent
implementation to cross-check the direct V1..V9 checks against.

Encoding notes.  A rule listing becomes a right-leaning derivation tree:
one list node per rule, terminated by an "ε" leaf.  Symbol occurrences
become tokens carrying their rendered name ("Grp_1", marked "Rel_2+"),
matched by prefix patterns such as ``Grp_*``.  Property bodies collapse to
a single ``<data>`` token.  Rules that fit no meta-form (a marked group in
a relation body, a three-group relation) yield tokens no pattern accepts,
so evaluation fails and the grammar is rejected.  Definedness accumulates
from the list tail, so defining rules must follow their uses: the root
rule first, then structures outside-in, which is exactly extraction
order.
"""

from __future__ import annotations

from .attributes import AttrEnv, AttributeGrammar, EvaluationError, SemanticRule, evaluate_synthesized
from .grammar import TERMINAL, Grammar, Rule, RhsItem, Symbol
from .tree import (
    COLL,
    GRP,
    LAMBDA_TEXT,
    PROP,
    REL,
    SYN,
    Nested,
    Tree,
    build_tree,
    lam,
    syn,
    token,
)

__all__ = ["MetaEncodingError", "schema_metagrammar", "grammar_derivation", "conforms_to_meta"]

_SPEC = Symbol(SYN, "GrammarSpec")
_ROOT = Symbol(SYN, "RootRule")
_ROOT_LIST = Symbol(SYN, "RootList")
_RULE_LIST = Symbol(SYN, "RuleList")
_PROP_RULE = Symbol(SYN, "PropRule")
_GROUP_RULE = Symbol(SYN, "GroupRule")
_REL_RULE = Symbol(SYN, "RelationRule")
_COLL_GRP_RULE = Symbol(SYN, "CollGroupRule")
_COLL_REL_RULE = Symbol(SYN, "CollRelRule")
_PROP_LIST = Symbol(SYN, "PropList")

_END = Symbol(TERMINAL, "ε")
_TOP = Symbol(TERMINAL, LAMBDA_TEXT)
_DATA = Symbol(TERMINAL, "<data>")
_PROP_T = Symbol(TERMINAL, "Prop_*")
_GRP_T = Symbol(TERMINAL, "Grp_*")
_REL_T = Symbol(TERMINAL, "Rel_*")
_COLL_T = Symbol(TERMINAL, "Coll_*")
_GRP_MARKED_T = Symbol(TERMINAL, "Grp_*+")
_REL_MARKED_T = Symbol(TERMINAL, "Rel_*+")

_SET_KEYS = ("props", "groups", "rels", "colls")


class MetaEncodingError(Exception):
    """The grammar has no derivation under the meta-grammar's shape."""


def _pattern_matches(symbol: Symbol, text: str) -> bool:
    pattern = symbol.text
    if "*" not in pattern:
        return text == pattern
    pre, _, post = pattern.partition("*")
    if len(text) <= len(pre) + len(post):
        return False
    if not text.startswith(pre) or not text.endswith(post):
        return False
    # An unmarked pattern must not swallow a marked occurrence.
    return post.endswith("+") or not text.endswith("+")


def _name(text: str) -> str:
    return text.split("_", 1)[1].rstrip("+")


def _empty_sets(_: list[AttrEnv]) -> AttrEnv:
    env: AttrEnv = {key: frozenset() for key in _SET_KEYS}
    env["ok"] = True
    return env


def _root_cons(key: str) -> SemanticRule:
    def fn(envs: list[AttrEnv]) -> AttrEnv:
        name = _name(str(envs[0]["text"]))
        rest = envs[1]
        out = dict(rest)
        out[key] = rest[key] | {name}  # type: ignore[operator]
        out["ok"] = bool(rest["ok"]) and name not in rest[key]  # type: ignore[operator]
        return out

    return fn


def _rule_cons(key: str, check) -> SemanticRule:
    """List step: require a fresh name in ``key``, then accumulate."""

    def fn(envs: list[AttrEnv]) -> AttrEnv:
        head, rest = envs
        name = str(head["name"])
        out = dict(rest)
        out[key] = rest[key] | {name}  # type: ignore[operator]
        out["ok"] = (
            bool(head["ok"])
            and bool(rest["ok"])
            and name not in rest[key]  # type: ignore[operator]
            and check(head, rest)
        )
        return out

    return fn


def schema_metagrammar() -> AttributeGrammar:
    """Build the meta-grammar with its validity semantics."""
    rules: list[Rule] = []
    semantics: dict[Rule, SemanticRule] = {}

    def add(lhs: Symbol, rhs: tuple[RhsItem, ...], fn: SemanticRule) -> None:
        rule = Rule(lhs, rhs)
        rules.append(rule)
        semantics[rule] = fn

    def spec_fn(envs: list[AttrEnv]) -> AttrEnv:
        root, body = envs
        ok = bool(root["ok"]) and bool(body["ok"])
        # Properties are defined by occurrence, so only the other three
        # kinds listed at the root need defining rules below.
        for key in ("groups", "rels", "colls"):
            ok = ok and root[key] <= body[key]  # type: ignore[operator]
        return {"ok": ok}

    add(_SPEC, (RhsItem(_ROOT), RhsItem(_RULE_LIST)), spec_fn)
    add(_ROOT, (RhsItem(_TOP), RhsItem(_ROOT_LIST)), lambda envs: dict(envs[1]))

    add(_ROOT_LIST, (RhsItem(_END),), _empty_sets)
    add(_ROOT_LIST, (RhsItem(_PROP_T), RhsItem(_ROOT_LIST)), _root_cons("props"))
    add(_ROOT_LIST, (RhsItem(_GRP_T), RhsItem(_ROOT_LIST)), _root_cons("groups"))
    add(_ROOT_LIST, (RhsItem(_REL_T), RhsItem(_ROOT_LIST)), _root_cons("rels"))
    add(_ROOT_LIST, (RhsItem(_COLL_T), RhsItem(_ROOT_LIST)), _root_cons("colls"))

    add(_RULE_LIST, (RhsItem(_END),), _empty_sets)
    add(
        _RULE_LIST,
        (RhsItem(_PROP_RULE), RhsItem(_RULE_LIST)),
        _rule_cons("props", lambda head, rest: True),
    )
    add(
        _RULE_LIST,
        (RhsItem(_GROUP_RULE), RhsItem(_RULE_LIST)),
        _rule_cons("groups", lambda head, rest: True),
    )
    add(
        _RULE_LIST,
        (RhsItem(_REL_RULE), RhsItem(_RULE_LIST)),
        _rule_cons("rels", lambda head, rest: head["groups"] <= rest["groups"]),
    )
    add(
        _RULE_LIST,
        (RhsItem(_COLL_GRP_RULE), RhsItem(_RULE_LIST)),
        _rule_cons("colls", lambda head, rest: head["member"] in rest["groups"]),
    )
    add(
        _RULE_LIST,
        (RhsItem(_COLL_REL_RULE), RhsItem(_RULE_LIST)),
        _rule_cons("colls", lambda head, rest: head["member"] in rest["rels"]),
    )

    add(
        _PROP_RULE,
        (RhsItem(_PROP_T), RhsItem(_DATA)),
        lambda envs: {"name": _name(str(envs[0]["text"])), "ok": True},
    )
    add(
        _GROUP_RULE,
        (RhsItem(_GRP_T), RhsItem(_PROP_LIST)),
        lambda envs: {
            "name": _name(str(envs[0]["text"])),
            "props": envs[1]["names"],
            "ok": bool(envs[1]["ok"]),
        },
    )
    add(
        _REL_RULE,
        (RhsItem(_REL_T), RhsItem(_GRP_T), RhsItem(_GRP_T)),
        lambda envs: {
            "name": _name(str(envs[0]["text"])),
            "groups": frozenset({_name(str(envs[1]["text"])), _name(str(envs[2]["text"]))}),
            "ok": _name(str(envs[1]["text"])) != _name(str(envs[2]["text"])),
        },
    )
    add(
        _COLL_GRP_RULE,
        (RhsItem(_COLL_T), RhsItem(_GRP_MARKED_T)),
        lambda envs: {
            "name": _name(str(envs[0]["text"])),
            "member": _name(str(envs[1]["text"])),
            "ok": True,
        },
    )
    add(
        _COLL_REL_RULE,
        (RhsItem(_COLL_T), RhsItem(_REL_MARKED_T)),
        lambda envs: {
            "name": _name(str(envs[0]["text"])),
            "member": _name(str(envs[1]["text"])),
            "ok": True,
        },
    )

    add(
        _PROP_LIST,
        (RhsItem(_PROP_T),),
        lambda envs: {"names": frozenset({_name(str(envs[0]["text"]))}), "ok": True},
    )

    def prop_list_cons(envs: list[AttrEnv]) -> AttrEnv:
        name = _name(str(envs[0]["text"]))
        rest = envs[1]
        return {
            "names": rest["names"] | {name},  # type: ignore[operator]
            "ok": bool(rest["ok"]) and name not in rest["names"],  # type: ignore[operator]
        }

    add(_PROP_LIST, (RhsItem(_PROP_T), RhsItem(_PROP_LIST)), prop_list_cons)

    grammar = Grammar(rules=tuple(rules), start=_SPEC)
    return AttributeGrammar(base=grammar, semantics=semantics, token_matcher=_pattern_matches)


def _leaf(text: str) -> Nested:
    return (token(text), [])


def _prop_list(rule: Rule) -> Nested:
    items = rule.rhs
    node: Nested = (syn("PropList"), [_leaf(items[-1].display)])
    for item in reversed(items[:-1]):
        node = (syn("PropList"), [_leaf(item.display), node])
    return node


def _rule_form(rule: Rule) -> Nested:
    kind = rule.lhs.kind
    head = _leaf(rule.lhs.display)
    if kind == PROP:
        if all(item.symbol.is_terminal and not item.repeated for item in rule.rhs):
            return (syn("PropRule"), [head, _leaf("<data>")])
        return (syn("PropRule"), [head] + [_leaf(i.display) for i in rule.rhs])
    if kind == GRP:
        return (syn("GroupRule"), [head, _prop_list(rule)])
    if kind == REL:
        return (syn("RelationRule"), [head] + [_leaf(i.display) for i in rule.rhs])
    if kind == COLL:
        body = rule.rhs
        form = "CollGroupRule"
        if len(body) == 1 and body[0].repeated and body[0].symbol.kind == REL:
            form = "CollRelRule"
        return (syn(form), [head] + [_leaf(i.display) for i in body])
    raise MetaEncodingError(f"no meta-form derives {rule.display}")


def grammar_derivation(g: Grammar) -> Tree:
    """Encode a grammar as its derivation tree under the meta-grammar."""
    if not g.rules or g.rules[0].lhs != g.start:
        raise MetaEncodingError("the first rule must define the start symbol")
    if sum(1 for r in g.rules if r.lhs == g.start) != 1:
        raise MetaEncodingError("more than one root rule")
    root, rest = g.rules[0], g.rules[1:]
    root_list: Nested = (syn("RootList"), [_leaf("ε")])
    for item in reversed(root.rhs):
        root_list = (syn("RootList"), [_leaf(item.display), root_list])
    rule_list: Nested = (syn("RuleList"), [_leaf("ε")])
    for rule in reversed(rest):
        rule_list = (syn("RuleList"), [_rule_form(rule), rule_list])
    spec: Nested = (
        syn("GrammarSpec"),
        [(syn("RootRule"), [_leaf(LAMBDA_TEXT), root_list]), rule_list],
    )
    return build_tree((lam(), [spec]))


def conforms_to_meta(g: Grammar) -> bool:
    """Does the grammar derive under the meta-grammar with a true verdict?"""
    try:
        derivation = grammar_derivation(g)
        return bool(evaluate_synthesized(schema_metagrammar(), derivation)["ok"])
    except (MetaEncodingError, EvaluationError):
        return False
