"""Well-formedness checks for structured grammars.

A grammar describes a database schema when it satisfies the nine checks
below (V1..V9): a single root rule listing top-level structures, unique
names per structure kind, groups made of distinct properties, binary
relations over two distinct groups, homogeneous collections, and
repetition marks confined to collection rules.  Property names need no
defining rule: properties derive raw token text and extraction omits
their bodies.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from .grammar import Grammar, Symbol
from .tree import COLL, GRP, PROP, REL, STRUCTURAL_KINDS, SYN

__all__ = ["Violation", "ValidationReport", "validate_grammar"]


@dataclass(frozen=True)
class Violation:
    constraint: str
    subject: str
    message: str


@dataclass(frozen=True)
class ValidationReport:
    valid: bool
    violations: tuple[Violation, ...] = ()

    @property
    def constraint_ids(self) -> list[str]:
        return [v.constraint for v in self.violations]

    def to_dict(self) -> dict:
        return {
            "valid": self.valid,
            "violations": [
                {"constraint": v.constraint, "subject": v.subject, "message": v.message}
                for v in self.violations
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), ensure_ascii=False, indent=2)


def _defined_names(g: Grammar) -> dict[str, set[str]]:
    names: dict[str, set[str]] = {GRP: set(), REL: set(), COLL: set(), PROP: set()}
    for rule in g.rules:
        if rule.lhs.kind in names:
            names[rule.lhs.kind].add(rule.lhs.text)
    return names


def _is_defined(symbol: Symbol, defined: dict[str, set[str]]) -> bool:
    # Properties carry their own data; they are defined by occurrence.
    if symbol.kind == PROP:
        return True
    if symbol.kind in defined:
        return symbol.text in defined[symbol.kind]
    return False


def validate_grammar(g: Grammar) -> ValidationReport:
    """Run checks V1..V9 and report every failure."""
    out: list[Violation] = []
    root_rules = [r for r in g.rules if r.lhs == g.start]
    defined = _defined_names(g)

    # V1: a single root rule.
    if len(root_rules) != 1:
        out.append(
            Violation("V1", g.start.display, f"expected one root rule, found {len(root_rules)}")
        )

    # V2: root bodies list structural symbols, each name at most once.
    for rule in root_rules:
        seen: set[Symbol] = set()
        for item in rule.rhs:
            if item.symbol.kind not in STRUCTURAL_KINDS:
                out.append(
                    Violation(
                        "V2",
                        item.symbol.display,
                        f"root rule lists non-structural symbol {item.symbol.display}",
                    )
                )
            if item.symbol in seen:
                out.append(
                    Violation(
                        "V2",
                        item.symbol.display,
                        f"root rule lists {item.symbol.display} more than once",
                    )
                )
            seen.add(item.symbol)

    # V3: one defining rule per name within each structure kind.
    counted: dict[Symbol, int] = {}
    for rule in g.rules:
        if rule.lhs.kind in (PROP, GRP, REL, COLL):
            counted[rule.lhs] = counted.get(rule.lhs, 0) + 1
    for symbol in [s for s, n in counted.items() if n > 1]:
        out.append(
            Violation("V3", symbol.display, f"{symbol.display} is defined by multiple rules")
        )

    # V4: group bodies are non-empty lists of distinct properties.
    for rule in g.rules_of_kind(GRP):
        names: set[str] = set()
        for item in rule.rhs:
            if item.symbol.kind != PROP:
                out.append(
                    Violation(
                        "V4", rule.lhs.display, f"group body contains {item.symbol.display}"
                    )
                )
            elif item.symbol.text in names:
                out.append(
                    Violation(
                        "V4",
                        rule.lhs.display,
                        f"group repeats property {item.symbol.display}",
                    )
                )
            names.add(item.symbol.text)

    # V5: relation bodies are exactly two distinct groups.
    for rule in g.rules_of_kind(REL):
        shapes = [item.symbol for item in rule.rhs]
        if len(shapes) != 2 or any(s.kind != GRP for s in shapes):
            out.append(
                Violation(
                    "V5",
                    rule.lhs.display,
                    f"relation body must be two groups, got {rule.display}",
                )
            )
        elif shapes[0] == shapes[1]:
            out.append(
                Violation(
                    "V5", rule.lhs.display, f"relation relates {shapes[0].display} to itself"
                )
            )

    # V6: collection bodies are one repeated group or relation, defined.
    for rule in g.rules_of_kind(COLL):
        if (
            len(rule.rhs) != 1
            or not rule.rhs[0].repeated
            or rule.rhs[0].symbol.kind not in (GRP, REL)
        ):
            out.append(
                Violation(
                    "V6",
                    rule.lhs.display,
                    f"collection body must be one repeated group or relation, got {rule.display}",
                )
            )
        elif not _is_defined(rule.rhs[0].symbol, defined):
            out.append(
                Violation(
                    "V6",
                    rule.lhs.display,
                    f"collection member {rule.rhs[0].symbol.display} has no defining rule",
                )
            )

    # V7: property bodies derive token data only.
    for rule in g.rules_of_kind(PROP):
        if any(not item.symbol.is_terminal for item in rule.rhs):
            out.append(
                Violation("V7", rule.lhs.display, f"property body must be data, got {rule.display}")
            )

    # V8: every referenced structure has a defining rule, and no rule is
    # headed by a plain syntactic label (such labels mean structuring is
    # unfinished).
    undefined: list[Symbol] = []
    for rule in g.rules:
        for item in rule.rhs:
            s = item.symbol
            if s.is_terminal or s in undefined:
                continue
            if s.kind == SYN and any(r.lhs == s for r in g.rules):
                continue
            if not _is_defined(s, defined) and s.kind != SYN:
                undefined.append(s)
            elif s.kind == SYN:
                undefined.append(s)
    for s in undefined:
        out.append(Violation("V8", s.display, f"{s.display} is used but never defined"))
    for rule in g.rules:
        if rule.lhs.kind == SYN:
            out.append(
                Violation(
                    "V8",
                    rule.lhs.display,
                    f"rule {rule.display} is headed by an unstructured syntactic label",
                )
            )

    # V9: repetition marks appear only in collection bodies.
    for rule in g.rules:
        if rule.lhs.kind == COLL:
            continue
        for item in rule.rhs:
            if item.repeated:
                out.append(
                    Violation(
                        "V9",
                        rule.lhs.display,
                        f"repetition mark outside a collection: {rule.display}",
                    )
                )
    return ValidationReport(valid=not out, violations=tuple(out))
