"""Schema exporters: grammar text, relational DDL, and a graph schema.

Exports refuse invalid grammars; the refusal carries the validation
report so callers can surface the reasons.  Structure names come from
the grammar's ids; a label map (display name to human name) may rename
tables, columns, node types, and edge types.
"""

from __future__ import annotations

import json
import re

from .grammar import Grammar, Rule
from .tree import COLL, GRP, PROP, REL
from .validation import ValidationReport, validate_grammar

__all__ = [
    "ExportError",
    "export_grammar_text",
    "export_relational_ddl",
    "export_graph_schema",
]

LabelMap = dict[str, str]


class ExportError(Exception):
    """The grammar does not validate, so no schema can be derived."""

    def __init__(self, report: ValidationReport) -> None:
        reasons = "; ".join(v.message for v in report.violations[:3])
        super().__init__(f"grammar is not valid: {reasons}")
        self.report = report


def export_grammar_text(g: Grammar) -> str:
    """Rules one per line, in definition order."""
    return g.to_text()


def _checked(g: Grammar) -> None:
    report = validate_grammar(g)
    if not report.valid:
        raise ExportError(report)


def _identifier(name: str) -> str:
    cleaned = re.sub(r"\W", "_", name, flags=re.UNICODE)
    return cleaned or "_"


def _named(mapping: LabelMap | None, display: str, default: str) -> str:
    if mapping and display in mapping:
        return _identifier(mapping[display])
    return _identifier(default)


def _group_props(rule: Rule) -> list[str]:
    return [item.symbol.display for item in rule.rhs if item.symbol.kind == PROP]


def export_relational_ddl(g: Grammar, label_map: LabelMap | None = None) -> str:
    """ANSI-style DDL: one table per group, one join table per relation."""
    _checked(g)
    table_names = {
        rule.lhs.display: _named(label_map, rule.lhs.display, f"GRP_{rule.lhs.text}")
        for rule in g.rules_of_kind(GRP)
    }
    statements: list[str] = []
    for rule in g.rules_of_kind(GRP):
        table = table_names[rule.lhs.display]
        columns = ["  id TEXT PRIMARY KEY"]
        for item in rule.rhs:
            if item.symbol.kind == PROP:
                columns.append(
                    f"  {_named(label_map, item.symbol.display, item.symbol.text)} TEXT"
                )
        statements.append(f"CREATE TABLE {table} (\n" + ",\n".join(columns) + "\n);")
    for rule in g.rules_of_kind(REL):
        table = _named(label_map, rule.lhs.display, f"REL_{rule.lhs.text}")
        ends = [item.symbol for item in rule.rhs]
        columns = []
        constraints = []
        for symbol in ends:
            column = f"id_{_identifier(symbol.text)}"
            columns.append(f"  {column} TEXT NOT NULL")
            constraints.append(
                f"  FOREIGN KEY ({column}) REFERENCES {table_names[symbol.display]}(id)"
            )
        statements.append(
            f"CREATE TABLE {table} (\n" + ",\n".join(columns + constraints) + "\n);"
        )
    return "\n\n".join(statements) + ("\n" if statements else "")


def export_graph_schema(g: Grammar, label_map: LabelMap | None = None) -> str:
    """JSON graph schema: groups as node types, relations as edge types."""
    _checked(g)
    node_names = {
        rule.lhs.display: _named(label_map, rule.lhs.display, rule.lhs.display)
        for rule in g.rules_of_kind(GRP)
    }
    nodes = [
        {
            "name": node_names[rule.lhs.display],
            "properties": [
                _named(label_map, p, p.split("_", 1)[1]) for p in _group_props(rule)
            ],
        }
        for rule in g.rules_of_kind(GRP)
    ]
    edges = [
        {
            "name": _named(label_map, rule.lhs.display, rule.lhs.display),
            "source": node_names[rule.rhs[0].symbol.display],
            "target": node_names[rule.rhs[1].symbol.display],
        }
        for rule in g.rules_of_kind(REL)
    ]
    collections = [
        {
            "name": rule.lhs.display,
            "member": rule.rhs[0].symbol.display,
            "member_kind": "relation" if rule.rhs[0].symbol.kind == REL else "group",
        }
        for rule in g.rules_of_kind(COLL)
    ]
    payload = {"nodes": nodes, "edges": edges, "collections": collections}
    return json.dumps(payload, ensure_ascii=False, indent=2) + "\n"
