"""Corpus ingestion: line-delimited JSON records of trees plus entity spans."""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from .enrich import AnnotatedSentence, EntitySpan
from .tree import ParseError, Tree, parse_bracketed, token_leaves

__all__ = ["CorpusError", "CorpusRecord", "load_corpus"]


class CorpusError(Exception):
    """A corpus file or one of its records cannot be used."""


@dataclass(frozen=True)
class CorpusRecord:
    id: str
    tree: str
    entities: tuple[dict, ...]


def _parse_record(obj: dict, lineno: int) -> CorpusRecord:
    try:
        record_id = str(obj["id"])
        tree_text = obj["tree"]
        entities = obj.get("entities", [])
    except (KeyError, TypeError) as exc:
        raise CorpusError(f"line {lineno}: record missing field {exc}") from exc
    if not isinstance(tree_text, str) or not isinstance(entities, list):
        raise CorpusError(f"line {lineno}: malformed record fields")
    return CorpusRecord(id=record_id, tree=tree_text, entities=tuple(entities))


def _to_sentence(record: CorpusRecord) -> AnnotatedSentence:
    try:
        tree: Tree = parse_bracketed(record.tree)
    except ParseError as exc:
        raise CorpusError(f"record {record.id}: {exc}") from exc
    token_count = len(token_leaves(tree))
    spans = []
    for raw in record.entities:
        try:
            start, end, label = int(raw["start"]), int(raw["end"]), str(raw["label"])
        except (KeyError, TypeError, ValueError) as exc:
            raise CorpusError(f"record {record.id}: malformed entity {raw!r}") from exc
        if not 0 <= start < end <= token_count:
            raise CorpusError(
                f"record {record.id}: span [{start}, {end}) outside the"
                f" {token_count}-token sentence"
            )
        spans.append(EntitySpan(start=start, end=end, label=label, sentence_id=record.id))
    return AnnotatedSentence(id=record.id, tree=tree, entities=spans)


def load_corpus(path: str | Path) -> list[AnnotatedSentence]:
    """Read one JSON record per line; order preserved, blank lines skipped."""
    sentences: list[AnnotatedSentence] = []
    text = Path(path).read_text(encoding="utf-8")
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise CorpusError(f"line {lineno}: invalid JSON ({exc.msg})") from exc
        sentences.append(_to_sentence(_parse_record(obj, lineno)))
    return sentences
