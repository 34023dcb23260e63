"""Entity incorporation (enrich) and the simplify/reduce passes."""

from __future__ import annotations

import pytest

import treeschema as ts
from conftest import HEART_RATE_ENRICHED, HEART_RATE_REDUCED


def brk(t: ts.Tree) -> str:
    return ts.serialize_bracketed(t)


class TestEnrich:
    def test_heart_rate_golden(self, heart_rate_sentence):
        assert brk(ts.enrich(heart_rate_sentence)) == HEART_RATE_ENRICHED

    def test_modes_agree_on_aligned_spans(self, heart_rate_sentence):
        strict = ts.enrich(heart_rate_sentence, mode="strict")
        lenient = ts.enrich(heart_rate_sentence, mode="lenient")
        assert strict == lenient

    def test_nested_spans_nest_longest_first(self):
        s = ts.AnnotatedSentence(
            id="n",
            tree=ts.parse_bracketed("(S (NP (NN heart) (NN rate)))"),
            entities=[ts.EntitySpan(0, 2, "SOSY"), ts.EntitySpan(0, 1, "ANAT")],
        )
        # The outer span covers NP's whole leaf set, so it wraps NP itself;
        # the inner span then nests inside it.
        assert brk(ts.enrich(s)) == "(λ (Prop_SOSY (NP (NN (Prop_ANAT heart)) (NN rate))))"

    def test_misaligned_span_strict_raises(self):
        s = ts.AnnotatedSentence(
            id="m",
            tree=ts.parse_bracketed("(S (NP (NN a) (NN b)) (VP (VB c)))"),
            entities=[ts.EntitySpan(1, 3, "X")],
        )
        with pytest.raises(ts.EnrichmentError):
            ts.enrich(s, mode="strict")

    def test_misaligned_span_lenient_keeps_covered_part(self):
        s = ts.AnnotatedSentence(
            id="m",
            tree=ts.parse_bracketed("(S (NP (NN a) (NN b)) (VP (VB c)))"),
            entities=[ts.EntitySpan(1, 3, "X")],
        )
        # Only the VP subtree is fully inside [1, 3); NP is split and dropped.
        assert brk(ts.enrich(s, mode="lenient")) == "(λ (NP (NN a) (NN b)) (Prop_X (VP (VB c))))"

    def test_out_of_range_span_rejected_in_both_modes(self):
        s = ts.AnnotatedSentence(
            id="r",
            tree=ts.parse_bracketed("(S (NN a))"),
            entities=[ts.EntitySpan(0, 2, "X")],
        )
        for mode in ("strict", "lenient"):
            with pytest.raises(ts.EnrichmentError):
                ts.enrich(s, mode=mode)

    def test_unknown_mode_rejected(self, heart_rate_sentence):
        with pytest.raises(ValueError):
            ts.enrich(heart_rate_sentence, mode="liberal")


class TestSimplifyReduce:
    def test_heart_rate_pipeline_golden(self, heart_rate_sentence):
        reduced = ts.reduce(ts.simplify(ts.enrich(heart_rate_sentence)))
        assert brk(reduced) == HEART_RATE_REDUCED

    def test_simplify_prunes_prop_free_branches(self, heart_rate_sentence):
        simplified = ts.simplify(ts.enrich(heart_rate_sentence))
        texts = {simplified.label(u).text for u in ts.token_leaves(simplified)}
        assert "The" not in texts and "was" not in texts

    def test_reduce_flattens_pos_inside_props(self):
        t = ts.parse_bracketed("(λ (Prop_SOSY (NN heart rate)))")
        assert brk(ts.reduce(t)) == "(λ (Prop_SOSY heart rate))"

    def test_reduce_is_idempotent(self, heart_rate_sentence):
        once = ts.reduce(ts.simplify(ts.enrich(heart_rate_sentence)))
        assert ts.reduce(once) == once

    def test_prop_count_preserved_through_reduction(self, heart_rate_sentence):
        enriched = ts.enrich(heart_rate_sentence)
        reduced = ts.reduce(ts.simplify(enriched))

        def props(t):
            return [t.label(u).text for u in t.positions() if t.label(u).kind == "prop"]

        assert sorted(props(enriched)) == sorted(props(reduced)) == ["SOSY", "UNIT", "VALUE"]
