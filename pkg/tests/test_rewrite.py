"""The iterative rewrite loop: groups, relations, collections, flattening."""

from __future__ import annotations

import pytest

import treeschema as ts


def step(text: str, min_support: int = 1, tau: float = 0.7) -> str:
    """Parse, run one rewrite pass, serialize."""
    t = ts.parse_bracketed(text)
    cfg = ts.RewriteConfig(
        similarity=ts.SimilarityConfig("jaccard_props", tau), min_support=min_support
    )
    part = ts.equivalence_partition(cfg.similarity, t, ts.candidate_positions(t))
    return ts.serialize_bracketed(ts.rewrite_step(t, part, cfg))


class TestCandidatePositions:
    def test_reduced_sentence_has_one_candidate(self, heart_rate_sentence):
        reduced = ts.reduce(ts.simplify(ts.enrich(heart_rate_sentence)))
        assert ts.candidate_positions(reduced) == {(1,)}

    def test_bare_property_tree_has_none(self):
        assert ts.candidate_positions(ts.parse_bracketed("(λ (Prop_X a))")) == set()

    def test_similarity_worked_example_candidates(self, similarity_tree):
        expected = {(0,), (0, 0), (0, 0, 0), (0, 1), (0, 1, 0)}
        assert ts.candidate_positions(similarity_tree) == expected


class TestRewriteRules:
    def test_r1_group_formation(self):
        got = step("(λ (NP (Prop_VALUE 100) (Prop_UNIT bpm)))")
        assert got == "(λ (Grp_1 (Prop_VALUE 100) (Prop_UNIT bpm)))"

    def test_r1_respects_min_support(self):
        # The lone phrase sits in a class of size 1, so no group forms;
        # flattening still splices the wrapper over all-structural children.
        got = step("(λ (NP (Prop_VALUE 100) (Prop_UNIT bpm)))", min_support=2)
        assert "Grp" not in got
        assert got == "(λ (Prop_VALUE 100) (Prop_UNIT bpm))"

    def test_r1_deduplicates_prop_names_keeping_first(self):
        got = step("(λ (NP (Prop_A x) (Prop_A y) (Prop_B z)))")
        assert got == "(λ (Grp_1 (Prop_A x) (Prop_B z)))"

    def test_r3_relation_formation(self):
        got = step(
            "(λ (S (Grp_1 (Prop_A x)) (Grp_2 (Prop_B y))))",
            min_support=2,
        )
        assert got == "(λ (Rel_1_2 (Grp_1 (Prop_A x)) (Grp_2 (Prop_B y))))"

    def test_r4_star_decomposition(self):
        got = step(
            "(λ (S (Grp_1 (Prop_A x)) (Grp_2 (Prop_B y)) (Grp_3 (Prop_C z))))",
            min_support=2,
        )
        assert got == (
            "(λ (Rel_1_2 (Grp_1 (Prop_A x)) (Grp_2 (Prop_B y)))"
            " (Rel_1_3 (Grp_1 (Prop_A x)) (Grp_3 (Prop_C z))))"
        )

    def test_r5_collection_formation(self):
        # tau high enough that relations and their member groups stay in
        # separate classes; only the repeated-relation wrapper matters here.
        got = step(
            "(λ (S (Rel_1_2 (Grp_1 (Prop_A x)) (Grp_2 (Prop_B y)))"
            " (Rel_1_2 (Grp_1 (Prop_A z)) (Grp_2 (Prop_B w)))))",
            min_support=2,
            tau=0.8,
        )
        assert got == (
            "(λ (Coll_1 (Rel_1_2 (Grp_1 (Prop_A x)) (Grp_2 (Prop_B y)))"
            " (Rel_1_2 (Grp_1 (Prop_A z)) (Grp_2 (Prop_B w)))))"
        )

    def test_r5_gathers_repeated_root_groups(self):
        got = step(
            "(λ (Grp_1 (Prop_A x)) (Grp_1 (Prop_A y)))",
            min_support=2,
        )
        assert got == "(λ (Coll_1 (Grp_1 (Prop_A x)) (Grp_1 (Prop_A y))))"

    def test_r5_merges_sibling_collections_keeping_min_id(self):
        got = step(
            "(λ (Coll_3 (Grp_1 (Prop_A x)) (Grp_1 (Prop_A y)))"
            " (Coll_7 (Grp_1 (Prop_A z)) (Grp_1 (Prop_A w))))",
            min_support=2,
        )
        assert got == (
            "(λ (Coll_3 (Grp_1 (Prop_A x)) (Grp_1 (Prop_A y))"
            " (Grp_1 (Prop_A z)) (Grp_1 (Prop_A w))))"
        )

    def test_r6_collapses_single_child_chains(self):
        got = step("(λ (S (NP (Grp_1 (Prop_A x)))))", min_support=2)
        assert got == "(λ (Grp_1 (Prop_A x)))"


class TestStructureCorpus:
    def test_three_identical_sentences_golden(self, three_identical_sentences):
        cfg = ts.RewriteConfig(
            similarity=ts.SimilarityConfig("jaccard_props", 0.5), min_support=2
        )
        result = ts.structure_corpus(three_identical_sentences, cfg)
        assert result.converged
        assert len(result.log) == 2
        assert result.grammar.to_text() == (
            "λ -> Coll_1\nColl_1 -> Grp_1+\nGrp_1 -> Prop_A Prop_B\n"
        )

    def test_iteration_cap_reports_non_convergence(self, three_identical_sentences):
        cfg = ts.RewriteConfig(
            similarity=ts.SimilarityConfig("jaccard_props", 0.5),
            min_support=2,
            max_iterations=1,
        )
        result = ts.structure_corpus(three_identical_sentences, cfg)
        assert not result.converged
        assert len(result.log) == 1
        assert not result.report.valid

    def test_single_sentence_relation_schema(self):
        raw = ts.parse_bracketed(
            "(S (NP (NN urography) (ADJ intravenous))"
            " (VP (V shows) (NP (ADJ bilateral) (NN dilatation))))"
        )
        sentence = ts.AnnotatedSentence(
            id="s1",
            tree=raw,
            entities=[
                ts.EntitySpan(0, 1, "examName"),
                ts.EntitySpan(1, 2, "anatomy"),
                ts.EntitySpan(3, 4, "anatomy"),
                ts.EntitySpan(4, 5, "sosyDesc"),
            ],
        )
        forest = [ts.reduce(ts.simplify(ts.enrich(sentence)))]
        cfg = ts.RewriteConfig(
            similarity=ts.SimilarityConfig("jaccard_props", 0.9), min_support=1
        )
        result = ts.structure_corpus(forest, cfg)
        assert result.converged
        rels = result.grammar.rules_of_kind("rel")
        assert len(rels) == 1
        member_kinds = {item.symbol.kind for item in rels[0].rhs}
        assert member_kinds == {"grp"}
        assert len(result.grammar.rules_of_kind("grp")) == 2

    def test_fixpoint_stability_of_converged_instance(self, three_identical_sentences):
        cfg = ts.RewriteConfig(
            similarity=ts.SimilarityConfig("jaccard_props", 0.5), min_support=2
        )
        result = ts.structure_corpus(three_identical_sentences, cfg)
        t = result.instance
        part = ts.equivalence_partition(cfg.similarity, t, ts.candidate_positions(t))
        assert ts.rewrite_step(t, part, cfg) == t

    def test_log_tracks_final_rule_count(self, three_identical_sentences):
        cfg = ts.RewriteConfig(
            similarity=ts.SimilarityConfig("jaccard_props", 0.5), min_support=2
        )
        result = ts.structure_corpus(three_identical_sentences, cfg)
        assert result.log[-1].productions == len(result.grammar.rules)
        assert [r.step for r in result.log] == [0, 1]

    def test_prop_instances_never_grow(self, three_identical_sentences):
        def count_props(t: ts.Tree) -> int:
            return sum(1 for u in t.positions() if t.label(u).kind == "prop")

        initial = ts.merge_forest(three_identical_sentences)
        cfg = ts.RewriteConfig(
            similarity=ts.SimilarityConfig("jaccard_props", 0.5), min_support=2
        )
        result = ts.structure_corpus(three_identical_sentences, cfg)
        assert count_props(result.instance) <= count_props(initial)


class TestMergeForest:
    def test_wraps_each_sentence(self, three_identical_sentences):
        merged = ts.merge_forest(three_identical_sentences)
        assert merged.num_children(()) == 3
        assert {merged.label((i,)).kind for i in range(3)} == {"syn"}

    def test_skips_empty_sentences(self, three_identical_sentences):
        empty = ts.parse_bracketed("(λ)")
        merged = ts.merge_forest([three_identical_sentences[0], empty])
        assert merged.num_children(()) == 1


class TestConfig:
    def test_rejects_nonpositive_support(self):
        with pytest.raises(ValueError):
            ts.RewriteConfig(min_support=0)

    def test_rejects_nonpositive_cap(self):
        with pytest.raises(ValueError):
            ts.RewriteConfig(max_iterations=0)
