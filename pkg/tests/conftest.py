"""Shared fixtures: the worked examples reused across the suite."""

from __future__ import annotations

import pytest

import treeschema as ts

# Heart-rate sentence: raw parse plus the three annotated spans, and the
# expected shapes after each preprocessing stage.
HEART_RATE_RAW = (
    "(SENT (NP (DT The) (NN heart) (NN rate))"
    " (VP (VBD was) (NP (CD 100) (NN bpm))))"
)
HEART_RATE_ENRICHED = (
    "(λ (NP (DT The) (Prop_SOSY (NN heart) (NN rate)))"
    " (VP (VBD was) (NP (CD (Prop_VALUE 100)) (NN (Prop_UNIT bpm)))))"
)
HEART_RATE_REDUCED = (
    "(λ (Prop_SOSY heart rate) (NP (Prop_VALUE 100) (Prop_UNIT bpm)))"
)

# Quotient worked example: two X siblings sharing labels and one Y.
QUOTIENT_TREE = "(λ (X a b) (X b c) (Y a))"
QUOTIENT_EXPECTED = "(λ (X+ a b c) (Y a))"
QUOTIENT_GRAMMAR = "λ -> X+ Y\nX -> a b c\nY -> a\n"

# Contextual-similarity worked example: two measurement sub-trees whose
# surroundings differ (drug vs frequency).
SIMILARITY_TREE = (
    "(λ (CONJ (NP (X (Prop_VALUE 500) (Prop_UNIT mg)) (Prop_DRUG Paracetamol))"
    " (NP (X (Prop_VALUE 200) (Prop_UNIT mg)) (Prop_FREQ every day))))"
)
X1_POSITION = (0, 0, 0)
X2_POSITION = (0, 1, 0)

# Fully structured instance and its grammar: one collection of one relation
# over two groups.
STRUCTURED_INSTANCE = (
    "(λ (Coll_1 (Rel_1 (Grp_1 (Prop_1 v1) (Prop_2 v2)) (Grp_2 (Prop_3 v3)))))"
)
STRUCTURED_GRAMMAR = """\
λ -> Coll_1
Coll_1 -> Rel_1+
Rel_1 -> Grp_1 Grp_2
Grp_1 -> Prop_1 Prop_2
Grp_2 -> Prop_3
"""

# Exam/sosy relation schema from a single radiology-style sentence.
EXAM_SOSY_GRAMMAR = """\
λ -> Rel_ExamSosy
Rel_ExamSosy -> Grp_Exam Grp_Sosy
Grp_Exam -> Prop_EXAM_NAME Prop_ANATOMY
Grp_Sosy -> Prop_SOSY_DESC Prop_ANATOMY
"""

# Four-row table whose dependency structure is fully worked out by hand:
# rows (a,b,c), (a,b,c'), (a',b,c'), (a'',b',c).
FD_TABLE_ROWS = (
    {"A": "a", "B": "b", "C": "c"},
    {"A": "a", "B": "b", "C": "c'"},
    {"A": "a'", "B": "b", "C": "c'"},
    {"A": "a''", "B": "b'", "C": "c"},
)


@pytest.fixture
def heart_rate_sentence() -> ts.AnnotatedSentence:
    return ts.AnnotatedSentence(
        id="hr-1",
        tree=ts.parse_bracketed(HEART_RATE_RAW),
        entities=[
            ts.EntitySpan(1, 3, "SOSY"),
            ts.EntitySpan(4, 5, "VALUE"),
            ts.EntitySpan(5, 6, "UNIT"),
        ],
    )


@pytest.fixture
def quotient_tree() -> ts.Tree:
    return ts.parse_bracketed(QUOTIENT_TREE)


@pytest.fixture
def similarity_tree() -> ts.Tree:
    return ts.parse_bracketed(SIMILARITY_TREE)


@pytest.fixture
def structured_instance() -> ts.Tree:
    return ts.parse_bracketed(STRUCTURED_INSTANCE)


@pytest.fixture
def structured_grammar() -> ts.Grammar:
    return ts.parse_grammar_text(STRUCTURED_GRAMMAR)


@pytest.fixture
def exam_sosy_grammar() -> ts.Grammar:
    return ts.parse_grammar_text(EXAM_SOSY_GRAMMAR)


@pytest.fixture
def fd_table() -> ts.GroupTable:
    return ts.GroupTable(name="Grp_R", columns=("A", "B", "C"), rows=FD_TABLE_ROWS)


@pytest.fixture
def three_identical_sentences() -> list[ts.Tree]:
    return [ts.parse_bracketed("(λ (NP (Prop_A x) (Prop_B y)))") for _ in range(3)]
