"""Derive database schemas from entity-annotated constituency treebanks.

The pipeline: parse bracketed sentence trees, wrap annotated token spans
in property nodes, simplify away everything that carries no properties,
then iteratively rewrite the merged corpus tree until its extracted
grammar describes groups, binary relations, and collections.  The final
grammar maps directly to relational DDL or a graph schema.
"""

from .attributes import (
    AttributeGrammar,
    EvaluationError,
    binary_derivation,
    binary_number_grammar,
    evaluate_synthesized,
)
from .cli import RunConfig, run_pipeline
from .enrich import AnnotatedSentence, EnrichmentError, EntitySpan, enrich, reduce, simplify
from .corpus import CorpusError, CorpusRecord, load_corpus
from .export import ExportError, export_grammar_text, export_graph_schema, export_relational_ddl
from .grammar import (
    Grammar,
    GrammarError,
    LabelPartition,
    RhsItem,
    Rule,
    Symbol,
    extract_grammar,
    label_classes,
    parse_grammar_text,
    quotient_tree,
    symbol_from_label,
)
from .metagrammar import conforms_to_meta, grammar_derivation, schema_metagrammar
from .metrics import (
    REDUNDANCY_COLUMN_CAP,
    GroupTable,
    MetricsReport,
    MetricUndefined,
    ami_score,
    build_group_tables,
    completeness_score,
    compute_metrics,
    confidence_score,
    coverage_score,
    dependency_score,
    group_overlap,
    metrics_csv,
    naive_baseline,
    redundancy_score,
    semantic_clusterings,
)
from .rewrite import (
    IterationRecord,
    RewriteConfig,
    StructuringResult,
    candidate_positions,
    merge_forest,
    rewrite_step,
    structure_corpus,
)
from .similarity import (
    EquivPartition,
    SimilarityConfig,
    base_similarity,
    contextual_similarity,
    dendrogram,
    equivalence_partition,
)
from .tree import (
    EPSILON,
    NodeLabel,
    ParseError,
    Position,
    PositionError,
    Subtree,
    Tree,
    TreeError,
    build_tree,
    coll,
    grp,
    lam,
    leaves,
    parse_bracketed,
    parse_position,
    format_position,
    prop,
    rel,
    serialize_bracketed,
    subtree_at,
    syn,
    to_nested,
    token,
    token_leaves,
    tree_ancestor,
    validate_domain,
)
from .validation import ValidationReport, Violation, validate_grammar

__version__ = "0.1.0"
