"""Command-line pipeline: corpus in, schema artifacts out.

Subcommands:
  structure  run the full pipeline and write every artifact
  validate   check a grammar text file, print the report
  metrics    run the pipeline, write only the metric rows
  baseline   write the naive per-sentence baseline grammar
  export     turn a grammar text file into DDL or a graph schema

Exit codes: 0 on success (pipeline converged / grammar valid), 3 when
the rewrite loop exhausted its iteration cap or a grammar failed
validation, 1 on input or I/O errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path

from .corpus import CorpusError, load_corpus
from .enrich import AnnotatedSentence, EnrichmentError, enrich, reduce, simplify
from .export import ExportError, export_grammar_text, export_graph_schema, export_relational_ddl
from .grammar import GrammarError, parse_grammar_text
from .metrics import compute_metrics, metrics_csv, naive_baseline
from .rewrite import (
    RewriteConfig,
    StructuringResult,
    candidate_positions,
    merge_forest,
    structure_corpus,
)
from .similarity import F_KINDS, SimilarityConfig, equivalence_partition
from .tree import Tree, serialize_bracketed
from .validation import validate_grammar

__all__ = ["RunConfig", "run_pipeline", "main"]

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_NOT_CONVERGED = 3


@dataclass(frozen=True)
class RunConfig:
    tau: float = 0.7
    min_support: int = 2
    max_iterations: int = 10
    similarity: str = "jaccard_props"
    alphas: tuple[float, ...] = (1.0, 0.5)
    enrich_mode: str = "lenient"
    label_map: dict[str, str] = field(default_factory=dict)

    def rewrite_config(self) -> RewriteConfig:
        return RewriteConfig(
            similarity=SimilarityConfig(f_kind=self.similarity, tau=self.tau),
            min_support=self.min_support,
            max_iterations=self.max_iterations,
        )


def _prepare_forest(sentences: list[AnnotatedSentence], cfg: RunConfig) -> list[Tree]:
    return [reduce(simplify(enrich(s, mode=cfg.enrich_mode))) for s in sentences]


def _write(out_dir: Path, name: str, text: str, written: list[str]) -> None:
    (out_dir / name).write_text(text, encoding="utf-8")
    written.append(name)


def _iterations_csv(result: StructuringResult) -> str:
    header = "step,productions,equivalence_classes,collections,relations,groups"
    lines = [header]
    for record in result.log:
        lines.append(
            f"{record.step},{record.productions},{record.equivalence_classes},"
            f"{record.collections},{record.relations},{record.groups}"
        )
    return "\n".join(lines) + "\n"


def run_pipeline(cfg: RunConfig, corpus_path: str | Path, out_dir: str | Path) -> int:
    """Load, enrich, structure, measure; write artifacts plus a manifest."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written: list[str] = []
    stage = "load"
    manifest: dict = {
        "config": {
            "tau": cfg.tau,
            "min_support": cfg.min_support,
            "max_iterations": cfg.max_iterations,
            "similarity": cfg.similarity,
            "alphas": list(cfg.alphas),
            "enrich_mode": cfg.enrich_mode,
        }
    }
    try:
        sentences = load_corpus(corpus_path)
        stage = "enrich"
        forest = _prepare_forest(sentences, cfg)
        stage = "structure"
        result = structure_corpus(forest, cfg.rewrite_config())
        _write(out, "grammar.txt", export_grammar_text(result.grammar), written)
        _write(out, "instance.bracket", serialize_bracketed(result.instance) + "\n", written)
        _write(out, "validation.json", result.report.to_json() + "\n", written)
        _write(out, "iterations.csv", _iterations_csv(result), written)
        stage = "metrics"
        initial = merge_forest(forest)
        part = equivalence_partition(
            cfg.rewrite_config().similarity, initial, candidate_positions(initial)
        )
        report = compute_metrics(initial, result.instance, part, result.grammar, cfg.alphas)
        _write(out, "metrics.csv", metrics_csv(report, cfg.tau, cfg.min_support), written)
        base_grammar, base_instance = naive_baseline(forest)
        base_report = compute_metrics(initial, base_instance, part, base_grammar, cfg.alphas)
        _write(
            out, "metrics_baseline.csv", metrics_csv(base_report, cfg.tau, cfg.min_support), written
        )
        stage = "export"
        if result.converged:
            _write(out, "schema.sql", export_relational_ddl(result.grammar, cfg.label_map), written)
            _write(
                out, "schema_graph.json", export_graph_schema(result.grammar, cfg.label_map), written
            )
        manifest.update(
            {
                "stage": "complete",
                "converged": result.converged,
                "iterations": len(result.log),
                "artifacts": written,
            }
        )
        code = EXIT_OK if result.converged else EXIT_NOT_CONVERGED
    except (CorpusError, EnrichmentError, GrammarError, ExportError, OSError) as exc:
        manifest.update({"stage": stage, "error": str(exc), "artifacts": written})
        code = EXIT_ERROR
    manifest["exit_code"] = code
    (out / "manifest.json").write_text(
        json.dumps(manifest, ensure_ascii=False, indent=2) + "\n", encoding="utf-8"
    )
    return code


def _common_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--tau", type=float, default=0.7, help="similarity threshold")
    parser.add_argument("--min-support", type=int, default=2, help="class frequency floor")
    parser.add_argument("--max-iterations", type=int, default=10, help="rewrite pass cap")
    parser.add_argument(
        "--similarity", choices=list(F_KINDS), default="jaccard_props", help="base measure"
    )
    parser.add_argument(
        "--alpha",
        type=float,
        action="append",
        dest="alphas",
        help="redundancy threshold, repeatable (default: 1.0 and 0.5)",
    )
    parser.add_argument(
        "--enrich-mode", choices=["strict", "lenient"], default="lenient", help="span alignment"
    )
    parser.add_argument("--label-map", type=Path, default=None, help="JSON name substitutions")


def _config_from(args: argparse.Namespace) -> RunConfig:
    label_map: dict[str, str] = {}
    if getattr(args, "label_map", None):
        label_map = json.loads(args.label_map.read_text(encoding="utf-8"))
    return RunConfig(
        tau=args.tau,
        min_support=args.min_support,
        max_iterations=args.max_iterations,
        similarity=args.similarity,
        alphas=tuple(args.alphas) if args.alphas else (1.0, 0.5),
        enrich_mode=args.enrich_mode,
        label_map=label_map,
    )


def _cmd_structure(args: argparse.Namespace) -> int:
    return run_pipeline(_config_from(args), args.corpus, args.out)


def _cmd_metrics(args: argparse.Namespace) -> int:
    code = run_pipeline(_config_from(args), args.corpus, args.out)
    return code


def _cmd_baseline(args: argparse.Namespace) -> int:
    cfg = _config_from(args)
    try:
        sentences = load_corpus(args.corpus)
        forest = _prepare_forest(sentences, cfg)
    except (CorpusError, EnrichmentError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    grammar, _ = naive_baseline(forest)
    sys.stdout.write(export_grammar_text(grammar))
    return EXIT_OK


def _cmd_validate(args: argparse.Namespace) -> int:
    try:
        grammar = parse_grammar_text(Path(args.grammar).read_text(encoding="utf-8"))
    except (GrammarError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    report = validate_grammar(grammar)
    sys.stdout.write(report.to_json() + "\n")
    return EXIT_OK if report.valid else EXIT_NOT_CONVERGED


def _cmd_export(args: argparse.Namespace) -> int:
    label_map: dict[str, str] = {}
    try:
        if args.label_map:
            label_map = json.loads(args.label_map.read_text(encoding="utf-8"))
        grammar = parse_grammar_text(Path(args.grammar).read_text(encoding="utf-8"))
        if args.format == "sql":
            text = export_relational_ddl(grammar, label_map)
        else:
            text = export_graph_schema(grammar, label_map)
    except (GrammarError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except ExportError as exc:
        print(f"error: {exc}", file=sys.stderr)
        sys.stdout.write(exc.report.to_json() + "\n")
        return EXIT_NOT_CONVERGED
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="treeschema",
        description="Derive a database schema from an entity-annotated treebank corpus.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_structure = sub.add_parser("structure", help="run the full pipeline")
    p_structure.add_argument("--corpus", type=Path, required=True, help="JSONL corpus")
    p_structure.add_argument("--out", type=Path, required=True, help="output directory")
    _common_flags(p_structure)
    p_structure.set_defaults(fn=_cmd_structure)

    p_metrics = sub.add_parser("metrics", help="run the pipeline for its metric rows")
    p_metrics.add_argument("--corpus", type=Path, required=True)
    p_metrics.add_argument("--out", type=Path, required=True)
    _common_flags(p_metrics)
    p_metrics.set_defaults(fn=_cmd_metrics)

    p_baseline = sub.add_parser("baseline", help="print the naive baseline grammar")
    p_baseline.add_argument("--corpus", type=Path, required=True)
    _common_flags(p_baseline)
    p_baseline.set_defaults(fn=_cmd_baseline)

    p_validate = sub.add_parser("validate", help="validate a grammar text file")
    p_validate.add_argument("--grammar", type=Path, required=True)
    p_validate.set_defaults(fn=_cmd_validate)

    p_export = sub.add_parser("export", help="export a schema from a grammar file")
    p_export.add_argument("--grammar", type=Path, required=True)
    p_export.add_argument("--format", choices=["sql", "graph"], default="sql")
    p_export.add_argument("--out", type=Path, default=None)
    p_export.add_argument("--label-map", type=Path, default=None)
    p_export.set_defaults(fn=_cmd_export)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
