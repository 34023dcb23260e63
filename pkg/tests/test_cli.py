"""End-to-end pipeline runs and the command-line entry points."""

from __future__ import annotations

import json
import subprocess
import sys

import pytest

import treeschema as ts
from treeschema.cli import main

from conftest import HEART_RATE_RAW

ARTIFACTS_ALWAYS = [
    "grammar.txt",
    "instance.bracket",
    "validation.json",
    "iterations.csv",
    "metrics.csv",
    "metrics_baseline.csv",
]
ARTIFACTS_CONVERGED = ["schema.sql", "schema_graph.json"]


def _record(id, tree, entities):
    return json.dumps({"id": id, "tree": tree, "entities": entities})


@pytest.fixture
def converging_corpus(tmp_path):
    """Sentences with one anatomy/symptom phrase and one value/unit phrase."""
    lines = []
    rows = [
        ("neck", "pain", "7", "score"),
        ("head", "ache", "3", "score"),
        ("knee", "swelling", "2", "cm"),
        ("wrist", "stiffness", "40", "deg"),
    ]
    for i, (anat, sosy, value, unit) in enumerate(rows):
        tree = (
            f"(S (NP (NN {anat}) (NN {sosy}))"
            f" (VP (VBD was) (NP (CD {value}) (NN {unit}))))"
        )
        entities = [
            {"start": 0, "end": 1, "label": "ANAT"},
            {"start": 1, "end": 2, "label": "SOSY"},
            {"start": 3, "end": 4, "label": "VALUE"},
            {"start": 4, "end": 5, "label": "UNIT"},
        ]
        lines.append(_record(f"s{i}", tree, entities))
    path = tmp_path / "corpus.jsonl"
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


@pytest.fixture
def stuck_corpus(tmp_path):
    """A bare sentence-level property blocks validation forever."""
    entities = [
        {"start": 1, "end": 3, "label": "SOSY"},
        {"start": 4, "end": 5, "label": "VALUE"},
        {"start": 5, "end": 6, "label": "UNIT"},
    ]
    lines = [_record(f"s{i}", HEART_RATE_RAW, entities) for i in range(4)]
    path = tmp_path / "stuck.jsonl"
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


class TestRunPipeline:
    def test_converged_run_writes_every_artifact(self, converging_corpus, tmp_path):
        out = tmp_path / "out"
        code = ts.run_pipeline(ts.RunConfig(), converging_corpus, out)
        assert code == 0
        manifest = json.loads((out / "manifest.json").read_text())
        assert manifest["converged"] is True
        assert manifest["stage"] == "complete"
        assert manifest["exit_code"] == 0
        assert manifest["artifacts"] == ARTIFACTS_ALWAYS + ARTIFACTS_CONVERGED
        for name in manifest["artifacts"]:
            assert (out / name).exists()
        grammar = (out / "grammar.txt").read_text()
        assert grammar.startswith("λ -> Coll_")
        validation = json.loads((out / "validation.json").read_text())
        assert validation["valid"] is True
        iterations = (out / "iterations.csv").read_text().splitlines()
        assert iterations[0] == (
            "step,productions,equivalence_classes,collections,relations,groups"
        )
        assert len(iterations) >= 2
        assert "CREATE TABLE GRP_" in (out / "schema.sql").read_text()
        graph = json.loads((out / "schema_graph.json").read_text())
        assert len(graph["nodes"]) == 2
        assert len(graph["edges"]) == 1

    def test_missing_corpus_is_an_input_error(self, tmp_path):
        out = tmp_path / "out"
        code = ts.run_pipeline(ts.RunConfig(), tmp_path / "nope.jsonl", out)
        assert code == 1
        manifest = json.loads((out / "manifest.json").read_text())
        assert manifest["stage"] == "load"
        assert "error" in manifest
        assert not (out / "grammar.txt").exists()

    def test_unresolved_instance_exits_three(self, stuck_corpus, tmp_path):
        out = tmp_path / "out"
        code = ts.run_pipeline(ts.RunConfig(), stuck_corpus, out)
        assert code == 3
        manifest = json.loads((out / "manifest.json").read_text())
        assert manifest["converged"] is False
        assert manifest["iterations"] == ts.RunConfig().max_iterations
        assert not (out / "schema.sql").exists()
        validation = json.loads((out / "validation.json").read_text())
        assert validation["valid"] is False

    def test_strict_enrichment_surfaces_misalignment(self, tmp_path):
        tree = "(S (NP (NN a) (NN b)) (VP (VB c)))"
        entities = [{"start": 1, "end": 3, "label": "X"}]
        corpus = tmp_path / "cross.jsonl"
        corpus.write_text(_record("s0", tree, entities) + "\n", encoding="utf-8")
        out = tmp_path / "out"
        code = ts.run_pipeline(ts.RunConfig(enrich_mode="strict"), corpus, out)
        assert code == 1
        manifest = json.loads((out / "manifest.json").read_text())
        assert manifest["stage"] == "enrich"

    def test_reruns_are_byte_identical(self, converging_corpus, tmp_path):
        out_a = tmp_path / "a"
        out_b = tmp_path / "b"
        assert ts.run_pipeline(ts.RunConfig(), converging_corpus, out_a) == 0
        assert ts.run_pipeline(ts.RunConfig(), converging_corpus, out_b) == 0
        names = sorted(p.name for p in out_a.iterdir())
        assert names == sorted(p.name for p in out_b.iterdir())
        for name in names:
            assert (out_a / name).read_bytes() == (out_b / name).read_bytes()


class TestMain:
    def test_structure_subcommand(self, converging_corpus, tmp_path):
        out = tmp_path / "out"
        code = main(["structure", "--corpus", str(converging_corpus), "--out", str(out)])
        assert code == 0
        assert (out / "schema.sql").exists()

    def test_metrics_subcommand(self, converging_corpus, tmp_path):
        out = tmp_path / "out"
        code = main(["metrics", "--corpus", str(converging_corpus), "--out", str(out)])
        assert code == 0
        assert (out / "metrics.csv").exists()

    def test_flags_reach_the_pipeline(self, converging_corpus, tmp_path):
        out = tmp_path / "out"
        code = main(
            [
                "structure",
                "--corpus",
                str(converging_corpus),
                "--out",
                str(out),
                "--tau",
                "0.8",
                "--max-iterations",
                "4",
                "--alpha",
                "0.75",
            ]
        )
        manifest = json.loads((out / "manifest.json").read_text())
        assert manifest["config"]["tau"] == 0.8
        assert manifest["config"]["max_iterations"] == 4
        assert manifest["config"]["alphas"] == [0.75]
        assert code in (0, 3)

    def test_baseline_prints_grammar(self, converging_corpus, capsys):
        code = main(["baseline", "--corpus", str(converging_corpus)])
        assert code == 0
        out = capsys.readouterr().out
        assert out.startswith("λ -> Grp_1")
        assert "Grp_1 -> Prop_ANAT Prop_SOSY Prop_VALUE Prop_UNIT" in out

    def test_baseline_missing_corpus(self, tmp_path, capsys):
        code = main(["baseline", "--corpus", str(tmp_path / "nope.jsonl")])
        assert code == 1
        assert "error" in capsys.readouterr().err

    def test_validate_valid_grammar(self, tmp_path, capsys):
        path = tmp_path / "g.txt"
        path.write_text(
            "λ -> Rel_ExamSosy\n"
            "Rel_ExamSosy -> Grp_Exam Grp_Sosy\n"
            "Grp_Exam -> Prop_EXAM_NAME Prop_ANATOMY\n"
            "Grp_Sosy -> Prop_SOSY_DESC Prop_ANATOMY\n",
            encoding="utf-8",
        )
        code = main(["validate", "--grammar", str(path)])
        assert code == 0
        assert json.loads(capsys.readouterr().out)["valid"] is True

    def test_validate_invalid_grammar(self, tmp_path, capsys):
        path = tmp_path / "g.txt"
        path.write_text("λ -> Grp_9\nGrp_1 -> Prop_A\n", encoding="utf-8")
        code = main(["validate", "--grammar", str(path)])
        assert code == 3
        report = json.loads(capsys.readouterr().out)
        assert report["valid"] is False
        assert report["violations"]

    def test_export_sql_to_stdout(self, tmp_path, capsys):
        path = tmp_path / "g.txt"
        path.write_text(
            "λ -> Grp_Obs\nGrp_Obs -> Prop_VALUE Prop_UNIT\n", encoding="utf-8"
        )
        code = main(["export", "--grammar", str(path)])
        assert code == 0
        assert "CREATE TABLE GRP_Obs (" in capsys.readouterr().out

    def test_export_graph_to_file(self, tmp_path):
        path = tmp_path / "g.txt"
        path.write_text(
            "λ -> Grp_Obs\nGrp_Obs -> Prop_VALUE Prop_UNIT\n", encoding="utf-8"
        )
        out = tmp_path / "schema.json"
        code = main(
            ["export", "--grammar", str(path), "--format", "graph", "--out", str(out)]
        )
        assert code == 0
        assert json.loads(out.read_text())["nodes"][0]["name"] == "Grp_Obs"

    def test_export_invalid_grammar_prints_report(self, tmp_path, capsys):
        path = tmp_path / "g.txt"
        path.write_text("λ -> Grp_9\nGrp_1 -> Prop_A\n", encoding="utf-8")
        code = main(["export", "--grammar", str(path)])
        assert code == 3
        captured = capsys.readouterr()
        assert "error" in captured.err
        assert json.loads(captured.out)["valid"] is False

    def test_export_missing_grammar_file(self, tmp_path, capsys):
        code = main(["export", "--grammar", str(tmp_path / "nope.txt")])
        assert code == 1
        assert "error" in capsys.readouterr().err


def test_console_script_runs():
    proc = subprocess.run(
        [sys.executable, "-c", "import treeschema.cli; raise SystemExit(0)"],
        capture_output=True,
    )
    assert proc.returncode == 0
    help_proc = subprocess.run(
        ["treeschema", "--help"], capture_output=True, text=True
    )
    assert help_proc.returncode == 0
    assert "structure" in help_proc.stdout
