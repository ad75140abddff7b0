"""End-to-end tests for the smixup command line."""

import csv

import pytest
from typer.testing import CliRunner

from smixup.harness.cli import app
from smixup.mixup.dump import read_graph_dump

runner = CliRunner()

SMALL_YAML = """\
experiment:
  name: cli-small
  runs: 1
motif:
  count_per_class: 6
model:
  num_layers: 2
  hidden: 8
train:
  epochs: 2
  batch_size: 8
mixup:
  enabled: true
matcher:
  epochs: 1
  hidden: 8
  num_layers: 2
  batch_size: 4
"""


@pytest.fixture
def config_file(tmp_path):
    path = tmp_path / "small.yaml"
    path.write_text(SMALL_YAML)
    return path


def _invoke(*args):
    return runner.invoke(app, [str(a) for a in args])


class TestInfoCommands:
    def test_presets(self):
        result = _invoke("presets")
        assert result.exit_code == 0
        assert "REDDIT-MULTI-5K" in result.output
        assert "Alpha grid" in result.output

    def test_no_args_shows_help(self):
        result = _invoke()
        assert "ged-verify" in result.output


class TestMotifGen:
    def test_writes_tudataset_files(self, tmp_path):
        result = _invoke("motif-gen", "--out", tmp_path / "MOTIF", "--count-per-class", 4)
        assert result.exit_code == 0, result.output
        for suffix in ("A", "graph_indicator", "graph_labels", "node_attributes"):
            assert (tmp_path / "MOTIF" / f"MOTIF_{suffix}.txt").is_file()
        assert "12 graphs" in result.output

    def test_bad_base_range(self, tmp_path):
        result = _invoke("motif-gen", "--out", tmp_path, "--base-min", 9, "--base-max", 6)
        assert result.exit_code == 2
        assert "Error" in result.output


class TestPipeline:
    def test_matcher_augment_classifier_eval(self, tmp_path, config_file):
        matcher = tmp_path / "matcher.pt"
        result = _invoke("train-matcher", "-c", config_file, "--out", matcher)
        assert result.exit_code == 0, result.output
        assert "Triplet loss" in result.output and matcher.is_file()

        dump = tmp_path / "mixed.txt"
        result = _invoke("augment", "-c", config_file, "--matcher", matcher, "--out", dump, "--limit", 5)
        assert result.exit_code == 0, result.output
        assert len(read_graph_dump(dump)) == 5

        model = tmp_path / "clf.pt"
        result = _invoke("train-classifier", "-c", config_file, "--matcher", matcher, "--out", model)
        assert result.exit_code == 0, result.output
        assert "test accuracy" in result.output

        result = _invoke("eval", "--model", model, "-c", config_file, "--split", "all")
        assert result.exit_code == 0, result.output
        assert "accuracy" in result.output and "18" in result.output

    def test_learned_mixup_without_matcher(self, tmp_path, config_file):
        result = _invoke("augment", "-c", config_file, "--out", tmp_path / "x.txt")
        assert result.exit_code == 2
        assert "--matcher" in result.output

    def test_eval_rejects_unknown_split(self, tmp_path, config_file):
        model = tmp_path / "clf.pt"
        _invoke("train-classifier", "-c", config_file, "-s", "mixup.enabled=false", "--out", model)
        result = _invoke("eval", "--model", model, "-c", config_file, "--split", "holdout")
        assert result.exit_code == 2
        assert "--split" in result.output

    def test_eval_missing_checkpoint(self, tmp_path, config_file):
        result = _invoke("eval", "--model", tmp_path / "none.pt", "-c", config_file)
        assert result.exit_code == 2


class TestRun:
    def test_run_writes_summary(self, tmp_path, config_file):
        out = tmp_path / "out"
        result = _invoke("run", "-c", config_file, "-s", "mixup.alignment=random", "-s", f"experiment.out_dir={out}")
        assert result.exit_code == 0, result.output
        with open(out / "summary.csv") as f:
            rows = list(csv.DictReader(f))
        assert [r["augmentation"] for r in rows] == ["random"]
        assert "±" in result.output

    def test_unknown_key_is_reported(self, config_file):
        result = _invoke("run", "-c", config_file, "-s", "train.epoch=3")
        assert result.exit_code == 2
        assert "train.epoch" in result.output


class TestGedVerify:
    def test_sweep_to_csv(self, tmp_path):
        out = tmp_path / "ged.csv"
        result = _invoke("ged-verify", "--pairs", 5, "--max-nodes", 3, "--out", out)
        assert result.exit_code == 0, result.output
        assert "bound violations 0" in result.output
        assert "smixup · ged-verify ─" in result.output
        with open(out) as f:
            rows = list(csv.DictReader(f))
        assert list(rows[0]) == ["pair", "lambda", "epsilon", "bound", "gap", "mode", "cost"]
        assert {r["cost"] for r in rows} == {"norm"}
        assert len(rows) % 6 == 0

    def test_unknown_mode(self):
        result = _invoke("ged-verify", "--pairs", 1, "--mode", "beam")
        assert result.exit_code == 2
        assert "mode" in result.output
