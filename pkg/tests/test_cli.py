import json

import pytest
from click.testing import CliRunner

from ccs.cli import main

from conftest import GOLDEN_QUERY, seed_cache_from_fixtures
from synthetic import make_ebm_nlp, make_evidence_inference


@pytest.fixture
def runner():
    return CliRunner()


@pytest.fixture
def env(tmp_path):
    data_dir = tmp_path / "data"
    cache_dir = tmp_path / "cache"
    seed_cache_from_fixtures(cache_dir)
    return {
        "CCS_DATA_DIR": str(data_dir),
        "CCS_CACHE_DIR": str(cache_dir),
        "CCS_CONFIG": str(tmp_path / "no-config"),
    }


def save_golden(runner, env):
    return runner.invoke(
        main,
        ["query", "build", "--disease", "colorectal", "--cancer-defaults",
         "--name", "colorectal-bb", "--save"],
        env=env,
    )


class TestQueryCommands:
    def test_build_prints_golden_string(self, runner, env):
        result = runner.invoke(
            main, ["query", "build", "--disease", "colorectal", "--cancer-defaults"], env=env
        )
        assert result.exit_code == 0
        assert result.output.strip() == GOLDEN_QUERY

    def test_build_empty_disease_exit_1(self, runner, env):
        result = runner.invoke(main, ["query", "build", "--disease", "  "], env=env)
        assert result.exit_code == 1

    def test_save_and_list(self, runner, env):
        assert save_golden(runner, env).exit_code == 0
        result = runner.invoke(main, ["query", "list", "--json"], env=env)
        assert result.exit_code == 0
        (entry,) = json.loads(result.output)
        assert entry["name"] == "colorectal-bb"

    def test_duplicate_save_exit_1(self, runner, env):
        save_golden(runner, env)
        result = save_golden(runner, env)
        assert result.exit_code == 1


class TestSearchCommand:
    def test_offline_search(self, runner, env):
        save_golden(runner, env)
        result = runner.invoke(
            main, ["search", "--query", "colorectal-bb", "--offline", "--json"], env=env
        )
        assert result.exit_code == 0
        body = json.loads(result.output)
        assert body["total_count"] == 11

    def test_unknown_query_exit_1(self, runner, env):
        result = runner.invoke(main, ["search", "--query", "ghost", "--offline"], env=env)
        assert result.exit_code == 1

    def test_offline_without_cache_exit_2(self, runner, env, tmp_path):
        save_golden(runner, env)
        env = {**env, "CCS_CACHE_DIR": str(tmp_path / "empty-cache")}
        result = runner.invoke(main, ["search", "--query", "colorectal-bb", "--offline"], env=env)
        assert result.exit_code == 2


class TestRunCommand:
    def test_offline_run_prints_run_id(self, runner, env):
        save_golden(runner, env)
        result = runner.invoke(
            main, ["run", "--query", "colorectal-bb", "--k", "4", "--offline"], env=env
        )
        assert result.exit_code == 0
        run_id = result.output.splitlines()[0].strip()
        assert len(run_id) == 12

    def test_json_output_has_bundle(self, runner, env):
        save_golden(runner, env)
        result = runner.invoke(
            main, ["run", "--query", "colorectal-bb", "--offline", "--json"], env=env
        )
        body = json.loads(result.output)
        assert set(body["bundle"]) >= {"relevance", "summaries", "entities"}


class TestTrainAndEval:
    def test_train_then_eval_relevance(self, runner, env, tmp_path):
        corpus_dir = make_evidence_inference(tmp_path / "ei", n_articles=16, seed=21)
        result = runner.invoke(
            main,
            ["train-baseline", "--task", "relevance", "--dataset", str(corpus_dir),
             "--epochs", "2"],
            env=env,
        )
        assert result.exit_code == 0, result.output
        assert "loss trace" in result.output

        result = runner.invoke(
            main,
            ["eval", "--task", "relevance", "--dataset", str(corpus_dir), "--json"],
            env=env,
        )
        assert result.exit_code == 0, result.output
        body = json.loads(result.output)
        assert "auc_roc" in body["metrics"]

    def test_eval_pio_writes_report(self, runner, env, tmp_path):
        corpus_dir = make_ebm_nlp(tmp_path / "ebm", n_crowd=4, n_expert=2, seed=22)
        out_dir = tmp_path / "reports"
        result = runner.invoke(
            main,
            ["eval", "--task", "pio", "--dataset", str(corpus_dir),
             "--scorer", "baseline", "--out", str(out_dir)],
            env=env,
        )
        assert result.exit_code == 0, result.output
        assert list(out_dir.glob("report-pio-*.json"))

    def test_eval_missing_dataset_exit_2(self, runner, env, tmp_path):
        result = runner.invoke(
            main,
            ["eval", "--task", "pio", "--dataset", str(tmp_path / "nope")],
            env=env,
        )
        assert result.exit_code == 2
