import json
from pathlib import Path

import pytest
from click.testing import CliRunner

from probekit import jsonl
from probekit.cli import main

STAGES = ["sanitize", "nlp", "topics", "expand", "gen-queries", "crawl",
          "simulate", "aggregate", "analyze", "report"]


def write_config(tmp_path: Path, data_dir: Path, name: str) -> Path:
    template = (data_dir / "pipeline" / "config.yaml.template").read_text(encoding="utf-8")
    run_dir = tmp_path / name
    config_path = tmp_path / f"{name}.yaml"
    config_path.write_text(
        template.replace("{RUN_DIR}", str(run_dir)).replace("{DATA_DIR}", str(data_dir)),
        encoding="utf-8",
    )
    return config_path


def run_pipeline(config_path: Path, stages=STAGES):
    runner = CliRunner()
    for stage in stages:
        result = runner.invoke(main, ["--config", str(config_path), stage], catch_exceptions=False)
        assert result.exit_code == 0, f"{stage} failed:\n{result.output}"
    return config_path.parent


@pytest.fixture(scope="module")
def pipeline_run(tmp_path_factory, data_dir):
    tmp_path = tmp_path_factory.mktemp("pipeline")
    config_path = write_config(tmp_path, data_dir, "runA")
    run_pipeline(config_path)
    return tmp_path / "runA", config_path


def test_sanitize_verdicts(pipeline_run):
    run_dir, _ = pipeline_run
    verdicts = {r["url"]: r["verdict"] for r in jsonl.read_records(run_dir / "sanitize" / "verdicts.jsonl")}
    assert verdicts["https://gone-410.example/old"] == "dead_4xx"
    assert verdicts["https://gateway-525.example/page"] == "dead_5xx"
    assert verdicts["https://loop.example/start"] == "dead_redirect"
    assert verdicts["https://sold.example/lander"] == "dead_redirect"
    assert verdicts["https://parked.example/"] == "content_free"
    assert verdicts["https://clips.example/watch?v=9"] == "content_free"
    assert verdicts["https://stub.example/hello"] == "too_short"
    live = sum(1 for v in verdicts.values() if v == "live")
    assert live == 18


def test_topics_stage_merges_plugin(pipeline_run):
    run_dir, _ = pipeline_run
    methods = {r["method"] for r in jsonl.read_records(run_dir / "topics" / "keywords.jsonl")}
    assert methods == {"lda", "bertopic"}


def test_probe_list_produced(pipeline_run):
    run_dir, _ = pipeline_run
    urls = [r["url"] for r in jsonl.read_records(run_dir / "crawl" / "probe_list.jsonl")]
    assert len(urls) == len(set(urls))
    assert len(urls) > 50


def test_suspected_blocked_matches_scenario(pipeline_run):
    run_dir, _ = pipeline_run
    blocked = {r["domain"] for r in jsonl.read_records(run_dir / "analyze" / "suspected.jsonl")}
    expected = {f"blocked-dns-{i}.example" for i in range(5)} | {
        "blocked-rst-0.example", "blocked-rst-1.example"
    }
    # the synthetic crawler reached every pool domain, so all seven surface
    assert blocked == expected


def test_disagreement_report_contains_bot_domains_only(pipeline_run):
    run_dir, _ = pipeline_run
    domains = {r["domain"] for r in jsonl.read_records(run_dir / "analyze" / "disagreements.jsonl")}
    assert domains == {"bots-0.example", "bots-1.example"}


def test_report_files(pipeline_run):
    run_dir, _ = pipeline_run
    summary = json.loads((run_dir / "report" / "summary.json").read_text(encoding="utf-8"))
    assert "class_counts" in summary and "jaccard_inaccessible" in summary
    assert (run_dir / "report" / "exit_codes.tsv").exists()


def test_rerun_is_noop(pipeline_run):
    run_dir, config_path = pipeline_run
    runner = CliRunner()
    result = runner.invoke(main, ["--config", str(config_path), "sanitize"], catch_exceptions=False)
    assert result.exit_code == 0
    assert "up to date" in result.output


def test_force_reruns(pipeline_run):
    run_dir, config_path = pipeline_run
    runner = CliRunner()
    result = runner.invoke(
        main, ["--config", str(config_path), "sanitize", "--force"], catch_exceptions=False
    )
    assert result.exit_code == 0
    assert "done" in result.output


def test_pipeline_deterministic(tmp_path, data_dir, pipeline_run):
    """A second full run in a fresh directory produces byte-identical
    stage outputs."""
    first_run, _ = pipeline_run
    config_path = write_config(tmp_path, data_dir, "runB")
    run_pipeline(config_path)
    second_run = tmp_path / "runB"
    for rel in [
        "sanitize/verdicts.jsonl", "nlp/bags.jsonl", "topics/keywords.jsonl",
        "expand/expanded.jsonl", "gen-queries/queries.jsonl",
        "crawl/probe_list.jsonl", "probe/outcomes.jsonl", "probe/ooni.jsonl",
        "aggregate/summaries.jsonl", "aggregate/diffs.jsonl",
        "analyze/suspected.jsonl", "report/summary.json",
    ]:
        a = (first_run / rel).read_bytes()
        b = (second_run / rel).read_bytes()
        assert a == b, f"{rel} differs between runs"


def test_analyze_with_external_ooni_records(pipeline_run, tmp_path):
    run_dir, config_path = pipeline_run
    external = tmp_path / "external_ooni.jsonl"
    external.write_bytes((run_dir / "probe" / "ooni.jsonl").read_bytes())
    runner = CliRunner()
    result = runner.invoke(
        main,
        ["--config", str(config_path), "analyze", "--force", "--ooni", str(external)],
        catch_exceptions=False,
    )
    assert result.exit_code == 0
    blocked = {r["domain"] for r in jsonl.read_records(run_dir / "analyze" / "suspected.jsonl")}
    assert len(blocked) == 7


def test_missing_stage_error(tmp_path, data_dir):
    config_path = write_config(tmp_path, data_dir, "runC")
    runner = CliRunner()
    result = runner.invoke(main, ["--config", str(config_path), "probe"])
    assert result.exit_code != 0
    assert "missing stage: crawl" in str(result.output) + str(result.exception)


def test_bad_config_exit_code(tmp_path, data_dir):
    config_path = tmp_path / "bad.yaml"
    config_path.write_text(
        "run_dir: x\nvantages: [a]\nbaseline_vantages: [a, b]\n", encoding="utf-8"
    )
    from probekit.cli import entrypoint
    import subprocess
    import sys

    proc = subprocess.run(
        [sys.executable, "-m", "probekit.cli", "--config", str(config_path), "sanitize"],
        capture_output=True, text=True,
    )
    assert proc.returncode == 2
    assert "config error" in proc.stderr


def test_stage_error_exit_code(tmp_path, data_dir):
    config_path = write_config(tmp_path, data_dir, "runD")
    import subprocess
    import sys

    proc = subprocess.run(
        [sys.executable, "-m", "probekit.cli", "--config", str(config_path), "aggregate"],
        capture_output=True, text=True,
    )
    assert proc.returncode == 1
