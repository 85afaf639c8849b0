import pytest

from probekit.config import ClientConfig, RunConfig, VantageConfig, load_config
from probekit.errors import ConfigError


def write_config(tmp_path, text):
    path = tmp_path / "config.yaml"
    path.write_text(text, encoding="utf-8")
    return path


MINIMAL = """
run_dir: run
vantages: [a, b]
baseline_vantages: [a]
"""


def test_minimal_config_loads(tmp_path):
    config = load_config(write_config(tmp_path, MINIMAL))
    assert config.run_dir == tmp_path / "run"
    assert config.vantage_ids == ["a", "b"]
    assert config.thresholds.consistency == 0.95
    assert config.thresholds.min_chars == 300
    assert config.thresholds.timeout_s == 30
    assert config.thresholds.min_span_days == 120


def test_baseline_must_be_subset(tmp_path):
    bad = MINIMAL.replace("baseline_vantages: [a]", "baseline_vantages: [a, zz]")
    with pytest.raises(ConfigError, match="baseline vantages"):
        load_config(write_config(tmp_path, bad))


def test_threshold_ranges(tmp_path):
    bad = MINIMAL + "thresholds: {consistency: 1.5}\n"
    with pytest.raises(ConfigError, match="consistency"):
        load_config(write_config(tmp_path, bad))


def test_vantage_dict_form(tmp_path):
    text = """
run_dir: run
vantages:
  - {id: lab, transport: real, proxy: "socks5://127.0.0.1:9", freedom_label: free}
  - sim-one
baseline_vantages: [lab]
"""
    config = load_config(write_config(tmp_path, text))
    assert config.vantages[0] == VantageConfig(
        id="lab", transport="real", proxy="socks5://127.0.0.1:9", freedom_label="free"
    )
    assert config.vantages[1].transport == "sim"


def test_unknown_transport_rejected(tmp_path):
    text = """
run_dir: run
vantages:
  - {id: lab, transport: quantum}
baseline_vantages: []
"""
    with pytest.raises(ConfigError, match="transport"):
        load_config(write_config(tmp_path, text))


def test_fixture_client_needs_path(tmp_path):
    text = MINIMAL + "clients: {search: {mode: fixture}}\n"
    with pytest.raises(ConfigError, match="fixture"):
        load_config(write_config(tmp_path, text))


def test_real_client_needs_env_name_not_value(tmp_path, monkeypatch):
    text = MINIMAL + "clients: {search: {mode: real, api_key_env: SEARCH_KEY}}\n"
    config = load_config(write_config(tmp_path, text))
    monkeypatch.delenv("SEARCH_KEY", raising=False)
    with pytest.raises(ConfigError, match="SEARCH_KEY"):
        config.client("search").api_key()
    monkeypatch.setenv("SEARCH_KEY", "s3cret")
    assert config.client("search").api_key() == "s3cret"
    # the secret itself never reaches the config hash
    assert "s3cret" not in config.config_hash()


def test_config_hash_stable_and_sensitive(tmp_path):
    config_a = load_config(write_config(tmp_path, MINIMAL))
    config_b = load_config(write_config(tmp_path, MINIMAL))
    assert config_a.config_hash() == config_b.config_hash()
    changed = load_config(write_config(tmp_path, MINIMAL.replace("run_dir: run", "run_dir: run\nmaster_seed: 9")))
    assert changed.config_hash() != config_a.config_hash()


def test_resolve_relative_to_config(tmp_path):
    config = load_config(write_config(tmp_path, MINIMAL))
    assert config.resolve("sub/file.txt") == tmp_path / "sub" / "file.txt"
    assert config.resolve("/abs/file.txt").is_absolute()
