"""Campaign configuration: one YAML file drives every pipeline stage.

Client credentials are referenced by environment-variable name only; the
values never enter configs, logs, manifests, or outputs. Fixture mode is
the default everywhere, so a bare config runs hermetically; real-network
and real-API modes must be asked for explicitly.
"""

from __future__ import annotations

import hashlib
import os
from dataclasses import dataclass, field
from pathlib import Path

import yaml

from .errors import ConfigError

CLIENT_MODES = ("fixture", "synthetic", "real")


@dataclass
class ClientConfig:
    mode: str = "fixture"
    fixture: str | None = None
    api_key_env: str | None = None
    domains: list[str] = field(default_factory=list)  # synthetic search pool

    def validate(self, name: str) -> None:
        if self.mode not in CLIENT_MODES:
            raise ConfigError(f"client {name}: unknown mode {self.mode!r}")
        if self.mode == "fixture" and not self.fixture:
            raise ConfigError(f"client {name}: fixture mode needs a fixture path")
        if self.mode == "real" and not self.api_key_env:
            raise ConfigError(f"client {name}: real mode needs api_key_env")

    def api_key(self) -> str:
        if not self.api_key_env:
            raise ConfigError("client has no api_key_env configured")
        value = os.environ.get(self.api_key_env)
        if not value:
            raise ConfigError(f"environment variable {self.api_key_env} is not set")
        return value


@dataclass
class Thresholds:
    consistency: float = 0.95
    min_chars: int = 300
    timeout_s: float = 30.0
    min_span_days: float = 120.0

    def validate(self) -> None:
        if not (0.5 < self.consistency <= 1.0):
            raise ConfigError("consistency threshold must be in (0.5, 1]")
        if self.min_chars < 0:
            raise ConfigError("min_chars must be non-negative")
        if self.timeout_s <= 0:
            raise ConfigError("timeout_s must be positive")
        if self.min_span_days < 0:
            raise ConfigError("min_span_days must be non-negative")


@dataclass
class TopicParams:
    k: int = 64
    alpha: float = 0.1
    beta: float = 0.01
    iters: int = 200
    keywords_per_topic: int = 30


@dataclass
class VantageConfig:
    id: str
    transport: str = "sim"
    proxy: str | None = None
    freedom_label: str = ""

    def validate(self) -> None:
        if self.transport not in ("sim", "real"):
            raise ConfigError(f"vantage {self.id}: unknown transport {self.transport!r}")


@dataclass
class RunConfig:
    run_dir: Path
    master_seed: int = 0
    thresholds: Thresholds = field(default_factory=Thresholds)
    topics: TopicParams = field(default_factory=TopicParams)
    per_topic_budget: int = 10
    n_runs: int = 50
    source_files: list[str] = field(default_factory=list)
    source_groups: dict[str, str] = field(default_factory=dict)
    snapshots: str | None = None
    scenario: str | None = None
    plugin_exchange: str | None = None
    vantages: list[VantageConfig] = field(default_factory=list)
    baseline_vantages: list[str] = field(default_factory=list)
    clients: dict[str, ClientConfig] = field(default_factory=dict)
    pace_s: float = 0.0
    config_path: Path | None = None

    @property
    def vantage_ids(self) -> list[str]:
        return [v.id for v in self.vantages]

    def validate(self) -> None:
        self.thresholds.validate()
        if self.topics.k < 2:
            raise ConfigError("topics.k must be at least 2")
        for vantage in self.vantages:
            vantage.validate()
        missing = [v for v in self.baseline_vantages if v not in self.vantage_ids]
        if missing:
            raise ConfigError(f"baseline vantages not in vantage list: {missing}")
        for name, client in self.clients.items():
            client.validate(name)

    def client(self, name: str) -> ClientConfig:
        if name not in self.clients:
            raise ConfigError(f"no client configured for {name!r}")
        return self.clients[name]

    def resolve(self, path_value: str) -> Path:
        """Resolve a config-relative path."""
        path = Path(path_value)
        if path.is_absolute() or self.config_path is None:
            return path
        return self.config_path.parent / path

    def config_hash(self) -> str:
        """Stable hash of the validated configuration (no credentials)."""
        canonical = repr((
            self.master_seed,
            (self.thresholds.consistency, self.thresholds.min_chars,
             self.thresholds.timeout_s, self.thresholds.min_span_days),
            (self.topics.k, self.topics.alpha, self.topics.beta,
             self.topics.iters, self.topics.keywords_per_topic),
            self.per_topic_budget,
            self.n_runs,
            tuple(self.source_files),
            tuple(sorted(self.source_groups.items())),
            self.snapshots,
            self.scenario,
            self.plugin_exchange,
            tuple((v.id, v.transport, v.proxy, v.freedom_label) for v in self.vantages),
            tuple(self.baseline_vantages),
            self.pace_s,
            tuple(sorted(
                (name, c.mode, c.fixture, c.api_key_env, tuple(c.domains))
                for name, c in self.clients.items()
            )),
        ))
        return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def load_config(path: str | Path) -> RunConfig:
    path = Path(path)
    try:
        raw = yaml.safe_load(path.read_text(encoding="utf-8"))
    except (OSError, yaml.YAMLError) as exc:
        raise ConfigError(f"cannot load config {path}: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError(f"config {path} is not a mapping")
    try:
        thresholds = Thresholds(**raw.get("thresholds", {}))
        topics = TopicParams(**raw.get("topics", {}))
        clients = {
            name: ClientConfig(**value) for name, value in raw.get("clients", {}).items()
        }
        vantages = []
        for entry in raw.get("vantages", []):
            if isinstance(entry, str):
                vantages.append(VantageConfig(id=entry))
            else:
                vantages.append(VantageConfig(**entry))
        config = RunConfig(
            run_dir=Path(raw["run_dir"]),
            master_seed=int(raw.get("master_seed", 0)),
            thresholds=thresholds,
            topics=topics,
            per_topic_budget=int(raw.get("per_topic_budget", 10)),
            n_runs=int(raw.get("n_runs", 50)),
            source_files=list(raw.get("sources", {}).get("files", [])),
            source_groups=dict(raw.get("sources", {}).get("groups", {})),
            snapshots=raw.get("snapshots"),
            scenario=raw.get("scenario"),
            plugin_exchange=raw.get("plugin_exchange"),
            vantages=vantages,
            baseline_vantages=list(raw.get("baseline_vantages", [])),
            clients=clients,
            pace_s=float(raw.get("pace_s", 0.0)),
            config_path=path,
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"config {path} is malformed: {exc}") from exc
    if not config.run_dir.is_absolute():
        config.run_dir = path.parent / config.run_dir
    config.validate()
    return config
