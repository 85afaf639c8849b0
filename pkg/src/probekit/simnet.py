"""Deterministic simulated vantage points with injectable blocking behavior.

A scenario file describes origin servers, vantage points, and per-vantage
blocking policies. Every outcome is a pure function of (scenario, vantage,
url, run id): randomness (policy probabilities, flakiness) comes from
hashing those coordinates with the scenario seed, so replaying a campaign
reproduces the outcome log byte for byte and ground truth is known by
construction.

Blocking mechanisms and their observable signatures:

    dns_nxdomain, dns_forged_ip  -> transport error 6 (resolution failure)
    tcp_rst                      -> transport error 56 (connection reset)
    timeout                      -> transport error 28 after the full timeout
    throttle(delay_ms)           -> slow answer; 28 when delay exceeds timeout
    http_block_page(status)      -> the configured HTTP status
    server_side_403_bots         -> 403 for automated user agents only

Simulated anomaly-probe verdicts mirror how an independent probe would see
the same interference: resolution tampering shows up as a dns anomaly,
resets and timeouts as tcp_ip, injected pages as http_diff, while
server-side bot blocking and globally dead origins produce no anomaly at
all (the probe's control fails the same way).

Runs advance a virtual clock (start_ts + run_id * run_interval_s), so
multi-month campaigns simulate in milliseconds.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from pathlib import Path
from urllib.parse import urlparse

import yaml

from .errors import ConfigError
from .ooni import (
    ANOMALY_DNS,
    ANOMALY_HTTP_DIFF,
    ANOMALY_TCP_IP,
    OoniRecord,
    VERDICT_ERROR,
    VERDICT_OK,
    anomaly,
)
from .probe import (
    DEFAULT_TIMEOUT_S,
    DEFAULT_USER_AGENT,
    EXIT_DNS,
    EXIT_RECV,
    EXIT_TIMEOUT,
    FetchOutcome,
    KIND_HTTP,
    KIND_TRANSPORT,
)
from .psl import PublicSuffixList, default_list

MECH_DNS_NXDOMAIN = "dns_nxdomain"
MECH_DNS_FORGED_IP = "dns_forged_ip"
MECH_TCP_RST = "tcp_rst"
MECH_TIMEOUT = "timeout"
MECH_THROTTLE = "throttle"
MECH_BLOCK_PAGE = "http_block_page"
MECH_BOT_403 = "server_side_403_bots"

_MECHANISMS = {
    MECH_DNS_NXDOMAIN, MECH_DNS_FORGED_IP, MECH_TCP_RST, MECH_TIMEOUT,
    MECH_THROTTLE, MECH_BLOCK_PAGE, MECH_BOT_403,
}

_DEFAULT_ORIGIN_LATENCY_MS = 50.0
_DEFAULT_BASE_LATENCY_MS = 20.0


def _unit_draw(*parts) -> float:
    """Uniform [0, 1) derived from a stable hash of the parts."""
    key = "\x1f".join(str(p) for p in parts).encode("utf-8")
    digest = hashlib.sha256(key).digest()
    return int.from_bytes(digest[:8], "big") / 2**64


@dataclass(frozen=True)
class BlockPolicy:
    mechanism: str
    match_domain: str | None = None   # exact hostname
    match_pld: str | None = None      # registrable domain
    match_ip: str | None = None       # origin's declared address
    probability: float | None = None  # None means always
    status: int = 403                 # for http_block_page
    delay_ms: float = 0.0             # for throttle

    def __post_init__(self) -> None:
        if self.mechanism not in _MECHANISMS:
            raise ConfigError(f"unknown mechanism {self.mechanism!r}")
        if sum(x is not None for x in (self.match_domain, self.match_pld, self.match_ip)) != 1:
            raise ConfigError("policy needs exactly one of domain/pld/ip matcher")
        if self.probability is not None and not (0.0 < self.probability <= 1.0):
            raise ConfigError("policy probability must be in (0, 1]")


@dataclass(frozen=True)
class Origin:
    domain: str
    status: int = 200
    latency_ms: float = _DEFAULT_ORIGIN_LATENCY_MS
    transport_fail: int | None = None  # exit code when the origin is dead
    bot_403: bool = False              # server rejects automated user agents
    ip: str | None = None


@dataclass(frozen=True)
class SimVantage:
    id: str
    policies: tuple[BlockPolicy, ...] = ()
    base_latency_ms: float = _DEFAULT_BASE_LATENCY_MS
    flakiness: float = 0.0
    freedom_label: str = ""

    def __post_init__(self) -> None:
        if not (0.0 <= self.flakiness < 1.0):
            raise ConfigError("flakiness must be in [0, 1)")


@dataclass
class Scenario:
    seed: int
    vantages: dict[str, SimVantage]
    origins: dict[str, Origin]
    start_ts: float = 1_700_000_000.0
    run_interval_s: float = 259_200.0  # three days between runs
    rules: PublicSuffixList = field(default_factory=default_list)

    @classmethod
    def from_file(cls, path: str | Path) -> "Scenario":
        try:
            raw = yaml.safe_load(Path(path).read_text(encoding="utf-8"))
        except (OSError, yaml.YAMLError) as exc:
            raise ConfigError(f"cannot load scenario {path}: {exc}") from exc
        if not isinstance(raw, dict):
            raise ConfigError(f"scenario {path} is not a mapping")
        origins = {}
        for entry in raw.get("origins", []):
            origin = Origin(
                domain=entry["domain"],
                status=int(entry.get("status", 200)),
                latency_ms=float(entry.get("latency_ms", _DEFAULT_ORIGIN_LATENCY_MS)),
                transport_fail=entry.get("transport"),
                bot_403=bool(entry.get("bot_403", False)),
                ip=entry.get("ip"),
            )
            origins[origin.domain] = origin
        vantages = {}
        for entry in raw.get("vantages", []):
            policies = []
            for p in entry.get("policies", []):
                match = p.get("match", {})
                policies.append(
                    BlockPolicy(
                        mechanism=p["mechanism"],
                        match_domain=match.get("domain"),
                        match_pld=match.get("pld"),
                        match_ip=match.get("ip"),
                        probability=p.get("probability"),
                        status=int(p.get("status", 403)),
                        delay_ms=float(p.get("delay_ms", 0.0)),
                    )
                )
            vantage = SimVantage(
                id=entry["id"],
                policies=tuple(policies),
                base_latency_ms=float(entry.get("base_latency_ms", _DEFAULT_BASE_LATENCY_MS)),
                flakiness=float(entry.get("flakiness", 0.0)),
                freedom_label=entry.get("freedom_label", ""),
            )
            vantages[vantage.id] = vantage
        return cls(
            seed=int(raw.get("seed", 0)),
            vantages=vantages,
            origins=origins,
            start_ts=float(raw.get("start_ts", 1_700_000_000.0)),
            run_interval_s=float(raw.get("run_interval_s", 259_200.0)),
        )


def _policy_matches(policy: BlockPolicy, host: str, origin: Origin | None, scenario: Scenario) -> bool:
    if policy.match_domain is not None:
        return host == policy.match_domain.lower()
    if policy.match_pld is not None:
        registrable = scenario.rules.registrable_domain(host)
        return registrable == policy.match_pld.lower()
    if policy.match_ip is not None:
        return origin is not None and origin.ip == policy.match_ip
    return False


def _active_policy(
    scenario: Scenario, vantage: SimVantage, url: str, run_id: int, stream: str
) -> BlockPolicy | None:
    host = (urlparse(url).hostname or "").lower()
    origin = scenario.origins.get(host)
    for index, policy in enumerate(vantage.policies):
        if not _policy_matches(policy, host, origin, scenario):
            continue
        if policy.probability is not None:
            draw = _unit_draw(scenario.seed, stream, vantage.id, url, run_id, index)
            if draw >= policy.probability:
                continue
        return policy
    return None


def simulate_fetch(
    url: str,
    vantage: SimVantage,
    run_id: int,
    scenario: Scenario,
    timeout_s: float = DEFAULT_TIMEOUT_S,
    user_agent: str = DEFAULT_USER_AGENT,
) -> FetchOutcome:
    """One simulated GET. First matching policy wins; otherwise the origin
    answers, possibly perturbed by vantage flakiness."""
    ts = scenario.start_ts + run_id * scenario.run_interval_s
    timeout_ms = timeout_s * 1000.0

    def outcome(kind: str, code: int, elapsed_ms: float) -> FetchOutcome:
        return FetchOutcome(
            url=url, vantage_id=vantage.id, run_id=run_id, kind=kind, code=code,
            elapsed_ms=round(min(elapsed_ms, timeout_ms), 3), timestamp=ts,
        )

    host = (urlparse(url).hostname or "").lower()
    origin = scenario.origins.get(host)
    policy = _active_policy(scenario, vantage, url, run_id, "policy")

    if policy is not None:
        if policy.mechanism in (MECH_DNS_NXDOMAIN, MECH_DNS_FORGED_IP):
            return outcome(KIND_TRANSPORT, EXIT_DNS, vantage.base_latency_ms)
        if policy.mechanism == MECH_TCP_RST:
            return outcome(KIND_TRANSPORT, EXIT_RECV, vantage.base_latency_ms)
        if policy.mechanism == MECH_TIMEOUT:
            return outcome(KIND_TRANSPORT, EXIT_TIMEOUT, timeout_ms)
        if policy.mechanism == MECH_THROTTLE:
            origin_latency = origin.latency_ms if origin else _DEFAULT_ORIGIN_LATENCY_MS
            total = vantage.base_latency_ms + origin_latency + policy.delay_ms
            if total > timeout_ms:
                return outcome(KIND_TRANSPORT, EXIT_TIMEOUT, timeout_ms)
            status = origin.status if origin else 404
            return outcome(KIND_HTTP, status, total)
        if policy.mechanism == MECH_BLOCK_PAGE:
            return outcome(KIND_HTTP, policy.status, vantage.base_latency_ms)
        if policy.mechanism == MECH_BOT_403 and _is_tool_agent(user_agent):
            return outcome(KIND_HTTP, 403, vantage.base_latency_ms)

    if vantage.flakiness > 0.0:
        draw = _unit_draw(scenario.seed, "flake", vantage.id, url, run_id)
        if draw < vantage.flakiness:
            return outcome(KIND_TRANSPORT, EXIT_RECV, vantage.base_latency_ms)

    if origin is None:
        return outcome(KIND_HTTP, 404, vantage.base_latency_ms + _DEFAULT_ORIGIN_LATENCY_MS)
    if origin.transport_fail is not None:
        return outcome(KIND_TRANSPORT, int(origin.transport_fail), vantage.base_latency_ms)
    if origin.bot_403 and _is_tool_agent(user_agent):
        return outcome(KIND_HTTP, 403, vantage.base_latency_ms + origin.latency_ms)
    total = vantage.base_latency_ms + origin.latency_ms
    if total > timeout_ms:
        return outcome(KIND_TRANSPORT, EXIT_TIMEOUT, timeout_ms)
    return outcome(KIND_HTTP, origin.status, total)


def _is_tool_agent(user_agent: str) -> bool:
    lowered = user_agent.lower()
    return any(marker in lowered for marker in ("probekit", "curl", "bot", "python"))


def simulate_ooni(
    url: str,
    vantage: SimVantage,
    scenario: Scenario,
    timeout_s: float = DEFAULT_TIMEOUT_S,
) -> OoniRecord:
    """Anomaly-probe verdict for a URL at a vantage under the scenario."""
    host = (urlparse(url).hostname or "").lower()
    origin = scenario.origins.get(host)
    policy = _active_policy(scenario, vantage, url, run_id=0, stream="ooni")
    if policy is not None:
        if policy.mechanism in (MECH_DNS_NXDOMAIN, MECH_DNS_FORGED_IP):
            return anomaly(url, vantage.id, ANOMALY_DNS)
        if policy.mechanism in (MECH_TCP_RST, MECH_TIMEOUT):
            return anomaly(url, vantage.id, ANOMALY_TCP_IP)
        if policy.mechanism == MECH_THROTTLE:
            origin_latency = origin.latency_ms if origin else _DEFAULT_ORIGIN_LATENCY_MS
            if vantage.base_latency_ms + origin_latency + policy.delay_ms > timeout_s * 1000.0:
                return anomaly(url, vantage.id, ANOMALY_TCP_IP)
            return OoniRecord(url=url, vantage_id=vantage.id, verdict=VERDICT_OK)
        if policy.mechanism == MECH_BLOCK_PAGE:
            return anomaly(url, vantage.id, ANOMALY_HTTP_DIFF)
        if policy.mechanism == MECH_BOT_403:
            return OoniRecord(url=url, vantage_id=vantage.id, verdict=VERDICT_OK)
    if origin is not None and origin.transport_fail is not None:
        # Globally dead: the probe's control fails too, verdict inconclusive.
        return OoniRecord(url=url, vantage_id=vantage.id, verdict=VERDICT_ERROR)
    return OoniRecord(url=url, vantage_id=vantage.id, verdict=VERDICT_OK)


class SimTransport:
    """Adapter exposing a scenario vantage through the Transport protocol."""

    def __init__(self, scenario: Scenario, vantage_id: str, user_agent: str = DEFAULT_USER_AGENT):
        if vantage_id not in scenario.vantages:
            raise ConfigError(f"scenario has no vantage {vantage_id!r}")
        self._scenario = scenario
        self._vantage = scenario.vantages[vantage_id]
        self._user_agent = user_agent
        self.vantage_id = vantage_id

    def fetch(self, url: str, run_id: int, timeout_s: float = DEFAULT_TIMEOUT_S) -> FetchOutcome:
        return simulate_fetch(
            url, self._vantage, run_id, self._scenario,
            timeout_s=timeout_s, user_agent=self._user_agent,
        )
