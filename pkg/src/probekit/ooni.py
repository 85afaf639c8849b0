"""Simplified anomaly-probe records and the agreement rule.

Records carry one verdict per (url, vantage): ok, an anomaly of a specific
kind (dns, tcp_ip, http_failure, http_diff), or error. The import adapter
maps the public measurement format's ``blocking`` values onto that enum;
repeated measurements dedup latest-wins.

Agreement with fetch-based classification: both tools concur when the fetch
said accessible and the probe saw nothing wrong, or when the fetch failed
(inaccessible or error) and the probe flagged an anomaly. A failed fetch
with a clean probe result is a disagreement worth reporting on its own: it
is the signature of server-side blocking of automated clients rather than
network interference.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Iterable

from . import jsonl
from .errors import SchemaError
from .probe import ResponseClass

VERDICT_OK = "ok"
VERDICT_ERROR = "error"

ANOMALY_DNS = "dns"
ANOMALY_TCP_IP = "tcp_ip"
ANOMALY_HTTP_FAILURE = "http_failure"
ANOMALY_HTTP_DIFF = "http_diff"
ANOMALY_KINDS = (ANOMALY_DNS, ANOMALY_TCP_IP, ANOMALY_HTTP_FAILURE, ANOMALY_HTTP_DIFF)

# Values seen in the public measurement format's "blocking" field.
_BLOCKING_MAP = {
    "dns": ANOMALY_DNS,
    "tcp_ip": ANOMALY_TCP_IP,
    "tcp-ip": ANOMALY_TCP_IP,
    "http-failure": ANOMALY_HTTP_FAILURE,
    "http_failure": ANOMALY_HTTP_FAILURE,
    "http-diff": ANOMALY_HTTP_DIFF,
    "http_diff": ANOMALY_HTTP_DIFF,
}


@dataclass(frozen=True)
class OoniRecord:
    url: str
    vantage_id: str
    verdict: str            # VERDICT_OK, VERDICT_ERROR, or "anomaly"
    anomaly_kind: str | None = None

    def __post_init__(self) -> None:
        if self.verdict == "anomaly" and self.anomaly_kind not in ANOMALY_KINDS:
            raise ValueError(f"bad anomaly kind {self.anomaly_kind!r}")
        if self.verdict not in ("anomaly", VERDICT_OK, VERDICT_ERROR):
            raise ValueError(f"bad verdict {self.verdict!r}")

    @property
    def is_anomaly(self) -> bool:
        return self.verdict == "anomaly"


def anomaly(url: str, vantage_id: str, kind: str) -> OoniRecord:
    return OoniRecord(url=url, vantage_id=vantage_id, verdict="anomaly", anomaly_kind=kind)


def from_blocking_value(url: str, vantage_id: str, blocking) -> OoniRecord:
    """Map a raw ``blocking`` field value onto a record.

    false means no blocking observed (ok); null means the measurement itself
    failed (error); anything else must be a known anomaly label.
    """
    if blocking is False or blocking == "false":
        return OoniRecord(url=url, vantage_id=vantage_id, verdict=VERDICT_OK)
    if blocking is None or blocking == "null":
        return OoniRecord(url=url, vantage_id=vantage_id, verdict=VERDICT_ERROR)
    kind = _BLOCKING_MAP.get(str(blocking))
    if kind is None:
        raise SchemaError(f"unknown blocking value {blocking!r} for {url}")
    return anomaly(url, vantage_id, kind)


def load_records(path: str | Path) -> dict[tuple[str, str], OoniRecord]:
    """Import {url, vantage, blocking} records; latest entry per key wins."""
    records: dict[tuple[str, str], OoniRecord] = {}
    for record in jsonl.read_records(path):
        try:
            url = record["url"]
            vantage = record["vantage"]
            blocking = record["blocking"]
        except KeyError as exc:
            raise SchemaError(f"{path}: record missing field {exc}") from exc
        records[(url, vantage)] = from_blocking_value(url, vantage, blocking)
    return records


def dump_records(path: str | Path, records: Iterable[OoniRecord]) -> None:
    def as_record(r: OoniRecord) -> dict:
        if r.is_anomaly:
            blocking = r.anomaly_kind.replace("_", "-") if r.anomaly_kind != ANOMALY_TCP_IP else "tcp_ip"
        elif r.verdict == VERDICT_OK:
            blocking = False
        else:
            blocking = None
        return {"url": r.url, "vantage": r.vantage_id, "blocking": blocking}

    jsonl.write_records(path, (as_record(r) for r in records))


def ooni_agreement(curl_class: ResponseClass, record: OoniRecord) -> bool:
    """True when the fetch classification and the probe verdict concur."""
    if curl_class == ResponseClass.ACCESSIBLE:
        return record.verdict == VERDICT_OK
    return record.is_anomaly
