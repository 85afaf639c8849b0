"""Per-URL fetching from a vantage point and response classification.

One GET is issued for the index resource only: redirects are not followed,
no links are clicked, and at most the first 64 KiB of body is read. Every
failure mode maps to an encoded outcome rather than an exception, using the
transfer-tool exit-code convention so tabulated reports line up with
long-standing practice:

    6   could not resolve host (DNS)
    7   could not connect
    28  operation timed out
    35  TLS handshake failure
    56  connection reset / receive failure
    60  TLS certificate could not be verified
    92  HTTP/2 or protocol-layer error

Classification is a total function over outcomes: 2xx and 3xx statuses are
accessible (a redirect answer counts as reachable), any transport error is
inaccessible, and every other status is an error.
"""

from __future__ import annotations

import logging
import random
import time
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Protocol

from . import jsonl

logger = logging.getLogger(__name__)

DEFAULT_TIMEOUT_S = 30.0
BODY_CAP_BYTES = 64 * 1024
DEFAULT_USER_AGENT = "probekit/0.1 (accessibility measurement; abuse: see README)"

EXIT_DNS = 6
EXIT_CONNECT = 7
EXIT_TIMEOUT = 28
EXIT_TLS_HANDSHAKE = 35
EXIT_RECV = 56
EXIT_TLS_CERT = 60
EXIT_PROTOCOL = 92

KIND_HTTP = "http_status"
KIND_TRANSPORT = "transport_error"


class ResponseClass(str, Enum):
    ACCESSIBLE = "accessible"
    INACCESSIBLE = "inaccessible"
    ERROR = "error"


@dataclass(frozen=True)
class FetchOutcome:
    url: str
    vantage_id: str
    run_id: int
    kind: str            # KIND_HTTP or KIND_TRANSPORT
    code: int            # HTTP status 100-599, or transport exit code
    elapsed_ms: float
    timestamp: float     # epoch seconds (virtual time under simulation)

    def __post_init__(self) -> None:
        if self.kind not in (KIND_HTTP, KIND_TRANSPORT):
            raise ValueError(f"unknown outcome kind {self.kind!r}")
        if self.kind == KIND_HTTP and not (100 <= self.code <= 599):
            raise ValueError(f"HTTP status out of range: {self.code}")


def classify(outcome: FetchOutcome) -> ResponseClass:
    """Map an outcome onto the three response classes. Total and pure."""
    if outcome.kind == KIND_TRANSPORT:
        return ResponseClass.INACCESSIBLE
    if 200 <= outcome.code <= 399:
        return ResponseClass.ACCESSIBLE
    return ResponseClass.ERROR


class Transport(Protocol):
    """A vantage point's fetch capability (real network or simulation)."""

    def fetch(self, url: str, run_id: int, timeout_s: float) -> FetchOutcome: ...


class RealTransport:
    """Fetch over the real network with requests.

    Not used by the test suite; campaigns against real networks should pace
    themselves to roughly one request per URL per day.
    """

    def __init__(self, vantage_id: str, user_agent: str = DEFAULT_USER_AGENT,
                 proxies: dict[str, str] | None = None):
        self.vantage_id = vantage_id
        self._user_agent = user_agent
        self._proxies = proxies

    def fetch(self, url: str, run_id: int, timeout_s: float = DEFAULT_TIMEOUT_S) -> FetchOutcome:
        import requests
        from requests import exceptions as rex

        start = time.time()

        def outcome(kind: str, code: int) -> FetchOutcome:
            return FetchOutcome(
                url=url, vantage_id=self.vantage_id, run_id=run_id, kind=kind,
                code=code, elapsed_ms=(time.time() - start) * 1000.0, timestamp=start,
            )

        try:
            with requests.get(
                url,
                headers={"User-Agent": self._user_agent},
                timeout=timeout_s,
                allow_redirects=False,
                stream=True,
                proxies=self._proxies,
            ) as response:
                read = 0
                for chunk in response.iter_content(chunk_size=8192):
                    read += len(chunk)
                    if read >= BODY_CAP_BYTES:
                        break
                return outcome(KIND_HTTP, response.status_code)
        except rex.SSLError as exc:
            code = EXIT_TLS_CERT if "certificate" in str(exc).lower() else EXIT_TLS_HANDSHAKE
            return outcome(KIND_TRANSPORT, code)
        except (rex.ConnectTimeout, rex.ReadTimeout, rex.Timeout):
            return outcome(KIND_TRANSPORT, EXIT_TIMEOUT)
        except rex.ConnectionError as exc:
            message = str(exc).lower()
            if "name" in message and ("resolution" in message or "resolve" in message or "getaddrinfo" in message):
                return outcome(KIND_TRANSPORT, EXIT_DNS)
            if "reset" in message or "aborted" in message:
                return outcome(KIND_TRANSPORT, EXIT_RECV)
            return outcome(KIND_TRANSPORT, EXIT_CONNECT)
        except rex.RequestException:
            return outcome(KIND_TRANSPORT, EXIT_PROTOCOL)


def fetch(url: str, vantage: Transport, timeout_s: float = DEFAULT_TIMEOUT_S) -> FetchOutcome:
    """Issue one paced GET through the vantage transport."""
    return vantage.fetch(url, run_id=0, timeout_s=timeout_s)


def outcome_to_record(outcome: FetchOutcome) -> dict:
    return {
        "url": outcome.url,
        "vantage": outcome.vantage_id,
        "run": outcome.run_id,
        "kind": outcome.kind,
        "code": outcome.code,
        "elapsed_ms": round(outcome.elapsed_ms, 3),
        "ts": outcome.timestamp,
    }


def record_to_outcome(record: dict) -> FetchOutcome:
    return FetchOutcome(
        url=record["url"],
        vantage_id=record["vantage"],
        run_id=record["run"],
        kind=record["kind"],
        code=record["code"],
        elapsed_ms=record["elapsed_ms"],
        timestamp=record["ts"],
    )


def run_campaign(
    urls: list[str],
    vantage: Transport,
    vantage_id: str,
    n_runs: int,
    log_path: str | Path,
    timeout_s: float = DEFAULT_TIMEOUT_S,
    shuffle_seed: int = 0,
    pace_s: float = 0.0,
) -> int:
    """Fetch every URL ``n_runs`` times, appending outcomes durably.

    The outcome log is the checkpoint: on restart, already-recorded
    (url, run) pairs are skipped, so a killed campaign resumes without
    duplicates. Each run visits URLs in a seeded shuffle of its own so
    transient failures do not correlate with list position.
    """
    if n_runs < 1:
        raise ValueError("n_runs must be at least 1")
    log_path = Path(log_path)
    done: set[tuple[str, int]] = set()
    if log_path.exists():
        for record in jsonl.read_records(log_path):
            if record["vantage"] == vantage_id:
                done.add((record["url"], record["run"]))
        if done:
            logger.info("resuming campaign at %s: %d outcomes already recorded", vantage_id, len(done))

    written = 0
    with open(log_path, "a", encoding="utf-8") as fh:
        for run_id in range(n_runs):
            order = list(urls)
            # string seeds hash stably across processes; tuples do not
            random.Random(f"{shuffle_seed}|{vantage_id}|{run_id}").shuffle(order)
            for url in order:
                if (url, run_id) in done:
                    continue
                outcome = vantage.fetch(url, run_id=run_id, timeout_s=timeout_s)
                jsonl.append_record(fh, outcome_to_record(outcome))
                done.add((url, run_id))
                written += 1
                if pace_s > 0:
                    time.sleep(pace_s)
    return written
