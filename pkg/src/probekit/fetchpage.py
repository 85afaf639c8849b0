"""Seed-page fetching for corpus sanitization (real-network mode).

Follows redirects (recording the chain for the redirect rules), decodes the
body, and extracts main text. Hermetic runs skip this module entirely and
feed recorded snapshots to the sanitize stage instead.
"""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from datetime import datetime, timezone

from .extract import extract_main_text
from .sanitize import PageSnapshot, RedirectInfo

logger = logging.getLogger(__name__)

_MAX_BODY_BYTES = 1024 * 1024


def fetch_page(url: str, timeout_s: float = 30.0, user_agent: str = "probekit/0.1") -> tuple[PageSnapshot, RedirectInfo]:
    """GET one seed URL, following redirects, and extract its main text.

    Transport failures become a snapshot whose status is an error tag, so
    sanitization stays a total function over whatever the network did.
    """
    import requests

    fetched_at = datetime.now(timezone.utc).isoformat()
    try:
        response = requests.get(
            url,
            timeout=timeout_s,
            headers={"User-Agent": user_agent},
            allow_redirects=True,
            stream=True,
        )
        hops = tuple(r.headers.get("Location", r.url) for r in response.history)
        body = response.raw.read(_MAX_BODY_BYTES, decode_content=True) or b""
        text = extract_main_text(body, response.headers.get("Content-Type", ""))
        snapshot = PageSnapshot(
            url=url,
            final_url=response.url,
            status=response.status_code,
            body_text=text,
            char_count=len(text),
            fetched_at=fetched_at,
        )
        return snapshot, RedirectInfo(hops=hops)
    except requests.RequestException as exc:
        tag = type(exc).__name__.lower()
        logger.info("fetch failed for %s: %s", url, tag)
        snapshot = PageSnapshot(
            url=url, final_url=url, status=tag, body_text="", char_count=0, fetched_at=fetched_at
        )
        return snapshot, RedirectInfo()


def fetch_pages(urls: list[str], timeout_s: float = 30.0, parallelism: int = 8):
    """Bounded-parallel fetch preserving input order."""
    with ThreadPoolExecutor(max_workers=max(1, parallelism)) as pool:
        yield from pool.map(lambda u: fetch_page(u, timeout_s), urls)
