"""Seed URL list loading.

Seed lists are newline-delimited URL files. A line may optionally carry a
list-name column after a tab; otherwise the file stem is used. Lines that do
not parse as absolute http(s) URLs are logged and skipped.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from pathlib import Path
from urllib.parse import urlparse

from .errors import IngestError

logger = logging.getLogger(__name__)

VALID_GROUPS = ("blackpink", "citizenlab", "other")


@dataclass(frozen=True)
class SourceEntry:
    url: str
    list_name: str
    group: str = "other"


def is_absolute_http_url(text: str) -> bool:
    try:
        parsed = urlparse(text)
    except ValueError:
        return False
    return parsed.scheme in ("http", "https") and bool(parsed.netloc)


def load_source_lists(
    paths: list[str | Path],
    groups: dict[str, str] | None = None,
) -> list[SourceEntry]:
    """Load and merge seed URL files, deduplicating on the exact URL string.

    Order is stable: file order, then line order; the first occurrence of a
    duplicate URL wins. ``groups`` maps list names to a group label.

    Raises IngestError for an unreadable file or if no valid URL survives.
    """
    groups = groups or {}
    seen: set[str] = set()
    entries: list[SourceEntry] = []
    for path in paths:
        path = Path(path)
        try:
            text = path.read_text(encoding="utf-8", errors="replace")
        except OSError as exc:
            raise IngestError(f"cannot read source list {path}: {exc}") from exc
        default_name = path.stem
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            url, _, name = line.partition("\t")
            url = url.strip()
            list_name = name.strip() or default_name
            if not is_absolute_http_url(url):
                logger.warning("%s:%d: skipping malformed URL %r", path, lineno, raw)
                continue
            if url in seen:
                continue
            seen.add(url)
            group = groups.get(list_name, "other")
            if group not in VALID_GROUPS:
                raise IngestError(f"unknown source group {group!r} for list {list_name!r}")
            entries.append(SourceEntry(url=url, list_name=list_name, group=group))
    if not entries:
        raise IngestError("no valid URLs found in source lists")
    return entries
