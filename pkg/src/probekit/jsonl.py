"""Line-delimited JSON record IO.

Every inter-stage file is UTF-8 JSON, one record per line, keys sorted so
that identical records serialize to identical bytes.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any, Iterable, Iterator


def dumps(record: dict[str, Any]) -> str:
    return json.dumps(record, ensure_ascii=False, sort_keys=True, separators=(",", ":"))


def write_records(path: str | Path, records: Iterable[dict[str, Any]]) -> int:
    """Write records to path, returning the number written."""
    n = 0
    with open(path, "w", encoding="utf-8") as fh:
        for record in records:
            fh.write(dumps(record))
            fh.write("\n")
            n += 1
    return n


def append_record(fh, record: dict[str, Any]) -> None:
    """Append one record to an open file handle and flush it durably."""
    fh.write(dumps(record))
    fh.write("\n")
    fh.flush()


def read_records(path: str | Path) -> Iterator[dict[str, Any]]:
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                yield json.loads(line)
