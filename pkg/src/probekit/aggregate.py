"""Collapsing per-run outcomes into consistent results, the baseline, and
per-vantage deviations from it.

A URL's result at a vantage is *consistent* when one response class covers
at least 95 percent of its recorded runs (exactly 0.95 counts; the share is
taken over recorded runs, so missed runs shrink the denominator rather than
poison it). With 50 runs that means 48 or more; with 8 runs, all 8.

The baseline is the unanimous view of the designated high-freedom vantages:
a URL enters it only when every one of them has a consistent result and all
of those results agree.

A vantage differs from the baseline on a URL when its consistent class
disagrees with the baseline class, or when it has a consistent result for a
URL the baseline could not agree on. Classes are compared as broad
categories; two different error statuses are still both "error".
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Iterable

from .probe import FetchOutcome, ResponseClass, classify

logger = logging.getLogger(__name__)

CONSISTENCY_THRESHOLD = 0.95

# Fixed order makes argmax ties deterministic (ties cannot clear the 0.95
# bar anyway unless there is a single run, but determinism is free).
_CLASS_ORDER = (ResponseClass.ACCESSIBLE, ResponseClass.INACCESSIBLE, ResponseClass.ERROR)


@dataclass(frozen=True)
class UrlRunSummary:
    url: str
    vantage_id: str
    counts: dict[ResponseClass, int]
    n_runs: int
    consistent: ResponseClass | None
    first_ts: float = 0.0
    last_ts: float = 0.0
    code_counts: dict[tuple[str, int], int] | None = None

    def span_days(self) -> float:
        return max(0.0, (self.last_ts - self.first_ts) / 86400.0)


@dataclass(frozen=True)
class BaselineSet:
    entries: dict[str, ResponseClass]
    vantage_ids: tuple[str, ...]


@dataclass(frozen=True)
class DiffRecord:
    url: str
    vantage_id: str
    response_class: ResponseClass
    baseline_class: ResponseClass | None


def summarize(
    outcomes: Iterable[FetchOutcome],
    threshold: float = CONSISTENCY_THRESHOLD,
) -> UrlRunSummary:
    """Fold one URL-at-one-vantage outcome stream into a summary."""
    outcomes = list(outcomes)
    if not outcomes:
        raise ValueError("summarize needs at least one outcome")
    url = outcomes[0].url
    vantage = outcomes[0].vantage_id
    counts: dict[ResponseClass, int] = {}
    code_counts: dict[tuple[str, int], int] = {}
    first_ts = min(o.timestamp for o in outcomes)
    last_ts = max(o.timestamp for o in outcomes)
    for outcome in outcomes:
        if outcome.url != url or outcome.vantage_id != vantage:
            raise ValueError("summarize expects outcomes for a single url and vantage")
        cls = classify(outcome)
        counts[cls] = counts.get(cls, 0) + 1
        key = (outcome.kind, outcome.code)
        code_counts[key] = code_counts.get(key, 0) + 1
    n_runs = len(outcomes)
    top = max(_CLASS_ORDER, key=lambda c: counts.get(c, 0))
    consistent = top if counts.get(top, 0) / n_runs >= threshold else None
    return UrlRunSummary(
        url=url,
        vantage_id=vantage,
        counts=counts,
        n_runs=n_runs,
        consistent=consistent,
        first_ts=first_ts,
        last_ts=last_ts,
        code_counts=code_counts,
    )


def summarize_log(
    outcomes: Iterable[FetchOutcome],
    threshold: float = CONSISTENCY_THRESHOLD,
) -> dict[tuple[str, str], UrlRunSummary]:
    """Group a full outcome log by (url, vantage) and summarize each group."""
    groups: dict[tuple[str, str], list[FetchOutcome]] = {}
    for outcome in outcomes:
        groups.setdefault((outcome.url, outcome.vantage_id), []).append(outcome)
    return {key: summarize(group, threshold) for key, group in groups.items()}


def build_baseline(
    summaries: dict[tuple[str, str], UrlRunSummary],
    baseline_vantages: list[str],
) -> BaselineSet:
    """Unanimous consistent results across all designated baseline vantages."""
    if not baseline_vantages:
        raise ValueError("baseline vantage list is empty")
    urls = {url for (url, vantage) in summaries if vantage in baseline_vantages}
    entries: dict[str, ResponseClass] = {}
    for url in urls:
        classes = []
        complete = True
        for vantage in baseline_vantages:
            summary = summaries.get((url, vantage))
            if summary is None or summary.consistent is None:
                complete = False
                break
            classes.append(summary.consistent)
        if complete and len(set(classes)) == 1:
            entries[url] = classes[0]
    return BaselineSet(entries=entries, vantage_ids=tuple(baseline_vantages))


def diff(summary: UrlRunSummary, baseline: BaselineSet) -> DiffRecord | None:
    """Deviation of one consistent vantage result from the baseline, if any."""
    if summary.consistent is None:
        return None
    baseline_class = baseline.entries.get(summary.url)
    if baseline_class is None:
        return DiffRecord(
            url=summary.url,
            vantage_id=summary.vantage_id,
            response_class=summary.consistent,
            baseline_class=None,
        )
    if baseline_class == summary.consistent:
        return None
    return DiffRecord(
        url=summary.url,
        vantage_id=summary.vantage_id,
        response_class=summary.consistent,
        baseline_class=baseline_class,
    )


def diff_all(
    summaries: dict[tuple[str, str], UrlRunSummary],
    baseline: BaselineSet,
    skip_vantages: Iterable[str] = (),
) -> list[DiffRecord]:
    skip = set(skip_vantages)
    records = []
    for (url, vantage) in sorted(summaries):
        if vantage in skip:
            continue
        record = diff(summaries[(url, vantage)], baseline)
        if record is not None:
            records.append(record)
    return records
