"""Domain-level analytics over aggregated measurement results.

Covers the known/new partition against the seed corpus, Jaccard similarity
between per-vantage domain sets, and the final suspected-blocked verdicts,
which require three independent signals to line up for a domain:

  1. a consistent inaccessible result (or an error deviating from the
     baseline) at some vantage,
  2. sustained over a minimum time span (default 120 days), and
  3. an agreeing anomaly from the independent probe tool at that vantage.

Fetch-fails-but-probe-is-clean cases are collected separately as suspected
server-side blocking; they never enter the blocked list.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

from .aggregate import DiffRecord, UrlRunSummary
from .ooni import OoniRecord, ooni_agreement
from .probe import ResponseClass
from .psl import DomainKey, PublicSuffixList, default_list, pld_of_url

logger = logging.getLogger(__name__)

DEFAULT_MIN_SPAN_DAYS = 120.0

KNOWN = "known"
NEW = "new"


def partition_new(
    probe_domains: set[DomainKey],
    source_domains: set[DomainKey],
) -> dict[DomainKey, str]:
    """Label each probe-list domain known or new relative to the seed corpus.

    The comparison set must come from the full seed corpus, dead links
    included, so "new" stays a conservative claim.
    """
    return {d: (KNOWN if d in source_domains else NEW) for d in probe_domains}


@dataclass(frozen=True)
class JaccardResult:
    value: float
    both_empty: bool = False


def jaccard(a: set, b: set) -> JaccardResult:
    """|a ∩ b| / |a ∪ b|; two empty sets compare as 1.0 with a flag, since
    the ratio is undefined there."""
    if not a and not b:
        return JaccardResult(value=1.0, both_empty=True)
    return JaccardResult(value=len(a & b) / len(a | b))


def jaccard_matrix(sets_by_vantage: dict[str, set]) -> tuple[list[str], list[list[float]]]:
    """Symmetric pairwise Jaccard matrix, vantages sorted by id."""
    vantages = sorted(sets_by_vantage)
    matrix = []
    for va in vantages:
        row = []
        for vb in vantages:
            row.append(round(jaccard(sets_by_vantage[va], sets_by_vantage[vb]).value, 6))
        matrix.append(row)
    return vantages, matrix


@dataclass
class BlockEvidence:
    vantage_id: str
    url: str
    curl_class: ResponseClass
    ooni_kind: str
    span_days: float

    @property
    def months_consistent(self) -> float:
        return round(self.span_days / 30.0, 2)


@dataclass
class SuspectedBlocked:
    domain: DomainKey
    vantages: set[str] = field(default_factory=set)
    evidence: list[BlockEvidence] = field(default_factory=list)


def suspected_blocked(
    diffs: list[DiffRecord],
    summaries: dict[tuple[str, str], UrlRunSummary],
    ooni_records: dict[tuple[str, str], OoniRecord],
    min_span_days: float = DEFAULT_MIN_SPAN_DAYS,
    rules: PublicSuffixList | None = None,
) -> list[SuspectedBlocked]:
    """Domains whose deviation from baseline persisted and was corroborated.

    Only inaccessible and error diffs qualify; accessible-where-baseline-
    errored is a deviation but not blocking. Every verdict traces back to a
    diff record, a summary meeting the span requirement, and an agreeing
    anomaly at the same vantage.
    """
    rules = rules or default_list()
    flagged: dict[DomainKey, SuspectedBlocked] = {}
    for diff in diffs:
        if diff.response_class == ResponseClass.ACCESSIBLE:
            continue
        summary = summaries.get((diff.url, diff.vantage_id))
        if summary is None or summary.consistent != diff.response_class:
            continue
        if summary.span_days() < min_span_days:
            continue
        record = ooni_records.get((diff.url, diff.vantage_id))
        if record is None or not ooni_agreement(diff.response_class, record):
            continue
        try:
            domain = pld_of_url(diff.url, rules)
        except Exception:
            logger.warning("cannot derive domain for %s", diff.url)
            continue
        entry = flagged.setdefault(domain, SuspectedBlocked(domain=domain))
        entry.vantages.add(diff.vantage_id)
        entry.evidence.append(
            BlockEvidence(
                vantage_id=diff.vantage_id,
                url=diff.url,
                curl_class=diff.response_class,
                ooni_kind=record.anomaly_kind or "",
                span_days=round(summary.span_days(), 2),
            )
        )
    return [flagged[d] for d in sorted(flagged, key=lambda k: k.pld)]


@dataclass(frozen=True)
class DisagreementRecord:
    """Fetch failed but the independent probe saw nothing: suspected
    server-side blocking of automated clients."""

    url: str
    vantage_id: str
    curl_class: ResponseClass
    domain: DomainKey


def curl_ooni_disagreements(
    summaries: dict[tuple[str, str], UrlRunSummary],
    ooni_records: dict[tuple[str, str], OoniRecord],
    rules: PublicSuffixList | None = None,
) -> list[DisagreementRecord]:
    rules = rules or default_list()
    out = []
    for (url, vantage) in sorted(summaries):
        summary = summaries[(url, vantage)]
        if summary.consistent not in (ResponseClass.INACCESSIBLE, ResponseClass.ERROR):
            continue
        record = ooni_records.get((url, vantage))
        if record is None or record.verdict != "ok":
            continue
        try:
            domain = pld_of_url(url, rules)
        except Exception:
            continue
        out.append(
            DisagreementRecord(url=url, vantage_id=vantage, curl_class=summary.consistent, domain=domain)
        )
    return out
