"""Report tables over aggregated campaign results.

Tables are emitted as tab-separated text with a header row, plus a
machine-readable summary dict mirroring the same numbers. Domain-level
columns count a domain once per response class it exhibits, so a domain
with both an accessible and an erroring URL appears in both columns and
percentage rows may sum past 100.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from typing import Iterable

from .aggregate import BaselineSet, DiffRecord, UrlRunSummary
from .analyze import jaccard_matrix
from .ooni import OoniRecord
from .probe import KIND_HTTP, KIND_TRANSPORT, ResponseClass
from .psl import PublicSuffixList, default_list, pld_of_url

_CLASSES = (ResponseClass.ACCESSIBLE, ResponseClass.INACCESSIBLE, ResponseClass.ERROR)
_CLASS_LABEL = {
    ResponseClass.ACCESSIBLE: "Accessible",
    ResponseClass.INACCESSIBLE: "Inaccessible",
    ResponseClass.ERROR: "Error",
}


def render_table(headers: list[str], rows: list[list[str]]) -> str:
    lines = ["\t".join(headers)]
    for row in rows:
        lines.append("\t".join(str(cell) for cell in row))
    return "\n".join(lines) + "\n"


def _pct(part: int, whole: int) -> str:
    return f"{(100.0 * part / whole):.2f}%" if whole else "0.00%"


def _domain_of(url: str, rules: PublicSuffixList) -> str | None:
    try:
        return pld_of_url(url, rules).pld
    except Exception:
        return None


@dataclass
class ReportBundle:
    tables: dict[str, str] = field(default_factory=dict)
    summary: dict = field(default_factory=dict)


def class_count_table(
    summaries: dict[tuple[str, str], UrlRunSummary],
    rules: PublicSuffixList | None = None,
) -> tuple[str, dict]:
    """Consistent URL and domain counts per response class, by vantage."""
    rules = rules or default_list()
    per_vantage_urls: dict[str, dict[ResponseClass, int]] = defaultdict(lambda: defaultdict(int))
    per_vantage_domains: dict[str, dict[ResponseClass, set]] = defaultdict(lambda: defaultdict(set))
    totals_urls: dict[str, int] = defaultdict(int)
    totals_domains: dict[str, set] = defaultdict(set)
    vantages = set()
    for (url, vantage), summary in summaries.items():
        vantages.add(vantage)
        if summary.consistent is None:
            continue
        per_vantage_urls[vantage][summary.consistent] += 1
        totals_urls[vantage] += 1
        domain = _domain_of(url, rules)
        if domain:
            per_vantage_domains[vantage][summary.consistent].add(domain)
            totals_domains[vantage].add(domain)

    headers = ["vantage"]
    for scope in ("url", "dom"):
        for cls in _CLASSES:
            headers.append(f"{scope}_{_CLASS_LABEL[cls].lower()}")
            headers.append(f"{scope}_{_CLASS_LABEL[cls].lower()}_pct")
        headers.append(f"{scope}_total")

    rows = []
    machine: dict[str, dict] = {}
    for vantage in sorted(vantages):
        url_total = totals_urls.get(vantage, 0)
        dom_total = len(totals_domains.get(vantage, set()))
        row = [vantage]
        entry: dict = {"urls": {}, "domains": {}, "url_total": url_total, "domain_total": dom_total}
        for cls in _CLASSES:
            count = per_vantage_urls[vantage].get(cls, 0)
            row += [str(count), _pct(count, url_total)]
            entry["urls"][cls.value] = count
        row.append(str(url_total))
        for cls in _CLASSES:
            count = len(per_vantage_domains[vantage].get(cls, set()))
            row += [str(count), _pct(count, dom_total)]
            entry["domains"][cls.value] = count
        row.append(str(dom_total))
        rows.append(row)
        machine[vantage] = entry
    return render_table(headers, rows), machine


def diff_class_table(
    diffs: list[DiffRecord],
    rules: PublicSuffixList | None = None,
) -> tuple[str, dict]:
    """Of each vantage's deviations from baseline, the split by class."""
    rules = rules or default_list()
    url_counts: dict[str, dict[ResponseClass, int]] = defaultdict(lambda: defaultdict(int))
    dom_counts: dict[str, dict[ResponseClass, set]] = defaultdict(lambda: defaultdict(set))
    for diff in diffs:
        url_counts[diff.vantage_id][diff.response_class] += 1
        domain = _domain_of(diff.url, rules)
        if domain:
            dom_counts[diff.vantage_id][diff.response_class].add(domain)

    headers = ["vantage"]
    for scope in ("url", "dom"):
        for cls in _CLASSES:
            headers += [f"{scope}_{_CLASS_LABEL[cls].lower()}", f"{scope}_{_CLASS_LABEL[cls].lower()}_pct"]
        headers.append(f"{scope}_total")
    rows = []
    machine: dict[str, dict] = {}
    for vantage in sorted(url_counts):
        url_total = sum(url_counts[vantage].values())
        domains_union = set().union(*dom_counts[vantage].values()) if dom_counts[vantage] else set()
        dom_total = len(domains_union)
        row = [vantage]
        entry: dict = {"urls": {}, "domains": {}, "url_total": url_total, "domain_total": dom_total}
        for cls in _CLASSES:
            count = url_counts[vantage].get(cls, 0)
            row += [str(count), _pct(count, url_total)]
            entry["urls"][cls.value] = count
        row.append(str(url_total))
        for cls in _CLASSES:
            count = len(dom_counts[vantage].get(cls, set()))
            row += [str(count), _pct(count, dom_total)]
            entry["domains"][cls.value] = count
        row.append(str(dom_total))
        rows.append(row)
        machine[vantage] = entry
    return render_table(headers, rows), machine


def _dominant_code(summary: UrlRunSummary, kind: str) -> int | None:
    if not summary.code_counts:
        return None
    candidates = [(count, code) for (k, code), count in summary.code_counts.items() if k == kind]
    if not candidates:
        return None
    return max(candidates)[1]


def code_breakdown_table(
    summaries: dict[tuple[str, str], UrlRunSummary],
    diffs: list[DiffRecord],
    response_class: ResponseClass,
    kind: str,
    rules: PublicSuffixList | None = None,
) -> tuple[str, dict]:
    """Share of each concrete code among a class's baseline deviations.

    With class inaccessible and kind transport this is the exit-code table;
    with class error and kind http it is the error-status table.
    """
    rules = rules or default_list()
    counts: dict[str, dict[int, int]] = defaultdict(lambda: defaultdict(int))
    for diff in diffs:
        if diff.response_class != response_class:
            continue
        summary = summaries.get((diff.url, diff.vantage_id))
        if summary is None:
            continue
        code = _dominant_code(summary, kind)
        if code is not None:
            counts[diff.vantage_id][code] += 1

    all_codes = sorted({code for per in counts.values() for code in per})
    headers = ["vantage"] + [str(code) for code in all_codes]
    rows = []
    machine: dict[str, dict[str, float]] = {}
    for vantage in sorted(counts):
        total = sum(counts[vantage].values())
        row = [vantage]
        entry = {}
        for code in all_codes:
            share = 100.0 * counts[vantage].get(code, 0) / total if total else 0.0
            row.append(f"{share:.2f}")
            entry[str(code)] = round(share, 2)
        rows.append(row)
        machine[vantage] = entry
    return render_table(headers, rows), machine


def anomaly_table(
    ooni_records: Iterable[OoniRecord],
    rules: PublicSuffixList | None = None,
) -> tuple[str, dict]:
    """Anomalous probe results split by kind, URL- and domain-level."""
    rules = rules or default_list()
    kinds = ("dns", "tcp_ip", "http_failure", "http_diff")
    url_counts: dict[str, dict[str, int]] = defaultdict(lambda: defaultdict(int))
    dom_counts: dict[str, dict[str, set]] = defaultdict(lambda: defaultdict(set))
    for record in ooni_records:
        if not record.is_anomaly:
            continue
        url_counts[record.vantage_id][record.anomaly_kind] += 1
        domain = _domain_of(record.url, rules)
        if domain:
            dom_counts[record.vantage_id][record.anomaly_kind].add(domain)
    headers = ["vantage"]
    for scope in ("url", "dom"):
        for kind in kinds:
            headers += [f"{scope}_{kind}", f"{scope}_{kind}_pct"]
        headers.append(f"{scope}_total")
    rows = []
    machine: dict[str, dict] = {}
    for vantage in sorted(url_counts):
        url_total = sum(url_counts[vantage].values())
        domains_union = set().union(*dom_counts[vantage].values()) if dom_counts[vantage] else set()
        dom_total = len(domains_union)
        row = [vantage]
        entry: dict = {"urls": {}, "domains": {}, "url_total": url_total, "domain_total": dom_total}
        for kind in kinds:
            count = url_counts[vantage].get(kind, 0)
            row += [str(count), _pct(count, url_total)]
            entry["urls"][kind] = count
        row.append(str(url_total))
        for kind in kinds:
            count = len(dom_counts[vantage].get(kind, set()))
            row += [str(count), _pct(count, dom_total)]
            entry["domains"][kind] = count
        row.append(str(dom_total))
        rows.append(row)
        machine[vantage] = entry
    return render_table(headers, rows), machine


def jaccard_table(sets_by_vantage: dict[str, set]) -> tuple[str, dict]:
    vantages, matrix = jaccard_matrix(sets_by_vantage)
    headers = ["vantage"] + vantages
    rows = []
    for i, vantage in enumerate(vantages):
        rows.append([vantage] + [f"{value:.4f}" for value in matrix[i]])
    machine = {"vantages": vantages, "matrix": matrix}
    return render_table(headers, rows), machine


def domain_sets_by_class(
    summaries: dict[tuple[str, str], UrlRunSummary],
    response_class: ResponseClass,
    rules: PublicSuffixList | None = None,
) -> dict[str, set]:
    """Per-vantage sets of domains showing a given consistent class."""
    rules = rules or default_list()
    sets: dict[str, set] = defaultdict(set)
    vantages = {vantage for (_, vantage) in summaries}
    for vantage in vantages:
        sets[vantage] = set()
    for (url, vantage), summary in summaries.items():
        if summary.consistent != response_class:
            continue
        domain = _domain_of(url, rules)
        if domain:
            sets[vantage].add(domain)
    return dict(sets)


def tabulate(
    summaries: dict[tuple[str, str], UrlRunSummary],
    baseline: BaselineSet,
    diffs: list[DiffRecord],
    ooni_records: dict[tuple[str, str], OoniRecord],
    rules: PublicSuffixList | None = None,
) -> ReportBundle:
    """Produce the full report bundle for a campaign."""
    rules = rules or default_list()
    bundle = ReportBundle()

    table, machine = class_count_table(summaries, rules)
    bundle.tables["class_counts"] = table
    bundle.summary["class_counts"] = machine

    table, machine = diff_class_table(diffs, rules)
    bundle.tables["diff_classes"] = table
    bundle.summary["diff_classes"] = machine

    table, machine = code_breakdown_table(
        summaries, diffs, ResponseClass.INACCESSIBLE, KIND_TRANSPORT, rules
    )
    bundle.tables["exit_codes"] = table
    bundle.summary["exit_codes"] = machine

    table, machine = code_breakdown_table(summaries, diffs, ResponseClass.ERROR, KIND_HTTP, rules)
    bundle.tables["error_codes"] = table
    bundle.summary["error_codes"] = machine

    table, machine = anomaly_table(ooni_records.values(), rules)
    bundle.tables["anomalies"] = table
    bundle.summary["anomalies"] = machine

    for cls, name in ((ResponseClass.INACCESSIBLE, "jaccard_inaccessible"),
                      (ResponseClass.ERROR, "jaccard_error")):
        table, machine = jaccard_table(domain_sets_by_class(summaries, cls, rules))
        bundle.tables[name] = table
        bundle.summary[name] = machine

    bundle.summary["baseline_size"] = len(baseline.entries)
    return bundle
