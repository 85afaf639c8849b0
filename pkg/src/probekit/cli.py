"""Pipeline orchestration: one subcommand per stage over a shared run
directory.

Each stage reads the previous stage's outputs, writes its own files under
``<run_dir>/<stage>/``, and records a manifest of input hashes, the config
hash, and the seed. Re-running a stage whose manifest matches is a no-op
unless --force is given, which makes the whole pipeline content-addressed.

Exit status: 0 on success, 1 on a stage error, 2 on a configuration error.
"""

from __future__ import annotations

import hashlib
import json
import logging
import sys
import time
from pathlib import Path

import click
import numpy as np

from . import jsonl
from .aggregate import (
    BaselineSet,
    DiffRecord,
    UrlRunSummary,
    build_baseline,
    diff_all,
    summarize_log,
)
from .analyze import curl_ooni_disagreements, partition_new, suspected_blocked
from .clients import (
    FixtureLlmClient,
    FixtureSearchClient,
    FixtureTrendsClient,
    SyntheticLlmClient,
    SyntheticSearchClient,
    SyntheticTrendsClient,
)
from .config import RunConfig, load_config
from .crawl import build_probe_list, search
from .errors import ConfigError, ProbekitError, StageError
from .exchange import ingest_plugin_topics
from .expand import llm_expand, trends_expand
from .extract import extract_main_text
from .language import detect_language
from .lda import train_lda, training_assignments
from .ooni import dump_records, load_records
from .probe import RealTransport, ResponseClass, record_to_outcome, run_campaign
from .psl import default_list, pld_of_url
from .querygen import SearchQuery, generate_queries, tier_keywords
from .report import tabulate
from .sanitize import PageSnapshot, RedirectInfo, SanitizerConfig, sanitize_snapshot
from .simnet import Scenario, SimTransport, simulate_ooni
from .sources import load_source_lists
from .stemmer import DiscardedDoc, stem_and_filter
from .tfidf import tfidf_keywords
from .tokenize import clean_for_embedding, tokenize
from .translate import EnglishBag, FixtureTranslationClient, translate_tokens

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_STAGE_ERROR = 1
EXIT_CONFIG_ERROR = 2


def _sha256_file(path: Path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            digest.update(chunk)
    return digest.hexdigest()


class Stage:
    """Manifest bookkeeping for one pipeline stage."""

    def __init__(self, config: RunConfig, name: str, inputs: dict[str, Path]):
        self.config = config
        self.name = name
        self.inputs = inputs
        self.dir = config.run_dir / name
        self.manifest_path = self.dir / "manifest.json"

    def input_path(self, key: str) -> Path:
        path = self.inputs[key]
        if not path.exists():
            stage_hint = key.split("/")[0]
            raise StageError(f"missing stage: {stage_hint} (expected {path})")
        return path

    def _manifest_body(self) -> dict:
        hashes = {}
        for key, path in self.inputs.items():
            if not path.exists():
                stage_hint = key.split("/")[0]
                raise StageError(f"missing stage: {stage_hint} (expected {path})")
            hashes[key] = _sha256_file(path)
        return {
            "stage": self.name,
            "inputs": hashes,
            "config_hash": self.config.config_hash(),
            "seed": self.config.master_seed,
        }

    def _matches(self, path: Path) -> bool:
        if not path.exists():
            return False
        try:
            previous = json.loads(path.read_text(encoding="utf-8"))
        except ValueError:
            return False
        body = self._manifest_body()
        return all(previous.get(key) == body[key] for key in ("stage", "inputs", "config_hash", "seed"))

    def up_to_date(self) -> bool:
        return self._matches(self.manifest_path)

    def begin(self) -> None:
        """Mark the stage in progress. ``resumable`` says whether a previous
        interrupted attempt ran against identical inputs, so durable partial
        outputs (the probe outcome log) may be kept."""
        self.dir.mkdir(parents=True, exist_ok=True)
        partial = self.dir / "manifest.partial.json"
        self.resumable = self._matches(partial)
        partial.write_text(
            json.dumps(self._manifest_body(), indent=2, sort_keys=True) + "\n", encoding="utf-8"
        )
        self._started = time.monotonic()

    def finish(self) -> None:
        body = self._manifest_body()
        body["duration_s"] = round(time.monotonic() - self._started, 3)
        self.manifest_path.write_text(
            json.dumps(body, indent=2, sort_keys=True) + "\n", encoding="utf-8"
        )
        partial = self.dir / "manifest.partial.json"
        if partial.exists():
            partial.unlink()


def run_stage(stage: Stage, force: bool, work) -> None:
    if not force and stage.up_to_date():
        click.echo(f"{stage.name}: up to date, skipping (use --force to rerun)")
        return
    stage.begin()
    work(stage)
    stage.finish()
    click.echo(f"{stage.name}: done")


pass_config = click.make_pass_decorator(RunConfig)


@click.group()
@click.option("--config", "config_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--verbose", is_flag=True, default=False)
@click.pass_context
def main(ctx: click.Context, config_path: str, verbose: bool) -> None:
    """Probe-list generation and measurement pipeline."""
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    ctx.obj = load_config(config_path)


def _force_option(fn):
    return click.option("--force", is_flag=True, default=False, help="Rerun even if up to date.")(fn)


# --- sanitize ----------------------------------------------------------------

@main.command()
@_force_option
@pass_config
def sanitize(config: RunConfig, force: bool) -> None:
    """Apply dead-page, content-free, and length rules to the seed corpus."""
    if not config.snapshots:
        raise ConfigError("config has no snapshots file; hermetic runs require recorded pages")
    snapshots_path = config.resolve(config.snapshots)
    stage = Stage(config, "sanitize", {"snapshots": snapshots_path})

    def work(stage: Stage) -> None:
        rules = SanitizerConfig.load_default()
        rules.min_chars = config.thresholds.min_chars
        verdicts = []
        live = []
        for record in jsonl.read_records(stage.input_path("snapshots")):
            if "html" in record:
                text = extract_main_text(record["html"], record.get("content_type", ""))
            else:
                text = record.get("body_text", "")
            snapshot = PageSnapshot(
                url=record["url"],
                final_url=record.get("final_url", record["url"]),
                status=record["status"],
                body_text=text,
                char_count=len(text),
                fetched_at=record.get("fetched_at", ""),
            )
            redirect_info = RedirectInfo(hops=tuple(record.get("redirects", [])))
            verdict = sanitize_snapshot(snapshot, redirect_info, rules)
            verdicts.append(
                {
                    "url": verdict.url,
                    "verdict": verdict.verdict,
                    "reason": verdict.reason,
                    "char_count": snapshot.char_count,
                }
            )
            if verdict.verdict == "live":
                live.append(
                    {
                        "url": snapshot.url,
                        "final_url": snapshot.final_url,
                        "text": snapshot.body_text,
                        "char_count": snapshot.char_count,
                    }
                )
        jsonl.write_records(stage.dir / "verdicts.jsonl", verdicts)
        jsonl.write_records(stage.dir / "live.jsonl", live)
        if not live:
            raise StageError("sanitize left no live pages")

    run_stage(stage, force, work)


# --- nlp ---------------------------------------------------------------------

@main.command()
@_force_option
@pass_config
def nlp(config: RunConfig, force: bool) -> None:
    """Detect language, tokenize, translate, and build English bags."""
    stage = Stage(config, "nlp", {"sanitize/live": config.run_dir / "sanitize" / "live.jsonl"})

    def work(stage: Stage) -> None:
        translation_cfg = config.clients.get("translation")
        if translation_cfg and translation_cfg.mode == "fixture":
            client = FixtureTranslationClient.from_file(config.resolve(translation_cfg.fixture))
        else:
            client = FixtureTranslationClient({})
        docs = []
        bags = []
        cleaned = []
        for record in jsonl.read_records(stage.input_path("sanitize/live")):
            text = record["text"]
            tag = detect_language(text)
            docs.append(
                {
                    "url": record["url"],
                    "lang": tag.code,
                    "confidence": tag.confidence,
                    "detector": tag.detector_id,
                }
            )
            if tag.detector_id == "undetected":
                continue
            doc = tokenize(text, tag, url=record["url"])
            try:
                bag = translate_tokens(doc, client)
            except ProbekitError as exc:
                logger.warning("skipping %s: %s", record["url"], exc)
                continue
            if bag.counts:
                bags.append({"url": bag.url, "counts": bag.counts})
            cleaned.append(
                {"url": record["url"], "lang": tag.code, "cleaned_text": clean_for_embedding(text)}
            )
        jsonl.write_records(stage.dir / "docs.jsonl", docs)
        jsonl.write_records(stage.dir / "bags.jsonl", bags)
        jsonl.write_records(stage.dir / "cleaned.jsonl", cleaned)
        if not bags:
            raise StageError("nlp produced no bags")

    run_stage(stage, force, work)


# --- topics ------------------------------------------------------------------

@main.command()
@_force_option
@pass_config
def topics(config: RunConfig, force: bool) -> None:
    """Train the topic model, assign topics, and extract keywords."""
    inputs = {"nlp/bags": config.run_dir / "nlp" / "bags.jsonl"}
    if config.plugin_exchange:
        inputs["plugin_exchange"] = config.resolve(config.plugin_exchange)
    stage = Stage(config, "topics", inputs)

    def work(stage: Stage) -> None:
        bags = []
        discarded = 0
        for record in jsonl.read_records(stage.input_path("nlp/bags")):
            result = stem_and_filter(EnglishBag(url=record["url"], counts=record["counts"]))
            if isinstance(result, DiscardedDoc):
                discarded += 1
                continue
            bags.append(result)
        if len(bags) < 2:
            raise StageError("not enough documents after stemming discards")
        k = max(2, min(config.topics.k, len(bags)))
        model = train_lda(
            bags,
            k=k,
            alpha=config.topics.alpha,
            beta=config.topics.beta,
            iters=config.topics.iters,
            seed=config.master_seed,
        )
        assignments = training_assignments(model)
        by_topic: dict[int, list[EnglishBag]] = {}
        for bag, assignment in zip(bags, assignments):
            by_topic.setdefault(assignment.topic_id, []).append(bag)
        keyword_sets = tfidf_keywords(by_topic, top_n=config.topics.keywords_per_topic)

        assignment_records = [
            {"url": a.url, "method": a.method, "topic_id": a.topic_id, "score": round(a.score, 9)}
            for a in assignments
        ]
        keyword_records = [
            {
                "method": kw.method,
                "topic_id": kw.topic_id,
                "keywords": [{"term": term, "score": round(score, 9)} for term, score in kw.keywords],
            }
            for kw in keyword_sets
        ]
        if "plugin_exchange" in stage.inputs:
            ingested = ingest_plugin_topics(stage.input_path("plugin_exchange"))
            assignment_records += [
                {"url": a.url, "method": a.method, "topic_id": a.topic_id, "score": a.score}
                for a in ingested.assignments
            ]
            keyword_records += [
                {
                    "method": kw.method,
                    "topic_id": kw.topic_id,
                    "keywords": [{"term": t, "score": s} for t, s in kw.keywords],
                }
                for kw in ingested.keywords
            ]
            click.echo(
                f"topics: merged plugin exchange ({ingested.outliers_dropped} outlier rows dropped)"
            )
        jsonl.write_records(stage.dir / "assignments.jsonl", assignment_records)
        jsonl.write_records(stage.dir / "keywords.jsonl", keyword_records)
        stage_stats = {"documents": len(bags), "discarded": discarded, "k": k}
        (stage.dir / "stats.json").write_text(json.dumps(stage_stats, sort_keys=True) + "\n")

    run_stage(stage, force, work)


# --- expand ------------------------------------------------------------------

def _llm_client(config: RunConfig):
    cfg = config.clients.get("llm")
    if cfg is None or cfg.mode == "synthetic":
        return SyntheticLlmClient()
    if cfg.mode == "fixture":
        return FixtureLlmClient.from_file(config.resolve(cfg.fixture))
    raise ConfigError("real llm mode has no bundled adapter; use fixture or synthetic")


def _trends_client(config: RunConfig):
    cfg = config.clients.get("trends")
    if cfg is None or cfg.mode == "synthetic":
        return SyntheticTrendsClient()
    if cfg.mode == "fixture":
        return FixtureTrendsClient.from_file(config.resolve(cfg.fixture))
    raise ConfigError("real trends mode has no bundled adapter; use fixture or synthetic")


@main.command()
@_force_option
@pass_config
def expand(config: RunConfig, force: bool) -> None:
    """Grow topic keyword sets with the language-model and trends clients."""
    stage = Stage(config, "expand", {"topics/keywords": config.run_dir / "topics" / "keywords.jsonl"})

    def work(stage: Stage) -> None:
        llm = _llm_client(config)
        trends = _trends_client(config)
        expanded = []
        for record in jsonl.read_records(stage.input_path("topics/keywords")):
            terms = [entry["term"] for entry in record["keywords"]]
            if not terms:
                continue
            if record["method"] == "lda":
                result = llm_expand(record["topic_id"], terms, llm)
            elif record["method"] == "top2vec":
                if len(terms) < 2:
                    continue
                result = trends_expand(record["topic_id"], terms[0], terms[1], trends)
            else:
                continue  # bertopic keywords feed queries directly
            expanded.append(
                {
                    "topic_id": result.topic_id,
                    "method": result.method,
                    "keywords": list(result.keywords),
                    "provenance": list(result.provenance),
                }
            )
        jsonl.write_records(stage.dir / "expanded.jsonl", expanded)

    run_stage(stage, force, work)


# --- gen-queries -------------------------------------------------------------

def _ranked_with_expansions(
    base: list[dict], expansions: list[str]
) -> list[tuple[str, float]]:
    """Seed keywords keep their scores; expansions rank below them in their
    returned order, with synthetic descending scores."""
    ranked = [(entry["term"], float(entry["score"])) for entry in base]
    floor = ranked[-1][1] if ranked else 1.0
    seen = {term for term, _ in ranked}
    step = abs(floor) * 0.01 + 1e-9
    for i, term in enumerate(expansions):
        if term in seen:
            continue
        seen.add(term)
        ranked.append((term, floor - (i + 1) * step))
    return ranked


@main.command("gen-queries")
@_force_option
@pass_config
def gen_queries(config: RunConfig, force: bool) -> None:
    """Tier keywords and sample search-query combinations."""
    stage = Stage(
        config,
        "gen-queries",
        {
            "topics/keywords": config.run_dir / "topics" / "keywords.jsonl",
            "expand/expanded": config.run_dir / "expand" / "expanded.jsonl",
        },
    )

    def work(stage: Stage) -> None:
        expansions: dict[tuple[str, int], list[str]] = {}
        for record in jsonl.read_records(stage.input_path("expand/expanded")):
            base_method = "lda" if record["method"] == "lda_gpt" else "top2vec"
            expansions[(base_method, record["topic_id"])] = record["keywords"]

        tiered = []
        for record in jsonl.read_records(stage.input_path("topics/keywords")):
            key = (record["method"], record["topic_id"])
            ranked = _ranked_with_expansions(record["keywords"], expansions.get(key, []))
            if len(ranked) < 4:
                logger.warning("topic %s/%d has under 4 keywords; skipped", *key)
                continue
            tiered.append(tier_keywords(record["topic_id"], record["method"], ranked))

        rng = np.random.default_rng(config.master_seed)
        queries = generate_queries(tiered, config.per_topic_budget, rng)
        records = [
            {
                "query_id": i,
                "topic_id": q.topic_id,
                "method": q.method,
                "keywords": list(q.keywords),
                "keyword_tiers": list(q.keyword_tiers),
                "tier_histogram": list(q.tier_histogram),
                "seed_trace": list(q.seed_trace),
            }
            for i, q in enumerate(queries)
        ]
        jsonl.write_records(stage.dir / "queries.jsonl", records)
        if not records:
            raise StageError("no queries generated")

    run_stage(stage, force, work)


# --- crawl -------------------------------------------------------------------

def _search_client(config: RunConfig):
    cfg = config.clients.get("search")
    if cfg is None:
        raise ConfigError("no search client configured")
    if cfg.mode == "fixture":
        return FixtureSearchClient.from_file(config.resolve(cfg.fixture))
    if cfg.mode == "synthetic":
        return SyntheticSearchClient(domains=cfg.domains)
    raise ConfigError("real search mode has no bundled adapter; use fixture or synthetic")


@main.command()
@_force_option
@pass_config
def crawl(config: RunConfig, force: bool) -> None:
    """Run queries through the search client and build the probe list."""
    stage = Stage(config, "crawl", {"gen-queries/queries": config.run_dir / "gen-queries" / "queries.jsonl"})

    def work(stage: Stage) -> None:
        client = _search_client(config)
        queries: dict[int, SearchQuery] = {}
        for record in jsonl.read_records(stage.input_path("gen-queries/queries")):
            queries[record["query_id"]] = SearchQuery(
                topic_id=record["topic_id"],
                method=record["method"],
                keywords=tuple(record["keywords"]),
                keyword_tiers=tuple(record["keyword_tiers"]),
                tier_histogram=tuple(record["tier_histogram"]),
                seed_trace=tuple(record["seed_trace"]),
            )
        results = []
        result_records = []
        barren = 0
        for query_id in sorted(queries):
            outcome = search(queries[query_id], client, query_id)
            if outcome.barren:
                barren += 1
            for r in outcome.results:
                results.append(r)
                result_records.append(
                    {
                        "query_id": r.query_id,
                        "rank": r.rank,
                        "url": r.url,
                        "spell_corrected": r.spell_corrected,
                    }
                )
        candidates = build_probe_list(results, queries)
        jsonl.write_records(stage.dir / "results.jsonl", result_records)
        jsonl.write_records(
            stage.dir / "probe_list.jsonl",
            (
                {"url": c.url, "origin_method": c.origin_method, "origin_topic": c.origin_topic}
                for c in candidates
            ),
        )
        if barren:
            click.echo(f"crawl: {barren} barren queries")
        if not candidates:
            raise StageError("crawl produced an empty probe list")

    run_stage(stage, force, work)


# --- probe / simulate --------------------------------------------------------

def _probe_stage(config: RunConfig, force: bool, with_ooni: bool) -> None:
    inputs = {"crawl/probe_list": config.run_dir / "crawl" / "probe_list.jsonl"}
    sim_vantages = [v for v in config.vantages if v.transport == "sim"]
    if sim_vantages:
        if not config.scenario:
            raise ConfigError("sim vantages configured but no scenario file given")
        inputs["scenario"] = config.resolve(config.scenario)
    stage = Stage(config, "probe", inputs)

    def work(stage: Stage) -> None:
        scenario = None
        if sim_vantages:
            scenario = Scenario.from_file(stage.input_path("scenario"))
        urls = [record["url"] for record in jsonl.read_records(stage.input_path("crawl/probe_list"))]
        log_path = stage.dir / "outcomes.jsonl"
        if log_path.exists() and not stage.resumable:
            log_path.unlink()  # inputs changed; a stale log must not be resumed
        for vantage in config.vantages:
            if vantage.transport == "sim":
                transport = SimTransport(scenario, vantage.id)
            else:
                proxies = {"http": vantage.proxy, "https": vantage.proxy} if vantage.proxy else None
                transport = RealTransport(vantage.id, proxies=proxies)
            run_campaign(
                urls,
                transport,
                vantage.id,
                n_runs=config.n_runs,
                log_path=log_path,
                timeout_s=config.thresholds.timeout_s,
                shuffle_seed=config.master_seed,
                pace_s=config.pace_s,
            )
        if with_ooni:
            if scenario is None:
                raise ConfigError("simulate needs sim vantages; use probe for real campaigns")
            records = []
            for vantage in sim_vantages:
                sim_vantage = scenario.vantages[vantage.id]
                for url in urls:
                    records.append(
                        simulate_ooni(url, sim_vantage, scenario, timeout_s=config.thresholds.timeout_s)
                    )
            dump_records(stage.dir / "ooni.jsonl", records)

    run_stage(stage, force, work)


@main.command()
@_force_option
@pass_config
def probe(config: RunConfig, force: bool) -> None:
    """Fetch every probe URL repeatedly from each vantage point."""
    _probe_stage(config, force, with_ooni=False)


@main.command()
@_force_option
@pass_config
def simulate(config: RunConfig, force: bool) -> None:
    """Probe under the simulation scenario and emit anomaly-probe records."""
    _probe_stage(config, force, with_ooni=True)


# --- aggregate ---------------------------------------------------------------

def _summary_to_record(summary) -> dict:
    return {
        "url": summary.url,
        "vantage": summary.vantage_id,
        "counts": {cls.value: count for cls, count in summary.counts.items()},
        "n_runs": summary.n_runs,
        "consistent": summary.consistent.value if summary.consistent else None,
        "first_ts": summary.first_ts,
        "last_ts": summary.last_ts,
        "code_counts": sorted(
            [kind, code, count] for (kind, code), count in (summary.code_counts or {}).items()
        ),
    }


@main.command()
@_force_option
@pass_config
def aggregate(config: RunConfig, force: bool) -> None:
    """Collapse runs into consistent results, the baseline, and diffs."""
    stage = Stage(config, "aggregate", {"probe/outcomes": config.run_dir / "probe" / "outcomes.jsonl"})

    def work(stage: Stage) -> None:
        outcomes = (record_to_outcome(r) for r in jsonl.read_records(stage.input_path("probe/outcomes")))
        summaries = summarize_log(outcomes, threshold=config.thresholds.consistency)
        baseline = build_baseline(summaries, config.baseline_vantages)
        diffs = diff_all(summaries, baseline, skip_vantages=config.baseline_vantages)
        jsonl.write_records(
            stage.dir / "summaries.jsonl",
            (_summary_to_record(s) for _, s in sorted(summaries.items())),
        )
        jsonl.write_records(
            stage.dir / "baseline.jsonl",
            ({"url": url, "class": cls.value} for url, cls in sorted(baseline.entries.items())),
        )
        jsonl.write_records(
            stage.dir / "diffs.jsonl",
            (
                {
                    "url": d.url,
                    "vantage": d.vantage_id,
                    "class": d.response_class.value,
                    "baseline_class": d.baseline_class.value if d.baseline_class else None,
                }
                for d in diffs
            ),
        )

    run_stage(stage, force, work)


def _load_aggregates(config: RunConfig, stage: Stage):
    summaries = {}
    for record in jsonl.read_records(stage.input_path("aggregate/summaries")):
        summary = UrlRunSummary(
            url=record["url"],
            vantage_id=record["vantage"],
            counts={ResponseClass(k): v for k, v in record["counts"].items()},
            n_runs=record["n_runs"],
            consistent=ResponseClass(record["consistent"]) if record["consistent"] else None,
            first_ts=record["first_ts"],
            last_ts=record["last_ts"],
            code_counts={(kind, code): count for kind, code, count in record["code_counts"]},
        )
        summaries[(summary.url, summary.vantage_id)] = summary
    baseline_entries = {
        record["url"]: ResponseClass(record["class"])
        for record in jsonl.read_records(stage.input_path("aggregate/baseline"))
    }
    baseline = BaselineSet(entries=baseline_entries, vantage_ids=tuple(config.baseline_vantages))
    diffs = [
        DiffRecord(
            url=record["url"],
            vantage_id=record["vantage"],
            response_class=ResponseClass(record["class"]),
            baseline_class=ResponseClass(record["baseline_class"]) if record["baseline_class"] else None,
        )
        for record in jsonl.read_records(stage.input_path("aggregate/diffs"))
    ]
    return summaries, baseline, diffs


@main.command()
@_force_option
@click.option("--ooni", "ooni_path", type=click.Path(exists=True, dir_okay=False), default=None,
              help="Anomaly-probe records to use instead of the probe stage output.")
@pass_config
def analyze(config: RunConfig, force: bool, ooni_path: str | None) -> None:
    """Domain partition, suspected-blocked verdicts, and similarity matrices."""
    inputs = {
        "aggregate/summaries": config.run_dir / "aggregate" / "summaries.jsonl",
        "aggregate/baseline": config.run_dir / "aggregate" / "baseline.jsonl",
        "aggregate/diffs": config.run_dir / "aggregate" / "diffs.jsonl",
        "crawl/probe_list": config.run_dir / "crawl" / "probe_list.jsonl",
    }
    if ooni_path:
        inputs["ooni"] = Path(ooni_path)
    else:
        inputs["ooni"] = config.run_dir / "probe" / "ooni.jsonl"
    stage = Stage(config, "analyze", inputs)

    def work(stage: Stage) -> None:
        rules = default_list()
        summaries, baseline, diffs = _load_aggregates(config, stage)
        ooni_records = load_records(stage.input_path("ooni"))

        source_domains = set()
        for source_file in config.source_files:
            for entry in load_source_lists([config.resolve(source_file)], config.source_groups):
                try:
                    source_domains.add(pld_of_url(entry.url, rules))
                except ProbekitError:
                    continue
        probe_domains = set()
        url_domains = []
        for record in jsonl.read_records(stage.input_path("crawl/probe_list")):
            try:
                domain = pld_of_url(record["url"], rules)
            except ProbekitError:
                continue
            probe_domains.add(domain)
            url_domains.append((record["url"], domain))
        partition = partition_new(probe_domains, source_domains)
        jsonl.write_records(
            stage.dir / "domains.jsonl",
            (
                {"url": url, "domain": domain.pld, "status": partition[domain]}
                for url, domain in url_domains
            ),
        )

        blocked = suspected_blocked(
            diffs, summaries, ooni_records,
            min_span_days=config.thresholds.min_span_days, rules=rules,
        )
        jsonl.write_records(
            stage.dir / "suspected.jsonl",
            (
                {
                    "domain": b.domain.pld,
                    "vantages": sorted(b.vantages),
                    "evidence": [
                        {
                            "vantage": e.vantage_id,
                            "url": e.url,
                            "curl_class": e.curl_class.value,
                            "ooni_kind": e.ooni_kind,
                            "span_days": e.span_days,
                            "months_consistent": e.months_consistent,
                        }
                        for e in b.evidence
                    ],
                }
                for b in blocked
            ),
        )
        disagreements = curl_ooni_disagreements(summaries, ooni_records, rules)
        jsonl.write_records(
            stage.dir / "disagreements.jsonl",
            (
                {
                    "url": d.url,
                    "vantage": d.vantage_id,
                    "curl_class": d.curl_class.value,
                    "domain": d.domain.pld,
                }
                for d in disagreements
            ),
        )
        click.echo(f"analyze: {len(blocked)} suspected-blocked domains")

    run_stage(stage, force, work)


@main.command()
@_force_option
@pass_config
def report(config: RunConfig, force: bool) -> None:
    """Render report tables and the machine-readable summary."""
    inputs = {
        "aggregate/summaries": config.run_dir / "aggregate" / "summaries.jsonl",
        "aggregate/baseline": config.run_dir / "aggregate" / "baseline.jsonl",
        "aggregate/diffs": config.run_dir / "aggregate" / "diffs.jsonl",
        "probe/ooni": config.run_dir / "probe" / "ooni.jsonl",
    }
    stage = Stage(config, "report", inputs)

    def work(stage: Stage) -> None:
        summaries, baseline, diffs = _load_aggregates(config, stage)
        ooni_records = load_records(stage.input_path("probe/ooni"))
        bundle = tabulate(summaries, baseline, diffs, ooni_records)
        for name, table in bundle.tables.items():
            (stage.dir / f"{name}.tsv").write_text(table, encoding="utf-8")
        (stage.dir / "summary.json").write_text(
            json.dumps(bundle.summary, indent=2, sort_keys=True) + "\n", encoding="utf-8"
        )

    run_stage(stage, force, work)


def entrypoint() -> None:
    try:
        main(standalone_mode=False)
    except ConfigError as exc:
        click.echo(f"config error: {exc}", err=True)
        sys.exit(EXIT_CONFIG_ERROR)
    except (ProbekitError, click.ClickException) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_STAGE_ERROR)
    except click.exceptions.Abort:
        sys.exit(EXIT_STAGE_ERROR)


if __name__ == "__main__":
    entrypoint()
