"""Command-line entry points for the plugin."""

from __future__ import annotations

import logging
import sys

import click

from .cluster import DEFAULT_THRESHOLD
from .pipeline import EmbeddingTopicConfig, run_embedding_topics, top2_keywords


@click.group()
@click.option("--verbose", is_flag=True, default=False)
def main(verbose: bool) -> None:
    """Embedding-based topic clustering over cleaned documents."""
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )


@main.command()
@click.option("--docs", "docs_file", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--out", "out_file", required=True, type=click.Path(dir_okay=False))
@click.option("--method", type=click.Choice(["bertopic", "top2vec"]), required=True)
@click.option("--min-cluster-size", default=20, show_default=True)
@click.option("--words-per-topic", default=30, show_default=True)
@click.option("--seed", default=0, show_default=True)
@click.option("--threshold", default=DEFAULT_THRESHOLD, show_default=True,
              help="Cosine similarity needed to join an existing cluster.")
def run(docs_file, out_file, method, min_cluster_size, words_per_topic, seed, threshold):
    """Cluster documents and write a topic-exchange file."""
    config = EmbeddingTopicConfig(
        method=method,
        min_cluster_size=min_cluster_size,
        words_per_topic=words_per_topic,
        seed=seed,
        threshold=threshold,
    )
    stats = run_embedding_topics(docs_file, out_file, config)
    click.echo(
        f"{stats.documents} documents, {stats.topics} topics, "
        f"{stats.outliers} outliers, {stats.skipped_language} skipped"
    )


@main.command()
@click.option("--exchange", "exchange_file", required=True,
              type=click.Path(exists=True, dir_okay=False))
def top2(exchange_file):
    """Print each topic's two strongest keywords as TSV."""
    for topic_id, first, second in top2_keywords(exchange_file):
        click.echo(f"{topic_id}\t{first}\t{second}")


def entrypoint() -> None:
    try:
        main(standalone_mode=False)
    except click.ClickException as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)
    except (ValueError, OSError) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)


if __name__ == "__main__":
    entrypoint()
