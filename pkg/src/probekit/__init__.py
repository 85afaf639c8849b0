"""probekit: probe-list generation and accessibility measurement toolkit.

The pipeline runs in stages: sanitize a seed URL corpus, extract topics and
keywords from the surviving pages, expand those keywords, turn them into
search queries, crawl the results into a probe list, then repeatedly fetch
every probe URL from multiple vantage points and flag domains whose
accessibility consistently deviates from a free-network baseline.
"""

__version__ = "0.1.0"
