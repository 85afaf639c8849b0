"""embedtopics: cluster documents over sentence embeddings and emit topic
assignments plus per-topic keyword lists in the topic-exchange format.

The package is a standalone sidecar: it talks to the main pipeline only
through files (cleaned-docs in, topic-exchange out).
"""

__version__ = "0.1.0"
