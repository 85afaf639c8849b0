import json
from pathlib import Path

import pytest

# Word pools with disjoint vocabulary per theme, so hash embeddings of docs
# from the same pool sit close together and pools stay far apart.
POOLS = {
    "rivers": """river delta flood basin levee estuary current sediment bank
        tributary watershed dam reservoir rapids confluence gauge discharge
        meander floodplain silt erosion channel irrigation barrage spillway""",
    "chess": """chess opening gambit endgame knight bishop rook queen pawn
        castle checkmate tempo zugzwang blunder sacrifice grandmaster rating
        tournament clock notation variation defense attack pin fork skewer""",
    "baking": """flour yeast dough oven proof crust crumb sourdough starter
        knead gluten bake loaf pastry butter sugar icing sponge batter whisk
        ferment rise score steam hydration lamination ganache tart glaze""",
}


def pool_doc(pool_words, index, repeat=3):
    words = pool_words[index % len(pool_words):] + pool_words[: index % len(pool_words)]
    chosen = words[: 12 + (index % 5)]
    return " ".join(chosen * repeat)


def build_docs(counts=(40, 35, 25), singles=0, unsupported=0):
    """Generate doc records: len(counts) clusters plus mutually alien docs."""
    docs = []
    for pool_ix, (name, words) in enumerate(POOLS.items()):
        if pool_ix >= len(counts):
            break
        pool_words = words.split()
        for i in range(counts[pool_ix]):
            docs.append({
                "url": f"https://{name}-{i}.example/page",
                "lang": "en",
                "cleaned_text": pool_doc(pool_words, i),
            })
    for i in range(singles):
        docs.append({
            "url": f"https://lone-{i}.example/",
            "lang": "en",
            "cleaned_text": " ".join(f"xq{i}w{j}" for j in range(15)),
        })
    for i in range(unsupported):
        docs.append({
            "url": f"https://alien-{i}.example/",
            "lang": "zz",
            "cleaned_text": "some text in an uncovered language",
        })
    return docs


@pytest.fixture
def docs_file(tmp_path):
    def write(docs, name="docs.jsonl"):
        path = tmp_path / name
        with open(path, "w", encoding="utf-8") as fh:
            for doc in docs:
                fh.write(json.dumps(doc, ensure_ascii=False) + "\n")
        return path

    return write
