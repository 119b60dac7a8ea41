"""Shared helpers for the test suite: corpus serialization and strategies."""

import json

from hypothesis import strategies as st

from medwer.align import EntityAnnotation, EntityCategory


def write_jsonl(path, records):
    path.write_text("".join(json.dumps(r) + "\n" for r in records), encoding="utf-8")
    return path


def pair_record(pair):
    record = {"id": pair.id, "reference": pair.reference, "hypothesis": pair.hypothesis}
    for key in ("accent", "domain", "model"):
        value = getattr(pair, key)
        if value is not None:
            record[key] = value
    return record


def annotation_record(annotation_set):
    return {"id": annotation_set.id,
            "entities": [{"text": e.text, "category": e.category.value,
                          "begin": e.begin, "end": e.end} for e in annotation_set.entities]}


def dump_corpus(tmp_path, pairs, annotations, prefix="corpus"):
    """Write (pairs, annotations) out as manifest/annotations files."""
    manifest = write_jsonl(tmp_path / f"{prefix}_manifest.jsonl",
                           [pair_record(p) for p in pairs])
    annot = write_jsonl(tmp_path / f"{prefix}_annotations.jsonl",
                        [annotation_record(a) for a in annotations.values()])
    return manifest, annot


# words over a small alphabet; "z" is reserved as a never-matching character
word = st.text(alphabet="abcd", min_size=1, max_size=5)
short_string = st.text(alphabet="abcd", max_size=12)


@st.composite
def annotated_sample(draw, max_words=8, max_entities=3):
    """A reference built from words, entity spans with exact offsets, and a hypothesis."""
    words = draw(st.lists(word, min_size=1, max_size=max_words))
    reference = " ".join(words)
    n_entities = draw(st.integers(0, min(max_entities, len(words))))
    starts = sorted(draw(st.lists(st.integers(0, len(words) - 1),
                                  min_size=n_entities, max_size=n_entities, unique=True)))
    entities = []
    for start in starts:
        length = draw(st.integers(1, min(2, len(words) - start)))
        text = " ".join(words[start:start + length])
        begin = len(" ".join(words[:start])) + (1 if start else 0)
        entities.append(EntityAnnotation(text, EntityCategory.MED, begin, begin + len(text)))
    hypothesis = draw(st.text(alphabet="abcd ", max_size=40))
    return reference, entities, hypothesis
