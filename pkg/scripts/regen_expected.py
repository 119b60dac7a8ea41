#!/usr/bin/env python3
"""Regenerate the golden expected.json from the naive oracle implementations.

The candidate strings and exact flags in the output are the frozen golden
expectations; every score and every metric count is recomputed here with the
reference implementations in medwer._oracles, never with the production
matcher, so a regression in the fast paths cannot silently rewrite its own
expectations. Tags: "golden" = fixed by the curated sentences, "oracle" =
reproduced by this script and at self-check time, "trivial" = definitional.
"""

import json
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from medwer._oracles import naive_similarity
from medwer.corpus import load_annotations, load_manifest
from medwer.fixtures import fixture_path
from medwer.textnorm import _normalize_chunk, normalize


def oracle_candidates(hypothesis: str, max_n: int = 3):
    tokens = [t for t in (_normalize_chunk(c) for c in hypothesis.split()) if t]
    for n in range(1, max_n + 1):
        for start in range(len(tokens) - n + 1):
            yield start, n, " ".join(tokens[start:start + n])


def oracle_align(entity_text: str, hypothesis: str, threshold: float = 0.5, max_n: int = 3):
    """Best candidate by (score desc, fewer tokens, earliest), oracle-scored."""
    target = normalize(entity_text)
    best = None
    for start, n, cand in oracle_candidates(hypothesis, max_n):
        score = naive_similarity(target, cand)
        if score < threshold:
            continue
        key = (-score, n, start)
        if best is None or key < best[0]:
            best = (key, cand, score)
    if best is None:
        return None, 0.0
    return best[1], best[2]


def oracle_distance(ref, hyp):
    prev = list(range(len(hyp) + 1))
    for i in range(1, len(ref) + 1):
        cur = [i] + [0] * len(hyp)
        for j in range(1, len(hyp) + 1):
            cur[j] = min(prev[j - 1] + (ref[i - 1] != hyp[j - 1]), prev[j] + 1, cur[j - 1] + 1)
        prev = cur
    return prev[-1]


def main() -> int:
    pairs = load_manifest(fixture_path("manifest.jsonl"))
    annotations = load_annotations(fixture_path("annotations.jsonl"), pairs)

    samples = {}
    for pair in pairs:
        entities = annotations[pair.id].entities
        alignment = []
        recovered_parts = []
        for entity in entities:
            cand, score = oracle_align(entity.text, pair.hypothesis)
            exact = cand is not None and cand == normalize(entity.text)
            if cand is not None:
                recovered_parts.append(cand)
            alignment.append({
                "entity": entity.text,
                "category": entity.category.value,
                "candidate": cand,
                "score": score,
                "exact": exact,
                "check": "trivial" if cand is None else ("golden" if exact else "oracle"),
            })
        gt = " ".join(normalize(e.text) for e in entities)
        rec = " ".join(recovered_parts)
        ref_words = normalize(pair.reference).split()
        hyp_words = normalize(pair.hypothesis).split()
        samples[pair.id] = {
            "alignment": alignment,
            "wer": {"errors": oracle_distance(ref_words, hyp_words),
                    "ref_len": len(ref_words), "check": "oracle"},
            "mwer": {"errors": oracle_distance(gt.split(), rec.split()),
                     "ref_len": len(gt.split()), "check": "oracle"},
            "mcer": {"errors": oracle_distance(gt, rec),
                     "ref_len": len(gt), "check": "oracle"},
            "recall": {cat.value: {
                "recalled": sum(1 for a, e in zip(alignment, entities)
                                if e.category == cat and a["exact"]),
                "total": sum(1 for e in entities if e.category == cat),
                "check": "trivial",
            } for cat in sorted({e.category for e in entities}, key=lambda c: c.value)},
        }

    doc = {"version": "v1", "threshold": 0.5, "max_ngram": 3, "samples": samples}
    out = fixture_path("expected.json")
    out.write_text(json.dumps(doc, indent=2) + "\n", encoding="utf-8")
    print(f"wrote {out}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
