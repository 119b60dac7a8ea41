"""MedTextAlign: align ground-truth medical entities to hypothesis n-grams.

Every unigram, bigram, ... up to max_n-gram of the hypothesis is a candidate.
Each entity is scored against every candidate with the gestalt similarity
ratio and takes the best candidate at or above the cutoff threshold; ties go
to the higher score, then fewer tokens, then the earlier start. Candidates
may be reused across entities; no mutual-exclusion is enforced.
"""

from collections import Counter
from dataclasses import dataclass
from enum import Enum

from .fuzzy import similarity_ratio
from .textnorm import DEFAULT_MAX_NGRAM, CandidateSpan, ngrams, normalize, tokenize

DEFAULT_THRESHOLD = 0.5


class EntityCategory(str, Enum):
    """The five clinical entity categories."""

    MED = "MED"    # medication
    COND = "COND"  # medical condition
    ANA = "ANA"    # anatomy
    TTP = "TTP"    # test, treatment, procedure
    PHI = "PHI"    # protected health information

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class EntityAnnotation:
    """One ground-truth entity with [begin, end) offsets into the reference."""

    text: str
    category: EntityCategory
    begin: int
    end: int
    score: float | None = None


@dataclass(frozen=True)
class AlignedEntity:
    """Alignment result for one entity.

    candidate is None when nothing reached the threshold; then score is 0.
    exact means the normalized candidate equals the normalized entity text.
    """

    entity: EntityAnnotation
    candidate: CandidateSpan | None
    score: float
    exact: bool


def med_text_align(entities: list[EntityAnnotation], hypothesis: str,
                   threshold: float = DEFAULT_THRESHOLD,
                   max_n: int = DEFAULT_MAX_NGRAM,
                   mode: str = "standard") -> list[AlignedEntity]:
    """Align each entity to its closest hypothesis n-gram.

    entities must be sorted by begin offset; output order equals input order.
    Matching operates on normalized strings on both sides.
    """
    if not 0 < threshold <= 1:
        raise ValueError(f"threshold must be in (0, 1], got {threshold}")
    if max_n < 1:
        raise ValueError(f"max_n must be >= 1, got {max_n}")
    for prev, cur in zip(entities, entities[1:]):
        if cur.begin < prev.begin:
            raise ValueError("entities must be sorted by begin offset")

    candidates = ngrams(tokenize(hypothesis, mode), max_n)
    counters: list[Counter | None] = [None] * len(candidates)

    aligned = []
    for entity in entities:
        target = normalize(entity.text, mode)
        tlen = len(target)
        tcounter = Counter(target)
        best: CandidateSpan | None = None
        best_key: tuple | None = None
        best_score = 0.0
        for idx, cand in enumerate(candidates):
            clen = len(cand.normalized)
            total = tlen + clen
            # Upper bounds on the ratio let most candidates be rejected
            # without running the full block decomposition. Both bounds
            # share the ratio's denominator, so the comparisons are exact.
            bound = 2.0 * min(tlen, clen) / total
            if bound < threshold or bound < best_score:
                continue
            ccounter = counters[idx]
            if ccounter is None:
                ccounter = counters[idx] = Counter(cand.normalized)
            overlap = sum(min(n, ccounter[ch]) for ch, n in tcounter.items() if ch in ccounter)
            bound = 2.0 * overlap / total
            if bound < threshold or bound < best_score:
                continue
            score = similarity_ratio(target, cand.normalized)
            if score < threshold:
                continue
            key = (-score, cand.length_tokens, cand.start_token)
            if best_key is None or key < best_key:
                best, best_key, best_score = cand, key, score
        if best is None:
            aligned.append(AlignedEntity(entity, None, 0.0, False))
        else:
            aligned.append(AlignedEntity(entity, best, best_score, best.normalized == target))
    return aligned


def recovered_sequence(aligned: list[AlignedEntity]) -> str:
    """Normalized candidates joined by single spaces, in entity order.

    Unmatched entities contribute nothing, and never a doubled separator.
    """
    return " ".join(ae.candidate.normalized for ae in aligned
                    if ae.candidate is not None and ae.candidate.normalized)


def ground_truth_sequence(aligned: list[AlignedEntity], mode: str = "standard") -> str:
    """Normalized entity texts joined by single spaces, in entity order."""
    parts = (normalize(ae.entity.text, mode) for ae in aligned)
    return " ".join(p for p in parts if p)


def shared_span_count(aligned: list[AlignedEntity]) -> int:
    """How many entities landed on a hypothesis span also used by another.

    Candidate reuse is allowed by design; this makes its extent auditable.
    """
    spans = Counter((ae.candidate.start_token, ae.candidate.length_tokens)
                    for ae in aligned if ae.candidate is not None)
    return sum(n for n in spans.values() if n > 1)
