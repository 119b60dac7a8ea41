"""End-to-end evaluation: alignment and metrics per sample, then aggregation.

Per-sample work is pure, so samples can be scored by a worker pool; results
are reduced in manifest order and every count is an integer sum, which makes
the report independent of the worker count.
"""

import logging
import multiprocessing
from dataclasses import dataclass, field
from pathlib import Path

from .align import DEFAULT_THRESHOLD, EntityAnnotation, med_text_align, shared_span_count
from .corpus import REPORT_FORMATS, AnnotationSet, TranscriptPair
from .metrics import (CorpusMetrics, SampleMetrics, aggregate, entity_recall,
                      medical_cer, medical_wer, wer)
from .textnorm import DEFAULT_MAX_NGRAM, NORMALIZATION_MODES

log = logging.getLogger(__name__)

GROUP_KEYS = ("model", "accent", "domain")


@dataclass
class RunConfig:
    """Knobs for one evaluation run; defaults follow the standard recipe
    (cutoff 0.5, trigram candidates, standard normalization)."""

    manifest: Path | str | None = None
    annotations: Path | str | None = None
    threshold: float = DEFAULT_THRESHOLD
    max_ngram: int = DEFAULT_MAX_NGRAM
    normalization: str = "standard"
    out: Path | str | None = None
    fmt: str = "json"
    per_sample: bool = False
    group_by: tuple[str, ...] = ()
    strict: bool = False
    workers: int = 1

    def __post_init__(self):
        if not 0 < self.threshold <= 1:
            raise ValueError(f"threshold must be in (0, 1], got {self.threshold}")
        if self.max_ngram < 1:
            raise ValueError(f"max-ngram must be >= 1, got {self.max_ngram}")
        if self.normalization not in NORMALIZATION_MODES:
            raise ValueError(f"normalization must be one of {NORMALIZATION_MODES}, got {self.normalization!r}")
        if self.fmt not in REPORT_FORMATS:
            raise ValueError(f"format must be one of {REPORT_FORMATS}, got {self.fmt!r}")
        if self.workers < 1:
            raise ValueError(f"workers must be >= 1, got {self.workers}")
        unknown = set(self.group_by) - set(GROUP_KEYS)
        if unknown:
            raise ValueError(f"unknown group-by key(s) {sorted(unknown)}; expected a subset of {GROUP_KEYS}")

    def config_dict(self) -> dict:
        return {"threshold": self.threshold, "max_ngram": self.max_ngram,
                "normalization": self.normalization}


def evaluate_sample(pair: TranscriptPair, entities: tuple[EntityAnnotation, ...],
                    threshold: float = DEFAULT_THRESHOLD, max_n: int = DEFAULT_MAX_NGRAM,
                    mode: str = "standard") -> SampleMetrics:
    aligned = med_text_align(list(entities), pair.hypothesis, threshold, max_n, mode)
    return SampleMetrics(
        sample_id=pair.id,
        wer=wer(pair.reference, pair.hypothesis, mode),
        mwer=medical_wer(aligned, mode),
        mcer=medical_cer(aligned, mode),
        recall=entity_recall(aligned),
    )


def _eval_task(task) -> tuple[SampleMetrics, int]:
    pair, entities, threshold, max_n, mode = task
    aligned = med_text_align(list(entities), pair.hypothesis, threshold, max_n, mode)
    sample = SampleMetrics(
        sample_id=pair.id,
        wer=wer(pair.reference, pair.hypothesis, mode),
        mwer=medical_wer(aligned, mode),
        mcer=medical_cer(aligned, mode),
        recall=entity_recall(aligned),
    )
    return sample, shared_span_count(aligned)


def _run_tasks(tasks: list, workers: int) -> list:
    if workers > 1 and len(tasks) > 1:
        chunksize = max(1, len(tasks) // (workers * 4))
        with multiprocessing.Pool(workers) as pool:
            return pool.map(_eval_task, tasks, chunksize=chunksize)
    return [_eval_task(task) for task in tasks]


def evaluate_corpus(pairs: list[TranscriptPair], annotations: dict[str, AnnotationSet],
                    cfg: RunConfig) -> tuple[CorpusMetrics, list[SampleMetrics], dict[str, CorpusMetrics]]:
    """Score every sample and aggregate; returns (corpus, per-sample, groups).

    Samples without an annotation record are scored with zero entities and
    show up in the skipped_zero_entity count.
    """
    tasks = [(pair, annotations[pair.id].entities if pair.id in annotations else (),
              cfg.threshold, cfg.max_ngram, cfg.normalization) for pair in pairs]
    results = _run_tasks(tasks, cfg.workers)
    samples = [sample for sample, _ in results]
    reused = sum(count for _, count in results)
    if reused:
        log.info("%d entities aligned to a hypothesis span shared with another entity", reused)

    groups: dict[str, CorpusMetrics] = {}
    if cfg.group_by:
        buckets: dict[str, list[SampleMetrics]] = {}
        for pair, sample in zip(pairs, samples):
            key = ",".join(f"{k}={getattr(pair, k) or ''}" for k in cfg.group_by)
            buckets.setdefault(key, []).append(sample)
        groups = {key: aggregate(buckets[key]) for key in sorted(buckets)}
    return aggregate(samples), samples, groups


def _align_task(task) -> list[dict]:
    pair, entities, threshold, max_n, mode = task
    aligned = med_text_align(list(entities), pair.hypothesis, threshold, max_n, mode)
    records = []
    for ae in aligned:
        candidate = None
        if ae.candidate is not None:
            candidate = {
                "surface": ae.candidate.surface,
                "normalized": ae.candidate.normalized,
                "start_token": ae.candidate.start_token,
                "length_tokens": ae.candidate.length_tokens,
            }
        records.append({
            "id": pair.id,
            "entity": {
                "text": ae.entity.text,
                "category": ae.entity.category.value,
                "begin": ae.entity.begin,
                "end": ae.entity.end,
            },
            "candidate": candidate,
            "score": ae.score,
            "exact": ae.exact,
        })
    return records


def align_corpus(pairs: list[TranscriptPair], annotations: dict[str, AnnotationSet],
                 cfg: RunConfig) -> list[dict]:
    """Per-entity alignment records, ordered by (sample id, entity begin)."""
    ordered = sorted(pairs, key=lambda p: p.id)
    tasks = [(pair, annotations[pair.id].entities if pair.id in annotations else (),
              cfg.threshold, cfg.max_ngram, cfg.normalization) for pair in ordered]
    if cfg.workers > 1 and len(tasks) > 1:
        with multiprocessing.Pool(cfg.workers) as pool:
            nested = pool.map(_align_task, tasks, chunksize=max(1, len(tasks) // (cfg.workers * 4)))
    else:
        nested = [_align_task(task) for task in tasks]
    return [record for records in nested for record in records]
