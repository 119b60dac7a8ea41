"""Command-line front end: evaluate | align | selfcheck.

Exit codes: 0 success, 1 usage error, 2 ingestion or I/O error, 3 fixture or
self-check failure.
"""

import argparse
import json
import logging
import sys

from .corpus import IngestionError, load_annotations, load_manifest, write_report
from .fixtures import run_selfcheck
from .runner import GROUP_KEYS, RunConfig, align_corpus, evaluate_corpus
from .textnorm import NORMALIZATION_MODES

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_INGESTION = 2
EXIT_SELFCHECK = 3


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on usage errors by default; the exit-code contract
    # reserves 2 for ingestion problems.
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="medwer",
                     description="Entity-aware evaluation of ASR transcripts: "
                                 "WER, M-WER, M-CER, and per-category recall.")
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--manifest", required=True,
                        help="line-delimited JSON with id/reference/hypothesis records")
    common.add_argument("--annotations", required=True,
                        help="line-delimited JSON with per-id entity annotations")
    common.add_argument("--threshold", type=float, default=0.5,
                        help="fuzzy-match cutoff in (0, 1] (default 0.5)")
    common.add_argument("--max-ngram", type=int, default=3,
                        help="largest candidate n-gram (default 3)")
    common.add_argument("--normalization", choices=NORMALIZATION_MODES, default="standard",
                        help="text normalization policy (default standard)")
    common.add_argument("--strict", action="store_true",
                        help="escalate skippable annotation problems to errors")
    common.add_argument("--workers", type=int, default=1,
                        help="worker processes for per-sample scoring (default 1)")
    common.add_argument("--out", default=None, help="output path (default stdout)")

    evaluate = sub.add_parser("evaluate", parents=[common],
                              help="run alignment and all metrics, write a report")
    evaluate.add_argument("--format", choices=("json", "csv", "table"), default="json",
                          dest="fmt", help="report format (default json)")
    evaluate.add_argument("--per-sample", action="store_true",
                          help="include per-sample rows in the report")
    evaluate.add_argument("--group-by", default=None,
                          help=f"comma-separated subset of {{{','.join(GROUP_KEYS)}}} "
                               "for grouped corpus rows")

    sub.add_parser("align", parents=[common],
                   help="emit per-entity alignment records as line-delimited JSON")

    sub.add_parser("selfcheck", help="run the embedded golden fixtures and oracle spot-checks")
    return parser


def _run_config(args: argparse.Namespace) -> RunConfig:
    group_by: tuple[str, ...] = ()
    raw = getattr(args, "group_by", None)
    if raw:
        group_by = tuple(key.strip() for key in raw.split(",") if key.strip())
    return RunConfig(
        manifest=args.manifest,
        annotations=args.annotations,
        threshold=args.threshold,
        max_ngram=args.max_ngram,
        normalization=args.normalization,
        out=args.out,
        fmt=getattr(args, "fmt", "json"),
        per_sample=getattr(args, "per_sample", False),
        group_by=group_by,
        strict=args.strict,
        workers=args.workers,
    )


def _load_corpus(cfg: RunConfig):
    pairs = load_manifest(cfg.manifest)
    annotations = load_annotations(cfg.annotations, pairs, strict=cfg.strict)
    if cfg.strict:
        missing = [p.id for p in pairs if p.id not in annotations]
        if missing:
            raise IngestionError(f"missing annotations for id(s): {', '.join(repr(m) for m in missing)}")
    return pairs, annotations


def cmd_evaluate(cfg: RunConfig) -> int:
    pairs, annotations = _load_corpus(cfg)
    corpus, samples, groups = evaluate_corpus(pairs, annotations, cfg)
    per_sample = samples if cfg.per_sample else None
    if cfg.out is None:
        write_report(corpus, per_sample, cfg.fmt, sys.stdout,
                     config=cfg.config_dict(), groups=groups or None)
    else:
        write_report(corpus, per_sample, cfg.fmt, cfg.out,
                     config=cfg.config_dict(), groups=groups or None)
    return EXIT_OK


def cmd_align(cfg: RunConfig) -> int:
    pairs, annotations = _load_corpus(cfg)
    records = align_corpus(pairs, annotations, cfg)
    lines = "".join(json.dumps(record) + "\n" for record in records)
    if cfg.out is None:
        sys.stdout.write(lines)
    else:
        with open(cfg.out, "w", encoding="utf-8") as handle:
            handle.write(lines)
    return EXIT_OK


def cmd_selfcheck() -> int:
    return EXIT_OK if run_selfcheck() else EXIT_SELFCHECK


def main(argv=None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(message)s",
                        stream=sys.stderr)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)

    if args.command == "selfcheck":
        return cmd_selfcheck()

    try:
        cfg = _run_config(args)
    except ValueError as e:
        print(f"medwer: error: {e}", file=sys.stderr)
        return EXIT_USAGE

    try:
        if args.command == "evaluate":
            return cmd_evaluate(cfg)
        return cmd_align(cfg)
    except IngestionError as e:
        print(f"medwer: error: {e}", file=sys.stderr)
        return EXIT_INGESTION
    except OSError as e:
        print(f"medwer: error: {e}", file=sys.stderr)
        return EXIT_INGESTION


if __name__ == "__main__":
    sys.exit(main())
