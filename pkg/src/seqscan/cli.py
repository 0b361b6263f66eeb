"""Command-line front end.

Exit codes: 0 = scanned (any verdict), 2 = scan failure, 3 = bad usage.
Subcommands mirror the scan/corpus/train/eval/monitor workflow; a JSON config
file (--config) supplies defaults for any flag, and --json switches report
output from a human summary to the raw JSON document.
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from datetime import datetime, timezone
from pathlib import Path

from . import pipeline
from .classifier import (
    BaselineModel,
    Label,
    evaluate,
    export_corpus,
    import_corpus,
    predict,
    train_baseline,
)
from .errors import NotFound, SeqscanError
from .model import Ecosystem, cleanup_package, load_package
from .registry import RateLimiter, RegistryConfig, fetch_archive, list_recent
from .tables import default_tables, load_tables

EXIT_OK = 0
EXIT_SCAN_FAILURE = 2
EXIT_BAD_USAGE = 3


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # argparse defaults to exit 2
        self.print_usage(sys.stderr)
        self.exit(EXIT_BAD_USAGE, f"{self.prog}: error: {message}\n")


def _ecosystem(value: str) -> Ecosystem:
    try:
        return Ecosystem(value.lower())
    except ValueError:
        raise argparse.ArgumentTypeError(f"unknown ecosystem {value!r}") from None


def _timestamp(value: str) -> datetime:
    stamp = datetime.fromisoformat(value.replace("Z", "+00:00"))
    return stamp if stamp.tzinfo else stamp.replace(tzinfo=timezone.utc)


def build_parser() -> _Parser:
    parser = _Parser(prog="seqscan",
                     description="Static behavior-sequence scanner for PyPI/NPM packages")
    parser.add_argument("--config", type=Path, help="JSON config file with flag defaults")
    sub = parser.add_subparsers(dest="command", required=True)
    parser.subcommand_parsers = []  # config defaults must reach every subparser
    _original_add_parser = sub.add_parser

    def add_parser(*args, **kwargs):
        child = _original_add_parser(*args, **kwargs)
        parser.subcommand_parsers.append(child)
        return child

    sub.add_parser = add_parser

    def add_scan_flags(p: argparse.ArgumentParser) -> None:
        p.add_argument("--ecosystem", type=_ecosystem, required=True)
        p.add_argument("--model", type=Path, default=None)
        p.add_argument("--mode", choices=("sequence", "unordered"), default="sequence")
        p.add_argument("--tables", type=Path, default=None)
        p.add_argument("--token-limit", type=int, default=pipeline.CLI_TOKEN_LIMIT)
        p.add_argument("--json", action="store_true")

    p_scan = sub.add_parser("scan", help="scan one archive")
    p_scan.add_argument("archive", type=Path)
    add_scan_flags(p_scan)
    p_scan.add_argument("--dump-graph", type=Path, default=None)
    p_scan.add_argument("--dump-sequence", type=Path, default=None)

    p_batch = sub.add_parser("batch", help="scan many archives, one report per line")
    p_batch.add_argument("archives", type=Path, nargs="+")
    add_scan_flags(p_batch)
    p_batch.add_argument("--parallel", type=int, default=1)

    p_export = sub.add_parser("export-corpus", help="scan archives into a JSONL corpus")
    p_export.add_argument("archives", type=Path, nargs="+")
    p_export.add_argument("--ecosystem", type=_ecosystem, required=True)
    p_export.add_argument("--out", type=Path, required=True)
    p_export.add_argument("--label", choices=("malicious", "benign"), default=None)
    p_export.add_argument("--mode", choices=("sequence", "unordered"), default="sequence")
    p_export.add_argument("--tables", type=Path, default=None)
    p_export.add_argument("--token-limit", type=int, default=pipeline.CLI_TOKEN_LIMIT)

    p_train = sub.add_parser("train-baseline", help="train the n-gram baseline")
    p_train.add_argument("--corpus", type=Path, required=True)
    p_train.add_argument("--out", type=Path, required=True)
    p_train.add_argument("--ngram", type=int, default=3)
    p_train.add_argument("--threshold", type=float, default=0.5)

    p_eval = sub.add_parser("eval", help="score predictions against a labeled corpus")
    p_eval.add_argument("--corpus", type=Path, required=True)
    p_eval.add_argument("--predictions", type=Path, default=None,
                        help="JSONL predictions (defaults to predicting with --model)")
    p_eval.add_argument("--model", type=Path, default=None)

    p_monitor = sub.add_parser("monitor", help="one monitoring cycle: list, fetch, scan")
    p_monitor.add_argument("--ecosystem", type=_ecosystem, required=True)
    p_monitor.add_argument("--since", type=_timestamp, default=None)
    p_monitor.add_argument("--cursor", type=Path, default=None,
                           help="file persisting the last seen timestamp")
    p_monitor.add_argument("--limit", type=int, default=20)
    p_monitor.add_argument("--endpoint", default=None,
                           help="feed URL override (fixture servers)")
    p_monitor.add_argument("--meta-endpoint", default=None,
                           help="metadata URL template override")
    p_monitor.add_argument("--dest", type=Path, required=True)
    p_monitor.add_argument("--model", type=Path, default=None)
    p_monitor.add_argument("--mode", choices=("sequence", "unordered"), default="sequence")
    p_monitor.add_argument("--tables", type=Path, default=None)
    p_monitor.add_argument("--token-limit", type=int, default=pipeline.CLI_TOKEN_LIMIT)
    p_monitor.add_argument("--min-interval", type=float, default=0.5)
    p_monitor.add_argument("--size-cap", type=int, default=None)

    sub.add_parser("dump-tables", help="print the active category tables")
    p_dg = sub.add_parser("dump-graph", help="print the call graph as TSV")
    p_dg.add_argument("archive", type=Path)
    p_dg.add_argument("--ecosystem", type=_ecosystem, required=True)

    return parser


def _apply_config(parser: _Parser, argv: list[str]) -> argparse.Namespace:
    """Config-file values become parser defaults; explicit flags still win."""
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config", type=Path)
    pre_args, _ = pre.parse_known_args(argv)
    if pre_args.config:
        try:
            defaults = json.loads(Path(pre_args.config).read_text(encoding="utf-8"))
        except (OSError, ValueError) as exc:
            parser.error(f"unreadable config file: {exc}")
        mapped = {k.replace("-", "_"): v for k, v in defaults.items()}
        parser.set_defaults(**mapped)
        for child in getattr(parser, "subcommand_parsers", []):
            child.set_defaults(**mapped)
    return parser.parse_args(argv)


def _load_tables(path: Path | None):
    return load_tables(path) if path else default_tables()


def _print_report(report: pipeline.ScanReport, as_json: bool) -> None:
    if as_json:
        print(json.dumps(report.to_json_dict(), ensure_ascii=False))
        return
    print(f"{report.package_name} {report.package_version} [{report.ecosystem}]")
    hits = {k: v for k, v in report.feature_counts.items() if v}
    print(f"  features: {hits if hits else 'none'}")
    print(f"  entries: {len(report.entries)}  tokens: {report.token_count}"
          f"{' (truncated)' if report.truncated else ''}")
    if report.prediction:
        print(f"  prediction: {report.prediction['label']}"
              f" (score {report.prediction['score']:.3f})")
    for warning in report.warnings:
        print(f"  warning: {warning}")


def _cmd_scan(args: argparse.Namespace) -> int:
    try:
        report = pipeline.scan_package(
            args.archive, args.ecosystem, model_path=args.model, mode=args.mode,
            tables=_load_tables(args.tables), token_limit=args.token_limit,
            dump_graph_path=args.dump_graph, dump_sequence_path=args.dump_sequence)
    except SeqscanError as exc:
        failure = {"schema_version": pipeline.REPORT_SCHEMA_VERSION,
                   "error": f"{type(exc).__name__}: {exc}",
                   "archive": str(args.archive)}
        print(json.dumps(failure))
        return EXIT_SCAN_FAILURE
    _print_report(report, args.json)
    return EXIT_OK


def _cmd_batch(args: argparse.Namespace) -> int:
    tables = _load_tables(args.tables)

    def scan_one(archive: Path) -> tuple[Path, pipeline.ScanReport | Exception]:
        try:
            return archive, pipeline.scan_package(
                archive, args.ecosystem, model_path=args.model, mode=args.mode,
                tables=tables, token_limit=args.token_limit)
        except SeqscanError as exc:
            return archive, exc

    status = EXIT_OK
    workers = max(1, args.parallel)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        results = list(pool.map(scan_one, args.archives))
    for archive, outcome in results:  # archive order, regardless of parallelism
        if isinstance(outcome, Exception):
            print(json.dumps({"archive": str(archive),
                              "error": f"{type(outcome).__name__}: {outcome}"}))
            status = EXIT_SCAN_FAILURE
        else:
            print(json.dumps(outcome.to_json_dict(), ensure_ascii=False))
    return status


def _cmd_export(args: argparse.Namespace) -> int:
    tables = _load_tables(args.tables)
    label = Label(args.label) if args.label else None
    records = []
    for archive in args.archives:
        package = load_package(archive, args.ecosystem)
        try:
            result = pipeline.analyze_package(package, tables=tables,
                                              token_limit=args.token_limit, mode=args.mode)
            records.append(pipeline.result_to_record(result, label=label))
        finally:
            cleanup_package(package)
    count = export_corpus(records, args.out)
    print(f"wrote {count} records to {args.out}")
    return EXIT_OK


def _cmd_train(args: argparse.Namespace) -> int:
    corpus = import_corpus(args.corpus)
    model = train_baseline(corpus, n=args.ngram, threshold=args.threshold)
    model.save(args.out)
    print(f"saved {model.model_id} ({len(model.weights)} n-gram weights) to {args.out}")
    return EXIT_OK


def _cmd_eval(args: argparse.Namespace) -> int:
    corpus = import_corpus(args.corpus)
    labeled = [r for r in corpus if r.label is not None]
    if args.predictions is not None:
        by_key: dict[tuple[str, str, str], Label] = {}
        with open(args.predictions, encoding="utf-8") as handle:
            for line in handle:
                if not line.strip():
                    continue
                row = json.loads(line)
                key = (row["package_name"], row["version"], row["ecosystem"])
                by_key[key] = Label(row["label"])
        pairs = [(by_key[(r.package_name, r.version, r.ecosystem)], r.label)
                 for r in labeled
                 if (r.package_name, r.version, r.ecosystem) in by_key]
        predictions = [p for p, _ in pairs]
        truth = [t for _, t in pairs]
    elif args.model is not None:
        model = BaselineModel.load(args.model)
        predictions = [predict(model, r).label for r in labeled]
        truth = [r.label for r in labeled]
    else:
        print("eval needs --predictions or --model", file=sys.stderr)
        return EXIT_BAD_USAGE
    metrics = evaluate(predictions, truth)
    print(json.dumps(metrics.to_json_dict()))
    return EXIT_OK


def _cmd_monitor(args: argparse.Namespace) -> int:
    since = args.since
    if since is None and args.cursor and args.cursor.exists():
        since = _timestamp(args.cursor.read_text(encoding="utf-8").strip())
    if since is None:
        since = datetime.fromtimestamp(0, tz=timezone.utc)

    config = RegistryConfig(min_request_interval=args.min_interval)
    if args.size_cap:
        config.size_cap = args.size_cap
    if args.endpoint:
        if args.ecosystem is Ecosystem.PYPI:
            config.pypi_feed_url = args.endpoint
        else:
            config.npm_feed_url = args.endpoint
    if args.meta_endpoint:
        if args.ecosystem is Ecosystem.PYPI:
            config.pypi_project_url = args.meta_endpoint
        else:
            config.npm_package_url = args.meta_endpoint

    limiter = RateLimiter(config.min_request_interval)
    events = list_recent(args.ecosystem, since, limit=args.limit,
                         config=config, limiter=limiter)
    tables = _load_tables(args.tables)
    summary = {"scanned": 0, "failed": 0, "removed_before_fetch": 0}
    latest = since
    for event in events:
        latest = max(latest, event.published_at)
        try:
            fetched = fetch_archive(event, args.dest, config=config, limiter=limiter)
        except NotFound:
            summary["removed_before_fetch"] += 1
            continue
        try:
            report = pipeline.scan_package(fetched.path, args.ecosystem,
                                           model_path=args.model, mode=args.mode,
                                           tables=tables, token_limit=args.token_limit)
        except SeqscanError as exc:
            summary["failed"] += 1
            print(json.dumps({"archive": str(fetched.path),
                              "error": f"{type(exc).__name__}: {exc}"}))
            continue
        doc = report.to_json_dict()
        doc["archive_sha256"] = fetched.sha256
        print(json.dumps(doc, ensure_ascii=False))
        summary["scanned"] += 1

    if args.cursor:
        args.cursor.write_text(latest.isoformat(), encoding="utf-8")
    print(json.dumps({"monitor_summary": summary}))
    return EXIT_OK


def _cmd_dump_tables(_: argparse.Namespace) -> int:
    print(default_tables().to_json())
    return EXIT_OK


def _cmd_dump_graph(args: argparse.Namespace) -> int:
    from .callgraph import build_call_graph, dump_graph
    from .methods import enumerate_methods

    try:
        package = load_package(args.archive, args.ecosystem)
    except SeqscanError as exc:
        print(json.dumps({"error": f"{type(exc).__name__}: {exc}"}))
        return EXIT_SCAN_FAILURE
    try:
        graph = build_call_graph(package, enumerate_methods(package))
        text = dump_graph(graph)
        if text:
            print(text)
    finally:
        cleanup_package(package)
    return EXIT_OK


_COMMANDS = {
    "scan": _cmd_scan,
    "batch": _cmd_batch,
    "export-corpus": _cmd_export,
    "train-baseline": _cmd_train,
    "eval": _cmd_eval,
    "monitor": _cmd_monitor,
    "dump-tables": _cmd_dump_tables,
    "dump-graph": _cmd_dump_graph,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = _apply_config(parser, sys.argv[1:] if argv is None else argv)
    try:
        return _COMMANDS[args.command](args)
    except SeqscanError as exc:
        print(f"seqscan: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_SCAN_FAILURE


if __name__ == "__main__":
    sys.exit(main())
