"""End-to-end scan pipeline: load -> extract -> prioritize -> graph ->
sequence -> render -> (predict), producing a versioned JSON report."""

from __future__ import annotations

import time
from dataclasses import dataclass
from pathlib import Path

from .callgraph import CallGraph, build_call_graph, dump_graph
from .classifier import BaselineModel, CorpusRecord, Prediction, predict
from .features import FeatureId, FeatureInstance, extract_features
from .methods import (
    MethodRef,
    assign_trigger_scenario,
    enumerate_methods,
    import_closure,
    prioritize_methods,
)
from .model import Ecosystem, Language, Package, cleanup_package, load_package
from .render import TextualDescription, render, render_unordered
from .sequence import BehaviorSequence, generate_behavior_sequence, group_by_method
from .tables import CategoryTable, default_tables

REPORT_SCHEMA_VERSION = 1

# conservative word cap keeping rendered text under 512 sub-word tokens
CLI_TOKEN_LIMIT = 384


@dataclass
class ScanResult:
    """Intermediate artifacts, for tests and debug dumps."""
    package: Package
    methods: list[MethodRef]
    roots: list[MethodRef]
    instances: list[FeatureInstance]
    graph: CallGraph
    sequence: BehaviorSequence
    description: TextualDescription
    warnings: list[str]


@dataclass
class ScanReport:
    schema_version: int
    package_name: str
    package_version: str
    ecosystem: str
    mode: str
    warnings: list[str]
    feature_counts: dict[str, int]
    entries: list[dict]
    description: str
    token_count: int
    truncated: bool
    prediction: dict | None
    timings_ms: dict[str, float]
    error: str | None = None

    def to_json_dict(self) -> dict:
        return {
            "schema_version": self.schema_version,
            "package": {
                "name": self.package_name,
                "version": self.package_version,
                "ecosystem": self.ecosystem,
            },
            "mode": self.mode,
            "warnings": self.warnings,
            "feature_counts": self.feature_counts,
            "entries": self.entries,
            "description": self.description,
            "token_count": self.token_count,
            "truncated": self.truncated,
            "prediction": self.prediction,
            "timings_ms": self.timings_ms,
            "error": self.error,
        }


def analyze_package(package: Package, tables: CategoryTable | None = None,
                    token_limit: int = CLI_TOKEN_LIMIT,
                    mode: str = "sequence",
                    timings: dict[str, float] | None = None) -> ScanResult:
    """The static pipeline over an already-loaded package."""
    tables = tables or default_tables()
    timings = timings if timings is not None else {}
    warnings = list(package.warnings)

    t0 = time.perf_counter()
    methods = enumerate_methods(package)
    by_file: dict[str, list[MethodRef]] = {}
    for method in methods:
        by_file.setdefault(method.file, []).append(method)
    instances: list[FeatureInstance] = []
    for source in package.sources:
        if source.language is Language.OTHER:
            continue
        instances.extend(extract_features(source, by_file[source.path], tables,
                                          warnings=warnings))
    timings["extract"] = (time.perf_counter() - t0) * 1000

    t0 = time.perf_counter()
    roots = prioritize_methods(package, methods)
    graph = build_call_graph(package, methods, prioritized=roots)
    timings["graph"] = (time.perf_counter() - t0) * 1000

    t0 = time.perf_counter()
    sequence = generate_behavior_sequence(graph, group_by_method(instances))
    timings["sequence"] = (time.perf_counter() - t0) * 1000

    t0 = time.perf_counter()
    if mode == "unordered":
        description = render_unordered(instances, token_limit)
    else:
        description = render(sequence, token_limit)
    timings["render"] = (time.perf_counter() - t0) * 1000

    return ScanResult(package=package, methods=methods, roots=roots,
                      instances=instances, graph=graph, sequence=sequence,
                      description=description, warnings=warnings)


def result_to_record(result: ScanResult, label=None) -> CorpusRecord:
    package = result.package
    return CorpusRecord(
        package_name=package.name,
        version=package.version,
        ecosystem=package.ecosystem.value,
        description_text=result.description.text,
        ordered_feature_ids=tuple(i.id.name for i in result.sequence.items),
        label=label,
    )


def _entry_dicts(result: ScanResult) -> list[dict]:
    closure = import_closure(result.package)
    entries = []
    for trace in result.sequence.entries:
        if not trace.items:
            continue
        scenario = assign_trigger_scenario(trace.root, result.package.manifest,
                                           result.package, closure)
        entries.append({
            "root": trace.root.qualified_name,
            "file": trace.root.file,
            "scenario": scenario.name.lower(),
            "items": [
                {"method": item.method.qualified_name, "line": item.line,
                 "id": item.id.name}
                for item in trace.items
            ],
        })
    return entries


def scan_package(archive_path: str | Path, ecosystem: Ecosystem,
                 model_path: str | Path | None = None,
                 mode: str = "sequence",
                 tables: CategoryTable | None = None,
                 token_limit: int = CLI_TOKEN_LIMIT,
                 dump_graph_path: str | Path | None = None,
                 dump_sequence_path: str | Path | None = None) -> ScanReport:
    timings: dict[str, float] = {}
    t0 = time.perf_counter()
    package = load_package(archive_path, ecosystem)
    timings["load"] = (time.perf_counter() - t0) * 1000
    try:
        result = analyze_package(package, tables=tables, token_limit=token_limit,
                                 mode=mode, timings=timings)

        prediction_dict = None
        if model_path is not None:
            t0 = time.perf_counter()
            model = BaselineModel.load(model_path)
            pred: Prediction = predict(model, result_to_record(result))
            timings["predict"] = (time.perf_counter() - t0) * 1000
            prediction_dict = {"label": pred.label.value, "score": pred.score,
                               "model_id": pred.model_id}

        if dump_graph_path is not None:
            Path(dump_graph_path).write_text(dump_graph(result.graph) + "\n",
                                             encoding="utf-8")
        if dump_sequence_path is not None:
            lines = []
            for trace in result.sequence.entries:
                for item in trace.items:
                    lines.append(f"{trace.root.qualified_name}\t"
                                 f"{item.method.qualified_name}\t{item.line}\t{item.id.name}")
            Path(dump_sequence_path).write_text("\n".join(lines) + "\n", encoding="utf-8")

        counts = {fid.name: 0 for fid in FeatureId}
        for instance in result.instances:
            counts[instance.id.name] += 1

        return ScanReport(
            schema_version=REPORT_SCHEMA_VERSION,
            package_name=package.name,
            package_version=package.version,
            ecosystem=ecosystem.value,
            mode=mode,
            warnings=result.warnings,
            feature_counts=counts,
            entries=_entry_dicts(result),
            description=result.description.text,
            token_count=result.description.token_count,
            truncated=result.description.truncated,
            prediction=prediction_dict,
            timings_ms=timings,
        )
    finally:
        cleanup_package(package)
