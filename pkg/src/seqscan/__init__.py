"""seqscan: static behavior-sequence scanner for PyPI and NPM packages.

Pipeline: load a package archive, extract the 16-feature hits from every
source file, prioritize entry methods by triggering scenario (install-time,
import-time, run-time), traverse the static call graph from each root to
order the hits into a behavior sequence, render the sequence as a textual
description, and classify it.
"""

from .callgraph import CallEdge, CallGraph, build_call_graph, resolve_call
from .classifier import (
    BaselineModel,
    CorpusRecord,
    Label,
    Metrics,
    Prediction,
    evaluate,
    export_corpus,
    import_corpus,
    predict,
    split_corpus,
    train_baseline,
)
from .errors import (
    ArchiveCorrupt,
    ArchiveTooLarge,
    BadOrder,
    EmptyClass,
    FeedUnparseable,
    IoFailure,
    LengthMismatch,
    ManifestUnparseable,
    NetworkFailure,
    NotFound,
    SeqscanError,
)
from .features import (
    FeatureId,
    FeatureInstance,
    classify_string_literal,
    extract_features,
    match_import,
)
from .methods import (
    MethodKind,
    MethodRef,
    TriggerScenario,
    Visibility,
    assign_trigger_scenario,
    enumerate_methods,
    import_closure,
    prioritize_methods,
)
from .model import (
    Ecosystem,
    Language,
    Manifest,
    Package,
    SourceFile,
    cleanup_package,
    load_package,
    parse_manifest,
)
from .pipeline import ScanReport, ScanResult, analyze_package, scan_package
from .registry import (
    FetchedArchive,
    RateLimiter,
    RegistryConfig,
    ReleaseEvent,
    fetch_archive,
    list_recent,
)
from .render import TextualDescription, render, render_unordered
from .sequence import (
    BehaviorSequence,
    EntryTrace,
    generate_behavior_sequence,
    group_by_method,
    traverse_entry,
)
from .tables import CategoryTable, default_tables, load_tables

__version__ = "0.1.0"
