"""Behavior sequence generation by prioritized sub-call-graph traversal.

For each root in the prioritized method list, the traversal merges the
visited method's own feature instances and outgoing call edges into one
line/column-ordered worklist; features are appended to the trace, edges are
followed depth-first.  A per-entry visited set bounds every entry traversal
(cycles and diamonds contribute once per entry); distinct roots traverse
independently, so a shared helper's features may repeat across entries.
"""

from __future__ import annotations

from dataclasses import dataclass

from .callgraph import CallGraph
from .features import FeatureInstance
from .methods import MethodRef

FeaturesByMethod = dict[MethodRef, list[FeatureInstance]]


@dataclass(frozen=True)
class EntryTrace:
    root: MethodRef
    items: tuple[FeatureInstance, ...]


@dataclass(frozen=True)
class BehaviorSequence:
    entries: tuple[EntryTrace, ...]

    @property
    def items(self) -> list[FeatureInstance]:
        return [item for entry in self.entries for item in entry.items]


def group_by_method(instances: list[FeatureInstance]) -> FeaturesByMethod:
    grouped: FeaturesByMethod = {}
    for instance in instances:
        grouped.setdefault(instance.method, []).append(instance)
    return grouped


def traverse_entry(root: MethodRef, graph: CallGraph,
                   features: FeaturesByMethod) -> list[FeatureInstance]:
    visited: set[MethodRef] = set()
    out: list[FeatureInstance] = []

    def visit(method: MethodRef) -> None:
        if method in visited:
            return
        visited.add(method)
        worklist: list[tuple[int, int, int, int, object]] = []
        for i, inst in enumerate(features.get(method, ())):
            worklist.append((inst.line, inst.column, 0, i, inst))  # feature before edge on ties
        for i, edge in enumerate(graph.outgoing(method)):
            worklist.append((edge.line, edge.column, 1, i, edge))
        worklist.sort(key=lambda entry: entry[:4])
        for _, _, kind, _, payload in worklist:
            if kind == 0:
                out.append(payload)  # type: ignore[arg-type]
            else:
                visit(payload.callee)  # type: ignore[union-attr]

    visit(root)
    return out


def generate_behavior_sequence(graph: CallGraph,
                               features: FeaturesByMethod) -> BehaviorSequence:
    """One EntryTrace per prioritized root, in root order; empty traces kept
    (the renderer elides them)."""
    entries = tuple(
        EntryTrace(root=root, items=tuple(traverse_entry(root, graph, features)))
        for root in graph.methods
    )
    return BehaviorSequence(entries=entries)
