"""Static call graph over in-package methods.

A single-pass, flow-insensitive resolver: a call edge exists when the textual
callee resolves — through local definitions, then the file's import bindings —
to a method defined inside the package.  Unresolved callees (builtins,
external packages, dynamic receivers) simply produce no edge; they may still
produce feature instances.  Method references passed as values do not create
edges.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .methods import (
    MethodKind,
    MethodRef,
    owner_of,
    resolve_import_files,
)
from .model import Language, Package, SourceFile
from .syntax import index_file


@dataclass(frozen=True)
class CallEdge:
    caller: MethodRef
    line: int
    column: int
    callee: MethodRef


@dataclass(frozen=True)
class CallGraph:
    methods: tuple[MethodRef, ...]  # prioritized root list M
    edges: frozenset[CallEdge]
    by_caller: dict[MethodRef, tuple[CallEdge, ...]] = field(hash=False, default_factory=dict)

    def outgoing(self, method: MethodRef) -> tuple[CallEdge, ...]:
        return self.by_caller.get(method, ())


class _Resolver:
    def __init__(self, package: Package, methods: list[MethodRef]) -> None:
        self.package = package
        self.files = frozenset(
            s.path for s in package.sources
            if s.language in (Language.PYTHON, Language.JAVASCRIPT))
        self.by_file: dict[str, list[MethodRef]] = {}
        self.by_qualified: dict[str, MethodRef] = {}
        for method in methods:
            self.by_file.setdefault(method.file, []).append(method)
            self.by_qualified[method.qualified_name] = method
        # (file, local symbol) -> in-package method, built from import bindings
        self.import_targets: dict[str, dict[str, MethodRef]] = {}
        # (file, local alias) -> module file path, for namespace-style access
        self.module_aliases: dict[str, dict[str, str]] = {}
        for source in package.sources:
            if source.language not in (Language.PYTHON, Language.JAVASCRIPT):
                continue
            self._index_imports(source)

    def _index_imports(self, source: SourceFile) -> None:
        symbols: dict[str, MethodRef] = {}
        modules: dict[str, str] = {}
        for binding in index_file(source).imports:
            if not binding.alias:
                continue
            targets = resolve_import_files(binding, source, self.files)
            if not targets:
                continue
            target_file = targets[-1]  # deepest module the import executes
            if binding.symbol:
                method = self._lookup_in_file(target_file, binding.symbol)
                if method is not None:
                    symbols[binding.alias] = method
                    continue
                # `from pkg import mod` style: the symbol is itself a module
                if target_file.endswith((f"/{binding.symbol}.py", f"{binding.symbol}.py",
                                         f"/{binding.symbol}.js")):
                    modules[binding.alias] = target_file
            else:
                modules[binding.alias] = target_file
        self.import_targets[source.path] = symbols
        self.module_aliases[source.path] = modules

    def _lookup_in_file(self, file_path: str, dotted: str) -> MethodRef | None:
        exact = self.by_qualified.get(f"{file_path}::{dotted}")
        if exact is not None and exact.kind is MethodKind.EXPLICIT:
            return exact
        return None

    def resolve(self, callee: str, file_path: str,
                caller: MethodRef | None = None) -> MethodRef | None:
        head, _, rest = callee.partition(".")

        # self/this receivers: a sibling method of the caller's class
        if head in ("self", "this", "cls") and rest and caller is not None:
            scope = caller.local_name.rsplit(".", 1)
            if len(scope) == 2:
                found = self._lookup_in_file(file_path, f"{scope[0]}.{rest}")
                if found is not None:
                    return found
            return None

        if not rest:
            # bare name: lexical scope chain of the caller, outermost last
            scopes = [""]
            if caller is not None and caller.kind is MethodKind.EXPLICIT:
                parts = caller.local_name.split(".")
                scopes = [".".join(parts[:i]) for i in range(len(parts), -1, -1)]
            for scope in scopes:
                dotted = f"{scope}.{callee}" if scope else callee
                found = self._lookup_in_file(file_path, dotted)
                if found is not None:
                    return found
            imported = self.import_targets.get(file_path, {}).get(callee)
            return imported

        # dotted: namespace alias (import x / const x = require('./x'))
        module_file = self.module_aliases.get(file_path, {}).get(head)
        if module_file is not None:
            return self._lookup_in_file(module_file, rest)
        # local dotted definition, e.g. an in-file class method Klass.m
        return self._lookup_in_file(file_path, callee)

    def resolve_via_module(self, module: str, attr: str, file_path: str,
                           source: SourceFile) -> MethodRef | None:
        """require('./x').attr(...) chains."""
        from .syntax import ImportBinding

        binding = ImportBinding(module=module, symbol=None, alias="", line=1, col=0)
        targets = resolve_import_files(binding, source, self.files)
        if not targets:
            return None
        return self._lookup_in_file(targets[-1], attr)


def resolve_call(callee_text: str, file: SourceFile, package: Package,
                 methods: list[MethodRef] | None = None,
                 caller: MethodRef | None = None) -> MethodRef | None:
    """Resolve one textual callee; local definitions win over imports."""
    from .methods import enumerate_methods

    if methods is None:
        methods = enumerate_methods(package)
    return _Resolver(package, methods).resolve(callee_text, file.path, caller)


def build_call_graph(package: Package, methods: list[MethodRef],
                     prioritized: list[MethodRef] | None = None) -> CallGraph:
    """Line-annotated edges for every resolvable call expression.

    ``methods`` must be the full enumeration (privates included); the graph's
    ``methods`` field carries the prioritized public root list.
    """
    from .methods import prioritize_methods

    resolver = _Resolver(package, methods)
    if prioritized is None:
        prioritized = prioritize_methods(package, methods)

    edges: list[CallEdge] = []
    for source in package.sources:
        if source.language not in (Language.PYTHON, Language.JAVASCRIPT):
            continue
        index = index_file(source)
        if not index.parse_ok:
            continue
        file_methods = resolver.by_file.get(source.path, [])
        for call in index.calls:
            caller = owner_of(file_methods, call.line)
            if caller is None:
                continue
            if call.via_module:
                target = resolver.resolve_via_module(call.via_module, call.callee,
                                                     source.path, source)
            else:
                target = resolver.resolve(call.callee, source.path, caller)
            if target is None:
                continue
            edges.append(CallEdge(caller=caller, line=call.line, column=call.col, callee=target))

    by_caller: dict[MethodRef, list[CallEdge]] = {}
    for edge in edges:
        by_caller.setdefault(edge.caller, []).append(edge)
    indexed = {caller: tuple(sorted(bucket, key=lambda e: (e.line, e.column)))
               for caller, bucket in by_caller.items()}
    return CallGraph(methods=tuple(prioritized), edges=frozenset(edges), by_caller=indexed)


def dump_graph(graph: CallGraph) -> str:
    """Debug dump: one edge per line, caller TAB line TAB callee."""
    lines = []
    for caller in sorted(graph.by_caller, key=lambda m: m.qualified_name):
        for edge in graph.by_caller[caller]:
            lines.append(f"{edge.caller.qualified_name}\t{edge.line}\t{edge.callee.qualified_name}")
    return "\n".join(lines)
