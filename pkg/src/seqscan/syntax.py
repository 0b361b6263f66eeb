"""Per-file syntactic index shared by the feature, method and call-graph passes.

Each analyzable source file is reduced once to a flat ``FileIndex``:
declarations with line spans, import bindings, call sites with textual
callees, string literals and bare attribute reads.  Python files are indexed
with the stdlib ``ast`` module; JavaScript files with the token-level indexer
in ``js_syntax``.  Files that fail to parse yield an index with
``parse_ok=False`` and no entries (the scan records a warning and continues).
"""

from __future__ import annotations

import ast
from dataclasses import dataclass
from functools import lru_cache

from .model import Language, SourceFile

MAIN_NAME = "__main__"  # the implicit "main" owning all top-level statements


@dataclass(frozen=True)
class Declaration:
    name: str            # simple name, e.g. "helper" or "#secret"
    dotted: str          # path within the file, e.g. "Outer.helper"
    start_line: int      # 1-based, def/function keyword line
    end_line: int
    col: int             # 0-based
    in_class: str | None = None  # dotted path of the enclosing class, if any


@dataclass(frozen=True)
class ImportBinding:
    module: str          # textual target: "os", "pkg.sub", "./util" ("" for from-. imports)
    symbol: str | None   # from x import SYMBOL / const {SYMBOL} = require(...)
    alias: str           # local name bound ("" for side-effect imports)
    line: int
    col: int
    level: int = 0       # python relative-import level
    is_dynamic: bool = False  # import('x') — feature-visible, ignored for closure


@dataclass(frozen=True)
class CallSite:
    callee: str          # dotted callee text: "os.system", "foo", "self.helper"
    line: int
    col: int
    is_new: bool = False
    via_module: str | None = None  # require('m').callee(...) chains carry m here


@dataclass(frozen=True)
class StringLit:
    value: str
    line: int
    col: int


@dataclass(frozen=True)
class AttributeRead:
    dotted: str          # e.g. "process.env.PATH", "os.environ"
    line: int
    col: int


@dataclass(frozen=True)
class FileIndex:
    n_lines: int
    declarations: tuple[Declaration, ...] = ()
    imports: tuple[ImportBinding, ...] = ()
    calls: tuple[CallSite, ...] = ()
    strings: tuple[StringLit, ...] = ()
    attributes: tuple[AttributeRead, ...] = ()
    parse_ok: bool = True
    error: str | None = None


def _dotted_name(node: ast.expr) -> str | None:
    """Flatten a Name/Attribute chain to dotted text; None if dynamic."""
    parts: list[str] = []
    while isinstance(node, ast.Attribute):
        parts.append(node.attr)
        node = node.value
    if isinstance(node, ast.Name):
        parts.append(node.id)
        return ".".join(reversed(parts))
    return None


class _PyIndexer(ast.NodeVisitor):
    def __init__(self) -> None:
        self.declarations: list[Declaration] = []
        self.imports: list[ImportBinding] = []
        self.calls: list[CallSite] = []
        self.strings: list[StringLit] = []
        self.attributes: list[AttributeRead] = []
        self._scope: list[str] = []
        self._class_scope: list[str] = []

    def _visit_function(self, node: ast.FunctionDef | ast.AsyncFunctionDef) -> None:
        dotted = ".".join(self._scope + [node.name])
        self.declarations.append(Declaration(
            name=node.name,
            dotted=dotted,
            start_line=node.lineno,
            end_line=node.end_lineno or node.lineno,
            col=node.col_offset,
            in_class=self._class_scope[-1] if self._class_scope else None,
        ))
        for decorator in node.decorator_list:
            self.visit(decorator)
        self._scope.append(node.name)
        for stmt in node.body:
            self.visit(stmt)
        self._scope.pop()

    visit_FunctionDef = _visit_function
    visit_AsyncFunctionDef = _visit_function

    def visit_ClassDef(self, node: ast.ClassDef) -> None:
        for decorator in node.decorator_list:
            self.visit(decorator)
        for base in node.bases:
            self.visit(base)
        dotted = ".".join(self._scope + [node.name])
        self._scope.append(node.name)
        self._class_scope.append(dotted)
        for stmt in node.body:
            self.visit(stmt)
        self._class_scope.pop()
        self._scope.pop()

    def visit_Import(self, node: ast.Import) -> None:
        for alias in node.names:
            self.imports.append(ImportBinding(
                module=alias.name,
                symbol=None,
                alias=alias.asname or alias.name.split(".")[0],
                line=getattr(alias, "lineno", node.lineno),
                col=getattr(alias, "col_offset", node.col_offset),
            ))

    def visit_ImportFrom(self, node: ast.ImportFrom) -> None:
        for alias in node.names:
            self.imports.append(ImportBinding(
                module=node.module or "",
                symbol=alias.name,
                alias=alias.asname or alias.name,
                line=node.lineno,
                col=node.col_offset,
                level=node.level,
            ))

    def visit_Call(self, node: ast.Call) -> None:
        callee = _dotted_name(node.func)
        if callee is not None:
            self.calls.append(CallSite(callee=callee, line=node.lineno, col=node.col_offset))
        self.generic_visit(node)

    def visit_Attribute(self, node: ast.Attribute) -> None:
        dotted = _dotted_name(node)
        if dotted is not None and "." in dotted:
            self.attributes.append(AttributeRead(dotted=dotted, line=node.lineno, col=node.col_offset))
        self.generic_visit(node)

    def visit_Constant(self, node: ast.Constant) -> None:
        if isinstance(node.value, str):
            self.strings.append(StringLit(value=node.value, line=node.lineno, col=node.col_offset))
        elif isinstance(node.value, bytes):
            text = node.value.decode("utf-8", errors="replace")
            self.strings.append(StringLit(value=text, line=node.lineno, col=node.col_offset))


def index_python(content: str) -> FileIndex:
    n_lines = content.count("\n") + 1
    try:
        tree = ast.parse(content)
    except (SyntaxError, ValueError, RecursionError) as exc:
        return FileIndex(n_lines=n_lines, parse_ok=False, error=f"python parse failure: {exc}")
    indexer = _PyIndexer()
    indexer.visit(tree)
    return FileIndex(
        n_lines=n_lines,
        declarations=tuple(indexer.declarations),
        imports=tuple(indexer.imports),
        calls=tuple(sorted(indexer.calls, key=lambda c: (c.line, c.col))),
        strings=tuple(sorted(indexer.strings, key=lambda s: (s.line, s.col))),
        attributes=tuple(sorted(indexer.attributes, key=lambda a: (a.line, a.col))),
    )


@lru_cache(maxsize=512)
def _index_cached(path: str, language: Language, content: str) -> FileIndex:
    if language is Language.PYTHON:
        return index_python(content)
    if language is Language.JAVASCRIPT:
        from .js_syntax import index_javascript

        return index_javascript(content)
    return FileIndex(n_lines=content.count("\n") + 1, parse_ok=False, error="unsupported language")


def index_file(source: SourceFile) -> FileIndex:
    """Index one source file (cached; Package objects are immutable)."""
    return _index_cached(source.path, source.language, source.content)
