"""Method abstraction and triggering-scenario prioritization.

Every analyzable source file contributes an implicit "main" method owning its
top-level statements, plus one explicit method per name-bound declaration.
Methods are classed by when they execute — install-time (install scripts),
import-time (initialization files and their static import closure), or
run-time — and ranked install < import < run, alphabetically within a class.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from pathlib import PurePosixPath

from .model import Language, Manifest, Package, SourceFile
from .syntax import FileIndex, ImportBinding, index_file

MAIN_SUFFIX = "::__main__"

# initialization files executed on import/require of a package
IMPORT_SEED_BASENAMES = {"__init__.py", "index.js"}

_JS_IMPORT_CANDIDATES = ("", ".js", ".cjs", ".mjs", "/index.js", "/index.cjs", "/index.mjs")


class MethodKind(Enum):
    EXPLICIT = "explicit"
    IMPLICIT_MAIN = "implicit_main"


class Visibility(Enum):
    PUBLIC = "public"
    PRIVATE = "private"


class TriggerScenario(Enum):
    INSTALL_TIME = 0  # lower value = higher execution likelihood
    IMPORT_TIME = 1
    RUN_TIME = 2


@dataclass(frozen=True)
class MethodRef:
    file: str
    qualified_name: str  # "<file>::<dotted>" ; implicit mains use "<file>::__main__"
    kind: MethodKind
    visibility: Visibility
    span: tuple[int, int]  # (start_line, end_line), 1-based inclusive

    @property
    def local_name(self) -> str:
        return self.qualified_name.split("::", 1)[1]

    @property
    def simple_name(self) -> str:
        return self.local_name.rsplit(".", 1)[-1]


def _visibility(simple_name: str, language: Language) -> Visibility:
    if language is Language.PYTHON:
        # name-mangled prefix-only dunders; __init__-style names stay public
        if simple_name.startswith("__") and not simple_name.endswith("__"):
            return Visibility.PRIVATE
    elif language is Language.JAVASCRIPT:
        if simple_name.startswith("#"):
            return Visibility.PRIVATE
    return Visibility.PUBLIC


def methods_for_file(source: SourceFile) -> list[MethodRef]:
    """Implicit main plus explicit declarations for one analyzable file."""
    if source.language is Language.OTHER:
        return []
    index = index_file(source)
    refs = [MethodRef(
        file=source.path,
        qualified_name=f"{source.path}{MAIN_SUFFIX}",
        kind=MethodKind.IMPLICIT_MAIN,
        visibility=Visibility.PUBLIC,
        span=(1, max(index.n_lines, 1)),
    )]
    taken = {refs[0].qualified_name}
    for decl in index.declarations:
        qualified = f"{source.path}::{decl.dotted}"
        if qualified in taken:  # duplicate names get a numeric suffix
            serial = 2
            while f"{qualified}#{serial}" in taken:
                serial += 1
            qualified = f"{qualified}#{serial}"
        taken.add(qualified)
        refs.append(MethodRef(
            file=source.path,
            qualified_name=qualified,
            kind=MethodKind.EXPLICIT,
            visibility=_visibility(decl.name, source.language),
            span=(decl.start_line, decl.end_line),
        ))
    return refs


def enumerate_methods(package: Package) -> list[MethodRef]:
    refs: list[MethodRef] = []
    for source in package.sources:
        refs.extend(methods_for_file(source))
    return refs


def owner_of(methods: list[MethodRef], line: int) -> MethodRef | None:
    """Innermost method whose span contains the line (main spans everything)."""
    best: MethodRef | None = None
    for method in methods:
        start, end = method.span
        if start <= line <= end:
            if best is None:
                best = method
                continue
            b_start, b_end = best.span
            if (start, -(end)) > (b_start, -(b_end)):
                best = method
    return best


# -- static import closure ---------------------------------------------------


def _norm_module(name: str) -> str:
    return name[5:] if name.startswith("node:") else name


def resolve_python_import(binding: ImportBinding, file_path: str,
                          files: frozenset[str]) -> list[str]:
    """In-package files executed by this import (parent inits included)."""

    def module_files(base_parts: tuple[str, ...], dotted: str) -> list[str]:
        out: list[str] = []
        parts = [p for p in dotted.split(".") if p] if dotted else []
        walk = list(base_parts)
        for i, part in enumerate(parts):
            walk.append(part)
            prefix = "/".join(walk)
            is_last = i == len(parts) - 1
            init = f"{prefix}/__init__.py"
            if init in files:
                out.append(init)
            if is_last and f"{prefix}.py" in files:
                out.append(f"{prefix}.py")
        if not parts:
            init = "/".join([*base_parts, "__init__.py"]).lstrip("/")
            if init in files:
                out.append(init)
        return out

    parent = PurePosixPath(file_path).parent
    base = () if str(parent) == "." else parent.parts

    resolved: list[str] = []
    if binding.level > 0:
        up = binding.level - 1
        rel_base = base[: len(base) - up] if up <= len(base) else None
        if rel_base is not None:
            resolved += module_files(tuple(rel_base), binding.module)
            if binding.symbol:
                dotted = f"{binding.module}.{binding.symbol}" if binding.module else binding.symbol
                resolved += module_files(tuple(rel_base), dotted)
    else:
        for base_parts in ((), base):  # package root, then py2-style sibling
            found = module_files(tuple(base_parts), binding.module)
            if binding.symbol:
                found += module_files(tuple(base_parts), f"{binding.module}.{binding.symbol}")
            if found:
                resolved += found
                break
    seen: set[str] = set()
    return [p for p in resolved if not (p in seen or seen.add(p))]


def resolve_js_import(binding: ImportBinding, file_path: str,
                      files: frozenset[str]) -> list[str]:
    module = _norm_module(binding.module)
    if not module.startswith(("./", "../", "/")):
        return []  # bare specifiers are external packages
    base = PurePosixPath(file_path).parent
    try:
        joined = (base / module).as_posix()
    except ValueError:
        return []
    # normalize "a/./b" and "a/../b" without escaping the package root
    parts: list[str] = []
    for part in PurePosixPath(joined).parts:
        if part == ".":
            continue
        if part == "..":
            if not parts:
                return []
            parts.pop()
        else:
            parts.append(part)
    stem = "/".join(parts)
    for suffix in _JS_IMPORT_CANDIDATES:
        candidate = f"{stem}{suffix}"
        if candidate in files:
            return [candidate]
    return []


def resolve_import_files(binding: ImportBinding, source: SourceFile,
                         files: frozenset[str]) -> list[str]:
    if binding.is_dynamic:
        return []
    if source.language is Language.PYTHON:
        return resolve_python_import(binding, source.path, files)
    if source.language is Language.JAVASCRIPT:
        return resolve_js_import(binding, source.path, files)
    return []


def import_closure(package: Package, manifest: Manifest | None = None) -> frozenset[str]:
    """Files reachable via static import/require edges from the seeds.

    Seeds are initialization files (__init__.py / index.js) and manifest
    install scripts; dynamic/computed imports are ignored.
    """
    manifest = manifest if manifest is not None else package.manifest
    by_path = {s.path: s for s in package.sources
               if s.language in (Language.PYTHON, Language.JAVASCRIPT)}
    files = frozenset(by_path)
    seeds = [p for p in files if PurePosixPath(p).name in IMPORT_SEED_BASENAMES]
    seeds += [p for p in manifest.install_script_paths if p in files]

    seen: set[str] = set()
    queue = list(dict.fromkeys(seeds))
    while queue:
        path = queue.pop()
        if path in seen:
            continue
        seen.add(path)
        index: FileIndex = index_file(by_path[path])
        for binding in index.imports:
            for target in resolve_import_files(binding, by_path[path], files):
                if target not in seen:
                    queue.append(target)
    return frozenset(seen)


def assign_trigger_scenario(method: MethodRef, manifest: Manifest,
                            package: Package,
                            closure: frozenset[str] | None = None) -> TriggerScenario:
    if method.kind is MethodKind.IMPLICIT_MAIN:
        if method.file in manifest.install_script_paths:
            return TriggerScenario.INSTALL_TIME
        if closure is None:
            closure = import_closure(package, manifest)
        if method.file in closure:
            return TriggerScenario.IMPORT_TIME
    return TriggerScenario.RUN_TIME


def prioritize_methods(package: Package,
                       methods: list[MethodRef] | None = None) -> list[MethodRef]:
    """The traversal root list M: public methods in scenario order, then
    alphabetically by qualified name (byte-wise)."""
    if methods is None:
        methods = enumerate_methods(package)
    closure = import_closure(package)
    public = [m for m in methods if m.visibility is Visibility.PUBLIC]
    return sorted(public, key=lambda m: (
        assign_trigger_scenario(m, package.manifest, package, closure).value,
        m.qualified_name,
    ))
