"""The 16-feature extractor: turns a syntactic index into ⟨method, line, id⟩ hits.

Matching is textual and flow-insensitive: import targets against per-dimension
module sets, call sites against exact call names (with in-file import aliasing)
or dotted-prefix module membership, member reads against the sensitive set,
and string literals against the URL / base64 / long-string / bash patterns.
Dynamic receivers are never matched; false negatives are accepted over
guessing.
"""

from __future__ import annotations

import base64
import binascii
from dataclasses import dataclass
from enum import Enum

from .methods import MethodRef, owner_of
from .model import Language, SourceFile
from .syntax import index_file
from .tables import CategoryTable, LanguageTable


class FeatureId(Enum):
    R1 = "import operating system module"
    R2 = "use operating system module call"
    R3 = "import file system module"
    R4 = "use file system module call"
    R5 = "read sensitive information"
    D1 = "import network module"
    D2 = "use network module call"
    D3 = "use URL"
    E1 = "import encoding module"
    E2 = "use encoding module call"
    E3 = "use base64 string"
    E4 = "use long string"
    P1 = "import process module"
    P2 = "use process module call"
    P3 = "use bash script"
    P4 = "evaluate code at run-time"

    @property
    def description(self) -> str:
        return self.value


_FEATURE_ORDER = {fid: i for i, fid in enumerate(FeatureId)}

# import features: R-dimensions first (a module sits in one set; precedence
# only guards misconfiguration)
_IMPORT_PRECEDENCE = (
    ("os", FeatureId.R1),
    ("filesystem", FeatureId.R3),
    ("network", FeatureId.D1),
    ("encoding", FeatureId.E1),
    ("process", FeatureId.P1),
)

# call features: payload execution beats transmission beats encoding beats reads
_CALL_PRECEDENCE = (
    ("process", FeatureId.P2),
    ("network", FeatureId.D2),
    ("encoding", FeatureId.E2),
    ("os", FeatureId.R2),
    ("filesystem", FeatureId.R4),
)


@dataclass(frozen=True)
class FeatureInstance:
    method: MethodRef
    line: int
    column: int
    id: FeatureId


def _norm_module(name: str) -> str:
    return name[5:] if name.startswith("node:") else name


def match_import(module_name: str, language: Language,
                 tables: CategoryTable) -> FeatureId | None:
    """Import target -> one of R1/R3/D1/E1/P1 (precedence R1>R3>D1>E1>P1)."""
    module = _norm_module(module_name)
    top = module.split(".", 1)[0]
    table = tables.for_language(language)
    for dimension, fid in _IMPORT_PRECEDENCE:
        names = table.modules[dimension]
        if module in names or top in names:
            return fid
    return None


def classify_string_literal(text: str, tables: CategoryTable) -> list[FeatureId]:
    """String literal -> subset of {D3, E3, E4, P3}, in that fixed order."""
    ids: list[FeatureId] = []
    if tables.url_pattern.fullmatch(text):
        ids.append(FeatureId.D3)
    if _is_base64(text, tables.base64_min_length):
        ids.append(FeatureId.E3)
    if len(text) >= tables.long_string_threshold:
        ids.append(FeatureId.E4)
    if any(p.search(text) for p in tables.bash_patterns):
        ids.append(FeatureId.P3)
    return ids


def _is_base64(text: str, min_length: int) -> bool:
    if len(text) < min_length or len(text) % 4 != 0:
        return False
    if not all(c.isalnum() or c in "+/=" for c in text):
        return False
    try:
        base64.b64decode(text, validate=True)
    except (binascii.Error, ValueError):
        return False
    return True


def _alias_map(imports) -> dict[str, str]:
    """Local name -> fully qualified imported name (module or module.symbol)."""
    aliases: dict[str, str] = {}
    for binding in imports:
        if not binding.alias:
            continue
        module = _norm_module(binding.module)
        if binding.symbol and binding.level == 0 and module:
            aliases[binding.alias] = f"{module}.{binding.symbol}"
        elif binding.symbol is None and module:
            top = module.split(".", 1)[0]
            if binding.alias == top and module != top:
                aliases[top] = top  # `import os.path` binds the top module
            else:
                aliases[binding.alias] = module
    return aliases


def _resolve_callee(callee: str, aliases: dict[str, str]) -> str:
    head, _, rest = callee.partition(".")
    target = aliases.get(head)
    if target is None:
        return callee  # raw textual fallback: unimported names still match
    return f"{target}.{rest}" if rest else target


def _match_call(resolved: str, table: LanguageTable) -> FeatureId | None:
    if resolved in table.eval_calls:
        return FeatureId.P4
    for dimension, fid in _CALL_PRECEDENCE:
        if resolved in table.calls[dimension]:
            return fid
    if resolved in table.sensitive_calls:
        return FeatureId.R5
    # dotted-prefix membership: any call into a categorized module
    parts = resolved.split(".")
    if len(parts) >= 2:
        prefixes = {".".join(parts[:i]) for i in range(1, len(parts))}
        for dimension, fid in _CALL_PRECEDENCE:
            if prefixes & table.modules[dimension]:
                return fid
    return None


def _match_sensitive_attribute(resolved: str, table: LanguageTable) -> bool:
    parts = resolved.split(".")
    prefixes = {".".join(parts[:i]) for i in range(2, len(parts) + 1)}
    return bool(prefixes & table.sensitive_attributes)


def extract_features(file: SourceFile, methods: list[MethodRef],
                     tables: CategoryTable,
                     warnings: list[str] | None = None) -> list[FeatureInstance]:
    """All feature instances of one file, attributed to the innermost
    enclosing method and sorted by (line, column)."""
    if file.language not in (Language.PYTHON, Language.JAVASCRIPT):
        return []
    index = index_file(file)
    if not index.parse_ok:
        if warnings is not None:
            warnings.append(f"{file.path}: {index.error}")
        return []

    table = tables.for_language(file.language)
    aliases = _alias_map(index.imports)
    hits: list[tuple[int, int, FeatureId]] = []

    for imp in index.imports:
        fid = match_import(imp.module, file.language, tables)
        if fid is not None:
            hits.append((imp.line, imp.col, fid))

    for call in index.calls:
        if call.via_module:
            resolved = f"{_norm_module(call.via_module)}.{call.callee}"
        else:
            resolved = _resolve_callee(call.callee, aliases)
        fid = _match_call(resolved, table)
        if fid is not None:
            hits.append((call.line, call.col, fid))
        if resolved in table.sensitive_calls or _match_sensitive_attribute(resolved, table):
            hits.append((call.line, call.col, FeatureId.R5))

    for attr in index.attributes:
        resolved = _resolve_callee(attr.dotted, aliases)
        if _match_sensitive_attribute(resolved, table) or resolved in table.sensitive_calls:
            hits.append((attr.line, attr.col, FeatureId.R5))

    for literal in index.strings:
        for fid in classify_string_literal(literal.value, tables):
            hits.append((literal.line, literal.col, fid))
        if any(p.search(literal.value) for p in tables.sensitive_string_patterns):
            hits.append((literal.line, literal.col, FeatureId.R5))

    seen: set[tuple[int, int, FeatureId]] = set()
    instances: list[FeatureInstance] = []
    for line, col, fid in sorted(hits, key=lambda h: (h[0], h[1], _FEATURE_ORDER[h[2]])):
        if (line, col, fid) in seen:
            continue
        seen.add((line, col, fid))
        method = owner_of(methods, line)
        if method is None:
            continue  # methods must cover the file; defensive only
        instances.append(FeatureInstance(method=method, line=line, column=col, id=fid))
    return instances
