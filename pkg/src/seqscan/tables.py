"""Category tables: the configurable pattern data behind the 16 features.

The default tables ship with the package as a versioned JSON file
(``data/category_tables.json``) and can be overridden per scan.  Lists are
data, not code: module-name sets per behavior dimension, exact call-name
sets, sensitive-read call/attribute sets, and the literal patterns (URL,
base64, long-string, bash-command, sensitive-information).
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from .model import Language

# behavior dimensions, keyed the way the JSON file spells them
DIMENSIONS = ("os", "filesystem", "network", "encoding", "process")

_LANGUAGE_KEYS = {Language.PYTHON: "python", Language.JAVASCRIPT: "javascript"}


@dataclass(frozen=True)
class LanguageTable:
    modules: dict[str, frozenset[str]]       # dimension -> module names
    calls: dict[str, frozenset[str]]          # dimension -> exact call names
    eval_calls: frozenset[str]
    sensitive_calls: frozenset[str]
    sensitive_attributes: frozenset[str]


@dataclass(frozen=True)
class CategoryTable:
    version: int
    long_string_threshold: int
    base64_min_length: int
    url_pattern: re.Pattern
    bash_patterns: tuple[re.Pattern, ...]
    sensitive_string_patterns: tuple[re.Pattern, ...]
    languages: dict[str, LanguageTable]
    raw: dict

    def for_language(self, language: Language) -> LanguageTable:
        return self.languages[_LANGUAGE_KEYS[language]]

    def to_json(self) -> str:
        return json.dumps(self.raw, indent=2, ensure_ascii=False)


def _parse_language(data: dict) -> LanguageTable:
    return LanguageTable(
        modules={dim: frozenset(data["modules"].get(dim, ())) for dim in DIMENSIONS},
        calls={dim: frozenset(data["calls"].get(dim, ())) for dim in DIMENSIONS},
        eval_calls=frozenset(data.get("eval_calls", ())),
        sensitive_calls=frozenset(data.get("sensitive_calls", ())),
        sensitive_attributes=frozenset(data.get("sensitive_attributes", ())),
    )


def parse_tables(data: dict) -> CategoryTable:
    for key in ("version", "long_string_threshold", "base64_min_length",
                "url_pattern", "languages"):
        if key not in data:
            raise ValueError(f"category table config missing {key!r}")
    languages = {name: _parse_language(sub) for name, sub in data["languages"].items()}
    for required in _LANGUAGE_KEYS.values():
        if required not in languages:
            raise ValueError(f"category table config missing language {required!r}")
    return CategoryTable(
        version=int(data["version"]),
        long_string_threshold=int(data["long_string_threshold"]),
        base64_min_length=int(data["base64_min_length"]),
        url_pattern=re.compile(data["url_pattern"]),
        bash_patterns=tuple(re.compile(p) for p in data.get("bash_patterns", ())),
        sensitive_string_patterns=tuple(
            re.compile(p) for p in data.get("sensitive_string_patterns", ())),
        languages=languages,
        raw=data,
    )


def load_tables(path: str | Path) -> CategoryTable:
    with open(path, encoding="utf-8") as handle:
        return parse_tables(json.load(handle))


_DEFAULT: CategoryTable | None = None


def default_tables() -> CategoryTable:
    """The embedded default tables (loaded once)."""
    global _DEFAULT
    if _DEFAULT is None:
        text = resources.files("seqscan.data").joinpath("category_tables.json").read_text("utf-8")
        _DEFAULT = parse_tables(json.loads(text))
    return _DEFAULT
