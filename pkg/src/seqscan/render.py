"""Rendering behavior sequences as the classifier's textual description.

Each non-empty entry becomes ``start entry <file>, <phrase>, ..., end of
entry``; fragments join with commas and the whole text is capped at a word
budget (tokens are whitespace words at this layer; a sub-word tokenizer
re-truncates downstream).  The unordered variant drops entry markers and
ordering — the ablation mode.
"""

from __future__ import annotations

from dataclasses import dataclass

from .features import FeatureInstance
from .sequence import BehaviorSequence

DEFAULT_TOKEN_LIMIT = 512
MIN_TOKEN_LIMIT = 8

ENTRY_START = "start entry"
ENTRY_END = "end of entry"


@dataclass(frozen=True)
class TextualDescription:
    text: str
    token_count: int
    truncated: bool


def _finish(fragments: list[str], token_limit: int) -> TextualDescription:
    text = ", ".join(fragments)
    words = text.split()
    truncated = len(words) > token_limit
    if truncated:
        text = " ".join(words[:token_limit])
    return TextualDescription(text=text, token_count=min(len(words), token_limit),
                              truncated=truncated)


def render(sequence: BehaviorSequence,
           token_limit: int = DEFAULT_TOKEN_LIMIT) -> TextualDescription:
    if token_limit < MIN_TOKEN_LIMIT:
        raise ValueError(f"token_limit must be >= {MIN_TOKEN_LIMIT}")
    fragments: list[str] = []
    for entry in sequence.entries:
        if not entry.items:
            continue  # empty entries are elided to conserve the token budget
        fragments.append(f"{ENTRY_START} {entry.root.file}")
        fragments.extend(item.id.description for item in entry.items)
        fragments.append(ENTRY_END)
    return _finish(fragments, token_limit)


def render_unordered(features: list[FeatureInstance],
                     token_limit: int = DEFAULT_TOKEN_LIMIT) -> TextualDescription:
    """Ablation mode: all instances by (file, line, column), no markers."""
    if token_limit < MIN_TOKEN_LIMIT:
        raise ValueError(f"token_limit must be >= {MIN_TOKEN_LIMIT}")
    ordered = sorted(features, key=lambda f: (f.method.file, f.line, f.column))
    return _finish([inst.id.description for inst in ordered], token_limit)
