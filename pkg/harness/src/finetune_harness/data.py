"""Corpus loading for the scanner's JSON Lines contract.

Each line carries package_name, version, ecosystem, description_text,
ordered_feature_ids and an optional label ("malicious" / "benign" / null).
The harness consumes only this file format; it never imports the scanner.
"""

import json
from pathlib import Path

LABEL_TO_ID = {"benign": 0, "malicious": 1}
ID_TO_LABEL = {0: "benign", 1: "malicious"}


class CorpusInvalid(Exception):
    """Corpus file empty, malformed, or missing required labels."""


class ModelMissing(Exception):
    """Model artifact directory does not exist or is incomplete."""


def load_corpus(path: str | Path, require_labels: bool) -> list[dict]:
    path = Path(path)
    if not path.is_file():
        raise CorpusInvalid(f"corpus file not found: {path}")
    records: list[dict] = []
    with open(path, encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                row = json.loads(line)
                record = {
                    "package_name": str(row["package_name"]),
                    "version": str(row["version"]),
                    "ecosystem": str(row["ecosystem"]),
                    "description_text": str(row["description_text"]),
                    "label": row.get("label"),
                }
            except (ValueError, KeyError, TypeError) as exc:
                raise CorpusInvalid(f"{path}:{lineno}: bad record: {exc}") from exc
            if record["label"] is not None and record["label"] not in LABEL_TO_ID:
                raise CorpusInvalid(f"{path}:{lineno}: unknown label {record['label']!r}")
            if require_labels and record["label"] is None:
                raise CorpusInvalid(f"{path}:{lineno}: training corpus needs labels")
            records.append(record)
    if not records:
        raise CorpusInvalid(f"corpus is empty: {path}")
    return records
