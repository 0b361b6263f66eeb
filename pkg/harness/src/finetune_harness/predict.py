"""Batch prediction writing the scanner's predictions JSON Lines contract."""

import json
from pathlib import Path

import torch
from transformers import AutoModelForSequenceClassification, AutoTokenizer

from .data import ModelMissing, load_corpus

DECISION_THRESHOLD = 0.5
PREDICT_BATCH = 16


def _load_model(model_dir: str | Path):
    model_dir = Path(model_dir)
    if not model_dir.is_dir():
        raise ModelMissing(f"model directory not found: {model_dir}")
    try:
        tokenizer = AutoTokenizer.from_pretrained(model_dir)
        model = AutoModelForSequenceClassification.from_pretrained(model_dir)
    except (OSError, ValueError) as exc:
        raise ModelMissing(f"unreadable model at {model_dir}: {exc}") from exc
    model.eval()
    return tokenizer, model


def predict_records(model_dir: str | Path, records: list[dict],
                    max_tokens: int = 512) -> list[dict]:
    tokenizer, model = _load_model(model_dir)
    out: list[dict] = []
    with torch.no_grad():
        for start in range(0, len(records), PREDICT_BATCH):
            batch = records[start:start + PREDICT_BATCH]
            encoded = tokenizer(
                [r["description_text"] for r in batch],
                truncation=True, max_length=max_tokens,
                padding=True, return_tensors="pt")
            logits = model(**encoded).logits
            scores = torch.softmax(logits, dim=-1)[:, 1]
            for record, score in zip(batch, scores.tolist()):
                out.append({
                    "package_name": record["package_name"],
                    "version": record["version"],
                    "ecosystem": record["ecosystem"],
                    "score": score,
                    "label": "malicious" if score >= DECISION_THRESHOLD else "benign",
                })
    return out


def predict_file(model_dir: str | Path, corpus_path: str | Path,
                 out_path: str | Path, max_tokens: int = 512) -> int:
    """Score every record; returns the number of prediction lines written."""
    records = load_corpus(corpus_path, require_labels=False)
    predictions = predict_records(model_dir, records, max_tokens=max_tokens)
    with open(out_path, "w", encoding="utf-8") as handle:
        for row in predictions:
            handle.write(json.dumps(row, ensure_ascii=False))
            handle.write("\n")
    return len(predictions)
