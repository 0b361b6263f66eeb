"""Maliciousness classification over textual descriptions.

The built-in baseline is a deterministic n-gram log-odds model over the
*ordered* feature-id sequence (add-one smoothing, boundary padding), so it is
sequence-aware: with n >= 2 it can separate corpora that differ only in
feature order, while n = 1 degenerates to a bag of features — the ablation
baseline.  An external fine-tuned encoder plugs in through the same JSON
Lines corpus/prediction contracts.
"""

from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

from .errors import BadOrder, EmptyClass, IoFailure, LengthMismatch

MODEL_SCHEMA_VERSION = 1
CORPUS_FIELDS = ("package_name", "version", "ecosystem", "description_text",
                 "ordered_feature_ids", "label")

_BOUNDARY_START = "<s>"
_BOUNDARY_END = "</s>"
_GRAM_SEP = "|"


class Label(Enum):
    MALICIOUS = "malicious"
    BENIGN = "benign"


@dataclass(frozen=True)
class Prediction:
    label: Label
    score: float  # probability of Malicious
    model_id: str


@dataclass(frozen=True)
class CorpusRecord:
    package_name: str
    version: str
    ecosystem: str
    description_text: str
    ordered_feature_ids: tuple[str, ...]
    label: Label | None = None

    def to_json_dict(self) -> dict:
        return {
            "package_name": self.package_name,
            "version": self.version,
            "ecosystem": self.ecosystem,
            "description_text": self.description_text,
            "ordered_feature_ids": list(self.ordered_feature_ids),
            "label": self.label.value if self.label is not None else None,
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "CorpusRecord":
        label = data.get("label")
        return cls(
            package_name=str(data["package_name"]),
            version=str(data["version"]),
            ecosystem=str(data["ecosystem"]),
            description_text=str(data["description_text"]),
            ordered_feature_ids=tuple(data["ordered_feature_ids"]),
            label=Label(label) if label is not None else None,
        )


def _ngrams(ids: tuple[str, ...], n: int) -> list[str]:
    if not ids:
        return []  # an empty sequence scores at the prior alone
    padded = [_BOUNDARY_START] * (n - 1) + list(ids) + [_BOUNDARY_END] * (n - 1)
    return [_GRAM_SEP.join(padded[i:i + n]) for i in range(len(padded) - n + 1)]


@dataclass(frozen=True)
class BaselineModel:
    n: int
    weights: dict[str, float] = field(hash=False)
    unseen_weight: float = 0.0
    prior: float = 0.0
    threshold: float = 0.5

    @property
    def model_id(self) -> str:
        return f"baseline-ngram-v{MODEL_SCHEMA_VERSION}:n={self.n}"

    def score(self, ids: tuple[str, ...]) -> float:
        logit = self.prior
        for gram in _ngrams(ids, self.n):
            logit += self.weights.get(gram, self.unseen_weight)
        return 1.0 / (1.0 + math.exp(-logit))

    def save(self, path: str | Path) -> None:
        payload = {
            "schema_version": MODEL_SCHEMA_VERSION,
            "kind": "ngram-log-odds",
            "n": self.n,
            "weights": self.weights,
            "unseen_weight": self.unseen_weight,
            "prior": self.prior,
            "threshold": self.threshold,
        }
        try:
            Path(path).write_text(json.dumps(payload, sort_keys=True), encoding="utf-8")
        except OSError as exc:
            raise IoFailure(str(exc)) from exc

    @classmethod
    def load(cls, path: str | Path) -> "BaselineModel":
        try:
            payload = json.loads(Path(path).read_text(encoding="utf-8"))
        except (OSError, ValueError) as exc:
            raise IoFailure(str(exc)) from exc
        return cls(n=payload["n"], weights=payload["weights"],
                   unseen_weight=payload["unseen_weight"], prior=payload["prior"],
                   threshold=payload["threshold"])


def train_baseline(corpus: list[CorpusRecord], n: int = 3,
                   threshold: float = 0.5) -> BaselineModel:
    """Fit smoothed per-class n-gram log-odds; fully deterministic."""
    if not 1 <= n <= 5:
        raise BadOrder(f"n-gram order must be in 1..5, got {n}")
    mal = [r for r in corpus if r.label is Label.MALICIOUS]
    ben = [r for r in corpus if r.label is Label.BENIGN]
    if not mal or not ben:
        raise EmptyClass("training corpus needs at least one record of each label")

    counts = {Label.MALICIOUS: {}, Label.BENIGN: {}}
    totals = {Label.MALICIOUS: 0, Label.BENIGN: 0}
    vocabulary: set[str] = set()
    for record in corpus:
        if record.label is None:
            continue
        bucket = counts[record.label]
        for gram in _ngrams(record.ordered_feature_ids, n):
            bucket[gram] = bucket.get(gram, 0) + 1
            totals[record.label] += 1
            vocabulary.add(gram)

    # add-one smoothing over the joint vocabulary plus one unseen slot
    v = len(vocabulary) + 1
    denom_mal = totals[Label.MALICIOUS] + v
    denom_ben = totals[Label.BENIGN] + v
    weights = {
        gram: (math.log((counts[Label.MALICIOUS].get(gram, 0) + 1) / denom_mal)
               - math.log((counts[Label.BENIGN].get(gram, 0) + 1) / denom_ben))
        for gram in sorted(vocabulary)
    }
    unseen = math.log(1 / denom_mal) - math.log(1 / denom_ben)
    prior = math.log(len(mal) / len(ben))
    return BaselineModel(n=n, weights=weights, unseen_weight=unseen,
                         prior=prior, threshold=threshold)


def predict(model: BaselineModel, record: CorpusRecord) -> Prediction:
    score = model.score(record.ordered_feature_ids)
    label = Label.MALICIOUS if score >= model.threshold else Label.BENIGN
    return Prediction(label=label, score=score, model_id=model.model_id)


# -- corpus I/O (the contract with the fine-tuning harness) -------------------


def export_corpus(records: list[CorpusRecord], path: str | Path) -> int:
    """Write JSON Lines, one record per line, stable field order; returns
    the number of lines written."""
    try:
        with open(path, "w", encoding="utf-8") as handle:
            for record in records:
                handle.write(json.dumps(record.to_json_dict(), ensure_ascii=False))
                handle.write("\n")
    except OSError as exc:
        raise IoFailure(str(exc)) from exc
    return len(records)


def import_corpus(path: str | Path) -> list[CorpusRecord]:
    records = []
    try:
        with open(path, encoding="utf-8") as handle:
            for line in handle:
                line = line.strip()
                if line:
                    records.append(CorpusRecord.from_json_dict(json.loads(line)))
    except (OSError, ValueError, KeyError) as exc:
        raise IoFailure(f"unreadable corpus {path}: {exc}") from exc
    return records


def split_corpus(records: list[CorpusRecord], train_fraction: float = 0.9,
                 seed: int = 0) -> tuple[list[CorpusRecord], list[CorpusRecord]]:
    """Seeded, label-stratified shuffle-split (largest-remainder rounding)."""
    if not 0 < train_fraction < 1:
        raise ValueError("train_fraction must be in (0, 1)")
    rng = random.Random(seed)
    groups: dict[object, list[CorpusRecord]] = {}
    for record in records:
        groups.setdefault(record.label, []).append(record)
    for bucket in groups.values():
        rng.shuffle(bucket)

    total_train = round(train_fraction * len(records))
    quotas = {key: train_fraction * len(bucket) for key, bucket in groups.items()}
    take = {key: int(q) for key, q in quotas.items()}
    leftover = total_train - sum(take.values())
    for key in sorted(groups, key=lambda k: (-(quotas[k] - take[k]), str(k))):
        if leftover <= 0:
            break
        take[key] += 1
        leftover -= 1

    train: list[CorpusRecord] = []
    test: list[CorpusRecord] = []
    for key, bucket in groups.items():
        train.extend(bucket[: take[key]])
        test.extend(bucket[take[key]:])
    return train, test


# -- metrics -------------------------------------------------------------------


@dataclass(frozen=True)
class Metrics:
    precision: float
    recall: float
    f1: float
    true_positives: int
    false_positives: int
    false_negatives: int
    degenerate_precision: bool = False  # no positive predictions
    degenerate_recall: bool = False     # no positive labels

    def to_json_dict(self) -> dict:
        return {
            "precision": self.precision,
            "recall": self.recall,
            "f1": self.f1,
            "true_positives": self.true_positives,
            "false_positives": self.false_positives,
            "false_negatives": self.false_negatives,
            "degenerate_precision": self.degenerate_precision,
            "degenerate_recall": self.degenerate_recall,
        }


def evaluate(predictions: list[Label], labels: list[Label]) -> Metrics:
    if len(predictions) != len(labels) or not labels:
        raise LengthMismatch(
            f"{len(predictions)} predictions vs {len(labels)} labels")
    tp = sum(1 for p, t in zip(predictions, labels)
             if p is Label.MALICIOUS and t is Label.MALICIOUS)
    fp = sum(1 for p, t in zip(predictions, labels)
             if p is Label.MALICIOUS and t is Label.BENIGN)
    fn = sum(1 for p, t in zip(predictions, labels)
             if p is Label.BENIGN and t is Label.MALICIOUS)
    degenerate_p = (tp + fp) == 0
    degenerate_r = (tp + fn) == 0
    precision = 0.0 if degenerate_p else tp / (tp + fp)
    recall = 0.0 if degenerate_r else tp / (tp + fn)
    f1 = 0.0 if precision + recall == 0 else 2 * precision * recall / (precision + recall)
    return Metrics(precision=precision, recall=recall, f1=f1,
                   true_positives=tp, false_positives=fp, false_negatives=fn,
                   degenerate_precision=degenerate_p, degenerate_recall=degenerate_r)
