"""Fine-tune a pretrained encoder into the binary maliciousness classifier.

A classification head over the encoder, cross-entropy loss, Adam at the
configured learning rate; inputs re-truncated at the sub-word level by the
checkpoint's own tokenizer.  The saved artifact embeds the training config
and corpus checksum.
"""

import hashlib
import json
import random
from pathlib import Path

import torch
from transformers import AutoModelForSequenceClassification, AutoTokenizer

from .config import TrainConfig
from .data import ID_TO_LABEL, LABEL_TO_ID, load_corpus

META_FILE = "training_meta.json"


def _seed_everything(seed: int) -> None:
    random.seed(seed)
    torch.manual_seed(seed)


def finetune(corpus_path: str | Path, out_dir: str | Path,
             config: TrainConfig) -> Path:
    """Train on a labeled corpus; returns the model artifact directory."""
    records = load_corpus(corpus_path, require_labels=True)
    _seed_everything(config.seed)

    tokenizer = AutoTokenizer.from_pretrained(config.base_model)
    model = AutoModelForSequenceClassification.from_pretrained(
        config.base_model, num_labels=2,
        id2label=ID_TO_LABEL, label2id=LABEL_TO_ID)
    optimizer = torch.optim.Adam(model.parameters(), lr=config.learning_rate)

    order = list(range(len(records)))
    loss_history: list[float] = []
    model.train()
    for _ in range(config.epochs):
        random.shuffle(order)
        epoch_loss = 0.0
        for start in range(0, len(order), config.batch_size):
            batch = [records[i] for i in order[start:start + config.batch_size]]
            encoded = tokenizer(
                [r["description_text"] for r in batch],
                truncation=True, max_length=config.max_tokens,
                padding=True, return_tensors="pt")
            labels = torch.tensor([LABEL_TO_ID[r["label"]] for r in batch])
            output = model(**encoded, labels=labels)  # cross-entropy inside
            output.loss.backward()
            optimizer.step()
            optimizer.zero_grad()
            epoch_loss += output.loss.item() * len(batch)
        loss_history.append(epoch_loss / len(records))

    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    model.save_pretrained(out_dir)
    tokenizer.save_pretrained(out_dir)
    corpus_sha = hashlib.sha256(Path(corpus_path).read_bytes()).hexdigest()
    (out_dir / META_FILE).write_text(json.dumps({
        "config": config.to_dict(),
        "corpus_sha256": corpus_sha,
        "loss_history": loss_history,
        "records": len(records),
    }, indent=2), encoding="utf-8")
    return out_dir


def training_accuracy(model_dir: str | Path, corpus_path: str | Path,
                      max_tokens: int = 512) -> float:
    """Fraction of corpus records the saved model labels correctly."""
    from .predict import predict_records

    records = load_corpus(corpus_path, require_labels=True)
    predictions = predict_records(model_dir, records, max_tokens=max_tokens)
    hits = sum(p["label"] == r["label"] for p, r in zip(predictions, records))
    return hits / len(records)
