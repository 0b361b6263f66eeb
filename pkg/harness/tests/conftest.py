import json
import os
import re

import pytest

os.environ.setdefault("HF_HUB_OFFLINE", "1")
os.environ.setdefault("TOKENIZERS_PARALLELISM", "false")

# the scanner's closed output vocabulary: Table-style feature phrases plus
# entry markers and the file-name pieces used by the toy fixtures
FEATURE_PHRASES = [
    "import operating system module", "use operating system module call",
    "import file system module", "use file system module call",
    "read sensitive information", "import network module",
    "use network module call", "use URL", "import encoding module",
    "use encoding module call", "use base64 string", "use long string",
    "import process module", "use process module call", "use bash script",
    "evaluate code at run-time",
]
EXTRA_WORDS = ["start entry end of", "setup py", "lib util index js",
               "pkg mod init", "copylib hello"]


def build_vocab() -> dict[str, int]:
    words = set()
    for text in FEATURE_PHRASES + EXTRA_WORDS:
        words.update(re.findall(r"[a-z0-9]+", text.lower()))
    tokens = ["[PAD]", "[UNK]", "[CLS]", "[SEP]", "[MASK]",
              ".", ",", "/", "-", "_"] + sorted(words)
    return {token: i for i, token in enumerate(tokens)}


@pytest.fixture(scope="session")
def tiny_checkpoint(tmp_path_factory):
    """A small randomly initialized encoder checkpoint on local disk; the
    harness takes the checkpoint as configuration, so tests point it here."""
    from transformers import BertConfig, BertForSequenceClassification, BertTokenizer

    vocab = build_vocab()
    config = BertConfig(vocab_size=len(vocab), hidden_size=32,
                        num_hidden_layers=2, num_attention_heads=2,
                        intermediate_size=64, max_position_embeddings=512)
    out = tmp_path_factory.mktemp("checkpoint")
    BertForSequenceClassification(config).save_pretrained(out)
    BertTokenizer(vocab=vocab).save_pretrained(out)
    return str(out)


MALICIOUS_TEXTS = [
    "start entry setup.py, import operating system module, "
    "import network module, use process module call, read sensitive information, "
    "use process module call, read sensitive information, use URL, "
    "use network module call, end of entry",

    "start entry setup.py, import network module, read sensitive information, "
    "use URL, use network module call, use bash script, end of entry",

    "start entry pkg/init.py, read sensitive information, "
    "use base64 string, evaluate code at run-time, end of entry",

    "start entry index.js, import network module, read sensitive information, "
    "read sensitive information, use network module call, end of entry",
]

BENIGN_TEXTS = [
    "start entry lib/util.py, import file system module, "
    "use file system module call, end of entry",

    "start entry copylib/init.py, import file system module, end of entry",

    "start entry hello/init.py, use long string, end of entry",

    "start entry index.js, import encoding module, "
    "use encoding module call, end of entry",
]


def toy_record(i: int, text: str, label: str | None) -> dict:
    return {
        "package_name": f"toy{i}",
        "version": "1.0.0",
        "ecosystem": "pypi" if i % 2 == 0 else "npm",
        "description_text": text,
        "ordered_feature_ids": [],
        "label": label,
    }


@pytest.fixture(scope="session")
def toy_corpus(tmp_path_factory):
    """40 separable records, 20 per label, in the shared JSONL contract."""
    rows = []
    for i in range(20):
        rows.append(toy_record(i, MALICIOUS_TEXTS[i % len(MALICIOUS_TEXTS)],
                               "malicious"))
    for i in range(20, 40):
        rows.append(toy_record(i, BENIGN_TEXTS[i % len(BENIGN_TEXTS)], "benign"))
    path = tmp_path_factory.mktemp("corpus") / "toy.jsonl"
    with open(path, "w", encoding="utf-8") as handle:
        for row in rows:
            handle.write(json.dumps(row) + "\n")
    return path
