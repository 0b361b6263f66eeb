"""Fine-tuning harness: trains a pretrained encoder into the binary
maliciousness classifier over the scanner's exported JSON Lines corpora."""

from .config import TrainConfig
from .data import CorpusInvalid, ModelMissing, load_corpus
from .predict import predict_file, predict_records
from .train import finetune, training_accuracy

__version__ = "0.1.0"
