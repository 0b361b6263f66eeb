"""Training configuration."""

from dataclasses import asdict, dataclass


@dataclass(frozen=True)
class TrainConfig:
    base_model: str  # any pretrained bidirectional encoder checkpoint (path or hub id)
    learning_rate: float = 1e-6
    batch_size: int = 1
    epochs: int = 3
    max_tokens: int = 512
    seed: int = 0

    def to_dict(self) -> dict:
        return asdict(self)
