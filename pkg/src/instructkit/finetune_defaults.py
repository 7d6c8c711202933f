"""Reference fine-tuning constants for consumers of the exported corpus.

The toolkit itself never trains a model; these are the documented defaults
a downstream trainer is expected to start from. The output length caps in
the quality gate were chosen to keep records inside MAX_SEQUENCE_LENGTH.
"""

from dataclasses import dataclass


@dataclass(frozen=True)
class FinetuneDefaults:
    learning_rate: float = 2e-5
    weight_decay: float = 0.0
    lr_schedule: str = "cosine"
    warmup_ratio: float = 0.03
    epochs: int = 3
    per_device_batch_size: int = 4
    gradient_accumulation_steps: int = 8
    max_sequence_length: int = 1024
    # Loss is computed on response tokens only; instruction and input
    # tokens are masked out.
    loss_on_response_tokens_only: bool = True


FINETUNE_DEFAULTS = FinetuneDefaults()
