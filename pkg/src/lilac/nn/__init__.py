from .core import Tensor, gelu, no_grad, softmax, stack
from .layers import (AttentionEncoder, AttentionLayer, BatchNorm, Dense, MLP,
                     Module)
from .optim import AdamW
from .checkpoint import load_checkpoint, save_checkpoint

__all__ = [
    "Tensor", "gelu", "no_grad", "softmax", "stack",
    "AttentionEncoder", "AttentionLayer", "BatchNorm", "Dense", "MLP", "Module",
    "AdamW", "load_checkpoint", "save_checkpoint",
]
