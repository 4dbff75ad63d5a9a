"""Dense / BatchNorm / MLP / attention building blocks.

Layers hold `Tensor` parameters and expose a batched `__call__`. Parameter
registration is by name so the whole model flattens into a dict for the
optimizer and the checkpoint container.
"""

from __future__ import annotations

import numpy as np

from . import core
from .core import Tensor, gelu, matmul, softmax, stack


class Module:
    """Named-parameter container. Subclasses register via attributes."""

    def parameters(self) -> dict[str, Tensor]:
        out: dict[str, Tensor] = {}
        for name, value in vars(self).items():
            if isinstance(value, Tensor) and value.requires_grad:
                out[name] = value
            elif isinstance(value, Module):
                for sub, p in value.parameters().items():
                    out[f"{name}.{sub}"] = p
            elif isinstance(value, (list, tuple)):
                for i, item in enumerate(value):
                    if isinstance(item, Module):
                        for sub, p in item.parameters().items():
                            out[f"{name}.{i}.{sub}"] = p
        return out

    def buffers(self) -> dict[str, np.ndarray]:
        """Non-trained state that still belongs in a checkpoint."""
        out: dict[str, np.ndarray] = {}
        for name, value in vars(self).items():
            if isinstance(value, Module):
                for sub, b in value.buffers().items():
                    out[f"{name}.{sub}"] = b
            elif isinstance(value, (list, tuple)):
                for i, item in enumerate(value):
                    if isinstance(item, Module):
                        for sub, b in item.buffers().items():
                            out[f"{name}.{i}.{sub}"] = b
        return out

    def zero_grad(self):
        for p in self.parameters().values():
            p.grad = None

    def load_tensors(self, tensors: dict[str, np.ndarray]):
        """Restore parameters and buffers from a checkpoint tensor dict."""
        for name, p in self.parameters().items():
            arr = tensors[f"param.{name}"]
            if arr.shape != p.data.shape:
                raise ValueError(f"shape mismatch for {name}")
            p.data = arr.copy()
        for name in self.buffers():
            owner, attr = self._resolve_buffer(name)
            setattr(owner, attr, tensors[f"buffer.{name}"].copy())

    def _resolve_buffer(self, dotted: str):
        parts = dotted.split(".")
        obj = self
        for part in parts[:-1]:
            obj = obj[int(part)] if isinstance(obj, (list, tuple)) \
                else getattr(obj, part)
        return obj, parts[-1]


def init_dense(rng: np.random.Generator, fan_in: int, fan_out: int):
    """Uniform fan-in scaling, the conventional +-1/sqrt(fan_in)."""
    bound = 1.0 / np.sqrt(fan_in)
    w = rng.uniform(-bound, bound, size=(fan_in, fan_out))
    b = rng.uniform(-bound, bound, size=(fan_out,))
    return w, b


class Dense(Module):
    def __init__(self, rng: np.random.Generator, fan_in: int, fan_out: int):
        w, b = init_dense(rng, fan_in, fan_out)
        self.w = Tensor(w, requires_grad=True)
        self.b = Tensor(b, requires_grad=True)
        self.fan_in = fan_in
        self.fan_out = fan_out

    def __call__(self, x: Tensor) -> Tensor:
        if x.shape[-1] != self.fan_in:
            raise ValueError(f"dense expects last dim {self.fan_in}, got {x.shape}")
        return matmul(x, self.w) + self.b


class MLP(Module):
    """Two-layer MLP with GELU between, the stock block everywhere here."""

    def __init__(self, rng, fan_in: int, hidden: int, fan_out: int):
        self.fc1 = Dense(rng, fan_in, hidden)
        self.fc2 = Dense(rng, hidden, fan_out)

    def __call__(self, x: Tensor) -> Tensor:
        return self.fc2(gelu(self.fc1(x)))


class BatchNorm(Module):
    """1-D batch norm over the leading (batch) axis.

    Train mode normalizes by batch statistics (biased variance) and updates
    running stats with momentum 0.1; eval mode uses running stats only, so
    each row's output is independent of the rest of the batch.
    """

    def __init__(self, rng, dim: int, eps: float = 1e-5, momentum: float = 0.1):
        self.gamma = Tensor(np.ones(dim), requires_grad=True)
        self.beta = Tensor(np.zeros(dim), requires_grad=True)
        self.running_mean = np.zeros(dim)
        self.running_var = np.ones(dim)
        self.eps = eps
        self.momentum = momentum
        self.training = False

    def buffers(self):
        return {"running_mean": self.running_mean, "running_var": self.running_var}

    def __call__(self, x: Tensor) -> Tensor:
        if x.ndim < 2:
            raise ValueError("batchnorm expects a batched input")
        if self.training:
            if x.shape[0] < 2:
                raise ValueError("batchnorm in train mode needs batch size >= 2")
            mu = x.mean(axis=0, keepdims=True)
            centered = x - mu
            var = (centered * centered).mean(axis=0, keepdims=True)
            self.running_mean = (
                (1 - self.momentum) * self.running_mean
                + self.momentum * mu.data.reshape(-1)
            )
            self.running_var = (
                (1 - self.momentum) * self.running_var
                + self.momentum * var.data.reshape(-1)
            )
            xhat = centered * core.power(var + self.eps, -0.5)
        else:
            xhat = (x - self.running_mean) * (self.running_var + self.eps) ** -0.5
        return xhat * self.gamma + self.beta


def sinusoidal_positions(length: int, dim: int) -> np.ndarray:
    """Standard sin/cos positional table, (length, dim)."""
    pos = np.arange(length)[:, None]
    i = np.arange(dim // 2)[None, :]
    angles = pos / np.power(10000.0, 2.0 * i / dim)
    table = np.zeros((length, dim))
    table[:, 0::2] = np.sin(angles)
    table[:, 1::2] = np.cos(angles)
    return table


class AttentionLayer(Module):
    """Single-head self-attention + feed-forward, both with residuals."""

    def __init__(self, rng, dim: int):
        self.q = Dense(rng, dim, dim)
        self.k = Dense(rng, dim, dim)
        self.v = Dense(rng, dim, dim)
        self.o = Dense(rng, dim, dim)
        self.ff1 = Dense(rng, dim, dim)
        self.ff2 = Dense(rng, dim, dim)
        self.scale = 1.0 / np.sqrt(dim)

    def __call__(self, x: Tensor) -> Tensor:
        # x: (..., T, dim)
        q, k, v = self.q(x), self.k(x), self.v(x)
        scores = matmul(q, k.swapaxes(-1, -2)) * self.scale
        attn = softmax(scores, axis=-1)
        x = x + self.o(matmul(attn, v))
        return x + self.ff2(gelu(self.ff1(x)))

    def attention_weights(self, x: Tensor) -> np.ndarray:
        scores = matmul(self.q(x), self.k(x).swapaxes(-1, -2)) * self.scale
        return softmax(scores, axis=-1).data


class AttentionEncoder(Module):
    """2-layer single-head transformer with sinusoidal positions, mean-pooled."""

    def __init__(self, rng, dim: int, num_layers: int = 2, max_len: int = 10,
                 positional: bool = True):
        self.layers = [AttentionLayer(rng, dim) for _ in range(num_layers)]
        self.dim = dim
        self.max_len = max_len
        self.positional = positional
        self._pos_table = sinusoidal_positions(max_len, dim)

    def __call__(self, x: Tensor) -> Tensor:
        # x: (..., T, dim) with 1 <= T <= max_len; returns (..., dim)
        t = x.shape[-2]
        if t < 1:
            raise ValueError("attention encoder needs a nonempty sequence")
        if t > self.max_len:
            raise ValueError(f"sequence length {t} exceeds window {self.max_len}")
        if self.positional:
            x = x + self._pos_table[:t]
        for layer in self.layers:
            x = layer(x)
        return x.mean(axis=-2)
