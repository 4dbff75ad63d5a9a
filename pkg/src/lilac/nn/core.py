"""Reverse-mode tape over numpy arrays.

This is not a general autodiff framework: it implements exactly the
primitives the fixed architectures in this project need (dense layers,
batch norm, GELU, FiLM, Gram-Schmidt, single-head attention) and nothing
else. Every primitive carries a hand-written vector-Jacobian product;
correctness is pinned by central finite differences in the test suite.

All data is float64, row-major. A batch is always the leading axis.
"""

from __future__ import annotations

import contextlib

import numpy as np
from scipy.special import erf

_GRAD_ENABLED = True

_INV_SQRT2 = 1.0 / np.sqrt(2.0)
_INV_SQRT2PI = 1.0 / np.sqrt(2.0 * np.pi)


@contextlib.contextmanager
def no_grad():
    """Disable graph construction (inference paths)."""
    global _GRAD_ENABLED
    prev = _GRAD_ENABLED
    _GRAD_ENABLED = False
    try:
        yield
    finally:
        _GRAD_ENABLED = prev


class NonFiniteError(ValueError):
    """Raised when a tensor op produces or receives NaN/Inf."""


def _as_array(x) -> np.ndarray:
    if isinstance(x, np.ndarray):
        return x.astype(np.float64, copy=False)
    return np.asarray(x, dtype=np.float64)


def _unbroadcast(grad: np.ndarray, shape: tuple) -> np.ndarray:
    """Sum `grad` down to `shape` (inverse of numpy broadcasting)."""
    if grad.shape == shape:
        return grad
    extra = grad.ndim - len(shape)
    if extra > 0:
        grad = grad.sum(axis=tuple(range(extra)))
    axes = tuple(i for i, n in enumerate(shape) if n == 1 and grad.shape[i] != 1)
    if axes:
        grad = grad.sum(axis=axes, keepdims=True)
    return grad.reshape(shape)


class Tensor:
    """A numpy array plus an optional place on the tape."""

    __slots__ = ("data", "grad", "requires_grad", "_parents", "_vjp")

    def __init__(self, data, requires_grad: bool = False):
        self.data = _as_array(data)
        self.grad: np.ndarray | None = None
        self.requires_grad = requires_grad
        self._parents: tuple = ()
        self._vjp = None

    # -- construction helpers ------------------------------------------------

    @property
    def shape(self):
        return self.data.shape

    @property
    def ndim(self):
        return self.data.ndim

    def detach(self) -> "Tensor":
        return Tensor(self.data)

    def __repr__(self):
        return f"Tensor(shape={self.data.shape}, requires_grad={self.requires_grad})"

    # -- backward ------------------------------------------------------------

    def backward(self, grad=None):
        """Accumulate gradients into every reachable tensor with requires_grad."""
        if grad is None:
            if self.data.size != 1:
                raise ValueError("backward() without an explicit gradient needs a scalar")
            grad = np.ones_like(self.data)
        else:
            grad = _as_array(grad)

        topo: list[Tensor] = []
        seen: set[int] = set()
        stack = [(self, False)]
        while stack:
            node, done = stack.pop()
            if done:
                topo.append(node)
                continue
            if id(node) in seen:
                continue
            seen.add(id(node))
            stack.append((node, True))
            for p in node._parents:
                if id(p) not in seen:
                    stack.append((p, False))

        grads: dict[int, np.ndarray] = {id(self): grad}
        for node in reversed(topo):
            g = grads.pop(id(node), None)
            if g is None:
                continue
            if node.requires_grad:
                node.grad = g if node.grad is None else node.grad + g
            if node._vjp is None:
                continue
            for parent, pg in zip(node._parents, node._vjp(g)):
                if pg is None:
                    continue
                key = id(parent)
                if key in grads:
                    grads[key] = grads[key] + pg
                else:
                    grads[key] = pg

    # -- operators -----------------------------------------------------------

    def __add__(self, other):
        return add(self, other)

    __radd__ = __add__

    def __sub__(self, other):
        return add(self, mul(other, -1.0))

    def __rsub__(self, other):
        return add(mul(self, -1.0), other)

    def __mul__(self, other):
        return mul(self, other)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Tensor):
            return mul(self, power(other, -1.0))
        return mul(self, 1.0 / float(other))

    def __neg__(self):
        return mul(self, -1.0)

    def __matmul__(self, other):
        return matmul(self, other)

    def __getitem__(self, idx):
        return take(self, idx)

    def sum(self, axis=None, keepdims=False):
        return tsum(self, axis=axis, keepdims=keepdims)

    def mean(self, axis=None, keepdims=False):
        return tmean(self, axis=axis, keepdims=keepdims)

    def reshape(self, *shape):
        if len(shape) == 1 and isinstance(shape[0], (tuple, list)):
            shape = tuple(shape[0])
        return reshape(self, shape)

    def swapaxes(self, a, b):
        return swapaxes(self, a, b)


def _wrap(x) -> Tensor:
    return x if isinstance(x, Tensor) else Tensor(x)


def _make(data: np.ndarray, parents: tuple, vjp) -> Tensor:
    out = Tensor(data)
    if _GRAD_ENABLED and any(
        p.requires_grad or p._parents for p in parents if isinstance(p, Tensor)
    ):
        out._parents = parents
        out._vjp = vjp
    return out


# -- primitives ---------------------------------------------------------------


def add(a, b) -> Tensor:
    a, b = _wrap(a), _wrap(b)
    data = a.data + b.data

    def vjp(g):
        return _unbroadcast(g, a.shape), _unbroadcast(g, b.shape)

    return _make(data, (a, b), vjp)


def mul(a, b) -> Tensor:
    a, b = _wrap(a), _wrap(b)
    data = a.data * b.data

    def vjp(g):
        return _unbroadcast(g * b.data, a.shape), _unbroadcast(g * a.data, b.shape)

    return _make(data, (a, b), vjp)


def power(a, exponent: float) -> Tensor:
    a = _wrap(a)
    data = a.data ** exponent

    def vjp(g):
        return (g * exponent * a.data ** (exponent - 1.0),)

    return _make(data, (a,), vjp)


def sqrt(a) -> Tensor:
    return power(a, 0.5)


def exp(a) -> Tensor:
    a = _wrap(a)
    data = np.exp(a.data)

    def vjp(g):
        return (g * data,)

    return _make(data, (a,), vjp)


def matmul(a, b) -> Tensor:
    a, b = _wrap(a), _wrap(b)
    data = a.data @ b.data

    def vjp(g):
        if a.ndim == 1 and b.ndim == 1:
            return g * b.data, g * a.data
        ad, bd = a.data, b.data
        if ad.ndim == 1:
            ad = ad[None, :]
        if bd.ndim == 1:
            bd = bd[:, None]
        gg = g
        if a.ndim == 1:
            gg = np.expand_dims(gg, -2)
        if b.ndim == 1:
            gg = np.expand_dims(gg, -1)
        da = gg @ bd.swapaxes(-1, -2)
        db = ad.swapaxes(-1, -2) @ gg
        if a.ndim == 1:
            da = da.reshape(da.shape[:-2] + (da.shape[-1],))
        if b.ndim == 1:
            db = db.reshape(db.shape[:-1])
        return _unbroadcast(da, a.shape), _unbroadcast(db, b.shape)

    return _make(data, (a, b), vjp)


def tsum(a, axis=None, keepdims=False) -> Tensor:
    a = _wrap(a)
    data = a.data.sum(axis=axis, keepdims=keepdims)

    def vjp(g):
        if axis is None:
            return (np.broadcast_to(g, a.shape).copy(),)
        g2 = g
        if not keepdims:
            g2 = np.expand_dims(g2, axis)
        return (np.broadcast_to(g2, a.shape).copy(),)

    return _make(data, (a,), vjp)


def tmean(a, axis=None, keepdims=False) -> Tensor:
    a = _wrap(a)
    if axis is None:
        n = a.data.size
    else:
        n = a.data.shape[axis]
    return mul(tsum(a, axis=axis, keepdims=keepdims), 1.0 / n)


def reshape(a, shape) -> Tensor:
    a = _wrap(a)
    data = a.data.reshape(shape)

    def vjp(g):
        return (g.reshape(a.shape),)

    return _make(data, (a,), vjp)


def swapaxes(a, ax1, ax2) -> Tensor:
    a = _wrap(a)
    data = a.data.swapaxes(ax1, ax2)

    def vjp(g):
        return (g.swapaxes(ax1, ax2),)

    return _make(data, (a,), vjp)


def take(a, idx) -> Tensor:
    """Basic indexing/slicing with scatter-add backward."""
    a = _wrap(a)
    data = a.data[idx]

    def vjp(g):
        out = np.zeros_like(a.data)
        np.add.at(out, idx, g)
        return (out,)

    return _make(data, (a,), vjp)


def stack(tensors, axis=0) -> Tensor:
    tensors = [_wrap(t) for t in tensors]
    data = np.stack([t.data for t in tensors], axis=axis)

    def vjp(g):
        return tuple(np.take(g, i, axis=axis) for i in range(len(tensors)))

    return _make(data, tuple(tensors), vjp)


def gelu(a) -> Tensor:
    """Exact-erf GELU: 0.5 * x * (1 + erf(x / sqrt(2)))."""
    a = _wrap(a)
    x = a.data
    phi = 0.5 * (1.0 + erf(x * _INV_SQRT2))
    data = x * phi

    def vjp(g):
        pdf = _INV_SQRT2PI * np.exp(-0.5 * x * x)
        return (g * (phi + x * pdf),)

    return _make(data, (a,), vjp)


def softmax(a, axis=-1) -> Tensor:
    """Numerically-stable softmax (max subtracted as a constant)."""
    a = _wrap(a)
    shifted = add(a, -a.data.max(axis=axis, keepdims=True))
    e = exp(shifted)
    return mul(e, power(tsum(e, axis=axis, keepdims=True), -1.0))


def check_finite(x: np.ndarray, what: str = "tensor") -> np.ndarray:
    if not np.all(np.isfinite(x)):
        raise NonFiniteError(f"{what} contains NaN/Inf")
    return x
