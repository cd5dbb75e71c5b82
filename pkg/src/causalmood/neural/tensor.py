"""Reverse-mode autodiff over 2D float64 arrays.

Every Tensor is a matrix; scalars are (1, 1). Ops build a graph of parent
links and backward closures; ``Tensor.backward()`` runs them in reverse
topological order (iteratively, so deep recurrent graphs do not hit the
interpreter recursion limit). Finite-ness is checked after every op while
``CHECK_FINITE`` is on.
"""

from __future__ import annotations

from typing import Callable, Optional, Sequence

import numpy as np

CHECK_FINITE = True

LOG_EPS = 1e-12  # probability clamp inside the cross-entropy


def _checked(data: np.ndarray) -> np.ndarray:
    if CHECK_FINITE and not np.isfinite(data).all():
        raise FloatingPointError("non-finite values produced by a tensor op")
    return data


class Tensor:
    __slots__ = ("data", "grad", "requires_grad", "_parents", "_backward")

    def __init__(
        self,
        data,
        requires_grad: bool = False,
        _parents: Sequence["Tensor"] = (),
        _backward: Optional[Callable[[], None]] = None,
    ):
        arr = np.asarray(data, dtype=np.float64)
        if arr.ndim != 2:
            raise ValueError(f"tensors are 2D matrices, got shape {arr.shape}")
        self.data = _checked(arr)
        self.requires_grad = requires_grad
        self.grad: Optional[np.ndarray] = (
            np.zeros_like(arr) if requires_grad else None
        )
        self._parents = tuple(_parents)
        self._backward = _backward

    @property
    def shape(self) -> tuple[int, int]:
        return self.data.shape  # type: ignore[return-value]

    def _ensure_grad(self) -> np.ndarray:
        if self.grad is None:
            self.grad = np.zeros_like(self.data)
        return self.grad

    def item(self) -> float:
        if self.data.size != 1:
            raise ValueError(f"item() on tensor of shape {self.shape}")
        return float(self.data[0, 0])

    def backward(self) -> None:
        """Seed d(self)=1 and accumulate into every reachable grad buffer."""
        topo: list[Tensor] = []
        seen: set[int] = set()
        stack: list[tuple[Tensor, bool]] = [(self, False)]
        while stack:
            node, expanded = stack.pop()
            if expanded:
                topo.append(node)
                continue
            if id(node) in seen:
                continue
            seen.add(id(node))
            stack.append((node, True))
            for p in node._parents:
                if id(p) not in seen:
                    stack.append((p, False))
        self._ensure_grad()
        self.grad = np.ones_like(self.data)
        for node in reversed(topo):
            if node._backward is not None:
                node._backward()

    # -- operator sugar -----------------------------------------------------

    def __matmul__(self, other: "Tensor") -> "Tensor":
        return matmul(self, other)

    def __add__(self, other: "Tensor") -> "Tensor":
        return add(self, other)

    def __mul__(self, other: "Tensor") -> "Tensor":
        return mul(self, other)

    def tanh(self) -> "Tensor":
        return tanh(self)

    def sigmoid(self) -> "Tensor":
        return sigmoid(self)

    def relu(self) -> "Tensor":
        return relu(self)

    def transpose(self) -> "Tensor":
        return transpose(self)

    def __repr__(self) -> str:
        return f"Tensor(shape={self.shape}, requires_grad={self.requires_grad})"


def _unbroadcast(grad: np.ndarray, shape: tuple[int, int]) -> np.ndarray:
    """Sum grad over axes that were broadcast up from ``shape``."""
    if grad.shape == shape:
        return grad
    out = grad
    if shape[0] == 1 and grad.shape[0] != 1:
        out = out.sum(axis=0, keepdims=True)
    if shape[1] == 1 and grad.shape[1] != 1:
        out = out.sum(axis=1, keepdims=True)
    return out


def matmul(a: Tensor, b: Tensor) -> Tensor:
    out = Tensor(a.data @ b.data, _parents=(a, b))

    def bwd() -> None:
        g = out.grad
        a._ensure_grad()
        a.grad += g @ b.data.T
        b._ensure_grad()
        b.grad += a.data.T @ g

    out._backward = bwd
    return out


def add(a: Tensor, b: Tensor) -> Tensor:
    out = Tensor(a.data + b.data, _parents=(a, b))

    def bwd() -> None:
        g = out.grad
        a._ensure_grad()
        a.grad += _unbroadcast(g, a.data.shape)
        b._ensure_grad()
        b.grad += _unbroadcast(g, b.data.shape)

    out._backward = bwd
    return out


def mul(a: Tensor, b: Tensor) -> Tensor:
    out = Tensor(a.data * b.data, _parents=(a, b))

    def bwd() -> None:
        g = out.grad
        a._ensure_grad()
        a.grad += _unbroadcast(g * b.data, a.data.shape)
        b._ensure_grad()
        b.grad += _unbroadcast(g * a.data, b.data.shape)

    out._backward = bwd
    return out


def scale(a: Tensor, s: float) -> Tensor:
    out = Tensor(a.data * s, _parents=(a,))

    def bwd() -> None:
        a._ensure_grad()
        a.grad += out.grad * s

    out._backward = bwd
    return out


def tanh(a: Tensor) -> Tensor:
    y = np.tanh(a.data)
    out = Tensor(y, _parents=(a,))

    def bwd() -> None:
        a._ensure_grad()
        a.grad += out.grad * (1.0 - y * y)

    out._backward = bwd
    return out


def sigmoid(a: Tensor) -> Tensor:
    y = np.where(a.data >= 0,
                 1.0 / (1.0 + np.exp(-np.clip(a.data, 0, None))),
                 np.exp(np.clip(a.data, None, 0))
                 / (1.0 + np.exp(np.clip(a.data, None, 0))))
    out = Tensor(y, _parents=(a,))

    def bwd() -> None:
        a._ensure_grad()
        a.grad += out.grad * y * (1.0 - y)

    out._backward = bwd
    return out


def relu(a: Tensor) -> Tensor:
    mask = a.data > 0
    out = Tensor(np.where(mask, a.data, 0.0), _parents=(a,))

    def bwd() -> None:
        a._ensure_grad()
        a.grad += out.grad * mask

    out._backward = bwd
    return out


def transpose(a: Tensor) -> Tensor:
    out = Tensor(a.data.T.copy(), _parents=(a,))

    def bwd() -> None:
        a._ensure_grad()
        a.grad += out.grad.T

    out._backward = bwd
    return out


def flip_rows(a: Tensor) -> Tensor:
    out = Tensor(a.data[::-1].copy(), _parents=(a,))

    def bwd() -> None:
        a._ensure_grad()
        a.grad += out.grad[::-1]

    out._backward = bwd
    return out


def slice_cols(a: Tensor, start: int, stop: int) -> Tensor:
    out = Tensor(a.data[:, start:stop].copy(), _parents=(a,))

    def bwd() -> None:
        a._ensure_grad()
        a.grad[:, start:stop] += out.grad

    out._backward = bwd
    return out


def concat_cols(parts: Sequence[Tensor]) -> Tensor:
    out = Tensor(np.concatenate([p.data for p in parts], axis=1),
                 _parents=tuple(parts))

    def bwd() -> None:
        g = out.grad
        offset = 0
        for p in parts:
            w = p.data.shape[1]
            p._ensure_grad()
            p.grad += g[:, offset:offset + w]
            offset += w

    out._backward = bwd
    return out


def concat_rows(parts: Sequence[Tensor]) -> Tensor:
    out = Tensor(np.concatenate([p.data for p in parts], axis=0),
                 _parents=tuple(parts))

    def bwd() -> None:
        g = out.grad
        offset = 0
        for p in parts:
            h = p.data.shape[0]
            p._ensure_grad()
            p.grad += g[offset:offset + h]
            offset += h

    out._backward = bwd
    return out


def embedding_rows(table: Tensor, indices: Sequence[int]) -> Tensor:
    """Gather rows of a (possibly trainable) table; grads scatter-add back."""
    idx = np.asarray(list(indices), dtype=np.int64)
    if idx.size and (idx.min() < 0 or idx.max() >= table.data.shape[0]):
        raise IndexError(f"embedding index out of range for table {table.shape}")
    out = Tensor(table.data[idx], _parents=(table,))

    def bwd() -> None:
        table._ensure_grad()
        np.add.at(table.grad, idx, out.grad)

    out._backward = bwd
    return out


def select_row(a: Tensor, t: int) -> Tensor:
    """One row as a (1 x d) tensor."""
    if not 0 <= t < a.data.shape[0]:
        raise IndexError(f"row {t} out of range for shape {a.shape}")
    out = Tensor(a.data[t:t + 1].copy(), _parents=(a,))

    def bwd() -> None:
        a._ensure_grad()
        a.grad[t:t + 1] += out.grad

    out._backward = bwd
    return out


def softmax_rows(a: Tensor) -> Tensor:
    shifted = a.data - a.data.max(axis=1, keepdims=True)
    e = np.exp(shifted)
    y = e / e.sum(axis=1, keepdims=True)
    out = Tensor(y, _parents=(a,))

    def bwd() -> None:
        g = out.grad
        a._ensure_grad()
        a.grad += y * (g - (g * y).sum(axis=1, keepdims=True))

    out._backward = bwd
    return out


def tsum(a: Tensor) -> Tensor:
    out = Tensor([[a.data.sum()]], _parents=(a,))

    def bwd() -> None:
        a._ensure_grad()
        a.grad += out.grad[0, 0]

    out._backward = bwd
    return out


def cross_entropy_from_probs(probs: Tensor, labels: Sequence[int]) -> Tensor:
    """Mean negative log probability of the true class.

    Input rows must already be probabilities (sum to 1 within 1e-6);
    probabilities below LOG_EPS are clamped and contribute zero gradient.
    """
    y = np.asarray(list(labels), dtype=np.int64)
    n, n_classes = probs.data.shape
    if y.shape != (n,):
        raise ValueError(f"{y.shape[0]} labels for {n} probability rows")
    if y.size and (y.min() < 0 or y.max() >= n_classes):
        raise ValueError(f"label out of range [0, {n_classes})")
    row_sums = probs.data.sum(axis=1)
    if np.abs(row_sums - 1.0).max() > 1e-6:
        raise ValueError("cross_entropy_from_probs expects probability rows")
    picked = probs.data[np.arange(n), y]
    clamped = np.maximum(picked, LOG_EPS)
    out = Tensor([[-np.log(clamped).mean()]], _parents=(probs,))

    def bwd() -> None:
        g = out.grad[0, 0]
        probs._ensure_grad()
        live = picked >= LOG_EPS
        rows = np.arange(n)[live]
        probs.grad[rows, y[live]] += -g / (n * clamped[live])

    out._backward = bwd
    return out
